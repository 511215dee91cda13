//! One-parameter subgroups adapted to Harder-Narasimhan filtrations.
//!
//! A weighted filtration `(M_i, Γ_i)` with `Γ_1 > ⋯ > Γ_s` gives a
//! one-parameter subgroup acting on `(M_i/M_{i−1})_v` by weight `Γ_i`. For
//! the HN filtration with `Γ = u` this subgroup is maximally destabilizing,
//! and its normalized pairing is the instability of `M`, carried here as an
//! exact square.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{Mat, Rational, Scalar, Subspace};
use crate::hn::Filtration;
use crate::quiver::{kappa_check, theta_d, Representation, Weight};

/// Direction in which limits `lim λ(t)·M` are taken.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub enum Convention {
    #[default]
    #[serde(rename = "t0")]
    T0,
    #[serde(rename = "tinf")]
    TInf,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::T0 => "t0",
            Convention::TInf => "tinf",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t0" => Ok(Convention::T0),
            "tinf" => Ok(Convention::TInf),
            other => Err(Error::Input(format!("unknown convention {other:?}; expected t0 or tinf"))),
        }
    }
}

/// A filtration together with strictly decreasing weights on its layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFiltration {
    pub filtration: Filtration,
    pub gammas: Vec<Rational>,
}

impl WeightedFiltration {
    pub fn new(filtration: Filtration, gammas: Vec<Rational>) -> Result<Self> {
        if gammas.len() != filtration.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a filtration of length {}",
                gammas.len(),
                filtration.len()
            )));
        }
        if gammas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Input("weights must be strictly decreasing".into()));
        }
        Ok(WeightedFiltration { filtration, gammas })
    }

    /// The same filtration with every weight multiplied by `n`.
    pub fn scaled(&self, n: i64) -> Result<Self> {
        let s = Rational::integer(n);
        WeightedFiltration::new(self.filtration.clone(), self.gammas.iter().map(|g| g * &s).collect())
    }
}

fn layer_values(f: &Filtration, w: &Weight) -> Vec<i64> {
    f.quotient_dims.iter().map(|d| w.eval(d)).collect()
}

/// `⟨χ_θ, λ⟩ = Σ Γ_i θ(M_i/M_{i−1})`, checked against the telescoped form
/// `Σ (Γ_i − Γ_{i+1}) θ(M_i)`.
pub fn hm_pairing(wf: &WeightedFiltration, theta: &Weight) -> Result<Rational> {
    let f = &wf.filtration;
    if theta.eval(f.parent.dims()) != 0 {
        return Err(Error::Weight(format!("θ(M) = {} is not zero", theta.eval(f.parent.dims()))));
    }
    let by_layer = wf
        .gammas
        .iter()
        .zip(layer_values(f, theta))
        .fold(Rational::zero(), |acc, (g, t)| acc + g * &Rational::integer(t));
    let s = wf.gammas.len();
    let telescoped = (0..s).fold(Rational::zero(), |acc, i| {
        let next = if i + 1 < s { wf.gammas[i + 1].clone() } else { Rational::zero() };
        acc + &(&wf.gammas[i] - &next) * &Rational::integer(theta.eval(&f.steps[i].dims()))
    });
    if by_layer != telescoped {
        return Err(Error::Invariant(format!("pairing forms disagree: {by_layer} vs {telescoped}")));
    }
    Ok(by_layer)
}

/// Squared κ-norm `Σ Γ_i² κ(M_i/M_{i−1})`, checked against the entrywise
/// evaluation `Σ_v κ(v) Σ_j λ_{v,j}²` on the expanded subgroup.
pub fn norm_sq(wf: &WeightedFiltration, kappa: &Weight) -> Result<Rational> {
    if !kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    let grouped = wf
        .gammas
        .iter()
        .zip(layer_values(&wf.filtration, kappa))
        .fold(Rational::zero(), |acc, (g, k)| acc + &g.square() * &Rational::integer(k));
    let ops = OneParameterSubgroup::from_weighted(wf)?;
    let entrywise = ops.norm_sq(kappa);
    if grouped != entrywise {
        return Err(Error::Invariant(format!("norm forms disagree: {grouped} vs {entrywise}")));
    }
    Ok(grouped)
}

/// A diagonal one-parameter subgroup in a basis adapted to a filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneParameterSubgroup {
    /// Weight of every adapted basis vector, per vertex.
    pub weights: Vec<Vec<Rational>>,
    /// Adapted basis per vertex, as the columns of an invertible matrix.
    pub bases: Vec<Mat>,
    /// Filtration layer (0-based) of every adapted basis vector.
    pub layers: Vec<Vec<usize>>,
}

/// Bases of every vertex space extending bases of the filtration terms,
/// with the layer at which each vector first appears.
pub fn adapted_bases(f: &Filtration) -> (Vec<Mat>, Vec<Vec<usize>>) {
    let dims = f.parent.dims();
    let mut bases = Vec::with_capacity(dims.len());
    let mut layers = Vec::with_capacity(dims.len());
    for (v, &n) in dims.iter().enumerate() {
        let mut running = Subspace::zero(n);
        let mut cols: Vec<Vec<Rational>> = Vec::new();
        let mut lay = Vec::new();
        for (i, s) in f.steps.iter().enumerate() {
            for b in s.spaces[v].vectors() {
                if !running.contains_vector(b) {
                    running = running.sum(&Subspace::span(n, std::slice::from_ref(b)).expect("ambient matches")).expect("ambient matches");
                    cols.push(b.clone());
                    lay.push(i);
                }
            }
        }
        bases.push(Mat::from_cols(n, &cols).expect("columns of the vertex dimension"));
        layers.push(lay);
    }
    (bases, layers)
}

impl OneParameterSubgroup {
    pub fn from_weighted(wf: &WeightedFiltration) -> Result<Self> {
        let (bases, layers) = adapted_bases(&wf.filtration);
        if layers.iter().zip(wf.filtration.parent.dims()).any(|(l, &d)| l.len() != d) {
            return Err(Error::Invariant("filtration does not end at the whole representation".into()));
        }
        let weights = layers.iter().map(|l| l.iter().map(|&i| wf.gammas[i].clone()).collect()).collect();
        Ok(OneParameterSubgroup { weights, bases, layers })
    }

    /// All weights in vertex order.
    pub fn flat(&self) -> Vec<Rational> {
        self.weights.iter().flatten().cloned().collect()
    }

    pub fn norm_sq(&self, kappa: &Weight) -> Rational {
        self.weights.iter().zip(&kappa.0).fold(Rational::zero(), |acc, (w, &k)| {
            let k = Rational::integer(k);
            w.iter().fold(acc, |a, x| a + &x.square() * &k)
        })
    }

    /// `P_v diag(λ_v) P_v⁻¹` in the original coordinates of every vertex.
    pub fn diagonal_matrices(&self) -> Vec<Mat> {
        self.bases
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| {
                let n = w.len();
                let mut d = Mat::zeros(n, n);
                for (i, x) in w.iter().enumerate() {
                    d.set(i, i, x.clone());
                }
                let inv = p.inverse().expect("adapted bases are invertible");
                p.mul(&d).and_then(|pd| pd.mul(&inv)).expect("square blocks")
            })
            .collect()
    }

    /// The indivisible integral point on the ray, per vertex.
    pub fn primitive(&self) -> Result<Vec<Vec<i64>>> {
        let flat = primitive_lattice_point(&self.flat())?;
        let mut it = flat.into_iter();
        Ok(self.weights.iter().map(|w| it.by_ref().take(w.len()).collect()).collect())
    }
}

/// The unique indivisible integer vector on the positive ray through `ray`.
pub fn primitive_lattice_point(ray: &[Rational]) -> Result<Vec<i64>> {
    if ray.iter().all(|x| x.is_zero()) {
        return Err(Error::Input("the zero vector spans no ray".into()));
    }
    let lcm = ray.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = ray.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| (x / &g).to_i64().ok_or_else(|| Error::Invariant("primitive point overflows i64".into())))
        .collect()
}

/// `M` written in the given bases: `P_head⁻¹ M(a) P_tail` on every arrow.
pub fn change_basis(m: &Representation, bases: &[Mat]) -> Result<Representation> {
    let inverses: Vec<Mat> = bases
        .iter()
        .map(|p| p.inverse().ok_or_else(|| Error::Input("basis matrix is singular".into())))
        .collect::<Result<_>>()?;
    let maps = m
        .quiver()
        .arrows()
        .iter()
        .zip(m.maps())
        .map(|(a, x)| inverses[a.head].mul(x)?.mul(&bases[a.tail]))
        .collect::<Result<_>>()?;
    Representation::new(m.quiver_arc().clone(), m.dims().to_vec(), maps)
}

/// `λ_head − λ_tail ≥ 0` on a pair of global coordinates (0-based).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub head: usize,
    pub tail: usize,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-a{}+a{}>=0", self.tail + 1, self.head + 1)
    }
}

/// One constraint per nonzero entry `M(a)[k, l]`, deduplicated, with the
/// coordinates of all vertices numbered consecutively in vertex order.
pub fn limit_constraints(m: &Representation) -> Vec<Constraint> {
    let offsets: Vec<usize> = m
        .dims()
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let mut out: Vec<Constraint> = Vec::new();
    for (a, x) in m.quiver().arrows().iter().zip(m.maps()) {
        for k in 0..x.rows() {
            for l in 0..x.cols() {
                if !x.get(k, l).is_zero() {
                    let c = Constraint { head: offsets[a.head] + k, tail: offsets[a.tail] + l };
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LimitReport {
    pub exists: bool,
    pub convention: Convention,
    pub constraints: Vec<Constraint>,
    pub violated: Vec<Constraint>,
}

/// Whether the limit of `λ(t)·M` exists for `λ` diagonal in the coordinates
/// of `M`. Both conventions read the support constraints as printed,
/// `λ_head − λ_tail ≥ 0`: under `t0` the subgroup acts by `t^λ`, under `tinf`
/// by `t^{−λ}`.
pub fn limit_exists(lambda: &[Vec<Rational>], m: &Representation, convention: Convention) -> Result<LimitReport> {
    if lambda.len() != m.dims().len() || lambda.iter().zip(m.dims()).any(|(l, &d)| l.len() != d) {
        return Err(Error::DimensionMismatch("weights do not match the dimension vector".into()));
    }
    let flat: Vec<&Rational> = lambda.iter().flatten().collect();
    let constraints = limit_constraints(m);
    let violated: Vec<Constraint> = constraints.iter().copied().filter(|c| flat[c.head] < flat[c.tail]).collect();
    Ok(LimitReport { exists: violated.is_empty(), convention, constraints, violated })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KempfCheck {
    pub samples: usize,
    pub violations: usize,
    /// Largest sampled `(x,u)² / ((x,x)(u,u))`.
    pub max_ratio: Rational,
    /// `g_u(u)² = (u,u)`.
    pub g_u_sq: Rational,
}

fn inner(x: &[Rational], y: &[Rational], masses: &[i64]) -> Rational {
    x.iter().zip(y).zip(masses).fold(Rational::zero(), |acc, ((a, b), &k)| acc + &(a * b) * &Rational::integer(k))
}

fn proportional(x: &[Rational], u: &[Rational]) -> bool {
    (0..x.len()).all(|i| (0..x.len()).all(|j| &x[i] * &u[j] == &x[j] * &u[i]))
}

fn cone_point(rng: &mut ChaCha8Rng, r: usize) -> Vec<Rational> {
    let bound = 60 * r as i64;
    let denom = rng.gen_range(1..=12);
    let mut nums: Vec<i64> = Vec::with_capacity(r);
    while nums.len() < r {
        let x = rng.gen_range(-bound..=bound);
        if !nums.contains(&x) {
            nums.push(x);
        }
    }
    nums.sort_unstable_by(|a, b| b.cmp(a));
    nums.into_iter().map(|n| Rational::new(n, denom)).collect()
}

/// Samples points `x` of the open cone `x_1 > ⋯ > x_r` and checks
/// `(x,u)² ≤ (x,x)(u,u)` in the κ-weighted inner product, strictly unless
/// `x` is proportional to `u`.
pub fn kempf_function_check(u: &[Rational], masses: &[i64], samples: usize, seed: u64) -> Result<KempfCheck> {
    if u.len() != masses.len() {
        return Err(Error::DimensionMismatch(format!("{} entries but {} masses", u.len(), masses.len())));
    }
    if masses.iter().any(|&k| k <= 0) {
        return Err(Error::Weight("masses must be positive".into()));
    }
    if u.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Input("u is not in the open cone".into()));
    }
    let uu = inner(u, u, masses);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut max_ratio = Rational::zero();
    for _ in 0..samples {
        let x = cone_point(&mut rng, u.len());
        let xu = inner(&x, u, masses);
        let lhs = xu.square();
        let rhs = &inner(&x, &x, masses) * &uu;
        let ok = if proportional(&x, u) { lhs == rhs } else { lhs < rhs };
        if !ok {
            violations += 1;
        }
        if !rhs.is_zero() {
            let ratio = &lhs * &rhs.inv();
            if ratio > max_ratio {
                max_ratio = ratio;
            }
        }
    }
    Ok(KempfCheck { samples, violations, max_ratio, g_u_sq: uu })
}

fn seed_of(u: &[Rational]) -> u64 {
    let text = u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Everything derived from the HN filtration of an unstable representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KempfData {
    /// `u_i = κ(M)μ_i − Θ(M)`, or `μ_i` when `Θ(M) = 0`.
    pub u: Vec<Rational>,
    pub weighted: WeightedFiltration,
    pub ray: OneParameterSubgroup,
    /// `Σ u_i² κ(M_i/M_{i−1})`.
    pub instability_sq: Rational,
    /// The character whose pairing with the ray is `instability_sq`.
    pub character: Weight,
}

pub fn kempf_ops(f: &Filtration, big_theta: &Weight, kappa: &Weight) -> Result<KempfData> {
    if !kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    if f.len() < 2 {
        return Err(Error::Input("the representation is semistable".into()));
    }
    let dims = f.parent.dims();
    let total_theta = big_theta.eval(dims);
    let u: Vec<Rational> = if total_theta == 0 {
        f.slopes.clone()
    } else {
        let k = Rational::integer(kappa.eval(dims));
        let t = Rational::integer(total_theta);
        f.slopes.iter().map(|mu| &(&k * mu) - &t).collect()
    };
    let character = if total_theta == 0 { big_theta.clone() } else { theta_d(big_theta, kappa, dims) };
    let weighted = WeightedFiltration::new(f.clone(), u.clone())?;
    let instability_sq = norm_sq(&weighted, kappa)?;
    let ray = OneParameterSubgroup::from_weighted(&weighted)?;
    Ok(KempfData { u, weighted, ray, instability_sq, character })
}

impl KempfData {
    /// κ-masses `κ(M_i/M_{i−1})` of the layers.
    pub fn masses(&self) -> Vec<i64> {
        self.weighted.filtration.quotient_kappa.clone()
    }

    /// The Kempf-function check seeded from `u`, so that it is a function of
    /// the filtration alone.
    pub fn function_check(&self, samples: usize) -> Result<KempfCheck> {
        kempf_function_check(&self.u, &self.masses(), samples, seed_of(&self.u))
    }

    pub fn to_json_value(&self, convention: Convention, samples: usize) -> Result<Value> {
        let m = &self.weighted.filtration.parent;
        let strs = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let mat = |x: &Mat| (0..x.rows()).map(|i| strs(x.row(i))).collect::<Vec<_>>();
        let adapted = change_basis(m, &self.ray.bases)?;
        let limit = limit_exists(&self.ray.weights, &adapted, convention)?;
        let check = self.function_check(samples)?;
        let pairing = hm_pairing(&self.weighted, &self.character)?;
        Ok(json!({
            "vertices": m.quiver().vertices(),
            "u": strs(&self.u),
            "ray": strs(&self.ray.flat()),
            "ray_by_vertex": self.ray.weights.iter().map(|w| strs(w)).collect::<Vec<_>>(),
            "primitive": self.ray.primitive()?,
            "instability_sq": self.instability_sq.to_string(),
            "pairing": pairing.to_string(),
            "adapted_bases": self.ray.bases.iter().map(mat).collect::<Vec<_>>(),
            "diagonal_matrices": self.ray.diagonal_matrices().iter().map(mat).collect::<Vec<_>>(),
            "limit": {
                "convention": convention,
                "exists": limit.exists,
                "constraints": limit.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "violated": limit.violated.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            },
            "kempf_function_check": {
                "samples": check.samples,
                "violations": check.violations,
                "max_ratio": check.max_ratio.to_string(),
                "g_u_sq": check.g_u_sq.to_string(),
            },
        }))
    }
}

/// `true` when `x` is a positive multiple of `y`.
pub fn same_ray(x: &[Rational], y: &[Rational]) -> bool {
    if x.len() != y.len() || x.iter().all(|v| v.is_zero()) || y.iter().all(|v| v.is_zero()) {
        return false;
    }
    let i = x.iter().position(|v| !v.is_zero()).expect("nonzero");
    if y[i].is_zero() || (x[i].is_negative() != y[i].is_negative()) {
        return false;
    }
    let s = &x[i] * &y[i].inv();
    x.iter().zip(y).all(|(a, b)| *a == &s * b)
}
