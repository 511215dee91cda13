//! Matrix spaces, blow-ups, second Wong sequences and certified shrunk
//! subspaces.
//!
//! All searching happens at random points of a blow-up, reduced modulo a
//! word-sized prime. The shrunk subspace read off the Wong sequence is lifted
//! to the rationals by rational reconstruction and then checked exactly; the
//! rank of the point (which can only drop modulo a prime) bounds the
//! non-commutative rank from below. Nothing unchecked is ever returned.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{
    rational_reconstruct, Fp, Mat, Matrix, PreimageSolver, Rational, Scalar, Subspace, F61, F62, MERSENNE_61, MORE_PRIMES_62,
    PRIME_62,
};
use crate::quiver::{Instance, Weight};

/// Number of attempts per blow-up degree used when callers do not choose.
pub const DEFAULT_BUDGET: usize = 3;

/// Largest `n·d` for which certificate ranks are recomputed over the rationals.
pub const EXACT_RANK_LIMIT: usize = 64;

/// A linear subspace of `n × n` matrices, given by a basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MatrixSpace {
    n: usize,
    generators: Vec<Mat>,
}

impl MatrixSpace {
    /// Span of the given matrices; dependent generators are dropped.
    pub fn new(n: usize, generators: Vec<Mat>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.rows() != n || g.cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} generator in a space of {n}x{n} matrices",
                g.rows(),
                g.cols()
            )));
        }
        let mut seen = Subspace::<Rational>::zero(n * n);
        let mut kept = Vec::new();
        for g in generators {
            let flat = g.entries().to_vec();
            if !seen.contains_vector(&flat) {
                seen = seen.sum(&Subspace::span(n * n, &[flat])?)?;
                kept.push(g);
            }
        }
        Ok(MatrixSpace { n, generators: kept })
    }

    pub fn zero(n: usize) -> Self {
        MatrixSpace { n, generators: Vec::new() }
    }

    /// All of `M(n)`, spanned by the elementary matrices.
    pub fn full(n: usize) -> Self {
        let generators = (0..n * n)
            .map(|k| {
                let mut m = Mat::zeros(n, n);
                m.set(k / n, k % n, Rational::integer(1));
                m
            })
            .collect();
        MatrixSpace { n, generators }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    fn as_blocks(&self) -> BlockSpace {
        BlockSpace {
            sources: vec![BlockSlot { dim: self.n, copies: 1 }],
            targets: vec![BlockSlot { dim: self.n, copies: 1 }],
            maps: vec![vec![self.generators.clone()]],
        }
    }
}

/// `B(U) = Σ_g g·U`.
pub fn space_image(b: &MatrixSpace, u: &Subspace) -> Result<Subspace> {
    if u.ambient_dim() != b.n {
        return Err(Error::DimensionMismatch(format!(
            "subspace of F^{} for a space of {}x{} matrices",
            u.ambient_dim(),
            b.n,
            b.n
        )));
    }
    let mut acc = Subspace::zero(b.n);
    for g in &b.generators {
        acc = acc.sum(&u.apply(g)?)?;
    }
    Ok(acc)
}

/// The `d`-th blow-up, spanned by `g ⊗ E_kl`; coordinate `(a, k)` of
/// `F^n ⊗ F^d` sits at index `a·d + k`.
pub fn blow_up(b: &MatrixSpace, d: usize) -> Result<MatrixSpace> {
    if d == 0 {
        return Err(Error::Input("blow-up degree must be at least 1".into()));
    }
    let mut gens = Vec::with_capacity(b.generators.len() * d * d);
    for g in &b.generators {
        for k in 0..d {
            for l in 0..d {
                let mut e = Mat::zeros(d, d);
                e.set(k, l, Rational::integer(1));
                gens.push(g.kron(&e));
            }
        }
    }
    Ok(MatrixSpace { n: b.n * d, generators: gens })
}

/// Limit of the second Wong sequence `T_0 = 0`, `T_{i+1} = B(A⁻¹ T_i)`.
pub fn wong_limit(a: &Mat, b: &MatrixSpace) -> Result<Subspace> {
    if a.rows() != b.n || a.cols() != b.n {
        return Err(Error::DimensionMismatch("point and space sizes differ".into()));
    }
    let mut t = Subspace::zero(b.n);
    loop {
        let next = space_image(b, &Subspace::preimage(a, &t)?)?;
        if next.dim() == t.dim() {
            return Ok(t);
        }
        t = next;
    }
}

/// Group of coordinates in a block space: `copies` copies of `F^dim`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BlockSlot {
    pub dim: usize,
    pub copies: usize,
}

/// Matrix space whose elements are block matrices: the block between copy
/// `q` of target `j` and copy `r` of source `i` ranges independently over
/// the span of `maps[j][i]`.
///
/// Both a plain matrix space (one source, one target, one copy) and the
/// quiver construction have this shape, and the `d`-th blow-up of such a
/// space is the same structure with every copy count multiplied by `d`.
/// Image of `⊕_i U_i^{copies}` is `⊕_j S_j^{copies}` with
/// `S_j = Σ_i Σ_k maps[j][i][k]·U_i`, so subspaces of this product form are
/// handled through their parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockSpace {
    pub sources: Vec<BlockSlot>,
    pub targets: Vec<BlockSlot>,
    pub maps: Vec<Vec<Vec<Mat>>>,
}

fn slot_total(slots: &[BlockSlot]) -> usize {
    slots.iter().map(|s| s.dim * s.copies).sum()
}

fn parts_dim<F: Scalar>(slots: &[BlockSlot], parts: &[Subspace<F>]) -> usize {
    slots.iter().zip(parts).map(|(s, p)| s.copies * p.dim()).sum()
}

impl BlockSpace {
    pub fn new(sources: Vec<BlockSlot>, targets: Vec<BlockSlot>, maps: Vec<Vec<Vec<Mat>>>) -> Result<Self> {
        if slot_total(&sources) != slot_total(&targets) {
            return Err(Error::DimensionMismatch("block space is not square".into()));
        }
        if maps.len() != targets.len() || maps.iter().any(|row| row.len() != sources.len()) {
            return Err(Error::DimensionMismatch("block map table has the wrong shape".into()));
        }
        for (j, row) in maps.iter().enumerate() {
            for (i, ms) in row.iter().enumerate() {
                if ms.iter().any(|m| m.rows() != targets[j].dim || m.cols() != sources[i].dim) {
                    return Err(Error::DimensionMismatch(format!("block ({j}, {i}) has the wrong shape")));
                }
            }
        }
        Ok(BlockSpace { sources, targets, maps })
    }

    /// Side length of the square matrices.
    pub fn size(&self) -> usize {
        slot_total(&self.sources)
    }

    fn maps_in<F: Scalar>(&self) -> Option<Vec<Vec<Vec<Matrix<F>>>>> {
        self.maps
            .iter()
            .map(|row| row.iter().map(|ms| ms.iter().map(Matrix::<F>::reduce).collect()).collect())
            .collect()
    }

    fn image_parts_with<F: Scalar>(&self, maps: &[Vec<Vec<Matrix<F>>>], parts: &[Subspace<F>]) -> Vec<Subspace<F>> {
        self.targets
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let mut vs = Vec::new();
                for (i, u) in parts.iter().enumerate() {
                    for m in &maps[j][i] {
                        for v in u.vectors() {
                            vs.push(m.mul_vec(v).expect("block shapes"));
                        }
                    }
                }
                Subspace::span(t.dim, &vs).expect("block shapes")
            })
            .collect()
    }

    /// Parts of the image of `⊕_i U_i^{copies}`.
    pub fn image_parts(&self, parts: &[Subspace]) -> Result<Vec<Subspace>> {
        if parts.len() != self.sources.len() || parts.iter().zip(&self.sources).any(|(p, s)| p.ambient_dim() != s.dim) {
            return Err(Error::DimensionMismatch("parts do not match the source slots".into()));
        }
        let maps = self.maps_in::<Rational>().expect("rationals");
        Ok(self.image_parts_with(&maps, parts))
    }

    /// `dim U − dim B(U)` for `U = ⊕_i U_i^{copies}`.
    pub fn shrinkage(&self, parts: &[Subspace]) -> Result<(usize, usize, Vec<Subspace>)> {
        let img = self.image_parts(parts)?;
        Ok((parts_dim(&self.sources, parts), parts_dim(&self.targets, &img), img))
    }

    /// The same structure with every copy count multiplied by `d`.
    pub fn scaled(&self, d: usize) -> BlockSpace {
        let scale = |s: &BlockSlot| BlockSlot { dim: s.dim, copies: s.copies * d };
        BlockSpace {
            sources: self.sources.iter().map(scale).collect(),
            targets: self.targets.iter().map(scale).collect(),
            maps: self.maps.clone(),
        }
    }

    fn offsets(slots: &[BlockSlot]) -> Vec<usize> {
        let mut out = Vec::with_capacity(slots.len());
        let mut acc = 0;
        for s in slots {
            out.push(acc);
            acc += s.dim * s.copies;
        }
        out
    }

    /// The pseudo-random element determined by `(seed, range)`: every block
    /// coefficient is an integer drawn uniformly from `[−range, range]`, in
    /// the order target, target copy, source, source copy, generator.
    pub fn point<F: Scalar>(&self, seed: u64, range: i64) -> Matrix<F> {
        let maps = self.maps_in::<F>().expect("map denominators are units");
        self.point_with(&maps, seed, range)
    }

    fn point_with<F: Scalar>(&self, maps: &[Vec<Vec<Matrix<F>>>], seed: u64, range: i64) -> Matrix<F> {
        let n = self.size();
        let mut a = Matrix::<F>::zeros(n, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row_off = Self::offsets(&self.targets);
        let col_off = Self::offsets(&self.sources);
        for (j, t) in self.targets.iter().enumerate() {
            for q in 0..t.copies {
                let r0 = row_off[j] + q * t.dim;
                for (i, s) in self.sources.iter().enumerate() {
                    let gens = &maps[j][i];
                    if gens.is_empty() {
                        continue;
                    }
                    for r in 0..s.copies {
                        let c0 = col_off[i] + r * s.dim;
                        let coeffs: Vec<F> =
                            gens.iter().map(|_| F::from_i64(rng.gen_range(-range..=range))).collect();
                        for (g, c) in gens.iter().zip(&coeffs) {
                            if c.is_zero() {
                                continue;
                            }
                            for b in 0..t.dim {
                                for x in 0..s.dim {
                                    let v = g.get(b, x);
                                    if !v.is_zero() {
                                        let cur = a.get(r0 + b, c0 + x).add(&c.mul(v));
                                        a.set(r0 + b, c0 + x, cur);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        a
    }
}

/// Outcome of one Wong-sequence run at a sampled point.
struct Sample<F> {
    rank: usize,
    parts: Vec<Subspace<F>>,
}

/// Runs the second Wong sequence at the point `(seed, range)` of `bs` over
/// `F` and reads off the parts of `A⁻¹(T*)`. Returns `None` when the point
/// does not yield a product-form shrunk subspace.
fn wong_sample<F: Scalar>(bs: &BlockSpace, seed: u64, range: i64) -> Option<Sample<F>> {
    let maps = bs.maps_in::<F>()?;
    let a = bs.point_with(&maps, seed, range);
    let solver = PreimageSolver::new(&a);
    let n = bs.size();
    let row_off = BlockSpace::offsets(&bs.targets);
    let col_off = BlockSpace::offsets(&bs.sources);
    let mut targets: Vec<Subspace<F>> = bs.targets.iter().map(|t| Subspace::zero(t.dim)).collect();
    loop {
        let mut sparse = Vec::new();
        for (j, (t, s)) in bs.targets.iter().zip(&targets).enumerate() {
            for q in 0..t.copies {
                let base = row_off[j] + q * t.dim;
                for v in s.vectors() {
                    sparse.push(
                        v.iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(k, x)| (base + k, x.clone()))
                            .collect::<Vec<_>>(),
                    );
                }
            }
        }
        let (pre, contained) = solver.preimage_sparse(&sparse);
        let parts: Vec<Subspace<F>> = bs
            .sources
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut vs = Vec::new();
                for x in &pre {
                    for r in 0..s.copies {
                        let base = col_off[i] + r * s.dim;
                        let slice = &x[base..base + s.dim];
                        if slice.iter().any(|c| !c.is_zero()) {
                            vs.push(slice.to_vec());
                        }
                    }
                }
                Subspace::span(s.dim, &vs).expect("slot shapes")
            })
            .collect();
        let next = bs.image_parts_with(&maps, &parts);
        let grew = next.iter().zip(&targets).any(|(a, b)| a.dim() != b.dim());
        if grew {
            targets = next;
            continue;
        }
        if !contained {
            return None;
        }
        let rank = solver.rank();
        let dim_pre = parts_dim(&bs.targets, &targets) + (n - rank);
        if dim_pre != parts_dim(&bs.sources, &parts) {
            return None;
        }
        return Some(Sample { rank, parts });
    }
}

/// A Wong sample with every part reduced to residues.
struct Residues {
    rank: usize,
    ambient: Vec<usize>,
    pivots: Vec<Vec<usize>>,
    rows: Vec<Vec<Vec<u64>>>,
}

fn residues<const P: u64>(bs: &BlockSpace, seed: u64, range: i64) -> Option<Residues> {
    let s = wong_sample::<Fp<P>>(bs, seed, range)?;
    Some(Residues {
        rank: s.rank,
        ambient: s.parts.iter().map(|p| p.ambient_dim()).collect(),
        pivots: s.parts.iter().map(|p| p.pivots().to_vec()).collect(),
        rows: s.parts.iter().map(|p| p.vectors().iter().map(|v| v.iter().map(|x| x.value()).collect()).collect()).collect(),
    })
}

type Sampler = fn(&BlockSpace, u64, i64) -> Option<Residues>;

/// Primes tried in turn when lifting a sample, with their samplers.
const PRIMES: [(u64, Sampler); 6] = [
    (MERSENNE_61, residues::<MERSENNE_61>),
    (PRIME_62, residues::<PRIME_62>),
    (MORE_PRIMES_62[0], residues::<{ MORE_PRIMES_62[0] }>),
    (MORE_PRIMES_62[1], residues::<{ MORE_PRIMES_62[1] }>),
    (MORE_PRIMES_62[2], residues::<{ MORE_PRIMES_62[2] }>),
    (MORE_PRIMES_62[3], residues::<{ MORE_PRIMES_62[3] }>),
];

/// Residues of one sample combined over several primes.
struct Combined {
    rank: usize,
    ambient: Vec<usize>,
    pivots: Vec<Vec<usize>>,
    rows: Vec<Vec<Vec<BigInt>>>,
    modulus: BigInt,
}

impl Combined {
    fn new(r: Residues, p: u64) -> Self {
        let rows = r.rows.iter().map(|part| part.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect()).collect();
        Combined { rank: r.rank, ambient: r.ambient, pivots: r.pivots, rows, modulus: BigInt::from(p) }
    }

    /// Chinese remaindering with residues modulo a further prime; `false`
    /// when the sample looks different there.
    fn absorb(&mut self, r: Residues, p: u64) -> bool {
        if r.rank != self.rank || r.pivots != self.pivots {
            return false;
        }
        let pb = BigInt::from(p);
        let inv = self.modulus.modinv(&pb).expect("distinct primes");
        for (part, new) in self.rows.iter_mut().zip(&r.rows) {
            for (v, w) in part.iter_mut().zip(new) {
                for (x, &y) in v.iter_mut().zip(w) {
                    let t = ((BigInt::from(y) - &*x) * &inv).mod_floor(&pb);
                    *x += &self.modulus * t;
                }
            }
        }
        self.modulus *= pb;
        true
    }

    fn lift(&self) -> Option<Vec<Subspace>> {
        self.rows
            .iter()
            .zip(&self.pivots)
            .zip(&self.ambient)
            .map(|((part, piv), &n)| {
                let vs: Option<Vec<Vec<Rational>>> =
                    part.iter().map(|v| v.iter().map(|x| rational_reconstruct(x, &self.modulus)).collect()).collect();
                let s = Subspace::span(n, &vs?).ok()?;
                (s.dim() == piv.len()).then_some(s)
            })
            .collect()
    }
}

fn mix_seed(seed: u64, degree: usize, attempt: usize) -> u64 {
    let mut z = seed ^ ((degree as u64) << 32) ^ (attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a certified search produced.
#[derive(Clone, Debug)]
pub(crate) struct Found {
    pub parts: Vec<Subspace>,
    pub image: Vec<Subspace>,
    pub c: usize,
    pub degree: usize,
    pub seed: u64,
    pub range: i64,
    pub rank: usize,
}

/// Searches blow-up degrees `1..=max(1, n−1)`, `budget` points each, for a
/// point whose Wong limit lifts to an exactly verified shrunk subspace.
/// `refine` may replace the lifted parts (e.g. by an invariant closure)
/// before the exact check; returning `None` rejects the sample.
pub(crate) fn certified_search(
    bs: &BlockSpace,
    seed: u64,
    budget: usize,
    refine: &dyn Fn(Vec<Subspace>) -> Option<Vec<Subspace>>,
) -> Result<Found> {
    let n = bs.size();
    if n == 0 {
        let parts = bs.sources.iter().map(|s| Subspace::zero(s.dim)).collect();
        let image = bs.targets.iter().map(|t| Subspace::zero(t.dim)).collect();
        return Ok(Found { parts, image, c: 0, degree: 1, seed, range: 0, rank: 0 });
    }
    let budget = budget.max(1);
    let max_degree = (n - 1).max(1);
    for degree in 1..=max_degree {
        let scaled = bs.scaled(degree);
        for attempt in 0..budget {
            let range = (2 * n * n) as i64 * (1i64 << attempt.min(20));
            let s = mix_seed(seed, degree, attempt);
            let Some(first) = (PRIMES[0].1)(&scaled, s, range) else { continue };
            let mut combined = Combined::new(first, PRIMES[0].0);
            let mut previous: Option<Vec<Subspace>> = None;
            for k in 0..PRIMES.len() {
                if k > 0 {
                    let Some(r) = (PRIMES[k].1)(&scaled, s, range) else { break };
                    if !combined.absorb(r, PRIMES[k].0) {
                        break;
                    }
                }
                let Some(parts) = combined.lift() else { continue };
                if previous.as_ref() == Some(&parts) {
                    break;
                }
                previous = Some(parts.clone());
                let Some(parts) = refine(parts) else { continue };
                let (du, dbu, image) = bs.shrinkage(&parts)?;
                if du < dbu {
                    continue;
                }
                let c = du - dbu;
                let rank = combined.rank;
                if rank.div_ceil(degree) == n - c {
                    return Ok(Found { parts, image, c, degree, seed: s, range, rank });
                }
            }
        }
    }
    Err(Error::Validation(format!(
        "no certified shrunk subspace found for a space of size {n} within {budget} attempts per degree"
    )))
}

/// Which matrix space a certificate speaks about.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpaceSpec {
    /// An explicit matrix space.
    Explicit(MatrixSpace),
    /// The space built from a representation and a weight vanishing on it.
    Quiver { instance: Instance },
}

impl SpaceSpec {
    pub fn block_space(&self) -> Result<BlockSpace> {
        match self {
            SpaceSpec::Explicit(m) => Ok(m.as_blocks()),
            SpaceSpec::Quiver { instance } => Ok(crate::disc::block_space(&instance.rep, &instance.theta)?.0),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            SpaceSpec::Explicit(m) => json!({"kind": "explicit", "n": m.n, "generators": m.generators}),
            SpaceSpec::Quiver { instance } => json!({"kind": "quiver", "instance": instance.to_json_value()}),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v.get("kind").and_then(Value::as_str) {
            Some("explicit") => {
                let n = v
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Input("explicit space needs n".into()))? as usize;
                let gens: Vec<Vec<Vec<Rational>>> = serde_json::from_value(
                    v.get("generators").cloned().unwrap_or(Value::Array(Vec::new())),
                )
                .map_err(|e| Error::Input(format!("generators: {e}")))?;
                let gens = gens
                    .into_iter()
                    .map(|rows| if n == 0 { Ok(Mat::zeros(0, 0)) } else { Mat::from_rows(n, rows) })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SpaceSpec::Explicit(MatrixSpace::new(n, gens)?))
            }
            Some("quiver") => {
                let inst = v.get("instance").ok_or_else(|| Error::Input("quiver space needs an instance".into()))?;
                Ok(SpaceSpec::Quiver { instance: Instance::from_json_value(inst)? })
            }
            _ => Err(Error::Input("space kind must be \"explicit\" or \"quiver\"".into())),
        }
    }
}

/// A certified value `c = disc(B)`.
///
/// `U = ⊕_i U_i^{copies}` is stored through its parts `U_i` (for an explicit
/// space there is a single part and `U` is that subspace). The point of the
/// `d`-th blow-up is stored as the seed and coefficient range that
/// regenerate it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShrunkCertificate {
    pub space: SpaceSpec,
    pub u_parts: Vec<Subspace>,
    pub c: usize,
    pub bu_parts: Vec<Subspace>,
    pub blowup_degree: usize,
    pub point_seed: u64,
    pub coeff_range: i64,
    pub blowup_rank: usize,
}

impl ShrunkCertificate {
    pub(crate) fn from_found(space: SpaceSpec, f: Found) -> Self {
        ShrunkCertificate {
            space,
            u_parts: f.parts,
            c: f.c,
            bu_parts: f.image,
            blowup_degree: f.degree,
            point_seed: f.seed,
            coeff_range: f.range,
            blowup_rank: f.rank,
        }
    }

    /// `U` as a subspace of the whole space (only sensible for small spaces).
    pub fn u(&self) -> Result<Subspace> {
        let bs = self.space.block_space()?;
        Ok(expand(&bs.sources, &self.u_parts))
    }

    /// `B(U)` as a subspace of the whole space.
    pub fn bu(&self) -> Result<Subspace> {
        let bs = self.space.block_space()?;
        Ok(expand(&bs.targets, &self.bu_parts))
    }

    /// The blow-up element whose rank is certified. For an explicit space it
    /// is `Σ_g g ⊗ C_g` in the `a·d + k` coordinates of the blow-up; for a
    /// quiver space it is the corresponding block matrix.
    pub fn blowup_point(&self) -> Result<Mat> {
        let bs = self.space.block_space()?.scaled(self.blowup_degree);
        let p: Mat = bs.point(self.point_seed, self.coeff_range);
        match &self.space {
            SpaceSpec::Explicit(m) => Ok(block_to_kron(&p, m.n, self.blowup_degree)),
            SpaceSpec::Quiver { .. } => Ok(p),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let bs = self.space.block_space().ok();
        let (u_dim, bu_dim) = match &bs {
            Some(b) => (parts_dim(&b.sources, &self.u_parts), parts_dim(&b.targets, &self.bu_parts)),
            None => (0, 0),
        };
        json!({
            "space": self.space.to_json(),
            "U": {"dim": u_dim, "parts": self.u_parts},
            "c": self.c,
            "BU": {"dim": bu_dim, "parts": self.bu_parts},
            "blowup_degree": self.blowup_degree,
            "blowup_point": {"seed": self.point_seed, "range": self.coeff_range},
            "blowup_rank": self.blowup_rank,
        })
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Input(format!("certificate is missing {k:?}")));
        let parts = |k: &str| -> Result<Vec<Subspace>> {
            let p = field(k)?.get("parts").ok_or_else(|| Error::Input(format!("{k} has no parts")))?;
            serde_json::from_value(p.clone()).map_err(|e| Error::Input(format!("{k}: {e}")))
        };
        let uint = |k: &str| -> Result<u64> {
            field(k)?.as_u64().ok_or_else(|| Error::Input(format!("{k} must be a nonnegative integer")))
        };
        let point = field("blowup_point")?;
        Ok(ShrunkCertificate {
            space: SpaceSpec::from_json(field("space")?)?,
            u_parts: parts("U")?,
            c: uint("c")? as usize,
            bu_parts: parts("BU")?,
            blowup_degree: uint("blowup_degree")? as usize,
            point_seed: point
                .get("seed")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Input("blowup_point needs a seed".into()))?,
            coeff_range: point
                .get("range")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Input("blowup_point needs a range".into()))?,
            blowup_rank: uint("blowup_rank")? as usize,
        })
    }
}

fn expand(slots: &[BlockSlot], parts: &[Subspace]) -> Subspace {
    let n = slot_total(slots);
    let mut vs = Vec::new();
    let mut off = 0;
    for (s, p) in slots.iter().zip(parts) {
        for r in 0..s.copies {
            for v in p.vectors() {
                let mut w = vec![Rational::integer(0); n];
                w[off + r * s.dim..off + (r + 1) * s.dim].clone_from_slice(v);
                vs.push(w);
            }
        }
        off += s.dim * s.copies;
    }
    Subspace::span(n, &vs).expect("consistent shape")
}

/// Reorders copy-major coordinates `r·n + a` into `a·d + r`.
fn block_to_kron(p: &Mat, n: usize, d: usize) -> Mat {
    let idx = |i: usize| (i % n) * d + i / n;
    let mut out = Mat::zeros(n * d, n * d);
    for i in 0..n * d {
        for j in 0..n * d {
            let v = p.get(i, j);
            if !v.is_zero() {
                out.set(idx(i), idx(j), v.clone());
            }
        }
    }
    out
}

/// Result of re-checking a certificate from scratch.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CertificateCheck {
    pub dim_u: usize,
    pub dim_bu: usize,
    pub image_matches: bool,
    pub shrunk_ok: bool,
    pub recomputed_rank: usize,
    pub rank_method: String,
    pub rank_ok: bool,
    pub valid: bool,
}

/// Recomputes `B(U)`, `dim U − dim B(U)` and the rank of the blow-up point.
/// The rank is computed over the rationals when `n·d` is at most
/// [`EXACT_RANK_LIMIT`]; otherwise modulo a prime, which can only
/// underestimate it, so agreement still certifies the lower bound.
pub fn verify_certificate(cert: &ShrunkCertificate) -> Result<CertificateCheck> {
    let bs = cert.space.block_space()?;
    let n = bs.size();
    let (dim_u, dim_bu, image) = bs.shrinkage(&cert.u_parts)?;
    let image_matches = image == cert.bu_parts;
    let shrunk_ok = dim_u >= dim_bu && dim_u - dim_bu == cert.c;
    let d = cert.blowup_degree;
    let (recomputed_rank, rank_method) = if n == 0 {
        (0, "exact".to_string())
    } else if d == 0 {
        return Err(Error::Input("blow-up degree must be at least 1".into()));
    } else {
        let scaled = bs.scaled(d);
        if n * d <= EXACT_RANK_LIMIT {
            let p: Mat = scaled.point(cert.point_seed, cert.coeff_range);
            (p.rank(), "exact".to_string())
        } else {
            let r61 = PreimageSolver::new(&scaled.point::<F61>(cert.point_seed, cert.coeff_range)).rank();
            if r61 == cert.blowup_rank {
                (r61, "mod 2^61-1".to_string())
            } else {
                let r62 = PreimageSolver::new(&scaled.point::<F62>(cert.point_seed, cert.coeff_range)).rank();
                (r62.max(r61), "mod 2^62-57".to_string())
            }
        }
    };
    let rank_ok = recomputed_rank == cert.blowup_rank
        && cert.c <= n
        && (n == 0 || recomputed_rank.div_ceil(d.max(1)) == n - cert.c);
    Ok(CertificateCheck {
        dim_u,
        dim_bu,
        image_matches,
        shrunk_ok,
        recomputed_rank,
        rank_method,
        rank_ok,
        valid: image_matches && shrunk_ok && rank_ok,
    })
}

/// Certified `c = disc(B)` with a `c`-shrunk subspace from the Wong limit.
///
/// Two independent runs are intersected; the intersection is kept when it
/// is still `c`-shrunk, which it is whenever both runs found the minimal one.
pub fn min_shrunk(b: &MatrixSpace, seed: u64) -> Result<ShrunkCertificate> {
    min_shrunk_with_budget(b, seed, DEFAULT_BUDGET)
}

pub fn min_shrunk_with_budget(b: &MatrixSpace, seed: u64, budget: usize) -> Result<ShrunkCertificate> {
    let bs = b.as_blocks();
    let keep = |p: Vec<Subspace>| Some(p);
    let first = certified_search(&bs, seed, budget, &keep)?;
    let second = certified_search(&bs, seed ^ 0x5DEE_CE66_D1CE_4E5B, budget, &keep)?;
    if first.c != second.c {
        return Err(Error::Invariant(format!("independent runs certified {} and {}", first.c, second.c)));
    }
    let mut found = first;
    let meet = found.parts[0].intersect(&second.parts[0])?;
    if meet != found.parts[0] {
        let (du, dbu, img) = bs.shrinkage(std::slice::from_ref(&meet))?;
        if du >= dbu && du - dbu == found.c {
            found.parts = vec![meet];
            found.image = img;
        }
    }
    Ok(ShrunkCertificate::from_found(SpaceSpec::Explicit(b.clone()), found))
}

/// Non-commutative rank with the blow-up point that witnesses it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct NcRank {
    pub value: usize,
    pub degree: usize,
    pub point_seed: u64,
    pub coeff_range: i64,
    pub rank: usize,
}

pub fn ncrank(b: &MatrixSpace, seed: u64) -> Result<NcRank> {
    let cert = min_shrunk(b, seed)?;
    let check = verify_certificate(&cert)?;
    if !check.valid {
        return Err(Error::Invariant("fresh certificate failed verification".into()));
    }
    Ok(NcRank {
        value: b.n - cert.c,
        degree: cert.blowup_degree,
        point_seed: cert.point_seed,
        coeff_range: cert.coeff_range,
        rank: cert.blowup_rank,
    })
}

/// Certified value of `disc` for a quiver space, as used by [`crate::disc`].
pub(crate) fn quiver_certificate(instance: Instance, found: Found) -> ShrunkCertificate {
    ShrunkCertificate::from_found(SpaceSpec::Quiver { instance }, found)
}

/// Weight with its gcd divided out, and that gcd (1 for the zero weight).
pub(crate) fn primitive_weight(theta: &Weight) -> (Weight, i64) {
    let g = theta.content().abs();
    if g <= 1 {
        return (theta.clone(), 1);
    }
    (Weight(theta.0.iter().map(|t| t / g).collect()), g)
}
