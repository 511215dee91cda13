//! Strongly contradicting semistability subrepresentations and
//! Harder-Narasimhan filtrations.
//!
//! Both loops are driven only by the integer `G = disc(−, θ_d)` of the
//! object at hand: the inner loop replaces `N` by `F(N)` while `G(N) > 0`,
//! and the outer loop peels the scss off the current quotient while the
//! quotient is unstable.

use serde::Serialize;
use serde_json::{json, Value};

use crate::disc::{disc_witness_with_budget, slope_disc};
use crate::error::{Error, Result};
use crate::exactla::Rational;
use crate::quiver::{
    is_subrep, kappa_check, restrict_rep, slope, subquotient, subrep_json, Representation, SubRep, Weight,
};
use crate::shrunk::DEFAULT_BUDGET;

/// `0 = M_0 ⊊ M_1 ⊊ ⋯ ⊊ M_r = M` with data of the quotients `M_i/M_{i−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub parent: Representation,
    pub steps: Vec<SubRep>,
    pub quotient_dims: Vec<Vec<usize>>,
    pub quotient_theta: Vec<i64>,
    pub quotient_kappa: Vec<i64>,
    pub slopes: Vec<Rational>,
}

impl Filtration {
    /// Filtration with the given terms; quotient data is computed from `Θ, κ`.
    pub fn from_steps(parent: &Representation, steps: Vec<SubRep>, theta: &Weight, kappa: &Weight) -> Result<Self> {
        if !kappa_check(kappa) {
            return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
        }
        let mut prev = vec![0usize; parent.dims().len()];
        let mut quotient_dims = Vec::new();
        let mut quotient_theta = Vec::new();
        let mut quotient_kappa = Vec::new();
        let mut slopes = Vec::new();
        for s in &steps {
            let d: Vec<usize> = s.dims().iter().zip(&prev).map(|(a, b)| a.saturating_sub(*b)).collect();
            quotient_theta.push(theta.eval(&d));
            quotient_kappa.push(kappa.eval(&d));
            slopes.push(if d.iter().all(|&x| x == 0) { Rational::integer(0) } else { slope(theta, kappa, &d)? });
            quotient_dims.push(d);
            prev = s.dims();
        }
        Ok(Filtration { parent: parent.clone(), steps, quotient_dims, quotient_theta, quotient_kappa, slopes })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step_dims(&self) -> Vec<Vec<usize>> {
        self.steps.iter().map(|s| s.dims()).collect()
    }

    pub fn to_json_value(&self) -> Value {
        let q = self.parent.quiver();
        let steps: Vec<Value> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "dims": s.dims(),
                    "basis": subrep_json(q, s),
                    "quotient_dims": self.quotient_dims[i],
                    "quotient_theta": self.quotient_theta[i],
                    "quotient_kappa": self.quotient_kappa[i],
                    "slope": self.slopes[i].to_string(),
                })
            })
            .collect();
        json!({
            "vertices": q.vertices(),
            "steps": steps,
            "slopes": self.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn g_of(m: &Representation, theta: &Weight, kappa: &Weight, seed: u64, budget: usize) -> Result<(i64, SubRep)> {
    if m.is_zero() {
        return Ok((0, m.zero_subrep()));
    }
    let d = slope_disc(m, theta, kappa, seed, budget)?;
    Ok((d.value, d.witness))
}

/// The scss of `M`: the largest subrepresentation of maximal slope.
pub fn scss(m: &Representation, theta: &Weight, kappa: &Weight, seed: u64) -> Result<SubRep> {
    scss_with_budget(m, theta, kappa, seed, DEFAULT_BUDGET)
}

pub fn scss_with_budget(m: &Representation, theta: &Weight, kappa: &Weight, seed: u64, budget: usize) -> Result<SubRep> {
    if m.is_zero() {
        return Err(Error::ZeroRepresentation("scss of the zero representation".into()));
    }
    if !kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    let mut current = m.full_subrep();
    let mut steps = 0usize;
    loop {
        let restricted = restrict_rep(m, &current)?;
        let (g, witness) = g_of(&restricted.rep, theta, kappa, seed, budget)?;
        if g == 0 {
            break;
        }
        let next = restricted.push(&witness)?;
        if next.total_dim() >= current.total_dim() || next.is_zero() {
            return Err(Error::Invariant("F(N) is not a proper nonzero subrepresentation".into()));
        }
        current = next;
        steps += 1;
        if steps > m.total_dim() {
            return Err(Error::Invariant("inner loop did not terminate".into()));
        }
    }
    if slope(theta, kappa, &current.dims())? < slope(theta, kappa, m.dims())? {
        return Err(Error::Invariant("scss has smaller slope than M".into()));
    }
    Ok(current)
}

/// The Harder-Narasimhan filtration of a nonzero representation.
pub fn hn_filtration(m: &Representation, theta: &Weight, kappa: &Weight, seed: u64) -> Result<Filtration> {
    hn_filtration_with_budget(m, theta, kappa, seed, DEFAULT_BUDGET)
}

pub fn hn_filtration_with_budget(
    m: &Representation,
    theta: &Weight,
    kappa: &Weight,
    seed: u64,
    budget: usize,
) -> Result<Filtration> {
    if m.is_zero() {
        return Err(Error::ZeroRepresentation("HN filtration of the zero representation".into()));
    }
    if !kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    let full = m.full_subrep();
    let mut steps: Vec<SubRep> = Vec::new();
    let mut lower = m.zero_subrep();
    loop {
        let sq = subquotient(m, &lower, &full)?;
        let (g, _) = g_of(&sq.rep, theta, kappa, seed, budget)?;
        if g == 0 {
            steps.push(full);
            break;
        }
        let s = scss_with_budget(&sq.rep, theta, kappa, seed, budget)?;
        let next = sq.lift(&s)?;
        if next.total_dim() <= lower.total_dim() {
            return Err(Error::Invariant("outer loop made no progress".into()));
        }
        steps.push(next.clone());
        lower = next;
    }
    Filtration::from_steps(m, steps, theta, kappa)
}

/// Outcome of [`verify_hn`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HnReport {
    pub slopes_decreasing: bool,
    pub quotients_semistable: bool,
    pub inclusions_proper: bool,
    pub violations: Vec<String>,
}

impl HnReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks strict slope decrease, semistability of every quotient and that
/// the terms form a proper chain of subrepresentations ending at `M`.
pub fn verify_hn(f: &Filtration, theta: &Weight, kappa: &Weight, seed: u64) -> Result<HnReport> {
    let m = &f.parent;
    let mut violations = Vec::new();
    let mut slopes_decreasing = true;
    for (i, w) in f.slopes.windows(2).enumerate() {
        if w[0] <= w[1] {
            slopes_decreasing = false;
            violations.push(format!("slope {} of quotient {} is not above slope {} of quotient {}", w[0], i + 1, w[1], i + 2));
        }
    }
    let mut inclusions_proper = f.steps.last().is_some_and(|s| s.is_full());
    if !inclusions_proper {
        violations.push("last term is not the whole representation".into());
    }
    let mut lower = m.zero_subrep();
    let mut quotients_semistable = true;
    for (i, s) in f.steps.iter().enumerate() {
        if !is_subrep(m, s) {
            inclusions_proper = false;
            violations.push(format!("term {} is not a subrepresentation", i + 1));
            break;
        }
        if !s.contains(&lower)? || s.total_dim() == lower.total_dim() {
            inclusions_proper = false;
            violations.push(format!("term {} does not properly contain the previous term", i + 1));
            break;
        }
        let sq = subquotient(m, &lower, s)?;
        let (g, _) = g_of(&sq.rep, theta, kappa, seed, DEFAULT_BUDGET)?;
        if g != 0 {
            quotients_semistable = false;
            violations.push(format!("quotient {} is unstable (G = {g})", i + 1));
        }
        lower = s.clone();
    }
    Ok(HnReport { slopes_decreasing, quotients_semistable, inclusions_proper, violations })
}

/// The term `M_l` with `μ(M_l/M_{l−1}) > 0 ≥ μ(M_{l+1}/M_l)` of the HN
/// filtration of an unstable `M` with `Θ(M) = 0`, which attains
/// `disc(M, Θ)`. Returns `(l, M_l, disc(M, Θ))` with `l` counted from 1.
pub fn theorem_a_term(f: &Filtration, theta: &Weight, seed: u64) -> Result<(usize, SubRep, i64)> {
    let m = &f.parent;
    if theta.eval(m.dims()) != 0 {
        return Err(Error::Weight("the parent must satisfy Θ(M) = 0".into()));
    }
    if f.len() < 2 {
        return Err(Error::Input("the parent is semistable".into()));
    }
    let zero = Rational::integer(0);
    let l = (0..f.len() - 1)
        .find(|&i| f.slopes[i] > zero && f.slopes[i + 1] <= zero)
        .ok_or_else(|| Error::Invariant("no term separates positive from nonpositive slopes".into()))?;
    let term = f.steps[l].clone();
    let d = disc_witness_with_budget(m, theta, seed, DEFAULT_BUDGET)?;
    let value = theta.eval(&term.dims());
    if value != d.value {
        return Err(Error::Invariant(format!("Θ(M_l) = {value} but disc(M, Θ) = {}", d.value)));
    }
    Ok((l + 1, term, d.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Subspace;
    use crate::quiver::{quotient_rep, Instance};

    fn four_sources() -> Instance {
        Instance::from_json(include_str!("../examples/four_sources.json")).unwrap()
    }

    fn sp(s: &Instance, y: &[usize]) -> SubRep {
        let hits = [1usize, 0, 0, 2];
        let mut spaces: Vec<Subspace> =
            hits.iter().map(|t| if y.contains(t) { Subspace::full(1) } else { Subspace::zero(1) }).collect();
        spaces.push(Subspace::coordinate(4, y));
        SubRep::new(&s.rep, spaces).unwrap()
    }

    #[test]
    fn four_sources_scss() {
        let s = four_sources();
        assert_eq!(scss(&s.rep, &s.theta, &s.kappa, 0).unwrap(), sp(&s, &[0]));
        let q = quotient_rep(&s.rep, &sp(&s, &[0])).unwrap();
        let qs = scss(&q.rep, &s.theta, &s.kappa, 0).unwrap();
        let back = crate::quiver::pullback(&sp(&s, &[0]), &q, &qs).unwrap();
        assert_eq!(back, sp(&s, &[0, 1, 2]));
    }

    #[test]
    fn four_sources_filtration() {
        let s = four_sources();
        let f = hn_filtration(&s.rep, &s.theta, &s.kappa, 0).unwrap();
        assert_eq!(f.step_dims(), vec![vec![0, 1, 1, 0, 1], vec![1, 1, 1, 1, 3], vec![1, 1, 1, 1, 4]]);
        assert_eq!(f.steps[0], sp(&s, &[0]));
        assert_eq!(f.steps[1], sp(&s, &[0, 1, 2]));
        assert_eq!(f.slopes, vec![Rational::new(4, 3), Rational::integer(0), Rational::integer(-4)]);
        let r = verify_hn(&f, &s.theta, &s.kappa, 0).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        let (l, term, v) = theorem_a_term(&f, &s.theta, 0).unwrap();
        assert_eq!((l, v), (1, 4));
        assert_eq!(term, sp(&s, &[0]));
    }

    #[test]
    fn semistable_and_one_vertex() {
        let s = four_sources();
        let q = quotient_rep(&s.rep, &sp(&s, &[0, 1, 2])).unwrap();
        let f = hn_filtration(&q.rep, &s.theta, &s.kappa, 0).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(scss(&q.rep, &s.theta, &s.kappa, 0).unwrap(), q.rep.full_subrep());
        let tiny = Instance::from_json(r#"{"quiver":{"vertices":["v"],"arrows":[]},"dims":{"v":3},"theta":{"v":2}}"#).unwrap();
        assert_eq!(hn_filtration(&tiny.rep, &tiny.theta, &tiny.kappa, 0).unwrap().len(), 1);
    }

    #[test]
    fn bad_filtrations_are_reported() {
        let s = four_sources();
        let e12 = sp(&s, &[0, 1]);
        let f = Filtration::from_steps(&s.rep, vec![e12, s.rep.full_subrep()], &s.theta, &s.kappa).unwrap();
        let r = verify_hn(&f, &s.theta, &s.kappa, 0).unwrap();
        assert!(!r.quotients_semistable);
        let e1 = sp(&s, &[0]);
        let e13 = sp(&s, &[0, 2]);
        let same = Filtration::from_steps(&s.rep, vec![e1, e13, s.rep.full_subrep()], &s.theta, &s.kappa).unwrap();
        assert_eq!(same.slopes[1], Rational::integer(0));
        let eq = Filtration {
            slopes: vec![Rational::integer(1), Rational::integer(1), Rational::integer(-4)],
            ..same
        };
        assert!(!verify_hn(&eq, &s.theta, &s.kappa, 0).unwrap().slopes_decreasing);
    }
}
