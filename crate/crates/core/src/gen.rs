//! Reproducible random instances.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactla::{Mat, Rational};
use crate::quiver::{path_count, Instance, Quiver, Representation, Weight};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceClass {
    /// Any acyclic quiver, arbitrary weights.
    General,
    /// Any acyclic quiver with `Θ(M) = 0`.
    GeneralZeroTheta,
    /// Arrows from dimension-one sources to targets only; inside the scope
    /// of the exhaustive oracles.
    Bipartite,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub max_vertices: usize,
    pub max_dim: usize,
    /// Probability of an arrow between two vertices in order.
    pub arrow_density: f64,
    /// Bound on `|Θ(v)|`.
    pub weight_bound: i64,
    /// Bound on `κ(v)`.
    pub kappa_bound: i64,
    /// Bound on the number of paths, trivial ones included.
    pub max_paths: usize,
    pub class: InstanceClass,
}

impl GenSpec {
    pub fn new(seed: u64, class: InstanceClass) -> Self {
        GenSpec {
            seed,
            max_vertices: 5,
            max_dim: 4,
            arrow_density: 0.45,
            weight_bound: 5,
            kappa_bound: 3,
            max_paths: 24,
            class,
        }
    }
}

fn stream_rng(spec: &GenSpec, index: u64) -> ChaCha8Rng {
    let tag = match spec.class {
        InstanceClass::General => 1u64,
        InstanceClass::GeneralZeroTheta => 2,
        InstanceClass::Bipartite => 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream((tag << 48) ^ index);
    rng
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, Rational::integer(rng.gen_range(-3..=3)));
        }
    }
    m
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, spec: &GenSpec, n: usize) -> (Weight, Weight) {
    let theta = Weight((0..n).map(|_| rng.gen_range(-spec.weight_bound..=spec.weight_bound)).collect());
    let kappa = Weight((0..n).map(|_| rng.gen_range(1..=spec.kappa_bound.max(1))).collect());
    (theta, kappa)
}

/// Changes `Θ` at one vertex so that `Θ(d) = 0`, keeping `|Θ| ≤ bound`.
/// Returns `false` when no single vertex admits such a change.
fn balance(rng: &mut ChaCha8Rng, theta: &mut Weight, dims: &[usize], bound: i64) -> bool {
    let mut candidates: Vec<usize> = (0..dims.len()).filter(|&v| dims[v] > 0).collect();
    candidates.shuffle(rng);
    for v in candidates {
        let rest: i64 = theta.eval(dims) - theta.0[v] * dims[v] as i64;
        let d = dims[v] as i64;
        if rest % d == 0 && (rest / d).abs() <= bound {
            theta.0[v] = -rest / d;
            return true;
        }
    }
    false
}

fn general(rng: &mut ChaCha8Rng, spec: &GenSpec) -> (Arc<Quiver>, Vec<usize>) {
    let n = rng.gen_range(1..=spec.max_vertices.max(1));
    let ids = names("v", n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    loop {
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(spec.arrow_density) {
                    let copies = if rng.gen_bool(0.2) { 2 } else { 1 };
                    for _ in 0..copies {
                        let id = format!("a{}", arrows.len() + 1);
                        arrows.push((id, ids[order[a]].clone(), ids[order[b]].clone()));
                    }
                }
            }
        }
        let q = Quiver::new(&ids, &arrows).expect("forward arrows are acyclic");
        if path_count(&q) <= spec.max_paths {
            let dims = (0..n).map(|_| rng.gen_range(0..=spec.max_dim)).collect();
            return (Arc::new(q), dims);
        }
    }
}

fn bipartite(rng: &mut ChaCha8Rng, spec: &GenSpec) -> (Arc<Quiver>, Vec<usize>) {
    let ns = rng.gen_range(1..=3usize);
    let nt = rng.gen_range(1..=2usize);
    let mut ids = names("x", ns);
    ids.extend(names("y", nt));
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    for i in 0..ns {
        for j in 0..nt {
            let k = if rng.gen_bool(spec.arrow_density.max(0.5)) { 1 } else { 0 } + usize::from(rng.gen_bool(0.15));
            for _ in 0..k {
                let id = format!("a{}", arrows.len() + 1);
                arrows.push((id, ids[i].clone(), ids[ns + j].clone()));
            }
        }
    }
    let q = Quiver::new(&ids, &arrows).expect("bipartite arrows are acyclic");
    let mut dims: Vec<usize> = (0..ns).map(|_| 1).collect();
    dims.extend((0..nt).map(|_| rng.gen_range(1..=spec.max_dim.max(1))));
    (Arc::new(q), dims)
}

/// The `index`-th instance of the stream determined by `spec`.
pub fn gen_instance(spec: &GenSpec, index: u64) -> Instance {
    let mut rng = stream_rng(spec, index);
    loop {
        let (q, mut dims) = match spec.class {
            InstanceClass::Bipartite => bipartite(&mut rng, spec),
            _ => general(&mut rng, spec),
        };
        if dims.iter().all(|&d| d == 0) {
            let v = rng.gen_range(0..dims.len());
            dims[v] = 1;
        }
        let maps = q.arrows().iter().map(|a| random_matrix(&mut rng, dims[a.head], dims[a.tail])).collect();
        let n = q.num_vertices();
        let rep = Representation::new(q, dims, maps).expect("shapes follow dims");
        let (mut theta, kappa) = random_weights(&mut rng, spec, n);
        if spec.class == InstanceClass::GeneralZeroTheta && !balance(&mut rng, &mut theta, rep.dims(), spec.weight_bound) {
            continue;
        }
        return Instance::new(rep, theta, kappa).expect("weights match vertices");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::validate_quiver;

    #[test]
    fn streams_are_deterministic() {
        let s = GenSpec::new(1, InstanceClass::General);
        assert_eq!(gen_instance(&s, 3), gen_instance(&s, 3));
        assert_ne!(gen_instance(&s, 3), gen_instance(&GenSpec::new(2, InstanceClass::General), 3));
    }

    #[test]
    fn class_guarantees() {
        for class in [InstanceClass::General, InstanceClass::GeneralZeroTheta, InstanceClass::Bipartite] {
            let s = GenSpec::new(7, class);
            for i in 0..50 {
                let inst = gen_instance(&s, i);
                let q = inst.rep.quiver();
                assert!(validate_quiver(q).is_ok());
                assert!(q.num_vertices() <= 5);
                assert!(inst.rep.dims().iter().all(|&d| d <= 4));
                assert!(inst.theta.0.iter().all(|t| t.abs() <= 5));
                assert!(inst.kappa.0.iter().all(|&k| (1..=3).contains(&k)));
                if class == InstanceClass::GeneralZeroTheta {
                    assert_eq!(inst.theta.eval(inst.rep.dims()), 0);
                }
                if class == InstanceClass::Bipartite {
                    assert!(crate::oracles::bipartite_disc_oracle(&inst.rep, &inst.theta).is_ok());
                }
            }
        }
    }
}
