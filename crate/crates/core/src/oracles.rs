//! Independent exhaustive and combinatorial oracles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Mat, Rational, Subspace};
use crate::quiver::{Representation, Weight};
use crate::shrunk::MatrixSpace;

/// The matrix space spanned by the elementary matrices `E_{row,col}` on a
/// support.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PatternSpace {
    pub n: usize,
    pub support: BTreeSet<(usize, usize)>,
}

impl PatternSpace {
    pub fn new(n: usize, support: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let support: BTreeSet<(usize, usize)> = support.into_iter().collect();
        if let Some(&(r, c)) = support.iter().find(|&&(r, c)| r >= n || c >= n) {
            return Err(Error::DimensionMismatch(format!("position ({r}, {c}) outside {n}x{n}")));
        }
        Ok(PatternSpace { n, support })
    }

    pub fn to_matrix_space(&self) -> MatrixSpace {
        let gens = self
            .support
            .iter()
            .map(|&(r, c)| {
                let mut m = Mat::zeros(self.n, self.n);
                m.set(r, c, Rational::integer(1));
                m
            })
            .collect();
        MatrixSpace::new(self.n, gens).expect("elementary matrices of the right size")
    }

    /// `span{e_col : col ∈ cols}`.
    pub fn coordinate_subspace(&self, cols: &[usize]) -> Subspace {
        Subspace::coordinate(self.n, cols)
    }
}

fn augment(col: usize, adj: &[Vec<usize>], row_match: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &r in &adj[col] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if row_match[r].is_none_or(|c| augment(c, adj, row_match, seen)) {
            row_match[r] = Some(col);
            return true;
        }
    }
    false
}

/// `max_S |S| − |N(S)|` over column sets, with a maximizing `S`.
///
/// A maximum matching is grown by augmenting paths; the columns reachable
/// from unmatched columns along alternating paths then form a maximizer,
/// and the maximum equals `n` minus the matching size.
pub fn koenig_disc(p: &PatternSpace) -> (usize, Vec<usize>) {
    let n = p.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(r, c) in &p.support {
        adj[c].push(r);
    }
    let mut row_match: Vec<Option<usize>> = vec![None; n];
    let mut matched_col = vec![false; n];
    for c in 0..n {
        let mut seen = vec![false; n];
        if augment(c, &adj, &mut row_match, &mut seen) {
            matched_col[c] = true;
        }
    }
    let size = row_match.iter().filter(|m| m.is_some()).count();
    let mut in_s = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&c| !matched_col[c]).collect();
    for &c in &stack {
        in_s[c] = true;
    }
    let mut row_seen = vec![false; n];
    while let Some(c) = stack.pop() {
        for &r in &adj[c] {
            if row_seen[r] {
                continue;
            }
            row_seen[r] = true;
            if let Some(c2) = row_match[r] {
                if !in_s[c2] {
                    in_s[c2] = true;
                    stack.push(c2);
                }
            }
        }
    }
    (n - size, (0..n).filter(|&c| in_s[c]).collect())
}

/// Rows touched by a set of columns.
pub fn neighbourhood(p: &PatternSpace, cols: &[usize]) -> BTreeSet<usize> {
    p.support.iter().filter(|(_, c)| cols.contains(c)).map(|&(r, _)| r).collect()
}

/// Source vertices (tails of arrows) of an oracle-supported instance.
fn oracle_sources(w: &Representation) -> Result<Vec<usize>> {
    let q = w.quiver();
    let n = q.num_vertices();
    let mut is_tail = vec![false; n];
    let mut is_head = vec![false; n];
    for a in q.arrows() {
        is_tail[a.tail] = true;
        is_head[a.head] = true;
    }
    for v in 0..n {
        if is_tail[v] && is_head[v] {
            return Err(Error::UnsupportedInstance(format!(
                "vertex {:?} has incoming and outgoing arrows",
                q.vertices()[v]
            )));
        }
        if is_tail[v] && w.dims()[v] > 1 {
            return Err(Error::UnsupportedInstance(format!(
                "source {:?} has dimension {} > 1",
                q.vertices()[v],
                w.dims()[v]
            )));
        }
    }
    let sources: Vec<usize> = (0..n).filter(|&v| is_tail[v] && w.dims()[v] == 1).collect();
    if sources.len() > 16 {
        return Err(Error::UnsupportedInstance("too many sources to enumerate".into()));
    }
    Ok(sources)
}

/// For each subset of sources (as a bitmask), the image dimension at every
/// vertex; sources report their own membership.
fn image_dims(w: &Representation, sources: &[usize]) -> Vec<(Vec<bool>, Vec<usize>)> {
    let q = w.quiver();
    let n = q.num_vertices();
    (0u32..(1 << sources.len()))
        .map(|mask| {
            let mut chosen = vec![false; n];
            for (k, &s) in sources.iter().enumerate() {
                chosen[s] = mask >> k & 1 == 1;
            }
            let mut img: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); n];
            for (a, m) in q.arrows().iter().zip(w.maps()) {
                if chosen[a.tail] {
                    img[a.head].push(m.col(0));
                }
            }
            let dims = (0..n)
                .map(|v| if img[v].is_empty() { 0 } else { Subspace::span(w.dims()[v], &img[v]).expect("shapes").dim() })
                .collect();
            (chosen, dims)
        })
        .collect()
}

/// Exhaustive `max_S θ(S)` over all subrepresentations, for a one-layer
/// bipartite quiver whose sources have dimension at most one.
///
/// A subrepresentation is a subset of sources together with spaces at the
/// other vertices containing the images; at each such vertex the best
/// choice is the whole space when `θ > 0` and the image otherwise.
pub fn bipartite_disc_oracle(w: &Representation, theta: &Weight) -> Result<i64> {
    let sources = oracle_sources(w)?;
    let n = w.quiver().num_vertices();
    let mut best = i64::MIN;
    for (chosen, img) in image_dims(w, &sources) {
        let mut val = 0;
        for v in 0..n {
            if sources.contains(&v) {
                if chosen[v] {
                    val += theta.0[v];
                }
            } else {
                let k = if theta.0[v] > 0 { w.dims()[v] } else { img[v] };
                val += theta.0[v] * k as i64;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Maximal slope over nonzero subrepresentations, with the dimension vector
/// of the largest maximizer, by enumerating every dimension vector that a
/// subrepresentation of an oracle-supported instance can have.
pub fn slope_brute(w: &Representation, theta: &Weight, kappa: &Weight) -> Result<(Rational, Vec<usize>)> {
    if !crate::quiver::kappa_check(kappa) {
        return Err(Error::Weight("kappa must be positive at every vertex".into()));
    }
    let sources = oracle_sources(w)?;
    let n = w.quiver().num_vertices();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for (chosen, img) in image_dims(w, &sources) {
        let ranges: Vec<(usize, usize)> = (0..n)
            .map(|v| {
                if sources.contains(&v) {
                    let k = usize::from(chosen[v]);
                    (k, k)
                } else {
                    (img[v], w.dims()[v])
                }
            })
            .collect();
        let mut dims: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            if dims.iter().any(|&d| d > 0) {
                let mu = Rational::new(theta.eval(&dims), kappa.eval(&dims));
                let total: usize = dims.iter().sum();
                let better = match &best {
                    None => true,
                    Some((b, bd)) => mu > *b || (mu == *b && total > bd.iter().sum()),
                };
                if better {
                    best = Some((mu, dims.clone()));
                }
            }
            let Some(v) = (0..n).find(|&v| dims[v] < ranges[v].1) else { break };
            dims[v] += 1;
            for (u, d) in dims.iter_mut().enumerate().take(v) {
                *d = ranges[u].0;
            }
        }
    }
    best.ok_or_else(|| Error::ZeroRepresentation("no nonzero subrepresentation".into()))
}
