//! Discrepancy `disc(M, θ) = max_{N ⊆ M} θ(N)` with a witnessing
//! subrepresentation, through the block matrix space `A_{W,θ}`.
//!
//! Vertices with `θ > 0` (and nonzero dimension) are the sources `x_i`,
//! each repeated `θ(x_i)` times; vertices with `θ < 0` are the targets
//! `y_j`, repeated `−θ(y_j)` times. The block between a copy of `y_j` and a
//! copy of `x_i` ranges over the span of `W(p)` for paths `p : x_i → y_j`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{Mat, Subspace};
use crate::quiver::{
    closure, enumerate_paths, is_subrep, path_map, subrep_json, theta_d, Instance, Path, Representation, SubRep,
    Weight,
};
use crate::shrunk::{
    certified_search, primitive_weight, quiver_certificate, BlockSlot, BlockSpace, MatrixSpace, ShrunkCertificate,
    DEFAULT_BUDGET,
};

/// One raw generator `A^{i,j,p}_{q,r}`: path `p` from source `i` to target
/// `j`, placed in the block of target copy `q` and source copy `r`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GeneratorTag {
    pub i: usize,
    pub j: usize,
    pub path: String,
    pub q: usize,
    pub r: usize,
}

/// Layout of `A_{W,θ}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BlockIndex {
    /// `(vertex, θ₊)` for the sources, in vertex order.
    pub positive: Vec<(String, i64)>,
    /// `(vertex, θ₋)` for the targets, in vertex order.
    pub negative: Vec<(String, i64)>,
    /// Copy indices `[start, end)` of each source among all source copies.
    pub plus_intervals: Vec<(usize, usize)>,
    /// Copy indices of each target among all target copies.
    pub minus_intervals: Vec<(usize, usize)>,
    /// Column offset of each source copy.
    pub col_offsets: Vec<usize>,
    /// Row offset of each target copy.
    pub row_offsets: Vec<usize>,
    pub n: usize,
    pub generators: Vec<GeneratorTag>,
    #[serde(skip)]
    pub(crate) source_vertices: Vec<usize>,
    #[serde(skip)]
    pub(crate) target_vertices: Vec<usize>,
}

fn intervals_and_offsets(slots: &[(usize, usize)]) -> (Vec<(usize, usize)>, Vec<usize>, usize) {
    let mut intervals = Vec::new();
    let mut offsets = Vec::new();
    let (mut copy, mut off) = (0, 0);
    for &(dim, copies) in slots {
        intervals.push((copy, copy + copies));
        for _ in 0..copies {
            offsets.push(off);
            off += dim;
        }
        copy += copies;
    }
    (intervals, offsets, off)
}

struct Layout {
    index: BlockIndex,
    paths: Vec<Vec<Vec<(Path, Mat)>>>,
}

fn layout(w: &Representation, theta: &Weight) -> Result<Layout> {
    let q = w.quiver();
    if theta.len() != q.num_vertices() {
        return Err(Error::DimensionMismatch("weight needs one entry per vertex".into()));
    }
    let total = theta.eval(w.dims());
    if total != 0 {
        return Err(Error::Weight(format!("θ(W) = {total}, but the construction needs θ(W) = 0")));
    }
    let dims = w.dims();
    let sources: Vec<usize> = (0..q.num_vertices()).filter(|&v| theta.0[v] > 0 && dims[v] > 0).collect();
    let targets: Vec<usize> = (0..q.num_vertices()).filter(|&v| theta.0[v] < 0 && dims[v] > 0).collect();
    let all_paths = enumerate_paths(q);
    let paths: Vec<Vec<Vec<(Path, Mat)>>> = targets
        .iter()
        .map(|&y| {
            sources
                .iter()
                .map(|&x| {
                    all_paths
                        .iter()
                        .filter(|p| p.source == x && p.target == y)
                        .map(|p| (p.clone(), path_map(w, p)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let src_slots: Vec<(usize, usize)> = sources.iter().map(|&v| (dims[v], theta.0[v] as usize)).collect();
    let tgt_slots: Vec<(usize, usize)> = targets.iter().map(|&v| (dims[v], (-theta.0[v]) as usize)).collect();
    let (plus_intervals, col_offsets, n) = intervals_and_offsets(&src_slots);
    let (minus_intervals, row_offsets, n2) = intervals_and_offsets(&tgt_slots);
    if n != n2 {
        return Err(Error::Invariant("positive and negative sides differ in size".into()));
    }
    let mut generators = Vec::new();
    for (j, row) in paths.iter().enumerate() {
        for (i, ps) in row.iter().enumerate() {
            for (p, _) in ps {
                for qq in minus_intervals[j].0..minus_intervals[j].1 {
                    for r in plus_intervals[i].0..plus_intervals[i].1 {
                        generators.push(GeneratorTag { i, j, path: p.name(q), q: qq, r });
                    }
                }
            }
        }
    }
    let index = BlockIndex {
        positive: sources.iter().map(|&v| (q.vertices()[v].clone(), theta.0[v])).collect(),
        negative: targets.iter().map(|&v| (q.vertices()[v].clone(), -theta.0[v])).collect(),
        plus_intervals,
        minus_intervals,
        col_offsets,
        row_offsets,
        n,
        generators,
        source_vertices: sources,
        target_vertices: targets,
    };
    Ok(Layout { index, paths })
}

/// Independent members of a list of equally shaped matrices.
fn span_basis(ms: Vec<Mat>) -> Vec<Mat> {
    let mut seen: Option<Subspace> = None;
    let mut kept = Vec::new();
    for m in ms {
        let flat = m.entries().to_vec();
        let s = seen.get_or_insert_with(|| Subspace::zero(flat.len()));
        if !s.contains_vector(&flat) {
            *s = s.sum(&Subspace::span(flat.len(), &[flat]).expect("flat shape")).expect("flat shape");
            kept.push(m);
        }
    }
    kept
}

/// `A_{W,θ}` in block form, with each block's path maps reduced to a basis
/// of their span.
pub(crate) fn block_space(w: &Representation, theta: &Weight) -> Result<(BlockSpace, BlockIndex)> {
    let Layout { index, paths } = layout(w, theta)?;
    let dims = w.dims();
    let sources = index
        .source_vertices
        .iter()
        .map(|&v| BlockSlot { dim: dims[v], copies: theta.0[v] as usize })
        .collect();
    let targets = index
        .target_vertices
        .iter()
        .map(|&v| BlockSlot { dim: dims[v], copies: (-theta.0[v]) as usize })
        .collect();
    let maps = paths
        .into_iter()
        .map(|row| row.into_iter().map(|ps| span_basis(ps.into_iter().map(|(_, m)| m).collect())).collect())
        .collect();
    Ok((BlockSpace::new(sources, targets, maps)?, index))
}

/// The explicit matrix space `A_{W,θ}` spanned by every `A^{i,j,p}_{q,r}`.
pub fn build_matrix_space(w: &Representation, theta: &Weight) -> Result<(MatrixSpace, BlockIndex)> {
    let Layout { index, paths } = layout(w, theta)?;
    let n = index.n;
    let mut gens = Vec::with_capacity(index.generators.len());
    for (j, row) in paths.iter().enumerate() {
        for (i, ps) in row.iter().enumerate() {
            for (_, m) in ps {
                for q in index.minus_intervals[j].0..index.minus_intervals[j].1 {
                    for r in index.plus_intervals[i].0..index.plus_intervals[i].1 {
                        let mut g = Mat::zeros(n, n);
                        g.set_block(index.row_offsets[q], index.col_offsets[r], m);
                        gens.push(g);
                    }
                }
            }
        }
    }
    Ok((MatrixSpace::new(n, gens)?, index))
}

/// `disc(W, θ)` with a subrepresentation attaining it and the certificate.
#[derive(Clone, Debug)]
pub struct DiscWitness {
    pub value: i64,
    pub witness: SubRep,
    /// Certificate for `A_{W,θ/g}`, where `g = scale` is the gcd of `θ`.
    pub certificate: ShrunkCertificate,
    pub block_index: BlockIndex,
    pub scale: i64,
}

impl DiscWitness {
    pub fn to_json_value(&self, w: &Representation) -> Value {
        json!({
            "value": self.value,
            "witness": subrep_json(w.quiver(), &self.witness),
            "witness_dims": self.witness.dims(),
            "scale": self.scale,
            "certificate": self.certificate.to_json_value(),
        })
    }
}

/// Spaces at the sources placed into a full per-vertex list.
fn spread(w: &Representation, sources: &[usize], parts: &[Subspace]) -> Vec<Subspace> {
    let mut spaces: Vec<Subspace> = w.dims().iter().map(|&d| Subspace::zero(d)).collect();
    for (&v, p) in sources.iter().zip(parts) {
        spaces[v] = p.clone();
    }
    spaces
}

pub fn disc_witness(w: &Representation, theta: &Weight, seed: u64) -> Result<DiscWitness> {
    disc_witness_with_budget(w, theta, seed, DEFAULT_BUDGET)
}

pub fn disc_witness_with_budget(w: &Representation, theta: &Weight, seed: u64, budget: usize) -> Result<DiscWitness> {
    let (reduced, scale) = primitive_weight(theta);
    let (bs, index) = block_space(w, &reduced)?;
    let sources = index.source_vertices.clone();
    let refine = |parts: Vec<Subspace>| -> Option<Vec<Subspace>> {
        let wp = closure(w, &spread(w, &sources, &parts)).ok()?;
        let parts: Vec<Subspace> = sources.iter().map(|&v| wp.spaces[v].clone()).collect();
        let (du, dbu, _) = bs.shrinkage(&parts).ok()?;
        (du >= dbu && reduced.eval(&wp.dims()) == (du - dbu) as i64).then_some(parts)
    };
    let found = certified_search(&bs, seed, budget, &refine)?;
    let witness = closure(w, &spread(w, &sources, &found.parts))?;
    let value = theta.eval(&witness.dims());
    if !is_subrep(w, &witness) || value != scale * found.c as i64 {
        return Err(Error::Invariant("witness does not attain the certified value".into()));
    }
    let instance = Instance::new(w.clone(), reduced, Weight::ones(w.quiver().num_vertices()))?;
    Ok(DiscWitness { value, witness, certificate: quiver_certificate(instance, found), block_index: index, scale })
}

/// Discrepancy for the weight `θ_d` attached to `(Θ, κ)` at `dim M`.
pub fn slope_disc(m: &Representation, big_theta: &Weight, kappa: &Weight, seed: u64, budget: usize) -> Result<DiscWitness> {
    if !crate::quiver::kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    let td = theta_d(big_theta, kappa, m.dims());
    disc_witness_with_budget(m, &td, seed, budget)
}

/// `F(M)`: a subrepresentation attaining `disc(M, θ_d)`.
pub fn f_sub(m: &Representation, big_theta: &Weight, kappa: &Weight, seed: u64) -> Result<SubRep> {
    Ok(slope_disc(m, big_theta, kappa, seed, DEFAULT_BUDGET)?.witness)
}

/// `G(M) = disc(M, θ_d) = θ_d(F(M))`.
pub fn g_value(m: &Representation, big_theta: &Weight, kappa: &Weight, seed: u64) -> Result<i64> {
    Ok(slope_disc(m, big_theta, kappa, seed, DEFAULT_BUDGET)?.value)
}
