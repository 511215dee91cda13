//! Acyclic quivers, their representations, weights and subrepresentations.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exactla::{Mat, Matrix, Rational, Scalar, Subspace};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// A finite quiver without oriented cycles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    order: Vec<usize>,
}

/// Topological order of the vertices (by index), or the first vertex found
/// on a cycle.
fn topological_order(n: usize, arrows: &[Arrow]) -> std::result::Result<Vec<usize>, usize> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in arrows {
        indeg[a.head] += 1;
        out[a.tail].push(a.head);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&v| indeg[v] > 0).expect("some vertex remains"))
    }
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(arrow id, tail id, head id)` triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate vertex {v:?}")));
            }
        }
        let mut ids = HashMap::new();
        let mut parsed = Vec::with_capacity(arrows.len());
        for (id, t, h) in arrows {
            let (id, t, h) = (id.as_ref(), t.as_ref(), h.as_ref());
            let find = |v: &str| {
                index.get(v).copied().ok_or_else(|| Error::Input(format!("arrow {id:?} references unknown vertex {v:?}")))
            };
            let arrow = Arrow { id: id.to_string(), tail: find(t)?, head: find(h)? };
            if ids.insert(id.to_string(), parsed.len()).is_some() {
                return Err(Error::Input(format!("duplicate arrow {id:?}")));
            }
            parsed.push(arrow);
        }
        let order = topological_order(vertices.len(), &parsed)
            .map_err(|v| Error::Acyclicity(vertices[v].clone()))?;
        Ok(Quiver { vertices, arrows: parsed, order })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    /// Vertex indices in a topological order (tails before heads).
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }
}

/// Returns a topological order of the vertex ids.
pub fn validate_quiver(q: &Quiver) -> Result<Vec<String>> {
    let order = topological_order(q.vertices.len(), &q.arrows).map_err(|v| Error::Acyclicity(q.vertices[v].clone()))?;
    Ok(order.into_iter().map(|v| q.vertices[v].clone()).collect())
}

/// A path in a quiver. Arrows are listed in the order they are traversed;
/// an empty list is the trivial path at `source`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Path {
    pub arrows: Vec<usize>,
    pub source: usize,
    pub target: usize,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { arrows: Vec::new(), source: v, target: v }
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Conventional name, composed right to left (`ba` means `a` then `b`).
    pub fn name(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return format!("e_{}", q.vertices[self.source]);
        }
        self.arrows.iter().rev().map(|&a| q.arrows[a].id.as_str()).collect()
    }
}

/// All nontrivial paths, ordered by target (topologically) and then by
/// discovery; every arrow sequence appears once.
pub fn enumerate_paths(q: &Quiver) -> Vec<Path> {
    let n = q.num_vertices();
    let mut ending: Vec<Vec<Path>> = vec![Vec::new(); n];
    for &v in &q.order {
        let mut here = Vec::new();
        for (ai, a) in q.arrows.iter().enumerate() {
            if a.head != v {
                continue;
            }
            here.push(Path { arrows: vec![ai], source: a.tail, target: v });
            for p in &ending[a.tail] {
                let mut arrows = p.arrows.clone();
                arrows.push(ai);
                here.push(Path { arrows, source: p.source, target: v });
            }
        }
        ending[v] = here;
    }
    q.order.iter().flat_map(|&v| ending[v].clone()).collect()
}

/// Number of paths including the trivial ones.
pub fn path_count(q: &Quiver) -> usize {
    enumerate_paths(q).len() + q.num_vertices()
}

/// Element of an integer weight lattice: one integer per vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Weight(vec![1; n])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ_v w(v)·d(v)`.
    pub fn eval(&self, dims: &[usize]) -> i64 {
        self.0.iter().zip(dims).map(|(w, &d)| w * d as i64).sum()
    }

    pub fn scaled(&self, s: i64) -> Self {
        Weight(self.0.iter().map(|w| w * s).collect())
    }

    /// Gcd of the entries (zero for the zero weight).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &w| num_integer::gcd(g, w))
    }
}

/// `θ(d)` for a dimension vector.
pub fn weight_of(w: &Weight, dims: &[usize]) -> i64 {
    w.eval(dims)
}

/// Whether `κ(v) ≥ 1` at every vertex.
pub fn kappa_check(kappa: &Weight) -> bool {
    kappa.0.iter().all(|&k| k >= 1)
}

/// `μ = Θ(d)/κ(d)` for a nonzero dimension vector.
pub fn slope(theta: &Weight, kappa: &Weight, dims: &[usize]) -> Result<Rational> {
    if !kappa_check(kappa) {
        return Err(Error::Weight(format!("kappa {:?} is not positive at every vertex", kappa.0)));
    }
    if dims.iter().all(|&d| d == 0) {
        return Err(Error::ZeroRepresentation("slope of the zero representation".into()));
    }
    Ok(Rational::new(theta.eval(dims), kappa.eval(dims)))
}

/// The weight `v ↦ κ(d)Θ(v) − Θ(d)κ(v)`, which vanishes on `d`.
pub fn theta_d(theta: &Weight, kappa: &Weight, dims: &[usize]) -> Weight {
    let (k, t) = (kappa.eval(dims), theta.eval(dims));
    Weight(theta.0.iter().zip(&kappa.0).map(|(th, ka)| k * th - t * ka).collect())
}

/// A representation: a space `F^{d(v)}` at each vertex and a matrix per arrow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Representation {
    quiver: Arc<Quiver>,
    dims: Vec<usize>,
    maps: Vec<Mat>,
}

impl Representation {
    pub fn new(quiver: Arc<Quiver>, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self> {
        if dims.len() != quiver.num_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if maps.len() != quiver.arrows.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for {} arrows",
                maps.len(),
                quiver.arrows.len()
            )));
        }
        for (a, m) in quiver.arrows.iter().zip(&maps) {
            if m.rows() != dims[a.head] || m.cols() != dims[a.tail] {
                return Err(Error::DimensionMismatch(format!(
                    "map of arrow {:?} is {}x{}, expected {}x{}",
                    a.id,
                    m.rows(),
                    m.cols(),
                    dims[a.head],
                    dims[a.tail]
                )));
            }
        }
        Ok(Representation { quiver, dims, maps })
    }

    /// Representation with every map zero.
    pub fn zero_maps(quiver: Arc<Quiver>, dims: Vec<usize>) -> Result<Self> {
        let maps = quiver.arrows.iter().map(|a| Mat::zeros(dims[a.head], dims[a.tail])).collect();
        Self::new(quiver, dims, maps)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn quiver_arc(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Mat] {
        &self.maps
    }

    pub fn map(&self, arrow: usize) -> &Mat {
        &self.maps[arrow]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn zero_subrep(&self) -> SubRep {
        SubRep { spaces: self.dims.iter().map(|&d| Subspace::zero(d)).collect() }
    }

    pub fn full_subrep(&self) -> SubRep {
        SubRep { spaces: self.dims.iter().map(|&d| Subspace::full(d)).collect() }
    }
}

/// The composite `W(a_k)⋯W(a_1)`; the identity for a trivial path.
pub fn path_map(m: &Representation, p: &Path) -> Mat {
    let mut acc = Mat::identity(m.dims[p.source]);
    for &a in &p.arrows {
        acc = m.maps[a].mul(&acc).expect("composable path");
    }
    acc
}

/// Per-vertex subspaces of a representation. The parent is not stored; every
/// operation takes it explicitly.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SubRep {
    pub spaces: Vec<Subspace>,
}

impl SubRep {
    /// Subrepresentation after checking shapes and invariance.
    pub fn new(parent: &Representation, spaces: Vec<Subspace>) -> Result<Self> {
        let s = SubRep { spaces };
        check_shape(parent, &s)?;
        if !is_subrep(parent, &s) {
            return Err(Error::Validation("spaces are not invariant under the arrows".into()));
        }
        Ok(s)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.iter().map(|s| s.dim()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().all(|s| s.is_zero())
    }

    pub fn is_full(&self) -> bool {
        self.spaces.iter().all(|s| s.is_full())
    }

    /// Vertexwise containment `other ⊆ self`.
    pub fn contains(&self, other: &SubRep) -> Result<bool> {
        if self.spaces.len() != other.spaces.len() {
            return Err(Error::DimensionMismatch("subrepresentations of different quivers".into()));
        }
        for (a, b) in self.spaces.iter().zip(&other.spaces) {
            if !a.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn check_shape(parent: &Representation, s: &SubRep) -> Result<()> {
    if s.spaces.len() != parent.dims.len()
        || s.spaces.iter().zip(&parent.dims).any(|(sp, &d)| sp.ambient_dim() != d)
    {
        return Err(Error::DimensionMismatch("subspaces do not match the parent dimensions".into()));
    }
    Ok(())
}

/// Whether every arrow maps the space at its tail into the space at its head.
pub fn is_subrep(parent: &Representation, s: &SubRep) -> bool {
    if check_shape(parent, s).is_err() {
        return false;
    }
    parent.quiver.arrows.iter().zip(&parent.maps).all(|(a, m)| {
        let img = s.spaces[a.tail].apply(m).expect("shape checked");
        s.spaces[a.head].contains(&img).expect("shape checked")
    })
}

pub fn sum_subreps(parent: &Representation, s: &SubRep, t: &SubRep) -> Result<SubRep> {
    check_shape(parent, s)?;
    check_shape(parent, t)?;
    let spaces = s.spaces.iter().zip(&t.spaces).map(|(a, b)| a.sum(b)).collect::<Result<_>>()?;
    Ok(SubRep { spaces })
}

pub fn intersect_subreps(parent: &Representation, s: &SubRep, t: &SubRep) -> Result<SubRep> {
    check_shape(parent, s)?;
    check_shape(parent, t)?;
    let spaces = s.spaces.iter().zip(&t.spaces).map(|(a, b)| a.intersect(b)).collect::<Result<_>>()?;
    Ok(SubRep { spaces })
}

/// Smallest subrepresentation containing the given per-vertex spaces.
pub fn closure(parent: &Representation, spaces: &[Subspace]) -> Result<SubRep> {
    let s = SubRep { spaces: spaces.to_vec() };
    check_shape(parent, &s)?;
    let mut out = s.spaces;
    for &v in &parent.quiver.order {
        let mut here = out[v].clone();
        for (a, m) in parent.quiver.arrows.iter().zip(&parent.maps) {
            if a.head == v {
                here = here.sum(&out[a.tail].apply(m)?)?;
            }
        }
        out[v] = here;
    }
    Ok(SubRep { spaces: out })
}

/// Projection `F^d → F^d / S` in the coordinates of the complement basis.
fn quotient_projection(s: &Subspace) -> Mat {
    let d = s.ambient_dim();
    let mut is_pivot = vec![None; d];
    for (i, &p) in s.pivots().iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    let free: Vec<usize> = (0..d).filter(|&j| is_pivot[j].is_none()).collect();
    let mut proj = Mat::zeros(free.len(), d);
    for (row, &j) in free.iter().enumerate() {
        for k in 0..d {
            let v = match is_pivot[k] {
                None if k == j => Rational::integer(1),
                None => continue,
                Some(i) => s.vectors()[i][j].neg(),
            };
            if !v.is_zero() {
                proj.set(row, k, v);
            }
        }
    }
    proj
}

/// `M/S` with per-vertex projections `M_v → (M/S)_v` and sections back.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub rep: Representation,
    pub projections: Vec<Mat>,
    pub sections: Vec<Mat>,
}

pub fn quotient_rep(m: &Representation, s: &SubRep) -> Result<Quotient> {
    check_shape(m, s)?;
    if !is_subrep(m, s) {
        return Err(Error::Validation("quotient by spaces that are not a subrepresentation".into()));
    }
    let projections: Vec<Mat> = s.spaces.iter().map(quotient_projection).collect();
    let sections: Vec<Mat> = s.spaces.iter().map(|sp| sp.complement_basis()).collect();
    let dims: Vec<usize> = sections.iter().map(|c| c.cols()).collect();
    let maps = m
        .quiver
        .arrows
        .iter()
        .zip(&m.maps)
        .map(|(a, map)| projections[a.head].mul(&map.mul(&sections[a.tail])?))
        .collect::<Result<Vec<_>>>()?;
    let rep = Representation::new(m.quiver.clone(), dims, maps)?;
    Ok(Quotient { rep, projections, sections })
}

/// Subrepresentation of `M` containing `S` that corresponds to a
/// subrepresentation `t` of `M/S`.
pub fn pullback(s: &SubRep, q: &Quotient, t: &SubRep) -> Result<SubRep> {
    let spaces = s
        .spaces
        .iter()
        .zip(&q.sections)
        .zip(&t.spaces)
        .map(|((sv, c), tv)| sv.sum(&tv.apply(c)?))
        .collect::<Result<_>>()?;
    Ok(SubRep { spaces })
}

/// `S` as a representation in its own canonical bases, with inclusion maps.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub rep: Representation,
    pub inclusions: Vec<Mat>,
}

pub fn restrict_rep(m: &Representation, s: &SubRep) -> Result<Restriction> {
    check_shape(m, s)?;
    let inclusions: Vec<Mat> = s.spaces.iter().map(|sp| sp.basis()).collect();
    let mut maps = Vec::with_capacity(m.maps.len());
    for (a, map) in m.quiver.arrows.iter().zip(&m.maps) {
        let src = &s.spaces[a.tail];
        let dst = &s.spaces[a.head];
        let mut r = Mat::zeros(dst.dim(), src.dim());
        for (k, v) in src.vectors().iter().enumerate() {
            let w = map.mul_vec(v)?;
            let c = dst
                .coords(&w)
                .ok_or_else(|| Error::Validation("restriction to spaces that are not a subrepresentation".into()))?;
            for (i, x) in c.into_iter().enumerate() {
                r.set(i, k, x);
            }
        }
        maps.push(r);
    }
    let rep = Representation::new(m.quiver.clone(), s.dims(), maps)?;
    Ok(Restriction { rep, inclusions })
}

impl Restriction {
    /// Image of a subrepresentation of the restriction inside the parent.
    pub fn push(&self, t: &SubRep) -> Result<SubRep> {
        let spaces =
            t.spaces.iter().zip(&self.inclusions).map(|(tv, i)| tv.apply(i)).collect::<Result<_>>()?;
        Ok(SubRep { spaces })
    }

    /// A parent subrepresentation contained in `S`, in the coordinates of `S`.
    pub fn pull(&self, parent_sub: &SubRep) -> Result<SubRep> {
        let spaces = parent_sub
            .spaces
            .iter()
            .zip(&self.inclusions)
            .map(|(sp, inc)| {
                let incl = Subspace::image(inc);
                let vs = sp
                    .vectors()
                    .iter()
                    .map(|v| incl.coords(v))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Validation("subrepresentation not contained in S".into()))?;
                Subspace::span(inc.cols(), &vs)
            })
            .collect::<Result<_>>()?;
        Ok(SubRep { spaces })
    }
}

/// `upper / lower` for subrepresentations `lower ⊆ upper` of `M`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub rep: Representation,
    restriction: Restriction,
    lower_in_upper: SubRep,
    quotient: Quotient,
}

pub fn subquotient(m: &Representation, lower: &SubRep, upper: &SubRep) -> Result<Subquotient> {
    if !upper.contains(lower)? {
        return Err(Error::Validation("lower term is not contained in the upper term".into()));
    }
    let restriction = restrict_rep(m, upper)?;
    let lower_in_upper = restriction.pull(lower)?;
    let quotient = quotient_rep(&restriction.rep, &lower_in_upper)?;
    Ok(Subquotient { rep: quotient.rep.clone(), restriction, lower_in_upper, quotient })
}

impl Subquotient {
    /// Subrepresentation of `M` between `lower` and `upper` corresponding to
    /// a subrepresentation of the subquotient.
    pub fn lift(&self, t: &SubRep) -> Result<SubRep> {
        let inside = pullback(&self.lower_in_upper, &self.quotient, t)?;
        self.restriction.push(&inside)
    }
}

/// A problem instance: a representation with its weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub rep: Representation,
    pub theta: Weight,
    pub kappa: Weight,
}

#[derive(Serialize, Deserialize)]
struct ArrowJson {
    id: String,
    tail: String,
    head: String,
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    vertices: Vec<String>,
    arrows: Vec<ArrowJson>,
}

fn read_int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Input(format!("{what} must be an integer, got {v}")))
}

fn read_weight(obj: Option<&Value>, q: &Quiver, what: &str, default: Option<i64>) -> Result<Weight> {
    let Some(obj) = obj else {
        return match default {
            Some(d) => Ok(Weight(vec![d; q.num_vertices()])),
            None => Err(Error::Input(format!("missing {what}"))),
        };
    };
    let map = obj.as_object().ok_or_else(|| Error::Input(format!("{what} must be an object")))?;
    for k in map.keys() {
        if q.vertex_index(k).is_none() {
            return Err(Error::Input(format!("{what} names unknown vertex {k:?}")));
        }
    }
    q.vertices
        .iter()
        .map(|v| match (map.get(v), default) {
            (Some(x), _) => read_int(x, &format!("{what}[{v}]")),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Input(format!("{what} is missing vertex {v:?}"))),
        })
        .collect::<Result<_>>()
        .map(Weight)
}

fn read_matrix(v: Option<&Value>, rows: usize, cols: usize, id: &str) -> Result<Mat> {
    let Some(v) = v else {
        if rows * cols == 0 {
            return Ok(Mat::zeros(rows, cols));
        }
        return Err(Error::Input(format!("missing map for arrow {id:?}")));
    };
    let raw: Vec<Vec<Rational>> = serde_json::from_value(v.clone())
        .map_err(|e| Error::Input(format!("map of arrow {id:?}: {e}")))?;
    if rows * cols == 0 && raw.iter().all(|r| r.is_empty()) && (raw.is_empty() || raw.len() == rows) {
        return Ok(Mat::zeros(rows, cols));
    }
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!("map of arrow {id:?} must be {rows}x{cols}")));
    }
    Mat::from_rows(cols, raw)
}

impl Instance {
    pub fn new(rep: Representation, theta: Weight, kappa: Weight) -> Result<Self> {
        let n = rep.quiver().num_vertices();
        if theta.len() != n || kappa.len() != n {
            return Err(Error::DimensionMismatch("weights must have one entry per vertex".into()));
        }
        Ok(Instance { rep, theta, kappa })
    }

    pub fn from_json_value(doc: &Value) -> Result<Self> {
        let obj = doc.as_object().ok_or_else(|| Error::Input("instance must be a JSON object".into()))?;
        let qv = obj.get("quiver").ok_or_else(|| Error::Input("missing quiver".into()))?;
        let qj: QuiverJson =
            serde_json::from_value(qv.clone()).map_err(|e| Error::Input(format!("quiver: {e}")))?;
        let arrows: Vec<(&str, &str, &str)> =
            qj.arrows.iter().map(|a| (a.id.as_str(), a.tail.as_str(), a.head.as_str())).collect();
        let verts: Vec<&str> = qj.vertices.iter().map(String::as_str).collect();
        let q = Quiver::new(&verts, &arrows)?;
        let dims_w = read_weight(obj.get("dims"), &q, "dims", Some(0))?;
        if let Some(&bad) = dims_w.0.iter().find(|&&d| d < 0) {
            return Err(Error::Input(format!("negative dimension {bad}")));
        }
        let dims: Vec<usize> = dims_w.0.iter().map(|&d| d as usize).collect();
        let maps_obj = match obj.get("maps") {
            None => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(Error::Input("maps must be an object".into())),
        };
        for k in maps_obj.keys() {
            if q.arrow_index(k).is_none() {
                return Err(Error::Input(format!("map given for unknown arrow {k:?}")));
            }
        }
        let maps = q
            .arrows
            .iter()
            .map(|a| read_matrix(maps_obj.get(&a.id), dims[a.head], dims[a.tail], &a.id))
            .collect::<Result<Vec<_>>>()?;
        let theta = read_weight(obj.get("theta"), &q, "theta", Some(0))?;
        let kappa = read_weight(obj.get("kappa"), &q, "kappa", Some(1))?;
        let rep = Representation::new(Arc::new(q), dims, maps)?;
        Instance::new(rep, theta, kappa)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed JSON: {e}")))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let q = self.rep.quiver();
        let per_vertex = |vals: &[i64]| -> Value {
            let mut m = Map::new();
            for (v, x) in q.vertices.iter().zip(vals) {
                m.insert(v.clone(), Value::from(*x));
            }
            Value::Object(m)
        };
        let qj = QuiverJson {
            vertices: q.vertices.clone(),
            arrows: q
                .arrows
                .iter()
                .map(|a| ArrowJson {
                    id: a.id.clone(),
                    tail: q.vertices[a.tail].clone(),
                    head: q.vertices[a.head].clone(),
                })
                .collect(),
        };
        let mut maps = Map::new();
        for (a, m) in q.arrows.iter().zip(self.rep.maps()) {
            maps.insert(a.id.clone(), serde_json::to_value(m).expect("matrices serialize"));
        }
        let dims: Vec<i64> = self.rep.dims().iter().map(|&d| d as i64).collect();
        let mut out = Map::new();
        out.insert("quiver".into(), serde_json::to_value(qj).expect("quiver serializes"));
        out.insert("dims".into(), per_vertex(&dims));
        out.insert("maps".into(), Value::Object(maps));
        out.insert("theta".into(), per_vertex(&self.theta.0));
        out.insert("kappa".into(), per_vertex(&self.kappa.0));
        Value::Object(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("instances serialize")
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Per-vertex map `{vertex: [basis vectors]}` for JSON output.
pub fn subrep_json(q: &Quiver, s: &SubRep) -> Value {
    let mut m = Map::new();
    for (v, sp) in q.vertices.iter().zip(&s.spaces) {
        m.insert(v.clone(), serde_json::to_value(sp.vectors()).expect("vectors serialize"));
    }
    Value::Object(m)
}

/// Integer matrix helper used by tests and generators.
pub fn int_matrix(rows: &[Vec<i64>], nrows: usize, ncols: usize) -> Mat {
    if nrows * ncols == 0 {
        return Matrix::zeros(nrows, ncols);
    }
    Mat::from_i64_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::integer(0); n];
        v[i] = Rational::integer(1);
        v
    }

    fn span(n: usize, basis: &[usize]) -> Subspace {
        Subspace::coordinate(n, basis)
    }

    fn chain() -> Representation {
        let q = Quiver::new(&["x", "y", "z"], &[("a", "x", "y"), ("b", "y", "z")]).unwrap();
        let a = Mat::from_i64_rows(&[vec![1], vec![0]]);
        let b = Mat::from_i64_rows(&[vec![1, 0]]);
        Representation::new(Arc::new(q), vec![1, 2, 1], vec![a, b]).unwrap()
    }

    pub(crate) fn four_sources() -> Instance {
        Instance::from_json(include_str!("../examples/four_sources.json")).unwrap()
    }

    #[test]
    fn topological_orders() {
        let q = Quiver::new(&["x", "y"], &[("a", "x", "y")]).unwrap();
        assert_eq!(validate_quiver(&q).unwrap(), vec!["x", "y"]);
        let err = Quiver::new(&["x", "y"], &[("a", "x", "y"), ("b", "y", "x")]).unwrap_err();
        assert!(matches!(err, Error::Acyclicity(_)));
        let s = four_sources();
        let order = validate_quiver(s.rep.quiver()).unwrap();
        assert_eq!(order.last().unwrap(), "y");
    }

    #[test]
    fn path_enumeration() {
        let q = Quiver::new(&["x", "y"], &[("a", "x", "y")]).unwrap();
        assert_eq!(enumerate_paths(&q).len(), 1);
        assert_eq!(path_count(&q), 3);
        let c = chain();
        let names: Vec<String> = enumerate_paths(c.quiver()).iter().map(|p| p.name(c.quiver())).collect();
        assert_eq!(names, vec!["a", "b", "ba"]);
        assert_eq!(path_count(c.quiver()), 6);
        assert_eq!(enumerate_paths(four_sources().rep.quiver()).len(), 4);
    }

    #[test]
    fn path_maps() {
        let c = chain();
        assert_eq!(path_map(&c, &Path::trivial(1)), Mat::identity(2));
        let ba = enumerate_paths(c.quiver()).pop().unwrap();
        assert_eq!(path_map(&c, &ba), Mat::from_i64_rows(&[vec![1]]));
        let s = four_sources();
        let a3 = enumerate_paths(s.rep.quiver()).into_iter().find(|p| p.arrows == vec![2]).unwrap();
        assert_eq!(path_map(&s.rep, &a3).col(0), e(4, 0).iter().map(|x| x * &Rational::integer(2)).collect::<Vec<_>>());
    }

    #[test]
    fn weights_and_slopes() {
        let s = four_sources();
        assert_eq!(weight_of(&s.theta, s.rep.dims()), 0);
        assert_eq!(slope(&s.theta, &s.kappa, &[0, 1, 1, 0, 1]).unwrap(), Rational::new(4, 3));
        assert!(slope(&s.theta, &s.kappa, &[0; 5]).is_err());
        assert!(slope(&s.theta, &Weight(vec![1, 1, 0, 1, 1]), &[1; 5]).is_err());
        let td = theta_d(&s.theta, &s.kappa, s.rep.dims());
        assert_eq!(td, s.theta.scaled(8));
        assert_eq!(td.eval(&[0, 1, 1, 0, 1]), 32);
        assert_eq!(td.eval(s.rep.dims()), 0);
        let zero = Weight::zero(5);
        assert_eq!(slope(&zero, &s.kappa, s.rep.dims()).unwrap(), Rational::integer(0));
    }

    fn sp(rep: &Representation, y_basis: &[usize]) -> SubRep {
        let mut spaces: Vec<Subspace> = (0..4).map(|_| Subspace::zero(1)).collect();
        let y = span(4, y_basis);
        for (i, target) in [1usize, 0, 0, 2].iter().enumerate() {
            if y_basis.contains(target) {
                spaces[i] = Subspace::full(1);
            }
        }
        spaces.push(y);
        SubRep::new(rep, spaces).unwrap()
    }

    #[test]
    fn subrep_lattice() {
        let s = four_sources();
        let e1 = sp(&s.rep, &[0]);
        assert_eq!(e1.dims(), vec![0, 1, 1, 0, 1]);
        let mut bad = s.rep.zero_subrep();
        bad.spaces[1] = Subspace::full(1);
        bad.spaces[4] = span(4, &[1]);
        assert!(!is_subrep(&s.rep, &bad));
        let e12 = sp(&s.rep, &[0, 1]);
        assert_eq!(sum_subreps(&s.rep, &e1, &e12).unwrap(), e12);
        assert_eq!(intersect_subreps(&s.rep, &e1, &e12).unwrap(), e1);
        let c = closure(&s.rep, &bad.spaces).unwrap();
        assert_eq!(c.dims(), vec![0, 1, 0, 0, 2]);
        assert!(e12.contains(&c).unwrap());
    }

    #[test]
    fn quotients_and_pullbacks() {
        let s = four_sources();
        let q0 = quotient_rep(&s.rep, &s.rep.zero_subrep()).unwrap();
        assert_eq!(q0.rep, s.rep);
        let e123 = sp(&s.rep, &[0, 1, 2]);
        let q = quotient_rep(&s.rep, &e123).unwrap();
        assert_eq!(q.rep.dims(), &[0, 0, 0, 0, 1]);
        let qf = quotient_rep(&s.rep, &s.rep.full_subrep()).unwrap();
        assert!(qf.rep.is_zero());
        let e1 = sp(&s.rep, &[0]);
        let q1 = quotient_rep(&s.rep, &e1).unwrap();
        let t = closure(&q1.rep, &q1.rep.full_subrep().spaces).unwrap();
        let back = pullback(&e1, &q1, &t).unwrap();
        assert!(back.is_full());
        let mut t2 = q1.rep.zero_subrep();
        t2.spaces[0] = Subspace::full(1);
        let t2 = closure(&q1.rep, &t2.spaces).unwrap();
        let b2 = pullback(&e1, &q1, &t2).unwrap();
        assert!(is_subrep(&s.rep, &b2));
        assert!(b2.contains(&e1).unwrap());
        let sum: Vec<usize> = e1.dims().iter().zip(t2.dims()).map(|(a, b)| a + b).collect();
        assert_eq!(b2.dims(), sum);
    }

    #[test]
    fn subquotients_lift() {
        let s = four_sources();
        let e1 = sp(&s.rep, &[0]);
        let e123 = sp(&s.rep, &[0, 1, 2]);
        let sq = subquotient(&s.rep, &e1, &e123).unwrap();
        assert_eq!(sq.rep.dims(), &[1, 0, 0, 1, 2]);
        let full = sq.lift(&sq.rep.full_subrep()).unwrap();
        assert_eq!(full, e123);
        let zero = sq.lift(&sq.rep.zero_subrep()).unwrap();
        assert_eq!(zero, e1);
    }

    #[test]
    fn instance_json_round_trip() {
        let s = four_sources();
        let again = Instance::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
        assert!(Instance::from_json("{").is_err());
        assert!(Instance::from_json(r#"{"quiver":{"vertices":["x"],"arrows":[]},"dims":{"q":1}}"#).is_err());
    }
}
