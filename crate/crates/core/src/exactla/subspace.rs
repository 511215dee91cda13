//! Subspaces in canonical echelon form.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Rational, Scalar};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A subspace of `F^n`.
///
/// The basis is kept in reduced echelon form: basis vector `i` has a one at
/// coordinate `pivots[i]`, zeros at every other pivot, and zeros before its
/// pivot. Pivots strictly increase, so two subspaces are equal exactly when
/// their representations are.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<F = Rational> {
    ambient: usize,
    vectors: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

/// Null space of a matrix already in reduced row echelon form.
fn rref_null_space<F: Scalar>(rows: &[Vec<F>], pivots: &[usize], n: usize) -> Vec<Vec<F>> {
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![F::zero(); n];
            v[f] = F::one();
            for (row, &p) in rows.iter().zip(pivots) {
                if !row[f].is_zero() {
                    v[p] = row[f].neg();
                }
            }
            v
        })
        .collect()
}

impl<F: Scalar> Subspace<F> {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, vectors: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut v = vec![F::zero(); n];
                v[i] = F::one();
                v
            })
            .collect();
        Subspace { ambient: n, vectors, pivots: (0..n).collect() }
    }

    /// Span of the given vectors.
    pub fn span(n: usize, vectors: &[Vec<F>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a space of dimension {n}",
                v.len()
            )));
        }
        Ok(Self::span_unchecked(n, vectors.to_vec()))
    }

    fn span_unchecked(n: usize, vectors: Vec<Vec<F>>) -> Self {
        let k = vectors.len();
        let mut data = Vec::with_capacity(k * n);
        for v in vectors {
            data.extend(v);
        }
        let mut m = Matrix::from_vec(k, n, data).expect("consistent shape");
        let pivots = m.rref_in_place();
        let vectors = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Subspace { ambient: n, vectors, pivots }
    }

    /// Span of a single coordinate vector `e_i`.
    pub fn coordinate(n: usize, coords: &[usize]) -> Self {
        let vs: Vec<Vec<F>> = coords
            .iter()
            .map(|&i| {
                let mut v = vec![F::zero(); n];
                v[i] = F::one();
                v
            })
            .collect();
        Self::span_unchecked(n, vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical basis vectors.
    pub fn vectors(&self) -> &[Vec<F>] {
        &self.vectors
    }

    /// Basis as an `n × dim` matrix whose columns are the canonical vectors.
    pub fn basis(&self) -> Matrix<F> {
        Matrix::from_cols(self.ambient, &self.vectors).expect("consistent shape")
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(b).skip(p) {
                if !y.is_zero() {
                    x.sub_mul_assign(&f, y);
                }
            }
        }
        w
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.dim() <= self.dim() && other.vectors.iter().all(|v| self.contains_vector(v)))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        let mut vs = self.vectors.clone();
        vs.extend(other.vectors.iter().cloned());
        Ok(Self::span_unchecked(self.ambient, vs))
    }

    /// Row vectors `a` with `a · u = 0` for every `u` in the subspace.
    pub fn annihilator(&self) -> Vec<Vec<F>> {
        rref_null_space(&self.vectors, &self.pivots, self.ambient)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut ann = self.annihilator();
        ann.extend(other.annihilator());
        Ok(Self::kernel_of_rows(self.ambient, ann))
    }

    fn kernel_of_rows(n: usize, rows: Vec<Vec<F>>) -> Self {
        let k = rows.len();
        let mut data = Vec::with_capacity(k * n);
        for r in rows {
            data.extend(r);
        }
        let mut m = Matrix::from_vec(k, n, data).expect("consistent shape");
        let pivots = m.rref_in_place();
        let rows: Vec<Vec<F>> = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Self::span_unchecked(n, rref_null_space(&rows, &pivots, n))
    }

    /// Standard basis vectors at the non-pivot coordinates, as columns.
    pub fn complement_basis(&self) -> Matrix<F> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let cols: Vec<Vec<F>> = (0..self.ambient)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = vec![F::zero(); self.ambient];
                v[j] = F::one();
                v
            })
            .collect();
        Matrix::from_cols(self.ambient, &cols).expect("consistent shape")
    }

    /// Column span of `m`.
    pub fn image(m: &Matrix<F>) -> Self {
        Self::span_unchecked(m.rows(), m.col_vecs())
    }

    /// Null space of `m`.
    pub fn kernel(m: &Matrix<F>) -> Self {
        Self::kernel_of_rows(m.cols(), m.row_vecs())
    }

    /// `m · U`.
    pub fn apply(&self, m: &Matrix<F>) -> Result<Self> {
        if m.cols() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a subspace of F^{}",
                m.rows(),
                m.cols(),
                self.ambient
            )));
        }
        let vs: Vec<Vec<F>> =
            self.vectors.iter().map(|v| m.mul_vec(v).expect("checked shape")).collect();
        Ok(Self::span_unchecked(m.rows(), vs))
    }

    /// `{v : m·v ∈ T}`.
    pub fn preimage(m: &Matrix<F>, t: &Self) -> Result<Self> {
        if m.rows() != t.ambient {
            return Err(Error::DimensionMismatch(format!(
                "preimage under a {}x{} matrix of a subspace of F^{}",
                m.rows(),
                m.cols(),
                t.ambient
            )));
        }
        let ann = t.annihilator();
        let rows: Vec<Vec<F>> = ann
            .iter()
            .map(|a| {
                (0..m.cols())
                    .map(|j| {
                        let mut acc = F::zero();
                        for (i, x) in a.iter().enumerate() {
                            if !x.is_zero() {
                                acc = acc.add(&x.mul(m.get(i, j)));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Self::kernel_of_rows(m.cols(), rows))
    }

    /// Image under a coordinate-wise field map (e.g. reduction modulo a prime).
    pub fn map_vectors<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Subspace<G> {
        let vs: Vec<Vec<G>> = self.vectors.iter().map(|v| v.iter().map(&f).collect()).collect();
        Subspace::span_unchecked(self.ambient, vs)
    }
}

impl<F: Scalar + Serialize> Serialize for Subspace<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, F> {
            ambient_dim: usize,
            basis: &'a [Vec<F>],
        }
        Repr { ambient_dim: self.ambient, basis: &self.vectors }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace<Rational> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ambient_dim: usize,
            basis: Vec<Vec<Rational>>,
        }
        let r = Repr::deserialize(deserializer)?;
        Subspace::span(r.ambient_dim, &r.basis).map_err(D::Error::custom)
    }
}

/// Solves `A x ∈ T` repeatedly for one fixed `A`.
///
/// Row reduction of `[A | I]` yields an invertible `E` with `E A = R` in
/// reduced echelon form, so `A x = y` is solvable exactly when the rows of
/// `E y` below the rank vanish, and a solution then places `E y` at the
/// pivot coordinates.
pub struct PreimageSolver<F> {
    rows: usize,
    cols: usize,
    pivots: Vec<usize>,
    /// Columns of `E`, stored as rows.
    e_cols: Vec<Vec<F>>,
    kernel: Vec<Vec<F>>,
}

impl<F: Scalar> PreimageSolver<F> {
    pub fn new(a: &Matrix<F>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut aug = a.hcat(&Matrix::identity(m)).expect("same height");
        let pivots = aug.rref_limited(n);
        let r = pivots.len();
        let top: Vec<Vec<F>> = (0..r).map(|i| aug.row(i)[..n].to_vec()).collect();
        let kernel = rref_null_space(&top, &pivots, n);
        let e_cols = (0..m).map(|k| (0..m).map(|i| aug.get(i, n + k).clone()).collect()).collect();
        PreimageSolver { rows: m, cols: n, pivots, e_cols, kernel }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel(&self) -> &[Vec<F>] {
        &self.kernel
    }

    /// `E y` for a vector given by its nonzero entries.
    fn transform(&self, y: &[(usize, F)]) -> Vec<F> {
        let mut out = vec![F::zero(); self.rows];
        for (k, v) in y {
            for (o, e) in out.iter_mut().zip(&self.e_cols[*k]) {
                if !e.is_zero() {
                    *o = o.add(&v.mul(e));
                }
            }
        }
        out
    }

    /// Spanning vectors of `{x : A x ∈ span(t)}` for sparse vectors `t`, and
    /// whether `span(t)` lies inside the image of `A`.
    pub fn preimage_sparse(&self, t: &[Vec<(usize, F)>]) -> (Vec<Vec<F>>, bool) {
        let r = self.rank();
        let ys: Vec<Vec<F>> = t.iter().map(|y| self.transform(y)).collect();
        let k = ys.len();
        let lower = self.rows - r;
        let mut l = Matrix::zeros(lower, k);
        for (j, y) in ys.iter().enumerate() {
            for i in 0..lower {
                if !y[r + i].is_zero() {
                    l.set(i, j, y[r + i].clone());
                }
            }
        }
        let lp = l.rref_in_place();
        let lrows: Vec<Vec<F>> = (0..lp.len()).map(|i| l.row(i).to_vec()).collect();
        let alphas = rref_null_space(&lrows, &lp, k);
        let contained = alphas.len() == k;
        let mut out: Vec<Vec<F>> = alphas
            .iter()
            .map(|alpha| {
                let mut x = vec![F::zero(); self.cols];
                for (a, y) in alpha.iter().zip(&ys) {
                    if a.is_zero() {
                        continue;
                    }
                    for (i, &p) in self.pivots.iter().enumerate() {
                        if !y[i].is_zero() {
                            x[p] = x[p].add(&a.mul(&y[i]));
                        }
                    }
                }
                x
            })
            .collect();
        out.extend(self.kernel.iter().cloned());
        (out, contained)
    }

    /// `{x : A x ∈ T}`.
    pub fn preimage(&self, t: &Subspace<F>) -> Result<Subspace<F>> {
        if t.ambient_dim() != self.rows {
            return Err(Error::DimensionMismatch("preimage target dimension".into()));
        }
        let sparse: Vec<Vec<(usize, F)>> = t
            .vectors()
            .iter()
            .map(|v| {
                v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
            })
            .collect();
        let (vs, _) = self.preimage_sparse(&sparse);
        Subspace::span(self.cols, &vs)
    }
}
