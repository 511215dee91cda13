//! Exact linear algebra: rationals, prime fields, dense matrices and
//! canonical subspaces.

mod field;
mod matrix;
mod subspace;

pub use field::{rational_reconstruct, Fp, Rational, Scalar, F61, F62, MERSENNE_61, MORE_PRIMES_62, PRIME_62};
pub use matrix::{Mat, Matrix};
pub use subspace::{PreimageSolver, Subspace};

use crate::error::Result;

/// Exact rank over the rationals.
pub fn rank(m: &Mat) -> usize {
    m.rank()
}

/// Column span of `m`.
pub fn image<F: Scalar>(m: &Matrix<F>) -> Subspace<F> {
    Subspace::image(m)
}

/// Null space of `m`.
pub fn kernel<F: Scalar>(m: &Matrix<F>) -> Subspace<F> {
    Subspace::kernel(m)
}

/// `m · U`.
pub fn apply<F: Scalar>(m: &Matrix<F>, u: &Subspace<F>) -> Result<Subspace<F>> {
    u.apply(m)
}

/// `{v : m·v ∈ T}`.
pub fn preimage<F: Scalar>(m: &Matrix<F>, t: &Subspace<F>) -> Result<Subspace<F>> {
    Subspace::preimage(m, t)
}

pub fn sum<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Subspace<F>> {
    u.sum(v)
}

pub fn intersect<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Subspace<F>> {
    u.intersect(v)
}

/// Whether `v ⊆ u`.
pub fn contains<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<bool> {
    u.contains(v)
}

/// Columns extending the basis of `u` to a basis of the ambient space.
pub fn complement_basis<F: Scalar>(u: &Subspace<F>) -> Matrix<F> {
    u.complement_basis()
}
