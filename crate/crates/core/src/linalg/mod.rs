//! Dense complex linear algebra: eigensolver, norms, polar factors, and the
//! unitary exponential/logarithm pair.

mod eigen;
mod matrix;
mod norm;
mod polar;
mod unitary;

pub use eigen::{hermitian_eigen, EigenDecomposition};
pub use matrix::{CMatrix, CVector};
pub use norm::operator_norm;
pub use polar::polar_decompose;
pub use unitary::{chord, principal_log_generator, principal_skew_log, unitary_exp, SkewGenerator};

pub(crate) use eigen::jacobi_eigen;
pub(crate) use matrix::{dot, vnorm};
pub(crate) use norm::{norm_upper, opnorm};

use crate::scalar::Real;

/// Diagonal part of `A`.
pub fn full_pinching<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    a.full_pinching()
}
