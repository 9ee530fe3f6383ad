//! Matrix m-tuples, the max-operator-norm metric, and the partition/juncture
//! correspondence between normal m-tuples and hermitian 2m-tuples.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{opnorm, CMatrix};
use crate::scalar::Real;

/// An m-tuple of equally sized square matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple<T> {
    mats: Vec<CMatrix<T>>,
}

impl<T: Real> MatrixTuple<T> {
    pub fn new(mats: Vec<CMatrix<T>>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::ShapeMismatch("empty tuple".into()));
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::ShapeMismatch("zero-dimensional matrices".into()));
        }
        if let Some(bad) = mats.iter().find(|a| a.dim() != n) {
            return Err(Error::ShapeMismatch(format!(
                "component of dimension {} in a tuple of dimension {n}",
                bad.dim()
            )));
        }
        if mats.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mats })
    }

    pub(crate) fn from_vec_unchecked(mats: Vec<CMatrix<T>>) -> Self {
        Self { mats }
    }

    pub fn single(a: CMatrix<T>) -> Result<Self> {
        Self::new(vec![a])
    }

    /// Number of components.
    pub fn m(&self) -> usize {
        self.mats.len()
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn components(&self) -> &[CMatrix<T>] {
        &self.mats
    }

    pub fn get(&self, j: usize) -> &CMatrix<T> {
        &self.mats[j]
    }

    pub fn into_vec(self) -> Vec<CMatrix<T>> {
        self.mats
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMatrix<T>> {
        self.mats.iter()
    }

    /// Applies `f` to every component.
    pub fn map(&self, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> Self {
        Self { mats: self.mats.iter().map(f).collect() }
    }

    /// `u X_j u^*` for every component.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        self.map(|a| a.conjugate_by(u))
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() || self.n() != other.n() {
            return Err(Error::ShapeMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.m(),
                self.n(),
                other.m(),
                other.n()
            )));
        }
        Ok(())
    }
}

/// `ð(X, Y) = max_j ‖X_j − Y_j‖`.
pub fn metric<T: Real>(x: &MatrixTuple<T>, y: &MatrixTuple<T>) -> Result<T> {
    x.same_shape(y)?;
    Ok(x.iter()
        .zip(y.iter())
        .map(|(a, b)| opnorm(&(a - b)))
        .fold(T::zero(), T::max))
}

/// Hermitian 2m-tuple `(Re X_1, …, Re X_m, Im X_1, …, Im X_m)` with
/// `Re A = (A + A^*)/2` and `Im A = (A − A^*)/(2i)`.
pub fn partition<T: Real>(x: &MatrixTuple<T>) -> MatrixTuple<T> {
    let mut mats: Vec<CMatrix<T>> = x.iter().map(|a| a.hermitian_part()).collect();
    mats.extend(x.iter().map(|a| a.imaginary_part()));
    MatrixTuple { mats }
}

/// Inverse of [`partition`]: `(H_j + i H_{m+j})_j`.
pub fn juncture<T: Real>(h: &MatrixTuple<T>) -> Result<MatrixTuple<T>> {
    let len = h.m();
    if len % 2 != 0 {
        return Err(Error::OddComponentCount(len));
    }
    let m = len / 2;
    let i = Complex::new(T::zero(), T::one());
    let mats = (0..m).map(|j| h.mats[j].axpy(i, &h.mats[m + j])).collect();
    Ok(MatrixTuple { mats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn metric_examples() {
        let x = MatrixTuple::single(CMatrix::<f64>::from_real_diag(&[1.0, 0.0])).unwrap();
        let y = MatrixTuple::single(CMatrix::zeros(2)).unwrap();
        assert_eq!(metric(&x, &x).unwrap(), 0.0);
        assert!((metric(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let a = CMatrix::from_real_diag(&[0.5, 0.5]);
        let b = CMatrix::from_real_diag(&[0.1, -0.2]);
        let c = CMatrix::from_real_diag(&[0.1, 0.3]);
        let xx: MatrixTuple<f64> = MatrixTuple::new(vec![a.clone(), b]).unwrap();
        let yy = MatrixTuple::new(vec![a, c]).unwrap();
        assert!((metric(&xx, &yy).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shape_checks() {
        let x = MatrixTuple::single(CMatrix::<f64>::zeros(2)).unwrap();
        let y = MatrixTuple::single(CMatrix::<f64>::zeros(3)).unwrap();
        assert!(matches!(metric(&x, &y), Err(Error::ShapeMismatch(_))));
        assert!(MatrixTuple::new(vec![CMatrix::<f64>::zeros(2), CMatrix::zeros(3)]).is_err());
        assert_eq!(
            juncture(&MatrixTuple::new(vec![CMatrix::<f64>::zeros(2); 3]).unwrap()),
            Err(Error::OddComponentCount(3))
        );
    }

    #[test]
    fn partition_of_hermitian_and_skew() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian::<f64, _>(3, &mut rng);
        let p = partition(&MatrixTuple::single(h.clone()).unwrap());
        assert_eq!(p.get(0), &h);
        assert_eq!(p.get(1).max_abs(), 0.0);
        let ih = h.scale(Complex::new(0.0, 1.0));
        let p = partition(&MatrixTuple::single(ih).unwrap());
        assert_eq!(p.get(0).max_abs(), 0.0);
        assert!(p.get(1).max_abs_diff(&h) == 0.0);
    }

    #[test]
    fn juncture_of_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = MatrixTuple::new(vec![random_matrix::<f64, _>(3, &mut rng), random_matrix(3, &mut rng)])
            .unwrap();
        let back = juncture(&partition(&x)).unwrap();
        for (a, b) in back.iter().zip(x.iter()) {
            assert!(a.max_abs_diff(b) <= 4.0 * f64::EPSILON * b.max_abs());
        }
    }
}
