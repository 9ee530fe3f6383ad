use num_complex::Complex;

use super::matrix::CMatrix;
use super::norm::norm_upper;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;

const MAX_SWEEPS: usize = 60;

/// Spectral decomposition `H = Q diag(eigenvalues) Q^*` of a hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unitary; column `k` is the eigenvector of `eigenvalues[k]`.
    pub q: CMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.q.dim();
        let scaled = CMatrix::from_fn(n, |i, j| self.q[(i, j)] * self.eigenvalues[j]);
        scaled.mul_adjoint(&self.q)
    }

    /// `Q f(Λ) Q^*` for a complex-valued spectral function.
    pub fn apply_fn(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.q.dim();
        let vals: Vec<Complex<T>> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let scaled = CMatrix::from_fn(n, |i, j| self.q[(i, j)] * vals[j]);
        scaled.mul_adjoint(&self.q)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Fails with [`Error::NotHermitian`] when `‖H − H^*‖` exceeds
/// `tol_member · max(1, ‖H‖)`; otherwise the hermitian part of `H` is
/// decomposed.
pub fn hermitian_eigen<T: Real>(
    h: &CMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<EigenDecomposition<T>> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let gate = tol.tol_member * T::one().max(h.frobenius_norm());
    let defect = norm_upper(&h.hermitian_defect(), gate);
    if defect > gate {
        return Err(Error::NotHermitian { defect: to_f64(defect) });
    }
    let mut a = h.clone();
    a.hermitize();
    Ok(jacobi_eigen(a))
}

/// Jacobi kernel on an exactly hermitian matrix. No input checks.
pub(crate) fn jacobi_eigen<T: Real>(mut a: CMatrix<T>) -> EigenDecomposition<T> {
    let n = a.dim();
    let mut v = CMatrix::<T>::identity(n);
    let total = a.frobenius_norm();
    let stop = lit::<T>(1e-13).max(T::epsilon() * lit(10.0)) * total;

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let q = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    EigenDecomposition { eigenvalues, q }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotation parameters `(c, s, u)` annihilating the `(p, q)` entry `g` of
/// the hermitian 2x2 block `[[a, g], [conj g, b]]`.
///
/// The rotation is `J = [[c, s], [-conj(u) s, conj(u) c]]` with `g = |g| u`.
pub(crate) fn jacobi_params<T: Real>(a: T, b: T, g: Complex<T>) -> Option<(T, T, Complex<T>)> {
    let r = g.norm();
    if r == T::zero() {
        return None;
    }
    let u = g / r;
    let zeta = (b - a) / (lit::<T>(2.0) * r);
    let t = if zeta >= T::zero() {
        T::one() / (zeta + zeta.hypot(T::one()))
    } else {
        -T::one() / (-zeta + zeta.hypot(T::one()))
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    Some((c, t * c, u))
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let n = a.dim();
    let g = a[(p, q)];
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip entries already negligible against both diagonal entries
    if g.norm() <= T::epsilon() * lit(0.25) * (app.abs().min(aqq.abs())) {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return;
    }
    let Some((c, s, u)) = jacobi_params(app, aqq, g) else {
        return;
    };
    let ub = u.conj();
    // rows: J^* A
    for j in 0..n {
        let x = a[(p, j)];
        let y = a[(q, j)];
        a[(p, j)] = x * c - u * y * s;
        a[(q, j)] = x * s + u * y * c;
    }
    // columns: (J^* A) J
    for i in 0..n {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * c - ub * y * s;
        a[(i, q)] = x * s + ub * y * c;
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)];
        v[(i, p)] = x * c - ub * y * s;
        v[(i, q)] = x * s + ub * y * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted() {
        let tol = ToleranceConfig::<f64>::default();
        let e = hermitian_eigen(&CMatrix::from_real_diag(&[2.0, 1.0]), &tol).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);
        assert_eq!(e.q[(1, 0)].norm(), 1.0);
        assert_eq!(e.q[(0, 1)].norm(), 1.0);
    }

    #[test]
    fn pauli_x() {
        let tol = ToleranceConfig::<f64>::default();
        let x = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eigen(&x, &tol).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_off_diagonal() {
        let tol = ToleranceConfig::<f64>::default();
        let h = CMatrix::from_row_major(2, vec![c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(1.0, 0.0)])
            .unwrap();
        let e = hermitian_eigen(&h, &tol).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&h) < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let tol = ToleranceConfig::<f64>::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 17] {
            let h = random_hermitian::<f64, _>(n, &mut rng);
            let e = hermitian_eigen(&h, &tol).unwrap();
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let recon = (&e.reconstruct() - &h).frobenius_norm();
            assert!(recon <= 1e-12, "n={n} recon={recon}");
            let orth = e.q.unitarity_defect().frobenius_norm();
            assert!(orth <= 1e-12, "n={n} orth={orth}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let tol = ToleranceConfig::<f64>::default();
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&a, &tol), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn single_precision() {
        let tol = ToleranceConfig::<f32>::for_precision();
        let h = CMatrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = hermitian_eigen(&h, &tol).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-6);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-6);
    }
}
