use num_complex::Complex;

use super::eigen::jacobi_eigen;
use super::matrix::CMatrix;
use super::norm::norm_upper;
use crate::error::{Error, Result};
use crate::joint::spectrum::joint_basis_default;
use crate::scalar::{cone, lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;

/// Skew-hermitian `K = Q diag(iθ) Q^*` kept together with its spectral data,
/// so that `e^{tK}` costs one matrix product per evaluation.
#[derive(Clone, Debug)]
pub struct SkewGenerator<T> {
    k: CMatrix<T>,
    q: CMatrix<T>,
    theta: Vec<T>,
}

impl<T: Real> SkewGenerator<T> {
    /// Diagonalises `K`; fails with [`Error::NotSkewHermitian`] when
    /// `‖K + K^*‖ > tol_member · max(1, ‖K‖)`.
    pub fn new(k: &CMatrix<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = k.dim();
        let sum = CMatrix::from_fn(n, |i, j| k[(i, j)] + k[(j, i)].conj());
        let gate = tol.tol_member * T::one().max(k.frobenius_norm());
        let defect = norm_upper(&sum, gate);
        if defect > gate {
            return Err(Error::NotSkewHermitian { defect: to_f64(defect) });
        }
        let mut kk = k.clone();
        kk.skew_hermitize();
        // -iK is hermitian with eigenvalues θ
        let mut h = kk.map_entries(|z| Complex::new(z.im, -z.re));
        h.hermitize();
        let e = jacobi_eigen(h);
        Ok(Self { k: kk, q: e.q, theta: e.eigenvalues })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            k: CMatrix::zeros(n),
            q: CMatrix::identity(n),
            theta: vec![T::zero(); n],
        }
    }

    pub(crate) fn from_spectral(q: CMatrix<T>, theta: Vec<T>) -> Self {
        let n = q.dim();
        let scaled = CMatrix::from_fn(n, |i, j| q[(i, j)] * Complex::new(T::zero(), theta[j]));
        let mut k = scaled.mul_adjoint(&q);
        k.skew_hermitize();
        Self { k, q, theta }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Unitary `Q` with `K = Q diag(iθ) Q^*`.
    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.q
    }

    /// Spectral angles, i.e. the eigenvalues of `-iK`.
    pub fn angles(&self) -> &[T] {
        &self.theta
    }

    /// `‖K‖ = max |θ|`.
    pub fn norm(&self) -> T {
        self.theta.iter().fold(T::zero(), |m, t| m.max(t.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|t| *t == T::zero())
    }

    /// `e^{tK}`; exactly the identity at `t = 0`.
    pub fn exp(&self, t: T) -> CMatrix<T> {
        let n = self.dim();
        if t == T::zero() || self.is_zero() {
            return CMatrix::identity(n);
        }
        let phases: Vec<Complex<T>> = self
            .theta
            .iter()
            .map(|&th| Complex::new(T::zero(), th * t).exp())
            .collect();
        let scaled = CMatrix::from_fn(n, |i, j| self.q[(i, j)] * phases[j]);
        scaled.mul_adjoint(&self.q)
    }
}

/// `e^{tK}` for skew-hermitian `K`.
pub fn unitary_exp<T: Real>(k: &CMatrix<T>, t: T, tol: &ToleranceConfig<T>) -> Result<CMatrix<T>> {
    Ok(SkewGenerator::new(k, tol)?.exp(t))
}

/// Principal logarithm of a unitary: skew-hermitian `K` with spectrum in
/// `i(-π, π]` and `e^K = W`.
///
/// Fails with [`Error::BranchEdge`] when an eigenvalue of `W` is within
/// `tol_cluster` of `-1`; use [`principal_log_generator`] with
/// `allow_branch_edge` to accept such inputs anyway.
pub fn principal_skew_log<T: Real>(w: &CMatrix<T>, tol: &ToleranceConfig<T>) -> Result<CMatrix<T>> {
    Ok(principal_log_generator(w, tol, false)?.k)
}

/// As [`principal_skew_log`], returning the generator with its spectral data.
pub fn principal_log_generator<T: Real>(
    w: &CMatrix<T>,
    tol: &ToleranceConfig<T>,
    allow_branch_edge: bool,
) -> Result<SkewGenerator<T>> {
    if !w.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = w.dim();
    let defect = norm_upper(&w.unitarity_defect(), tol.tol_unitary);
    if defect > tol.tol_unitary {
        return Err(Error::NotUnitary { defect: to_f64(defect) });
    }
    if w.max_abs_diff(&CMatrix::identity(n)) == T::zero() {
        return Ok(SkewGenerator::zero(n));
    }
    let q = joint_basis_default(&[w.hermitian_part(), w.imaginary_part()]);
    let wq = w.matmul(&q);
    let mut theta = Vec::with_capacity(n);
    for k in 0..n {
        let lam = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + q[(i, k)].conj() * wq[(i, k)]
        });
        let dist = (lam + cone()).norm();
        if dist < tol.tol_cluster && !allow_branch_edge {
            return Err(Error::BranchEdge { distance: to_f64(dist) });
        }
        let mut th = lam.im.atan2(lam.re);
        if th <= -T::PI() {
            th = T::PI();
        }
        theta.push(th);
    }
    Ok(SkewGenerator::from_spectral(q, theta))
}

/// `|1 - e^{iθ}| = 2 sin(θ/2)`, the chord length used by the exponential bound.
pub fn chord<T: Real>(theta: T) -> T {
    lit::<T>(2.0) * (theta.abs().min(T::PI()) * lit(0.5)).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm::opnorm;
    use crate::random::{random_skew, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    #[test]
    fn log_of_identity_is_zero() {
        let k = principal_skew_log(&CMatrix::<f64>::identity(3), &tol()).unwrap();
        assert_eq!(k, CMatrix::zeros(3));
    }

    #[test]
    fn log_of_quarter_turns() {
        let w = CMatrix::from_diag(&[Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)]);
        let k = principal_skew_log(&w, &tol()).unwrap();
        let want = CMatrix::from_diag(&[
            Complex::new(0.0, std::f64::consts::FRAC_PI_2),
            Complex::new(0.0, -std::f64::consts::FRAC_PI_2),
        ]);
        assert!(k.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn branch_edge_detected() {
        let w = CMatrix::from_real_diag(&[-1.0, 1.0]);
        assert!(matches!(principal_skew_log(&w, &tol()), Err(Error::BranchEdge { .. })));
        let g = principal_log_generator(&w, &tol(), true).unwrap();
        assert!((g.norm() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn not_unitary_rejected() {
        let w = CMatrix::<f64>::identity(2).scale_real(1.1);
        assert!(matches!(principal_skew_log(&w, &tol()), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn exp_of_zero_and_pi() {
        let z = unitary_exp(&CMatrix::<f64>::zeros(2), 0.7, &tol()).unwrap();
        assert_eq!(z, CMatrix::identity(2));
        let k = CMatrix::from_diag(&[Complex::new(0.0, std::f64::consts::PI)]);
        let e = unitary_exp(&k, 1.0, &tol()).unwrap();
        assert!((e[(0, 0)] - Complex::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_log_roundtrip_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2, 3, 6] {
            let k0 = random_skew::<f64, _>(n, 1.2, &mut rng);
            let w = unitary_exp(&k0, 1.0, &tol()).unwrap();
            let k = principal_skew_log(&w, &tol()).unwrap();
            let back = unitary_exp(&k, 1.0, &tol()).unwrap();
            assert!((&back - &w).frobenius_norm() < 1e-12);
            let bound = std::f64::consts::FRAC_PI_2 * opnorm(&(&CMatrix::identity(n) - &w));
            assert!(opnorm(&k) <= bound + 1e-12);
            assert_eq!(k.adjoint(), -&k);
        }
    }

    #[test]
    fn chord_bound_on_partial_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let k = random_skew::<f64, _>(5, 2.0, &mut rng);
        let g = SkewGenerator::new(&k, &tol()).unwrap();
        let t = 0.37;
        let u = g.exp(t);
        let dist = opnorm(&(&CMatrix::identity(5) - &u));
        assert!(dist <= chord(t * g.norm()) + 1e-12);
        assert!(u.unitarity_defect().frobenius_norm() < 1e-12);
    }

    #[test]
    fn log_of_random_unitary_in_right_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let q = random_unitary::<f64, _>(4, &mut rng);
        let d = CMatrix::from_diag(&[
            Complex::from_polar(1.0, 0.3),
            Complex::from_polar(1.0, -1.2),
            Complex::from_polar(1.0, 1.4),
            Complex::from_polar(1.0, 0.0),
        ]);
        let w = d.conjugate_by(&q);
        let k = principal_skew_log(&w, &tol()).unwrap();
        assert!((opnorm(&k) - 1.4).abs() < 1e-12);
    }
}
