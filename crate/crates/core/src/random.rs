//! Seeded generators for test instances: unitaries from Givens products,
//! random hermitian and skew matrices, and tuples with prescribed joint
//! spectra.

use num_complex::Complex;
use rand::Rng;

use crate::linalg::{opnorm, CMatrix, SkewGenerator};
use crate::poly::ZeroSet;
use crate::scalar::{lit, Real};
use crate::tuple::MatrixTuple;

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    lit(rng.gen_range(lo..hi))
}

/// Haar-like unitary: two sweeps of random complex Givens rotations over
/// every coordinate pair, then random diagonal phases.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let mut u = CMatrix::<T>::identity(n);
    for _ in 0..2 {
        for p in 0..n {
            for q in (p + 1)..n {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let (s, c) = th.sin_cos();
                let (c, s) = (lit::<T>(c), lit::<T>(s));
                let e = Complex::from_polar(T::one(), lit(ph));
                // rows p, q of G U with G = [[c, -s e], [s conj(e), c]]
                for j in 0..n {
                    let x = u[(p, j)];
                    let y = u[(q, j)];
                    u[(p, j)] = x * c - e * y * s;
                    u[(q, j)] = e.conj() * x * s + y * c;
                }
            }
        }
    }
    for i in 0..n {
        let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let e = Complex::from_polar(T::one(), lit(ph));
        for j in 0..n {
            u[(i, j)] *= e;
        }
    }
    u
}

/// Matrix with entries uniform in the square `[-1, 1] + i[-1, 1]`.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(n, |_, _| Complex::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)))
}

/// Hermitian part of [`random_matrix`].
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let mut h = random_matrix(n, rng);
    h.hermitize();
    h
}

/// Skew-hermitian matrix of operator norm `norm`.
pub fn random_skew<T: Real, R: Rng + ?Sized>(n: usize, norm: T, rng: &mut R) -> CMatrix<T> {
    let h = random_hermitian::<T, R>(n, rng);
    let s = opnorm(&h);
    if s == T::zero() {
        return CMatrix::zeros(n);
    }
    let mut k = h.scale(Complex::new(T::zero(), norm / s));
    k.skew_hermitize();
    k
}

/// `e^K` for a random skew `K` with `‖K‖ = norm`.
pub fn random_unitary_near_identity<T: Real, R: Rng + ?Sized>(n: usize, norm: T, rng: &mut R) -> CMatrix<T> {
    let k = random_skew(n, norm, rng);
    let tol = crate::tolerance::ToleranceConfig::for_precision();
    SkewGenerator::new(&k, &tol).expect("skew by construction").exp(T::one())
}

/// `Q diag(rows) Q^*` per component for a random unitary `Q`.
pub fn tuple_with_spectrum<T: Real, R: Rng + ?Sized>(rows: &[Vec<Complex<T>>], rng: &mut R) -> MatrixTuple<T> {
    let n = rows.len();
    let m = rows[0].len();
    let q = random_unitary(n, rng);
    let mats = (0..m)
        .map(|j| {
            let d: Vec<Complex<T>> = rows.iter().map(|r| r[j]).collect();
            let mut a = CMatrix::from_diag(&d).conjugate_by(&q);
            if d.iter().all(|z| z.im == T::zero()) {
                a.hermitize();
            }
            a
        })
        .collect();
    MatrixTuple::from_vec_unchecked(mats)
}

/// Random member of the algebraic set of `z`: joint eigenvalues drawn from
/// the points of `z` with replacement.
pub fn random_zero_set_tuple<T: Real, R: Rng + ?Sized>(z: &ZeroSet<T>, n: usize, rng: &mut R) -> MatrixTuple<T> {
    let rows: Vec<Vec<Complex<T>>> = (0..n).map(|_| z.points()[rng.gen_range(0..z.len())].clone()).collect();
    tuple_with_spectrum(&rows, rng)
}

/// Random member of the matrix cube with joint eigenvalues uniform in `[-1, 1]^m`.
pub fn random_cube_tuple<T: Real, R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> MatrixTuple<T> {
    let rows: Vec<Vec<Complex<T>>> = (0..n)
        .map(|_| (0..m).map(|_| Complex::new(uniform(rng, -1.0, 1.0), T::zero())).collect())
        .collect();
    tuple_with_spectrum(&rows, rng)
}

/// Random member of the matrix disk with joint eigenvalues uniform in the unit disk.
pub fn random_disk_tuple<T: Real, R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> MatrixTuple<T> {
    let rows: Vec<Vec<Complex<T>>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.0f64..1.0).sqrt();
                    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    Complex::from_polar(lit(r), lit(th))
                })
                .collect()
        })
        .collect();
    tuple_with_spectrum(&rows, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary_and_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary::<f64, _>(7, &mut a);
        assert!(u.unitarity_defect().frobenius_norm() < 1e-13);
        assert_eq!(u, random_unitary::<f64, _>(7, &mut b));
    }

    #[test]
    fn skew_has_requested_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = random_skew::<f64, _>(5, 0.1, &mut rng);
        assert!((opnorm(&k) - 0.1).abs() < 1e-14);
        assert_eq!(k.adjoint(), -&k);
    }
}
