use num_complex::Complex;

use super::eigen::jacobi_params;
use super::matrix::{dot, vnorm, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::{czero, lit, Real};

const MAX_SWEEPS: usize = 60;

/// Polar decomposition `A = V R` with `V` unitary and `R` positive
/// semidefinite.
///
/// Computed from a one-sided Jacobi SVD `A = U Σ W^*` as `V = U W^*`,
/// `R = W Σ W^*`. When `A` is singular the left singular vectors of the
/// null space are completed by Gram–Schmidt over the standard basis in
/// index order, so `V` is deterministic.
pub fn polar_decompose<T: Real>(a: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let (u, sigma, w) = one_sided_svd(a);
    let ucols = complete_basis(n, &u, &sigma);
    let umat = CMatrix::from_fn(n, |i, j| ucols[j][i]);
    let wmat = CMatrix::from_fn(n, |i, j| w[j][i]);
    let v = umat.mul_adjoint(&wmat);
    let ws = CMatrix::from_fn(n, |i, j| w[j][i] * sigma[j]);
    let mut r = ws.mul_adjoint(&wmat);
    r.hermitize();
    Ok((v, r))
}

/// Returns columns `A W`, their norms, and the columns of `W`.
fn one_sided_svd<T: Real>(a: &CMatrix<T>) -> (Vec<CVector<T>>, Vec<T>, Vec<CVector<T>>) {
    let n = a.dim();
    let mut cols = a.columns();
    let mut w: Vec<CVector<T>> = (0..n)
        .map(|j| {
            let mut e = vec![czero::<T>(); n];
            e[j] = Complex::new(T::one(), T::zero());
            e
        })
        .collect();
    let thresh = T::epsilon() * lit(n.max(1) as f64);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]).re;
                let beta = dot(&cols[q], &cols[q]).re;
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.norm() <= thresh * (alpha * beta).sqrt() {
                    continue;
                }
                let Some((c, s, u)) = jacobi_params(alpha, beta, gamma) else {
                    continue;
                };
                rotated = true;
                let ub = u.conj();
                let (lo, hi) = cols.split_at_mut(q);
                rotate_pair(&mut lo[p], &mut hi[0], c, s, ub);
                let (lo, hi) = w.split_at_mut(q);
                rotate_pair(&mut lo[p], &mut hi[0], c, s, ub);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| vnorm(c)).collect();
    (cols, sigma, w)
}

fn rotate_pair<T: Real>(x: &mut [Complex<T>], y: &mut [Complex<T>], c: T, s: T, ub: Complex<T>) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = xa * c - ub * yb * s;
        *b = xa * s + ub * yb * c;
    }
}

/// Normalises the columns with non-negligible singular value and fills the
/// rest with an orthonormal completion.
fn complete_basis<T: Real>(n: usize, cols: &[CVector<T>], sigma: &[T]) -> Vec<CVector<T>> {
    let smax = sigma.iter().fold(T::zero(), |m, &s| m.max(s));
    let cut = smax * T::epsilon() * lit(n.max(1) as f64);
    let mut out: Vec<Option<CVector<T>>> = vec![None; n];
    let mut basis: Vec<CVector<T>> = Vec::with_capacity(n);
    for j in 0..n {
        if sigma[j] > cut && sigma[j] > T::zero() {
            let v: CVector<T> = cols[j].iter().map(|z| z / sigma[j]).collect();
            basis.push(v.clone());
            out[j] = Some(v);
        }
    }
    let mut candidate = 0;
    for slot in out.iter_mut() {
        if slot.is_some() {
            continue;
        }
        while candidate < n {
            let mut e = vec![czero::<T>(); n];
            e[candidate] = Complex::new(T::one(), T::zero());
            candidate += 1;
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &e);
                    for (x, y) in e.iter_mut().zip(b) {
                        *x -= proj * y;
                    }
                }
            }
            let nrm = vnorm(&e);
            if nrm > lit::<T>(0.5) / lit::<T>(n as f64).sqrt() {
                let v: CVector<T> = e.iter().map(|z| z / nrm).collect();
                basis.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    out.into_iter().map(|v| v.expect("orthonormal completion exists")).collect()
}
