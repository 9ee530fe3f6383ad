use num_complex::Complex;

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Spectral norm `‖A‖ = σ_max(A)`.
pub fn operator_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(opnorm(a))
}

/// Unchecked spectral norm.
///
/// Hermitian inputs (up to rounding in the skew part) go straight to a
/// tridiagonal reduction; everything else goes through `A^* A`.
pub(crate) fn opnorm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    if n == 0 {
        return T::zero();
    }
    if n == 1 {
        return a[(0, 0)].norm();
    }
    let fro = a.frobenius_norm();
    if fro == T::zero() {
        return T::zero();
    }
    let skew = a.skew_part().frobenius_norm();
    if skew <= T::epsilon() * lit(4.0) * fro {
        let (lo, hi) = extreme_eigenvalues(&a.hermitian_part());
        return lo.abs().max(hi.abs());
    }
    let herm = a.imaginary_part().frobenius_norm();
    if herm <= T::epsilon() * lit(4.0) * fro {
        // skew-hermitian: ‖A‖ = ‖A/i‖
        let (lo, hi) = extreme_eigenvalues(&a.imaginary_part());
        return lo.abs().max(hi.abs());
    }
    let mut g = a.adjoint_mul(a);
    g.hermitize();
    let (_, hi) = extreme_eigenvalues(&g);
    hi.max(T::zero()).sqrt()
}

/// Upper bound on `‖A‖` that is exact whenever it matters for a gate:
/// returns the Frobenius norm when it already clears `gate`, otherwise
/// the spectral norm.
pub(crate) fn norm_upper<T: Real>(a: &CMatrix<T>, gate: T) -> T {
    let f = a.frobenius_norm();
    if f <= gate {
        f
    } else {
        opnorm(a)
    }
}

/// Smallest and largest eigenvalue of an exactly hermitian matrix.
pub(crate) fn extreme_eigenvalues<T: Real>(h: &CMatrix<T>) -> (T, T) {
    let (d, e) = tridiagonalize(h);
    let lo = bisect_eigenvalue(&d, &e, 0);
    let hi = bisect_eigenvalue(&d, &e, d.len() - 1);
    (lo, hi)
}

/// Householder reduction of a hermitian matrix to a real symmetric
/// tridiagonal with diagonal `d` and off-diagonal magnitudes `e`.
fn tridiagonalize<T: Real>(h: &CMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = h.dim();
    // separate real and imaginary planes so the O(n²) inner loops vectorise
    let mut ar: Vec<T> = h.as_slice().iter().map(|z| z.re).collect();
    let mut ai: Vec<T> = h.as_slice().iter().map(|z| z.im).collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n.saturating_sub(1)];
    let (mut vr, mut vi) = (vec![T::zero(); n], vec![T::zero(); n]);
    let (mut pr, mut pi) = (vec![T::zero(); n], vec![T::zero(); n]);
    for k in 0..n.saturating_sub(1) {
        d[k] = ar[k * n + k];
        let m = n - k - 1;
        let base = k + 1;
        let mut xnorm2 = T::zero();
        for i in 0..m {
            let at = (base + i) * n + k;
            xnorm2 += ar[at] * ar[at] + ai[at] * ai[at];
        }
        let xnorm = xnorm2.sqrt();
        e[k] = xnorm;
        if m == 1 {
            continue;
        }
        let x0 = Complex::new(ar[base * n + k], ai[base * n + k]);
        let x0n = x0.norm();
        let tail = xnorm2 - x0n * x0n;
        if tail <= T::epsilon() * T::epsilon() * xnorm2 || xnorm == T::zero() {
            // already tridiagonal in this column
            continue;
        }
        let phase = if x0n == T::zero() { Complex::new(T::one(), T::zero()) } else { x0 / x0n };
        let alpha = -phase * xnorm;
        for i in 0..m {
            vr[i] = ar[(base + i) * n + k];
            vi[i] = ai[(base + i) * n + k];
        }
        vr[0] -= alpha.re;
        vi[0] -= alpha.im;
        let vnorm2: T = (0..m).map(|i| vr[i] * vr[i] + vi[i] * vi[i]).sum();
        let tau = lit::<T>(2.0) / vnorm2;
        // p = tau A22 v, accumulated as (A v)_j = Σ_i conj(a_ij) v_i over rows
        pr[..m].iter_mut().for_each(|x| *x = T::zero());
        pi[..m].iter_mut().for_each(|x| *x = T::zero());
        for i in 0..m {
            let off = (base + i) * n + base;
            let (xr, xi) = (vr[i], vi[i]);
            for (((p_r, p_i), &a_r), &a_i) in pr[..m].iter_mut().zip(&mut pi[..m]).zip(&ar[off..off + m]).zip(&ai[off..off + m]) {
                *p_r = *p_r + a_r * xr + a_i * xi;
                *p_i = *p_i + a_r * xi - a_i * xr;
            }
        }
        for i in 0..m {
            pr[i] = pr[i] * tau;
            pi[i] = pi[i] * tau;
        }
        // kk = (tau/2) v^* p, real for hermitian A22
        let vp: T = (0..m).map(|i| vr[i] * pr[i] + vi[i] * pi[i]).sum();
        let kk = vp * tau * lit(0.5);
        for i in 0..m {
            pr[i] -= vr[i] * kk;
            pi[i] -= vi[i] * kk;
        }
        // A22 -= v q^* + q v^*
        for i in 0..m {
            let (a_r, a_i, q_r, q_i) = (vr[i], vi[i], pr[i], pi[i]);
            let off = (base + i) * n + base;
            let rows = ar[off..off + m].iter_mut().zip(&mut ai[off..off + m]);
            let vecs = pr[..m].iter().zip(&pi[..m]).zip(vr[..m].iter().zip(&vi[..m]));
            for ((x_r, x_i), ((&p_r, &p_i), (&v_r, &v_i))) in rows.zip(vecs) {
                *x_r = *x_r - (a_r * p_r + a_i * p_i + q_r * v_r + q_i * v_i);
                *x_i = *x_i - (a_i * p_r - a_r * p_i + q_i * v_r - q_r * v_i);
            }
        }
    }
    d[n - 1] = ar[(n - 1) * n + n - 1];
    (d, e)
}

/// Number of eigenvalues of the tridiagonal `(d, e)` strictly below `x`.
fn sturm_count<T: Real>(d: &[T], e: &[T], x: T) -> usize {
    let tiny = T::min_positive_value();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..d.len() {
        let qq = if q.abs() < tiny { tiny } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / qq;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue of the tridiagonal `(d, e)` by bisection.
fn bisect_eigenvalue<T: Real>(d: &[T], e: &[T], k: usize) -> T {
    let n = d.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { T::zero() } + if i + 1 < n { e[i] } else { T::zero() };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs());
    if scale == T::zero() {
        return T::zero();
    }
    let slack = scale * T::epsilon() * lit(4.0);
    lo = lo - slack;
    hi = hi + slack;
    for _ in 0..200 {
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi || hi - lo <= scale * T::epsilon() {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + (hi - lo) * lit(0.5)
}
