use num_complex::Complex;

use crate::error::{Error, Result};
use crate::joint::opu::projective_polar_unchecked;
use crate::joint::Opu;
use crate::linalg::{norm_upper, opnorm, CMatrix};
use crate::scalar::{cone, lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::MatrixTuple;

/// Unitary `Z` commuting with the partition, with the constant of the
/// almost-unit bound `‖1 − WZ‖ ≤ C ‖W D W^* − D‖`.
#[derive(Clone, Debug)]
pub struct CorrectionResult<T> {
    pub z: CMatrix<T>,
    pub bound_constant: T,
    /// `‖W D W^* − D‖`, or its maximum over a family.
    pub residual: T,
    /// `‖1 − WZ‖`.
    pub achieved: T,
    /// Residuals at or above this are outside the lemma's hypotheses.
    pub threshold: T,
}

impl<T: Real> CorrectionResult<T> {
    /// `achieved ≤ C · residual + tol_recon`.
    pub fn bound_holds(&self, tol: &ToleranceConfig<T>) -> bool {
        self.achieved <= self.bound_constant * self.residual + tol.tol_recon
    }

    /// `achieved / residual`, zero when both vanish.
    pub fn measured_ratio(&self) -> T {
        if self.residual > T::zero() {
            self.achieved / self.residual
        } else if self.achieved > T::zero() {
            T::infinity()
        } else {
            T::zero()
        }
    }

    pub fn applicable(&self) -> bool {
        self.residual < self.threshold
    }
}

fn check_unitary<T: Real>(w: &CMatrix<T>, tol: &ToleranceConfig<T>) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = norm_upper(&w.unitarity_defect(), tol.tol_unitary);
    if d > tol.tol_unitary {
        return Err(Error::NotUnitary { defect: to_f64(d) });
    }
    Ok(())
}

/// `3 r (r − 1) / s` for the distinct values in `alphas`; zero when there is
/// only one.
fn single_constant<T: Real>(alphas: &[Complex<T>], cluster: T) -> T {
    let mut distinct: Vec<Complex<T>> = Vec::new();
    for a in alphas {
        if !distinct.iter().any(|d| (*d - *a).norm() <= cluster) {
            distinct.push(*a);
        }
    }
    let r = distinct.len();
    if r < 2 {
        return T::zero();
    }
    let mut s = T::infinity();
    for i in 0..r {
        for j in (i + 1)..r {
            s = s.min((distinct[i] - distinct[j]).norm());
        }
    }
    lit::<T>(3.0 * (r * (r - 1)) as f64) / s
}

/// `‖Σ_j α_j P_j − D‖` gated like the other reconstruction checks.
fn check_span<T: Real>(d: &CMatrix<T>, opu: &Opu<T>, alphas: &[Complex<T>], tol: &ToleranceConfig<T>) -> Result<()> {
    let n = d.dim();
    let mut recon = CMatrix::zeros(n);
    for (j, a) in alphas.iter().enumerate() {
        recon = &recon + &CMatrix::from_columns_weighted(n, opu.basis(j), &vec![*a; opu.basis(j).len()]);
    }
    let gate = tol.tol_recon * T::one().max(d.frobenius_norm());
    let r = norm_upper(&(&recon - d), gate);
    if r > gate {
        return Err(Error::InvalidOpu(format!(
            "operand is not spanned by the partition (residual {:e})",
            to_f64(r)
        )));
    }
    Ok(())
}

/// Pinches `W` to `Σ P_j W P_j`, takes the unitary polar factor of each
/// block, and returns `Z = (Σ V_j)^*`.
pub(crate) fn pinch_polar<T: Real>(w: &CMatrix<T>, opu: &Opu<T>) -> CMatrix<T> {
    let n = w.dim();
    let mut v = CMatrix::zeros(n);
    for (vj, _) in projective_polar_unchecked(opu, w) {
        v = &v + &vj;
    }
    v.adjoint()
}

fn family_residual<T: Real>(w: &CMatrix<T>, ds: &[CMatrix<T>]) -> T {
    ds.iter()
        .map(|d| opnorm(&(&d.conjugate_by(w) - d)))
        .fold(T::zero(), T::max)
}

fn finish<T: Real>(w: &CMatrix<T>, z: CMatrix<T>, ds: &[CMatrix<T>], c: T, threshold: T) -> CorrectionResult<T> {
    let residual = family_residual(w, ds);
    let achieved = opnorm(&w.matmul(&z).scale(-cone::<T>()).add_scalar(cone()));
    CorrectionResult { z, bound_constant: c, residual, achieved, threshold }
}

/// Almost-unit correction for a single `D = Σ α_j P_j` given by a labelled
/// partition of unity. `Z` commutes with `D` and `‖1 − WZ‖ ≤ C ‖WDW^* − D‖`
/// with `C = 3r(r − 1)/s`, `s` the least gap between labels.
pub fn commuting_correction<T: Real>(
    w: &CMatrix<T>,
    d: &CMatrix<T>,
    opu: &Opu<T>,
    tol: &ToleranceConfig<T>,
) -> Result<CorrectionResult<T>> {
    check_unitary(w, tol)?;
    if w.dim() != d.dim() || opu.dim() != d.dim() {
        return Err(Error::ShapeMismatch("operand and partition dimensions differ".into()));
    }
    let alphas: Vec<Complex<T>> = match opu.labels() {
        Some(l) if l.iter().all(|x| x.len() == 1) => l.iter().map(|x| x[0]).collect(),
        _ => return Err(Error::InvalidOpu("expected one scalar label per projector".into())),
    };
    check_span(d, opu, &alphas, tol)?;
    let ds = std::slice::from_ref(d);
    if opu.len() == 1 {
        return Ok(finish(w, w.adjoint(), ds, T::zero(), T::infinity()));
    }
    let c = single_constant(&alphas, tol.tol_cluster);
    Ok(finish(w, pinch_polar(w, opu), ds, c, T::infinity()))
}

/// Block values `α_{k,j}` of every component on every projector: taken
/// from the labels when they have one entry per component, otherwise from
/// `tr(P_j D_k) / rank P_j`.
fn block_values<T: Real>(tuple: &MatrixTuple<T>, opu: &Opu<T>) -> Vec<Vec<Complex<T>>> {
    let m = tuple.m();
    if let Some(l) = opu.labels() {
        if l.iter().all(|x| x.len() == m) {
            return l.to_vec();
        }
    }
    (0..opu.len())
        .map(|j| {
            let b = opu.basis(j);
            let r = lit::<T>(b.len() as f64);
            tuple.iter().map(|d| d.compress(b).trace() / r).collect()
        })
        .collect()
}

/// `C = 2√2 m N max_k C_k` with `C_k = 3 r_k (r_k − 1)/s_k` per component,
/// and the smallness threshold `1 / (2 m max_k C_k)`.
pub(crate) fn refined_constant<T: Real>(values: &[Vec<Complex<T>>], m: usize, tol: &ToleranceConfig<T>) -> (T, T) {
    let big_n = values.len();
    let ck = (0..m)
        .map(|k| {
            let col: Vec<Complex<T>> = values.iter().map(|v| v[k]).collect();
            single_constant(&col, tol.tol_cluster)
        })
        .fold(T::zero(), T::max);
    let two = lit::<T>(2.0);
    let c = two * two.sqrt() * lit(m as f64) * lit(big_n as f64) * ck;
    let threshold = if ck > T::zero() { T::one() / (two * lit(m as f64) * ck) } else { T::infinity() };
    (c, threshold)
}

/// Refined almost-unit correction: `Z` commutes with every component of a
/// commuting family whose members are spanned by `refined`, and
/// `‖1 − WZ‖ ≤ C max_k ‖W D_k W^* − D_k‖` with `C = 2√2 m N max_k C_k`.
pub fn refined_commuting_correction<T: Real>(
    w: &CMatrix<T>,
    tuple: &MatrixTuple<T>,
    refined: &Opu<T>,
    tol: &ToleranceConfig<T>,
) -> Result<CorrectionResult<T>> {
    check_unitary(w, tol)?;
    if w.dim() != tuple.n() || refined.dim() != tuple.n() {
        return Err(Error::ShapeMismatch("operand and partition dimensions differ".into()));
    }
    let values = block_values(tuple, refined);
    for (k, d) in tuple.iter().enumerate() {
        let col: Vec<Complex<T>> = values.iter().map(|v| v[k]).collect();
        check_span(d, refined, &col, tol)?;
    }
    Ok(refined_unchecked(w, tuple, refined, &values, tol))
}

pub(crate) fn refined_unchecked<T: Real>(
    w: &CMatrix<T>,
    tuple: &MatrixTuple<T>,
    refined: &Opu<T>,
    values: &[Vec<Complex<T>>],
    tol: &ToleranceConfig<T>,
) -> CorrectionResult<T> {
    let (c, threshold) = refined_constant(values, tuple.m(), tol);
    let z = if refined.len() == 1 { w.adjoint() } else { pinch_polar(w, refined) };
    finish(w, z, tuple.components(), c, threshold)
}
