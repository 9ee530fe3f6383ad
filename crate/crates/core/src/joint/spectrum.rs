use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, norm_upper, CMatrix};
use crate::poly::{lex_cmp, point_distance};
use crate::scalar::{creal, lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::{partition, MatrixTuple};

/// Seed of the generator behind [`joint_diagonalize`].
pub const DEFAULT_SEED: u64 = 0x6a6f_696e_7464_6961;

/// Relative eigenvalue gap separating clusters of the random combination.
const SPLIT_GAP: f64 = 1e-4;

/// Joint diagonaliser `Q` and joint eigenvalue rows `λ[k] = Λ^{(k)}`.
#[derive(Clone, Debug)]
pub struct JointSpectrum<T> {
    pub q: CMatrix<T>,
    /// `n` rows of `m` joint eigenvalues, sorted lexicographically.
    pub lambda: Vec<Vec<Complex<T>>>,
}

impl<T: Real> JointSpectrum<T> {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn m(&self) -> usize {
        self.lambda.first().map_or(0, |r| r.len())
    }

    /// `Q diag(λ_{·,j}) Q^*`.
    pub fn reconstruct(&self, j: usize) -> CMatrix<T> {
        let n = self.n();
        let s = CMatrix::from_fn(n, |r, c| self.q[(r, c)] * self.lambda[c][j]);
        s.mul_adjoint(&self.q)
    }

    /// Column `k` of `Q`.
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.q.column(k)
    }

    /// Spectrum of the single component `j`, rows re-sorted.
    pub fn component(&self, j: usize) -> JointSpectrum<T> {
        let rows: Vec<Vec<Complex<T>>> = self.lambda.iter().map(|r| vec![r[j]]).collect();
        sorted(self.q.clone(), rows)
    }

    /// `max_j ‖Q^* X_j Q − diag(λ_{·,j})‖_F`.
    pub fn residual(&self, x: &MatrixTuple<T>) -> T {
        (0..x.m())
            .map(|j| (&self.reconstruct(j) - x.get(j)).frobenius_norm())
            .fold(T::zero(), T::max)
    }
}

/// Simultaneous diagonalisation of a commuting family of normal matrices,
/// using the crate's default seed for the random combination.
pub fn joint_diagonalize<T: Real>(
    x: &MatrixTuple<T>,
    tol: &ToleranceConfig<T>,
) -> Result<JointSpectrum<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    joint_diagonalize_with_rng(x, tol, &mut rng)
}

/// As [`joint_diagonalize`] with an explicit generator.
pub fn joint_diagonalize_with_rng<T: Real, R: Rng + ?Sized>(
    x: &MatrixTuple<T>,
    tol: &ToleranceConfig<T>,
    rng: &mut R,
) -> Result<JointSpectrum<T>> {
    check_commuting_normal(x, tol)?;
    Ok(spectrum_unchecked(x, rng))
}

pub(crate) fn check_commuting_normal<T: Real>(x: &MatrixTuple<T>, tol: &ToleranceConfig<T>) -> Result<()> {
    for (j, a) in x.iter().enumerate() {
        let gate = tol.tol_member * T::one().max(a.frobenius_norm());
        let r = norm_upper(&a.normality_defect(), gate);
        if r > gate {
            log::debug!("component {j} fails normality");
            return Err(Error::NotNormal { residual: to_f64(r) });
        }
    }
    for j in 0..x.m() {
        for k in (j + 1)..x.m() {
            let r = norm_upper(&x.get(j).commutator(x.get(k)), tol.tol_commute);
            if r > tol.tol_commute {
                return Err(Error::NotCommuting { residual: to_f64(r) });
            }
        }
    }
    Ok(())
}

pub(crate) fn spectrum_unchecked<T: Real, R: Rng + ?Sized>(x: &MatrixTuple<T>, rng: &mut R) -> JointSpectrum<T> {
    let parts = partition(x);
    let q = joint_basis(parts.components(), rng);
    spectrum_in_basis(x, q)
}

/// Diagonal entries of `Q^* X_j Q`, sorted.
pub(crate) fn spectrum_in_basis<T: Real>(x: &MatrixTuple<T>, q: CMatrix<T>) -> JointSpectrum<T> {
    let n = x.n();
    let mut rows = vec![Vec::with_capacity(x.m()); n];
    for a in x.iter() {
        let aq = a.matmul(&q);
        for (k, row) in rows.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                acc += q[(i, k)].conj() * aq[(i, k)];
            }
            row.push(acc);
        }
    }
    sorted(q, rows)
}

fn sorted<T: Real>(q: CMatrix<T>, rows: Vec<Vec<Complex<T>>>) -> JointSpectrum<T> {
    let n = rows.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lex_cmp(&rows[a], &rows[b]));
    let q = CMatrix::from_fn(n, |i, j| q[(i, order[j])]);
    let lambda = order.iter().map(|&k| rows[k].clone()).collect();
    JointSpectrum { q, lambda }
}

/// Unitary diagonalising every (exactly or nearly) commuting hermitian
/// component, seeded with [`DEFAULT_SEED`].
pub(crate) fn joint_basis_default<T: Real>(comps: &[CMatrix<T>]) -> CMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    joint_basis(comps, &mut rng)
}

/// Diagonalises a random real combination of the components, then recurses
/// into every cluster of its eigenvalues with the components restricted to
/// that eigenspace.
pub(crate) fn joint_basis<T: Real, R: Rng + ?Sized>(comps: &[CMatrix<T>], rng: &mut R) -> CMatrix<T> {
    let n = comps[0].dim();
    let scale = comps.iter().map(|c| c.frobenius_norm()).fold(T::zero(), T::max);
    let floor = lit::<T>(64.0) * T::epsilon() * lit(n as f64) * scale.max(T::min_positive_value());
    let cols = refine(comps.to_vec(), floor, rng);
    CMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Returns an orthonormal eigenbasis (as columns) for the hermitian
/// `comps`, all of the same dimension `k`.
fn refine<T: Real, R: Rng + ?Sized>(comps: Vec<CMatrix<T>>, floor: T, rng: &mut R) -> Vec<Vec<Complex<T>>> {
    let k = comps[0].dim();
    let unit = |j: usize| {
        let mut e = vec![Complex::new(T::zero(), T::zero()); k];
        e[j] = Complex::new(T::one(), T::zero());
        e
    };
    if k == 1 {
        return vec![unit(0)];
    }
    let centered: Vec<CMatrix<T>> = comps
        .iter()
        .map(|c| c.add_scalar(creal(-c.trace().re / lit(k as f64))))
        .collect();
    let spread = centered.iter().map(|c| c.frobenius_norm()).fold(T::zero(), T::max);
    if spread <= floor {
        return (0..k).map(unit).collect();
    }
    for _attempt in 0..4 {
        let mut h = CMatrix::zeros(k);
        for c in &centered {
            let w: f64 = rng.gen_range(-1.0..1.0);
            h = h.axpy(creal(lit::<T>(w) / spread), c);
        }
        h.hermitize();
        let e = jacobi_eigen(h);
        let lo = e.eigenvalues[0];
        let hi = e.eigenvalues[k - 1];
        let range = hi - lo;
        // a cancelling combination; draw again
        if range <= floor / spread {
            continue;
        }
        let gap = range * lit(SPLIT_GAP);
        let mut groups: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..k {
            if e.eigenvalues[i] - e.eigenvalues[i - 1] > gap {
                groups.push(Vec::new());
            }
            groups.last_mut().expect("nonempty").push(i);
        }
        let mut out = Vec::with_capacity(k);
        for g in groups {
            let basis: Vec<Vec<Complex<T>>> = g.iter().map(|&i| e.q.column(i)).collect();
            if basis.len() == 1 {
                out.extend(basis);
                continue;
            }
            let sub: Vec<CMatrix<T>> = comps
                .iter()
                .map(|c| {
                    let mut s = c.compress(&basis);
                    s.hermitize();
                    s
                })
                .collect();
            for v in refine(sub, floor, rng) {
                let mut col = vec![Complex::new(T::zero(), T::zero()); k];
                for (b, &coef) in basis.iter().zip(&v) {
                    for (x, y) in col.iter_mut().zip(b) {
                        *x += *y * coef;
                    }
                }
                out.push(col);
            }
        }
        return out;
    }
    (0..k).map(unit).collect()
}

/// Projector onto the joint eigenvectors whose rows lie within `tol_cluster`
/// of row `r`.
pub fn joint_spectral_projector<T: Real>(
    s: &JointSpectrum<T>,
    r: usize,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    if r >= s.n() {
        return Err(Error::IndexOutOfRange { index: r, len: s.n() });
    }
    let cols: Vec<Vec<Complex<T>>> = (0..s.n())
        .filter(|&k| point_distance(&s.lambda[k], &s.lambda[r]) <= tol.tol_cluster)
        .map(|k| s.vector(k))
        .collect();
    Ok(CMatrix::projector_from_columns(s.n(), &cols))
}
