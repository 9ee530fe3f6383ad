//! Grid quantisation of joint spectra: clustered approximants with
//! dimension-independent minimal polynomials, and grid retractions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::joint::spectrum::spectrum_unchecked;
use crate::joint::{JointSpectrum, DEFAULT_SEED};
use crate::linalg::CMatrix;
use crate::poly::MonicPoly;
use crate::scalar::{lit, to_f64, Real};
use crate::sets::{check_membership, SetFamily};
use crate::tolerance::ToleranceConfig;
use crate::tuple::{metric, MatrixTuple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform tiling of `[-1, 1]` into `⌈2/δ⌉` cells, the last one closed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    delta: T,
    cells: usize,
    width: T,
}

impl<T: Real> Grid<T> {
    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells == 0
    }

    pub fn width(&self) -> T {
        self.width
    }

    /// Cell boundaries `-1 = x_0 < x_1 < … < x_N = 1`.
    pub fn points(&self) -> Vec<T> {
        (0..=self.cells)
            .map(|k| {
                if k == self.cells {
                    T::one()
                } else {
                    -T::one() + self.width * lit(k as f64)
                }
            })
            .collect()
    }

    /// Cells as `(lo, hi)` pairs; all are half open except the last.
    pub fn cells(&self) -> Vec<(T, T)> {
        let p = self.points();
        p.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn midpoint(&self, k: usize) -> T {
        -T::one() + self.width * (lit::<T>(k as f64) + lit(0.5))
    }

    pub fn midpoints(&self) -> Vec<T> {
        (0..self.cells).map(|k| self.midpoint(k)).collect()
    }

    /// Index of the cell containing `x` (clamped to `[-1, 1]`).
    pub fn cell_of(&self, x: T) -> usize {
        let x = x.max(-T::one()).min(T::one());
        let k = ((x + T::one()) / self.width).floor().to_usize().unwrap_or(0);
        k.min(self.cells - 1)
    }

    /// Midpoint of the cell containing `x`.
    pub fn quantize(&self, x: T) -> T {
        self.midpoint(self.cell_of(x))
    }
}

/// Grid of cell width at most `delta`.
pub fn build_grid<T: Real>(delta: T) -> Result<Grid<T>> {
    if !(delta > T::zero()) || delta > lit(2.0) || !delta.is_finite() {
        return Err(Error::BadDelta(to_f64(delta)));
    }
    // shave a few ulps so that 2/δ landing just above an integer does not add a cell
    let ratio = lit::<T>(2.0) / delta * (T::one() - lit::<T>(4.0) * T::epsilon());
    let cells = ratio.ceil().to_usize().unwrap_or(1).max(1);
    let width = lit::<T>(2.0) / lit(cells as f64);
    Ok(Grid { delta, cells, width })
}

/// Midpoint of the cell containing `x`; `x` is clamped to `[-1, 1]`.
pub fn quantize_scalar<T: Real>(g: &Grid<T>, x: T) -> T {
    g.quantize(x)
}

/// Clustered approximant with its per-component minimal polynomials.
#[derive(Clone, Debug)]
pub struct CpaResult<T> {
    pub approximant: MatrixTuple<T>,
    pub minimal_polys: Vec<MonicPoly<T>>,
    pub delta_used: T,
    pub achieved_distance: T,
}

impl<T: Real> CpaResult<T> {
    pub fn max_degree(&self) -> usize {
        self.minimal_polys.iter().map(|p| p.degree()).max().unwrap_or(0)
    }
}

fn spectrum_of<T: Real>(x: &MatrixTuple<T>) -> JointSpectrum<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    spectrum_unchecked(x, &mut rng)
}

fn distinct<T: Real>(vals: impl IntoIterator<Item = Complex<T>>, tol: T) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = Vec::new();
    for v in vals {
        if !out.iter().any(|u| (*u - v).norm() <= tol) {
            out.push(v);
        }
    }
    out
}

fn rebuild<T: Real>(s: &JointSpectrum<T>, rows: &[Vec<Complex<T>>], hermitian: bool) -> Vec<CMatrix<T>> {
    let n = s.n();
    (0..rows[0].len())
        .map(|j| {
            let sc = CMatrix::from_fn(n, |r, c| s.q[(r, c)] * rows[c][j]);
            let mut a = sc.mul_adjoint(&s.q);
            if hermitian {
                a.hermitize();
            }
            a
        })
        .collect()
}

fn assemble<T: Real>(
    x: &MatrixTuple<T>,
    mats: Vec<CMatrix<T>>,
    rows: &[Vec<Complex<T>>],
    delta: T,
    tol: &ToleranceConfig<T>,
) -> Result<CpaResult<T>> {
    let approximant = MatrixTuple::new(mats)?;
    let minimal_polys = (0..x.m())
        .map(|j| MonicPoly { roots: distinct(rows.iter().map(|r| r[j]), tol.tol_cluster) })
        .collect();
    let achieved_distance = metric(x, &approximant)?;
    Ok(CpaResult { approximant, minimal_polys, delta_used: delta, achieved_distance })
}

/// `X̃_j = p̂(X_j)` with `p̂` the grid-midpoint quantiser, applied to joint
/// eigenvalues through one shared diagonaliser.
///
/// If every eigenvalue is already within `tol_recon` of its midpoint the
/// input is returned unchanged, so the map is idempotent bit for bit.
pub fn cpa_hermitian<T: Real>(x: &MatrixTuple<T>, delta: T, tol: &ToleranceConfig<T>) -> Result<CpaResult<T>> {
    let grid = build_grid(delta)?;
    let report = check_membership(x, SetFamily::Cube, None, tol)?;
    if !report.in_set {
        return Err(Error::NotInCube(format!("{:?}", report.offending_indices)));
    }
    let s = spectrum_of(x);
    let rows: Vec<Vec<Complex<T>>> = s
        .lambda
        .iter()
        .map(|r| r.iter().map(|z| Complex::new(grid.quantize(z.re), T::zero())).collect())
        .collect();
    let moved = s
        .lambda
        .iter()
        .zip(&rows)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (*u - *v).norm()))
        .fold(T::zero(), T::max);
    let mats = if moved <= tol.tol_recon { x.components().to_vec() } else { rebuild(&s, &rows, true) };
    assemble(x, mats, &rows, delta, tol)
}

/// Quantises the real and imaginary parts of the joint eigenvalues on the
/// grid of spacing `δ/2`, then clamps quantised values of modulus above one
/// back onto the unit circle.
///
/// A component whose real or imaginary part vanishes identically keeps that
/// part at zero, so hermitian inputs reproduce [`cpa_hermitian`] at `δ/2`.
pub fn cpa_normal<T: Real>(x: &MatrixTuple<T>, delta: T, tol: &ToleranceConfig<T>) -> Result<CpaResult<T>> {
    if !(delta > T::zero()) || delta > lit(2.0) {
        return Err(Error::BadDelta(to_f64(delta)));
    }
    let grid = build_grid(delta * lit(0.5))?;
    let report = check_membership(x, SetFamily::Disk, None, tol)?;
    if !report.in_set {
        return Err(Error::NotInDisk(format!("{:?}", report.offending_indices)));
    }
    let zero_re: Vec<bool> = x.iter().map(|a| a.hermitian_part().max_abs() == T::zero()).collect();
    let zero_im: Vec<bool> = x.iter().map(|a| a.imaginary_part().max_abs() == T::zero()).collect();
    let s = spectrum_of(x);
    let rows: Vec<Vec<Complex<T>>> = s
        .lambda
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(j, z)| {
                    let re = if zero_re[j] { T::zero() } else { grid.quantize(z.re) };
                    let im = if zero_im[j] { T::zero() } else { grid.quantize(z.im) };
                    let q = Complex::new(re, im);
                    let r = q.norm();
                    if r > T::one() {
                        q / r
                    } else {
                        q
                    }
                })
                .collect()
        })
        .collect();
    let moved = s
        .lambda
        .iter()
        .zip(&rows)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (*u - *v).norm()))
        .fold(T::zero(), T::max);
    let all_real = zero_im.iter().all(|&z| z);
    let mats = if moved <= tol.tol_recon { x.components().to_vec() } else { rebuild(&s, &rows, all_real) };
    assemble(x, mats, &rows, delta, tol)
}

/// Replaces every joint eigenvalue by its nearest target value (ties to the
/// smaller one). Targets must avoid the source grid's cell boundaries.
pub fn retract_to_grid<T: Real>(
    x: &MatrixTuple<T>,
    source: &Grid<T>,
    target: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<MatrixTuple<T>> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let pts = source.points();
    for &t in target {
        if !t.is_finite() {
            return Err(Error::NonFinite);
        }
        if pts.iter().any(|&p| (p - t).abs() <= tol.tol_cluster) {
            return Err(Error::TargetOnGrid(to_f64(t)));
        }
    }
    let report = check_membership(x, SetFamily::Cube, None, tol)?;
    if !report.in_set {
        return Err(Error::NotInCube(format!("{:?}", report.offending_indices)));
    }
    let mut sorted_targets = target.to_vec();
    sorted_targets.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let nearest = |v: T| {
        let mut best = sorted_targets[0];
        for &t in &sorted_targets[1..] {
            // strict: equal distances keep the smaller target
            if (t - v).abs() < (best - v).abs() {
                best = t;
            }
        }
        best
    };
    let s = spectrum_of(x);
    let rows: Vec<Vec<Complex<T>>> = s
        .lambda
        .iter()
        .map(|r| r.iter().map(|z| Complex::new(nearest(z.re), T::zero())).collect())
        .collect();
    MatrixTuple::new(rebuild(&s, &rows, true))
}
