//! Sparse multivariate polynomials, their evaluation on commuting tuples,
//! validated finite zero sets, and the coordinate polynomials built from them.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cone, czero, lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::MatrixTuple;

/// Sparse polynomial in `nvars` variables, terms keyed by exponent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<T> {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex<T>)>,
}

impl<T: Real> MultiPoly<T> {
    /// Builds a polynomial, merging repeated exponents and dropping zero
    /// coefficients. Terms are kept in lexicographic exponent order.
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Complex<T>)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u32>, Complex<T>> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ShapeMismatch(format!(
                    "exponent vector of length {} for {nvars} variables",
                    e.len()
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite);
            }
            *merged.entry(e).or_insert_with(czero) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.re != T::zero() || c.im != T::zero())
            .collect();
        Ok(Self { nvars, terms })
    }

    /// The polynomial `x_k − a`.
    pub fn linear(nvars: usize, k: usize, a: Complex<T>) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self::new(nvars, vec![(e, cone()), (vec![0; nvars], -a)]).expect("well-formed")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex<T>)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at a point of `ℂ^m`.
    pub fn eval_point(&self, x: &[Complex<T>]) -> Complex<T> {
        self.terms.iter().fold(czero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(x)
                .fold(cone::<T>(), |p, (&k, &xi)| p * xi.powu(k));
            acc + *c * mono
        })
    }
}

/// Constraint system `p_1, …, p_r` over a common set of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPolySystem<T> {
    nvars: usize,
    polys: Vec<MultiPoly<T>>,
}

impl<T: Real> MultiPolySystem<T> {
    /// Every polynomial must have `nvars` variables and degree at least one.
    pub fn new(nvars: usize, polys: Vec<MultiPoly<T>>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::BadParameter("empty polynomial system".into()));
        }
        for (i, p) in polys.iter().enumerate() {
            if p.nvars != nvars {
                return Err(Error::ShapeMismatch(format!(
                    "polynomial {i} has {} variables, system has {nvars}",
                    p.nvars
                )));
            }
            if p.degree() == 0 {
                return Err(Error::BadParameter(format!("polynomial {i} is constant")));
            }
        }
        Ok(Self { nvars, polys })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[MultiPoly<T>] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `max_j |p_j(x)|`.
    pub fn residual_at(&self, x: &[Complex<T>]) -> T {
        self.polys.iter().map(|p| p.eval_point(x).norm()).fold(T::zero(), T::max)
    }
}

/// Caches matrix powers `X_j^e` while a system is evaluated.
struct Powers<'a, T> {
    x: &'a MatrixTuple<T>,
    cache: Vec<Vec<CMatrix<T>>>,
}

impl<'a, T: Real> Powers<'a, T> {
    fn new(x: &'a MatrixTuple<T>) -> Self {
        Self { x, cache: vec![Vec::new(); x.m()] }
    }

    /// `X_j^e` for `e >= 1`.
    fn get(&mut self, j: usize, e: u32) -> &CMatrix<T> {
        let e = e as usize;
        let c = &mut self.cache[j];
        if c.is_empty() {
            c.push(self.x.get(j).clone());
        }
        while c.len() < e {
            let next = c[c.len() - 1].matmul(self.x.get(j));
            c.push(next);
        }
        &c[e - 1]
    }
}

fn eval_with<T: Real>(p: &MultiPoly<T>, powers: &mut Powers<'_, T>, n: usize) -> CMatrix<T> {
    let mut out = CMatrix::zeros(n);
    for (e, c) in &p.terms {
        let mut mono: Option<CMatrix<T>> = None;
        for (j, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let f = powers.get(j, k);
            mono = Some(match mono {
                None => f.clone(),
                Some(acc) => acc.matmul(f),
            });
        }
        out = match mono {
            None => out.add_scalar(*c),
            Some(mm) => out.axpy(*c, &mm),
        };
    }
    out
}

/// `p(X_1, …, X_m)` with monomial factors taken in ascending variable order.
///
/// The result is only meaningful when the components commute; a warning is
/// logged otherwise.
pub fn eval_poly<T: Real>(p: &MultiPoly<T>, x: &MatrixTuple<T>) -> Result<CMatrix<T>> {
    if p.nvars != x.m() {
        return Err(Error::ShapeMismatch(format!(
            "polynomial in {} variables applied to a {}-tuple",
            p.nvars,
            x.m()
        )));
    }
    warn_if_noncommuting(x);
    let mut pw = Powers::new(x);
    Ok(eval_with(p, &mut pw, x.n()))
}

/// Evaluates every polynomial of a system, sharing matrix powers.
pub fn eval_system<T: Real>(s: &MultiPolySystem<T>, x: &MatrixTuple<T>) -> Result<Vec<CMatrix<T>>> {
    if s.nvars != x.m() {
        return Err(Error::ShapeMismatch(format!(
            "system in {} variables applied to a {}-tuple",
            s.nvars,
            x.m()
        )));
    }
    let mut pw = Powers::new(x);
    Ok(s.polys.iter().map(|p| eval_with(p, &mut pw, x.n())).collect())
}

fn warn_if_noncommuting<T: Real>(x: &MatrixTuple<T>) {
    if !log::log_enabled!(log::Level::Warn) {
        return;
    }
    let m = x.m();
    let scale = lit::<T>(1e-9);
    for j in 0..m {
        for k in (j + 1)..m {
            let c = x.get(j).commutator(x.get(k)).frobenius_norm();
            if c > scale {
                log::warn!(
                    "evaluating a polynomial on non-commuting components {j},{k} (commutator {:e})",
                    to_f64(c)
                );
            }
        }
    }
}

/// Monic univariate polynomial in root-product form `∏ (x − r_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly<T> {
    pub roots: Vec<Complex<T>>,
}

impl<T: Real> MonicPoly<T> {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Coefficients in ascending powers; the last one is 1.
    pub fn coefficients(&self) -> Vec<Complex<T>> {
        let mut c = vec![cone::<T>()];
        for &r in &self.roots {
            let mut next = vec![czero::<T>(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        c
    }

    pub fn eval_point(&self, x: Complex<T>) -> Complex<T> {
        self.roots.iter().fold(cone(), |p, &r| p * (x - r))
    }

    /// `∏ (A − r_i)` as a matrix product.
    pub fn eval_matrix(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let n = a.dim();
        self.roots
            .iter()
            .fold(CMatrix::identity(n), |p, &r| p.matmul(&a.add_scalar(-r)))
    }

    /// As a polynomial in variable `k` of `nvars`.
    pub fn to_multi(&self, nvars: usize, k: usize) -> MultiPoly<T> {
        let terms = self
            .coefficients()
            .into_iter()
            .enumerate()
            .map(|(d, c)| {
                let mut e = vec![0; nvars];
                e[k] = d as u32;
                (e, c)
            })
            .collect();
        MultiPoly::new(nvars, terms).expect("well-formed")
    }
}

/// Validated finite zero set of a polynomial system.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet<T> {
    points: Vec<Vec<Complex<T>>>,
    gap: T,
}

impl<T: Real> ZeroSet<T> {
    /// Wraps points already known to be distinct zeros.
    pub(crate) fn from_points_unchecked(points: Vec<Vec<Complex<T>>>) -> Self {
        let mut gap = T::infinity();
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                gap = gap.min(point_distance(&points[i], &points[j]));
            }
        }
        Self { points, gap }
    }

    pub fn points(&self) -> &[Vec<Complex<T>>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Minimum pairwise Euclidean distance (infinite for a single point).
    pub fn gap(&self) -> T {
        self.gap
    }

    /// `δ₁ = gap / 3`.
    pub fn delta1(&self) -> T {
        self.gap / lit(3.0)
    }

    /// True when every coordinate of every point is real.
    pub fn is_real(&self, tol: T) -> bool {
        self.points.iter().flatten().all(|z| z.im.abs() <= tol)
    }

    /// Index of the nearest point and its distance; ties go to the
    /// lexicographically smallest point.
    pub fn nearest(&self, x: &[Complex<T>]) -> (usize, T) {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (i, p) in self.points.iter().enumerate() {
            let d = point_distance(p, x);
            let better = d < best_d
                || (d == best_d && lex_cmp(p, &self.points[best]) == std::cmp::Ordering::Less);
            if better {
                best = i;
                best_d = d;
            }
        }
        (best, best_d)
    }

    /// Distinct `k`-th coordinates, sorted lexicographically by (re, im).
    pub fn coordinate_values(&self, k: usize, tol: T) -> Vec<Complex<T>> {
        let mut vals: Vec<Complex<T>> = Vec::new();
        for p in &self.points {
            if !vals.iter().any(|v| (*v - p[k]).norm() <= tol) {
                vals.push(p[k]);
            }
        }
        vals.sort_by(|a, b| lex_cmp(&[*a], &[*b]));
        vals
    }
}

pub(crate) fn point_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm_sqr()).sum::<T>().sqrt()
}

pub(crate) fn lex_cmp<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
        let o = x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Checks candidate points against the system and caches their gap.
pub fn validate_zero_set<T: Real>(
    p: &MultiPolySystem<T>,
    candidates: &[Vec<Complex<T>>],
    tol: &ToleranceConfig<T>,
) -> Result<ZeroSet<T>> {
    if candidates.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    for (i, x) in candidates.iter().enumerate() {
        if x.len() != p.nvars() {
            return Err(Error::ShapeMismatch(format!(
                "candidate {i} has {} coordinates, system has {} variables",
                x.len(),
                p.nvars()
            )));
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r = p.residual_at(x);
        if r > tol.tol_member {
            return Err(Error::NotAZero { index: i, residual: to_f64(r) });
        }
    }
    let mut gap = T::infinity();
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            let d = point_distance(&candidates[i], &candidates[j]);
            if d < tol.tol_cluster {
                return Err(Error::DuplicatePoint(i, j));
            }
            gap = gap.min(d);
        }
    }
    Ok(ZeroSet { points: candidates.to_vec(), gap })
}

/// `p̂_k(x) = ∏_{y ∈ Ž_k} (x − y)` for every coordinate `k`.
pub fn coordinate_polynomials<T: Real>(z: &ZeroSet<T>, tol: &ToleranceConfig<T>) -> Vec<MonicPoly<T>> {
    (0..z.dim())
        .map(|k| MonicPoly { roots: z.coordinate_values(k, tol.tol_cluster) })
        .collect()
}
