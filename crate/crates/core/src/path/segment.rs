use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_upper, CMatrix, SkewGenerator};
use crate::scalar::{to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::{juncture, metric, MatrixTuple};

/// `t ↦ e^{sK} · base · e^{−sK}` with `s = a + (b − a)t`.
///
/// The base is cached in the eigenbasis of `K`, so a sample costs two
/// matrix products per component.
#[derive(Clone, Debug)]
pub struct ConjugationSegment<T> {
    base: MatrixTuple<T>,
    generator: SkewGenerator<T>,
    a: T,
    b: T,
    rotated: Vec<CMatrix<T>>,
    hermitian: Vec<bool>,
}

impl<T: Real> ConjugationSegment<T> {
    pub fn new(base: MatrixTuple<T>, generator: SkewGenerator<T>, a: T, b: T) -> Result<Self> {
        if generator.dim() != base.n() {
            return Err(Error::ShapeMismatch(format!(
                "generator of dimension {} for a tuple of dimension {}",
                generator.dim(),
                base.n()
            )));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite);
        }
        let q = generator.eigenvectors();
        let rotated = base.iter().map(|c| q.adjoint_mul(&c.matmul(q))).collect();
        let hermitian = base.iter().map(|c| c.hermitian_defect().max_abs() == T::zero()).collect();
        Ok(Self { base, generator, a, b, rotated, hermitian })
    }

    pub fn base(&self) -> &MatrixTuple<T> {
        &self.base
    }

    pub fn generator(&self) -> &SkewGenerator<T> {
        &self.generator
    }

    /// Parameter interval `(a, b)`.
    pub fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }

    /// The exponent `s` at local time `t`.
    pub fn exponent(&self, t: T) -> T {
        self.a + (self.b - self.a) * t
    }

    pub fn sample(&self, t: T) -> MatrixTuple<T> {
        let s = self.exponent(t);
        if s == T::zero() || self.generator.is_zero() {
            return self.base.clone();
        }
        let q = self.generator.eigenvectors();
        let n = self.base.n();
        let phase: Vec<Complex<T>> = self
            .generator
            .angles()
            .iter()
            .map(|&th| Complex::new(T::zero(), th * s).exp())
            .collect();
        let mats = self
            .rotated
            .iter()
            .zip(&self.hermitian)
            .map(|(r, &herm)| {
                let inner = CMatrix::from_fn(n, |i, j| phase[i] * r[(i, j)] * phase[j].conj());
                let mut out = q.matmul(&inner).mul_adjoint(q);
                if herm {
                    out.hermitize();
                }
                out
            })
            .collect();
        MatrixTuple::from_vec_unchecked(mats)
    }

    fn map_tuple(&self, f: impl Fn(&MatrixTuple<T>) -> Result<MatrixTuple<T>>) -> Result<Self> {
        Self::new(f(&self.base)?, self.generator.clone(), self.a, self.b)
    }
}

/// One piece of a piecewise path.
#[derive(Clone, Debug)]
pub enum PathSegment<T> {
    /// `(1 − t) start + t end`.
    Linear { start: MatrixTuple<T>, end: MatrixTuple<T> },
    Conjugation(ConjugationSegment<T>),
}

impl<T: Real> PathSegment<T> {
    pub fn linear(start: MatrixTuple<T>, end: MatrixTuple<T>) -> Result<Self> {
        start.same_shape(&end)?;
        Ok(Self::Linear { start, end })
    }

    pub fn conjugation(base: MatrixTuple<T>, generator: SkewGenerator<T>, a: T, b: T) -> Result<Self> {
        Ok(Self::Conjugation(ConjugationSegment::new(base, generator, a, b)?))
    }

    pub fn constant(x: MatrixTuple<T>) -> Self {
        let n = x.n();
        Self::Conjugation(
            ConjugationSegment::new(x, SkewGenerator::zero(n), T::zero(), T::zero()).expect("matching dimensions"),
        )
    }

    /// Sample at local time `t ∈ [0, 1]`; both ends are returned exactly.
    pub fn sample(&self, t: T) -> MatrixTuple<T> {
        match self {
            Self::Linear { start, end } => {
                if t == T::zero() {
                    start.clone()
                } else if t == T::one() {
                    end.clone()
                } else {
                    let mats = start.iter().zip(end.iter()).map(|(a, b)| a.lerp(b, t)).collect();
                    MatrixTuple::from_vec_unchecked(mats)
                }
            }
            Self::Conjugation(c) => c.sample(t),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Self::Linear { start, .. } => start.m(),
            Self::Conjugation(c) => c.base.m(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Linear { start, .. } => start.n(),
            Self::Conjugation(c) => c.base.n(),
        }
    }

    fn map_tuple(&self, f: impl Fn(&MatrixTuple<T>) -> Result<MatrixTuple<T>>) -> Result<Self> {
        Ok(match self {
            Self::Linear { start, end } => Self::Linear { start: f(start)?, end: f(end)? },
            Self::Conjugation(c) => Self::Conjugation(c.map_tuple(f)?),
        })
    }
}

/// An inequality checked while a path was built, reported in certificates
/// but never gating them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub claimed_constant: f64,
    pub measured_ratio: f64,
    pub pass: bool,
}

/// Concatenation of segments, each given an equal share of `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MatrixPath<T> {
    segments: Vec<PathSegment<T>>,
    checks: Vec<BoundCheck>,
}

impl<T: Real> MatrixPath<T> {
    /// Joins segments, checking continuity at every junction.
    pub fn new(segments: Vec<PathSegment<T>>, tol: &ToleranceConfig<T>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::BadParameter("a path needs at least one segment".into()));
        }
        for w in segments.windows(2) {
            if w[0].m() != w[1].m() || w[0].n() != w[1].n() {
                return Err(Error::ShapeMismatch("segments of different shapes".into()));
            }
            junction_gap(&w[0], &w[1], tol)?;
        }
        Ok(Self { segments, checks: Vec::new() })
    }

    pub fn single(segment: PathSegment<T>) -> Self {
        Self { segments: vec![segment], checks: Vec::new() }
    }

    pub fn constant(x: MatrixTuple<T>) -> Self {
        Self::single(PathSegment::constant(x))
    }

    pub fn segments(&self) -> &[PathSegment<T>] {
        &self.segments
    }

    pub fn checks(&self) -> &[BoundCheck] {
        &self.checks
    }

    pub fn with_checks(mut self, checks: Vec<BoundCheck>) -> Self {
        self.checks.extend(checks);
        self
    }

    pub fn m(&self) -> usize {
        self.segments[0].m()
    }

    pub fn n(&self) -> usize {
        self.segments[0].n()
    }

    /// Segment index and local time for global time `t`; `t` is clamped to `[0, 1]`.
    pub fn locate(&self, t: T) -> (usize, T) {
        let count = self.segments.len();
        let t = t.max(T::zero()).min(T::one());
        let u = t * T::from_usize(count).expect("segment count");
        let k = u.floor().to_usize().unwrap_or(0).min(count - 1);
        let local = u - T::from_usize(k).expect("segment index");
        (k, local.max(T::zero()).min(T::one()))
    }

    pub fn sample(&self, t: T) -> MatrixTuple<T> {
        let (k, local) = self.locate(t);
        self.segments[k].sample(local)
    }

    pub fn start(&self) -> MatrixTuple<T> {
        self.segments[0].sample(T::zero())
    }

    pub fn end(&self) -> MatrixTuple<T> {
        self.segments[self.segments.len() - 1].sample(T::one())
    }

    /// Applies [`juncture`] to every tuple the path is built from.
    pub fn juncture(&self) -> Result<Self> {
        let segments = self
            .segments
            .iter()
            .map(|s| s.map_tuple(juncture))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments, checks: self.checks.clone() })
    }
}

fn junction_gap<T: Real>(a: &PathSegment<T>, b: &PathSegment<T>, tol: &ToleranceConfig<T>) -> Result<()> {
    let gap = metric(&a.sample(T::one()), &b.sample(T::zero()))?;
    if gap > tol.tol_recon {
        return Err(Error::DiscontinuousJoin { gap: to_f64(gap) });
    }
    Ok(())
}

/// `a ⊛ b`; fails with [`Error::DiscontinuousJoin`] when `a(1)` and `b(0)`
/// differ by more than `tol_recon`.
pub fn concat<T: Real>(a: &MatrixPath<T>, b: &MatrixPath<T>, tol: &ToleranceConfig<T>) -> Result<MatrixPath<T>> {
    if a.m() != b.m() || a.n() != b.n() {
        return Err(Error::ShapeMismatch("paths of different shapes".into()));
    }
    junction_gap(&a.segments[a.segments.len() - 1], &b.segments[0], tol)?;
    let mut segments = a.segments.clone();
    segments.extend(b.segments.iter().cloned());
    let mut checks = a.checks.clone();
    checks.extend(b.checks.iter().cloned());
    Ok(MatrixPath { segments, checks })
}

/// Straight line `X_j + t(Y_j − X_j)` between cross-commuting tuples.
///
/// Convex combinations of jointly diagonalisable contractions stay in the
/// cube (or disk), so only cross-commutation is checked.
pub fn flat_path<T: Real>(x: &MatrixTuple<T>, y: &MatrixTuple<T>, tol: &ToleranceConfig<T>) -> Result<MatrixPath<T>> {
    x.same_shape(y)?;
    for a in x.iter() {
        for b in y.iter() {
            let r = norm_upper(&a.commutator(b), tol.tol_commute);
            if r > tol.tol_commute {
                return Err(Error::NotCrossCommuting { residual: to_f64(r) });
            }
        }
    }
    Ok(MatrixPath::single(PathSegment::Linear { start: x.clone(), end: y.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_skew, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn diag(d: &[f64]) -> MatrixTuple<f64> {
        MatrixTuple::single(CMatrix::from_real_diag(d)).unwrap()
    }

    #[test]
    fn flat_path_midpoint() {
        let x = diag(&[1.0, -1.0]);
        let y = diag(&[0.5, -0.5]);
        let p = flat_path(&x, &y, &tol()).unwrap();
        assert_eq!(p.start(), x);
        assert_eq!(p.end(), y);
        let d = metric(&p.sample(0.5), &y).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert!(metric(&x, &y).unwrap() >= d);
    }

    #[test]
    fn flat_path_rejects_non_commuting() {
        let x = MatrixTuple::single(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()).unwrap();
        let y = diag(&[1.0, -1.0]);
        assert!(matches!(flat_path(&x, &y, &tol()), Err(Error::NotCrossCommuting { .. })));
    }

    #[test]
    fn conjugation_endpoints_and_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = random_skew::<f64, _>(4, 0.3, &mut rng);
        let g = SkewGenerator::new(&k, &tol()).unwrap();
        let q = random_unitary::<f64, _>(4, &mut rng);
        let mut b0 = CMatrix::from_real_diag(&[1.0, 1.0, -1.0, 0.5]).conjugate_by(&q);
        b0.hermitize();
        let base = MatrixTuple::single(b0).unwrap();
        let seg = PathSegment::conjugation(base.clone(), g.clone(), 1.0, 0.0).unwrap();
        assert_eq!(seg.sample(1.0), base);
        let u = g.exp(1.0);
        let want = base.conjugate_by(&u);
        assert!(metric(&seg.sample(0.0), &want).unwrap() < 1e-14);
        let half = base.conjugate_by(&g.exp(0.5));
        assert!(metric(&seg.sample(0.5), &half).unwrap() < 1e-14);
        // hermitian base stays exactly hermitian
        assert_eq!(seg.sample(0.3).get(0).hermitian_defect().max_abs(), 0.0);
    }

    #[test]
    fn concat_of_constants_and_midpoint() {
        let x = diag(&[0.2, -0.7]);
        let a = MatrixPath::constant(x.clone());
        let c = concat(&a, &a, &tol()).unwrap();
        assert_eq!(c.segments().len(), 2);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert_eq!(c.sample(t), x);
        }
        let y = diag(&[0.0, -0.5]);
        let f = flat_path(&x, &y, &tol()).unwrap();
        let g = flat_path(&y, &x, &tol()).unwrap();
        let fg = concat(&f, &g, &tol()).unwrap();
        assert_eq!(fg.sample(0.5), y);
        assert!(matches!(concat(&f, &f, &tol()), Err(Error::DiscontinuousJoin { .. })));
    }

    #[test]
    fn concat_is_associative_on_dyadic_grid() {
        let x = diag(&[0.2, -0.7]);
        let y = diag(&[0.0, -0.5]);
        let z = diag(&[0.1, 0.3]);
        let a = flat_path(&x, &y, &tol()).unwrap();
        let b = flat_path(&y, &z, &tol()).unwrap();
        let c = flat_path(&z, &x, &tol()).unwrap();
        let left = concat(&concat(&a, &b, &tol()).unwrap(), &c, &tol()).unwrap();
        let right = concat(&a, &concat(&b, &c, &tol()).unwrap(), &tol()).unwrap();
        let grid: Vec<f64> = (0..=48).map(|k| k as f64 / 48.0).collect();
        let ls: Vec<_> = grid.iter().map(|&t| left.sample(t)).collect();
        let rs: Vec<_> = grid.iter().map(|&t| right.sample(t)).collect();
        for p in &ls {
            assert!(rs.iter().any(|q| metric(p, q).unwrap() <= 1e-10));
        }
        for q in &rs {
            assert!(ls.iter().any(|p| metric(p, q).unwrap() <= 1e-10));
        }
    }

    #[test]
    fn locate_covers_unit_interval() {
        let x = diag(&[0.2, -0.7]);
        let a = MatrixPath::constant(x.clone());
        let p = concat(&concat(&a, &a, &tol()).unwrap(), &a, &tol()).unwrap();
        assert_eq!(p.locate(0.0), (0, 0.0));
        assert_eq!(p.locate(1.0), (2, 1.0));
        let (k, s) = p.locate(0.5);
        assert_eq!(k, 1);
        assert!((s - 0.5).abs() < 1e-15);
    }
}
