use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, lit, Real};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

/// Column vector of length `n`.
pub type CVector<T> = Vec<Complex<T>>;

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![czero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = cone();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major entries; `data.len()` must equal `n*n`.
    pub fn from_row_major(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        let m = Self { n, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Builds a matrix from real row-major `f64` entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| Complex::new(lit(x), T::zero())));
        }
        Self::from_row_major(n, data)
    }

    pub fn from_diag(d: &[Complex<T>]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &x) in d.iter().enumerate() {
            m.data[i * n + i] = x;
        }
        m
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &x) in d.iter().enumerate() {
            m.data[i * n + i] = Complex::new(x, T::zero());
        }
        m
    }

    /// Rank-one sum `sum_k w_k v_k v_k^*` over the given columns.
    pub fn from_columns_weighted(n: usize, cols: &[CVector<T>], weights: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(n);
        for (v, &w) in cols.iter().zip(weights) {
            for i in 0..n {
                let vi = v[i] * w;
                let row = &mut m.data[i * n..(i + 1) * n];
                for (x, vj) in row.iter_mut().zip(v.iter()) {
                    *x += vi * vj.conj();
                }
            }
        }
        m
    }

    /// Orthogonal projector `sum_k v_k v_k^*` onto the span of orthonormal columns.
    pub fn projector_from_columns(n: usize, cols: &[CVector<T>]) -> Self {
        let w = vec![cone(); cols.len()];
        Self::from_columns_weighted(n, cols, &w)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> CVector<T> {
        (0..self.n).map(|i| self.data[i * self.n + j]).collect()
    }

    pub fn columns(&self) -> Vec<CVector<T>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        gemm(n, |i, k| self.data[i * n + k], planes(n, |k, j| rhs.data[k * n + j]))
    }

    /// `self^* rhs` without materialising the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        gemm(n, |i, k| self.data[k * n + i].conj(), planes(n, |k, j| rhs.data[k * n + j]))
    }

    /// `self rhs^*` without materialising the adjoint.
    pub fn mul_adjoint(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        gemm(n, |i, k| self.data[i * n + k], planes(n, |k, j| rhs.data[j * n + k].conj()))
    }

    /// `u self u^*`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).mul_adjoint(u)
    }

    pub fn apply(&self, v: &[Complex<T>]) -> CVector<T> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self + s * 1`.
    pub fn add_scalar(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += s;
        }
        out
    }

    /// `self + s * rhs`.
    pub fn axpy(&self, s: Complex<T>, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + s * b).collect(),
        }
    }

    /// `(1 - t) self + t rhs`; exact at `t = 0` and `t = 1`.
    pub fn lerp(&self, rhs: &Self, t: T) -> Self {
        let s = T::one() - t;
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a * s + b * t).collect(),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        if self.is_exactly_hermitian() && rhs.is_exactly_hermitian() {
            // BA = (AB)^*
            let ab = self.matmul(rhs);
            let n = self.n;
            return Self::from_fn(n, |i, j| ab.data[i * n + j] - ab.data[j * n + i].conj());
        }
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// `A = A^*` bit for bit.
    pub fn is_exactly_hermitian(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i..n).all(|j| self.data[i * n + j] == self.data[j * n + i].conj()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(czero(), |acc, i| acc + self.data[i * self.n + i])
    }

    pub fn diagonal(&self) -> CVector<T> {
        (0..self.n).map(|i| self.data[i * self.n + i]).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Hermitian part `(A + A^*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n;
        let half = lit::<T>(0.5);
        Self::from_fn(n, |i, j| (self.data[i * n + j] + self.data[j * n + i].conj()) * half)
    }

    /// Imaginary part `(A - A^*)/(2i)`, itself hermitian.
    pub fn imaginary_part(&self) -> Self {
        let n = self.n;
        let half = lit::<T>(0.5);
        Self::from_fn(n, |i, j| {
            let d = (self.data[i * n + j] - self.data[j * n + i].conj()) * half;
            // d / i
            Complex::new(d.im, -d.re)
        })
    }

    /// Skew-hermitian part `(A - A^*)/2`.
    pub fn skew_part(&self) -> Self {
        let n = self.n;
        let half = lit::<T>(0.5);
        Self::from_fn(n, |i, j| (self.data[i * n + j] - self.data[j * n + i].conj()) * half)
    }

    /// `A - A^*`.
    pub fn hermitian_defect(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[i * n + j] - self.data[j * n + i].conj())
    }

    /// `A A^* - A^* A`.
    pub fn normality_defect(&self) -> Self {
        &self.mul_adjoint(self) - &self.adjoint_mul(self)
    }

    /// `A^* A - 1`.
    pub fn unitarity_defect(&self) -> Self {
        self.adjoint_mul(self).add_scalar(-cone::<T>())
    }

    /// Full pinching: the diagonal part of `A`.
    pub fn full_pinching(&self) -> Self {
        Self::from_diag(&self.diagonal())
    }

    /// `B^* A B` for orthonormal columns `B` (k x k result).
    pub fn compress(&self, cols: &[CVector<T>]) -> Self {
        let k = cols.len();
        let av: Vec<CVector<T>> = cols.iter().map(|c| self.apply(c)).collect();
        Self::from_fn(k, |i, j| {
            cols[i]
                .iter()
                .zip(&av[j])
                .fold(czero(), |acc, (b, a)| acc + b.conj() * *a)
        })
    }

    /// `B S B^*` for orthonormal columns `B` (n x n result) and k x k `S`.
    pub fn dilate(small: &Self, cols: &[CVector<T>], n: usize) -> Self {
        let k = cols.len();
        assert_eq!(small.n, k);
        // bs = B S, as k columns of length n
        let mut out = Self::zeros(n);
        for j in 0..k {
            let mut col = vec![czero::<T>(); n];
            for (l, c) in cols.iter().enumerate() {
                let s = small.data[l * k + j];
                if s.re == T::zero() && s.im == T::zero() {
                    continue;
                }
                for i in 0..n {
                    col[i] += c[i] * s;
                }
            }
            let bj = &cols[j];
            for i in 0..n {
                let ci = col[i];
                let row = &mut out.data[i * n..(i + 1) * n];
                for (x, b) in row.iter_mut().zip(bj) {
                    *x += ci * b.conj();
                }
            }
        }
        out
    }

    /// Replaces `self` with its hermitian part in place.
    pub fn hermitize(&mut self) {
        let n = self.n;
        let half = lit::<T>(0.5);
        for i in 0..n {
            self.data[i * n + i].im = T::zero();
            for j in (i + 1)..n {
                let a = (self.data[i * n + j] + self.data[j * n + i].conj()) * half;
                self.data[i * n + j] = a;
                self.data[j * n + i] = a.conj();
            }
        }
    }

    /// Replaces `self` with its skew-hermitian part in place.
    pub fn skew_hermitize(&mut self) {
        let n = self.n;
        let half = lit::<T>(0.5);
        for i in 0..n {
            self.data[i * n + i].re = T::zero();
            for j in (i + 1)..n {
                let a = (self.data[i * n + j] - self.data[j * n + i].conj()) * half;
                self.data[i * n + j] = a;
                self.data[j * n + i] = -a.conj();
            }
        }
    }

    /// Permutes rows and columns: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[p[i] * n + p[j]])
    }

    pub fn map_entries(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| f(z)).collect() }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        CMatrix { n: self.n, data: self.data.iter().map(|z| -z).collect() }
    }
}

/// Normalised inner product helpers on column vectors.
/// Real and imaginary planes of the matrix `(k, j) ↦ f(k, j)`.
fn planes<T: Real>(n: usize, f: impl Fn(usize, usize) -> Complex<T>) -> (Vec<T>, Vec<T>) {
    let mut re = Vec::with_capacity(n * n);
    let mut im = Vec::with_capacity(n * n);
    for k in 0..n {
        for j in 0..n {
            let z = f(k, j);
            re.push(z.re);
            im.push(z.im);
        }
    }
    (re, im)
}

// split planes let the inner loop vectorise
fn gemm<T: Real>(n: usize, a: impl Fn(usize, usize) -> Complex<T>, (b_re, b_im): (Vec<T>, Vec<T>)) -> CMatrix<T> {
    let mut data = Vec::with_capacity(n * n);
    let mut o_re = vec![T::zero(); n];
    let mut o_im = vec![T::zero(); n];
    for i in 0..n {
        o_re.iter_mut().for_each(|v| *v = T::zero());
        o_im.iter_mut().for_each(|v| *v = T::zero());
        for k in 0..n {
            let x = a(i, k);
            if x.re == T::zero() && x.im == T::zero() {
                continue;
            }
            let br = &b_re[k * n..(k + 1) * n];
            let bi = &b_im[k * n..(k + 1) * n];
            for (((or, oi), &r), &m) in o_re.iter_mut().zip(o_im.iter_mut()).zip(br).zip(bi) {
                *or = *or + x.re * r - x.im * m;
                *oi = *oi + x.re * m + x.im * r;
            }
        }
        data.extend(o_re.iter().zip(&o_im).map(|(&r, &m)| Complex::new(r, m)));
    }
    CMatrix { n, data }
}

pub(crate) fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub(crate) fn vnorm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}
