use num_complex::Complex;

use super::spectrum::JointSpectrum;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_upper, opnorm, polar_decompose, vnorm, CMatrix, CVector};
use crate::poly::point_distance;
use crate::scalar::{lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;

/// Orthogonal partition of unity: pairwise orthogonal nonzero projectors
/// summing to the identity, each optionally labelled by a point of `ℂ^m`.
#[derive(Clone, Debug)]
pub struct Opu<T> {
    projectors: Vec<CMatrix<T>>,
    bases: Vec<Vec<CVector<T>>>,
    labels: Option<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> Opu<T> {
    /// Validates the projectors and extracts an orthonormal basis of each range.
    pub fn new(
        projectors: Vec<CMatrix<T>>,
        labels: Option<Vec<Vec<Complex<T>>>>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidOpu("no projectors".into()));
        }
        if let Some(l) = &labels {
            if l.len() != projectors.len() {
                return Err(Error::InvalidOpu("label count differs from projector count".into()));
            }
        }
        let n = projectors[0].dim();
        if projectors.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidOpu("projectors of different dimensions".into()));
        }
        let bases = projectors.iter().map(range_basis).collect();
        let opu = Self { projectors, bases, labels };
        opu.validate(tol)?;
        Ok(opu)
    }

    /// Builds projectors `B B^*` from orthonormal column sets. No checks.
    pub(crate) fn from_bases(n: usize, bases: Vec<Vec<CVector<T>>>, labels: Option<Vec<Vec<Complex<T>>>>) -> Self {
        let projectors = bases.iter().map(|b| CMatrix::projector_from_columns(n, b)).collect();
        Self { projectors, bases, labels }
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    pub fn labels(&self) -> Option<&[Vec<Complex<T>>]> {
        self.labels.as_deref()
    }

    /// Orthonormal basis of the range of projector `j`.
    pub fn basis(&self, j: usize) -> &[CVector<T>] {
        &self.bases[j]
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Ranks of the projectors.
    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }

    /// Checks every OPU gate at `tol_member`.
    pub fn validate(&self, tol: &ToleranceConfig<T>) -> Result<()> {
        let gate = tol.tol_member;
        let n = self.dim();
        let mut sum = CMatrix::zeros(n);
        for (j, p) in self.projectors.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            let h = norm_upper(&p.hermitian_defect(), gate);
            if h > gate {
                return Err(Error::InvalidOpu(format!("projector {j} not hermitian ({:e})", to_f64(h))));
            }
            let idem = norm_upper(&(&p.matmul(p) - p), gate);
            if idem > gate {
                return Err(Error::InvalidOpu(format!("projector {j} not idempotent ({:e})", to_f64(idem))));
            }
            if p.trace().re < lit(0.5) {
                return Err(Error::InvalidOpu(format!("projector {j} is zero")));
            }
            sum = &sum + p;
        }
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let r = cross_norm(&self.bases[i], &self.bases[j]);
                if r > gate {
                    return Err(Error::InvalidOpu(format!(
                        "projectors {i} and {j} not orthogonal ({:e})",
                        to_f64(r)
                    )));
                }
            }
        }
        let s = norm_upper(&sum.add_scalar(-Complex::new(T::one(), T::zero())), gate);
        if s > gate {
            return Err(Error::InvalidOpu(format!("projectors sum to identity only within {:e}", to_f64(s))));
        }
        Ok(())
    }
}

/// Frobenius norm of `B_i^* B_j`, which bounds `‖P_i P_j‖`.
fn cross_norm<T: Real>(a: &[CVector<T>], b: &[CVector<T>]) -> T {
    let mut s = T::zero();
    for x in a {
        for y in b {
            s += dot(x, y).norm_sqr();
        }
    }
    s.sqrt()
}

/// Orthonormal basis of the range of a (near) projector by pivoted
/// Gram–Schmidt on its columns; the rank is the rounded trace.
pub(crate) fn range_basis<T: Real>(p: &CMatrix<T>) -> Vec<CVector<T>> {
    let n = p.dim();
    let rank = p.trace().re.round().to_usize().unwrap_or(0).min(n);
    let mut cols = p.columns();
    let mut basis: Vec<CVector<T>> = Vec::with_capacity(rank);
    let mut used = vec![false; n];
    for _ in 0..rank {
        let (best, nrm) = cols
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, vnorm(c)))
            .fold((usize::MAX, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || nrm == T::zero() {
            break;
        }
        used[best] = true;
        let mut v: CVector<T> = cols[best].iter().map(|z| z / nrm).collect();
        // re-orthogonalise against the accepted vectors
        for b in &basis {
            let d = dot(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let nv = vnorm(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        for (i, c) in cols.iter_mut().enumerate() {
            if used[i] {
                continue;
            }
            let d = dot(&v, c);
            for (x, y) in c.iter_mut().zip(&v) {
                *x -= d * y;
            }
        }
        basis.push(v);
    }
    basis
}

/// Groups joint-eigenvalue rows by single-linkage clustering at
/// `cluster_tol`; projectors are sums of the matching columns of `Q`, and
/// labels are cluster centroids.
pub fn opu_from_spectrum<T: Real>(s: &JointSpectrum<T>, cluster_tol: T) -> Result<Opu<T>> {
    if !(cluster_tol > T::zero()) {
        return Err(Error::BadParameter("cluster_tol must be positive".into()));
    }
    let n = s.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if point_distance(&s.lambda[i], &s.lambda[j]) <= cluster_tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // clusters in order of first row
    let mut index_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if index_of[r] == usize::MAX {
            index_of[r] = members.len();
            members.push(Vec::new());
        }
        members[index_of[r]].push(i);
    }
    let m = s.m();
    let centroids: Vec<Vec<Complex<T>>> = members
        .iter()
        .map(|g| {
            let w = lit::<T>(g.len() as f64);
            (0..m)
                .map(|j| g.iter().fold(Complex::new(T::zero(), T::zero()), |a, &i| a + s.lambda[i][j]) / w)
                .collect()
        })
        .collect();
    for a in 0..centroids.len() {
        for b in (a + 1)..centroids.len() {
            if point_distance(&centroids[a], &centroids[b]) < lit::<T>(2.0) * cluster_tol {
                return Err(Error::ClusterOverlap);
            }
        }
    }
    let bases = members.iter().map(|g| g.iter().map(|&k| s.vector(k)).collect()).collect();
    Ok(Opu::from_bases(n, bases, Some(centroids)))
}

/// Per-component OPUs of a joint spectrum at `cluster_tol`.
pub fn component_opus<T: Real>(s: &JointSpectrum<T>, cluster_tol: T) -> Result<Vec<Opu<T>>> {
    (0..s.m()).map(|j| opu_from_spectrum(&s.component(j), cluster_tol)).collect()
}

/// All nonzero products `P_{1,j_1} ⋯ P_{s,j_s}` across commuting OPUs,
/// each rounded to an exact projector.
pub fn projective_refinement<T: Real>(parts: &[Opu<T>], tol: &ToleranceConfig<T>) -> Result<Opu<T>> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidOpu("nothing to refine".into()));
    };
    let n = first.dim();
    for (a, pa) in parts.iter().enumerate() {
        if pa.dim() != n {
            return Err(Error::InvalidOpu("partitions of different dimensions".into()));
        }
        for pb in &parts[a + 1..] {
            for x in pa.projectors() {
                for y in pb.projectors() {
                    let r = norm_upper(&x.commutator(y), tol.tol_commute);
                    if r > tol.tol_commute {
                        return Err(Error::NotCommutingOpus { residual: to_f64(r) });
                    }
                }
            }
        }
    }
    let labelled = parts.iter().all(|p| p.labels.is_some());
    let mut cur: Vec<(CMatrix<T>, Vec<Complex<T>>)> = first
        .projectors
        .iter()
        .enumerate()
        .map(|(j, p)| (p.clone(), label_of(first, j)))
        .collect();
    for part in &parts[1..] {
        let mut next = Vec::new();
        for (p, lp) in &cur {
            for (j, q) in part.projectors.iter().enumerate() {
                let prod = p.matmul(q);
                if norm_upper(&prod, lit(0.5)) <= lit(0.5) {
                    continue;
                }
                let mut l = lp.clone();
                l.extend(label_of(part, j));
                next.push((prod, l));
            }
        }
        cur = next;
    }
    let mut bases = Vec::with_capacity(cur.len());
    let mut labels = Vec::with_capacity(cur.len());
    for (p, l) in cur {
        let mut h = p;
        h.hermitize();
        let b = range_basis(&h);
        if b.is_empty() {
            continue;
        }
        bases.push(b);
        labels.push(l);
    }
    Ok(Opu::from_bases(n, bases, labelled.then_some(labels)))
}

fn label_of<T: Real>(p: &Opu<T>, j: usize) -> Vec<Complex<T>> {
    p.labels.as_ref().map(|l| l[j].clone()).unwrap_or_default()
}

/// Blockwise polar decomposition `P_j X P_j = V_j R_j` with `V_j` a partial
/// isometry on the range of `P_j`.
pub fn projective_polar<T: Real>(
    p: &Opu<T>,
    x: &CMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Vec<(CMatrix<T>, CMatrix<T>)>> {
    p.validate(tol)?;
    if x.dim() != p.dim() {
        return Err(Error::ShapeMismatch("operand and partition dimensions differ".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(projective_polar_unchecked(p, x))
}

pub(crate) fn projective_polar_unchecked<T: Real>(p: &Opu<T>, x: &CMatrix<T>) -> Vec<(CMatrix<T>, CMatrix<T>)> {
    let n = p.dim();
    p.bases
        .iter()
        .map(|b| {
            let small = x.compress(b);
            let (v, r) = polar_decompose(&small).expect("finite block");
            (CMatrix::dilate(&v, b, n), CMatrix::dilate(&r, b, n))
        })
        .collect()
}

/// Largest violation among the six block identities of a projective polar
/// decomposition: `P X P = V R`, `V V^* = P`, `V^* V = P`, `P R = R`,
/// `R P = R`, and `P_k V_j = 0` for `k ≠ j`.
pub fn projective_polar_defect<T: Real>(p: &Opu<T>, x: &CMatrix<T>, parts: &[(CMatrix<T>, CMatrix<T>)]) -> T {
    let mut worst = T::zero();
    for (j, (v, r)) in parts.iter().enumerate() {
        let pj = &p.projectors[j];
        let pxp = pj.matmul(x).matmul(pj);
        worst = worst.max(opnorm(&(&pxp - &v.matmul(r))));
        worst = worst.max(opnorm(&(&v.mul_adjoint(v) - pj)));
        worst = worst.max(opnorm(&(&v.adjoint_mul(v) - pj)));
        worst = worst.max(opnorm(&(&pj.matmul(r) - r)));
        worst = worst.max(opnorm(&(&r.matmul(pj) - r)));
        for (k, pk) in p.projectors.iter().enumerate() {
            if k != j {
                worst = worst.max(opnorm(&pk.matmul(v)));
            }
        }
    }
    worst
}
