use crate::error::{Error, Result};
use crate::joint::spectrum::{check_commuting_normal, spectrum_unchecked, DEFAULT_SEED};
use crate::joint::JointSpectrum;
use crate::linalg::CMatrix;
use crate::poly::{point_distance, ZeroSet};
use crate::scalar::{lit, to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::MatrixTuple;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of matching the joint spectra of two tuples.
#[derive(Clone, Debug)]
pub struct SpectralMatch<T> {
    /// `Ŵ = Q_Y P Q_X^*`, so that `Ŵ X_j Ŵ^* ≈ Y_j`.
    pub w_hat: CMatrix<T>,
    pub x_spectrum: JointSpectrum<T>,
    pub y_spectrum: JointSpectrum<T>,
    /// Row `k` of `X` is matched to row `permutation[k]` of `Y`.
    pub permutation: Vec<usize>,
    /// Largest Euclidean distance between matched rows.
    pub max_row_distance: T,
    /// Index of the zero-set point nearest to each row of `Y`.
    pub y_labels: Vec<usize>,
}

/// Permutation minimising the largest matched cost (bottleneck assignment),
/// by bisection over the sorted costs with augmenting-path matching.
pub fn bottleneck_assignment<T: Real>(cost: &[Vec<T>]) -> (Vec<usize>, T) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), T::zero());
    }
    let mut levels: Vec<T> = cost.iter().flatten().copied().collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    let mut best = perfect_matching(cost, levels[hi]).expect("complete bipartite graph");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(cost, levels[mid]) {
            Some(p) => {
                best = p;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let value = (0..n).map(|i| cost[i][best[i]]).fold(T::zero(), T::max);
    (best, value)
}

/// Perfect matching using only edges with `cost ≤ limit`, or `None`.
fn perfect_matching<T: Real>(cost: &[Vec<T>], limit: T) -> Option<Vec<usize>> {
    let n = cost.len();
    let mut owner = vec![usize::MAX; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, cost, limit, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, &i) in owner.iter().enumerate() {
        perm[i] = j;
    }
    Some(perm)
}

fn augment<T: Real>(i: usize, cost: &[Vec<T>], limit: T, seen: &mut [bool], owner: &mut [usize]) -> bool {
    for j in 0..cost.len() {
        if cost[i][j] <= limit && !seen[j] {
            seen[j] = true;
            if owner[j] == usize::MAX || augment(owner[j], cost, limit, seen, owner) {
                owner[j] = i;
                return true;
            }
        }
    }
    false
}

fn labels_on<T: Real>(s: &JointSpectrum<T>, z: &ZeroSet<T>, tol: &ToleranceConfig<T>) -> Result<Vec<usize>> {
    s.lambda
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let (k, d) = z.nearest(r);
            if d > tol.tol_member {
                Err(Error::SpectraOffZeroSet { row, distance: to_f64(d) })
            } else {
                Ok(k)
            }
        })
        .collect()
}

/// Matches the joint-eigenvalue rows of `X` to those of `Y` and returns the
/// unitary carrying one eigenbasis onto the other.
///
/// Both spectra must lie on `Z` within `tol_member`; matched rows must be
/// closer than half the gap of `Z`, which forces them to coincide.
pub fn match_spectra<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    z: &ZeroSet<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralMatch<T>> {
    x.same_shape(y)?;
    if z.dim() != x.m() {
        return Err(Error::ShapeMismatch(format!(
            "zero set in {} coordinates for a {}-tuple",
            z.dim(),
            x.m()
        )));
    }
    check_commuting_normal(x, tol)?;
    check_commuting_normal(y, tol)?;
    let xs = spectrum_unchecked(x, &mut ChaCha8Rng::seed_from_u64(DEFAULT_SEED));
    let ys = spectrum_unchecked(y, &mut ChaCha8Rng::seed_from_u64(DEFAULT_SEED));
    labels_on(&xs, z, tol)?;
    let y_labels = labels_on(&ys, z, tol)?;

    let n = x.n();
    let cost: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| point_distance(&xs.lambda[i], &ys.lambda[j])).collect())
        .collect();
    let (permutation, max_row_distance) = bottleneck_assignment(&cost);
    if max_row_distance >= z.gap() / lit(2.0) {
        return Err(Error::DeltaTooLarge(format!(
            "best row matching moves a joint eigenvalue by {:e}, half the zero-set gap is {:e}",
            to_f64(max_row_distance),
            to_f64(z.gap() / lit(2.0))
        )));
    }
    let yq = CMatrix::from_fn(n, |i, k| ys.q[(i, permutation[k])]);
    let w_hat = yq.mul_adjoint(&xs.q);
    Ok(SpectralMatch { w_hat, x_spectrum: xs, y_spectrum: ys, permutation, max_row_distance, y_labels })
}

/// The unitary `Ŵ` of [`match_spectra`].
pub fn isospectral_match<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    z: &ZeroSet<T>,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    Ok(match_spectra(x, y, z, tol)?.w_hat)
}
