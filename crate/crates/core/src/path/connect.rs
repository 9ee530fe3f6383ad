use std::collections::BTreeMap;

use num_complex::Complex;

use super::correction::refined_unchecked;
use super::matching::match_spectra;
use super::segment::{concat, flat_path, BoundCheck, MatrixPath, PathSegment};
use crate::error::{Error, Result};
use crate::joint::spectrum::{check_commuting_normal, spectrum_unchecked, DEFAULT_SEED};
use crate::joint::Opu;
use crate::linalg::{opnorm, principal_log_generator, CMatrix};
use crate::poly::{coordinate_polynomials, MultiPoly, MultiPolySystem, ZeroSet};
use crate::scalar::{cone, lit, to_f64, Real};
use crate::sets::{check_membership, SetFamily};
use crate::tolerance::ToleranceConfig;
use crate::tuple::{metric, partition, MatrixTuple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default for the matching constant `K_m`, whose value is not known.
pub const DEFAULT_K_M: f64 = 1.0;

/// `4 sin(1/8)`, the exclusive upper limit for `ε`.
pub fn epsilon_limit<T: Real>() -> T {
    lit::<T>(4.0) * lit::<T>(0.125).sin()
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero()) || !(epsilon < epsilon_limit()) {
        return Err(Error::EpsilonTooLarge(to_f64(epsilon)));
    }
    Ok(())
}

/// Inputs and result of the a-priori distance budget.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaBudget<T> {
    pub h_p: T,
    pub k_m: T,
    /// `K = ∏_k |Ž_k|`.
    pub k_prod: T,
    /// `L = max_k |Ž_k|`.
    pub l_max: T,
    pub m: usize,
    pub epsilon: T,
    pub delta: T,
    /// No coordinate takes two values; `delta` is then `ε` from the flat bound.
    pub degenerate: bool,
}

/// `δ = 2 h_p arcsin(ε/4) / (3π√2 m K_m K L(L−1))` with
/// `h_p = (1/3K_m) min_k min_{x≠y ∈ Ž_k} |x − y|`, where `Ž_k` are the
/// distinct `k`-th coordinates of the zero set.
pub fn delta_budget<T: Real>(
    z: &ZeroSet<T>,
    epsilon: T,
    m: usize,
    k_m: T,
    tol: &ToleranceConfig<T>,
) -> Result<DeltaBudget<T>> {
    check_epsilon(epsilon)?;
    if m != z.dim() {
        return Err(Error::ShapeMismatch(format!("m = {m} for a zero set in {} coordinates", z.dim())));
    }
    if !(k_m > T::zero()) || !k_m.is_finite() {
        return Err(Error::BadParameter(format!("K_m = {}", to_f64(k_m))));
    }
    let coords: Vec<Vec<Complex<T>>> = coordinate_polynomials(z, tol).into_iter().map(|p| p.roots).collect();
    let k_prod = coords.iter().fold(T::one(), |a, c| a * lit(c.len() as f64));
    let l = coords.iter().map(|c| c.len()).max().unwrap_or(1);
    let mut sep = T::infinity();
    for c in &coords {
        for i in 0..c.len() {
            for j in (i + 1)..c.len() {
                sep = sep.min((c[i] - c[j]).norm());
            }
        }
    }
    let l_max = lit::<T>(l as f64);
    if l < 2 {
        return Ok(DeltaBudget {
            h_p: T::infinity(),
            k_m,
            k_prod,
            l_max,
            m,
            epsilon,
            delta: epsilon,
            degenerate: true,
        });
    }
    let three = lit::<T>(3.0);
    let h_p = sep / (three * k_m);
    let denom = three * T::PI() * lit::<T>(2.0).sqrt() * lit(m as f64) * k_m * k_prod * l_max * (l_max - T::one());
    let delta = lit::<T>(2.0) * h_p * (epsilon / lit(4.0)).asin() / denom;
    Ok(DeltaBudget { h_p, k_m, k_prod, l_max, m, epsilon, delta, degenerate: false })
}

/// Conjugation path from `X` to `Y` through tuples unitarily equivalent to
/// `Y`, staying within `ε` of `Y` when the endpoints are close.
///
/// The spectra are matched to get `Ŵ` with `Ŵ X Ŵ^* = Y`; the refined
/// almost-unit correction against the partition of `Y` gives `Z` commuting
/// with `Y` and close to `Ŵ`; the path is `t ↦ e^{(1−t)K} Y e^{−(1−t)K}` with
/// `K` the principal logarithm of `Ŵ^* Z`.
pub fn homomorphism_path<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    z: &ZeroSet<T>,
    epsilon: T,
    tol: &ToleranceConfig<T>,
) -> Result<MatrixPath<T>> {
    check_epsilon(epsilon)?;
    x.same_shape(y)?;
    let sm = match_spectra(x, y, z, tol)?;
    if x == y {
        return Ok(MatrixPath::constant(y.clone()));
    }

    // refined partition of Y: one block per zero-set point present
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (row, &k) in sm.y_labels.iter().enumerate() {
        blocks.entry(k).or_default().push(row);
    }
    let n = y.n();
    let bases = blocks
        .values()
        .map(|rows| rows.iter().map(|&r| sm.y_spectrum.vector(r)).collect())
        .collect();
    let values: Vec<Vec<Complex<T>>> = blocks.keys().map(|&k| z.points()[k].clone()).collect();
    let opu = Opu::from_bases(n, bases, Some(values.clone()));

    let w_in = sm.w_hat.adjoint();
    let corr = refined_unchecked(&w_in, y, &opu, &values, tol);
    let u = w_in.matmul(&corr.z);
    let generator = principal_log_generator(&u, tol, false)?;

    let k_norm = generator.norm();
    let gap_to_one = opnorm(&u.scale(-cone::<T>()).add_scalar(cone()));
    let half_pi = T::FRAC_PI_2();
    let arc = lit::<T>(2.0) * (epsilon / lit(4.0)).asin();
    let ratio = |a: T, b: T| if b > T::zero() { to_f64(a / b) } else { 0.0 };
    let checks = vec![
        BoundCheck {
            name: "refined_almost_unit".into(),
            claimed_constant: to_f64(corr.bound_constant),
            measured_ratio: to_f64(corr.measured_ratio()),
            pass: corr.bound_holds(tol),
        },
        BoundCheck {
            name: "log_norm_vs_chord".into(),
            claimed_constant: to_f64(half_pi),
            measured_ratio: ratio(k_norm, gap_to_one),
            pass: k_norm <= half_pi * gap_to_one + tol.tol_recon,
        },
        BoundCheck {
            name: "log_norm_vs_arcsin".into(),
            claimed_constant: to_f64(arc),
            measured_ratio: to_f64(k_norm),
            pass: k_norm <= arc + tol.tol_recon,
        },
    ];
    let seg = PathSegment::conjugation(y.clone(), generator, T::one(), T::zero())?;
    Ok(MatrixPath::single(seg).with_checks(checks))
}

fn require_member<T: Real>(
    x: &MatrixTuple<T>,
    family: SetFamily,
    p: &MultiPolySystem<T>,
    eps: T,
    which: &str,
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    let r = check_membership(x, family, Some((p, eps)), tol)?;
    if r.in_set {
        return Ok(());
    }
    let msg = format!("{which}: {:?}", r.offending_indices);
    Err(if eps > T::zero() { Error::NotNearlyMember(msg) } else { Error::NotMember(msg) })
}

/// Path inside the algebraic matrix cube of `P` from `X` to `Y`.
///
/// Exceeding the a-priori budget only logs a warning; the path is built
/// anyway and meant to be certified by sampling.
pub fn connect_cube<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    p: &MultiPolySystem<T>,
    z: &ZeroSet<T>,
    epsilon: T,
    tol: &ToleranceConfig<T>,
) -> Result<MatrixPath<T>> {
    check_epsilon(epsilon)?;
    x.same_shape(y)?;
    require_member(x, SetFamily::Cube, p, T::zero(), "X", tol)?;
    require_member(y, SetFamily::Cube, p, T::zero(), "Y", tol)?;
    warn_over_budget(x, y, z, epsilon, tol)?;
    homomorphism_path(x, y, z, epsilon, tol)
}

fn warn_over_budget<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    z: &ZeroSet<T>,
    epsilon: T,
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    if !log::log_enabled!(log::Level::Warn) || z.dim() != x.m() {
        return Ok(());
    }
    let budget = delta_budget(z, epsilon, x.m(), lit(DEFAULT_K_M), tol)?;
    let d = metric(x, y)?;
    if d > budget.delta {
        log::warn!(
            "endpoint distance {:e} exceeds the a-priori budget {:e}; certify the result",
            to_f64(d),
            to_f64(budget.delta)
        );
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Real and imaginary parts of every polynomial after substituting
/// `z_k = x_k + i x_{m+k}`, as polynomials in `2m` real variables, together
/// with the zero set mapped by `z ↦ (Re z, Im z)`.
pub fn realify_system<T: Real>(p: &MultiPolySystem<T>, z: &ZeroSet<T>) -> (MultiPolySystem<T>, ZeroSet<T>) {
    let m = p.nvars();
    let mut polys = Vec::with_capacity(2 * p.len());
    for q in p.polys() {
        let mut acc: BTreeMap<Vec<u32>, Complex<T>> = BTreeMap::new();
        for (e, c) in q.terms() {
            // expand ∏_k (x_k + i y_k)^{e_k}
            let mut partial: Vec<(Vec<u32>, Complex<T>)> = vec![(vec![0; 2 * m], *c)];
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (ek as usize + 1));
                for (mono, coef) in &partial {
                    for a in 0..=ek {
                        let mut mm = mono.clone();
                        mm[k] += ek - a;
                        mm[m + k] += a;
                        let ia = Complex::new(T::zero(), T::one()).powu(a);
                        next.push((mm, *coef * ia * lit::<T>(binomial(ek, a))));
                    }
                }
                partial = next;
            }
            for (mono, coef) in partial {
                *acc.entry(mono).or_insert_with(|| Complex::new(T::zero(), T::zero())) += coef;
            }
        }
        let re = acc.iter().map(|(e, c)| (e.clone(), Complex::new(c.re, T::zero()))).collect();
        let im = acc.iter().map(|(e, c)| (e.clone(), Complex::new(c.im, T::zero()))).collect();
        polys.push(MultiPoly::new(2 * m, re).expect("exponents of length 2m"));
        polys.push(MultiPoly::new(2 * m, im).expect("exponents of length 2m"));
    }
    // a polynomial real-valued on ℝ^{2m} has a vanishing imaginary part; drop it
    polys.retain(|q| q.degree() > 0);
    let sys = MultiPolySystem::new(2 * m, polys).expect("a non-constant polynomial has a non-constant real or imaginary part");
    let pts = z
        .points()
        .iter()
        .map(|pt| {
            let mut v: Vec<Complex<T>> = pt.iter().map(|c| Complex::new(c.re, T::zero())).collect();
            v.extend(pt.iter().map(|c| Complex::new(c.im, T::zero())));
            v
        })
        .collect();
    (sys, ZeroSet::from_points_unchecked(pts))
}

/// Path inside the algebraic matrix disk of `P`: the hermitian parts are
/// connected in the cube of the realified system at `ε/2`, then recombined.
pub fn connect_disk<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    p: &MultiPolySystem<T>,
    z: &ZeroSet<T>,
    epsilon: T,
    tol: &ToleranceConfig<T>,
) -> Result<MatrixPath<T>> {
    check_epsilon(epsilon)?;
    x.same_shape(y)?;
    require_member(x, SetFamily::Disk, p, T::zero(), "X", tol)?;
    require_member(y, SetFamily::Disk, p, T::zero(), "Y", tol)?;
    let (pr, zr) = realify_system(p, z);
    let half = epsilon / lit(2.0);
    connect_cube(&partition(x), &partition(y), &pr, &zr, half, tol)?.juncture()
}

/// Replaces every joint-eigenvalue row by its nearest zero-set point.
///
/// Inputs already on the zero set (every row within `tol_recon`) are
/// returned unchanged.
pub fn round_to_zero_set<T: Real>(
    x: &MatrixTuple<T>,
    z: &ZeroSet<T>,
    tol: &ToleranceConfig<T>,
) -> Result<MatrixTuple<T>> {
    if z.dim() != x.m() {
        return Err(Error::ShapeMismatch(format!(
            "zero set in {} coordinates for a {}-tuple",
            z.dim(),
            x.m()
        )));
    }
    check_commuting_normal(x, tol)?;
    let s = spectrum_unchecked(x, &mut ChaCha8Rng::seed_from_u64(DEFAULT_SEED));
    let half_gap = z.gap() / lit(2.0);
    let mut targets = Vec::with_capacity(s.n());
    let mut worst = T::zero();
    for (row, r) in s.lambda.iter().enumerate() {
        let (k, d) = z.nearest(r);
        if !(d < half_gap) {
            return Err(Error::NoNearbyZero { row, distance: to_f64(d) });
        }
        worst = worst.max(d);
        targets.push(k);
    }
    if worst <= tol.tol_recon {
        return Ok(x.clone());
    }
    let n = s.n();
    let mats = (0..x.m())
        .map(|j| {
            let d: Vec<Complex<T>> = targets.iter().map(|&k| z.points()[k][j]).collect();
            let scaled = CMatrix::from_fn(n, |r, c| s.q[(r, c)] * d[c]);
            let mut a = scaled.mul_adjoint(&s.q);
            if d.iter().all(|v| v.im == T::zero()) {
                a.hermitize();
            }
            a
        })
        .collect();
    Ok(MatrixTuple::from_vec_unchecked(mats))
}

/// Residual gate `δ′ = min(δ₁, ε/2)` for nearly algebraic endpoints, where
/// `δ₁` is a third of the zero-set gap.
pub fn nearly_gate<T: Real>(z: &ZeroSet<T>, epsilon: T) -> T {
    z.delta1().min(epsilon / lit(2.0))
}

/// Three-piece path between ε′-nearly algebraic tuples: a flat segment to
/// the rounding of `X`, an algebraic path at `ε/2` between the roundings,
/// and a flat segment from the rounding of `Y`.
pub fn connect_nearly_algebraic<T: Real>(
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    p: &MultiPolySystem<T>,
    z: &ZeroSet<T>,
    epsilon: T,
    family: SetFamily,
    tol: &ToleranceConfig<T>,
) -> Result<MatrixPath<T>> {
    check_epsilon(epsilon)?;
    x.same_shape(y)?;
    let gate = nearly_gate(z, epsilon);
    require_member(x, family, p, gate, "X", tol)?;
    require_member(y, family, p, gate, "Y", tol)?;
    let xh = round_to_zero_set(x, z, tol)?;
    let yh = round_to_zero_set(y, z, tol)?;
    let half = epsilon / lit(2.0);
    let middle = match family {
        SetFamily::Cube => connect_cube(&xh, &yh, p, z, half, tol)?,
        SetFamily::Disk => connect_disk(&xh, &yh, p, z, half, tol)?,
    };
    let head = flat_path(x, &xh, tol)?;
    let tail = flat_path(&yh, y, tol)?;
    concat(&concat(&head, &middle, tol)?, &tail, tol)
}
