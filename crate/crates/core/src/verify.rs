//! Sampled certificates for paths and the uniformity sweep over matrix sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cpa::{cpa_hermitian, cpa_normal};
use crate::error::{Error, Result};
use crate::joint::DEFAULT_SEED;
use crate::linalg::{norm_upper, opnorm, SkewGenerator};
use crate::path::{connect_cube, connect_disk, BoundCheck, MatrixPath};
use crate::poly::{eval_system, MultiPolySystem, ZeroSet};
use crate::random::{random_cube_tuple, random_disk_tuple, random_skew, random_zero_set_tuple};
use crate::scalar::{lit, to_f64, Real};
use crate::sets::SetFamily;
use crate::tolerance::ToleranceConfig;
use crate::tuple::{metric, MatrixTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Worst residuals of a path over `samples` equally spaced parameters,
/// together with the gates they were held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCertificate {
    /// `ð(φ(0), X)` and `ð(φ(1), Y)`.
    pub endpoint_residuals: [f64; 2],
    /// `max_t ð(φ(t), Y)`.
    pub max_ball_distance: f64,
    /// `max_t ð(φ(t), Y) − ε`, clamped at zero.
    pub max_ball_excess: f64,
    pub max_poly_residual: f64,
    /// Bound on `max_t ‖p_i(φ(t))‖`; strict when positive-ε constraints were given.
    pub poly_gate: f64,
    pub max_commutator: f64,
    /// Hermitian defect in the cube, normality defect in the disk.
    pub max_normality: f64,
    pub max_contraction_excess: f64,
    pub bound_checks: Vec<BoundCheck>,
    pub samples: usize,
    pub epsilon: f64,
    pub family: SetFamily,
    pub failed_gates: Vec<String>,
    pub verdict: Verdict,
    pub tolerances: ToleranceConfig<f64>,
    pub seed: u64,
}

impl PathCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Samples `φ(i/(samples−1))` for `i = 0, …, samples−1` and checks the
/// endpoints, the ε-ball around `Y`, the polynomial residuals, pairwise
/// commutation, hermiticity or normality, and contraction.
///
/// `constraints = (P, ε_p)` gates `‖p_i(φ(t))‖ ≤ tol_member` when `ε_p = 0`
/// and `‖p_i(φ(t))‖ < ε_p` otherwise.  The path's own bound checks are
/// copied over but never affect the verdict.
#[allow(clippy::too_many_arguments)]
pub fn certify_path<T: Real>(
    path: &MatrixPath<T>,
    x: &MatrixTuple<T>,
    y: &MatrixTuple<T>,
    constraints: Option<(&MultiPolySystem<T>, T)>,
    epsilon: T,
    family: SetFamily,
    samples: usize,
    tol: &ToleranceConfig<T>,
) -> Result<PathCertificate> {
    if samples < 3 {
        return Err(Error::BadParameter(format!("{samples} samples, need at least 3")));
    }
    x.same_shape(y)?;
    if path.m() != x.m() || path.n() != x.n() {
        return Err(Error::ShapeMismatch(format!(
            "path of {}-tuples of size {} against endpoints of {}-tuples of size {}",
            path.m(),
            path.n(),
            x.m(),
            x.n()
        )));
    }
    if let Some((sys, _)) = constraints {
        if sys.nvars() != x.m() {
            return Err(Error::ShapeMismatch(format!(
                "system in {} variables for {}-tuples",
                sys.nvars(),
                x.m()
            )));
        }
    }

    let (poly_gate, strict) = match constraints {
        Some((_, e)) if e > T::zero() => (e, true),
        _ => (tol.tol_member, false),
    };
    let start = metric(&path.start(), x)?;
    let end = metric(&path.end(), y)?;
    let mut ball = T::zero();
    let mut poly = T::zero();
    let mut comm = T::zero();
    let mut normal = T::zero();
    let mut contraction = T::zero();
    let last = lit::<T>((samples - 1) as f64);
    for i in 0..samples {
        let s = path.sample(lit::<T>(i as f64) / last);
        ball = ball.max(metric(&s, y)?);
        if let Some((sys, _)) = constraints {
            for v in eval_system(sys, &s)? {
                poly = poly.max(norm_upper(&v, poly_gate));
            }
        }
        for j in 0..s.m() {
            for k in (j + 1)..s.m() {
                comm = comm.max(norm_upper(&s.get(j).commutator(s.get(k)), tol.tol_commute));
            }
        }
        for a in s.iter() {
            let defect = match family {
                SetFamily::Cube => a.hermitian_defect(),
                SetFamily::Disk => a.normality_defect(),
            };
            normal = normal.max(norm_upper(&defect, tol.tol_member));
            contraction = contraction.max(opnorm(a) - T::one());
        }
    }
    let excess = (ball - epsilon).max(T::zero());

    let mut failed = Vec::new();
    let mut gate = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    gate("endpoint_start", start <= tol.tol_recon);
    gate("endpoint_end", end <= tol.tol_recon);
    gate("ball", excess <= tol.tol_recon);
    gate("polynomial", if strict { poly < poly_gate } else { poly <= poly_gate });
    gate("commutator", comm <= tol.tol_commute);
    gate("normality", normal <= tol.tol_member);
    gate("contraction", contraction <= tol.tol_member);

    let f = to_f64::<T>;
    Ok(PathCertificate {
        endpoint_residuals: [f(start), f(end)],
        max_ball_distance: f(ball),
        max_ball_excess: f(excess),
        max_poly_residual: f(poly),
        poly_gate: f(poly_gate),
        max_commutator: f(comm),
        max_normality: f(normal),
        max_contraction_excess: f(contraction.max(T::zero())),
        bound_checks: path.checks().to_vec(),
        samples,
        epsilon: f(epsilon),
        family,
        verdict: if failed.is_empty() { Verdict::Pass } else { Verdict::Fail },
        failed_gates: failed,
        tolerances: tolerances_f64(tol),
        seed: DEFAULT_SEED,
    })
}

/// `max(129, 64k + 1)` for a path of `k` segments, so every segment gets at
/// least 65 samples.
pub fn default_samples<T: Real>(path: &MatrixPath<T>) -> usize {
    (64 * path.segments().len() + 1).max(129)
}

fn tolerances_f64<T: Real>(tol: &ToleranceConfig<T>) -> ToleranceConfig<f64> {
    ToleranceConfig {
        tol_unitary: to_f64(tol.tol_unitary),
        tol_recon: to_f64(tol.tol_recon),
        tol_commute: to_f64(tol.tol_commute),
        tol_member: to_f64(tol.tol_member),
        tol_cluster: to_f64(tol.tol_cluster),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub epsilon: f64,
    pub dims: Vec<usize>,
    pub seed: u64,
    /// Bound on `ð(X, Y)` for every generated pair, the same for every `n`.
    pub magnitude: f64,
    pub samples: usize,
    /// Grid width of the CPA run recorded alongside each row.
    pub cpa_delta: f64,
    pub family: SetFamily,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.25,
            dims: vec![2, 4, 8, 16, 32, 64],
            seed: 7,
            magnitude: 0.05,
            samples: 129,
            cpa_delta: 0.5,
            family: SetFamily::Cube,
        }
    }
}

/// Distance of each certificate residual to its gate; negative means the
/// gate failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateMargins {
    pub endpoint: f64,
    pub ball: f64,
    pub polynomial: f64,
    pub commutator: f64,
    pub normality: f64,
    pub contraction: f64,
}

impl GateMargins {
    fn of(c: &PathCertificate) -> Self {
        let t = &c.tolerances;
        Self {
            endpoint: t.tol_recon - c.endpoint_residuals[0].max(c.endpoint_residuals[1]),
            ball: c.epsilon - c.max_ball_distance,
            polynomial: c.poly_gate - c.max_poly_residual,
            commutator: t.tol_commute - c.max_commutator,
            normality: t.tol_member - c.max_normality,
            contraction: t.tol_member - c.max_contraction_excess,
        }
    }

    pub fn worst(&self) -> f64 {
        [self.endpoint, self.ball, self.polynomial, self.commutator, self.normality, self.contraction]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub delta_used: f64,
    /// Measured `ð(X, Y)`.
    pub distance: f64,
    pub success: bool,
    pub margins: Option<GateMargins>,
    pub cpa_max_degree: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_success(&self) -> bool {
        self.rows.iter().all(|r| r.success)
    }

    pub const CSV_HEADER: [&'static str; 12] = [
        "n",
        "delta_used",
        "distance",
        "success",
        "margin_endpoint",
        "margin_ball",
        "margin_polynomial",
        "margin_commutator",
        "margin_normality",
        "margin_contraction",
        "cpa_max_degree",
        "error",
    ];

    /// One record per row, in the order of [`Self::CSV_HEADER`].
    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let num = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                let m = r.margins.as_ref();
                vec![
                    r.n.to_string(),
                    r.delta_used.to_string(),
                    r.distance.to_string(),
                    r.success.to_string(),
                    num(m.map(|m| m.endpoint)),
                    num(m.map(|m| m.ball)),
                    num(m.map(|m| m.polynomial)),
                    num(m.map(|m| m.commutator)),
                    num(m.map(|m| m.normality)),
                    num(m.map(|m| m.contraction)),
                    r.cpa_max_degree.map(|d| d.to_string()).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Per-row generator seed, a function of `(seed, n)` only.
pub fn row_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Random pair `(X, Y)` on `Z` with `Y = e^K X e^{−K}` and
/// `‖K‖ = magnitude / (2 max|z|)`, so that `ð(X, Y) ≤ magnitude`.
pub fn conjugated_pair<T: Real>(
    z: &ZeroSet<T>,
    n: usize,
    magnitude: T,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig<T>,
) -> Result<(MatrixTuple<T>, MatrixTuple<T>)> {
    let x = random_zero_set_tuple(z, n, rng);
    let radius = z.points().iter().flatten().fold(T::zero(), |a, c| a.max(c.norm()));
    let knorm = if radius > T::zero() { magnitude / (lit::<T>(2.0) * radius) } else { magnitude };
    let k = random_skew(n, knorm, rng);
    let u = SkewGenerator::new(&k, tol)?.exp(T::one());
    let mut y = x.conjugate_by(&u);
    if family_of(z) == SetFamily::Cube {
        y = y.map(|a| {
            let mut h = a.clone();
            h.hermitize();
            h
        });
    }
    Ok((x, y))
}

fn family_of<T: Real>(z: &ZeroSet<T>) -> SetFamily {
    if z.points().iter().flatten().all(|c| c.im == T::zero()) {
        SetFamily::Cube
    } else {
        SetFamily::Disk
    }
}

/// For every `n` in `dims`: connect a random pair on `Z` at the fixed
/// distance bound `magnitude`, certify the path, and record the largest
/// minimal-polynomial degree of a CPA run at `cpa_delta` on a random tuple of
/// the same shape.  Failures are recorded per row.
pub fn uniformity_sweep<T: Real>(
    p: &MultiPolySystem<T>,
    z: &ZeroSet<T>,
    cfg: &SweepConfig,
    tol: &ToleranceConfig<T>,
) -> Result<SweepReport> {
    if cfg.dims.is_empty() {
        return Err(Error::BadParameter("empty dimension list".into()));
    }
    let mut dims = cfg.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let rows = dims.iter().map(|&n| sweep_row(p, z, cfg, n, tol)).collect();
    Ok(SweepReport { config: SweepConfig { dims, ..cfg.clone() }, rows })
}

fn sweep_row<T: Real>(
    p: &MultiPolySystem<T>,
    z: &ZeroSet<T>,
    cfg: &SweepConfig,
    n: usize,
    tol: &ToleranceConfig<T>,
) -> SweepRow {
    let mut row = SweepRow {
        n,
        delta_used: cfg.magnitude,
        distance: f64::NAN,
        success: false,
        margins: None,
        cpa_max_degree: None,
        error: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(row_seed(cfg.seed, n));
    let eps = lit::<T>(cfg.epsilon);
    let run = |rng: &mut ChaCha8Rng, row: &mut SweepRow| -> Result<PathCertificate> {
        let (x, y) = conjugated_pair(z, n, lit(cfg.magnitude), rng, tol)?;
        row.distance = to_f64(metric(&x, &y)?);
        let path = match cfg.family {
            SetFamily::Cube => connect_cube(&x, &y, p, z, eps, tol)?,
            SetFamily::Disk => connect_disk(&x, &y, p, z, eps, tol)?,
        };
        certify_path(&path, &x, &y, Some((p, T::zero())), eps, cfg.family, cfg.samples, tol)
    };
    match run(&mut rng, &mut row) {
        Ok(cert) => {
            row.success = cert.passed();
            row.margins = Some(GateMargins::of(&cert));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    let cpa = match cfg.family {
        SetFamily::Cube => cpa_hermitian(&random_cube_tuple(p.nvars(), n, &mut rng), lit(cfg.cpa_delta), tol),
        SetFamily::Disk => cpa_normal(&random_disk_tuple(p.nvars(), n, &mut rng), lit(cfg.cpa_delta), tol),
    };
    match cpa {
        Ok(r) => row.cpa_max_degree = Some(r.max_degree()),
        Err(e) => {
            row.success = false;
            row.error.get_or_insert_with(|| format!("cpa: {e}"));
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::path::connect_cube;
    use crate::poly::{validate_zero_set, MultiPoly};
    use num_complex::Complex;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    fn pm_one() -> (MultiPolySystem<f64>, ZeroSet<f64>) {
        let p = MultiPoly::new(1, vec![(vec![2], c(1.0)), (vec![0], c(-1.0))]).unwrap();
        let s = MultiPolySystem::new(1, vec![p]).unwrap();
        let z = validate_zero_set(&s, &[vec![c(1.0)], vec![c(-1.0)]], &tol()).unwrap();
        (s, z)
    }

    fn rotation(th: f64) -> CMatrix<f64> {
        CMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]).unwrap()
    }

    #[test]
    fn constant_path_at_member_passes() {
        let (s, _) = pm_one();
        let x = MatrixTuple::single(CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let cert = certify_path(&MatrixPath::constant(x.clone()), &x, &x, Some((&s, 0.0)), 0.01, SetFamily::Cube, 5, &tol())
            .unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert_eq!(cert.max_ball_distance, 0.0);
        assert_eq!(cert.max_poly_residual, 0.0);
        assert_eq!(cert.samples, 5);
    }

    #[test]
    fn wrong_end_fails() {
        let x = MatrixTuple::single(CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let y = MatrixTuple::single(CMatrix::from_real_diag(&[2.0, -1.0])).unwrap();
        let cert = certify_path(&MatrixPath::constant(x.clone()), &x, &y, None, 0.25, SetFamily::Cube, 3, &tol()).unwrap();
        assert!(!cert.passed());
        assert!((cert.endpoint_residuals[1] - 1.0).abs() < 1e-12);
        assert!(cert.failed_gates.contains(&"endpoint_end".to_string()));
        assert!(cert.failed_gates.contains(&"ball".to_string()));
    }

    #[test]
    fn rotation_instance_certified() {
        let (s, z) = pm_one();
        let x = MatrixTuple::single(CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let y = x.conjugate_by(&rotation(0.05));
        let path = connect_cube(&x, &y, &s, &z, 0.25, &tol()).unwrap();
        let cert = certify_path(&path, &x, &y, Some((&s, 0.0)), 0.25, SetFamily::Cube, 129, &tol()).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(cert.max_poly_residual <= 1e-8);
        // ð(X, Y) = ‖[[cos 2θ − 1, sin 2θ], …]‖ = 2 sin θ along the whole rotation
        assert!((cert.max_ball_distance - 2.0 * 0.05f64.sin()).abs() < 1e-12);
        let again = certify_path(&path, &x, &y, Some((&s, 0.0)), 0.25, SetFamily::Cube, 129, &tol()).unwrap();
        assert_eq!(cert, again);
    }

    #[test]
    fn rejects_few_samples_and_bad_shapes() {
        let x = MatrixTuple::single(CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let p = MatrixPath::constant(x.clone());
        assert!(matches!(
            certify_path(&p, &x, &x, None, 0.1, SetFamily::Cube, 2, &tol()),
            Err(Error::BadParameter(_))
        ));
        let big = MatrixTuple::single(CMatrix::from_real_diag(&[1.0, -1.0, 1.0])).unwrap();
        assert!(matches!(
            certify_path(&p, &big, &big, None, 0.1, SetFamily::Cube, 3, &tol()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn nearly_gate_is_strict() {
        let (s, _) = pm_one();
        let x = MatrixTuple::single(CMatrix::from_real_diag(&[0.9, -1.0])).unwrap();
        // ‖X² − 1‖ = 0.19
        let p = MatrixPath::constant(x.clone());
        let ok = certify_path(&p, &x, &x, Some((&s, 0.2)), 0.1, SetFamily::Cube, 3, &tol()).unwrap();
        assert!(ok.passed());
        let bad = certify_path(&p, &x, &x, Some((&s, 0.18)), 0.1, SetFamily::Cube, 3, &tol()).unwrap();
        assert_eq!(bad.failed_gates, vec!["polynomial".to_string()]);
    }

    #[test]
    fn sweep_single_dim_reproducible() {
        let (s, z) = pm_one();
        let cfg = SweepConfig { dims: vec![2], samples: 17, ..SweepConfig::default() };
        let a = uniformity_sweep(&s, &z, &cfg, &tol()).unwrap();
        let b = uniformity_sweep(&s, &z, &cfg, &tol()).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert!(a.all_success(), "{a:?}");
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert!(a.rows[0].distance <= cfg.magnitude);
        assert!(uniformity_sweep(&s, &z, &SweepConfig { dims: vec![], ..cfg }, &tol()).is_err());
    }

    #[test]
    fn sweep_rows_sorted_and_uniform() {
        let (s, z) = pm_one();
        let cfg = SweepConfig { dims: vec![8, 2, 4], samples: 9, ..SweepConfig::default() };
        let r = uniformity_sweep(&s, &z, &cfg, &tol()).unwrap();
        let ns: Vec<usize> = r.rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![2, 4, 8]);
        assert!(r.all_success());
        assert!(r.rows.iter().all(|row| row.cpa_max_degree.unwrap() <= 4));
        assert_eq!(r.csv_records()[0].len(), SweepReport::CSV_HEADER.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn verdict_monotone_in_epsilon(seed in 0u64..500, eps in 0.0f64..0.3, extra in 0.0f64..0.2) {
            let (s, z) = pm_one();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = conjugated_pair(&z, 3, 0.2, &mut rng, &tol()).unwrap();
            let path = connect_cube(&x, &y, &s, &z, 0.3, &tol()).unwrap();
            let a = certify_path(&path, &x, &y, Some((&s, 0.0)), eps, SetFamily::Cube, 3, &tol()).unwrap();
            let b = certify_path(&path, &x, &y, Some((&s, 0.0)), eps + extra, SetFamily::Cube, 3, &tol()).unwrap();
            prop_assert!(b.max_ball_excess <= a.max_ball_excess);
            if a.passed() {
                prop_assert!(b.passed());
            }
        }

        #[test]
        fn conjugated_pair_within_magnitude(seed in 0u64..500, n in 1usize..6, mag in 0.0f64..0.2) {
            let (_, z) = pm_one();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = conjugated_pair(&z, n, mag, &mut rng, &tol()).unwrap();
            prop_assert!(metric(&x, &y).unwrap() <= mag + 1e-12);
        }
    }
}
