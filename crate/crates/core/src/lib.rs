//! Certified paths between commuting normal matrix tuples in algebraic
//! matrix sets.
//!
//! The crate works with m-tuples of pairwise commuting normal contractions
//! whose joint spectra lie in the finite zero set of a polynomial system.
//! It builds short piecewise paths between nearby tuples that stay inside
//! the set (flat segments and unitary conjugations), preconditions tuples by
//! quantising their joint spectra on a grid, and checks every path by dense
//! sampling.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the common instantiations.
//!
//! ```
//! use algpath::{CMatrix, MatrixTuple, ToleranceConfig, joint_diagonalize};
//!
//! let x = MatrixTuple::single(CMatrix::<f64>::from_real_diag(&[0.5, -0.25])).unwrap();
//! let s = joint_diagonalize(&x, &ToleranceConfig::default()).unwrap();
//! assert_eq!(s.lambda[0][0].re, -0.25);
//! ```

pub mod cpa;
pub mod error;
pub mod joint;
pub mod linalg;
pub mod path;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod sets;
pub mod tolerance;
pub mod tuple;
pub mod verify;

pub use cpa::{build_grid, cpa_hermitian, cpa_normal, quantize_scalar, retract_to_grid, CpaResult, Grid};
pub use error::{Error, Result};
pub use joint::{
    component_opus, joint_diagonalize, joint_diagonalize_with_rng, joint_spectral_projector, opu_from_spectrum,
    projective_polar, projective_refinement, JointSpectrum, Opu,
};
pub use linalg::{
    full_pinching, hermitian_eigen, operator_norm, polar_decompose, principal_skew_log, unitary_exp, CMatrix,
    EigenDecomposition, SkewGenerator,
};
pub use path::{
    commuting_correction, concat, connect_cube, connect_disk, connect_nearly_algebraic, delta_budget, flat_path,
    homomorphism_path, isospectral_match, refined_commuting_correction, round_to_zero_set, CorrectionResult,
    DeltaBudget, MatrixPath, PathSegment,
};
pub use poly::{
    coordinate_polynomials, eval_poly, eval_system, validate_zero_set, MonicPoly, MultiPoly, MultiPolySystem, ZeroSet,
};
pub use scalar::{Real, Scalar};
pub use sets::{check_membership, MembershipReport, Offense, SetFamily};
pub use tolerance::ToleranceConfig;
pub use tuple::{juncture, metric, partition, MatrixTuple};
pub use verify::{certify_path, default_samples, uniformity_sweep, PathCertificate, SweepConfig, SweepReport, Verdict};

pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type MatrixTuple64 = MatrixTuple<f64>;
pub type MatrixTuple32 = MatrixTuple<f32>;
pub type ZeroSet64 = ZeroSet<f64>;
pub type MultiPolySystem64 = MultiPolySystem<f64>;
pub type MatrixPath64 = MatrixPath<f64>;
pub type MatrixPath32 = MatrixPath<f32>;
pub type Tolerances64 = ToleranceConfig<f64>;
pub type Tolerances32 = ToleranceConfig<f32>;
