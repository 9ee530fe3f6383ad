//! Joint spectra of commuting normal families and the algebra of orthogonal
//! partitions of unity built from them.

pub(crate) mod opu;
pub(crate) mod spectrum;

pub use opu::{
    component_opus, opu_from_spectrum, projective_polar, projective_polar_defect, projective_refinement, Opu,
};
pub use spectrum::{
    joint_diagonalize, joint_diagonalize_with_rng, joint_spectral_projector, JointSpectrum, DEFAULT_SEED,
};
