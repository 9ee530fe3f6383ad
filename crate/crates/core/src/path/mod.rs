//! Paths between commuting normal tuples: segments and their composition,
//! spectral matching, the almost-unit correction, and the connectivity
//! constructions for algebraic cubes and disks.

mod connect;
mod correction;
mod matching;
mod segment;

pub use connect::{
    connect_cube, connect_disk, connect_nearly_algebraic, delta_budget, epsilon_limit, homomorphism_path,
    nearly_gate, realify_system, round_to_zero_set, DeltaBudget, DEFAULT_K_M,
};
pub use correction::{commuting_correction, refined_commuting_correction, CorrectionResult};
pub use matching::{bottleneck_assignment, isospectral_match, match_spectra, SpectralMatch};
pub use segment::{concat, flat_path, BoundCheck, ConjugationSegment, MatrixPath, PathSegment};
