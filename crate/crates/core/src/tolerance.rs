use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Numerical gates used by every predicate in the crate.
///
/// All gates are absolute; inputs are expected to be contractions, so the
/// natural scale is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig<T> {
    pub tol_unitary: T,
    pub tol_recon: T,
    pub tol_commute: T,
    pub tol_member: T,
    pub tol_cluster: T,
}

impl<T: Real> Default for ToleranceConfig<T> {
    fn default() -> Self {
        Self {
            tol_unitary: lit(1e-10),
            tol_recon: lit(1e-10),
            tol_commute: lit(1e-9),
            tol_member: lit(1e-8),
            tol_cluster: lit(1e-6),
        }
    }
}

impl<T: Real> ToleranceConfig<T> {
    /// Checks that every gate is strictly positive and finite.
    pub fn validate(&self) -> Result<()> {
        let gates = [
            ("tol_unitary", self.tol_unitary),
            ("tol_recon", self.tol_recon),
            ("tol_commute", self.tol_commute),
            ("tol_member", self.tol_member),
            ("tol_cluster", self.tol_cluster),
        ];
        for (name, g) in gates {
            if !(g > T::zero()) || !g.is_finite() {
                return Err(Error::BadParameter(format!("{name} = {}", to_f64(g))));
            }
        }
        Ok(())
    }

    /// Multiplies every gate by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            tol_unitary: self.tol_unitary * factor,
            tol_recon: self.tol_recon * factor,
            tol_commute: self.tol_commute * factor,
            tol_member: self.tol_member * factor,
            tol_cluster: self.tol_cluster * factor,
        }
    }

    /// The defaults for `f64`; a single-precision table for anything coarser,
    /// with the gates about a hundred ulps wide.
    pub fn for_precision() -> Self {
        if to_f64(T::epsilon()) <= f64::EPSILON {
            return Self::default();
        }
        Self {
            tol_unitary: lit(1e-5),
            tol_recon: lit(1e-5),
            tol_commute: lit(1e-4),
            tol_member: lit(1e-4),
            tol_cluster: lit(1e-3),
        }
    }
}
