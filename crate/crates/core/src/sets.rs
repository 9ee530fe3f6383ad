//! Tolerance-gated membership in the matrix cube and disk, their algebraic
//! subsets, and the ε-nearly algebraic relaxations.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{norm_upper, opnorm};
use crate::poly::{eval_system, MultiPolySystem};
use crate::scalar::{to_f64, Real};
use crate::tolerance::ToleranceConfig;
use crate::tuple::MatrixTuple;

/// Which ambient set a tuple is meant to live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetFamily {
    /// Commuting hermitian contractions.
    Cube,
    /// Commuting normal contractions.
    Disk,
}

/// Gate that a tuple failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Offense {
    Commutator { j: usize, k: usize, residual: f64 },
    Hermitian { j: usize, residual: f64 },
    Normality { j: usize, residual: f64 },
    Contraction { j: usize, excess: f64 },
    Polynomial { i: usize, residual: f64 },
}

/// Worst residual per gate; `in_set` holds iff every gate passes.
///
/// Residuals below their gate may be reported as a Frobenius-norm upper
/// bound rather than the exact operator norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub in_set: bool,
    pub worst_commutator: f64,
    pub worst_normality: f64,
    pub worst_contraction_excess: f64,
    pub worst_poly_residual: f64,
    pub offending_indices: Vec<Offense>,
}

/// Checks `X` against the cube or disk and, if given, `‖p_j(X)‖ ≤ ε`.
///
/// `ε = 0` selects the exact algebraic set; its gate is `tol_member`.
pub fn check_membership<T: Real>(
    x: &MatrixTuple<T>,
    family: SetFamily,
    constraints: Option<(&MultiPolySystem<T>, T)>,
    tol: &ToleranceConfig<T>,
) -> Result<MembershipReport> {
    let m = x.m();
    let mut off = Vec::new();

    let mut worst_comm = T::zero();
    for j in 0..m {
        for k in (j + 1)..m {
            let r = norm_upper(&x.get(j).commutator(x.get(k)), tol.tol_commute);
            worst_comm = worst_comm.max(r);
            if r > tol.tol_commute {
                off.push(Offense::Commutator { j, k, residual: to_f64(r) });
            }
        }
    }

    let mut worst_normal = T::zero();
    for (j, a) in x.iter().enumerate() {
        let defect = match family {
            SetFamily::Cube => a.hermitian_defect(),
            SetFamily::Disk => a.normality_defect(),
        };
        let r = norm_upper(&defect, tol.tol_member);
        worst_normal = worst_normal.max(r);
        if r > tol.tol_member {
            off.push(match family {
                SetFamily::Cube => Offense::Hermitian { j, residual: to_f64(r) },
                SetFamily::Disk => Offense::Normality { j, residual: to_f64(r) },
            });
        }
    }

    let mut worst_excess = T::zero();
    for (j, a) in x.iter().enumerate() {
        let excess = (opnorm(a) - T::one()).max(T::zero());
        worst_excess = worst_excess.max(excess);
        if excess > tol.tol_member {
            off.push(Offense::Contraction { j, excess: to_f64(excess) });
        }
    }

    let mut worst_poly = T::zero();
    if let Some((sys, eps)) = constraints {
        let gate = eps + tol.tol_member;
        for (i, v) in eval_system(sys, x)?.iter().enumerate() {
            let r = norm_upper(v, gate);
            worst_poly = worst_poly.max(r);
            if r > gate {
                off.push(Offense::Polynomial { i, residual: to_f64(r) });
            }
        }
    }

    Ok(MembershipReport {
        in_set: off.is_empty(),
        worst_commutator: to_f64(worst_comm),
        worst_normality: to_f64(worst_normal),
        worst_contraction_excess: to_f64(worst_excess),
        worst_poly_residual: to_f64(worst_poly),
        offending_indices: off,
    })
}
