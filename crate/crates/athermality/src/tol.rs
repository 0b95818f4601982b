//! Central numerical tolerances.
//!
//! Every threshold used by the library and its verification suites lives
//! here, so that a tolerance appearing in a report can be traced to one
//! named constant.

/// Max-abs elementwise Hermiticity tolerance for operator construction.
pub const HERM_TOL: f64 = 1e-10;

/// Eigenvalue floor for positive semidefiniteness checks.
pub const PSD_FLOOR: f64 = -1e-10;

/// Absolute tolerance on `Tr(rho) = 1` for density matrices.
pub const TRACE_TOL: f64 = 1e-12;

/// Support threshold, relative to the largest eigenvalue. Eigenvalues at or
/// below `SUPP_REL * lambda_max` count as rank deficiency, not signal.
pub const SUPP_REL: f64 = 1e-12;

/// Trace mass allowed outside the support of the second argument before a
/// divergence is declared infinite.
pub const SUPPORT_CONTAINMENT_TOL: f64 = 1e-9;

/// Relative reconstruction residual guaranteed by the eigensolver,
/// `||A - V L V'||_max <= EIG_RECON_REL * max(1, ||A||_max)`.
pub const EIG_RECON_REL: f64 = 1e-9;

/// Kraus completeness residual for channel construction.
pub const CPTP_TOL: f64 = 1e-9;

/// Agreement tolerance between Kraus-side and Choi-side channel action.
pub const CHOI_ACTION_TOL: f64 = 1e-8;

/// Eigenvalues of a Choi matrix below `CHOI_RANK_REL * lambda_max` are
/// discarded when extracting Kraus operators.
pub const CHOI_RANK_REL: f64 = 1e-12;

/// Default trace-norm tolerance for Gibbs preservation and transition checks.
pub const GP_TOL: f64 = 1e-8;

/// Default combined residual at which the Choi feasibility solver accepts.
pub const FEAS_RESIDUAL_TOL: f64 = 1e-7;

/// Residuals a returned feasibility witness must satisfy on independent
/// re-verification (CPTP and both action constraints, trace norm).
pub const WITNESS_TOL: f64 = 1e-6;

/// Monotone gap above which a transition is certified infeasible.
pub const MONOTONE_GAP_TOL: f64 = 1e-9;

/// Default tolerance for the randomized inequality checks.
pub const CHECK_TOL: f64 = 1e-9;

/// Gap a super-additivity counterexample must exceed to count as a witness.
pub const VIOLATION_GAP_MIN: f64 = 1e-6;

/// Replaying a stored witness must reproduce its gap this closely.
pub const WITNESS_REPLAY_TOL: f64 = 1e-10;

/// Ceiling of the continuity ladder: `m(1e-5) <= CONTINUITY_FLOOR_TOL`.
pub const CONTINUITY_FLOOR_TOL: f64 = 1e-3;

/// Largest total Hilbert-space dimension the toolkit supports.
pub const MAX_DIM: usize = 64;

/// Largest per-side dimension for the Choi feasibility solver.
pub const MAX_FEAS_DIM: usize = 4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_ordering() {
        let ordered_pairs = [
            ("supp < herm", SUPP_REL, HERM_TOL),
            ("cptp < choi action", CPTP_TOL, CHOI_ACTION_TOL),
            ("solver residual < witness", FEAS_RESIDUAL_TOL, WITNESS_TOL),
            ("check < violation gap", CHECK_TOL, VIOLATION_GAP_MIN),
        ];
        for (label, lo, hi) in ordered_pairs {
            assert!(lo < hi, "{label}: {lo:e} !< {hi:e}");
        }
    }
}
