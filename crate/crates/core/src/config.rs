//! Numerical tolerances shared by every stage of the pipeline.
//!
//! A single [`Tolerances`] record is threaded through eigensolves,
//! certificates, moduli and bound verification, and echoed verbatim into
//! reports so that a run can be reproduced from its output alone.

use serde::{Deserialize, Serialize};

/// Every tolerance and iteration cap used by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Jacobi stops once the off-diagonal Frobenius norm falls below
    /// `jacobi_threshold * ||A||_F`.
    pub jacobi_threshold: f64,
    pub jacobi_max_sweeps: usize,
    /// Eigenpair residual bound, scaled by `max(1, |lambda_max|)`.
    pub residual: f64,
    pub orthonormality: f64,
    /// Componentwise eigen-recurrence and Rayleigh-quotient tolerance.
    pub certificate: f64,
    /// Relative tolerance on `sum(lambda) == trace`.
    pub trace: f64,
    /// Tie tolerance for extremal pairs, scaled by `max(1, eta(D))`.
    pub tie: f64,
    /// Denominators below this magnitude are skipped when forming the
    /// ground-state ratio constant.
    pub zero: f64,
    /// Bound verification slack, scaled by `max(1, gap)`.
    pub verify: f64,
    /// Absolute tolerance for the ratio-evolution identity at `t = 0`.
    pub ratio_identity: f64,
    /// Decay-rate certificate slack.
    pub decay_rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi_threshold: 1e-13,
            jacobi_max_sweeps: 100,
            residual: 1e-10,
            orthonormality: 1e-10,
            certificate: 1e-9,
            trace: 1e-8,
            tie: 1e-9,
            zero: 1e-12,
            verify: 1e-9,
            ratio_identity: 1e-8,
            decay_rate: 1e-6,
        }
    }
}

impl Tolerances {
    /// `tol_verify` for a given exact gap.
    pub fn verify_for(&self, gap: f64) -> f64 {
        self.verify * gap.abs().max(1.0)
    }

    /// Tie tolerance for membership in the extremal set, given `eta(D)`.
    pub fn tie_for(&self, eta_max: f64) -> f64 {
        self.tie * eta_max.abs().max(1.0)
    }
}
