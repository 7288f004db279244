//! Brute-force checks of claimed equilibria.
//!
//! Nothing here calls the solvers' equilibrium formulas: the binary checks
//! rely on the game-core utilities and their own Bayes rule, the continuous
//! checks on their own quadrature, root finding and ODE integration, and
//! the multi-stage checks on their own walk of the full game tree.

mod apt;
mod binary;
mod continuous;
mod search;

use serde::{Deserialize, Serialize};

pub use apt::{apt_bellman_residual, enumerate_root, EnumeratedRoot};
pub use binary::verify_binary;
pub use continuous::{verify_continuous, OdeCurve};
pub use search::{exhaustive_pbne_search, GridPbne, MAX_RESOLUTION};

/// Default tolerance for closed-form equilibria.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Default tolerance for grid-based checks.
pub const GRID_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// A named scalar condition that must vanish (or, for slacks, be ≤ 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResidual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_sender_gain: f64,
    pub max_receiver_gain: f64,
    pub indifference_residuals: Vec<f64>,
    pub belief_consistency_residuals: Vec<f64>,
    /// Family-specific equilibrium conditions, as violations (0 when met).
    pub condition_residuals: Vec<ConditionResidual>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub(crate) fn new(
        max_sender_gain: f64,
        max_receiver_gain: f64,
        indifference_residuals: Vec<f64>,
        belief_consistency_residuals: Vec<f64>,
        condition_residuals: Vec<ConditionResidual>,
        tolerance: f64,
    ) -> Self {
        let mut report = Self {
            max_sender_gain,
            max_receiver_gain,
            indifference_residuals,
            belief_consistency_residuals,
            condition_residuals,
            tolerance,
            verdict: Verdict::Fail,
        };
        if report.worst() <= tolerance {
            report.verdict = Verdict::Pass;
        }
        report
    }

    /// Largest gain or residual magnitude; NaN counts as infinite.
    pub fn worst(&self) -> f64 {
        let scalars = [self.max_sender_gain, self.max_receiver_gain];
        scalars
            .into_iter()
            .chain(self.indifference_residuals.iter().map(|r| r.abs()))
            .chain(self.belief_consistency_residuals.iter().map(|r| r.abs()))
            .chain(self.condition_residuals.iter().map(|r| r.value.abs()))
            .fold(
                0.0f64,
                |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) },
            )
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn condition(&self, name: &str) -> Option<f64> {
        self.condition_residuals
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }
}
