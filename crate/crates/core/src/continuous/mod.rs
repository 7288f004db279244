//! Costly deception over a continuous state.
//!
//! The sender observes θ ∈ [θ̲, θ̄], reports r at a lying cost k·(r − θ)²
//! and wants the receiver's action to land at θ + b. Low states separate
//! along [`SeparatingCurve`]; high states pool on the top report, split into
//! pools the receiver can investigate. [`solve_slaph`] builds such an
//! equilibrium for a requested number of pools.

mod curve;
mod prior;
mod slaph;

use serde::{Deserialize, Serialize};

pub use curve::SeparatingCurve;
pub use prior::{Prior, PriorDensity};
pub use slaph::{
    classify_deceivability, evidence_posterior, partition_receiver_value, pool_receiver_value,
    pooled_subactions, solve_slaph, Deceivability, Message, PoolActions, SlaphResiduals,
    SlaphSolution,
};

use crate::error::{GameError, Result};
use crate::numeric::probability;

/// Parameters of the continuous deception game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousGameSpec {
    pub theta_lo: f64,
    pub theta_hi: f64,
    #[serde(default = "uniform")]
    pub prior: PriorDensity,
    /// Sender bias b.
    pub bias_b: f64,
    /// Lying-cost intensity k.
    pub cost_k: f64,
}

fn uniform() -> PriorDensity {
    PriorDensity::Uniform
}

impl ContinuousGameSpec {
    pub fn uniform(theta_lo: f64, theta_hi: f64, bias_b: f64, cost_k: f64) -> Self {
        Self {
            theta_lo,
            theta_hi,
            prior: PriorDensity::Uniform,
            bias_b,
            cost_k,
        }
    }

    pub fn validate(&self) -> Result<Prior> {
        if !(self.bias_b.is_finite() && self.bias_b >= 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "bias b must be finite and >= 0, got {}",
                self.bias_b
            )));
        }
        if !(self.cost_k.is_finite() && self.cost_k >= 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "cost k must be finite and >= 0, got {}",
                self.cost_k
            )));
        }
        Prior::new(self.theta_lo, self.theta_hi, self.prior)
    }

    /// U^S(a, θ, r) = −(a − θ − b)² − k(r − θ)².
    pub fn sender_utility(&self, a: f64, theta: f64, r: f64) -> f64 {
        self.action_utility(a, theta) - self.cost_k * (r - theta).powi(2)
    }

    /// U^A(a, θ) = −(a − θ − b)².
    pub fn action_utility(&self, a: f64, theta: f64) -> f64 {
        -(a - theta - self.bias_b).powi(2)
    }

    /// U^R(a, θ) = −(a − θ)².
    pub fn receiver_utility(&self, a: f64, theta: f64) -> f64 {
        -(a - theta).powi(2)
    }

    /// Separating curve started at θ̲ with reports capped at θ̄.
    pub fn curve(&self) -> Result<SeparatingCurve> {
        Ok(SeparatingCurve::new(self.theta_lo, self.bias_b, self.cost_k)?.with_cap(self.theta_hi))
    }
}

/// θ̂ with σ(θ̂) = θ̄, or `None` when the whole interval separates (b = 0).
pub fn cutoff_state(game: &ContinuousGameSpec) -> Result<Option<f64>> {
    game.validate()?;
    Ok(game.curve()?.cutoff())
}

/// σ(θ) on the given curve.
pub fn separating_sigma(curve: &SeparatingCurve, theta: f64) -> Result<f64> {
    curve.sigma(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionRule {
    Midpoint,
    /// θ^c = lo + fraction·(hi − lo).
    Fraction {
        fraction: f64,
    },
}

impl PartitionRule {
    pub fn split(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            PartitionRule::Midpoint => 0.5 * (lo + hi),
            PartitionRule::Fraction { fraction } => lo + fraction * (hi - lo),
        }
    }
}

/// How the receiver investigates a pool: a split point and two detection rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestigationSpec {
    #[serde(default = "midpoint")]
    pub partition: PartitionRule,
    /// x = γ(e = 0 | Ψ⁰).
    pub tp0: f64,
    /// y = γ(e = 1 | Ψ¹).
    pub tp1: f64,
}

fn midpoint() -> PartitionRule {
    PartitionRule::Midpoint
}

impl InvestigationSpec {
    pub fn midpoint(tp0: f64, tp1: f64) -> Self {
        Self {
            partition: PartitionRule::Midpoint,
            tp0,
            tp1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        probability("tp0", self.tp0)?;
        probability("tp1", self.tp1)?;
        if let PartitionRule::Fraction { fraction } = self.partition {
            if !fraction.is_finite() {
                return Err(GameError::InvalidParameter(
                    "partition fraction must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// γ(e | Ψ^i).
    pub fn emission(&self, e: usize, event: usize) -> f64 {
        let hit = if event == 0 { self.tp0 } else { self.tp1 };
        if e == event {
            hit
        } else {
            1.0 - hit
        }
    }
}

impl Default for InvestigationSpec {
    fn default() -> Self {
        Self::midpoint(0.8, 0.8)
    }
}
