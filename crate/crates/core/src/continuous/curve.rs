use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Separating report strategy σ(θ) started at σ(θ_s) = θ_s.
///
/// With u = σ − θ the curve satisfies θ = θ_s − u − (b/k)·ln(1 − k·u/b).
/// Internally it is parameterised by w = −ln(1 − k·u/b), which gives
/// σ = θ_s + (b/k)·w and k(θ − θ_s)/b = w + e^{−w} − 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparatingCurve {
    pub theta_start: f64,
    pub b: f64,
    pub k: f64,
    /// Largest admissible report; states whose report would exceed it are beyond the cutoff.
    pub report_cap: Option<f64>,
}

impl SeparatingCurve {
    pub fn new(theta_start: f64, b: f64, k: f64) -> Result<Self> {
        if !(theta_start.is_finite() && b.is_finite() && k.is_finite()) {
            return Err(GameError::InvalidParameter(
                "curve parameters must be finite".into(),
            ));
        }
        if b < 0.0 {
            return Err(GameError::InvalidParameter(format!(
                "bias b must be >= 0, got {b}"
            )));
        }
        if k <= 0.0 && b > 0.0 {
            return Err(GameError::InvalidParameter(format!(
                "cost intensity k must be > 0 when b > 0, got {k}"
            )));
        }
        Ok(Self {
            theta_start,
            b,
            k,
            report_cap: None,
        })
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.report_cap = Some(cap);
        self
    }

    /// State at which σ reaches the report cap.
    pub fn cutoff(&self) -> Option<f64> {
        let cap = self.report_cap?;
        if self.b == 0.0 {
            return None;
        }
        let w = self.k * (cap - self.theta_start) / self.b;
        Some(self.theta_start + self.b / self.k * (w + (-w).exp_m1()))
    }

    /// σ(θ) − θ.
    pub fn inflation(&self, theta: f64) -> Result<f64> {
        Ok(self.sigma(theta)? - theta)
    }

    pub fn sigma(&self, theta: f64) -> Result<f64> {
        if theta < self.theta_start {
            return Err(GameError::InvalidParameter(format!(
                "state {theta} lies below the curve start {}",
                self.theta_start
            )));
        }
        if self.b == 0.0 {
            return Ok(theta);
        }
        if let (Some(cut), Some(cap)) = (self.cutoff(), self.report_cap) {
            if theta > cut + 1e-15 * (1.0 + cut.abs()) {
                return Err(GameError::BeyondCutoff { theta, cutoff: cut });
            }
            if theta >= cut {
                return Ok(cap);
            }
        }
        let z = self.k * (theta - self.theta_start) / self.b;
        Ok(self.theta_start + self.b / self.k * solve_w(z))
    }
}

/// Root of w + e^{−w} − 1 = z for z ≥ 0.
///
/// The left side is convex and increasing on w ≥ 0, so Newton from the
/// right of the root descends monotonically.
fn solve_w(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let mut w = z + 1.0;
    for _ in 0..200 {
        let h = w + (-w).exp_m1() - z;
        let dh = -(-w).exp_m1();
        if dh <= 0.0 {
            break;
        }
        let next = w - h / dh;
        if !(next < w) || next <= 0.0 {
            break;
        }
        let done = w - next <= 1e-16 * w;
        w = next;
        if done {
            break;
        }
    }
    w
}
