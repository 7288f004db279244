//! Multi-stage attacker/defender game with Beta beliefs over the attacker's type.
//!
//! A user of type θ ∈ [0, 1] (larger is more dangerous) acts at each of K
//! stages; the defender observes the action, responds, and the plant moves
//! to a new state. The defender's belief is Beta(a, b); every user action
//! carries likelihood ∝ θ^s (1 − θ)^t, so beliefs update by adding
//! exponents. Backward induction runs over (stage, plant state, belief)
//! with the attacker's type discretised into buckets.

mod simulate;
mod solve;
mod statics;
mod toy;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

pub use simulate::{monte_carlo, simulate, MonteCarloSummary, TrajectoryRecord, TrajectoryStep};
pub use solve::{
    backward_induction, best_response_attacker, deviation_gain, evaluate_policies, AptSolution,
    Decision, NodeKey, NodeValues, Player, PolicyPair, ValueTable,
};
pub use statics::{comparative_statics, threat_sweep, StaticsPoint};
pub use toy::ToyPlantConfig;

use crate::error::{GameError, Result};

/// Stage payoff `constant + slope·θ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearPayoff {
    pub constant: f64,
    #[serde(default)]
    pub slope: f64,
}

impl LinearPayoff {
    pub const ZERO: LinearPayoff = LinearPayoff {
        constant: 0.0,
        slope: 0.0,
    };

    pub fn new(constant: f64, slope: f64) -> Self {
        Self { constant, slope }
    }

    pub fn at(&self, theta: f64) -> f64 {
        self.constant + self.slope * theta
    }
}

/// Beta(a, b) belief over the attacker's type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefState {
    pub a: f64,
    pub b: f64,
}

impl BeliefState {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let s = Self { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.a > 0.0 && self.b > 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "beta belief needs positive finite parameters, got ({}, {})",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// Mean type a/(a + b).
    pub fn mean_threat(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        if theta >= 1.0 {
            return 1.0;
        }
        Beta::new(self.a, self.b)
            .map(|d| d.cdf(theta))
            .unwrap_or(f64::NAN)
    }

    /// The belief shifted by integer offsets.
    pub fn shifted(&self, da: u32, db: u32) -> Self {
        Self {
            a: self.a + da as f64,
            b: self.b + db as f64,
        }
    }
}

/// Conjugate update after observing an action with likelihood ∝ θ^s (1 − θ)^t.
pub fn belief_update(belief: BeliefState, s: i64, t: i64) -> Result<BeliefState> {
    belief.validate()?;
    if s < 0 || t < 0 {
        return Err(GameError::InvalidParameter(format!(
            "likelihood exponents must be non-negative, got ({s}, {t})"
        )));
    }
    BeliefState::new(belief.a + s as f64, belief.b + t as f64)
}

/// Equal-width partition of [0, 1] with midpoint representatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeBuckets {
    pub edges: Vec<f64>,
    pub representatives: Vec<f64>,
}

impl TypeBuckets {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GameError::InvalidParameter(
                "need at least one type bucket".into(),
            ));
        }
        let edges: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let representatives = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self {
            edges,
            representatives,
        })
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Probability of each bucket under `belief`.
    pub fn masses(&self, belief: &BeliefState) -> Vec<f64> {
        let cdf: Vec<f64> = self.edges.iter().map(|e| belief.cdf(*e)).collect();
        let raw: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|m| m / total).collect()
    }

    pub fn bucket_of(&self, theta: f64) -> usize {
        let n = self.len();
        ((theta * n as f64).floor() as usize).min(n - 1)
    }
}

/// Finite multi-stage game. Tables are indexed `[stage][state][message][action]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptGameSpec {
    pub horizon: usize,
    pub n_states: usize,
    pub messages: Vec<String>,
    pub actions: Vec<String>,
    /// Exponents (s, t) of each message's likelihood θ^s (1 − θ)^t.
    pub likelihood: Vec<[u32; 2]>,
    pub transition: Vec<Vec<Vec<Vec<usize>>>>,
    pub sender_utility: Vec<Vec<Vec<Vec<LinearPayoff>>>>,
    pub receiver_utility: Vec<Vec<Vec<Vec<LinearPayoff>>>>,
    pub initial_state: usize,
    pub prior: BeliefState,
    /// Message counted as an attack in summaries.
    #[serde(default = "one")]
    pub attack_message: usize,
    /// Action counted as a defence in summaries.
    #[serde(default = "one")]
    pub defend_action: usize,
}

fn one() -> usize {
    1
}

impl AptGameSpec {
    pub fn n_messages(&self) -> usize {
        self.messages.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GameError::InvalidParameter(msg));
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.n_states == 0 || self.messages.is_empty() || self.actions.is_empty() {
            return bad("need at least one state, message and action".into());
        }
        if self.likelihood.len() != self.n_messages() {
            return bad("one likelihood exponent pair per message".into());
        }
        if self.initial_state >= self.n_states {
            return bad(format!("initial state {} out of range", self.initial_state));
        }
        if self.attack_message >= self.n_messages() || self.defend_action >= self.n_actions() {
            return bad("attack message or defend action out of range".into());
        }
        self.prior.validate()?;
        let dims = [
            self.horizon,
            self.n_states,
            self.n_messages(),
            self.n_actions(),
        ];
        check_dims("transition", &self.transition, dims)?;
        check_dims("sender_utility", &self.sender_utility, dims)?;
        check_dims("receiver_utility", &self.receiver_utility, dims)?;
        for (k, stage) in self.transition.iter().enumerate() {
            for row in stage.iter().flatten() {
                if let Some(x) = row.iter().find(|x| **x >= self.n_states) {
                    return bad(format!(
                        "transition at stage {k} leads to unknown state {x}"
                    ));
                }
            }
        }
        let finite = |t: &Vec<Vec<Vec<Vec<LinearPayoff>>>>| {
            t.iter()
                .flatten()
                .flatten()
                .flatten()
                .all(|p| p.constant.is_finite() && p.slope.is_finite())
        };
        if !finite(&self.sender_utility) || !finite(&self.receiver_utility) {
            return bad("utilities must be finite".into());
        }
        Ok(())
    }

    pub fn next_state(&self, k: usize, x: usize, m: usize, a: usize) -> usize {
        self.transition[k][x][m][a]
    }

    pub fn sender_payoff(&self, k: usize, x: usize, m: usize, a: usize, theta: f64) -> f64 {
        self.sender_utility[k][x][m][a].at(theta)
    }

    pub fn receiver_payoff(&self, k: usize, x: usize, m: usize, a: usize, theta: f64) -> f64 {
        self.receiver_utility[k][x][m][a].at(theta)
    }

    pub fn with_prior(&self, prior: BeliefState) -> Self {
        Self {
            prior,
            ..self.clone()
        }
    }
}

fn check_dims<T>(name: &str, table: &[Vec<Vec<Vec<T>>>], dims: [usize; 4]) -> Result<()> {
    let ok = table.len() == dims[0]
        && table.iter().all(|s| {
            s.len() == dims[1]
                && s.iter()
                    .all(|x| x.len() == dims[2] && x.iter().all(|m| m.len() == dims[3]))
        });
    if ok {
        Ok(())
    } else {
        Err(GameError::InvalidParameter(format!(
            "{name} must have shape {dims:?} (stage, state, message, action)"
        )))
    }
}

/// Solver resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptOptions {
    #[serde(default = "default_buckets")]
    pub buckets: usize,
    /// Mixed defender strategies are multiples of 1/`defender_grid`.
    #[serde(default = "default_grid")]
    pub defender_grid: usize,
}

fn default_buckets() -> usize {
    8
}

fn default_grid() -> usize {
    100
}

impl Default for AptOptions {
    fn default() -> Self {
        Self {
            buckets: default_buckets(),
            defender_grid: default_grid(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::Continuous;

    #[test]
    fn conjugate_updates() {
        let b = BeliefState::new(1.0, 1.0).unwrap();
        assert_eq!(
            belief_update(b, 1, 0).unwrap(),
            BeliefState::new(2.0, 1.0).unwrap()
        );
        assert_eq!(belief_update(b, 0, 0).unwrap(), b);
        let b = BeliefState::new(9.0, 1.0).unwrap();
        assert_eq!(
            belief_update(b, 0, 1).unwrap(),
            BeliefState::new(9.0, 2.0).unwrap()
        );
        assert!(belief_update(b, -1, 0).is_err());
    }

    #[test]
    fn update_matches_numerical_bayes() {
        let prior = BeliefState::new(2.5, 1.5).unwrap();
        let post = belief_update(prior, 2, 1).unwrap();
        let p = Beta::new(prior.a, prior.b).unwrap();
        let q = Beta::new(post.a, post.b).unwrap();
        let n = 10_000;
        let h = 1.0 / n as f64;
        let trapezoid = |f: &dyn Fn(f64) -> f64| {
            (0..=n)
                .map(|j| {
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    w * f(j as f64 * h)
                })
                .sum::<f64>()
                * h
        };
        let joint = |t: f64| p.pdf(t) * t * t * (1.0 - t);
        let z = trapezoid(&joint);
        let tv = 0.5 * trapezoid(&|t| (joint(t) / z - q.pdf(t)).abs());
        assert!(tv < 1e-6, "{tv}");
    }

    #[test]
    fn bucket_masses_sum_to_one() {
        let buckets = TypeBuckets::new(8).unwrap();
        let m = buckets.masses(&BeliefState::new(9.0, 1.0).unwrap());
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m[7] > m[0]);
        assert_eq!(buckets.bucket_of(1.0), 7);
        assert_eq!(buckets.bucket_of(0.0), 0);
        assert_eq!(buckets.representatives[0], 1.0 / 16.0);
    }
}
