//! Binary-state cheap-talk signaling games with a leaky detector.
//!
//! Nature draws a type θ ∈ {0, 1}, the sender picks a message m ∈ {0, 1},
//! the detector emits evidence e ∈ {0, 1} (an alarm is `e = 1`), and the
//! receiver picks an action a ∈ {0, 1} after seeing (m, e). All indices in
//! this module are `0` or `1`; tables are indexed `[θ][a]` for utilities
//! and `[m][e]` for receiver strategies and beliefs.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::numeric::probability;

fn check_bit(what: &str, v: usize) -> Result<()> {
    if v > 1 {
        return Err(GameError::InvalidParameter(format!(
            "{what} must be 0 or 1, got {v}"
        )));
    }
    Ok(())
}

/// Prior over the binary type space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryTypeSpace {
    /// Probability that θ = 1.
    pub prior_p1: f64,
}

impl BinaryTypeSpace {
    pub fn new(prior_p1: f64) -> Result<Self> {
        Ok(Self {
            prior_p1: probability("prior_p1", prior_p1)?,
        })
    }

    pub fn prior(&self, theta: usize) -> f64 {
        if theta == 1 {
            self.prior_p1
        } else {
            1.0 - self.prior_p1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorClass {
    /// β < 1 − α
    Conservative,
    /// β > 1 − α
    Aggressive,
}

/// Detector emitting an alarm with probability `beta` when the message
/// differs from the type and `alpha` when it does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    /// False-positive rate.
    pub alpha: f64,
    /// True-positive rate.
    pub beta: f64,
}

impl DetectorSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let d = Self { alpha, beta };
        d.validate()?;
        Ok(Self {
            alpha: probability("alpha", alpha)?,
            beta: probability("beta", beta)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        probability("alpha", self.alpha)?;
        probability("beta", self.beta)?;
        if self.beta < self.alpha {
            return Err(GameError::InvalidParameter(format!(
                "detector needs beta >= alpha (alpha = {}, beta = {})",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }

    /// λ(e | θ, m).
    pub fn emission(&self, e: usize, theta: usize, m: usize) -> f64 {
        let alarm = if m != theta { self.beta } else { self.alpha };
        if e == 1 {
            alarm
        } else {
            1.0 - alarm
        }
    }

    pub fn is_informative(&self) -> bool {
        (self.beta - self.alpha).abs() > 1e-12
    }

    /// `None` on the knife edge β = 1 − α.
    pub fn class(&self) -> Option<DetectorClass> {
        let gap = self.beta - (1.0 - self.alpha);
        if gap.abs() <= 1e-12 {
            None
        } else if gap < 0.0 {
            Some(DetectorClass::Conservative)
        } else {
            Some(DetectorClass::Aggressive)
        }
    }
}

/// Message-independent utility tables, indexed `[θ][a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheapTalkUtilities {
    pub sender: [[f64; 2]; 2],
    pub receiver: [[f64; 2]; 2],
}

impl CheapTalkUtilities {
    /// Zero-sum guessing game: the receiver scores 1 for a = θ, the sender for a ≠ θ.
    pub fn canonical() -> Self {
        Self {
            sender: [[0.0, 1.0], [1.0, 0.0]],
            receiver: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Receiver table with the given benefits of guessing right; the sender
    /// keeps the canonical table.
    pub fn with_deltas(delta0: f64, delta1: f64) -> Self {
        Self {
            sender: [[0.0, 1.0], [1.0, 0.0]],
            receiver: [[delta0, 0.0], [0.0, delta1]],
        }
    }

    /// Receiver's gain from a correct guess when θ = 0.
    pub fn delta0(&self) -> f64 {
        self.receiver[0][0] - self.receiver[0][1]
    }

    /// Receiver's gain from a correct guess when θ = 1.
    pub fn delta1(&self) -> f64 {
        self.receiver[1][1] - self.receiver[1][0]
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.sender.iter().chain(self.receiver.iter()).flatten();
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(GameError::UtilityOrdering("non-finite utility".into()));
        }
        if self.delta0() <= 0.0 {
            return Err(GameError::UtilityOrdering(
                "receiver must prefer a = 0 when θ = 0".into(),
            ));
        }
        if self.delta1() <= 0.0 {
            return Err(GameError::UtilityOrdering(
                "receiver must prefer a = 1 when θ = 1".into(),
            ));
        }
        if self.sender[0][1] <= self.sender[0][0] {
            return Err(GameError::UtilityOrdering(
                "sender of type 0 must prefer a = 1".into(),
            ));
        }
        if self.sender[1][0] <= self.sender[1][1] {
            return Err(GameError::UtilityOrdering(
                "sender of type 1 must prefer a = 0".into(),
            ));
        }
        Ok(())
    }
}

/// Complete description of a binary cheap-talk game with a detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpecBinary {
    pub types: BinaryTypeSpace,
    pub detector: DetectorSpec,
    pub utilities: CheapTalkUtilities,
}

impl GameSpecBinary {
    pub fn new(
        prior_p1: f64,
        detector: DetectorSpec,
        utilities: CheapTalkUtilities,
    ) -> Result<Self> {
        let g = Self {
            types: BinaryTypeSpace::new(prior_p1)?,
            detector,
            utilities,
        };
        g.validate()?;
        Ok(g)
    }

    /// Canonical zero-sum utilities.
    pub fn canonical(prior_p1: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(
            prior_p1,
            DetectorSpec::new(alpha, beta)?,
            CheapTalkUtilities::canonical(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        probability("prior_p1", self.types.prior_p1)?;
        self.detector.validate()?;
        self.utilities.validate()
    }

    pub fn prior(&self, theta: usize) -> f64 {
        self.types.prior(theta)
    }

    pub fn with_prior(&self, prior_p1: f64) -> Result<Self> {
        let mut g = *self;
        g.types = BinaryTypeSpace::new(prior_p1)?;
        Ok(g)
    }
}

/// σ^S: probability of sending m = 1 for each type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderStrategyBinary {
    pub prob_m1_given_theta: [f64; 2],
}

impl SenderStrategyBinary {
    pub fn new(p_m1_theta0: f64, p_m1_theta1: f64) -> Result<Self> {
        Ok(Self {
            prob_m1_given_theta: [
                probability("sigma_S(1|0)", p_m1_theta0)?,
                probability("sigma_S(1|1)", p_m1_theta1)?,
            ],
        })
    }

    pub fn truthful() -> Self {
        Self {
            prob_m1_given_theta: [0.0, 1.0],
        }
    }

    /// Both types send `m` surely.
    pub fn pooling(m: usize) -> Self {
        let p = if m == 1 { 1.0 } else { 0.0 };
        Self {
            prob_m1_given_theta: [p, p],
        }
    }

    /// σ^S(m | θ).
    pub fn prob(&self, m: usize, theta: usize) -> f64 {
        let p1 = self.prob_m1_given_theta[theta];
        if m == 1 {
            p1
        } else {
            1.0 - p1
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.prob_m1_given_theta.iter().enumerate() {
            probability(&format!("sigma_S(1|{i})"), *p)?;
        }
        Ok(())
    }
}

/// σ^R: probability of a = 1 after observing (m, e), indexed `[m][e]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverStrategyBinary {
    pub prob_a1_given_m_e: [[f64; 2]; 2],
}

impl ReceiverStrategyBinary {
    pub fn new(table: [[f64; 2]; 2]) -> Result<Self> {
        let mut out = [[0.0; 2]; 2];
        for m in 0..2 {
            for e in 0..2 {
                out[m][e] = probability(&format!("sigma_R(1|{m},{e})"), table[m][e])?;
            }
        }
        Ok(Self {
            prob_a1_given_m_e: out,
        })
    }

    /// Plays `a` regardless of what it sees.
    pub fn constant(a: usize) -> Self {
        let p = if a == 1 { 1.0 } else { 0.0 };
        Self {
            prob_a1_given_m_e: [[p; 2]; 2],
        }
    }

    /// Plays a = m.
    pub fn obedient() -> Self {
        Self {
            prob_a1_given_m_e: [[0.0, 0.0], [1.0, 1.0]],
        }
    }

    /// σ^R(a | m, e).
    pub fn prob(&self, a: usize, m: usize, e: usize) -> f64 {
        let p1 = self.prob_a1_given_m_e[m][e];
        if a == 1 {
            p1
        } else {
            1.0 - p1
        }
    }

    /// Flattened as (σ(1|0,0), σ(1|0,1), σ(1|1,0), σ(1|1,1)).
    pub fn as_tuple(&self) -> [f64; 4] {
        let t = &self.prob_a1_given_m_e;
        [t[0][0], t[0][1], t[1][0], t[1][1]]
    }

    pub fn validate(&self) -> Result<()> {
        for m in 0..2 {
            for e in 0..2 {
                probability(&format!("sigma_R(1|{m},{e})"), self.prob_a1_given_m_e[m][e])?;
            }
        }
        Ok(())
    }
}

/// μ^R(θ = 1 | m, e), indexed `[m][e]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefSystemBinary {
    pub mu: [[f64; 2]; 2],
}

impl BeliefSystemBinary {
    pub fn validate(&self) -> Result<()> {
        for m in 0..2 {
            for e in 0..2 {
                probability(&format!("mu(1|{m},{e})"), self.mu[m][e])?;
            }
        }
        Ok(())
    }
}

/// A strategy profile together with the receiver's belief system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyProfile {
    pub sender: SenderStrategyBinary,
    pub receiver: ReceiverStrategyBinary,
    pub beliefs: BeliefSystemBinary,
}

impl StrategyProfile {
    pub fn validate(&self) -> Result<()> {
        self.sender.validate()?;
        self.receiver.validate()?;
        self.beliefs.validate()
    }
}

/// Ū^S(σ^S, σ^R | θ): sum over a, e and m of
/// σ^R(a|m,e) · λ(e|θ,m) · σ^S(m|θ) · U^S(θ, a).
pub fn expected_sender_utility(
    game: &GameSpecBinary,
    sender: &SenderStrategyBinary,
    receiver: &ReceiverStrategyBinary,
    theta: usize,
) -> Result<f64> {
    check_bit("theta", theta)?;
    game.validate()?;
    sender.validate()?;
    receiver.validate()?;
    let mut total = 0.0;
    for a in 0..2 {
        for e in 0..2 {
            for m in 0..2 {
                total += receiver.prob(a, m, e)
                    * game.detector.emission(e, theta, m)
                    * sender.prob(m, theta)
                    * game.utilities.sender[theta][a];
            }
        }
    }
    Ok(total)
}

/// Ū^R(σ^R | θ, m, e) = Σ_a σ^R(a|m,e) U^R(θ, a).
pub fn expected_receiver_utility(
    game: &GameSpecBinary,
    receiver: &ReceiverStrategyBinary,
    theta: usize,
    m: usize,
    e: usize,
) -> Result<f64> {
    check_bit("theta", theta)?;
    check_bit("m", m)?;
    check_bit("e", e)?;
    game.validate()?;
    receiver.validate()?;
    Ok((0..2)
        .map(|a| receiver.prob(a, m, e) * game.utilities.receiver[theta][a])
        .sum())
}
