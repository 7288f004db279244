use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AptGameSpec, BeliefState, NodeKey, PolicyPair};
use crate::error::{GameError, Result};
use crate::numeric::format_number;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub stage: usize,
    pub state: usize,
    pub belief: BeliefState,
    pub message: usize,
    pub action: usize,
    pub next_state: usize,
    pub attacker_utility: f64,
    pub defender_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub theta: f64,
    pub bucket: usize,
    pub steps: Vec<TrajectoryStep>,
    pub attacker_total: f64,
    pub defender_total: f64,
}

impl TrajectoryRecord {
    pub fn to_csv(&self, game: &AptGameSpec) -> String {
        let mut out = String::from(
            "stage,state,belief_a,belief_b,message,action,next_state,attacker_utility,defender_utility\n",
        );
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.stage,
                s.state,
                format_number(s.belief.a),
                format_number(s.belief.b),
                game.messages[s.message],
                game.actions[s.action],
                s.next_state,
                format_number(s.attacker_utility),
                format_number(s.defender_utility),
            ));
        }
        out
    }
}

fn draw<R: Rng>(rng: &mut R, probs: &[f64]) -> Result<usize> {
    let dist = WeightedIndex::new(probs)
        .map_err(|e| GameError::InvalidParameter(format!("bad policy distribution: {e}")))?;
    Ok(dist.sample(rng))
}

fn rollout<R: Rng>(
    game: &AptGameSpec,
    policies: &PolicyPair,
    theta: f64,
    bucket: usize,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    let mut key = NodeKey::root(game.initial_state);
    let mut steps = Vec::with_capacity(game.horizon);
    let (mut attacker_total, mut defender_total) = (0.0, 0.0);
    while key.stage < game.horizon {
        let d = policies.decision(&key)?;
        let m = draw(rng, &d.attacker[bucket])?;
        let a = draw(rng, &d.defender)?;
        let next = key.child(game, m, a);
        let us = game.sender_payoff(key.stage, key.state, m, a, theta);
        let ur = game.receiver_payoff(key.stage, key.state, m, a, theta);
        attacker_total += us;
        defender_total += ur;
        steps.push(TrajectoryStep {
            stage: key.stage,
            state: key.state,
            belief: policies.belief(&key),
            message: m,
            action: a,
            next_state: next.state,
            attacker_utility: us,
            defender_utility: ur,
        });
        key = next;
    }
    Ok(TrajectoryRecord {
        theta,
        bucket,
        steps,
        attacker_total,
        defender_total,
    })
}

/// One play of the game by a user of type `theta`, starting from the
/// initial state. The user follows the policy of the bucket containing θ.
pub fn simulate(
    game: &AptGameSpec,
    policies: &PolicyPair,
    theta: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    game.validate()?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(GameError::InvalidParameter(format!(
            "type {theta} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rollout(
        game,
        policies,
        theta,
        policies.buckets.bucket_of(theta),
        &mut rng,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub rollouts: usize,
    pub defender_mean: f64,
    pub defender_std_error: f64,
    pub attacker_mean: f64,
}

/// Average payoffs over `rollouts` plays with the user's bucket drawn from
/// the prior and θ set to the bucket representative.
pub fn monte_carlo(
    game: &AptGameSpec,
    policies: &PolicyPair,
    rollouts: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    game.validate()?;
    if rollouts < 2 {
        return Err(GameError::InvalidParameter(
            "need at least two rollouts".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses = policies.buckets.masses(&policies.prior);
    let (mut sum, mut sum_sq, mut attacker) = (0.0, 0.0, 0.0);
    for _ in 0..rollouts {
        let i = draw(&mut rng, &masses)?;
        let record = rollout(
            game,
            policies,
            policies.buckets.representatives[i],
            i,
            &mut rng,
        )?;
        sum += record.defender_total;
        sum_sq += record.defender_total * record.defender_total;
        attacker += record.attacker_total;
    }
    let n = rollouts as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloSummary {
        rollouts,
        defender_mean: mean,
        defender_std_error: (var / n).sqrt(),
        attacker_mean: attacker / n,
    })
}
