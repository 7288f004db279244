use serde::{Deserialize, Serialize};

use super::{backward_induction, AptGameSpec, AptOptions, BeliefState};
use crate::error::{GameError, Result};

/// Root behaviour of the game solved under one prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticsPoint {
    pub belief: BeliefState,
    pub mean_threat: f64,
    pub defend_probability: f64,
    /// Prior probability that the user attacks at the root.
    pub attack_probability: f64,
    /// Lower edge of the lowest attacking type bucket, 1 when nobody attacks.
    pub attack_threshold: f64,
    pub defender_value: f64,
}

/// Solves the game once per prior and reports the root behaviour.
pub fn comparative_statics(
    game: &AptGameSpec,
    options: &AptOptions,
    beliefs: &[BeliefState],
) -> Result<Vec<StaticsPoint>> {
    beliefs
        .iter()
        .map(|belief| {
            let sol = backward_induction(&game.with_prior(*belief), options)?;
            let d = sol.root_decision();
            let probs = &sol.values.nodes[&sol.root()].bucket_probs;
            let attack = |i: usize| d.attacker[i][game.attack_message];
            let attack_probability = probs.iter().enumerate().map(|(i, p)| p * attack(i)).sum();
            let attack_threshold = (0..probs.len())
                .find(|i| attack(*i) > 0.0)
                .map_or(1.0, |i| sol.policies.buckets.edges[i]);
            Ok(StaticsPoint {
                belief: *belief,
                mean_threat: belief.mean_threat(),
                defend_probability: d.defender[game.defend_action],
                attack_probability,
                attack_threshold,
                defender_value: sol.root_value(),
            })
        })
        .collect()
}

/// `steps` priors interpolated linearly between `from` and `to`.
pub fn threat_sweep(from: BeliefState, to: BeliefState, steps: usize) -> Result<Vec<BeliefState>> {
    from.validate()?;
    to.validate()?;
    if steps < 2 {
        return Err(GameError::InvalidParameter(
            "a sweep needs at least two points".into(),
        ));
    }
    Ok((0..steps)
        .map(|j| {
            let u = j as f64 / (steps - 1) as f64;
            BeliefState {
                a: from.a + u * (to.a - from.a),
                b: from.b + u * (to.b - from.b),
            }
        })
        .collect())
}
