use serde::{Deserialize, Serialize};

use super::{AptGameSpec, BeliefState, LinearPayoff};
use crate::error::{GameError, Result};

/// A small plant: `n_states` security levels (0 is the most secure), a run
/// of cyber stages followed by physical stages, a user who either operates
/// normally or attacks, and a defender who allows or defends.
///
/// An allowed attack in state x pays the attacker `attack_gain[x]·θ`, costs
/// the defender the same amount and degrades the plant one level. Physical
/// stages scale those stakes by `physical_multiplier`. Defending costs the
/// defender `defense_cost` and leaves an attacker with `attack_cost[x]` plus
/// `caught_penalty`. The plant yields `operation_reward[x]` every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyPlantConfig {
    pub cyber_stages: usize,
    pub physical_stages: usize,
    pub operation_reward: Vec<f64>,
    pub attack_gain: Vec<f64>,
    pub attack_cost: Vec<f64>,
    pub physical_multiplier: f64,
    pub defense_cost: f64,
    pub caught_penalty: f64,
    pub initial_state: usize,
    pub prior: BeliefState,
}

impl Default for ToyPlantConfig {
    fn default() -> Self {
        Self {
            cyber_stages: 3,
            physical_stages: 1,
            operation_reward: vec![1.0, 0.8, 0.6, 0.4, 0.2],
            attack_gain: vec![0.1, 0.45, 0.7, 0.95, 1.2],
            attack_cost: vec![5.0, 0.05, 0.05, 0.05, 0.05],
            physical_multiplier: 1.9,
            defense_cost: 0.05,
            caught_penalty: 0.05,
            initial_state: 1,
            prior: BeliefState { a: 5.0, b: 5.0 },
        }
    }
}

impl ToyPlantConfig {
    pub fn n_states(&self) -> usize {
        self.operation_reward.len()
    }

    pub fn build(&self) -> Result<AptGameSpec> {
        let n = self.n_states();
        if n == 0 || self.attack_gain.len() != n || self.attack_cost.len() != n {
            return Err(GameError::InvalidParameter(
                "operation_reward, attack_gain and attack_cost need one entry per state".into(),
            ));
        }
        let horizon = self.cyber_stages + self.physical_stages;
        let mut transition = Vec::with_capacity(horizon);
        let mut sender = Vec::with_capacity(horizon);
        let mut receiver = Vec::with_capacity(horizon);
        for k in 0..horizon {
            let scale = if k < self.cyber_stages {
                1.0
            } else {
                self.physical_multiplier
            };
            let mut t_k = Vec::with_capacity(n);
            let mut s_k = Vec::with_capacity(n);
            let mut r_k = Vec::with_capacity(n);
            for x in 0..n {
                let op = self.operation_reward[x];
                let gain = scale * self.attack_gain[x];
                let cost = self.attack_cost[x];
                let degraded = (x + 1).min(n - 1);
                t_k.push(vec![vec![x, x], vec![degraded, x]]);
                s_k.push(vec![
                    vec![LinearPayoff::ZERO, LinearPayoff::ZERO],
                    vec![
                        LinearPayoff::new(-cost, gain),
                        LinearPayoff::new(-cost - self.caught_penalty, 0.0),
                    ],
                ]);
                let defended = LinearPayoff::new(op - self.defense_cost, 0.0);
                r_k.push(vec![
                    vec![LinearPayoff::new(op, 0.0), defended],
                    vec![LinearPayoff::new(op, -gain), defended],
                ]);
            }
            transition.push(t_k);
            sender.push(s_k);
            receiver.push(r_k);
        }
        let game = AptGameSpec {
            horizon,
            n_states: n,
            messages: vec!["normal".into(), "attack".into()],
            actions: vec!["allow".into(), "defend".into()],
            likelihood: vec![[0, 1], [1, 0]],
            transition,
            sender_utility: sender,
            receiver_utility: receiver,
            initial_state: self.initial_state,
            prior: self.prior,
            attack_message: 1,
            defend_action: 1,
        };
        game.validate()?;
        Ok(game)
    }
}
