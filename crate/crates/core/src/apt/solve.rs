use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AptGameSpec, AptOptions, BeliefState, TypeBuckets};
use crate::error::{GameError, Result};

/// Expanded state: stage, plant state and belief offsets from the prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeKey {
    pub stage: usize,
    pub state: usize,
    pub da: u32,
    pub db: u32,
}

impl NodeKey {
    pub fn root(state: usize) -> Self {
        Self {
            stage: 0,
            state,
            da: 0,
            db: 0,
        }
    }

    pub fn child(&self, game: &AptGameSpec, m: usize, a: usize) -> Self {
        let [s, t] = game.likelihood[m];
        Self {
            stage: self.stage + 1,
            state: game.next_state(self.stage, self.state, m, a),
            da: self.da + s,
            db: self.db + t,
        }
    }
}

/// Behaviour at one expanded state: the defender's mixed action and each
/// type bucket's mixed message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub defender: Vec<f64>,
    pub attacker: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyPair {
    pub prior: BeliefState,
    pub buckets: TypeBuckets,
    pub decisions: BTreeMap<NodeKey, Decision>,
}

impl PolicyPair {
    pub fn belief(&self, key: &NodeKey) -> BeliefState {
        self.prior.shifted(key.da, key.db)
    }

    pub fn decision(&self, key: &NodeKey) -> Result<&Decision> {
        self.decisions.get(key).ok_or_else(|| {
            let b = self.belief(key);
            GameError::PolicyUndefined {
                stage: key.stage,
                state: key.state,
                a: b.a,
                b: b.b,
            }
        })
    }
}

/// Values at one expanded state. `defender` is Σ_i P_i · `defender_by_type[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeValues {
    pub bucket_probs: Vec<f64>,
    pub defender_by_type: Vec<f64>,
    pub attacker_by_type: Vec<f64>,
    pub defender: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueTable {
    pub nodes: BTreeMap<NodeKey, NodeValues>,
}

impl ValueTable {
    pub fn get(&self, key: &NodeKey) -> Option<&NodeValues> {
        self.nodes.get(key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AptSolution {
    pub game: AptGameSpec,
    pub options: AptOptions,
    pub values: ValueTable,
    pub policies: PolicyPair,
}

impl AptSolution {
    pub fn root(&self) -> NodeKey {
        NodeKey::root(self.game.initial_state)
    }

    pub fn root_value(&self) -> f64 {
        self.values.nodes[&self.root()].defender
    }

    pub fn root_decision(&self) -> &Decision {
        &self.policies.decisions[&self.root()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Attacker,
    Defender,
}

/// Belief offsets reachable at each stage 0..=K.
pub(crate) fn lattice(game: &AptGameSpec) -> Vec<Vec<(u32, u32)>> {
    let mut out = vec![vec![(0u32, 0u32)]];
    for _ in 0..game.horizon {
        let mut next: Vec<(u32, u32)> = out
            .last()
            .unwrap()
            .iter()
            .flat_map(|(a, b)| game.likelihood.iter().map(move |[s, t]| (a + s, b + t)))
            .collect();
        next.sort_unstable();
        next.dedup();
        out.push(next);
    }
    out
}

/// Every mixed strategy over `n` actions with probabilities in multiples of
/// 1/`resolution`, ordered by increasing weight away from the first action.
pub(crate) fn simplex_grid(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn fill(rest: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in (0..=rest).rev() {
            prefix.push(c);
            fill(rest - c, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut counts = Vec::new();
    fill(resolution, n, &mut Vec::new(), &mut counts);
    counts
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|x| x as f64 / resolution as f64)
                .collect()
        })
        .collect()
}

fn tied(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
}

/// Continuation (defender, attacker) values of bucket `i` at `key`.
fn continuation(
    game: &AptGameSpec,
    values: &BTreeMap<NodeKey, NodeValues>,
    prior: &BeliefState,
    key: &NodeKey,
    i: usize,
) -> Result<(f64, f64)> {
    if key.stage == game.horizon {
        return Ok((0.0, 0.0));
    }
    let v = values.get(key).ok_or_else(|| {
        let b = prior.shifted(key.da, key.db);
        GameError::PolicyUndefined {
            stage: key.stage,
            state: key.state,
            a: b.a,
            b: b.b,
        }
    })?;
    Ok((v.defender_by_type[i], v.attacker_by_type[i]))
}

/// Expected (defender, attacker) value of message `m` for bucket `i` when
/// the defender mixes with `q`.
#[allow(clippy::too_many_arguments)]
fn message_value(
    game: &AptGameSpec,
    values: &BTreeMap<NodeKey, NodeValues>,
    prior: &BeliefState,
    key: &NodeKey,
    q: &[f64],
    m: usize,
    i: usize,
    theta: f64,
) -> Result<(f64, f64)> {
    let (mut w, mut v) = (0.0, 0.0);
    for (a, qa) in q.iter().enumerate() {
        if *qa == 0.0 {
            continue;
        }
        let (cw, cv) = continuation(game, values, prior, &key.child(game, m, a), i)?;
        w += qa * (game.receiver_payoff(key.stage, key.state, m, a, theta) + cw);
        v += qa * (game.sender_payoff(key.stage, key.state, m, a, theta) + cv);
    }
    Ok((w, v))
}

/// Chosen message with the defender and attacker values.
type Response = (usize, f64, f64);

/// Attacker best response of bucket `i`: highest own value, ties broken
/// against the defender, then towards the lower message index.
fn respond(
    game: &AptGameSpec,
    values: &BTreeMap<NodeKey, NodeValues>,
    prior: &BeliefState,
    key: &NodeKey,
    q: &[f64],
    i: usize,
    theta: f64,
) -> Result<Response> {
    let mut best: Option<Response> = None;
    for m in 0..game.n_messages() {
        let (w, v) = message_value(game, values, prior, key, q, m, i, theta)?;
        best = match best {
            None => Some((m, w, v)),
            Some((_, _, bv)) if v > bv && !tied(v, bv) => Some((m, w, v)),
            Some((_, bw, bv)) if tied(v, bv) && w < bw && !tied(w, bw) => Some((m, w, v)),
            keep => keep,
        };
    }
    Ok(best.expect("at least one message"))
}

fn one_hot(n: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[j] = 1.0;
    v
}

/// Solves the game by backward induction over every plant state and every
/// belief reachable from the prior.
///
/// At each expanded state the defender picks the grid mixed action that
/// maximises Σ_i P_i W_i, where P_i is the Beta mass of type bucket i and
/// each bucket best-responds with a pure message (ties broken against the
/// defender). Ties between defender actions go to the least defensive.
pub fn backward_induction(game: &AptGameSpec, options: &AptOptions) -> Result<AptSolution> {
    game.validate()?;
    if options.defender_grid == 0 {
        return Err(GameError::InvalidParameter(
            "defender grid must be positive".into(),
        ));
    }
    let buckets = TypeBuckets::new(options.buckets)?;
    let grid = simplex_grid(game.n_actions(), options.defender_grid);
    let prior = game.prior;
    let mut values = BTreeMap::new();
    let mut decisions = BTreeMap::new();
    for (k, offsets) in lattice(game).iter().enumerate().take(game.horizon).rev() {
        for &(da, db) in offsets {
            let probs = buckets.masses(&prior.shifted(da, db));
            for state in 0..game.n_states {
                let key = NodeKey {
                    stage: k,
                    state,
                    da,
                    db,
                };
                let mut best: Option<(f64, &Vec<f64>, Vec<Response>)> = None;
                for q in &grid {
                    let responses = (0..buckets.len())
                        .map(|i| {
                            respond(
                                game,
                                &values,
                                &prior,
                                &key,
                                q,
                                i,
                                buckets.representatives[i],
                            )
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let total: f64 = responses.iter().zip(&probs).map(|(r, p)| p * r.1).sum();
                    if best
                        .as_ref()
                        .is_none_or(|(b, _, _)| total > *b && !tied(total, *b))
                    {
                        best = Some((total, q, responses));
                    }
                }
                let (total, q, responses) = best.expect("non-empty grid");
                decisions.insert(
                    key,
                    Decision {
                        defender: q.clone(),
                        attacker: responses
                            .iter()
                            .map(|r| one_hot(game.n_messages(), r.0))
                            .collect(),
                    },
                );
                values.insert(
                    key,
                    NodeValues {
                        bucket_probs: probs.clone(),
                        defender_by_type: responses.iter().map(|r| r.1).collect(),
                        attacker_by_type: responses.iter().map(|r| r.2).collect(),
                        defender: total,
                    },
                );
            }
        }
    }
    Ok(AptSolution {
        game: game.clone(),
        options: *options,
        values: ValueTable { nodes: values },
        policies: PolicyPair {
            prior,
            buckets,
            decisions,
        },
    })
}

fn check_decision(game: &AptGameSpec, policies: &PolicyPair, d: &Decision) -> Result<()> {
    let bad = |what: &str| {
        Err(GameError::InvalidParameter(format!(
            "malformed {what} policy"
        )))
    };
    let is_dist = |p: &[f64], n: usize| {
        p.len() == n
            && p.iter().all(|x| x.is_finite() && *x >= 0.0)
            && (p.iter().sum::<f64>() - 1.0).abs() < 1e-9
    };
    if !is_dist(&d.defender, game.n_actions()) {
        return bad("defender");
    }
    if d.attacker.len() != policies.buckets.len()
        || !d.attacker.iter().all(|p| is_dist(p, game.n_messages()))
    {
        return bad("attacker");
    }
    Ok(())
}

/// Per-type values of a given policy pair at every expanded state it covers.
pub fn evaluate_policies(game: &AptGameSpec, policies: &PolicyPair) -> Result<ValueTable> {
    game.validate()?;
    let buckets = &policies.buckets;
    let mut values: BTreeMap<NodeKey, NodeValues> = BTreeMap::new();
    for (key, d) in policies.decisions.iter().rev() {
        if key.stage >= game.horizon || key.state >= game.n_states {
            continue;
        }
        check_decision(game, policies, d)?;
        let mut w = vec![0.0; buckets.len()];
        let mut v = vec![0.0; buckets.len()];
        for i in 0..buckets.len() {
            let theta = buckets.representatives[i];
            for (m, pm) in d.attacker[i].iter().enumerate() {
                if *pm == 0.0 {
                    continue;
                }
                let (mw, mv) = message_value(
                    game,
                    &values,
                    &policies.prior,
                    key,
                    &d.defender,
                    m,
                    i,
                    theta,
                )?;
                w[i] += pm * mw;
                v[i] += pm * mv;
            }
        }
        let probs = buckets.masses(&policies.belief(key));
        let defender = probs.iter().zip(&w).map(|(p, x)| p * x).sum();
        values.insert(
            *key,
            NodeValues {
                bucket_probs: probs,
                defender_by_type: w,
                attacker_by_type: v,
                defender,
            },
        );
    }
    Ok(ValueTable { nodes: values })
}

/// Pure attacker message per bucket at each expanded state.
type Choices = BTreeMap<NodeKey, Vec<usize>>;

/// Attacker best-response values and pure choices against the defender
/// part of `policies`, by backward induction.
fn attacker_best_response(
    game: &AptGameSpec,
    policies: &PolicyPair,
) -> Result<(BTreeMap<NodeKey, NodeValues>, Choices)> {
    game.validate()?;
    let buckets = &policies.buckets;
    let mut values: BTreeMap<NodeKey, NodeValues> = BTreeMap::new();
    let mut choices = BTreeMap::new();
    for (key, d) in policies.decisions.iter().rev() {
        if key.stage >= game.horizon || key.state >= game.n_states {
            continue;
        }
        check_decision(game, policies, d)?;
        let responses = (0..buckets.len())
            .map(|i| {
                respond(
                    game,
                    &values,
                    &policies.prior,
                    key,
                    &d.defender,
                    i,
                    buckets.representatives[i],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let probs = buckets.masses(&policies.belief(key));
        let defender = probs.iter().zip(&responses).map(|(p, r)| p * r.1).sum();
        choices.insert(*key, responses.iter().map(|r| r.0).collect());
        values.insert(
            *key,
            NodeValues {
                bucket_probs: probs,
                defender_by_type: responses.iter().map(|r| r.1).collect(),
                attacker_by_type: responses.iter().map(|r| r.2).collect(),
                defender,
            },
        );
    }
    Ok((values, choices))
}

/// Replaces the attacker part of `policies` with a pure best response.
pub fn best_response_attacker(game: &AptGameSpec, policies: &PolicyPair) -> Result<PolicyPair> {
    let (_, choices) = attacker_best_response(game, policies)?;
    let mut out = policies.clone();
    for (key, ms) in choices {
        let d = out.decisions.get_mut(&key).expect("key from policies");
        d.attacker = ms.iter().map(|m| one_hot(game.n_messages(), *m)).collect();
    }
    Ok(out)
}

/// Largest gain either player obtains by deviating from `policies`.
///
/// The attacker's gain compares each bucket's value with its best response
/// computed by independent backward induction. The defender's gain is the
/// best one-shot deviation to a grid mixed action (multiples of
/// 1/`resolution`) at any expanded state, with the attacker re-optimising
/// there against the unchanged continuation.
pub fn deviation_gain(
    game: &AptGameSpec,
    policies: &PolicyPair,
    player: Player,
    resolution: usize,
) -> Result<f64> {
    let values = evaluate_policies(game, policies)?;
    let mut gain = 0.0f64;
    match player {
        Player::Attacker => {
            let (best, _) = attacker_best_response(game, policies)?;
            for (key, v) in &values.nodes {
                for (now, br) in v.attacker_by_type.iter().zip(&best[key].attacker_by_type) {
                    gain = gain.max(br - now);
                }
            }
        }
        Player::Defender => {
            if resolution == 0 {
                return Err(GameError::InvalidParameter(
                    "deviation grid must be positive".into(),
                ));
            }
            let grid = simplex_grid(game.n_actions(), resolution);
            let buckets = &policies.buckets;
            for (key, v) in &values.nodes {
                for q in &grid {
                    let mut total = 0.0;
                    for (i, p) in v.bucket_probs.iter().enumerate() {
                        let theta = buckets.representatives[i];
                        total +=
                            p * respond(game, &values.nodes, &policies.prior, key, q, i, theta)?.1;
                    }
                    gain = gain.max(total - v.defender);
                }
            }
        }
    }
    Ok(gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apt::{LinearPayoff, ToyPlantConfig};

    #[test]
    fn simplex_grid_shapes() {
        let g = simplex_grid(2, 4);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], vec![1.0, 0.0]);
        assert_eq!(g[4], vec![0.0, 1.0]);
        assert_eq!(simplex_grid(3, 4).len(), 15);
    }

    #[test]
    fn lattice_grows_by_one_per_stage() {
        let game = ToyPlantConfig::default().build().unwrap();
        let l = lattice(&game);
        assert_eq!(l.len(), game.horizon + 1);
        for (k, offsets) in l.iter().enumerate() {
            assert_eq!(offsets.len(), k + 1);
        }
    }

    #[test]
    fn solution_is_self_consistent() {
        let game = ToyPlantConfig::default().build().unwrap();
        let sol = backward_induction(&game, &AptOptions::default()).unwrap();
        let eval = evaluate_policies(&game, &sol.policies).unwrap();
        for (key, v) in &sol.values.nodes {
            let e = &eval.nodes[key];
            assert!((v.defender - e.defender).abs() < 1e-12);
            for i in 0..v.defender_by_type.len() {
                assert!((v.attacker_by_type[i] - e.attacker_by_type[i]).abs() < 1e-12);
            }
        }
        assert_eq!(
            deviation_gain(&game, &sol.policies, Player::Attacker, 100).unwrap(),
            0.0
        );
        assert!(deviation_gain(&game, &sol.policies, Player::Defender, 100).unwrap() < 1e-12);
    }

    #[test]
    fn never_defending_is_exploitable() {
        let game = ToyPlantConfig::default().build().unwrap();
        let sol = backward_induction(&game, &AptOptions::default()).unwrap();
        let mut lax = sol.policies.clone();
        for d in lax.decisions.values_mut() {
            d.defender = one_hot(game.n_actions(), 0);
        }
        let lax = best_response_attacker(&game, &lax).unwrap();
        assert!(deviation_gain(&game, &lax, Player::Defender, 100).unwrap() > 1e-3);
        assert_eq!(
            deviation_gain(&game, &lax, Player::Attacker, 100).unwrap(),
            0.0
        );
    }

    #[test]
    fn missing_nodes_are_reported() {
        let game = ToyPlantConfig::default().build().unwrap();
        let sol = backward_induction(&game, &AptOptions::default()).unwrap();
        let mut partial = sol.policies.clone();
        let last = *partial.decisions.keys().find(|k| k.stage == 1).unwrap();
        partial.decisions.remove(&last);
        assert!(matches!(
            evaluate_policies(&game, &partial),
            Err(GameError::PolicyUndefined { stage: 1, .. })
        ));
    }

    fn matrix_game() -> AptGameSpec {
        let p = LinearPayoff::new;
        AptGameSpec {
            horizon: 1,
            n_states: 1,
            messages: vec!["normal".into(), "attack".into()],
            actions: vec!["allow".into(), "defend".into()],
            likelihood: vec![[0, 1], [1, 0]],
            transition: vec![vec![vec![vec![0, 0], vec![0, 0]]]],
            sender_utility: vec![vec![vec![
                vec![p(0.0, 0.0), p(0.0, 0.0)],
                vec![p(1.0, 0.0), p(-1.0, 0.0)],
            ]]],
            receiver_utility: vec![vec![vec![
                vec![p(0.0, 0.0), p(-0.2, 0.0)],
                vec![p(-1.0, 0.0), p(0.0, 0.0)],
            ]]],
            initial_state: 0,
            prior: BeliefState { a: 1.0, b: 1.0 },
            attack_message: 1,
            defend_action: 1,
        }
    }

    #[test]
    fn one_stage_matrix_game() {
        // attack iff q ≤ 1/2 (ties go against the defender), so the
        // defender's best grid point is q = 0.51 with value −0.2·0.51
        let game = matrix_game();
        let sol = backward_induction(&game, &AptOptions::default()).unwrap();
        let d = sol.root_decision();
        assert!((d.defender[1] - 0.51).abs() < 1e-12);
        assert!(d.attacker.iter().all(|p| p[0] == 1.0));
        assert!((sol.root_value() + 0.102).abs() < 1e-12);

        let mut lax = sol.policies.clone();
        lax.decisions
            .values_mut()
            .for_each(|d| d.defender = vec![1.0, 0.0]);
        let lax = best_response_attacker(&game, &lax).unwrap();
        let regret = deviation_gain(&game, &lax, Player::Defender, 100).unwrap();
        assert!((regret - 0.898).abs() < 1e-12);
    }

    #[test]
    fn zero_game_has_zero_value() {
        let mut game = matrix_game();
        for t in [&mut game.sender_utility, &mut game.receiver_utility] {
            t.iter_mut()
                .flatten()
                .flatten()
                .flatten()
                .for_each(|p| *p = LinearPayoff::ZERO);
        }
        let sol = backward_induction(&game, &AptOptions::default()).unwrap();
        assert_eq!(sol.root_value(), 0.0);
        assert_eq!(sol.root_decision().defender, vec![1.0, 0.0]);
    }
}
