use statrs::distribution::{Beta, ContinuousCDF};

use crate::apt::{AptGameSpec, PolicyPair, ValueTable};
use crate::error::{GameError, Result};

fn bucket_masses(a: f64, b: f64, n: usize) -> Vec<f64> {
    let Ok(beta) = Beta::new(a, b) else {
        return vec![f64::NAN; n];
    };
    let cdf: Vec<f64> = (0..=n).map(|i| beta.cdf(i as f64 / n as f64)).collect();
    let raw: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|m| m / total).collect()
}

/// Largest violation of the one-stage Bellman equations by stored values:
/// every per-type value must equal stage utility plus successor value under
/// the stored policies, and the defender value must be the bucket-weighted
/// sum of per-type values.
pub fn apt_bellman_residual(game: &AptGameSpec, values: &ValueTable, policies: &PolicyPair) -> f64 {
    let n = policies.buckets.len();
    let mut worst = 0.0f64;
    for (key, v) in &values.nodes {
        let Some(d) = policies.decisions.get(key) else {
            return f64::INFINITY;
        };
        let belief = policies.belief(key);
        let masses = bucket_masses(belief.a, belief.b, n);
        let mut aggregate = 0.0;
        for i in 0..n {
            let theta = (i as f64 + 0.5) / n as f64;
            let (mut w, mut u) = (0.0, 0.0);
            for (m, pm) in d.attacker[i].iter().enumerate() {
                for (a, qa) in d.defender.iter().enumerate() {
                    let weight = pm * qa;
                    if weight == 0.0 {
                        continue;
                    }
                    let child = key.child(game, m, a);
                    let (cw, cu) = if child.stage == game.horizon {
                        (0.0, 0.0)
                    } else {
                        match values.nodes.get(&child) {
                            Some(c) => (c.defender_by_type[i], c.attacker_by_type[i]),
                            None => return f64::INFINITY,
                        }
                    };
                    let r = &game.receiver_utility[key.stage][key.state][m][a];
                    let s = &game.sender_utility[key.stage][key.state][m][a];
                    w += weight * (r.constant + r.slope * theta + cw);
                    u += weight * (s.constant + s.slope * theta + cu);
                }
            }
            worst = worst
                .max((w - v.defender_by_type[i]).abs())
                .max((u - v.attacker_by_type[i]).abs());
            aggregate += masses[i] * v.defender_by_type[i];
        }
        worst = worst.max((aggregate - v.defender).abs());
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

/// Root behaviour found by enumerating the whole game tree.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedRoot {
    pub defender: Vec<f64>,
    pub attacker: Vec<usize>,
    pub defender_value: f64,
}

struct Subgame {
    w: Vec<f64>,
    v: Vec<f64>,
    defender: Vec<f64>,
    attacker: Vec<usize>,
    value: f64,
}

fn grid_points(n_actions: usize, resolution: usize) -> Vec<Vec<f64>> {
    // odometer over counts, kept when they sum to `resolution`
    let mut out = Vec::new();
    let mut counts = vec![0usize; n_actions];
    loop {
        if counts.iter().sum::<usize>() == resolution {
            out.push(
                counts
                    .iter()
                    .map(|c| *c as f64 / resolution as f64)
                    .collect(),
            );
        }
        let mut j = 0;
        loop {
            if j == n_actions {
                return out;
            }
            counts[j] += 1;
            if counts[j] <= resolution {
                break;
            }
            counts[j] = 0;
            j += 1;
        }
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
}

fn solve_tree(
    game: &AptGameSpec,
    stage: usize,
    state: usize,
    a: f64,
    b: f64,
    n: usize,
    grid: &[Vec<f64>],
) -> Subgame {
    let nm = game.n_messages();
    let na = game.n_actions();
    if stage == game.horizon {
        return Subgame {
            w: vec![0.0; n],
            v: vec![0.0; n],
            defender: Vec::new(),
            attacker: Vec::new(),
            value: 0.0,
        };
    }
    let children: Vec<Vec<Subgame>> = (0..nm)
        .map(|m| {
            let [s, t] = game.likelihood[m];
            (0..na)
                .map(|act| {
                    let next = game.transition[stage][state][m][act];
                    solve_tree(game, stage + 1, next, a + s as f64, b + t as f64, n, grid)
                })
                .collect()
        })
        .collect();
    let masses = bucket_masses(a, b, n);
    let mut best: Option<Subgame> = None;
    for q in grid {
        let mut w = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut choice = vec![0usize; n];
        for i in 0..n {
            let theta = (i as f64 + 0.5) / n as f64;
            let mut pick: Option<(usize, f64, f64)> = None;
            for m in 0..nm {
                let (mut wm, mut vm) = (0.0, 0.0);
                for act in 0..na {
                    if q[act] == 0.0 {
                        continue;
                    }
                    let r = &game.receiver_utility[stage][state][m][act];
                    let s = &game.sender_utility[stage][state][m][act];
                    wm += q[act] * (r.constant + r.slope * theta + children[m][act].w[i]);
                    vm += q[act] * (s.constant + s.slope * theta + children[m][act].v[i]);
                }
                let better = match pick {
                    None => true,
                    Some((_, pw, pv)) => {
                        (vm > pv && !close(vm, pv)) || (close(vm, pv) && wm < pw && !close(wm, pw))
                    }
                };
                if better {
                    pick = Some((m, wm, vm));
                }
            }
            let (m, wm, vm) = pick.expect("messages exist");
            choice[i] = m;
            w[i] = wm;
            v[i] = vm;
        }
        let value: f64 = masses.iter().zip(&w).map(|(p, x)| p * x).sum();
        if best
            .as_ref()
            .is_none_or(|bst| value > bst.value && !close(value, bst.value))
        {
            best = Some(Subgame {
                w,
                v,
                defender: q.clone(),
                attacker: choice,
                value,
            });
        }
    }
    best.expect("grid non-empty")
}

/// Solves the game from its prior by walking the full game tree, without
/// memoisation, and reports the equilibrium at the root.
///
/// Uses the same selection rules as the dynamic program: type buckets with
/// midpoint types, attacker ties against the defender and defender ties
/// towards more weight on earlier actions.
pub fn enumerate_root(
    game: &AptGameSpec,
    buckets: usize,
    resolution: usize,
) -> Result<EnumeratedRoot> {
    game.validate()?;
    if buckets == 0 || resolution == 0 {
        return Err(GameError::InvalidParameter(
            "buckets and grid must be positive".into(),
        ));
    }
    let mut grid = grid_points(game.n_actions(), resolution);
    grid.sort_by(|x, y| y.partial_cmp(x).expect("finite grid"));
    let root = solve_tree(
        game,
        0,
        game.initial_state,
        game.prior.a,
        game.prior.b,
        buckets,
        &grid,
    );
    Ok(EnumeratedRoot {
        defender: root.defender,
        attacker: root.attacker,
        defender_value: root.value,
    })
}
