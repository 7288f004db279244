use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::signaling::{
    BeliefSystemBinary, GameSpecBinary, ReceiverStrategyBinary, SenderStrategyBinary,
    StrategyProfile,
};

pub const MAX_RESOLUTION: usize = 101;

/// A sender grid point supported as an equilibrium by at least one grid
/// receiver strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPbne {
    /// The supporting profile with the smallest sender gain.
    pub profile: StrategyProfile,
    pub sender_gain: f64,
    /// Number of grid receiver strategies supporting this sender point.
    pub supporting: u64,
}

impl GridPbne {
    pub fn is_pooling(&self) -> bool {
        let s = self.profile.sender.prob_m1_given_theta;
        s[0] == s[1] && (s[0] == 0.0 || s[0] == 1.0)
    }

    pub fn is_separating(&self) -> bool {
        let s = self.profile.sender.prob_m1_given_theta;
        (s[0] == 0.0 && s[1] == 1.0) || (s[0] == 1.0 && s[1] == 0.0)
    }
}

struct Cell {
    /// Grid values of σ^R(1 | m, e) the receiver may play here.
    options: Vec<f64>,
    /// Bayes belief, when the cell is on the path.
    on_path_belief: Option<f64>,
}

/// Enumerates sender strategies on a `resolution × resolution` grid. For
/// each one, beliefs follow Bayes' rule wherever an observation has positive
/// probability; the receiver may play any grid strategy whose gain is within
/// `tolerance`, and off the path any grid strategy at all (each is
/// supported by some belief). A sender point is kept when some combination
/// of receiver strategies leaves both types within `tolerance` of their best
/// pure message.
pub fn exhaustive_pbne_search(
    game: &GameSpecBinary,
    resolution: usize,
    tolerance: f64,
) -> Result<Vec<GridPbne>> {
    game.validate()?;
    if resolution < 2 {
        return Err(GameError::InvalidParameter(
            "grid resolution must be at least 2".into(),
        ));
    }
    if resolution > MAX_RESOLUTION {
        return Err(GameError::SearchTooLarge {
            resolution,
            profiles: (resolution as u128).pow(6),
        });
    }
    let grid: Vec<f64> = (0..resolution)
        .map(|i| i as f64 / (resolution - 1) as f64)
        .collect();
    let points: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|s0| grid.iter().map(move |s1| (*s0, *s1)))
        .collect();
    let found = points
        .par_iter()
        .filter_map(|&(s0, s1)| check_sender_point(game, &grid, s0, s1, tolerance))
        .collect();
    Ok(found)
}

fn receiver_payoff(game: &GameSpecBinary, belief: f64, a: usize) -> f64 {
    belief * game.utilities.receiver[1][a] + (1.0 - belief) * game.utilities.receiver[0][a]
}

fn cell(game: &GameSpecBinary, grid: &[f64], s: [f64; 2], m: usize, e: usize, tol: f64) -> Cell {
    let joint = |theta: usize| {
        let send = if m == 1 { s[theta] } else { 1.0 - s[theta] };
        game.prior(theta) * send * game.detector.emission(e, theta, m)
    };
    let (j0, j1) = (joint(0), joint(1));
    if j0 + j1 <= 0.0 {
        return Cell {
            options: grid.to_vec(),
            on_path_belief: None,
        };
    }
    let belief = j1 / (j0 + j1);
    let (u0, u1) = (
        receiver_payoff(game, belief, 0),
        receiver_payoff(game, belief, 1),
    );
    let best = u0.max(u1);
    let options = grid
        .iter()
        .copied()
        .filter(|r| best - (r * u1 + (1.0 - r) * u0) <= tol)
        .collect();
    Cell {
        options,
        on_path_belief: Some(belief),
    }
}

fn off_path_belief(game: &GameSpecBinary, r: f64) -> f64 {
    let d0 = game.utilities.delta0();
    let d1 = game.utilities.delta1();
    if r == 1.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        d0 / (d0 + d1)
    }
}

/// Sender payoff of type θ from message m given (σ^R(1|m,0), σ^R(1|m,1)).
fn message_value(game: &GameSpecBinary, theta: usize, m: usize, r: [f64; 2]) -> f64 {
    let u = &game.utilities.sender[theta];
    (0..2)
        .map(|e| game.detector.emission(e, theta, m) * (r[e] * u[1] + (1.0 - r[e]) * u[0]))
        .sum()
}

fn check_sender_point(
    game: &GameSpecBinary,
    grid: &[f64],
    s0: f64,
    s1: f64,
    tol: f64,
) -> Option<GridPbne> {
    let s = [s0, s1];
    let cells: Vec<Vec<Cell>> = (0..2)
        .map(|m| (0..2).map(|e| cell(game, grid, s, m, e, tol)).collect())
        .collect();
    if cells.iter().flatten().any(|c| c.options.is_empty()) {
        return None;
    }
    // every receiver pair for a message, with both types' payoffs from it
    let pairs: Vec<Vec<([f64; 2], [f64; 2])>> = (0..2)
        .map(|m| {
            let mut out = Vec::new();
            for r0 in &cells[m][0].options {
                for r1 in &cells[m][1].options {
                    let r = [*r0, *r1];
                    out.push((
                        r,
                        [message_value(game, 0, m, r), message_value(game, 1, m, r)],
                    ));
                }
            }
            out
        })
        .collect();

    let mut best: Option<(f64, [[f64; 2]; 2])> = None;
    let mut supporting = 0u64;
    for (r_m0, v_m0) in &pairs[0] {
        for (r_m1, v_m1) in &pairs[1] {
            let mut gain = 0.0f64;
            for theta in 0..2 {
                let current = (1.0 - s[theta]) * v_m0[theta] + s[theta] * v_m1[theta];
                gain = gain.max(v_m0[theta].max(v_m1[theta]) - current);
            }
            if gain <= tol {
                supporting += 1;
                if best.is_none_or(|(g, _)| gain < g) {
                    best = Some((gain, [*r_m0, *r_m1]));
                }
            }
        }
    }
    let (gain, table) = best?;
    let mut mu = [[0.0; 2]; 2];
    for m in 0..2 {
        for e in 0..2 {
            mu[m][e] = cells[m][e]
                .on_path_belief
                .unwrap_or_else(|| off_path_belief(game, table[m][e]));
        }
    }
    Some(GridPbne {
        profile: StrategyProfile {
            sender: SenderStrategyBinary {
                prob_m1_given_theta: s,
            },
            receiver: ReceiverStrategyBinary {
                prob_a1_given_m_e: table,
            },
            beliefs: BeliefSystemBinary { mu },
        },
        sender_gain: gain,
        supporting,
    })
}
