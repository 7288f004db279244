use serde::{Deserialize, Serialize};

use super::{ContinuousGameSpec, InvestigationSpec, Prior, PriorDensity, SeparatingCurve};
use crate::error::{GameError, Result};
use crate::numeric::{find_root, probability};

const SCAN_POINTS: usize = 400;

/// Receiver play inside one pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolActions {
    pub lo: f64,
    pub hi: f64,
    /// θ^c splitting the pool into Ψ⁰ = [lo, θ^c] and Ψ¹ = [θ^c, hi].
    pub partition_state: f64,
    /// (P(Ψ⁰), P(Ψ¹)).
    pub event_probs: [f64; 2],
    /// (â⁰, â¹).
    pub sub_actions: [f64; 2],
    /// ā = P(Ψ⁰)â⁰ + P(Ψ¹)â¹.
    pub action: f64,
}

pub fn pooled_subactions(
    game: &ContinuousGameSpec,
    lo: f64,
    hi: f64,
    investigation: &InvestigationSpec,
) -> Result<PoolActions> {
    let prior = game.validate()?;
    investigation.validate()?;
    pool_actions(&prior, lo, hi, investigation)
}

fn pool_actions(
    prior: &Prior,
    lo: f64,
    hi: f64,
    investigation: &InvestigationSpec,
) -> Result<PoolActions> {
    if !(lo >= prior.lo && hi <= prior.hi && lo < hi) {
        return Err(GameError::InvalidParameter(format!(
            "pool [{lo}, {hi}] must be a non-empty sub-interval of [{}, {}]",
            prior.lo, prior.hi
        )));
    }
    let c = investigation.partition.split(lo, hi);
    if !(c > lo && c < hi) {
        return Err(GameError::EmptySubInterval {
            lo,
            hi,
            partition: c,
        });
    }
    let m0 = prior.mass(lo, c);
    let m1 = prior.mass(c, hi);
    let total = m0 + m1;
    let event_probs = [m0 / total, m1 / total];
    let sub_actions = [prior.conditional_mean(lo, c), prior.conditional_mean(c, hi)];
    Ok(PoolActions {
        lo,
        hi,
        partition_state: c,
        event_probs,
        sub_actions,
        action: event_probs[0] * sub_actions[0] + event_probs[1] * sub_actions[1],
    })
}

/// β^R(Ψ | e): Bayes over the two investigation events, or `default` when e
/// has probability zero.
pub fn evidence_posterior(
    investigation: &InvestigationSpec,
    event_probs: [f64; 2],
    e: usize,
    default: [f64; 2],
) -> Result<[f64; 2]> {
    investigation.validate()?;
    let p0 = probability("P(Psi0)", event_probs[0])?;
    let p1 = probability("P(Psi1)", event_probs[1])?;
    if (p0 + p1 - 1.0).abs() > 1e-9 {
        return Err(GameError::InvalidParameter(format!(
            "event probabilities must sum to 1, got {}",
            p0 + p1
        )));
    }
    if e > 1 {
        return Err(GameError::InvalidParameter(format!(
            "evidence must be 0 or 1, got {e}"
        )));
    }
    let w0 = investigation.emission(e, 0) * p0;
    let w1 = investigation.emission(e, 1) * p1;
    if w0 + w1 <= 0.0 {
        return Ok(default);
    }
    Ok([w0 / (w0 + w1), w1 / (w0 + w1)])
}

/// Receiver's ex-ante utility ∫ U^R f dθ over a pool, with or without investigation.
pub fn pool_receiver_value(
    game: &ContinuousGameSpec,
    lo: f64,
    hi: f64,
    investigation: Option<&InvestigationSpec>,
) -> Result<f64> {
    let prior = game.validate()?;
    let Some(inv) = investigation else {
        return Ok(-prior.mass(lo, hi) * prior.conditional_variance(lo, hi));
    };
    inv.validate()?;
    let pool = pool_actions(&prior, lo, hi, inv)?;
    let c = pool.partition_state;
    let parts = [(lo, c), (c, hi)];
    let mut value = 0.0;
    for e in 0..2 {
        let post = evidence_posterior(inv, pool.event_probs, e, pool.event_probs)?;
        let a = post[0] * pool.sub_actions[0] + post[1] * pool.sub_actions[1];
        for (i, (s, t)) in parts.iter().enumerate() {
            let mass = prior.mass(*s, *t);
            let spread = prior.conditional_variance(*s, *t) + (a - pool.sub_actions[i]).powi(2);
            value -= inv.emission(e, i) * mass * spread;
        }
    }
    Ok(value)
}

/// Receiver's ex-ante utility over consecutive pools given by `edges`.
pub fn partition_receiver_value(
    game: &ContinuousGameSpec,
    edges: &[f64],
    investigation: Option<&InvestigationSpec>,
) -> Result<f64> {
    edges
        .windows(2)
        .map(|w| pool_receiver_value(game, w[0], w[1], investigation))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deceivability {
    /// The receiver recovers θ exactly.
    Undeceivable,
    /// The receiver only learns which pool θ lies in.
    Deceivable,
}

pub fn classify_deceivability(solution: &SlaphSolution, lo: f64, hi: f64) -> Result<Deceivability> {
    let (tlo, thi) = (solution.game.theta_lo, solution.game.theta_hi);
    if !(lo <= hi && lo >= tlo && hi <= thi) {
        return Err(GameError::InvalidParameter(format!(
            "interval [{lo}, {hi}] must lie inside [{tlo}, {thi}]"
        )));
    }
    let tb = solution.boundary_state;
    if solution.pools.is_empty() || hi <= tb {
        Ok(Deceivability::Undeceivable)
    } else if lo >= tb {
        Ok(Deceivability::Deceivable)
    } else {
        Err(GameError::MixedRegion {
            lo,
            hi,
            boundary: tb,
        })
    }
}

/// A sender message: a plain report, or the top report θ̄ tagged with a pool index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Message {
    Report(f64),
    Pool(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlaphResiduals {
    /// U^A(ā_{j−1}, θ_j) − U^A(ā_j, θ_j) at each interior edge.
    pub link: Vec<f64>,
    /// U^S(pool) − U^S(separate) at θ_B when θ_B > θ̲.
    pub boundary: Option<f64>,
    /// U^S(separate) − U^S(pool) at θ̲ when θ_B = θ̲; must be ≤ 0.
    pub lower_slack: Option<f64>,
}

impl SlaphResiduals {
    pub fn max_abs(&self) -> f64 {
        self.link
            .iter()
            .chain(self.boundary.iter())
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlaphSolution {
    pub game: ContinuousGameSpec,
    pub investigation: InvestigationSpec,
    pub boundary_state: f64,
    pub cutoff: Option<f64>,
    /// θ_B = θ_0 < θ_1 < … < θ_K = θ̄; just `[θ̄]` when every state separates.
    pub pool_edges: Vec<f64>,
    pub pools: Vec<PoolActions>,
    pub residuals: SlaphResiduals,
}

impl SlaphSolution {
    fn curve(&self) -> SeparatingCurve {
        SeparatingCurve {
            theta_start: self.game.theta_lo,
            b: self.game.bias_b,
            k: self.game.cost_k,
            report_cap: Some(self.game.theta_hi),
        }
    }

    pub fn n_pools(&self) -> usize {
        self.pools.len()
    }

    /// Index of the pool containing θ, if θ pools.
    pub fn pool_of(&self, theta: f64) -> Option<usize> {
        if self.pools.is_empty() || theta < self.boundary_state {
            return None;
        }
        let j = self.pool_edges[1..]
            .iter()
            .position(|edge| theta < *edge)
            .unwrap_or(self.pools.len() - 1);
        Some(j)
    }

    /// Equilibrium message of state θ.
    pub fn sender_message(&self, theta: f64) -> Result<Message> {
        match self.pool_of(theta) {
            Some(j) => Ok(Message::Pool(j)),
            None => Ok(Message::Report(self.curve().sigma(theta)?)),
        }
    }

    /// Report value carried by a message.
    pub fn report(&self, message: &Message) -> f64 {
        match *message {
            Message::Report(r) => r,
            Message::Pool(_) => self.game.theta_hi,
        }
    }

    /// Receiver's action. Reports on the separating curve are inverted;
    /// every other untagged report is read as the boundary state.
    pub fn receiver_action(&self, message: &Message) -> f64 {
        match *message {
            Message::Pool(j) => match self.pools.get(j) {
                Some(pool) => pool.action,
                None => self.boundary_state,
            },
            Message::Report(r) => {
                let g = &self.game;
                if self.pools.is_empty() {
                    return r.clamp(g.theta_lo, g.theta_hi);
                }
                let top = self
                    .curve()
                    .sigma(self.boundary_state)
                    .unwrap_or(g.theta_hi);
                if self.boundary_state > g.theta_lo && r >= g.theta_lo && r < top {
                    // θ(σ) = σ + (b/k)·(e^{−k(σ−θ̲)/b} − 1)
                    let s = g.bias_b / g.cost_k;
                    (r + s * (-(r - g.theta_lo) / s).exp_m1()).min(self.boundary_state)
                } else if r < g.theta_lo {
                    g.theta_lo
                } else {
                    self.boundary_state
                }
            }
        }
    }

    /// Sender utility of state θ sending `message`.
    pub fn sender_payoff(&self, theta: f64, message: &Message) -> f64 {
        self.game
            .sender_utility(self.receiver_action(message), theta, self.report(message))
    }
}

enum Chain {
    Complete(Vec<f64>),
    Exit(usize),
}

/// Smallest x in (a, hi] with E[θ | [a, x]] = target, if any.
fn invert_mean(prior: &Prior, a: f64, target: f64, hi: f64) -> Option<f64> {
    if target <= a {
        return None;
    }
    if let PriorDensity::Uniform = prior.density {
        let x = 2.0 * target - a;
        return (x <= hi).then_some(x);
    }
    if prior.conditional_mean(a, hi) < target {
        return None;
    }
    find_root(|x| prior.conditional_mean(a, x) - target, a, hi, 1e-15).ok()
}

/// Pool edges generated by link indifference from (θ_B, θ_1).
fn chain(prior: &Prior, b: f64, theta_b: f64, theta1: f64, k: usize) -> Chain {
    let mut edges = Vec::with_capacity(k + 1);
    edges.push(theta_b);
    edges.push(theta1);
    for j in 1..k {
        let prev_mean = prior.conditional_mean(edges[j - 1], edges[j]);
        let target = 2.0 * (edges[j] + b) - prev_mean;
        match invert_mean(prior, edges[j], target, prior.hi) {
            Some(x) => edges.push(x),
            None => return Chain::Exit(j),
        }
    }
    Chain::Complete(edges)
}

fn shoot(prior: &Prior, b: f64, theta_b: f64, theta1: f64, k: usize) -> f64 {
    match chain(prior, b, theta_b, theta1, k) {
        Chain::Complete(edges) => edges[k] - prior.hi,
        Chain::Exit(j) => 1.0 + (k - j) as f64,
    }
}

fn min_step(prior: &Prior) -> f64 {
    1e-12 * (prior.hi - prior.lo)
}

fn feasible(prior: &Prior, b: f64, theta_b: f64, k: usize) -> bool {
    if theta_b >= prior.hi {
        return false;
    }
    k == 1 || shoot(prior, b, theta_b, theta_b + min_step(prior), k) < 0.0
}

fn edges_for(prior: &Prior, b: f64, theta_b: f64, k: usize) -> Option<Vec<f64>> {
    if !feasible(prior, b, theta_b, k) {
        return None;
    }
    if k == 1 {
        return Some(vec![theta_b, prior.hi]);
    }
    let lo = theta_b + min_step(prior);
    let theta1 = find_root(|t| shoot(prior, b, theta_b, t, k), lo, prior.hi, 1e-15).ok()?;
    match chain(prior, b, theta_b, theta1, k) {
        Chain::Complete(mut edges) => {
            edges[k] = prior.hi;
            edges.windows(2).all(|w| w[0] < w[1]).then_some(edges)
        }
        Chain::Exit(_) => None,
    }
}

/// Largest θ_B admitting a K-pool partition of [θ_B, θ̄].
fn max_feasible_boundary(prior: &Prior, b: f64, k: usize) -> Option<f64> {
    if !feasible(prior, b, prior.lo, k) {
        return None;
    }
    if k == 1 {
        return Some(prior.hi);
    }
    let (mut lo, mut hi) = (prior.lo, prior.hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(prior, b, mid, k) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    Some(lo)
}

/// U^S(pool 0) − U^S(separate) for a boundary at θ_B.
fn boundary_gap(
    game: &ContinuousGameSpec,
    prior: &Prior,
    curve: &SeparatingCurve,
    theta_b: f64,
    k: usize,
) -> Option<f64> {
    let edges = edges_for(prior, game.bias_b, theta_b, k)?;
    let pool_action = prior.conditional_mean(edges[0], edges[1]);
    let pool = game.sender_utility(pool_action, theta_b, game.theta_hi);
    let report = curve.sigma(theta_b).ok()?;
    let sep = game.sender_utility(theta_b, theta_b, report);
    Some(pool - sep)
}

fn try_solve(
    game: &ContinuousGameSpec,
    prior: &Prior,
    investigation: &InvestigationSpec,
    k: usize,
) -> Option<SlaphSolution> {
    let curve = game.curve().ok()?;
    let cutoff = curve.cutoff()?;
    let b = game.bias_b;
    let top_feasible = max_feasible_boundary(prior, b, k)?;
    let top = if top_feasible < cutoff {
        top_feasible - 1e-9 * (top_feasible - prior.lo)
    } else {
        cutoff
    };

    let gap = |t: f64| boundary_gap(game, prior, &curve, t, k);
    let mut boundary = None;
    if top > prior.lo {
        let grid: Vec<(f64, Option<f64>)> = (0..=SCAN_POINTS)
            .map(|i| {
                let t = prior.lo + (top - prior.lo) * i as f64 / SCAN_POINTS as f64;
                (t, gap(t))
            })
            .collect();
        for w in grid.windows(2).rev() {
            if let ((t0, Some(g0)), (t1, Some(g1))) = (w[0], w[1]) {
                if g0 < 0.0 && g1 >= 0.0 && t1 > prior.lo {
                    let root = find_root(|t| gap(t).unwrap_or(f64::NAN), t0, t1, 1e-15).ok();
                    if let Some(r) = root.filter(|r| *r > prior.lo) {
                        boundary = Some(r);
                        break;
                    }
                }
            }
        }
    }

    let (theta_b, bc, slack) = match boundary {
        Some(t) => (t, gap(t), None),
        None => {
            let g = gap(prior.lo)?;
            if -g > 0.0 {
                return None;
            }
            (prior.lo, None, Some(-g))
        }
    };

    let edges = edges_for(prior, b, theta_b, k)?;
    let pools = edges
        .windows(2)
        .map(|w| pool_actions(prior, w[0], w[1], investigation))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let link = (1..k)
        .map(|j| {
            game.action_utility(pools[j - 1].action, edges[j])
                - game.action_utility(pools[j].action, edges[j])
        })
        .collect();
    let boundary_residual = bc.map(|_| {
        let pool = game.sender_utility(pools[0].action, theta_b, game.theta_hi);
        let sep = game.sender_utility(theta_b, theta_b, curve.sigma(theta_b).unwrap_or(f64::NAN));
        pool - sep
    });
    Some(SlaphSolution {
        game: *game,
        investigation: *investigation,
        boundary_state: theta_b,
        cutoff: Some(cutoff),
        pool_edges: edges,
        pools,
        residuals: SlaphResiduals {
            link,
            boundary: boundary_residual,
            lower_slack: slack,
        },
    })
}

/// Separating-low, pooling-high equilibrium with `n_pools` pools.
pub fn solve_slaph(
    game: &ContinuousGameSpec,
    investigation: &InvestigationSpec,
    n_pools: usize,
) -> Result<SlaphSolution> {
    let prior = game.validate()?;
    investigation.validate()?;
    if n_pools == 0 {
        return Err(GameError::InvalidParameter("need at least one pool".into()));
    }
    if game.bias_b == 0.0 {
        return Ok(SlaphSolution {
            game: *game,
            investigation: *investigation,
            boundary_state: game.theta_hi,
            cutoff: None,
            pool_edges: vec![game.theta_hi],
            pools: Vec::new(),
            residuals: SlaphResiduals {
                link: Vec::new(),
                boundary: None,
                lower_slack: None,
            },
        });
    }
    if game.cost_k <= 0.0 {
        return Err(GameError::InvalidParameter(
            "cost k must be > 0 when b > 0".into(),
        ));
    }
    if let Some(sol) = try_solve(game, &prior, investigation, n_pools) {
        return Ok(sol);
    }
    let mut upper = 1;
    while feasible(&prior, game.bias_b, prior.lo, upper + 1) {
        upper += 1;
    }
    let max_feasible = (1..=upper)
        .rev()
        .filter(|k| *k != n_pools)
        .find(|k| try_solve(game, &prior, investigation, *k).is_some());
    Err(GameError::InfeasiblePools {
        requested: n_pools,
        max_feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(b: f64, k: f64) -> ContinuousGameSpec {
        ContinuousGameSpec::uniform(0.0, 1.0, b, k)
    }

    #[test]
    fn uniform_subactions() {
        let p =
            pooled_subactions(&unit(0.1, 1.0), 0.2, 0.6, &InvestigationSpec::default()).unwrap();
        assert!((p.sub_actions[0] - 0.3).abs() < 1e-15);
        assert!((p.sub_actions[1] - 0.5).abs() < 1e-15);
        assert!((p.action - 0.4).abs() < 1e-15);
    }

    #[test]
    fn skewed_split_still_averages_to_the_pool_mean() {
        let inv = InvestigationSpec {
            partition: super::super::PartitionRule::Fraction { fraction: 0.9 },
            tp0: 0.7,
            tp1: 0.6,
        };
        let g = ContinuousGameSpec {
            prior: PriorDensity::Linear { slope: 0.7 },
            ..unit(0.1, 1.0)
        };
        let p = pooled_subactions(&g, 0.3, 0.8, &inv).unwrap();
        let prior = g.validate().unwrap();
        assert!((p.action - prior.conditional_mean(0.3, 0.8)).abs() < 1e-13);
    }

    #[test]
    fn degenerate_split_is_rejected() {
        let inv = InvestigationSpec {
            partition: super::super::PartitionRule::Fraction { fraction: 0.0 },
            tp0: 0.7,
            tp1: 0.6,
        };
        assert!(matches!(
            pooled_subactions(&unit(0.1, 1.0), 0.2, 0.6, &inv),
            Err(GameError::EmptySubInterval { .. })
        ));
    }

    #[test]
    fn evidence_updates() {
        let inv = InvestigationSpec::midpoint(0.8, 0.8);
        let post = evidence_posterior(&inv, [0.5, 0.5], 0, [0.5, 0.5]).unwrap();
        assert!((post[0] - 0.8).abs() < 1e-15);
        let flat = InvestigationSpec::midpoint(0.5, 0.5);
        for e in 0..2 {
            let post = evidence_posterior(&flat, [0.3, 0.7], e, [0.5, 0.5]).unwrap();
            assert!((post[0] - 0.3).abs() < 1e-15);
        }
        let sharp = InvestigationSpec::midpoint(1.0, 1.0);
        assert_eq!(
            evidence_posterior(&sharp, [0.3, 0.7], 1, [0.5, 0.5]).unwrap(),
            [0.0, 1.0]
        );
        // e = 1 impossible when Ψ¹ has no mass and x = 1
        assert_eq!(
            evidence_posterior(&sharp, [1.0, 0.0], 1, [0.25, 0.75]).unwrap(),
            [0.25, 0.75]
        );
    }

    #[test]
    fn uniform_edges_follow_the_quadratic_recursion() {
        let g = unit(0.05, 0.05);
        let sol = solve_slaph(&g, &InvestigationSpec::default(), 3).unwrap();
        let e = &sol.pool_edges;
        assert_eq!(e.len(), 4);
        for j in 0..e.len() - 2 {
            let r = e[j + 2] - 2.0 * e[j + 1] + e[j] - 4.0 * 0.05;
            assert!(r.abs() < 1e-12, "recursion residual {r}");
        }
        assert!(sol.residuals.max_abs() < 1e-10);
        assert!((sol.boundary_state - 0.36197).abs() < 1e-4);
    }

    #[test]
    fn single_pool_for_small_bias() {
        let sol = solve_slaph(&unit(0.02, 1.0), &InvestigationSpec::default(), 1).unwrap();
        assert!((sol.boundary_state - 0.972_404_1).abs() < 1e-6);
        assert!(sol.residuals.boundary.unwrap().abs() < 1e-10);
    }

    #[test]
    fn too_many_pools_reports_the_feasible_count() {
        let err = solve_slaph(&unit(0.02, 1.0), &InvestigationSpec::default(), 3).unwrap_err();
        assert_eq!(
            err,
            GameError::InfeasiblePools {
                requested: 3,
                max_feasible: Some(1)
            }
        );
    }

    #[test]
    fn zero_bias_separates_everywhere() {
        let sol = solve_slaph(&unit(0.0, 1.0), &InvestigationSpec::default(), 2).unwrap();
        assert_eq!(
            classify_deceivability(&sol, 0.0, 1.0).unwrap(),
            Deceivability::Undeceivable
        );
        assert_eq!(sol.sender_message(0.4).unwrap(), Message::Report(0.4));
    }

    #[test]
    fn regions_split_at_the_boundary() {
        let sol = solve_slaph(&unit(0.05, 0.05), &InvestigationSpec::default(), 3).unwrap();
        let tb = sol.boundary_state;
        assert_eq!(
            classify_deceivability(&sol, 0.0, tb / 2.0).unwrap(),
            Deceivability::Undeceivable
        );
        for w in sol.pool_edges.windows(2) {
            assert_eq!(
                classify_deceivability(&sol, w[0], w[1]).unwrap(),
                Deceivability::Deceivable
            );
        }
        assert!(matches!(
            classify_deceivability(&sol, tb / 2.0, 1.0),
            Err(GameError::MixedRegion { .. })
        ));
    }

    #[test]
    fn receiver_inverts_separating_reports() {
        let sol = solve_slaph(&unit(0.05, 0.05), &InvestigationSpec::default(), 3).unwrap();
        for theta in [0.0, 0.1, 0.2, 0.3] {
            let m = sol.sender_message(theta).unwrap();
            assert!((sol.receiver_action(&m) - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_prior_solves() {
        let g = ContinuousGameSpec {
            prior: PriorDensity::Linear { slope: 0.4 },
            ..unit(0.05, 0.05)
        };
        let sol = solve_slaph(&g, &InvestigationSpec::default(), 3).unwrap();
        assert!(sol.residuals.max_abs() < 1e-8);
    }

    #[test]
    fn merging_pools_hurts_the_receiver() {
        let g = unit(0.05, 0.05);
        let sol = solve_slaph(&g, &InvestigationSpec::default(), 3).unwrap();
        let e = &sol.pool_edges;
        let fine = partition_receiver_value(&g, e, None).unwrap();
        let merged = [e[0], e[2], e[3]];
        let coarse = partition_receiver_value(&g, &merged, None).unwrap();
        assert!(coarse <= fine);
    }

    #[test]
    fn investigation_helps_the_receiver() {
        let g = unit(0.05, 0.05);
        for x in [0.55, 0.7, 0.95] {
            let inv = InvestigationSpec::midpoint(x, x);
            let with = pool_receiver_value(&g, 0.3, 0.9, Some(&inv)).unwrap();
            let without = pool_receiver_value(&g, 0.3, 0.9, None).unwrap();
            assert!(with >= without);
        }
    }
}
