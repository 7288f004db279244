use super::{ConditionResidual, VerificationReport};
use crate::continuous::{ContinuousGameSpec, Message, SlaphSolution};

const SIMPSON_INTERVALS: usize = 2000;
const ODE_STEPS: usize = 40_000;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let n = SIMPSON_INTERVALS;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Maximiser of ∫ U^R(a, θ) f(θ) dθ over [lo, hi], located by bisecting
/// the numerically integrated derivative in a.
fn best_action(game: &ContinuousGameSpec, pdf: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let h = 1e-6 * (hi - lo).max(1e-12);
    let slope = |a: f64| {
        let up = simpson(|t| game.receiver_utility(a + h, t) * pdf(t), lo, hi);
        let down = simpson(|t| game.receiver_utility(a - h, t) * pdf(t), lo, hi);
        up - down
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// σ(θ) from integrating dθ/dσ = k(σ − θ)/b with classical RK4 and
/// inverting by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct OdeCurve {
    sigma: Vec<f64>,
    theta: Vec<f64>,
    slope: Vec<f64>,
}

impl OdeCurve {
    pub fn integrate(theta_start: f64, b: f64, k: f64, sigma_max: f64) -> Self {
        Self::with_steps(theta_start, b, k, sigma_max, ODE_STEPS)
    }

    pub fn with_steps(theta_start: f64, b: f64, k: f64, sigma_max: f64, steps: usize) -> Self {
        let rhs = |s: f64, t: f64| k * (s - t) / b;
        let h = (sigma_max - theta_start) / steps as f64;
        let mut sigma = Vec::with_capacity(steps + 1);
        let mut theta = Vec::with_capacity(steps + 1);
        let mut slope = Vec::with_capacity(steps + 1);
        let (mut s, mut t) = (theta_start, theta_start);
        for i in 0..=steps {
            sigma.push(s);
            theta.push(t);
            slope.push(rhs(s, t));
            if i == steps {
                break;
            }
            let k1 = rhs(s, t);
            let k2 = rhs(s + 0.5 * h, t + 0.5 * h * k1);
            let k3 = rhs(s + 0.5 * h, t + 0.5 * h * k2);
            let k4 = rhs(s + h, t + h * k3);
            t += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            s = theta_start + (i + 1) as f64 * h;
        }
        Self {
            sigma,
            theta,
            slope,
        }
    }

    /// Largest state reached by the integration.
    pub fn max_state(&self) -> f64 {
        *self.theta.last().unwrap_or(&f64::NAN)
    }

    /// σ(θ), or `None` outside the integrated range.
    pub fn sigma(&self, theta: f64) -> Option<f64> {
        let first = *self.theta.first()?;
        if theta < first || theta > self.max_state() {
            return None;
        }
        let i = self
            .theta
            .partition_point(|t| *t < theta)
            .clamp(1, self.theta.len() - 1);
        let (s0, s1) = (self.sigma[i - 1], self.sigma[i]);
        let (t0, t1) = (self.theta[i - 1], self.theta[i]);
        let (d0, d1) = (self.slope[i - 1], self.slope[i]);
        let h = s1 - s0;
        let hermite = |x: f64| {
            let u = (x - s0) / h;
            let (u2, u3) = (u * u, u * u * u);
            (2.0 * u3 - 3.0 * u2 + 1.0) * t0
                + (u3 - 2.0 * u2 + u) * h * d0
                + (-2.0 * u3 + 3.0 * u2) * t1
                + (u3 - u2) * h * d1
        };
        let (mut lo, mut hi) = (s0, s1);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Re-checks a separating-low, pooling-high solution.
///
/// Pool actions are recomputed by quadrature, the separating reports by ODE
/// integration. Every state on an `n_states` grid is tested against every
/// report on an `n_reports` grid and every pool message; every pool action
/// is tested against the receiver's best response. Link, boundary and
/// lower-slack conditions are recomputed from the independent pool actions.
pub fn verify_continuous(
    solution: &SlaphSolution,
    n_states: usize,
    n_reports: usize,
    tolerance: f64,
) -> VerificationReport {
    let game = &solution.game;
    let Ok(prior) = game.validate() else {
        return VerificationReport::new(
            f64::INFINITY,
            f64::INFINITY,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            tolerance,
        );
    };
    let pdf = |t: f64| prior.pdf(t);
    let (lo, hi) = (game.theta_lo, game.theta_hi);
    let b = game.bias_b;
    let theta_b = solution.boundary_state;
    let edges = &solution.pool_edges;
    let n_pools = solution.pools.len();
    let mut conditions = Vec::new();
    let mut push = |name: String, value: f64| conditions.push(ConditionResidual { name, value });

    let structural = edges.len() != n_pools + 1
        || edges.windows(2).any(|w| !(w[0] < w[1]))
        || (n_pools > 0 && ((edges[0] - theta_b).abs() > 0.0 || edges[n_pools] != hi))
        || theta_b < lo;
    push("structure".into(), if structural { 1.0 } else { 0.0 });

    let actions: Vec<f64> = edges
        .windows(2)
        .map(|w| best_action(game, &pdf, w[0], w[1]))
        .collect();

    let mut receiver_gain = 0.0f64;
    for (j, pool) in solution.pools.iter().enumerate() {
        let (a, c) = (edges[j], edges[j + 1]);
        let value = |x: f64| simpson(|t| game.receiver_utility(x, t) * pdf(t), a, c);
        let mass = simpson(pdf, a, c);
        receiver_gain = receiver_gain.max((value(actions[j]) - value(pool.action)) / mass);
    }

    let ode = (b > 0.0 && game.cost_k > 0.0).then(|| OdeCurve::integrate(lo, b, game.cost_k, hi));
    let ode_sigma = |t: f64| match &ode {
        Some(c) => c.sigma(t),
        None => Some(t),
    };

    for j in 1..n_pools {
        let link = game.action_utility(actions[j - 1], edges[j])
            - game.action_utility(actions[j], edges[j]);
        push(format!("link_{j}"), link);
    }
    if n_pools > 0 {
        let pool = game.sender_utility(actions[0], theta_b, hi);
        if theta_b > lo {
            let sep = ode_sigma(theta_b)
                .map(|r| game.sender_utility(theta_b, theta_b, r))
                .unwrap_or(f64::NAN);
            push("boundary".into(), pool - sep);
        } else {
            let sep = game.sender_utility(lo, lo, lo);
            push("lower_slack".into(), (sep - pool).max(0.0));
        }
    }

    let states: Vec<f64> = grid(lo, hi, n_states);
    let reports: Vec<f64> = grid(lo, hi, n_reports);
    let mut sender_gain = 0.0f64;
    let mut report_gap = 0.0f64;
    let mut monotone_gap = 0.0f64;
    let mut last_report = f64::NEG_INFINITY;
    for &theta in &states {
        let Ok(message) = solution.sender_message(theta) else {
            sender_gain = f64::INFINITY;
            continue;
        };
        let report = solution.report(&message);
        monotone_gap = monotone_gap.max(last_report - report);
        last_report = report;
        if let Message::Report(r) = message {
            match ode_sigma(theta) {
                Some(s) => report_gap = report_gap.max((s - r).abs()),
                None => report_gap = f64::INFINITY,
            }
            let action = solution.receiver_action(&message);
            receiver_gain = receiver_gain.max((action - theta).powi(2));
        }
        let current = solution.sender_payoff(theta, &message);
        let deviations = reports
            .iter()
            .map(|r| Message::Report(*r))
            .chain((0..n_pools).map(Message::Pool));
        for d in deviations {
            sender_gain = sender_gain.max(solution.sender_payoff(theta, &d) - current);
        }
    }
    push(
        "ode_report_gap".into(),
        if report_gap > 1e-6 { report_gap } else { 0.0 },
    );
    push("monotonicity".into(), monotone_gap.max(0.0));

    VerificationReport::new(
        sender_gain,
        receiver_gain,
        Vec::new(),
        Vec::new(),
        conditions,
        tolerance,
    )
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode_matches_closed_form() {
        // θ(σ) = σ − (b/k)(1 − e^{−k(σ−θ_s)/b})
        let (b, k) = (0.3, 1.7);
        let c = OdeCurve::integrate(0.0, b, k, 1.0);
        for i in 1..50 {
            let s = i as f64 / 50.0;
            let t = s - b / k * (1.0 - (-k * s / b).exp());
            assert!((c.sigma(t).unwrap() - s).abs() < 1e-9);
        }
    }
}
