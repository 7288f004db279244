//! Equilibria of the binary cheap-talk game with a detector: prior regimes,
//! pooling equilibria and the partially-separating mixed equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::numeric::probability;
use crate::signaling::{
    BeliefSystemBinary, DetectorClass, DetectorSpec, GameSpecBinary, ReceiverStrategyBinary,
    SenderStrategyBinary, StrategyProfile,
};

/// Priors closer than this to a threshold are treated as boundary priors.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    ZeroDominant,
    ZeroHeavy,
    Middle,
    OneHeavy,
    OneDominant,
}

impl RegimeLabel {
    pub const ALL: [RegimeLabel; 5] = [
        RegimeLabel::ZeroDominant,
        RegimeLabel::ZeroHeavy,
        RegimeLabel::Middle,
        RegimeLabel::OneHeavy,
        RegimeLabel::OneDominant,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn short(self) -> &'static str {
        match self {
            RegimeLabel::ZeroDominant => "0-D",
            RegimeLabel::ZeroHeavy => "0-H",
            RegimeLabel::Middle => "M",
            RegimeLabel::OneHeavy => "1-H",
            RegimeLabel::OneDominant => "1-D",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short())
    }
}

/// The four prior thresholds splitting [0, 1] into five regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    /// Sorted ascending.
    pub boundaries: [f64; 4],
    /// Unsorted thresholds t(m, e), indexed `[m][e]`.
    pub by_observation: [[f64; 2]; 2],
    pub detector_class: Option<DetectorClass>,
}

impl Regime {
    /// Regime containing `p`; rejects priors on a boundary.
    pub fn classify(&self, p: f64) -> Result<RegimeLabel> {
        let p = probability("prior_p1", p)?;
        if self
            .boundaries
            .iter()
            .any(|t| (p - t).abs() <= BOUNDARY_TOL)
        {
            return Err(GameError::BoundaryPrior(p));
        }
        let idx = self.boundaries.iter().filter(|t| p > **t).count();
        Ok(RegimeLabel::ALL[idx])
    }

    /// Open interval occupied by `label`.
    pub fn interval(&self, label: RegimeLabel) -> (f64, f64) {
        let i = label.index();
        let lo = if i == 0 { 0.0 } else { self.boundaries[i - 1] };
        let hi = if i == 4 { 1.0 } else { self.boundaries[i] };
        (lo, hi)
    }
}

/// Prior threshold above which the receiver plays a = 1 after (m, e)
/// when both types pool on m.
pub fn observation_threshold(
    delta0: f64,
    delta1: f64,
    detector: &DetectorSpec,
    m: usize,
    e: usize,
) -> f64 {
    let l0 = detector.emission(e, 0, m) * delta0;
    let l1 = detector.emission(e, 1, m) * delta1;
    l0 / (l0 + l1)
}

pub fn regime_thresholds(delta0: f64, delta1: f64, detector: &DetectorSpec) -> Result<Regime> {
    if !(delta0 > 0.0 && delta1 > 0.0 && delta0.is_finite() && delta1.is_finite()) {
        return Err(GameError::UtilityOrdering(format!(
            "receiver deltas must be positive (got {delta0}, {delta1})"
        )));
    }
    detector.validate()?;
    if !detector.is_informative() {
        return Err(GameError::UninformativeDetector);
    }
    let mut by_observation = [[0.0; 2]; 2];
    let mut boundaries = [0.0; 4];
    for m in 0..2 {
        for e in 0..2 {
            let t = observation_threshold(delta0, delta1, detector, m, e);
            by_observation[m][e] = t;
            boundaries[2 * m + e] = t;
        }
    }
    boundaries.sort_by(f64::total_cmp);
    Ok(Regime {
        boundaries,
        by_observation,
        detector_class: detector.class(),
    })
}

/// μ^R(θ = 1 | m), or `off_path_default` when m has zero probability.
pub fn posterior_message(
    game: &GameSpecBinary,
    sender: &SenderStrategyBinary,
    m: usize,
    off_path_default: f64,
) -> Result<f64> {
    game.validate()?;
    sender.validate()?;
    let default = probability("off_path_default", off_path_default)?;
    let w1 = sender.prob(m, 1) * game.prior(1);
    let w0 = sender.prob(m, 0) * game.prior(0);
    if w0 + w1 <= 0.0 {
        return Ok(default);
    }
    Ok(w1 / (w0 + w1))
}

/// μ^R(θ = 1 | m, e): the message update followed by the evidence update.
pub fn posterior_with_evidence(
    game: &GameSpecBinary,
    sender: &SenderStrategyBinary,
    m: usize,
    e: usize,
    off_path_default: f64,
) -> Result<f64> {
    let default = probability("off_path_default", off_path_default)?;
    let w0_m = sender.prob(m, 0) * game.prior(0);
    let w1_m = sender.prob(m, 1) * game.prior(1);
    if w0_m + w1_m <= 0.0 {
        return Ok(default);
    }
    let mu = posterior_message(game, sender, m, default)?;
    let w1 = game.detector.emission(e, 1, m) * mu;
    let w0 = game.detector.emission(e, 0, m) * (1.0 - mu);
    if w0 + w1 <= 0.0 {
        return Ok(default);
    }
    Ok(w1 / (w0 + w1))
}

/// Deterministic receiver response to every (m, e), each computed as if
/// both types pooled on that m.
pub fn pooling_receiver_strategy(
    label: RegimeLabel,
    class: DetectorClass,
    delta0: f64,
    delta1: f64,
    detector: &DetectorSpec,
    p: f64,
) -> Result<ReceiverStrategyBinary> {
    let regime = regime_thresholds(delta0, delta1, detector)?;
    match regime.detector_class {
        None => return Err(GameError::KnifeEdgeDetector),
        Some(c) if c != class => {
            return Err(GameError::InvalidParameter(format!(
                "detector (alpha = {}, beta = {}) is {:?}, not {:?}",
                detector.alpha, detector.beta, c, class
            )))
        }
        Some(_) => {}
    }
    let found = regime.classify(p)?;
    if found != label {
        return Err(GameError::WrongRegime {
            p,
            expected: format!("{label:?}"),
        });
    }
    Ok(pooled_responses(delta0, delta1, detector, p))
}

fn pooled_responses(
    delta0: f64,
    delta1: f64,
    detector: &DetectorSpec,
    p: f64,
) -> ReceiverStrategyBinary {
    let mut table = [[0.0; 2]; 2];
    for m in 0..2 {
        for e in 0..2 {
            let mu = pooled_posterior(detector, p, m, e);
            let gain1 = mu * delta1;
            let gain0 = (1.0 - mu) * delta0;
            table[m][e] = if gain1 > gain0 { 1.0 } else { 0.0 };
        }
    }
    ReceiverStrategyBinary {
        prob_a1_given_m_e: table,
    }
}

fn pooled_posterior(detector: &DetectorSpec, p: f64, m: usize, e: usize) -> f64 {
    let w1 = p * detector.emission(e, 1, m);
    let w0 = (1.0 - p) * detector.emission(e, 0, m);
    if w0 + w1 <= 0.0 {
        p
    } else {
        w1 / (w0 + w1)
    }
}

/// A pooling equilibrium together with its supporting off-path beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolingPbne {
    pub pooled_message: usize,
    /// The receiver's action on the equilibrium path, whatever the evidence.
    pub action: usize,
    /// (σ^R(1 | m, 0), σ^R(1 | m, 1)) for the pooled message.
    pub receiver_on_path: [f64; 2],
    /// Smallest off-path belief in θ = `action` that keeps the receiver on `action`.
    pub off_path_belief_floor: f64,
    /// Full profile using off-path belief 1 in θ = `action`.
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PoolingOutcome {
    Exists(PoolingPbne),
    /// On-path responses depend on the evidence, so one type always gains by deviating.
    Nonexistent {
        pooled_message: usize,
        receiver_on_path: [f64; 2],
    },
}

impl PoolingOutcome {
    pub fn exists(&self) -> bool {
        matches!(self, PoolingOutcome::Exists(_))
    }
}

pub fn pooling_pbne(game: &GameSpecBinary, pooled_message: usize) -> Result<PoolingOutcome> {
    game.validate()?;
    if pooled_message > 1 {
        return Err(GameError::InvalidParameter(format!(
            "pooled message must be 0 or 1, got {pooled_message}"
        )));
    }
    let m = pooled_message;
    let (d0, d1) = (game.utilities.delta0(), game.utilities.delta1());
    let p = game.types.prior_p1;
    for e in 0..2 {
        let t = observation_threshold(d0, d1, &game.detector, m, e);
        if (p - t).abs() <= BOUNDARY_TOL {
            return Err(GameError::BoundaryPrior(p));
        }
    }
    let responses = pooled_responses(d0, d1, &game.detector, p);
    let on_path = responses.prob_a1_given_m_e[m];
    if on_path[0] != on_path[1] {
        if game.detector.class().is_none() {
            return Err(GameError::KnifeEdgeDetector);
        }
        return Ok(PoolingOutcome::Nonexistent {
            pooled_message: m,
            receiver_on_path: on_path,
        });
    }

    let action = on_path[0] as usize;
    let d = [d0, d1];
    let floor = d[1 - action] / (d[1 - action] + d[action]);
    let off_belief = if action == 1 { 1.0 } else { 0.0 };
    let a = action as f64;

    let mut receiver = [[a; 2]; 2];
    receiver[m] = on_path;
    let mut mu = [[off_belief; 2]; 2];
    let sender = SenderStrategyBinary::pooling(m);
    for e in 0..2 {
        mu[m][e] = posterior_with_evidence(game, &sender, m, e, off_belief)?;
    }
    Ok(PoolingOutcome::Exists(PoolingPbne {
        pooled_message: m,
        action,
        receiver_on_path: on_path,
        off_path_belief_floor: floor,
        profile: StrategyProfile {
            sender,
            receiver: ReceiverStrategyBinary {
                prob_a1_given_m_e: receiver,
            },
            beliefs: BeliefSystemBinary { mu },
        },
    }))
}

/// The partially-separating equilibrium of the Middle regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedPbne {
    pub sender: SenderStrategyBinary,
    pub receiver: ReceiverStrategyBinary,
    pub beliefs: BeliefSystemBinary,
    pub detector_class: DetectorClass,
}

impl MixedPbne {
    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile {
            sender: self.sender,
            receiver: self.receiver,
            beliefs: self.beliefs,
        }
    }
}

pub fn partial_separating_pbne(game: &GameSpecBinary) -> Result<MixedPbne> {
    game.validate()?;
    let det = &game.detector;
    let class = det.class().ok_or(GameError::KnifeEdgeDetector)?;
    let (d0, d1) = (game.utilities.delta0(), game.utilities.delta1());
    let p = game.types.prior_p1;
    let regime = regime_thresholds(d0, d1, det)?;
    if regime.classify(p)? != RegimeLabel::Middle {
        return Err(GameError::WrongRegime {
            p,
            expected: "Middle".into(),
        });
    }

    let (alpha, beta) = (det.alpha, det.beta);
    let (abar, bbar) = (1.0 - alpha, 1.0 - beta);
    let rho = p * d1 / ((1.0 - p) * d0);
    let (s0, s1, receiver) = match class {
        DetectorClass::Conservative => {
            let den = abar * abar - bbar * bbar;
            let s0 = (abar * abar - rho * abar * bbar) / den;
            let s1 = (abar * bbar / rho - bbar * bbar) / den;
            let r00 = (1.0 - alpha - beta) / (2.0 - alpha - beta);
            let r10 = 1.0 / (2.0 - alpha - beta);
            (s0, s1, [[r00, 1.0], [r10, 0.0]])
        }
        DetectorClass::Aggressive => {
            let s1 = (beta * beta - alpha * beta / rho) / (beta * beta - alpha * alpha);
            let s0 = rho * s1 * alpha / beta;
            let r01 = 1.0 / (alpha + beta);
            let r11 = (alpha + beta - 1.0) / (alpha + beta);
            (s0, s1, [[0.0, r01], [1.0, r11]])
        }
    };

    let sender = SenderStrategyBinary::new(s0, s1)
        .and_then(|s| ReceiverStrategyBinary::new(receiver).map(|_| s))
        .map_err(|_| {
            GameError::Internal(format!(
                "mixed strategy outside [0, 1] at p = {p} (sender {s0}, {s1}; receiver {receiver:?})"
            ))
        })?;

    let mut mu = [[0.0; 2]; 2];
    for m in 0..2 {
        for e in 0..2 {
            mu[m][e] = posterior_with_evidence(game, &sender, m, e, p)?;
        }
    }
    Ok(MixedPbne {
        sender,
        receiver: ReceiverStrategyBinary {
            prob_a1_given_m_e: receiver,
        },
        beliefs: BeliefSystemBinary { mu },
        detector_class: class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signaling::CheapTalkUtilities;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn message_posteriors() {
        let g = GameSpecBinary::canonical(0.3, 0.1, 0.6).unwrap();
        let truthful = SenderStrategyBinary::truthful();
        assert_eq!(posterior_message(&g, &truthful, 1, 0.5).unwrap(), 1.0);
        let pool = SenderStrategyBinary::pooling(1);
        assert!(close(
            posterior_message(&g, &pool, 1, 0.5).unwrap(),
            0.3,
            1e-15
        ));
        assert_eq!(posterior_message(&g, &pool, 0, 0.25).unwrap(), 0.25);
        let g = g.with_prior(0.5).unwrap();
        let s = SenderStrategyBinary::new(0.2, 0.8).unwrap();
        assert!(close(
            posterior_message(&g, &s, 1, 0.5).unwrap(),
            0.8,
            1e-15
        ));
    }

    #[test]
    fn evidence_posteriors() {
        let g = GameSpecBinary::canonical(0.5, 0.1, 0.6).unwrap();
        let pool = SenderStrategyBinary::pooling(1);
        let mu = posterior_with_evidence(&g, &pool, 1, 1, 0.5).unwrap();
        assert!(close(mu, 0.1 / 0.7, 1e-15));

        let flat = GameSpecBinary::canonical(0.37, 0.4, 0.4).unwrap();
        for m in 0..2 {
            for e in 0..2 {
                let mu =
                    posterior_with_evidence(&flat, &SenderStrategyBinary::pooling(m), m, e, 0.5)
                        .unwrap();
                assert!(close(mu, 0.37, 1e-15));
            }
        }

        let truthful = SenderStrategyBinary::truthful();
        for e in 0..2 {
            assert_eq!(
                posterior_with_evidence(&g, &truthful, 1, e, 0.5).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn thresholds_of_reference_detectors() {
        let r = regime_thresholds(1.0, 1.0, &DetectorSpec::new(0.1, 0.6).unwrap()).unwrap();
        let want = [1.0 / 7.0, 4.0 / 13.0, 9.0 / 13.0, 6.0 / 7.0];
        for (a, b) in r.boundaries.iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
        let r = regime_thresholds(1.0, 1.0, &DetectorSpec::new(0.6, 0.8).unwrap()).unwrap();
        let want = [1.0 / 3.0, 3.0 / 7.0, 4.0 / 7.0, 2.0 / 3.0];
        for (a, b) in r.boundaries.iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(
            regime_thresholds(1.0, 1.0, &DetectorSpec::new(0.3, 0.3).unwrap()),
            Err(GameError::UninformativeDetector)
        );
    }

    #[test]
    fn thresholds_agree_with_brute_force_utility_comparison() {
        let det = DetectorSpec::new(0.1, 0.6).unwrap();
        let r = regime_thresholds(1.0, 1.0, &det).unwrap();
        for m in 0..2 {
            for e in 0..2 {
                let t = r.by_observation[m][e];
                for i in 1..1000 {
                    let p = i as f64 / 1000.0;
                    if (p - t).abs() < 1e-9 {
                        continue;
                    }
                    // joint weights of (θ, e) under pooling on m
                    let w1 = p * det.emission(e, 1, m);
                    let w0 = (1.0 - p) * det.emission(e, 0, m);
                    assert_eq!(w1 > w0, p > t, "m={m} e={e} p={p}");
                }
            }
        }
    }

    #[test]
    fn classify_rejects_boundaries() {
        let r = regime_thresholds(1.0, 1.0, &DetectorSpec::new(0.1, 0.6).unwrap()).unwrap();
        assert_eq!(
            r.classify(4.0 / 13.0),
            Err(GameError::BoundaryPrior(4.0 / 13.0))
        );
        assert_eq!(r.classify(0.0).unwrap(), RegimeLabel::ZeroDominant);
        assert_eq!(r.classify(0.5).unwrap(), RegimeLabel::Middle);
        assert_eq!(r.classify(1.0).unwrap(), RegimeLabel::OneDominant);
    }

    #[test]
    fn pooling_responses_reference_rows() {
        let cons = DetectorSpec::new(0.1, 0.6).unwrap();
        let r = pooling_receiver_strategy(
            RegimeLabel::Middle,
            DetectorClass::Conservative,
            1.0,
            1.0,
            &cons,
            0.5,
        )
        .unwrap();
        assert_eq!(r.as_tuple(), [0.0, 1.0, 1.0, 0.0]);

        let aggr = DetectorSpec::new(0.6, 0.8).unwrap();
        let r = pooling_receiver_strategy(
            RegimeLabel::ZeroHeavy,
            DetectorClass::Aggressive,
            1.0,
            1.0,
            &aggr,
            0.38,
        )
        .unwrap();
        assert_eq!(r.as_tuple(), [0.0, 0.0, 1.0, 0.0]);

        for (det, class) in [
            (cons, DetectorClass::Conservative),
            (aggr, DetectorClass::Aggressive),
        ] {
            let r =
                pooling_receiver_strategy(RegimeLabel::ZeroDominant, class, 1.0, 1.0, &det, 1e-6)
                    .unwrap();
            assert_eq!(r.as_tuple(), [0.0; 4]);
        }

        assert!(matches!(
            pooling_receiver_strategy(
                RegimeLabel::ZeroHeavy,
                DetectorClass::Conservative,
                1.0,
                1.0,
                &cons,
                0.5
            ),
            Err(GameError::WrongRegime { .. })
        ));
        assert!(matches!(
            pooling_receiver_strategy(
                RegimeLabel::Middle,
                DetectorClass::Conservative,
                1.0,
                1.0,
                &cons,
                9.0 / 13.0
            ),
            Err(GameError::BoundaryPrior(_))
        ));
    }

    #[test]
    fn pooling_in_dominant_and_middle_regimes() {
        let g = GameSpecBinary::canonical(0.05, 0.1, 0.6).unwrap();
        for m in 0..2 {
            match pooling_pbne(&g, m).unwrap() {
                PoolingOutcome::Exists(pool) => {
                    assert_eq!(pool.action, 0);
                    assert_eq!(pool.off_path_belief_floor, 0.5);
                }
                other => panic!("expected a pool, got {other:?}"),
            }
        }
        let g = g.with_prior(0.95).unwrap();
        for m in 0..2 {
            let out = pooling_pbne(&g, m).unwrap();
            assert!(out.exists());
        }
        let g = g.with_prior(0.5).unwrap();
        for m in 0..2 {
            assert!(!pooling_pbne(&g, m).unwrap().exists());
        }
    }

    #[test]
    fn pooling_floor_tracks_deltas() {
        let g = GameSpecBinary::new(
            0.02,
            DetectorSpec::new(0.1, 0.6).unwrap(),
            CheapTalkUtilities::with_deltas(3.0, 1.0),
        )
        .unwrap();
        let PoolingOutcome::Exists(pool) = pooling_pbne(&g, 0).unwrap() else {
            panic!("no pool")
        };
        assert!(close(pool.off_path_belief_floor, 0.25, 1e-15));
    }

    #[test]
    fn knife_edge_is_rejected() {
        let g = GameSpecBinary::canonical(0.5, 0.3, 0.7).unwrap();
        assert_eq!(
            partial_separating_pbne(&g),
            Err(GameError::KnifeEdgeDetector)
        );
        assert_eq!(pooling_pbne(&g, 0), Err(GameError::KnifeEdgeDetector));
    }

    #[test]
    fn conservative_mixed_equilibrium() {
        let g = GameSpecBinary::canonical(0.5, 0.1, 0.6).unwrap();
        let eq = partial_separating_pbne(&g).unwrap();
        assert_eq!(eq.detector_class, DetectorClass::Conservative);
        let s = eq.sender.prob_m1_given_theta;
        assert!(close(s[0], 9.0 / 13.0, 1e-12));
        assert!(close(s[1], 4.0 / 13.0, 1e-12));
        let r = eq.receiver.as_tuple();
        let want = [3.0 / 13.0, 1.0, 10.0 / 13.0, 0.0];
        for (a, b) in r.iter().zip(want) {
            assert!(close(*a, b, 1e-12));
        }
        // the receiver mixes exactly where the belief sits at Δ0/(Δ0+Δ1)
        assert!(close(eq.beliefs.mu[0][0], 0.5, 1e-12));
        assert!(close(eq.beliefs.mu[1][0], 0.5, 1e-12));
    }

    #[test]
    fn aggressive_mixed_equilibrium() {
        let g = GameSpecBinary::canonical(0.5, 0.6, 0.8).unwrap();
        let eq = partial_separating_pbne(&g).unwrap();
        assert_eq!(eq.detector_class, DetectorClass::Aggressive);
        let s = eq.sender.prob_m1_given_theta;
        assert!(close(s[0], 3.0 / 7.0, 1e-12));
        assert!(close(s[1], 4.0 / 7.0, 1e-12));
        let want = [0.0, 5.0 / 7.0, 1.0, 2.0 / 7.0];
        for (a, b) in eq.receiver.as_tuple().iter().zip(want) {
            assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn mixed_equilibrium_outside_middle_is_an_error() {
        let g = GameSpecBinary::canonical(0.2, 0.1, 0.6).unwrap();
        assert!(matches!(
            partial_separating_pbne(&g),
            Err(GameError::WrongRegime { .. })
        ));
    }

    fn conservative_detector() -> impl Strategy<Value = DetectorSpec> {
        (0.01..0.9f64, 0.05..0.95f64)
            .prop_map(|(alpha, frac)| {
                let beta = alpha + frac * (1.0 - 2.0 * alpha).max(0.0);
                DetectorSpec::new(alpha, beta.min(1.0 - alpha - 1e-3).max(alpha + 1e-3)).unwrap()
            })
            .prop_filter("conservative and informative", |d| {
                d.class() == Some(DetectorClass::Conservative) && d.beta - d.alpha > 1e-3
            })
    }

    proptest! {
        #[test]
        fn joint_bayes_matches_two_step(
            p in 0.01..0.99f64,
            a in 0.0..1.0f64,
            b in 0.0..1.0f64,
            s0 in 0.01..0.99f64,
            s1 in 0.01..0.99f64,
            m in 0usize..2,
            e in 0usize..2,
        ) {
            let (alpha, beta) = if a <= b { (a, b) } else { (b, a) };
            let g = GameSpecBinary::canonical(p, alpha, beta).unwrap();
            let sender = SenderStrategyBinary::new(s0, s1).unwrap();
            let joint = |t: usize| g.prior(t) * sender.prob(m, t) * g.detector.emission(e, t, m);
            let (j0, j1) = (joint(0), joint(1));
            prop_assume!(j0 + j1 > 1e-9);
            let mu = posterior_with_evidence(&g, &sender, m, e, 0.5).unwrap();
            prop_assert!((mu - j1 / (j0 + j1)).abs() < 1e-12);
        }

        #[test]
        fn thresholds_move_with_deltas(
            a in 0.0..1.0f64,
            b in 0.0..1.0f64,
            d0 in 0.1..5.0f64,
            d1 in 0.1..5.0f64,
            bump in 0.05..2.0f64,
        ) {
            let (alpha, beta) = if a <= b { (a, b) } else { (b, a) };
            prop_assume!(beta - alpha > 1e-3 && alpha > 1e-3 && beta < 1.0 - 1e-3);
            let det = DetectorSpec::new(alpha, beta).unwrap();
            let base = regime_thresholds(d0, d1, &det).unwrap().by_observation;
            let up0 = regime_thresholds(d0 + bump, d1, &det).unwrap().by_observation;
            let up1 = regime_thresholds(d0, d1 + bump, &det).unwrap().by_observation;
            for m in 0..2 {
                for e in 0..2 {
                    prop_assert!(up0[m][e] > base[m][e]);
                    prop_assert!(up1[m][e] < base[m][e]);
                }
            }
        }

        #[test]
        fn conservative_middle_profiles_are_interior(
            det in conservative_detector(),
            d0 in 0.2..5.0f64,
            d1 in 0.2..5.0f64,
            frac in 0.01..0.99f64,
        ) {
            let regime = regime_thresholds(d0, d1, &det).unwrap();
            let (lo, hi) = regime.interval(RegimeLabel::Middle);
            let p = lo + frac * (hi - lo);
            let g = GameSpecBinary::new(p, det, CheapTalkUtilities::with_deltas(d0, d1)).unwrap();
            let eq = partial_separating_pbne(&g).unwrap();
            for v in eq.sender.prob_m1_given_theta {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
