use super::VerificationReport;
use crate::signaling::{
    expected_receiver_utility, expected_sender_utility, GameSpecBinary, ReceiverStrategyBinary,
    SenderStrategyBinary, StrategyProfile,
};

/// Below this joint probability an observation counts as off the path.
const ON_PATH: f64 = 1e-14;

/// Checks sender optimality against every pure message rule, receiver
/// optimality at every (m, e) under the stated beliefs, and Bayes
/// consistency of the beliefs on the path.
///
/// Invalid inputs yield a failing report with infinite gains.
pub fn verify_binary(
    game: &GameSpecBinary,
    profile: &StrategyProfile,
    tolerance: f64,
) -> VerificationReport {
    let fail = || {
        VerificationReport::new(
            f64::INFINITY,
            f64::INFINITY,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            tolerance,
        )
    };
    if game.validate().is_err() || profile.validate().is_err() {
        return fail();
    }
    let sender = &profile.sender;
    let receiver = &profile.receiver;
    let mu = &profile.beliefs.mu;

    let mut sender_gain = f64::NEG_INFINITY;
    let mut indifference = Vec::new();
    for theta in 0..2 {
        let Ok(current) = expected_sender_utility(game, sender, receiver, theta) else {
            return fail();
        };
        let mut pure = [0.0; 2];
        for (m, value) in pure.iter_mut().enumerate() {
            let deviation = SenderStrategyBinary::pooling(m);
            match expected_sender_utility(game, &deviation, receiver, theta) {
                Ok(v) => *value = v,
                Err(_) => return fail(),
            }
        }
        sender_gain = sender_gain.max(pure[0].max(pure[1]) - current);
        let s = sender.prob_m1_given_theta[theta];
        if s > 0.0 && s < 1.0 {
            indifference.push(pure[1] - pure[0]);
        }
    }

    let mut receiver_gain = f64::NEG_INFINITY;
    let mut consistency = Vec::new();
    for m in 0..2 {
        for e in 0..2 {
            let belief = mu[m][e];
            let value = |r: &ReceiverStrategyBinary| -> Option<f64> {
                let u1 = expected_receiver_utility(game, r, 1, m, e).ok()?;
                let u0 = expected_receiver_utility(game, r, 0, m, e).ok()?;
                Some(belief * u1 + (1.0 - belief) * u0)
            };
            let (Some(current), Some(play1), Some(play0)) = (
                value(receiver),
                value(&ReceiverStrategyBinary::constant(1)),
                value(&ReceiverStrategyBinary::constant(0)),
            ) else {
                return fail();
            };
            receiver_gain = receiver_gain.max(play1.max(play0) - current);
            let r = receiver.prob_a1_given_m_e[m][e];
            if r > 0.0 && r < 1.0 {
                indifference.push(play1 - play0);
            }

            let joint = |theta: usize| {
                game.prior(theta) * sender.prob(m, theta) * game.detector.emission(e, theta, m)
            };
            let (j0, j1) = (joint(0), joint(1));
            if j0 + j1 > ON_PATH {
                consistency.push(belief - j1 / (j0 + j1));
            }
        }
    }

    VerificationReport::new(
        sender_gain.max(0.0),
        receiver_gain.max(0.0),
        indifference,
        consistency,
        Vec::new(),
        tolerance,
    )
}
