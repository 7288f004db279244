//! The mixed equilibrium of the Middle regime, checked by the oracle.

use deception_games::binary::partial_separating_pbne;
use deception_games::oracle::verify_binary;
use deception_games::signaling::GameSpecBinary;

fn main() -> deception_games::Result<()> {
    for (alpha, beta) in [(0.1, 0.6), (0.6, 0.8)] {
        let game = GameSpecBinary::canonical(0.5, alpha, beta)?;
        let eq = partial_separating_pbne(&game)?;
        let report = verify_binary(&game, &eq.profile(), 1e-9);
        println!(
            "alpha = {alpha}, beta = {beta}, p = 0.5 ({:?})",
            eq.detector_class
        );
        println!(
            "  sender   P(m=1 | theta) = {:.6?}",
            eq.sender.prob_m1_given_theta
        );
        println!("  receiver P(a=1 | m, e)  = {:.6?}", eq.receiver.as_tuple());
        println!("  beliefs  mu(theta=1 | m, e) = {:.6?}", eq.beliefs.mu);
        println!(
            "  oracle   {:?}, worst residual {:e}",
            report.verdict,
            report.worst()
        );
    }
    Ok(())
}
