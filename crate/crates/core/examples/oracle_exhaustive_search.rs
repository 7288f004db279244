//! Brute-force equilibrium search over a grid of sender strategies.

use deception_games::oracle::exhaustive_pbne_search;
use deception_games::signaling::GameSpecBinary;

fn main() -> deception_games::Result<()> {
    for p in [0.05, 0.5, 0.95] {
        let game = GameSpecBinary::canonical(p, 0.1, 0.6)?;
        let found = exhaustive_pbne_search(&game, 21, 1e-6)?;
        let pools = found.iter().filter(|g| g.is_pooling()).count();
        let separating = found.iter().filter(|g| g.is_separating()).count();
        println!(
            "p = {p}: {} supported sender points, {pools} pooling, {separating} separating",
            found.len()
        );
        for g in found.iter().filter(|g| g.is_pooling()) {
            println!(
                "  pool {:?}, receiver {:?}, {} supporting receivers",
                g.profile.sender.prob_m1_given_theta,
                g.profile.receiver.as_tuple(),
                g.supporting
            );
        }
    }
    Ok(())
}
