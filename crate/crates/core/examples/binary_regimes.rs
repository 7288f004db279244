//! Regime thresholds and the receiver's pooling responses for a
//! conservative and an aggressive detector.

use deception_games::binary::{pooling_receiver_strategy, regime_thresholds, RegimeLabel};
use deception_games::signaling::DetectorSpec;

fn main() -> deception_games::Result<()> {
    for (alpha, beta) in [(0.1, 0.6), (0.6, 0.8)] {
        let det = DetectorSpec::new(alpha, beta)?;
        let class = det.class().expect("not a knife edge");
        let regime = regime_thresholds(1.0, 1.0, &det)?;
        println!("alpha = {alpha}, beta = {beta} ({class:?})");
        println!("  thresholds {:.6?}", regime.boundaries);
        println!("  regime  interval            s(1|0,0) s(1|0,1) s(1|1,0) s(1|1,1)");
        for label in RegimeLabel::ALL {
            let (lo, hi) = regime.interval(label);
            let r = pooling_receiver_strategy(label, class, 1.0, 1.0, &det, 0.5 * (lo + hi))?;
            let [a, b, c, d] = r.as_tuple();
            println!(
                "  {:<7} ({lo:.4}, {hi:.4})  {a:>8} {b:>8} {c:>8} {d:>8}",
                label.short()
            );
        }
    }
    Ok(())
}
