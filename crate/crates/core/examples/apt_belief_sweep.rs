//! Root behaviour of the toy plant as the prior threat rises.

use deception_games::apt::{
    comparative_statics, threat_sweep, AptOptions, BeliefState, ToyPlantConfig,
};

fn main() -> deception_games::Result<()> {
    let game = ToyPlantConfig::default().build()?;
    let beliefs = threat_sweep(BeliefState::new(1.0, 9.0)?, BeliefState::new(9.0, 1.0)?, 17)?;
    println!("threat  defend  attack    threshold  value");
    for p in comparative_statics(&game, &AptOptions::default(), &beliefs)? {
        println!(
            "{:.3}   {:.2}    {:.6}  {:.3}      {:.6}",
            p.mean_threat,
            p.defend_probability,
            p.attack_probability,
            p.attack_threshold,
            p.defender_value
        );
    }
    Ok(())
}
