//! Backward induction on the toy plant, checked against Monte Carlo play.

use deception_games::apt::{
    backward_induction, deviation_gain, monte_carlo, simulate, AptOptions, Player, ToyPlantConfig,
};
use deception_games::oracle::apt_bellman_residual;

fn main() -> deception_games::Result<()> {
    let game = ToyPlantConfig::default().build()?;
    let options = AptOptions::default();
    let sol = backward_induction(&game, &options)?;
    let root = sol.root_decision();
    println!("expanded states   {}", sol.values.nodes.len());
    println!("root value        {:.6}", sol.root_value());
    println!("root defence      {:.2}", root.defender[game.defend_action]);
    for (i, p) in root.attacker.iter().enumerate() {
        println!(
            "  type {:.4}: attack {}",
            sol.policies.buckets.representatives[i], p[game.attack_message]
        );
    }
    println!(
        "Bellman residual  {:e}",
        apt_bellman_residual(&game, &sol.values, &sol.policies)
    );
    for player in [Player::Attacker, Player::Defender] {
        let gain = deviation_gain(&game, &sol.policies, player, options.defender_grid)?;
        println!("{player:?} deviation gain {gain:e}");
    }
    let mc = monte_carlo(&game, &sol.policies, 100_000, 1)?;
    println!(
        "Monte Carlo       {:.6} +/- {:.6}",
        mc.defender_mean, mc.defender_std_error
    );
    print!("{}", simulate(&game, &sol.policies, 0.9, 1)?.to_csv(&game));
    Ok(())
}
