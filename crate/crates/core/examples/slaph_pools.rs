//! Separating-low, pooling-high equilibrium of the continuous game.

use deception_games::continuous::{
    cutoff_state, solve_slaph, ContinuousGameSpec, InvestigationSpec,
};
use deception_games::oracle::verify_continuous;
use deception_games::GameError;

fn main() -> deception_games::Result<()> {
    let game = ContinuousGameSpec::uniform(0.0, 1.0, 0.05, 0.05);
    let investigation = InvestigationSpec::midpoint(0.8, 0.8);
    println!("cutoff state {:?}", cutoff_state(&game)?);

    let sol = solve_slaph(&game, &investigation, 3)?;
    println!("boundary state {:.9}", sol.boundary_state);
    for (j, pool) in sol.pools.iter().enumerate() {
        println!(
            "  pool {j}: [{:.6}, {:.6}]  sub-actions {:.6?}  action {:.6}",
            pool.lo, pool.hi, pool.sub_actions, pool.action
        );
    }
    let report = verify_continuous(&sol, 200, 200, 1e-6);
    println!(
        "oracle {:?}, worst residual {:e}",
        report.verdict,
        report.worst()
    );

    let small_bias = ContinuousGameSpec::uniform(0.0, 1.0, 0.02, 1.0);
    match solve_slaph(&small_bias, &investigation, 3) {
        Err(GameError::InfeasiblePools { max_feasible, .. }) => {
            println!("b = 0.02, k = 1: three pools infeasible, largest feasible {max_feasible:?}")
        }
        other => println!("b = 0.02, k = 1: {other:?}"),
    }
    Ok(())
}
