//! Solve and verify every shipped spec in process, as `deception-games demo` does.

use deception_games::cli::{solve, verify, GameSpecFile, SHIPPED_SPECS};

fn main() {
    for (name, text) in SHIPPED_SPECS {
        let outcome = GameSpecFile::parse(text, name).and_then(|spec| {
            let solved = solve(&spec)?;
            verify(&spec, &solved.solution, None)
        });
        match outcome {
            Ok(report) => println!("{name:<22} {:?}  {:e}", report.verdict, report.worst()),
            Err(e) => println!("{name:<22} error (exit {}): {e}", e.exit_code()),
        }
    }
}
