//! Equilibrium solvers and independent verifiers for three families of
//! cyber-deception games:
//!
//! * [`binary`]: binary-state cheap talk with a leaky detector,
//! * [`continuous`]: costly deception over a continuous state with
//!   investigation evidence (separating-low, pooling-high equilibria),
//! * [`apt`]: a multi-stage attacker/defender game with Beta beliefs.
//!
//! [`oracle`] re-checks every claimed equilibrium by brute force and
//! [`cli`] drives everything from JSON spec files.

pub mod apt;
pub mod binary;
pub mod cli;
pub mod continuous;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod signaling;

pub use error::{GameError, Result};
