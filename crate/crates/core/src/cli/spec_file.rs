use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::apt::{AptGameSpec, AptOptions, ToyPlantConfig};
use crate::continuous::{ContinuousGameSpec, InvestigationSpec};
use crate::signaling::{CheapTalkUtilities, DetectorSpec, GameSpecBinary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BinaryEvidence,
    ContinuousSlaph,
    AptMultistage,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::BinaryEvidence => "binary-evidence",
            Family::ContinuousSlaph => "continuous-slaph",
            Family::AptMultistage => "apt-multistage",
        })
    }
}

/// A game spec file: the family tag, exactly the matching parameter block,
/// and solver options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpecFile {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<ContinuousSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apt: Option<AptSpec>,
    #[serde(default)]
    pub options: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryEquilibrium {
    /// Partially separating in the Middle regime, pooling elsewhere.
    #[default]
    Auto,
    PartialSeparating,
    PoolingM0,
    PoolingM1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinarySpec {
    pub prior: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub delta0: f64,
    #[serde(default = "one")]
    pub delta1: f64,
    #[serde(default)]
    pub equilibrium: BinaryEquilibrium,
}

fn one() -> f64 {
    1.0
}

impl BinarySpec {
    pub fn game(&self) -> crate::Result<GameSpecBinary> {
        GameSpecBinary::new(
            self.prior,
            DetectorSpec::new(self.alpha, self.beta)?,
            CheapTalkUtilities::with_deltas(self.delta0, self.delta1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousSpec {
    pub game: ContinuousGameSpec,
    #[serde(default)]
    pub investigation: InvestigationSpec,
    pub pools: usize,
    #[serde(default = "default_grid")]
    pub state_grid: usize,
    #[serde(default = "default_grid")]
    pub report_grid: usize,
}

fn default_grid() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyPlantConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<AptGameSpec>,
    #[serde(default)]
    pub solver: AptOptions,
    /// Monte Carlo plays recorded alongside the solution.
    #[serde(default = "default_rollouts")]
    pub rollouts: usize,
    /// Type of the user in the exported sample trajectory.
    #[serde(default = "default_theta")]
    pub trajectory_theta: f64,
}

fn default_rollouts() -> usize {
    10_000
}

fn default_theta() -> f64 {
    0.9
}

impl AptSpec {
    pub fn game(&self) -> Result<AptGameSpec, CliError> {
        let game = match (&self.toy, &self.game) {
            (Some(toy), None) => toy.build()?,
            (None, Some(game)) => game.clone(),
            _ => {
                return Err(CliError::Input(
                    "apt block needs exactly one of `toy` or `game`".into(),
                ))
            }
        };
        game.validate()?;
        Ok(game)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Formats a JSON error as `origin:line:column: message`.
pub(crate) fn json_error(origin: &str, e: &serde_json::Error) -> CliError {
    let text = e.to_string();
    let message = text
        .rsplit_once(" at line ")
        .map_or(text.as_str(), |(m, _)| m);
    CliError::Input(format!("{origin}:{}:{}: {message}", e.line(), e.column()))
}

impl GameSpecFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let spec: GameSpecFile = serde_json::from_str(text).map_err(|e| json_error(origin, &e))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn check(&self) -> Result<(), CliError> {
        let present = [
            (Family::BinaryEvidence, self.binary.is_some(), "binary"),
            (
                Family::ContinuousSlaph,
                self.continuous.is_some(),
                "continuous",
            ),
            (Family::AptMultistage, self.apt.is_some(), "apt"),
        ];
        for (family, here, key) in present {
            if family == self.family && !here {
                return Err(CliError::Input(format!(
                    "family {family} needs a `{key}` block"
                )));
            }
            if family != self.family && here {
                return Err(CliError::Input(format!(
                    "`{key}` block does not belong to family {}",
                    self.family
                )));
            }
        }
        if let Some(t) = self.options.tolerance {
            if !(t >= 0.0) {
                return Err(CliError::Input(format!("tolerance must be >= 0, got {t}")));
            }
        }
        Ok(())
    }
}
