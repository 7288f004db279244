use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::spec_file::{
    AptSpec, BinaryEquilibrium, BinarySpec, ContinuousSpec, Family, GameSpecFile,
};
use super::CliError;
use crate::apt::{
    backward_induction, deviation_gain, monte_carlo, simulate, BeliefState, Decision,
    MonteCarloSummary, NodeKey, NodeValues, Player, PolicyPair, TypeBuckets, ValueTable,
};
use crate::binary::{partial_separating_pbne, pooling_pbne, regime_thresholds, PoolingOutcome};
use crate::continuous::{solve_slaph, SlaphSolution};
use crate::error::GameError;
use crate::numeric::format_number;
use crate::oracle::{
    apt_bellman_residual, verify_binary, verify_continuous, ConditionResidual, VerificationReport,
    CLOSED_FORM_TOL, GRID_TOL,
};
use crate::signaling::StrategyProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinarySolution {
    pub regime: String,
    pub thresholds: [f64; 4],
    pub equilibrium: String,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptNodeRecord {
    pub stage: usize,
    pub state: usize,
    pub da: u32,
    pub db: u32,
    pub belief: BeliefState,
    pub defender: Vec<f64>,
    pub attacker: Vec<Vec<f64>>,
    pub defender_value: f64,
    pub defender_by_type: Vec<f64>,
    pub attacker_by_type: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AptSolutionFile {
    pub buckets: usize,
    pub defender_grid: usize,
    pub root_value: f64,
    pub root_defend_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSummary>,
    pub nodes: Vec<AptNodeRecord>,
}

/// Contents of a solution file, tagged with the game family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SolutionFile {
    BinaryEvidence(BinarySolution),
    ContinuousSlaph(SlaphSolution),
    AptMultistage(AptSolutionFile),
}

impl SolutionFile {
    pub fn family(&self) -> Family {
        match self {
            SolutionFile::BinaryEvidence(_) => Family::BinaryEvidence,
            SolutionFile::ContinuousSlaph(_) => Family::ContinuousSlaph,
            SolutionFile::AptMultistage(_) => Family::AptMultistage,
        }
    }
}

/// A solved spec: the solution, a plain-text table and extra files.
pub struct Solved {
    pub solution: SolutionFile,
    pub table: String,
    pub extra_files: Vec<(String, String)>,
}

pub fn solve(spec: &GameSpecFile) -> Result<Solved, CliError> {
    match spec.family {
        Family::BinaryEvidence => solve_binary(spec.binary.as_ref().expect("checked")),
        Family::ContinuousSlaph => solve_continuous(spec.continuous.as_ref().expect("checked")),
        Family::AptMultistage => solve_apt(spec.apt.as_ref().expect("checked"), spec.options.seed),
    }
}

pub(crate) fn binary_equilibrium(
    b: &BinarySpec,
) -> Result<
    (
        crate::binary::RegimeLabel,
        [f64; 4],
        String,
        StrategyProfile,
    ),
    CliError,
> {
    let game = b.game()?;
    let regime = regime_thresholds(b.delta0, b.delta1, &game.detector)?;
    let label = regime.classify(b.prior)?;
    let pooling = |m: usize| -> Result<Option<StrategyProfile>, CliError> {
        Ok(match pooling_pbne(&game, m)? {
            PoolingOutcome::Exists(p) => Some(p.profile),
            PoolingOutcome::Nonexistent { .. } => None,
        })
    };
    let no_pool = |m: usize| {
        CliError::NoEquilibrium(format!(
            "no pooling equilibrium on message {m} in regime {label}"
        ))
    };
    let (kind, profile) = match b.equilibrium {
        BinaryEquilibrium::PartialSeparating => (
            "partial_separating",
            partial_separating_pbne(&game)?.profile(),
        ),
        BinaryEquilibrium::PoolingM0 => ("pooling", pooling(0)?.ok_or_else(|| no_pool(0))?),
        BinaryEquilibrium::PoolingM1 => ("pooling", pooling(1)?.ok_or_else(|| no_pool(1))?),
        BinaryEquilibrium::Auto => {
            if label == crate::binary::RegimeLabel::Middle {
                (
                    "partial_separating",
                    partial_separating_pbne(&game)?.profile(),
                )
            } else if let Some(p) = pooling(0)? {
                ("pooling", p)
            } else {
                ("pooling", pooling(1)?.ok_or_else(|| no_pool(1))?)
            }
        }
    };
    Ok((label, regime.boundaries, kind.to_string(), profile))
}

fn solve_binary(b: &BinarySpec) -> Result<Solved, CliError> {
    let (label, thresholds, kind, profile) = binary_equilibrium(b)?;
    let mut table = String::new();
    let _ = writeln!(table, "regime            {label}");
    let _ = writeln!(
        table,
        "thresholds        {}",
        thresholds.map(format_number).join(" ")
    );
    let _ = writeln!(table, "equilibrium       {kind}");
    let s = profile.sender.prob_m1_given_theta;
    let _ = writeln!(
        table,
        "sender σ(1|θ)     θ=0: {}  θ=1: {}",
        format_number(s[0]),
        format_number(s[1])
    );
    let r = profile.receiver.as_tuple();
    let _ = writeln!(
        table,
        "receiver σ(1|m,e) {}",
        r.map(format_number).join(" ")
    );
    Ok(Solved {
        solution: SolutionFile::BinaryEvidence(BinarySolution {
            regime: label.short().to_string(),
            thresholds,
            equilibrium: kind,
            profile,
        }),
        table,
        extra_files: Vec::new(),
    })
}

fn solve_continuous(c: &ContinuousSpec) -> Result<Solved, CliError> {
    let sol = solve_slaph(&c.game, &c.investigation, c.pools)?;
    let mut table = String::new();
    let _ = writeln!(
        table,
        "boundary state    {}",
        format_number(sol.boundary_state)
    );
    let _ = writeln!(
        table,
        "cutoff            {}",
        sol.cutoff.map_or("none".into(), format_number)
    );
    let _ = writeln!(table, "pools             {}", sol.n_pools());
    for (j, pool) in sol.pools.iter().enumerate() {
        let _ = writeln!(
            table,
            "  pool {j}: [{}, {}]  action {}",
            format_number(sol.pool_edges[j]),
            format_number(sol.pool_edges[j + 1]),
            format_number(pool.action)
        );
    }
    let _ = writeln!(
        table,
        "max residual      {}",
        format_number(sol.residuals.max_abs())
    );
    Ok(Solved {
        solution: SolutionFile::ContinuousSlaph(sol),
        table,
        extra_files: Vec::new(),
    })
}

fn solve_apt(a: &AptSpec, seed: u64) -> Result<Solved, CliError> {
    let game = a.game()?;
    let sol = backward_induction(&game, &a.solver)?;
    let mc = if a.rollouts >= 2 {
        Some(monte_carlo(&game, &sol.policies, a.rollouts, seed)?)
    } else {
        None
    };
    let trajectory = simulate(&game, &sol.policies, a.trajectory_theta, seed)?;
    let root = sol.root_decision();
    let nodes = sol
        .policies
        .decisions
        .iter()
        .map(|(key, d)| {
            let v = &sol.values.nodes[key];
            AptNodeRecord {
                stage: key.stage,
                state: key.state,
                da: key.da,
                db: key.db,
                belief: sol.policies.belief(key),
                defender: d.defender.clone(),
                attacker: d.attacker.clone(),
                defender_value: v.defender,
                defender_by_type: v.defender_by_type.clone(),
                attacker_by_type: v.attacker_by_type.clone(),
            }
        })
        .collect();
    let file = AptSolutionFile {
        buckets: a.solver.buckets,
        defender_grid: a.solver.defender_grid,
        root_value: sol.root_value(),
        root_defend_probability: root.defender[game.defend_action],
        monte_carlo: mc,
        nodes,
    };

    let mut table = String::new();
    let _ = writeln!(
        table,
        "prior             Beta({}, {})",
        format_number(game.prior.a),
        format_number(game.prior.b)
    );
    let _ = writeln!(
        table,
        "root value        {}",
        format_number(file.root_value)
    );
    if let Some(mc) = mc {
        let _ = writeln!(
            table,
            "monte carlo       {} ± {} ({} plays)",
            format_number(mc.defender_mean),
            format_number(mc.defender_std_error),
            mc.rollouts
        );
    }
    let _ = writeln!(table, "stage state belief        defend  attacking buckets");
    for (key, d) in &sol.policies.decisions {
        let b = sol.policies.belief(key);
        let attacking: String = d
            .attacker
            .iter()
            .map(|p| {
                if p[game.attack_message] > 0.0 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        let _ = writeln!(
            table,
            "{:>5} {:>5} ({:>5}, {:>5}) {:>7} {attacking}",
            key.stage,
            key.state,
            format_number(b.a),
            format_number(b.b),
            format_number(d.defender[game.defend_action]),
        );
    }
    Ok(Solved {
        solution: SolutionFile::AptMultistage(file),
        table,
        extra_files: vec![("trajectory.csv".into(), trajectory.to_csv(&game))],
    })
}

pub fn verify(
    spec: &GameSpecFile,
    solution: &SolutionFile,
    tolerance: Option<f64>,
) -> Result<VerificationReport, CliError> {
    if solution.family() != spec.family {
        return Err(CliError::Input(format!(
            "solution is for family {}, spec is {}",
            solution.family(),
            spec.family
        )));
    }
    let tol = tolerance.or(spec.options.tolerance);
    match solution {
        SolutionFile::BinaryEvidence(s) => {
            let b = spec.binary.as_ref().expect("checked");
            let game = b.game()?;
            let tol = tol.unwrap_or(CLOSED_FORM_TOL);
            let r = verify_binary(&game, &s.profile, tol);
            let regime = regime_thresholds(b.delta0, b.delta1, &game.detector)?;
            let label = regime.classify(b.prior)?;
            let mut conditions = r.condition_residuals;
            conditions.push(ConditionResidual {
                name: "thresholds".into(),
                value: regime
                    .boundaries
                    .iter()
                    .zip(&s.thresholds)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
            });
            conditions.push(ConditionResidual {
                name: "regime".into(),
                value: if s.regime == label.short() { 0.0 } else { 1.0 },
            });
            Ok(VerificationReport::new(
                r.max_sender_gain,
                r.max_receiver_gain,
                r.indifference_residuals,
                r.belief_consistency_residuals,
                conditions,
                tol,
            ))
        }
        SolutionFile::ContinuousSlaph(s) => {
            let c = spec.continuous.as_ref().expect("checked");
            let mut s = s.clone();
            s.game = c.game;
            s.investigation = c.investigation;
            Ok(verify_continuous(
                &s,
                c.state_grid,
                c.report_grid,
                tol.unwrap_or(GRID_TOL),
            ))
        }
        SolutionFile::AptMultistage(s) => verify_apt(
            spec.apt.as_ref().expect("checked"),
            s,
            tol.unwrap_or(GRID_TOL),
        ),
    }
}

fn verify_apt(a: &AptSpec, s: &AptSolutionFile, tol: f64) -> Result<VerificationReport, CliError> {
    let game = a.game()?;
    let mut decisions = BTreeMap::new();
    let mut nodes = BTreeMap::new();
    for n in &s.nodes {
        let key = NodeKey {
            stage: n.stage,
            state: n.state,
            da: n.da,
            db: n.db,
        };
        decisions.insert(
            key,
            Decision {
                defender: n.defender.clone(),
                attacker: n.attacker.clone(),
            },
        );
        nodes.insert(
            key,
            NodeValues {
                bucket_probs: Vec::new(),
                defender_by_type: n.defender_by_type.clone(),
                attacker_by_type: n.attacker_by_type.clone(),
                defender: n.defender_value,
            },
        );
    }
    let policies = PolicyPair {
        prior: game.prior,
        buckets: TypeBuckets::new(s.buckets)?,
        decisions,
    };
    let values = ValueTable { nodes };
    let gain = |player| match deviation_gain(&game, &policies, player, s.defender_grid) {
        Ok(g) => Ok(g),
        Err(e @ GameError::PolicyUndefined { .. }) => Err(CliError::Verification(e.to_string())),
        Err(GameError::InvalidParameter(m)) => Err(CliError::Verification(m)),
        Err(e) => Err(e.into()),
    };
    let attacker = gain(Player::Attacker)?;
    let defender = gain(Player::Defender)?;
    let bellman = apt_bellman_residual(&game, &values, &policies);
    let root = NodeKey::root(game.initial_state);
    let root_value = values.nodes.get(&root).map_or(f64::NAN, |v| v.defender);
    Ok(VerificationReport::new(
        attacker,
        defender,
        Vec::new(),
        Vec::new(),
        vec![
            ConditionResidual {
                name: "bellman".into(),
                value: bellman,
            },
            ConditionResidual {
                name: "root_value".into(),
                value: root_value - s.root_value,
            },
        ],
        tol,
    ))
}
