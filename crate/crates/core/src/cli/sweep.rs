use rayon::prelude::*;

use super::solve::binary_equilibrium;
use super::spec_file::{BinarySpec, ContinuousSpec, Family, GameSpecFile, SweepSpec};
use super::CliError;
use crate::apt::{comparative_statics, BeliefState};
use crate::binary::regime_thresholds;
use crate::continuous::solve_slaph;
use crate::error::GameError;
use crate::numeric::format_number;

/// Sweep output: a header and rows of already formatted cells, plus the
/// numeric columns worth plotting.
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub plotted: Vec<usize>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn grid(s: &SweepSpec) -> Result<Vec<f64>, CliError> {
    if s.steps == 0 {
        return Err(CliError::Input("a sweep needs at least one step".into()));
    }
    if !(s.from.is_finite() && s.to.is_finite()) {
        return Err(CliError::Input("sweep range must be finite".into()));
    }
    if s.steps == 1 {
        return Ok(vec![s.from]);
    }
    Ok((0..s.steps)
        .map(|i| s.from + (s.to - s.from) * i as f64 / (s.steps - 1) as f64)
        .collect())
}

fn unknown(parameter: &str, family: Family, known: &[&str]) -> CliError {
    CliError::Input(format!(
        "unknown sweep parameter `{parameter}` for {family}; expected one of {}",
        known.join(", ")
    ))
}

pub fn sweep(spec: &GameSpecFile, s: &SweepSpec) -> Result<SweepTable, CliError> {
    let values = grid(s)?;
    match spec.family {
        Family::BinaryEvidence => sweep_binary(spec.binary.as_ref().expect("checked"), s, &values),
        Family::ContinuousSlaph => {
            sweep_continuous(spec.continuous.as_ref().expect("checked"), s, &values)
        }
        Family::AptMultistage => sweep_apt(spec, s, &values),
    }
}

const BINARY_PARAMS: [&str; 5] = ["prior", "alpha", "beta", "delta0", "delta1"];

fn set_binary(b: &BinarySpec, parameter: &str, v: f64) -> BinarySpec {
    let mut b = *b;
    match parameter {
        "prior" => b.prior = v,
        "alpha" => b.alpha = v,
        "beta" => b.beta = v,
        "delta0" => b.delta0 = v,
        _ => b.delta1 = v,
    }
    b
}

/// Regime of the prior at parameter value `v`; `None` on a boundary.
fn regime_at(b: &BinarySpec, parameter: &str, v: f64) -> Result<Option<usize>, CliError> {
    let b = set_binary(b, parameter, v);
    let game = b.game()?;
    let regime = regime_thresholds(b.delta0, b.delta1, &game.detector)?;
    match regime.classify(b.prior) {
        Ok(label) => Ok(Some(label.index())),
        Err(GameError::BoundaryPrior(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Parameter values in (lo, hi) where the regime changes, by bisection.
fn crossings(
    b: &BinarySpec,
    parameter: &str,
    mut lo: f64,
    hi: f64,
) -> Result<Vec<(f64, usize, usize)>, CliError> {
    let mut out = Vec::new();
    let Some(target) = regime_at(b, parameter, hi)? else {
        return Ok(out);
    };
    while let Some(left) = regime_at(b, parameter, lo)? {
        if left == target {
            break;
        }
        let (mut a, mut c) = (lo, hi);
        let mut right = target;
        for _ in 0..200 {
            let mid = 0.5 * (a + c);
            if mid <= a || mid >= c {
                break;
            }
            match regime_at(b, parameter, mid)? {
                Some(r) if r == left => a = mid,
                Some(r) => {
                    c = mid;
                    right = r;
                }
                None => {
                    a = mid;
                    c = mid;
                }
            }
        }
        out.push((0.5 * (a + c), left, right));
        if c >= hi {
            break;
        }
        lo = c;
    }
    Ok(out)
}

fn sweep_binary(b: &BinarySpec, s: &SweepSpec, values: &[f64]) -> Result<SweepTable, CliError> {
    let p = s.parameter.as_str();
    if !BINARY_PARAMS.contains(&p) {
        return Err(unknown(p, Family::BinaryEvidence, &BINARY_PARAMS));
    }
    let labels = crate::binary::RegimeLabel::ALL;
    let rows: Vec<Result<Vec<String>, CliError>> = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let spec = set_binary(b, p, *v);
            let mut row = vec![i.to_string(), format_number(*v)];
            let Some(label) = regime_at(&spec, p, *v)? else {
                row.extend(["boundary".into(), "none".into()]);
                row.extend(std::iter::repeat_n(String::new(), 6));
                return Ok(row);
            };
            match binary_equilibrium(&spec) {
                Ok((_, _, kind, profile)) => {
                    row.push(labels[label].short().into());
                    row.push(kind);
                    let sp = profile.sender.prob_m1_given_theta;
                    row.extend(sp.iter().map(|x| format_number(*x)));
                    row.extend(
                        profile
                            .receiver
                            .as_tuple()
                            .iter()
                            .map(|x| format_number(*x)),
                    );
                }
                Err(CliError::NoEquilibrium(_)) => {
                    row.extend([labels[label].short().into(), "none".into()]);
                    row.extend(std::iter::repeat_n(String::new(), 6));
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect();
    let steps: Vec<Vec<String>> = rows.into_iter().collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for (i, row) in steps.into_iter().enumerate() {
        if i > 0 {
            for (x, l, r) in crossings(
                b,
                p,
                values[i - 1].min(values[i]),
                values[i - 1].max(values[i]),
            )? {
                let mut line = vec![
                    "boundary".into(),
                    format_number(x),
                    format!("{}|{}", labels[l].short(), labels[r].short()),
                    "boundary".into(),
                ];
                line.extend(std::iter::repeat_n(String::new(), 6));
                if values[i] < values[i - 1] {
                    line[2] = format!("{}|{}", labels[r].short(), labels[l].short());
                }
                out.push(line);
            }
        }
        out.push(row);
    }
    let header = [
        "row",
        p,
        "regime",
        "equilibrium",
        "s_m1_t0",
        "s_m1_t1",
        "r_m0_e0",
        "r_m0_e1",
        "r_m1_e0",
        "r_m1_e1",
    ];
    Ok(SweepTable {
        header: header.iter().map(|h| h.to_string()).collect(),
        rows: out,
        plotted: (4..10).collect(),
    })
}

const CONTINUOUS_PARAMS: [&str; 5] = ["bias_b", "cost_k", "tp0", "tp1", "theta_hi"];

fn sweep_continuous(
    c: &ContinuousSpec,
    s: &SweepSpec,
    values: &[f64],
) -> Result<SweepTable, CliError> {
    let p = s.parameter.as_str();
    if !CONTINUOUS_PARAMS.contains(&p) {
        return Err(unknown(p, Family::ContinuousSlaph, &CONTINUOUS_PARAMS));
    }
    let k = c.pools;
    let rows: Vec<Result<Vec<String>, CliError>> = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let mut c = *c;
            match p {
                "bias_b" => c.game.bias_b = *v,
                "cost_k" => c.game.cost_k = *v,
                "tp0" => c.investigation.tp0 = *v,
                "tp1" => c.investigation.tp1 = *v,
                _ => c.game.theta_hi = *v,
            }
            let mut row = vec![i.to_string(), format_number(*v)];
            match solve_slaph(&c.game, &c.investigation, k) {
                Ok(sol) => {
                    row.push("ok".into());
                    row.push(format_number(sol.boundary_state));
                    row.push(sol.cutoff.map_or(String::new(), format_number));
                    let mut edges: Vec<String> =
                        sol.pool_edges.iter().map(|e| format_number(*e)).collect();
                    edges.resize(k + 1, String::new());
                    row.extend(edges);
                    row.push(format_number(sol.residuals.max_abs()));
                }
                Err(GameError::InfeasiblePools { max_feasible, .. }) => {
                    row.push(match max_feasible {
                        Some(m) => format!("infeasible(max {m})"),
                        None => "infeasible".into(),
                    });
                    row.extend(std::iter::repeat_n(String::new(), k + 4));
                }
                Err(e) => return Err(e.into()),
            }
            Ok(row)
        })
        .collect();
    let mut header: Vec<String> = ["row", p, "status", "boundary_state", "cutoff"]
        .iter()
        .map(|h| h.to_string())
        .collect();
    header.extend((0..=k).map(|j| format!("edge_{j}")));
    header.push("max_residual".into());
    Ok(SweepTable {
        header,
        rows: rows.into_iter().collect::<Result<_, _>>()?,
        plotted: (3..k + 5).filter(|j| *j != 4).collect(),
    })
}

fn sweep_apt(spec: &GameSpecFile, s: &SweepSpec, values: &[f64]) -> Result<SweepTable, CliError> {
    if s.parameter != "mean_threat" {
        return Err(unknown(
            &s.parameter,
            Family::AptMultistage,
            &["mean_threat"],
        ));
    }
    let a = spec.apt.as_ref().expect("checked");
    let game = a.game()?;
    let concentration = game.prior.a + game.prior.b;
    let beliefs = values
        .iter()
        .map(|m| {
            if !(*m > 0.0 && *m < 1.0) {
                return Err(CliError::Input(format!("mean threat {m} outside (0, 1)")));
            }
            Ok(BeliefState::new(
                m * concentration,
                (1.0 - m) * concentration,
            )?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let points: Vec<_> = beliefs
        .par_iter()
        .map(|b| comparative_statics(&game, &a.solver, std::slice::from_ref(b)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = points
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, pt)| {
            vec![
                i.to_string(),
                format_number(pt.mean_threat),
                format_number(pt.belief.a),
                format_number(pt.belief.b),
                format_number(pt.defend_probability),
                format_number(pt.attack_probability),
                format_number(pt.attack_threshold),
                format_number(pt.defender_value),
            ]
        })
        .collect();
    let header = [
        "row",
        "mean_threat",
        "a",
        "b",
        "defend_probability",
        "attack_probability",
        "attack_threshold",
        "defender_value",
    ];
    Ok(SweepTable {
        header: header.iter().map(|h| h.to_string()).collect(),
        rows,
        plotted: vec![4, 5, 6],
    })
}

/// Line plot of the plotted columns against column 1 over the numbered rows.
pub fn svg_plot(table: &SweepTable) -> String {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let steps: Vec<&Vec<String>> = table
        .rows
        .iter()
        .filter(|r| r[0].parse::<usize>().is_ok())
        .collect();
    let xs: Vec<f64> = steps
        .iter()
        .map(|r| r[1].parse().unwrap_or(f64::NAN))
        .collect();
    let series: Vec<Vec<Option<f64>>> = table
        .plotted
        .iter()
        .map(|c| steps.iter().map(|r| r[*c].parse().ok()).collect())
        .collect();
    let finite = |v: &f64| v.is_finite();
    let (x0, x1) = bounds(xs.iter().copied().filter(finite));
    let (y0, y1) = bounds(series.iter().flatten().flatten().copied().filter(finite));
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let colours = [
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf",
    ];

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    out.push_str(&format!(
        "<rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        w - 2.0 * pad,
        h - 2.0 * pad
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        h - 12.0,
        table.header[1]
    ));
    for (label, x, y) in [
        (format_number(x0), pad, h - pad + 16.0),
        (format_number(x1), w - pad, h - pad + 16.0),
        (format_number(y0), pad - 4.0, h - pad),
        (format_number(y1), pad - 4.0, pad + 4.0),
    ] {
        let anchor = if y > h - pad { "middle" } else { "end" };
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"10\" text-anchor=\"{anchor}\">{label}</text>\n"
        ));
    }
    for (j, (col, ys)) in table.plotted.iter().zip(&series).enumerate() {
        let colour = colours[j % colours.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter_map(|(x, y)| y.filter(|v| v.is_finite() && x.is_finite()).map(|v| (x, v)))
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{colour}\">{}</text>\n",
            w - pad + 4.0,
            pad + 14.0 * j as f64,
            table.header[*col]
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}
