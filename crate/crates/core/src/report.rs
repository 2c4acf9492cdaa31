//! Analysis execution and artifact emission.
//!
//! [`execute`] turns a validated config into an in-memory artifact;
//! [`render`] serializes it as CSV or JSON; [`run`] does both and writes
//! the file. Output is deterministic: map keys are sorted, CSV floats are
//! printed with 12 significant digits, and JSON numbers round-trip.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::claims::{self, ClaimResult};
use crate::config::{Analysis, ExperimentConfig, OutputFormat};
use crate::equilibrium::{
    classical_deterministic_bound_with_budget, find_pure_nash_with_budget,
    grid_search_symmetric_max_with_budget, is_pareto_optimal_exhaustive, ClassicalBoundReport,
    NashReport, SymmetricMaxReport,
};
use crate::error::Result;
use crate::ewl::{induced_game, outcome_distribution, payoff, OutcomeDistribution};

/// The in-memory result of one analysis.
pub enum Artifact {
    Distribution {
        /// One entry per evaluated input (`None` for input-free runs).
        blocks: Vec<(Option<Vec<u8>>, OutcomeDistribution)>,
    },
    Payoff {
        labels: Vec<String>,
        payoffs: Vec<f64>,
    },
    Nash {
        threshold: f64,
        reports: Vec<NashReport>,
    },
    Pareto {
        labels: Vec<String>,
        payoffs: Vec<f64>,
        optimal: bool,
    },
    ClassicalBound(ClassicalBoundReport),
    SymmetricMax(SymmetricMaxReport),
    Claims(Vec<ClaimResult>),
}

impl Artifact {
    /// Number of failed claims (zero for non-claim artifacts).
    pub fn failed_claims(&self) -> usize {
        match self {
            Artifact::Claims(results) => results.iter().filter(|r| !r.pass).count(),
            _ => 0,
        }
    }
}

/// What [`run`] wrote and how the claims fared.
pub struct RunSummary {
    pub path: PathBuf,
    pub failed_claims: usize,
}

/// Executes the analysis, renders it, and writes the output file.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let artifact = execute(cfg)?;
    let text = render(&artifact, cfg.output.format);
    if let Some(parent) = cfg.output.path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&cfg.output.path, text)?;
    Ok(RunSummary {
        path: cfg.output.path.clone(),
        failed_claims: artifact.failed_claims(),
    })
}

/// Runs the configured analysis.
pub fn execute(cfg: &ExperimentConfig) -> Result<Artifact> {
    match &cfg.analysis {
        Analysis::Distribution { profile, input } => {
            let p = cfg.procedure.as_ref().expect("validated at load");
            let mut blocks = Vec::new();
            if let Some(x) = input {
                blocks.push((Some(x.clone()), outcome_distribution(p, profile, Some(x))?));
            } else {
                let scenario_inputs = cfg
                    .scenario
                    .as_ref()
                    .map(|s| s.inputs().to_vec())
                    .unwrap_or_default();
                if scenario_inputs.is_empty() {
                    blocks.push((None, outcome_distribution(p, profile, None)?));
                } else {
                    for x in scenario_inputs {
                        let dist = outcome_distribution(p, profile, Some(&x))?;
                        blocks.push((Some(x), dist));
                    }
                }
            }
            Ok(Artifact::Distribution { blocks })
        }
        Analysis::Payoff { profile } => {
            let p = cfg.procedure.as_ref().expect("validated at load");
            let s = cfg.scenario.as_ref().expect("validated at load");
            Ok(Artifact::Payoff {
                labels: profile.labels(),
                payoffs: payoff(p, s, profile)?,
            })
        }
        Analysis::Nash => {
            let p = cfg.procedure.as_ref().expect("validated at load");
            let s = cfg.scenario.as_ref().expect("validated at load");
            let g = induced_game(p, s)?;
            let reports =
                find_pure_nash_with_budget(&g, cfg.parameters.epsilon, cfg.parameters.budget)?;
            Ok(Artifact::Nash {
                threshold: cfg.parameters.epsilon,
                reports,
            })
        }
        Analysis::Pareto { profile } => {
            let p = cfg.procedure.as_ref().expect("validated at load");
            let s = cfg.scenario.as_ref().expect("validated at load");
            let g = induced_game(p, s)?;
            let optimal = is_pareto_optimal_exhaustive(&g, profile, cfg.parameters.budget)?;
            Ok(Artifact::Pareto {
                labels: profile.labels(),
                payoffs: g.payoffs(profile)?,
                optimal,
            })
        }
        Analysis::ClassicalBound => {
            let s = cfg.scenario.as_ref().expect("validated at load");
            Ok(Artifact::ClassicalBound(
                classical_deterministic_bound_with_budget(s, cfg.parameters.budget)?,
            ))
        }
        Analysis::SymmetricMax => {
            let p = cfg.procedure.as_ref().expect("validated at load");
            let s = cfg.scenario.as_ref().expect("validated at load");
            let g = induced_game(p, s)?;
            Ok(Artifact::SymmetricMax(grid_search_symmetric_max_with_budget(
                &g,
                cfg.parameters.budget,
            )?))
        }
        Analysis::VerifyClaims => Ok(Artifact::Claims(claims::verify_claims_with(
            cfg.parameters.samples,
            cfg.parameters.seed,
        )?)),
    }
}

/// Serializes an artifact in the requested format.
pub fn render(artifact: &Artifact, format: OutputFormat) -> String {
    match format {
        OutputFormat::TableCsv => to_csv(artifact),
        OutputFormat::ReportJson => {
            let mut s = to_json(artifact).to_string();
            s.push('\n');
            s
        }
    }
}

/// 12 significant digits; enough to reload every claimed tolerance.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(cells: &[String]) -> String {
    cells
        .iter()
        .map(|c| csv_escape(c))
        .collect::<Vec<_>>()
        .join(",")
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn floats_cell(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_float(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn to_csv(artifact: &Artifact) -> String {
    let mut lines: Vec<String> = Vec::new();
    match artifact {
        Artifact::Distribution { blocks } => {
            lines.push("input,outcome,probability".into());
            for (input, dist) in blocks {
                let input_cell = input.as_deref().map(bits_string).unwrap_or_default();
                for y in dist.support() {
                    lines.push(csv_row(&[
                        input_cell.clone(),
                        bits_string(y),
                        fmt_float(dist.mass(y)),
                    ]));
                }
            }
        }
        Artifact::Payoff { labels, payoffs } => {
            let mut header: Vec<String> = (1..=labels.len())
                .map(|i| format!("strategy_{i}"))
                .collect();
            header.extend((1..=payoffs.len()).map(|i| format!("payoff_{i}")));
            lines.push(header.join(","));
            let mut row = labels.clone();
            row.extend(payoffs.iter().map(|&v| fmt_float(v)));
            lines.push(csv_row(&row));
        }
        Artifact::Nash { reports, .. } => {
            let n = reports.first().map_or(0, |r| r.labels.len());
            let mut header: Vec<String> =
                (1..=n).map(|i| format!("strategy_{i}")).collect();
            header.extend((1..=n).map(|i| format!("payoff_{i}")));
            header.push("epsilon".into());
            if n == 0 {
                lines.push("equilibria".into());
                lines.push("none".into());
            } else {
                lines.push(header.join(","));
                for r in reports {
                    let mut row = r.labels.clone();
                    row.extend(r.payoffs.iter().map(|&v| fmt_float(v)));
                    row.push(fmt_float(r.epsilon));
                    lines.push(csv_row(&row));
                }
            }
        }
        Artifact::Pareto {
            labels,
            payoffs,
            optimal,
        } => {
            let mut header: Vec<String> = (1..=labels.len())
                .map(|i| format!("strategy_{i}"))
                .collect();
            header.extend((1..=payoffs.len()).map(|i| format!("payoff_{i}")));
            header.push("pareto_optimal".into());
            lines.push(header.join(","));
            let mut row = labels.clone();
            row.extend(payoffs.iter().map(|&v| fmt_float(v)));
            row.push(optimal.to_string());
            lines.push(csv_row(&row));
        }
        Artifact::ClassicalBound(report) => {
            let mut header = vec!["value".to_string()];
            header.extend((1..=report.best_profile.len()).map(|i| format!("player_{i}")));
            lines.push(header.join(","));
            let mut row = vec![fmt_float(report.value)];
            // Each cell is the player's response map: output on 0, output on 1.
            row.extend(
                report
                    .best_profile
                    .iter()
                    .map(|r| format!("{}{}", r[0], r[1])),
            );
            lines.push(csv_row(&row));
        }
        Artifact::SymmetricMax(report) => {
            let mut header = vec!["strategy".to_string(), "value".into()];
            header.extend((1..=report.payoffs.len()).map(|i| format!("payoff_{i}")));
            header.push("epsilon".into());
            lines.push(header.join(","));
            let mut row = vec![report.label.clone(), fmt_float(report.value)];
            row.extend(report.payoffs.iter().map(|&v| fmt_float(v)));
            row.push(fmt_float(report.epsilon));
            lines.push(csv_row(&row));
        }
        Artifact::Claims(results) => {
            lines.push("id,pass,tolerance,max_deviation,expected,computed,note".into());
            for r in results {
                lines.push(csv_row(&[
                    r.id.to_string(),
                    r.pass.to_string(),
                    fmt_float(r.tolerance),
                    fmt_float(r.max_deviation()),
                    floats_cell(&r.expected),
                    floats_cell(&r.computed),
                    r.note.clone(),
                ]));
            }
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn to_json(artifact: &Artifact) -> Value {
    match artifact {
        Artifact::Distribution { blocks } => {
            let rendered: Vec<Value> = blocks
                .iter()
                .map(|(input, dist)| {
                    let masses: serde_json::Map<String, Value> = dist
                        .support()
                        .map(|y| (bits_string(y), json!(dist.mass(y))))
                        .collect();
                    json!({
                        "input": input.as_deref().map(bits_string),
                        "masses": masses,
                    })
                })
                .collect();
            json!({ "analysis": "distribution", "distributions": rendered })
        }
        Artifact::Payoff { labels, payoffs } => json!({
            "analysis": "payoff",
            "labels": labels,
            "payoffs": payoffs,
        }),
        Artifact::Nash { threshold, reports } => {
            let rendered: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "move_indices": r.move_indices,
                        "labels": r.labels,
                        "payoffs": r.payoffs,
                        "epsilon": r.epsilon,
                    })
                })
                .collect();
            json!({
                "analysis": "nash",
                "threshold": threshold,
                "equilibria": rendered,
            })
        }
        Artifact::Pareto {
            labels,
            payoffs,
            optimal,
        } => json!({
            "analysis": "pareto",
            "labels": labels,
            "payoffs": payoffs,
            "pareto_optimal": optimal,
        }),
        Artifact::ClassicalBound(report) => json!({
            "analysis": "classical_bound",
            "value": report.value,
            "best_profile": report.best_profile,
        }),
        Artifact::SymmetricMax(report) => json!({
            "analysis": "symmetric_max",
            "move_index": report.move_index,
            "label": report.label,
            "value": report.value,
            "payoffs": report.payoffs,
            "epsilon": report.epsilon,
        }),
        Artifact::Claims(results) => {
            let rendered: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "pass": r.pass,
                        "expected": r.expected,
                        "computed": r.computed,
                        "tolerance": r.tolerance,
                        "max_deviation": r.max_deviation(),
                        "note": r.note,
                    })
                })
                .collect();
            json!({
                "analysis": "verify_claims",
                "all_pass": results.iter().all(|r| r.pass),
                "claims": rendered,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run_to_string(doc: &str, format: OutputFormat) -> String {
        let cfg = parse_config(doc).unwrap();
        let artifact = execute(&cfg).unwrap();
        render(&artifact, format)
    }

    #[test]
    fn identity_payoff_row_matches_the_table() {
        let doc = r#"
[procedure]
catalog = "bos_p1"

[analysis]
kind = "payoff"
profile = ["identity", "identity"]
"#;
        let csv = run_to_string(doc, OutputFormat::TableCsv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("strategy_1,strategy_2,payoff_1,payoff_2"));
        assert_eq!(
            lines.next(),
            Some("identity,identity,2.00000000000e0,1.00000000000e0")
        );
    }

    #[test]
    fn bound_report_carries_a_top_level_value() {
        let doc = r#"
[procedure]
catalog = "mod4_ghz"

[analysis]
kind = "classical_bound"
"#;
        let json_text = run_to_string(doc, OutputFormat::ReportJson);
        let v: Value = serde_json::from_str(&json_text).unwrap();
        assert_eq!(v["value"], json!(0.75));
        assert_eq!(v["analysis"], json!("classical_bound"));
    }

    #[test]
    fn mixture_distribution_emits_eight_support_rows() {
        let doc = r#"
[procedure]
catalog = "minority_p2"

[analysis]
kind = "distribution"
profile = ["identity", "identity", "identity", "identity"]
"#;
        let csv = run_to_string(doc, OutputFormat::TableCsv);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 8);
        for row in rows {
            assert!(row.ends_with("1.25000000000e-1"), "{row}");
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let doc = r#"
[procedure]
catalog = "bos_p2"

[analysis]
kind = "nash"

[parameters]
epsilon = 0.25
"#;
        let a = run_to_string(doc, OutputFormat::ReportJson);
        let b = run_to_string(doc, OutputFormat::ReportJson);
        assert_eq!(a, b);
        let csv = run_to_string(doc, OutputFormat::TableCsv);
        assert!(csv.starts_with("strategy_1,strategy_2,payoff_1,payoff_2,epsilon"));
    }
}
