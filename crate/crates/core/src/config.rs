//! TOML experiment configuration: schema, loading with validation, and
//! serialization of catalog entries back to explicit documents.
//!
//! A document has up to five sections. `[analysis]` is always required;
//! the others depend on the analysis kind.
//!
//! ```toml
//! [procedure]
//! catalog = "minority_p2"
//!
//! [analysis]
//! kind = "nash"
//!
//! [output]
//! format = "report_json"
//! path = "nash.json"
//! ```
//!
//! Explicit procedures replace the catalog name with `players`, optional
//! `j`/`h`/`initial_state`, and a `strategy_space` of named gates or a
//! parameter grid. Operators are written as names (`"identity"`), as
//! `{ ewl_j = 1.5707 }`, or as full complex matrices with `[re, im]`
//! entries. Everything is validated at load time; errors carry the path
//! of the offending field.

use std::collections::BTreeMap;
use std::env;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::ewl::{
    catalog_with, CatalogParams, EwlProcedure, GridAxis, GridSpec, PlayerStrategy, Strategy,
    StrategyProfile, StrategySpace,
};
use crate::qmat::{self, CMatrix, CVector, STRUCTURAL_TOL};
use crate::scenario::{
    battle_sexes_scenario, default_bos_table, default_pd_table, explicit_scenario,
    minority_scenario, modulo4_scenario, prisoners_dilemma_scenario, PayoffTable2x2, Scenario,
};
use crate::states_gates::{self, GateLabel};

/// Environment variable naming the directory that relative output paths
/// are resolved against.
pub const OUTPUT_DIR_ENV: &str = "QGT_OUTPUT_DIR";

// ---------------------------------------------------------------------------
// Raw document schema (what serde sees).

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub procedure: Option<RawProcedure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<RawScenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<RawAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<RawParameters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<RawOutput>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProcedure {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub players: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<RawOperator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<RawOperator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<RawState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy_space: Option<RawSpace>,
}

/// An n-qubit operator: `"identity"`, `{ ewl_j = gamma }`, or an explicit
/// matrix of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawOperator {
    Name(String),
    EwlJ { ewl_j: f64 },
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

/// An initial state: a named state, a basis ket, a parametrized family,
/// a diagonal mixture, or an explicit density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawState {
    Name(String),
    Ket { ket: String },
    Fsslh { fsslh_alpha: f64 },
    F09 { f09: [f64; 2] },
    Diagonal { diagonal: Vec<f64> },
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub theta: RawAxis,
    pub phi: RawAxis,
    pub chi: RawAxis,
}

/// A grid axis: a single pinned value, or `[start, end, count]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawAxis {
    Fixed(f64),
    Range(f64, f64, usize),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub players: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<Vec<u8>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<RawTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<RawPayoffEntry>>,
}

/// Both players' payoffs in joint-output order (0,0), (0,1), (1,0), (1,1).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTable {
    pub player1: [f64; 4],
    pub player2: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPayoffEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<u8>>,
    pub output: Vec<u8>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAnalysis {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<RawProfileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

/// One player's move in a profile: a gate, or an `[on_zero, on_one]` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawProfileEntry {
    Single(RawGate),
    Pair(RawGate, RawGate),
}

/// A 2x2 gate: a parseable label such as `"hadamard"` or
/// `"su2(1.0,0.5,0.0)"`, or an explicit matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawGate {
    Name(String),
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

// ---------------------------------------------------------------------------
// Resolved configuration.

/// Numeric knobs with their defaults applied.
#[derive(Debug, Clone)]
pub struct Parameters {
    /// Entangler coupling used by catalog entries that take one.
    pub gamma: f64,
    /// Initial-state interpolation weight for the four-player family.
    pub alpha: f64,
    /// Diagonal weights of the asymmetric two-player mixed state.
    pub eps: (f64, f64),
    /// Grid resolution (theta, phi, chi) for grid strategy spaces.
    pub grid: (usize, usize, usize),
    /// Gain bound for epsilon-Nash enumeration.
    pub epsilon: f64,
    /// Sampler seed.
    pub seed: u64,
    /// Sampler draw count.
    pub samples: u64,
    /// Payoff-evaluation budget for exhaustive searches.
    pub budget: u64,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            gamma: std::f64::consts::FRAC_PI_2,
            alpha: 1.0,
            eps: (0.1, 0.3),
            grid: (13, 13, 13),
            epsilon: 0.0,
            seed: 0,
            samples: 1_000_000,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// What to compute, with any analysis-specific payload.
#[derive(Debug, Clone)]
pub enum Analysis {
    Distribution {
        profile: StrategyProfile,
        input: Option<Vec<u8>>,
    },
    Payoff {
        profile: StrategyProfile,
    },
    Nash,
    Pareto {
        profile: StrategyProfile,
    },
    ClassicalBound,
    SymmetricMax,
    VerifyClaims,
}

impl Analysis {
    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Distribution { .. } => "distribution",
            Analysis::Payoff { .. } => "payoff",
            Analysis::Nash => "nash",
            Analysis::Pareto { .. } => "pareto",
            Analysis::ClassicalBound => "classical_bound",
            Analysis::SymmetricMax => "symmetric_max",
            Analysis::VerifyClaims => "verify_claims",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    TableCsv,
    ReportJson,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::TableCsv => "csv",
            OutputFormat::ReportJson => "json",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: PathBuf,
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub procedure: Option<EwlProcedure>,
    pub scenario: Option<Scenario>,
    pub analysis: Analysis,
    pub parameters: Parameters,
    pub output: OutputSpec,
}

// ---------------------------------------------------------------------------
// Loading.

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config("path", format!("cannot read `{}`: {e}", path.display()))
    })?;
    parse_config(&text)
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::config("document", e.to_string()))?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    let parameters = resolve_parameters(raw.parameters.unwrap_or_default())?;

    let raw_analysis = raw
        .analysis
        .ok_or_else(|| Error::config("analysis", "section is required"))?;
    let kind = raw_analysis
        .kind
        .clone()
        .ok_or_else(|| Error::config("analysis", "field `kind` is required"))?;

    let (procedure, scenario) =
        resolve_procedure_scenario(raw.procedure, raw.scenario, &parameters)?;

    let analysis = resolve_analysis(
        &kind,
        &raw_analysis,
        procedure.as_ref(),
        scenario.as_ref(),
    )?;

    let output = resolve_output(raw.output.unwrap_or_default(), analysis.kind())?;

    Ok(ExperimentConfig {
        procedure,
        scenario,
        analysis,
        parameters,
        output,
    })
}

fn resolve_parameters(raw: RawParameters) -> Result<Parameters> {
    let d = Parameters::default();
    let p = Parameters {
        gamma: raw.gamma.unwrap_or(d.gamma),
        alpha: raw.alpha.unwrap_or(d.alpha),
        eps: raw.eps.map_or(d.eps, |e| (e[0], e[1])),
        grid: raw.grid.map_or(d.grid, |g| (g[0], g[1], g[2])),
        epsilon: raw.epsilon.unwrap_or(d.epsilon),
        seed: raw.seed.unwrap_or(d.seed),
        samples: raw.samples.unwrap_or(d.samples),
        budget: raw.budget.unwrap_or(d.budget),
    };
    if !p.epsilon.is_finite() || p.epsilon < 0.0 {
        return Err(Error::config(
            "parameters.epsilon",
            "must be a finite non-negative number",
        ));
    }
    if p.samples == 0 {
        return Err(Error::config("parameters.samples", "must be positive"));
    }
    if p.budget == 0 {
        return Err(Error::config("parameters.budget", "must be positive"));
    }
    if p.grid.0 == 0 || p.grid.1 == 0 || p.grid.2 == 0 {
        return Err(Error::config(
            "parameters.grid",
            "each axis needs at least one point",
        ));
    }
    Ok(p)
}

fn resolve_procedure_scenario(
    raw_procedure: Option<RawProcedure>,
    raw_scenario: Option<RawScenario>,
    parameters: &Parameters,
) -> Result<(Option<EwlProcedure>, Option<Scenario>)> {
    let (procedure, catalog_scenario) = match raw_procedure {
        None => (None, None),
        Some(rp) => {
            if let Some(name) = &rp.catalog {
                if rp.players.is_some()
                    || rp.j.is_some()
                    || rp.h.is_some()
                    || rp.initial_state.is_some()
                    || rp.strategy_space.is_some()
                {
                    return Err(Error::config(
                        "procedure.catalog",
                        "a catalog name excludes the explicit procedure fields",
                    ));
                }
                let params = CatalogParams {
                    gamma: parameters.gamma,
                    alpha: parameters.alpha,
                    eps: parameters.eps,
                    bos_table: default_bos_table(),
                    grid: parameters.grid,
                };
                let (p, s) = catalog_with(name, &params)
                    .map_err(|e| Error::config("procedure.catalog", e.to_string()))?;
                (Some(p), Some(s))
            } else {
                (Some(resolve_explicit_procedure(&rp)?), None)
            }
        }
    };

    let scenario = match raw_scenario {
        Some(rs) => Some(resolve_scenario(
            &rs,
            procedure.as_ref().map(EwlProcedure::players),
        )?),
        None => catalog_scenario,
    };

    if let (Some(p), Some(s)) = (&procedure, &scenario) {
        if p.players() != s.players() {
            return Err(Error::config(
                "scenario.players",
                format!(
                    "scenario has {} players but the procedure has {}",
                    s.players(),
                    p.players()
                ),
            ));
        }
    }
    Ok((procedure, scenario))
}

fn resolve_explicit_procedure(rp: &RawProcedure) -> Result<EwlProcedure> {
    let n = rp.players.ok_or_else(|| {
        Error::config(
            "procedure.players",
            "required when no catalog name is given",
        )
    })?;
    if !(1..=5).contains(&n) {
        return Err(Error::config(
            "procedure.players",
            format!("must be between 1 and 5, got {n}"),
        ));
    }
    let dim = 1usize << n;
    let j = match &rp.j {
        None => CMatrix::identity(dim),
        Some(op) => resolve_operator(op, dim, "procedure.j")?,
    };
    let h = match &rp.h {
        None => CMatrix::identity(dim),
        Some(op) => resolve_operator(op, dim, "procedure.h")?,
    };
    let rho = match &rp.initial_state {
        None => ground_state(dim),
        Some(st) => resolve_state(st, n, dim, "procedure.initial_state")?,
    };
    let space = match &rp.strategy_space {
        None => {
            return Err(Error::config(
                "procedure.strategy_space",
                "required when no catalog name is given",
            ))
        }
        Some(sp) => resolve_space(sp)?,
    };
    EwlProcedure::new(n, h, j, rho, space)
        .map_err(|e| Error::config("procedure", e.to_string()))
}

fn ground_state(dim: usize) -> CMatrix {
    CVector::basis(dim, 0).expect("dim is positive").outer()
}

fn matrix_from_raw(rows: &[Vec<[f64; 2]>], field: &str) -> Result<CMatrix> {
    let converted: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    CMatrix::from_rows(&converted).map_err(|e| Error::config(field, e.to_string()))
}

fn expect_dim(m: &CMatrix, dim: usize, field: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::config(
            field,
            format!("must be {dim}x{dim}, got {}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(())
}

fn resolve_operator(op: &RawOperator, dim: usize, field: &str) -> Result<CMatrix> {
    let m = match op {
        RawOperator::Name(s) if s == "identity" => CMatrix::identity(dim),
        RawOperator::Name(other) => {
            return Err(Error::config(
                field,
                format!(
                    "unknown operator name `{other}`; use \"identity\", \
                     {{ ewl_j = gamma }}, or {{ matrix = [...] }}"
                ),
            ))
        }
        RawOperator::EwlJ { ewl_j } => states_gates::ewl_j(*ewl_j)
            .map_err(|e| Error::config(field, e.to_string()))?,
        RawOperator::Matrix { matrix } => matrix_from_raw(matrix, field)?,
    };
    expect_dim(&m, dim, field)?;
    let deviation = m.unitarity_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::config(
            field,
            format!("not unitary: max deviation {deviation:.3e} exceeds {STRUCTURAL_TOL:.0e}"),
        ));
    }
    Ok(m)
}

fn resolve_state(st: &RawState, n: usize, dim: usize, field: &str) -> Result<CMatrix> {
    let wrap = |e: Error| Error::config(field, e.to_string());
    let m = match st {
        RawState::Name(s) if s == "ghz" => states_gates::ghz_state(n).map_err(wrap)?.outer(),
        RawState::Name(s) if s == "minority_mixture" => {
            if n != 4 {
                return Err(Error::config(
                    field,
                    format!("minority_mixture is a 4-player state, procedure has {n}"),
                ));
            }
            states_gates::minority_rho_in()
        }
        RawState::Name(other) => {
            return Err(Error::config(
                field,
                format!(
                    "unknown state name `{other}`; use \"ghz\", \"minority_mixture\", \
                     {{ ket = \"0...\" }}, {{ fsslh_alpha = a }}, {{ f09 = [e1, e2] }}, \
                     {{ diagonal = [...] }}, or {{ matrix = [...] }}"
                ),
            ))
        }
        RawState::Ket { ket } => {
            let bits = parse_bits(ket, field)?;
            if bits.len() != n {
                return Err(Error::config(
                    field,
                    format!("ket `{ket}` has {} bits, procedure has {n} players", bits.len()),
                ));
            }
            CVector::basis(dim, qmat::index_of_bits(&bits))
                .map_err(wrap)?
                .outer()
        }
        RawState::Fsslh { fsslh_alpha } => {
            if n != 4 {
                return Err(Error::config(
                    field,
                    format!("fsslh_alpha describes a 4-player state, procedure has {n}"),
                ));
            }
            states_gates::fsslh_psi_in(*fsslh_alpha).map_err(wrap)?.outer()
        }
        RawState::F09 { f09 } => {
            if n != 2 {
                return Err(Error::config(
                    field,
                    format!("f09 describes a 2-player state, procedure has {n}"),
                ));
            }
            states_gates::f09_rho(f09[0], f09[1]).map_err(wrap)?
        }
        RawState::Diagonal { diagonal } => {
            let entries: Vec<Complex64> =
                diagonal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            CMatrix::from_diagonal(&entries).map_err(wrap)?
        }
        RawState::Matrix { matrix } => matrix_from_raw(matrix, field)?,
    };
    expect_dim(&m, dim, field)?;
    if !qmat::is_density_matrix(&m, STRUCTURAL_TOL) {
        return Err(Error::config(
            field,
            "not a density matrix (Hermitian, unit trace, positive semidefinite at 1e-9)",
        ));
    }
    Ok(m)
}

fn resolve_space(sp: &RawSpace) -> Result<StrategySpace> {
    match (&sp.gates, &sp.grid) {
        (Some(_), Some(_)) | (None, None) => Err(Error::config(
            "procedure.strategy_space",
            "give exactly one of `gates` or `grid`",
        )),
        (Some(gates), None) => {
            let labels = gates
                .iter()
                .map(|g| {
                    GateLabel::from_str(g).map_err(|e| {
                        Error::config("procedure.strategy_space.gates", e.to_string())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let space = StrategySpace::Finite(labels);
            // Surfaces empty lists and non-2x2 labels now rather than at run time.
            space
                .strategies()
                .map_err(|e| Error::config("procedure.strategy_space.gates", e.to_string()))?;
            Ok(space)
        }
        (None, Some(grid)) => {
            let axis = |raw: &RawAxis, name: &str| -> Result<GridAxis> {
                let wrap = |e: Error| {
                    Error::config(
                        &format!("procedure.strategy_space.grid.{name}"),
                        e.to_string(),
                    )
                };
                match raw {
                    RawAxis::Fixed(v) => GridAxis::fixed(*v).map_err(wrap),
                    RawAxis::Range(s, e, c) => GridAxis::new(*s, *e, *c).map_err(wrap),
                }
            };
            let spec = GridSpec::new(
                axis(&grid.theta, "theta")?,
                axis(&grid.phi, "phi")?,
                axis(&grid.chi, "chi")?,
            )
            .map_err(|e| Error::config("procedure.strategy_space.grid", e.to_string()))?;
            Ok(StrategySpace::Grid(spec))
        }
    }
}

fn resolve_scenario(rs: &RawScenario, default_players: Option<usize>) -> Result<Scenario> {
    let name = rs
        .name
        .as_deref()
        .ok_or_else(|| Error::config("scenario.name", "field is required"))?;

    let reject = |field: &str, present: bool| -> Result<()> {
        if present {
            return Err(Error::config(
                &format!("scenario.{field}"),
                format!("not used by the `{name}` scenario"),
            ));
        }
        Ok(())
    };

    match name {
        "minority" => {
            reject("table", rs.table.is_some())?;
            reject("inputs", rs.inputs.is_some())?;
            reject("payoffs", rs.payoffs.is_some())?;
            let players = rs.players.or(default_players).ok_or_else(|| {
                Error::config("scenario.players", "required for the minority scenario")
            })?;
            minority_scenario(players).map_err(|e| Error::config("scenario", e.to_string()))
        }
        "prisoners_dilemma" | "battle_sexes" => {
            reject("inputs", rs.inputs.is_some())?;
            reject("payoffs", rs.payoffs.is_some())?;
            if let Some(p) = rs.players {
                if p != 2 {
                    return Err(Error::config(
                        "scenario.players",
                        format!("`{name}` is a 2-player scenario, got {p}"),
                    ));
                }
            }
            let table = match &rs.table {
                None if name == "prisoners_dilemma" => default_pd_table(),
                None => default_bos_table(),
                Some(t) => PayoffTable2x2::new(t.player1, t.player2)
                    .map_err(|e| Error::config("scenario.table", e.to_string()))?,
            };
            let built = if name == "prisoners_dilemma" {
                prisoners_dilemma_scenario(table)
            } else {
                battle_sexes_scenario(table)
            };
            built.map_err(|e| Error::config("scenario.table", e.to_string()))
        }
        "modulo4" => {
            reject("table", rs.table.is_some())?;
            reject("inputs", rs.inputs.is_some())?;
            reject("payoffs", rs.payoffs.is_some())?;
            if let Some(p) = rs.players {
                if p != 3 {
                    return Err(Error::config(
                        "scenario.players",
                        format!("`modulo4` is a 3-player scenario, got {p}"),
                    ));
                }
            }
            Ok(modulo4_scenario())
        }
        "explicit" => {
            reject("table", rs.table.is_some())?;
            let players = rs.players.or(default_players).ok_or_else(|| {
                Error::config("scenario.players", "required for an explicit scenario")
            })?;
            let inputs = rs.inputs.clone().unwrap_or_default();
            let entries = rs.payoffs.as_ref().ok_or_else(|| {
                Error::config("scenario.payoffs", "required for an explicit scenario")
            })?;
            let mut map: BTreeMap<(Vec<u8>, Vec<u8>), Vec<f64>> = BTreeMap::new();
            for e in entries {
                let key = (e.input.clone().unwrap_or_default(), e.output.clone());
                if map.insert(key, e.values.clone()).is_some() {
                    return Err(Error::config(
                        "scenario.payoffs",
                        format!(
                            "duplicate entry for input {:?}, output {:?}",
                            e.input.clone().unwrap_or_default(),
                            e.output
                        ),
                    ));
                }
            }
            explicit_scenario("explicit", players, inputs, map)
                .map_err(|e| Error::config("scenario.payoffs", e.to_string()))
        }
        other => Err(Error::config(
            "scenario.name",
            format!(
                "unknown scenario `{other}`; one of minority, prisoners_dilemma, \
                 battle_sexes, modulo4, explicit"
            ),
        )),
    }
}

fn resolve_gate(g: &RawGate, field: &str) -> Result<Strategy> {
    match g {
        RawGate::Name(s) => {
            let label = GateLabel::from_str(s).map_err(|e| Error::config(field, e.to_string()))?;
            Strategy::from_label(&label).map_err(|e| Error::config(field, e.to_string()))
        }
        RawGate::Matrix { matrix } => {
            let m = matrix_from_raw(matrix, field)?;
            Strategy::new("custom", m).map_err(|e| Error::config(field, e.to_string()))
        }
    }
}

fn resolve_profile(entries: &[RawProfileEntry], field: &str) -> Result<StrategyProfile> {
    let players = entries
        .iter()
        .map(|e| match e {
            RawProfileEntry::Single(g) => Ok(PlayerStrategy::Single(resolve_gate(g, field)?)),
            RawProfileEntry::Pair(z, o) => Ok(PlayerStrategy::PerInput {
                on_zero: resolve_gate(z, field)?,
                on_one: resolve_gate(o, field)?,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    StrategyProfile::new(players).map_err(|e| Error::config(field, e.to_string()))
}

fn resolve_analysis(
    kind: &str,
    raw: &RawAnalysis,
    procedure: Option<&EwlProcedure>,
    scenario: Option<&Scenario>,
) -> Result<Analysis> {
    let (needs_procedure, needs_scenario, takes_profile, takes_input) = match kind {
        "distribution" => (true, false, true, true),
        "payoff" => (true, true, true, false),
        "nash" => (true, true, false, false),
        "pareto" => (true, true, true, false),
        "classical_bound" => (false, true, false, false),
        "symmetric_max" => (true, true, false, false),
        "verify_claims" => (false, false, false, false),
        other => {
            return Err(Error::config(
                "analysis.kind",
                format!(
                    "unknown analysis `{other}`; one of distribution, payoff, nash, \
                     pareto, classical_bound, symmetric_max, verify_claims"
                ),
            ))
        }
    };

    if needs_procedure && procedure.is_none() {
        return Err(Error::config(
            "procedure",
            format!("section is required for the `{kind}` analysis"),
        ));
    }
    if needs_scenario && scenario.is_none() {
        return Err(Error::config(
            "scenario",
            format!("section is required for the `{kind}` analysis"),
        ));
    }
    if kind == "classical_bound" {
        if let Some(sc) = scenario {
            if sc.inputs().is_empty() {
                return Err(Error::config(
                    "scenario",
                    "the classical_bound analysis needs a scenario with inputs",
                ));
            }
        }
    }
    if !takes_profile && raw.profile.is_some() {
        return Err(Error::config(
            "analysis.profile",
            format!("not used by the `{kind}` analysis"),
        ));
    }
    if !takes_input && raw.input.is_some() {
        return Err(Error::config(
            "analysis.input",
            format!("not used by the `{kind}` analysis"),
        ));
    }

    let profile = match (takes_profile, &raw.profile) {
        (true, Some(entries)) => Some(resolve_profile(entries, "analysis.profile")?),
        (true, None) => {
            return Err(Error::config(
                "analysis.profile",
                format!("required for the `{kind}` analysis"),
            ))
        }
        (false, _) => None,
    };

    if let (Some(prof), Some(proc_)) = (&profile, procedure) {
        if prof.len() != proc_.players() {
            return Err(Error::config(
                "analysis.profile",
                format!(
                    "profile lists {} players but the procedure has {}",
                    prof.len(),
                    proc_.players()
                ),
            ));
        }
        for (i, player) in prof.players().iter().enumerate() {
            for branch in player.branches() {
                let admitted = proc_
                    .strategy_space()
                    .admits(branch)
                    .map_err(|e| Error::config("analysis.profile", e.to_string()))?;
                if !admitted {
                    return Err(Error::config(
                        "analysis.profile",
                        format!(
                            "player {}: gate `{}` is outside the procedure's strategy space",
                            i + 1,
                            branch.label()
                        ),
                    ));
                }
            }
        }
    }

    let input = match &raw.input {
        None => None,
        Some(s) => {
            let bits = parse_bits(s, "analysis.input")?;
            if let Some(p) = procedure {
                if bits.len() != p.players() {
                    return Err(Error::config(
                        "analysis.input",
                        format!(
                            "input `{s}` has {} bits, procedure has {} players",
                            bits.len(),
                            p.players()
                        ),
                    ));
                }
            }
            if let Some(sc) = scenario {
                if !sc.inputs().is_empty() && !sc.inputs().iter().any(|x| x == &bits) {
                    return Err(Error::config(
                        "analysis.input",
                        format!("input `{s}` is not admissible in the `{}` scenario", sc.name()),
                    ));
                }
                if sc.inputs().is_empty() {
                    return Err(Error::config(
                        "analysis.input",
                        format!("the `{}` scenario has no inputs", sc.name()),
                    ));
                }
            }
            Some(bits)
        }
    };

    if let Some(prof) = &profile {
        if prof.is_per_input() {
            if let Some(sc) = scenario {
                if sc.inputs().is_empty() {
                    return Err(Error::config(
                        "analysis.profile",
                        format!(
                            "per-input strategy pairs make no sense in the no-input `{}` scenario",
                            sc.name()
                        ),
                    ));
                }
            } else if input.is_none() {
                return Err(Error::config(
                    "analysis.profile",
                    "per-input strategy pairs need an input scenario or an explicit input",
                ));
            }
        }
    }

    Ok(match kind {
        "distribution" => Analysis::Distribution {
            profile: profile.expect("required above"),
            input,
        },
        "payoff" => Analysis::Payoff {
            profile: profile.expect("required above"),
        },
        "nash" => Analysis::Nash,
        "pareto" => Analysis::Pareto {
            profile: profile.expect("required above"),
        },
        "classical_bound" => Analysis::ClassicalBound,
        "symmetric_max" => Analysis::SymmetricMax,
        _ => Analysis::VerifyClaims,
    })
}

fn resolve_output(raw: RawOutput, kind: &str) -> Result<OutputSpec> {
    let format = match raw.format.as_deref() {
        None | Some("report_json") => OutputFormat::ReportJson,
        Some("table_csv") => OutputFormat::TableCsv,
        Some(other) => {
            return Err(Error::config(
                "output.format",
                format!("unknown format `{other}`; one of table_csv, report_json"),
            ))
        }
    };
    let name = raw
        .path
        .unwrap_or_else(|| format!("{kind}.{}", format.extension()));
    let path = resolve_output_path(&name, env::var(OUTPUT_DIR_ENV).ok().as_deref());
    Ok(OutputSpec { format, path })
}

/// Relative paths land under the output directory when one is set.
fn resolve_output_path(name: &str, out_dir: Option<&str>) -> PathBuf {
    let p = PathBuf::from(name);
    if p.is_absolute() {
        return p;
    }
    match out_dir {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

fn parse_bits(s: &str, field: &str) -> Result<Vec<u8>> {
    if s.is_empty() {
        return Err(Error::config(field, "empty bit string"));
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(Error::config(
                field,
                format!("character `{other}` in bit string `{s}`"),
            )),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Serialization back to explicit documents.

fn matrix_to_raw(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

fn axis_to_raw(axis: &GridAxis) -> RawAxis {
    if axis.count() == 1 {
        RawAxis::Fixed(axis.start())
    } else {
        RawAxis::Range(axis.start(), axis.end(), axis.count())
    }
}

/// Renders a procedure with all operators written out as explicit matrices.
pub fn procedure_to_raw(p: &EwlProcedure) -> RawProcedure {
    let space = match p.strategy_space() {
        StrategySpace::Finite(gates) => RawSpace {
            gates: Some(gates.iter().map(|g| g.to_string()).collect()),
            grid: None,
        },
        StrategySpace::Grid(spec) => RawSpace {
            gates: None,
            grid: Some(RawGrid {
                theta: axis_to_raw(spec.theta()),
                phi: axis_to_raw(spec.phi()),
                chi: axis_to_raw(spec.chi()),
            }),
        },
    };
    RawProcedure {
        catalog: None,
        players: Some(p.players()),
        j: Some(RawOperator::Matrix {
            matrix: matrix_to_raw(p.j()),
        }),
        h: Some(RawOperator::Matrix {
            matrix: matrix_to_raw(p.h()),
        }),
        initial_state: Some(RawState::Matrix {
            matrix: matrix_to_raw(p.initial_state()),
        }),
        strategy_space: Some(space),
    }
}

/// Renders a scenario back to its raw document form.
pub fn scenario_to_raw(s: &Scenario) -> Result<RawScenario> {
    let mut raw = RawScenario {
        name: None,
        players: Some(s.players()),
        inputs: None,
        table: None,
        payoffs: None,
    };
    let name = s.name();
    if let Some(n) = name.strip_prefix("minority_") {
        let _: usize = n
            .parse()
            .map_err(|_| Error::UnknownName(format!("unrecognized scenario name `{name}`")))?;
        raw.name = Some("minority".into());
    } else if name == "prisoners_dilemma" || name == "battle_sexes" {
        let t = s
            .table()
            .ok_or_else(|| Error::UnknownName(format!("scenario `{name}` has no table")))?;
        let (p1, p2) = t.entries();
        raw.name = Some(name.into());
        raw.table = Some(RawTable {
            player1: *p1,
            player2: *p2,
        });
    } else if name == "modulo4" {
        raw.name = Some("modulo4".into());
    } else if let Some(map) = s.explicit_payoffs() {
        raw.name = Some("explicit".into());
        if !s.inputs().is_empty() {
            raw.inputs = Some(s.inputs().to_vec());
        }
        raw.payoffs = Some(
            map.iter()
                .map(|((x, y), v)| RawPayoffEntry {
                    input: if x.is_empty() { None } else { Some(x.clone()) },
                    output: y.clone(),
                    values: v.clone(),
                })
                .collect(),
        );
    } else {
        return Err(Error::UnknownName(format!(
            "scenario `{name}` has no document form"
        )));
    }
    Ok(raw)
}

/// Writes a procedure (and optional scenario) as a complete, reloadable
/// document. Operators are dumped as full matrices, so a reload rebuilds
/// them bit for bit. The document carries a placeholder analysis section
/// to satisfy validation.
pub fn to_explicit_toml(p: &EwlProcedure, s: Option<&Scenario>) -> Result<String> {
    let raw = RawConfig {
        procedure: Some(procedure_to_raw(p)),
        scenario: s.map(scenario_to_raw).transpose()?,
        analysis: Some(RawAnalysis {
            kind: Some(if s.is_some() { "nash" } else { "verify_claims" }.into()),
            profile: None,
            input: None,
        }),
        parameters: None,
        output: None,
    };
    toml::to_string_pretty(&raw)
        .map_err(|e| Error::config("document", format!("serialization failed: {e}")))
}
