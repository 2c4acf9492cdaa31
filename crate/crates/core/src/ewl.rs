//! The quantization procedure: entangle, let each player act locally,
//! disentangle, measure, and pay out according to a scenario.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmat::{
    self, bits_of_index, CMatrix, CVector, REAL_RESIDUE_TOL, STRUCTURAL_TOL,
};
use crate::scenario::{
    battle_sexes_scenario, default_bos_table, minority_scenario, modulo4_scenario,
    PayoffTable2x2, Scenario,
};
use crate::states_gates::{
    f09_rho, fsslh_psi_in, ghz_state, minority_rho_in, named_gate, su2, GateLabel, Su2Params,
};

const TAU: f64 = 2.0 * PI;

/// A labeled 2x2 unitary a player can apply.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    label: String,
    matrix: CMatrix,
}

impl Strategy {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Error::Dimension(format!(
                "player strategies are 2x2, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: STRUCTURAL_TOL,
            });
        }
        Ok(Strategy {
            label: label.into(),
            matrix,
        })
    }

    pub fn from_label(g: &GateLabel) -> Result<Self> {
        if matches!(g, GateLabel::EwlJ(_)) {
            return Err(Error::Dimension(
                "the entangler is not a single-player strategy".into(),
            ));
        }
        Strategy::new(g.to_string(), named_gate(g)?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// What one player does: a fixed gate, or one gate per input bit.
#[derive(Debug, Clone, PartialEq)]
pub enum PlayerStrategy {
    Single(Strategy),
    PerInput { on_zero: Strategy, on_one: Strategy },
}

impl PlayerStrategy {
    pub fn label(&self) -> String {
        match self {
            PlayerStrategy::Single(s) => s.label().to_string(),
            PlayerStrategy::PerInput { on_zero, on_one } => {
                format!("[{}|{}]", on_zero.label(), on_one.label())
            }
        }
    }

    /// Picks the gate for an input bit; a fixed gate ignores the input.
    fn select(&self, bit: Option<u8>) -> Result<&Strategy> {
        match (self, bit) {
            (PlayerStrategy::Single(s), _) => Ok(s),
            (PlayerStrategy::PerInput { on_zero, .. }, Some(0)) => Ok(on_zero),
            (PlayerStrategy::PerInput { on_one, .. }, Some(1)) => Ok(on_one),
            (PlayerStrategy::PerInput { .. }, Some(b)) => Err(Error::Profile(format!(
                "input bit {b} is not 0 or 1"
            ))),
            (PlayerStrategy::PerInput { .. }, None) => Err(Error::Profile(
                "a per-input strategy needs an input to choose a gate".into(),
            )),
        }
    }

    /// The distinct gates this strategy can apply.
    pub fn branches(&self) -> Vec<&Strategy> {
        match self {
            PlayerStrategy::Single(s) => vec![s],
            PlayerStrategy::PerInput { on_zero, on_one } => vec![on_zero, on_one],
        }
    }
}

/// One strategy per player, all of the same kind.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    players: Vec<PlayerStrategy>,
}

impl StrategyProfile {
    pub fn new(players: Vec<PlayerStrategy>) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::Profile("a profile needs at least one player".into()));
        }
        let per_input = matches!(players[0], PlayerStrategy::PerInput { .. });
        for (i, p) in players.iter().enumerate() {
            if matches!(p, PlayerStrategy::PerInput { .. }) != per_input {
                return Err(Error::Profile(format!(
                    "player {} mixes fixed and per-input strategies within one profile",
                    i + 1
                )));
            }
        }
        Ok(StrategyProfile { players })
    }

    /// Every player applies the same fixed gate.
    pub fn uniform(n: usize, strategy: Strategy) -> Result<Self> {
        StrategyProfile::new(vec![PlayerStrategy::Single(strategy); n])
    }

    pub fn from_labels(labels: &[GateLabel]) -> Result<Self> {
        let players = labels
            .iter()
            .map(|g| Ok(PlayerStrategy::Single(Strategy::from_label(g)?)))
            .collect::<Result<Vec<_>>>()?;
        StrategyProfile::new(players)
    }

    pub fn from_label_pairs(pairs: &[(GateLabel, GateLabel)]) -> Result<Self> {
        let players = pairs
            .iter()
            .map(|(z, o)| {
                Ok(PlayerStrategy::PerInput {
                    on_zero: Strategy::from_label(z)?,
                    on_one: Strategy::from_label(o)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        StrategyProfile::new(players)
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn players(&self) -> &[PlayerStrategy] {
        &self.players
    }

    pub fn is_per_input(&self) -> bool {
        matches!(self.players[0], PlayerStrategy::PerInput { .. })
    }

    pub fn labels(&self) -> Vec<String> {
        self.players.iter().map(PlayerStrategy::label).collect()
    }

    /// Copy of this profile with one player's strategy replaced.
    pub fn with_player(&self, player: usize, strategy: PlayerStrategy) -> Result<Self> {
        if player >= self.players.len() {
            return Err(Error::Profile(format!(
                "player index {player} outside profile of {} players",
                self.players.len()
            )));
        }
        let mut players = self.players.clone();
        players[player] = strategy;
        StrategyProfile::new(players)
    }
}

/// One axis of a strategy grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    start: f64,
    end: f64,
    count: usize,
}

impl GridAxis {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidParameter(
                "grid axis endpoints must be finite".into(),
            ));
        }
        if count == 0 {
            return Err(Error::InvalidParameter(
                "grid axis needs at least one point".into(),
            ));
        }
        if start > end {
            return Err(Error::InvalidParameter(format!(
                "grid axis start {start} exceeds end {end}"
            )));
        }
        Ok(GridAxis { start, end, count })
    }

    /// Axis pinned to a single value.
    pub fn fixed(value: f64) -> Result<Self> {
        GridAxis::new(value, value, 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Sample points. Closed axes include both endpoints; periodic axes
    /// treat `end` as excluded and spread points with spacing (end-start)/count.
    fn points(&self, periodic: bool) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.end - self.start;
        (0..self.count)
            .map(|k| {
                if periodic {
                    self.start + span * (k as f64 / self.count as f64)
                } else if k == self.count - 1 {
                    self.end
                } else {
                    self.start + span * (k as f64 / (self.count - 1) as f64)
                }
            })
            .collect()
    }
}

/// Rectangular grid over the three gate angles.
///
/// `theta` is a closed interval inside `[0, pi]`; `phi` and `chi` are
/// half-open periodic intervals inside `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    theta: GridAxis,
    phi: GridAxis,
    chi: GridAxis,
}

impl GridSpec {
    pub fn new(theta: GridAxis, phi: GridAxis, chi: GridAxis) -> Result<Self> {
        if theta.start < 0.0 || theta.end > PI {
            return Err(Error::InvalidParameter(format!(
                "theta axis [{}, {}] outside [0, pi]",
                theta.start, theta.end
            )));
        }
        for (name, axis) in [("phi", &phi), ("chi", &chi)] {
            if axis.start < 0.0 || axis.end > TAU {
                return Err(Error::InvalidParameter(format!(
                    "{name} axis [{}, {}] outside [0, 2pi)",
                    axis.start, axis.end
                )));
            }
            if axis.count == 1 && axis.start >= TAU {
                return Err(Error::InvalidParameter(format!(
                    "{name} fixed at {} which is outside [0, 2pi)",
                    axis.start
                )));
            }
        }
        for (name, axis) in [("theta", &theta), ("phi", &phi), ("chi", &chi)] {
            if axis.count == 1 && axis.start != axis.end {
                return Err(Error::InvalidParameter(format!(
                    "{name} axis spans [{}, {}] but has a single point; fix it to \
                     one value or give it at least 2 points",
                    axis.start, axis.end
                )));
            }
        }
        Ok(GridSpec { theta, phi, chi })
    }

    /// Full-range grid with the given point counts per axis.
    pub fn full(theta_count: usize, phi_count: usize, chi_count: usize) -> Result<Self> {
        GridSpec::new(
            GridAxis::new(0.0, PI, theta_count)?,
            GridAxis::new(0.0, TAU, phi_count)?,
            GridAxis::new(0.0, TAU, chi_count)?,
        )
    }

    pub fn theta(&self) -> &GridAxis {
        &self.theta
    }

    pub fn phi(&self) -> &GridAxis {
        &self.phi
    }

    pub fn chi(&self) -> &GridAxis {
        &self.chi
    }

    pub fn size(&self) -> usize {
        self.theta.count * self.phi.count * self.chi.count
    }

    /// Grid nodes in (theta, phi, chi)-lexicographic order.
    pub fn params(&self) -> Result<Vec<Su2Params>> {
        let mut out = Vec::with_capacity(self.size());
        for &t in &self.theta.points(false) {
            for &p in &self.phi.points(true) {
                for &c in &self.chi.points(true) {
                    out.push(Su2Params::new(t, p, c)?);
                }
            }
        }
        Ok(out)
    }
}

/// The pure strategies available to each player.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpace {
    /// An explicit list of gates.
    Finite(Vec<GateLabel>),
    /// All gates on a parameter grid; membership is by unitarity, so any
    /// 2x2 unitary (not only exact grid nodes) is admissible in profiles.
    Grid(GridSpec),
}

impl StrategySpace {
    pub fn size(&self) -> usize {
        match self {
            StrategySpace::Finite(gates) => gates.len(),
            StrategySpace::Grid(spec) => spec.size(),
        }
    }

    /// Materializes the pure strategies in canonical order.
    pub fn strategies(&self) -> Result<Vec<Strategy>> {
        match self {
            StrategySpace::Finite(gates) => {
                if gates.is_empty() {
                    return Err(Error::InvalidParameter(
                        "a finite strategy space needs at least one gate".into(),
                    ));
                }
                gates.iter().map(Strategy::from_label).collect()
            }
            StrategySpace::Grid(spec) => spec
                .params()?
                .iter()
                .map(|p| Strategy::new(GateLabel::Su2(*p).to_string(), su2(p)))
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            StrategySpace::Finite(gates) => {
                if gates.is_empty() {
                    return Err(Error::InvalidParameter(
                        "a finite strategy space needs at least one gate".into(),
                    ));
                }
                for g in gates {
                    Strategy::from_label(g)?;
                }
                Ok(())
            }
            // Grid ranges were validated at construction.
            StrategySpace::Grid(_) => Ok(()),
        }
    }

    /// Whether a strategy is admissible in this space.
    pub fn admits(&self, s: &Strategy) -> Result<bool> {
        match self {
            StrategySpace::Finite(gates) => {
                for g in gates {
                    if named_gate(g)?.max_abs_diff(s.matrix()) <= STRUCTURAL_TOL {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            // Strategy construction already guarantees a 2x2 unitary.
            StrategySpace::Grid(_) => Ok(true),
        }
    }
}

/// A complete quantization procedure: player count, disentangler `h`,
/// entangler `j`, initial state, and the per-player strategy space.
#[derive(Debug, Clone)]
pub struct EwlProcedure {
    n: usize,
    h: CMatrix,
    j: CMatrix,
    rho_in: CMatrix,
    space: StrategySpace,
    // J rho J^dagger never changes across profiles, so it is computed once.
    rho_after_j: CMatrix,
}

impl EwlProcedure {
    pub fn new(
        n: usize,
        h: CMatrix,
        j: CMatrix,
        rho_in: CMatrix,
        space: StrategySpace,
    ) -> Result<Self> {
        if !(1..=5).contains(&n) {
            return Err(Error::Dimension(format!(
                "procedures support 1 to 5 players, got {n}"
            )));
        }
        let dim = 1usize << n;
        for (name, m) in [("h", &h), ("j", &j)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dimension(format!(
                    "{name} must be {dim}x{dim} for {n} players, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            let deviation = m.unitarity_deviation();
            if deviation > STRUCTURAL_TOL {
                return Err(Error::NotUnitary {
                    deviation,
                    tolerance: STRUCTURAL_TOL,
                });
            }
        }
        if rho_in.rows() != dim || rho_in.cols() != dim {
            return Err(Error::Dimension(format!(
                "initial state must be {dim}x{dim} for {n} players, got {}x{}",
                rho_in.rows(),
                rho_in.cols()
            )));
        }
        if !qmat::is_density_matrix(&rho_in, STRUCTURAL_TOL) {
            return Err(Error::NotDensity(
                "initial state fails the Hermitian/unit-trace/PSD check".into(),
            ));
        }
        space.validate()?;
        let rho_after_j = qmat::evolve_unchecked(&rho_in, &j)?;
        Ok(EwlProcedure {
            n,
            h,
            j,
            rho_in,
            space,
            rho_after_j,
        })
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    pub fn initial_state(&self) -> &CMatrix {
        &self.rho_in
    }

    pub fn strategy_space(&self) -> &StrategySpace {
        &self.space
    }
}

/// Probabilities over measurement outcome strings.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    masses: BTreeMap<Vec<u8>, f64>,
}

impl OutcomeDistribution {
    /// Validates bit-string keys, nonnegative masses, and unit total.
    pub fn new(masses: BTreeMap<Vec<u8>, f64>) -> Result<Self> {
        let Some(width) = masses.keys().next().map(Vec::len) else {
            return Err(Error::InvalidParameter(
                "a distribution needs at least one outcome".into(),
            ));
        };
        let mut total = 0.0;
        for (bits, &mass) in &masses {
            if bits.len() != width || bits.iter().any(|&b| b > 1) {
                return Err(Error::InvalidParameter(format!(
                    "outcome {bits:?} is not a {width}-bit string"
                )));
            }
            if !(0.0..=1.0).contains(&mass) {
                return Err(Error::InvalidParameter(format!(
                    "mass {mass} for outcome {bits:?} outside [0, 1]"
                )));
            }
            total += mass;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NumericalConsistency(format!(
                "probability masses sum to {total}, expected 1 within 1e-9"
            )));
        }
        Ok(OutcomeDistribution { masses })
    }

    /// Mass for an outcome; outcomes not stored carry zero.
    pub fn mass(&self, bits: &[u8]) -> f64 {
        self.masses.get(bits).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u8>, f64)> {
        self.masses.iter().map(|(k, &v)| (k, v))
    }

    /// Outcomes carrying strictly positive mass.
    pub fn support(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.masses
            .iter()
            .filter(|(_, &v)| v > 0.0)
            .map(|(k, _)| k)
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }
}

fn validate_profile(p: &EwlProcedure, profile: &StrategyProfile) -> Result<()> {
    if profile.len() != p.n {
        return Err(Error::Profile(format!(
            "profile has {} players, procedure has {}",
            profile.len(),
            p.n
        )));
    }
    for (i, ps) in profile.players().iter().enumerate() {
        for branch in ps.branches() {
            if !p.space.admits(branch)? {
                return Err(Error::Profile(format!(
                    "player {} strategy `{}` is not in the procedure's strategy space",
                    i + 1,
                    branch.label()
                )));
            }
        }
    }
    Ok(())
}

/// Runs the procedure once and reads the outcome distribution off the final
/// state's diagonal. `input` selects gates for per-input profiles and must be
/// omitted for no-input play.
pub fn outcome_distribution(
    p: &EwlProcedure,
    profile: &StrategyProfile,
    input: Option<&[u8]>,
) -> Result<OutcomeDistribution> {
    validate_profile(p, profile)?;
    if let Some(x) = input {
        if x.len() != p.n {
            return Err(Error::Profile(format!(
                "input {x:?} does not have one bit per player ({} players)",
                p.n
            )));
        }
    } else if profile.is_per_input() {
        return Err(Error::Profile(
            "a per-input profile needs an input to choose gates".into(),
        ));
    }

    let gates: Vec<CMatrix> = profile
        .players()
        .iter()
        .enumerate()
        .map(|(i, ps)| {
            let bit = input.map(|x| x[i]);
            Ok(ps.select(bit)?.matrix().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let joint = qmat::kron_all(&gates)?;
    let after_moves = qmat::evolve_unchecked(&p.rho_after_j, &joint)?;
    let rho_f = qmat::evolve_unchecked(&after_moves, &p.h)?;

    // The diagonal of rho_f in the computational basis is exactly the list of
    // projector expectations, so no per-outcome trace is needed.
    let mut masses = BTreeMap::new();
    for idx in 0..(1usize << p.n) {
        let v = rho_f.get(idx, idx);
        if v.im.abs() > REAL_RESIDUE_TOL {
            return Err(Error::NumericalConsistency(format!(
                "outcome probability at index {idx} has imaginary residue {:.3e}",
                v.im
            )));
        }
        if v.re < -REAL_RESIDUE_TOL || v.re > 1.0 + REAL_RESIDUE_TOL {
            return Err(Error::NumericalConsistency(format!(
                "outcome probability {:.6e} at index {idx} is outside [0, 1]",
                v.re
            )));
        }
        masses.insert(bits_of_index(idx, p.n), v.re.clamp(0.0, 1.0));
    }
    OutcomeDistribution::new(masses)
}

/// Expected payoffs when the scenario has no inputs.
pub fn payoff_no_input(
    p: &EwlProcedure,
    s: &Scenario,
    profile: &StrategyProfile,
) -> Result<Vec<f64>> {
    if s.players() != p.players() {
        return Err(Error::Dimension(format!(
            "scenario `{}` has {} players, procedure has {}",
            s.name(),
            s.players(),
            p.players()
        )));
    }
    if s.has_inputs() {
        return Err(Error::InvalidParameter(format!(
            "scenario `{}` has inputs; use the input-averaged payoff",
            s.name()
        )));
    }
    let dist = outcome_distribution(p, profile, None)?;
    let mut payoffs = vec![0.0; p.players()];
    for (y, mass) in dist.iter() {
        if mass == 0.0 {
            continue;
        }
        for (acc, v) in payoffs.iter_mut().zip(s.evaluate(None, y)?) {
            *acc += mass * v;
        }
    }
    Ok(payoffs)
}

/// Expected payoffs averaged uniformly over the scenario's inputs.
pub fn payoff_with_input(
    p: &EwlProcedure,
    s: &Scenario,
    profile: &StrategyProfile,
) -> Result<Vec<f64>> {
    if s.players() != p.players() {
        return Err(Error::Dimension(format!(
            "scenario `{}` has {} players, procedure has {}",
            s.name(),
            s.players(),
            p.players()
        )));
    }
    if !s.has_inputs() {
        return Err(Error::InvalidParameter(format!(
            "scenario `{}` has no inputs; use the no-input payoff",
            s.name()
        )));
    }
    let mut payoffs = vec![0.0; p.players()];
    let weight = 1.0 / s.inputs().len() as f64;
    for x in s.inputs() {
        let dist = outcome_distribution(p, profile, Some(x))?;
        for (y, mass) in dist.iter() {
            if mass == 0.0 {
                continue;
            }
            for (acc, v) in payoffs.iter_mut().zip(s.evaluate(Some(x), y)?) {
                *acc += weight * mass * v;
            }
        }
    }
    Ok(payoffs)
}

/// Expected payoffs, dispatching on whether the scenario has inputs.
pub fn payoff(p: &EwlProcedure, s: &Scenario, profile: &StrategyProfile) -> Result<Vec<f64>> {
    if s.has_inputs() {
        payoff_with_input(p, s, profile)
    } else {
        payoff_no_input(p, s, profile)
    }
}

/// The static game induced by running a procedure under a scenario.
///
/// Moves are the procedure's pure strategies for a no-input scenario, or
/// ordered (gate on 0, gate on 1) pairs when the scenario has inputs. The
/// move list is shared by all players and ordered canonically.
#[derive(Debug, Clone)]
pub struct InducedGame {
    procedure: EwlProcedure,
    scenario: Scenario,
    strategies: Vec<Strategy>,
    per_input: bool,
}

/// Builds the induced game after checking player counts match.
pub fn induced_game(p: &EwlProcedure, s: &Scenario) -> Result<InducedGame> {
    if s.players() != p.players() {
        return Err(Error::Dimension(format!(
            "scenario `{}` has {} players, procedure has {}",
            s.name(),
            s.players(),
            p.players()
        )));
    }
    Ok(InducedGame {
        procedure: p.clone(),
        scenario: s.clone(),
        strategies: p.strategy_space().strategies()?,
        per_input: s.has_inputs(),
    })
}

impl InducedGame {
    pub fn players(&self) -> usize {
        self.procedure.players()
    }

    pub fn procedure(&self) -> &EwlProcedure {
        &self.procedure
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Number of moves available to each player.
    pub fn move_count(&self) -> usize {
        if self.per_input {
            self.strategies.len() * self.strategies.len()
        } else {
            self.strategies.len()
        }
    }

    /// Total number of pure profiles, `move_count ^ players`.
    pub fn profile_count(&self) -> u128 {
        (self.move_count() as u128).pow(self.players() as u32)
    }

    /// Move by canonical index; pairs are ordered (on-zero major, on-one minor).
    pub fn move_at(&self, index: usize) -> Result<PlayerStrategy> {
        let m = self.strategies.len();
        if self.per_input {
            if index >= m * m {
                return Err(Error::Profile(format!(
                    "move index {index} outside {} per-input moves",
                    m * m
                )));
            }
            Ok(PlayerStrategy::PerInput {
                on_zero: self.strategies[index / m].clone(),
                on_one: self.strategies[index % m].clone(),
            })
        } else {
            if index >= m {
                return Err(Error::Profile(format!(
                    "move index {index} outside {m} moves"
                )));
            }
            Ok(PlayerStrategy::Single(self.strategies[index].clone()))
        }
    }

    pub fn move_label(&self, index: usize) -> Result<String> {
        Ok(self.move_at(index)?.label())
    }

    /// Builds the profile for one move index per player.
    pub fn profile_at(&self, indices: &[usize]) -> Result<StrategyProfile> {
        if indices.len() != self.players() {
            return Err(Error::Profile(format!(
                "need {} move indices, got {}",
                self.players(),
                indices.len()
            )));
        }
        let players = indices
            .iter()
            .map(|&i| self.move_at(i))
            .collect::<Result<Vec<_>>>()?;
        StrategyProfile::new(players)
    }

    /// The payoff oracle: expected payoff vector for a profile.
    pub fn payoffs(&self, profile: &StrategyProfile) -> Result<Vec<f64>> {
        payoff(&self.procedure, &self.scenario, profile)
    }

    /// Payoff oracle addressed by move indices.
    pub fn payoffs_at(&self, indices: &[usize]) -> Result<Vec<f64>> {
        self.payoffs(&self.profile_at(indices)?)
    }
}

/// Tunable parameters for the built-in procedure catalog.
#[derive(Debug, Clone)]
pub struct CatalogParams {
    /// Entangler coupling for the grid-based two-player procedures.
    pub gamma: f64,
    /// Interpolation weight for the four-player pure initial state.
    pub alpha: f64,
    /// Diagonal weights for the asymmetric two-player mixed state.
    pub eps: (f64, f64),
    /// Payoff table for the coordination scenarios.
    pub bos_table: PayoffTable2x2,
    /// Grid resolution (theta, phi, chi points).
    pub grid: (usize, usize, usize),
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            gamma: PI / 2.0,
            alpha: 1.0,
            eps: (0.1, 0.3),
            bos_table: default_bos_table(),
            grid: (13, 13, 13),
        }
    }
}

/// Names accepted by [`catalog`].
pub fn catalog_names() -> &'static [&'static str] {
    &[
        "bos_p1",
        "bos_p2",
        "bos_p3",
        "bos_p4",
        "bos_p5",
        "minority_p1",
        "minority_p2",
        "minority_p3",
        "mod4_ghz",
    ]
}

/// Builds a named procedure/scenario pair with default parameters.
pub fn catalog(name: &str) -> Result<(EwlProcedure, Scenario)> {
    catalog_with(name, &CatalogParams::default())
}

/// Builds a named procedure/scenario pair with explicit parameters.
pub fn catalog_with(name: &str, params: &CatalogParams) -> Result<(EwlProcedure, Scenario)> {
    let classical_gates = || {
        StrategySpace::Finite(vec![GateLabel::Identity, GateLabel::PauliX])
    };
    let full_grid = || -> Result<StrategySpace> {
        Ok(StrategySpace::Grid(GridSpec::full(
            params.grid.0,
            params.grid.1,
            params.grid.2,
        )?))
    };
    let bos = || battle_sexes_scenario(params.bos_table.clone());
    let ket = |n: usize| -> Result<CMatrix> {
        Ok(CVector::basis(1 << n, 0)?.outer())
    };

    match name {
        "bos_p1" => {
            let p = EwlProcedure::new(
                2,
                CMatrix::identity(4),
                CMatrix::identity(4),
                ket(2)?,
                classical_gates(),
            )?;
            Ok((p, bos()?))
        }
        "bos_p2" => {
            let p = EwlProcedure::new(
                2,
                CMatrix::identity(4),
                CMatrix::identity(4),
                ghz_state(2)?.outer(),
                classical_gates(),
            )?;
            Ok((p, bos()?))
        }
        "bos_p3" => {
            let p = EwlProcedure::new(
                2,
                CMatrix::identity(4),
                CMatrix::identity(4),
                f09_rho(params.eps.0, params.eps.1)?,
                classical_gates(),
            )?;
            Ok((p, bos()?))
        }
        "bos_p4" | "bos_p5" => {
            let j = named_gate(&GateLabel::EwlJ(params.gamma))?;
            let h = qmat::conjugate_transpose(&j);
            let space = if name == "bos_p4" {
                // The two-parameter space: chi pinned to zero.
                StrategySpace::Grid(GridSpec::new(
                    GridAxis::new(0.0, PI, params.grid.0)?,
                    GridAxis::new(0.0, TAU, params.grid.1)?,
                    GridAxis::fixed(0.0)?,
                )?)
            } else {
                full_grid()?
            };
            let p = EwlProcedure::new(2, h, j, ket(2)?, space)?;
            Ok((p, bos()?))
        }
        "minority_p1" => {
            let p = EwlProcedure::new(
                4,
                CMatrix::identity(16),
                CMatrix::identity(16),
                ket(4)?,
                classical_gates(),
            )?;
            Ok((p, minority_scenario(4)?))
        }
        "minority_p2" => {
            let p = EwlProcedure::new(
                4,
                CMatrix::identity(16),
                CMatrix::identity(16),
                minority_rho_in(),
                classical_gates(),
            )?;
            Ok((p, minority_scenario(4)?))
        }
        "minority_p3" => {
            let p = EwlProcedure::new(
                4,
                CMatrix::identity(16),
                CMatrix::identity(16),
                fsslh_psi_in(params.alpha)?.outer(),
                full_grid()?,
            )?;
            Ok((p, minority_scenario(4)?))
        }
        "mod4_ghz" => {
            let p = EwlProcedure::new(
                3,
                CMatrix::identity(8),
                CMatrix::identity(8),
                ghz_state(3)?.outer(),
                full_grid()?,
            )?;
            Ok((p, modulo4_scenario()))
        }
        other => Err(Error::UnknownName(format!(
            "no catalog entry `{other}`; known names: {}",
            catalog_names().join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::EXACT_TOL;

    fn single(label: &GateLabel) -> PlayerStrategy {
        PlayerStrategy::Single(Strategy::from_label(label).unwrap())
    }

    fn identity_profile(n: usize) -> StrategyProfile {
        StrategyProfile::uniform(n, Strategy::from_label(&GateLabel::Identity).unwrap()).unwrap()
    }

    #[test]
    fn identity_play_on_a_basis_state_is_deterministic() {
        let (p, _) = catalog("bos_p1").unwrap();
        let dist = outcome_distribution(&p, &identity_profile(2), None).unwrap();
        assert_eq!(dist.mass(&[0, 0]), 1.0);
        assert_eq!(dist.mass(&[1, 1]), 0.0);
    }

    #[test]
    fn bit_flips_move_the_mass_to_the_matching_outcome() {
        let (p, _) = catalog("bos_p1").unwrap();
        let profile =
            StrategyProfile::from_labels(&[GateLabel::PauliX, GateLabel::Identity]).unwrap();
        let dist = outcome_distribution(&p, &profile, None).unwrap();
        assert_eq!(dist.mass(&[1, 0]), 1.0);
    }

    #[test]
    fn profiles_outside_a_finite_space_are_rejected() {
        let (p, _) = catalog("bos_p1").unwrap();
        let profile =
            StrategyProfile::from_labels(&[GateLabel::Hadamard, GateLabel::Identity]).unwrap();
        assert!(matches!(
            outcome_distribution(&p, &profile, None),
            Err(Error::Profile(_))
        ));
    }

    #[test]
    fn per_input_profiles_require_an_input() {
        let (p, s) = catalog("mod4_ghz").unwrap();
        let pair = (GateLabel::Hadamard, GateLabel::SDaggerHadamard);
        let profile =
            StrategyProfile::from_label_pairs(&[pair.clone(), pair.clone(), pair]).unwrap();
        assert!(matches!(
            outcome_distribution(&p, &profile, None),
            Err(Error::Profile(_))
        ));
        assert!(outcome_distribution(&p, &profile, Some(&[0, 1, 1])).is_ok());
        assert!(payoff_with_input(&p, &s, &profile).is_ok());
        assert!(matches!(
            payoff_no_input(&p, &s, &profile),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn grid_axes_sample_closed_and_periodic_ranges() {
        let theta = GridAxis::new(0.0, PI, 5).unwrap();
        let pts = theta.points(false);
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[4], PI);

        let phi = GridAxis::new(0.0, TAU, 4).unwrap();
        let pts = phi.points(true);
        assert_eq!(pts, vec![0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0]);

        assert_eq!(GridAxis::fixed(1.0).unwrap().points(true), vec![1.0]);
    }

    #[test]
    fn grid_strategies_enumerate_theta_major() {
        let spec = GridSpec::new(
            GridAxis::new(0.0, PI, 2).unwrap(),
            GridAxis::new(0.0, TAU, 2).unwrap(),
            GridAxis::fixed(0.0).unwrap(),
        )
        .unwrap();
        let strategies = StrategySpace::Grid(spec).strategies().unwrap();
        assert_eq!(strategies.len(), 4);
        assert_eq!(strategies[0].label(), "su2(0.000000,0.000000,0.000000)");
        assert_eq!(strategies[1].label(), "su2(0.000000,3.141593,0.000000)");
        assert_eq!(strategies[3].label(), format!("su2({PI:.6},3.141593,0.000000)"));
    }

    #[test]
    fn induced_game_moves_are_pairs_exactly_when_the_scenario_has_inputs() {
        let (p, s) = catalog("bos_p1").unwrap();
        let game = induced_game(&p, &s).unwrap();
        assert_eq!(game.move_count(), 2);
        assert_eq!(game.profile_count(), 4);
        assert_eq!(game.move_label(0).unwrap(), "identity");

        let (p, s) = catalog("mod4_ghz").unwrap();
        let p = EwlProcedure::new(
            3,
            p.h().clone(),
            p.j().clone(),
            p.initial_state().clone(),
            StrategySpace::Finite(vec![GateLabel::Hadamard, GateLabel::SDaggerHadamard]),
        )
        .unwrap();
        let game = induced_game(&p, &s).unwrap();
        assert_eq!(game.move_count(), 4);
        assert_eq!(game.profile_count(), 64);
        assert_eq!(
            game.move_label(1).unwrap(),
            "[hadamard|s_dagger_hadamard]"
        );
    }

    #[test]
    fn catalog_names_build_and_unknown_names_do_not() {
        for name in catalog_names() {
            let (p, s) = catalog(name).unwrap();
            assert_eq!(p.players(), s.players(), "{name}");
        }
        assert!(matches!(catalog("bos_p6"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn mixed_profile_kinds_are_rejected() {
        let fixed = single(&GateLabel::Identity);
        let pair = PlayerStrategy::PerInput {
            on_zero: Strategy::from_label(&GateLabel::Identity).unwrap(),
            on_one: Strategy::from_label(&GateLabel::PauliX).unwrap(),
        };
        assert!(StrategyProfile::new(vec![fixed, pair]).is_err());
    }

    #[test]
    fn payoff_dispatch_matches_the_scenario_kind() {
        let (p, s) = catalog("minority_p2").unwrap();
        let prof = identity_profile(4);
        let direct = payoff_no_input(&p, &s, &prof).unwrap();
        let via_dispatch = payoff(&p, &s, &prof).unwrap();
        assert_eq!(direct, via_dispatch);
        assert_eq!(direct.len(), 4);
        for v in &direct {
            assert!((v - 0.25).abs() <= EXACT_TOL);
        }
    }

    #[test]
    fn zero_coupling_reduces_to_independent_classical_mixing() {
        // With the entangler switched off the procedure is two separate
        // one-qubit circuits, so each player's outcome bit flips with
        // probability sin^2(theta/2) regardless of phi.
        let params = CatalogParams {
            gamma: 0.0,
            ..CatalogParams::default()
        };
        let (p, s) = catalog_with("bos_p4", &params).unwrap();
        let table = s.table().unwrap();

        let thetas = [0.7, 2.3];
        let mut dists = Vec::new();
        for phis in [[0.0, 0.0], [1.1, 4.9]] {
            let players = thetas
                .iter()
                .zip(phis)
                .map(|(&t, f)| {
                    let prm = Su2Params::new(t, f, 0.0).unwrap();
                    let s = Strategy::new(GateLabel::Su2(prm).to_string(), su2(&prm)).unwrap();
                    PlayerStrategy::Single(s)
                })
                .collect();
            let prof = StrategyProfile::new(players).unwrap();
            dists.push(outcome_distribution(&p, &prof, None).unwrap());
        }

        let q: Vec<f64> = thetas.iter().map(|t| (t / 2.0).sin().powi(2)).collect();
        let mut expected_payoffs = [0.0; 2];
        for y1 in 0..2usize {
            for y2 in 0..2usize {
                let mass = (if y1 == 1 { q[0] } else { 1.0 - q[0] })
                    * (if y2 == 1 { q[1] } else { 1.0 - q[1] });
                let key = vec![y1 as u8, y2 as u8];
                for d in &dists {
                    assert!((d.mass(&key) - mass).abs() <= EXACT_TOL);
                }
                expected_payoffs[0] += mass * table.player1(y1 as u8, y2 as u8);
                expected_payoffs[1] += mass * table.player2(y1 as u8, y2 as u8);
            }
        }

        let prof = StrategyProfile::new(
            thetas
                .iter()
                .map(|&t| {
                    let prm = Su2Params::new(t, 0.0, 0.0).unwrap();
                    PlayerStrategy::Single(Strategy::new("mix", su2(&prm)).unwrap())
                })
                .collect(),
        )
        .unwrap();
        let got = payoff_no_input(&p, &s, &prof).unwrap();
        for (g, e) in got.iter().zip(expected_payoffs) {
            assert!((g - e).abs() <= EXACT_TOL);
        }
    }
}
