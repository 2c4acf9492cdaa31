//! The claim-verification battery: every headline number the toolkit is
//! expected to reproduce, checked against its stated tolerance.
//!
//! Each claim returns a [`ClaimResult`] pairing the expected vector with
//! the computed one; a claim passes when the max-norm deviation stays
//! within its tolerance. [`verify_claims`] runs all ten in a fixed order.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{
    card_deck_sampler, classical_deterministic_bound, find_pure_nash,
    grid_search_symmetric_max, is_pareto_optimal_exhaustive, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::ewl::{
    catalog, catalog_with, induced_game, outcome_distribution, payoff_no_input,
    payoff_with_input, CatalogParams, EwlProcedure, GridSpec, PlayerStrategy, Strategy,
    StrategyProfile, StrategySpace,
};
use crate::qmat::{self, all_bit_strings, CMatrix, CVector};
use crate::scenario::minority_scenario;
use crate::states_gates::{su2, GateLabel, Su2Params};

/// Default sample count for the card-deck claim.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
/// Default sampler seed.
pub const DEFAULT_SEED: u64 = 7;

/// One verified claim: expected vs computed at a tolerance.
#[derive(Debug, Clone)]
pub struct ClaimResult {
    pub id: &'static str,
    /// Where the expected numbers come from.
    pub note: String,
    pub expected: Vec<f64>,
    pub computed: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ClaimResult {
    fn evaluate(
        id: &'static str,
        note: impl Into<String>,
        expected: Vec<f64>,
        computed: Vec<f64>,
        tolerance: f64,
    ) -> Self {
        let pass = expected.len() == computed.len()
            && expected
                .iter()
                .zip(&computed)
                .all(|(e, c)| (e - c).abs() <= tolerance);
        ClaimResult {
            id,
            note: note.into(),
            expected,
            computed,
            tolerance,
            pass,
        }
    }

    /// Max-norm deviation between expected and computed.
    pub fn max_deviation(&self) -> f64 {
        if self.expected.len() != self.computed.len() {
            return f64::INFINITY;
        }
        self.expected
            .iter()
            .zip(&self.computed)
            .map(|(e, c)| (e - c).abs())
            .fold(0.0, f64::max)
    }
}

/// Whether every claim in a batch passed.
pub fn all_pass(results: &[ClaimResult]) -> bool {
    results.iter().all(|r| r.pass)
}

/// Runs all claims with default sampler settings.
pub fn verify_claims() -> Result<Vec<ClaimResult>> {
    verify_claims_with(DEFAULT_SAMPLES, DEFAULT_SEED)
}

/// Runs all claims; the card-deck claim uses the given sampler settings.
pub fn verify_claims_with(samples: u64, seed: u64) -> Result<Vec<ClaimResult>> {
    Ok(vec![
        claim_minority_p2_distribution()?,
        claim_minority_p2_payoff()?,
        claim_mod4_quantum_value()?,
        claim_mod4_classical_bound()?,
        claim_bos_p1_classical_embedding()?,
        claim_bos_inequivalence()?,
        claim_separable_reproduction()?,
        claim_card_deck_process(samples, seed)?,
        claim_minority_p3_symmetric_optimum()?,
        claim_structural_properties()?,
    ])
}

fn uniform_profile(n: usize, label: GateLabel) -> Result<StrategyProfile> {
    StrategyProfile::from_labels(&vec![label; n])
}

fn ones(y: &[u8]) -> usize {
    y.iter().filter(|&&b| b == 1).count()
}

/// Identity play on the four-player odd-parity mixture puts mass 1/8 on
/// each odd-parity output and 0 elsewhere.
pub fn claim_minority_p2_distribution() -> Result<ClaimResult> {
    let (p, _) = catalog("minority_p2")?;
    let profile = uniform_profile(4, GateLabel::Identity)?;
    let dist = outcome_distribution(&p, &profile, None)?;
    let mut expected = Vec::with_capacity(16);
    let mut computed = Vec::with_capacity(16);
    for y in all_bit_strings(4) {
        expected.push(if ones(&y) % 2 == 1 { 0.125 } else { 0.0 });
        computed.push(dist.mass(&y));
    }
    Ok(ClaimResult::evaluate(
        "minority_p2_distribution",
        "identity play reads the initial mixture's diagonal: equal weight on \
         the eight odd-parity outputs, none elsewhere",
        expected,
        computed,
        1e-12,
    ))
}

/// Identity play pays 1/4 to everyone, any unilateral bit flip zeroes the
/// deviator, and the profile is Pareto-optimal among all 16 pure profiles.
pub fn claim_minority_p2_payoff() -> Result<ClaimResult> {
    let (p, s) = catalog("minority_p2")?;
    let g = induced_game(&p, &s)?;
    let identity = uniform_profile(4, GateLabel::Identity)?;

    let mut computed = payoff_no_input(&p, &s, &identity)?;
    let flip = PlayerStrategy::Single(Strategy::from_label(&GateLabel::PauliX)?);
    for i in 0..4 {
        let deviated = identity.with_player(i, flip.clone())?;
        computed.push(payoff_no_input(&p, &s, &deviated)?[i]);
    }
    let pareto = is_pareto_optimal_exhaustive(&g, &identity, DEFAULT_BUDGET)?;
    computed.push(if pareto { 1.0 } else { 0.0 });

    let mut expected = vec![0.25; 4];
    expected.extend([0.0; 4]);
    expected.push(1.0);
    Ok(ClaimResult::evaluate(
        "minority_p2_payoff",
        "on the odd-parity mixture each player is the strict minority in 4 of \
         16 equally likely outputs; flipping one bit maps odd-parity strings \
         to even-parity strings, which never pay the deviator",
        expected,
        computed,
        1e-12,
    ))
}

fn mod4_winning_profile() -> Result<StrategyProfile> {
    let pair = (GateLabel::Hadamard, GateLabel::SDaggerHadamard);
    StrategyProfile::from_label_pairs(&[pair.clone(), pair.clone(), pair])
}

/// The hadamard / s_dagger_hadamard pair on the shared three-qubit GHZ
/// state wins the modulo-4 scenario with probability 1 on all four inputs.
pub fn claim_mod4_quantum_value() -> Result<ClaimResult> {
    let (p, s) = catalog("mod4_ghz")?;
    let profile = mod4_winning_profile()?;
    let mut computed = Vec::new();
    for x in s.inputs() {
        let dist = outcome_distribution(&p, &profile, Some(x))?;
        let mut win = 0.0;
        for (y, mass) in dist.iter() {
            win += mass * s.evaluate(Some(x), y)?[0];
        }
        computed.push(win);
    }
    computed.extend(payoff_with_input(&p, &s, &profile)?);
    Ok(ClaimResult::evaluate(
        "mod4_quantum_value",
        "the GHZ state is a +1 eigenstate of XXX and a -1 eigenstate of each \
         YYX permutation, so these measurement bases satisfy the winning \
         parity rule on every admissible input: win probability 1 per input, \
         payoff (1,1,1)",
        expected_ones(7),
        computed,
        1e-9,
    ))
}

fn expected_ones(k: usize) -> Vec<f64> {
    vec![1.0; k]
}

/// No deterministic classical response profile wins more than 3 of the 4
/// inputs, so the classical value is exactly 3/4, strictly below 1.
pub fn claim_mod4_classical_bound() -> Result<ClaimResult> {
    let (p, s) = catalog("mod4_ghz")?;
    let bound = classical_deterministic_bound(&s)?;
    let quantum = payoff_with_input(&p, &s, &mod4_winning_profile()?)?;
    let quantum_min = quantum.iter().copied().fold(f64::INFINITY, f64::min);
    let computed = vec![
        bound.value,
        if quantum_min > bound.value { 1.0 } else { 0.0 },
    ];
    Ok(ClaimResult::evaluate(
        "mod4_classical_bound",
        "exhaustive enumeration of all 64 deterministic response profiles \
         tops out at 3/4; the entangled value of 1 exceeds it strictly",
        vec![0.75, 1.0],
        computed,
        0.0,
    ))
}

/// The classical two-player procedure reproduces its payoff table verbatim
/// and has exactly the two coordinated pure equilibria.
pub fn claim_bos_p1_classical_embedding() -> Result<ClaimResult> {
    let (p, s) = catalog("bos_p1")?;
    let g = induced_game(&p, &s)?;
    let t = s
        .table()
        .ok_or_else(|| Error::UnknownName("coordination scenario lost its table".into()))?;
    let mut expected = Vec::new();
    let mut computed = Vec::new();
    for (a, b) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
        // Move 0 is the identity (output bit 0), move 1 the bit flip.
        let pays = g.payoffs_at(&[a, b])?;
        computed.extend(pays);
        expected.push(t.player1(a as u8, b as u8));
        expected.push(t.player2(a as u8, b as u8));
    }
    let nash = find_pure_nash(&g, 0.0)?;
    computed.push(nash.len() as f64);
    let has = |want: &[usize]| nash.iter().any(|r| r.move_indices == want);
    computed.push(if has(&[0, 0]) { 1.0 } else { 0.0 });
    computed.push(if has(&[1, 1]) { 1.0 } else { 0.0 });
    expected.extend([2.0, 1.0, 1.0]);
    Ok(ClaimResult::evaluate(
        "bos_p1_classical_embedding",
        "identity and bit-flip moves on the ground state produce deterministic \
         outputs, recovering the configured coordination table exactly; its \
         pure equilibria are the two coordinated profiles",
        expected,
        computed,
        0.0,
    ))
}

/// The three two-player coordination procedures share strategies but induce
/// pairwise different games; the maximally entangled one averages the two
/// coordinated cells at (identity, identity).
pub fn claim_bos_inequivalence() -> Result<ClaimResult> {
    let g1 = {
        let (p, s) = catalog("bos_p1")?;
        induced_game(&p, &s)?
    };
    let g2 = {
        let (p, s) = catalog("bos_p2")?;
        induced_game(&p, &s)?
    };
    let g3 = {
        let (p, s) = catalog("bos_p3")?;
        induced_game(&p, &s)?
    };
    let profiles = [[0usize, 0], [0, 1], [1, 0], [1, 1]];
    let differ = |a: &crate::ewl::InducedGame, b: &crate::ewl::InducedGame| -> Result<f64> {
        for idx in profiles {
            let pa = a.payoffs_at(&idx)?;
            let pb = b.payoffs_at(&idx)?;
            let gap = pa
                .iter()
                .zip(&pb)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if gap > 1e-9 {
                return Ok(1.0);
            }
        }
        Ok(0.0)
    };
    let mut computed = vec![differ(&g1, &g2)?, differ(&g1, &g3)?, differ(&g2, &g3)?];
    computed.extend(g2.payoffs_at(&[0, 0])?);

    let t = g2
        .scenario()
        .table()
        .ok_or_else(|| Error::UnknownName("coordination scenario lost its table".into()))?;
    let mut expected = vec![1.0, 1.0, 1.0];
    expected.push((t.player1(0, 0) + t.player1(1, 1)) / 2.0);
    expected.push((t.player2(0, 0) + t.player2(1, 1)) / 2.0);
    Ok(ClaimResult::evaluate(
        "bos_inequivalence",
        "same moves, different initial states: the three games disagree \
         pairwise on some profile, and on the maximally entangled state \
         identity play averages the two coordinated cells",
        expected,
        computed,
        1e-12,
    ))
}

/// A diagonal mixture evolved by identities reproduces any distribution
/// over 4-bit strings entry for entry.
pub fn claim_separable_reproduction() -> Result<ClaimResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let space = StrategySpace::Finite(vec![GateLabel::Identity]);
    let profile = uniform_profile(4, GateLabel::Identity)?;
    let outputs = all_bit_strings(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut weights: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let diag: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let rho = CMatrix::from_diagonal(&diag)?;
        let p = EwlProcedure::new(
            4,
            CMatrix::identity(16),
            CMatrix::identity(16),
            rho,
            space.clone(),
        )?;
        let dist = outcome_distribution(&p, &profile, None)?;
        for (idx, y) in outputs.iter().enumerate() {
            worst = worst.max((dist.mass(y) - weights[idx]).abs());
        }
    }
    Ok(ClaimResult::evaluate(
        "separable_reproduction",
        "identity evolution leaves the diagonal mixture untouched, so the \
         measured distribution equals the mixing distribution; worst entry \
         deviation over 100 seeded random distributions",
        vec![0.0],
        vec![worst],
        1e-12,
    ))
}

/// Two decks of four cards, one card per player: the empirical payoff of
/// reading one's card approaches 1/4 and never leaves odd-parity outputs.
pub fn claim_card_deck_process(samples: u64, seed: u64) -> Result<ClaimResult> {
    let dist = card_deck_sampler(samples, seed)?;
    let s = minority_scenario(4)?;
    let mut computed = vec![0.0f64; 4];
    for (y, mass) in dist.iter() {
        if mass == 0.0 {
            continue;
        }
        let v = s.evaluate(None, y)?;
        for (acc, value) in computed.iter_mut().zip(v) {
            *acc += mass * value;
        }
    }
    let off_support = dist.support().filter(|y| ones(y) % 2 == 0).count();
    computed.push(off_support as f64);
    let mut expected = vec![0.25; 4];
    expected.push(0.0);
    Ok(ClaimResult::evaluate(
        "card_deck_process",
        "each deck holds exactly one minority card, so every draw pays one \
         player and the long-run payoff is 1/4 each; empirical payoffs from \
         the seeded sampler, plus the count of even-parity outcomes observed",
        expected,
        computed,
        0.005,
    ))
}

/// Symmetric grid search over the four-player pure-state procedure reaches
/// the known payoff plateau at both grid resolutions.
pub fn claim_minority_p3_symmetric_optimum() -> Result<ClaimResult> {
    let mut attained = Vec::new();
    let mut computed = Vec::new();
    for (res, threshold) in [(13usize, 0.23f64), (25, 0.245)] {
        let params = CatalogParams {
            grid: (res, res, res),
            ..CatalogParams::default()
        };
        let (p, s) = catalog_with("minority_p3", &params)?;
        let g = induced_game(&p, &s)?;
        let report = grid_search_symmetric_max(&g)?;
        attained.push((res, report.value));
        computed.push((threshold - report.value).max(0.0));
    }
    let note = format!(
        "the symmetric optimum approaches 1/4 as the grid refines; shortfall \
         below the thresholds 0.23 and 0.245 must vanish. Attained: {:.5} on \
         the {}^3 grid, {:.5} on the {}^3 grid",
        attained[0].1, attained[0].0, attained[1].1, attained[1].0
    );
    Ok(ClaimResult::evaluate(
        "minority_p3_symmetric_optimum",
        note,
        vec![0.0, 0.0],
        computed,
        0.0,
    ))
}

fn rand_su2_params(rng: &mut ChaCha8Rng) -> Su2Params {
    Su2Params::new(
        rng.random::<f64>() * PI,
        rng.random::<f64>() * TAU,
        rng.random::<f64>() * TAU,
    )
    .expect("sampled angles are in range")
}

fn rand_gate(rng: &mut ChaCha8Rng) -> Strategy {
    let p = rand_su2_params(rng);
    Strategy::new(GateLabel::Su2(p).to_string(), su2(&p)).expect("su2 gates are unitary")
}

fn rand_product_unitary(rng: &mut ChaCha8Rng, n: usize) -> Result<CMatrix> {
    let factors: Vec<CMatrix> = (0..n).map(|_| su2(&rand_su2_params(rng))).collect();
    qmat::kron_all(&factors)
}

fn rand_pure_density(rng: &mut ChaCha8Rng, dim: usize) -> Result<CMatrix> {
    let mut entries: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut entries {
        *z /= norm;
    }
    Ok(CVector::new(entries)?.outer())
}

fn rand_procedure_and_profile(
    rng: &mut ChaCha8Rng,
) -> Result<(EwlProcedure, StrategyProfile)> {
    let n = rng.random_range(2..=4);
    let dim = 1usize << n;
    let p = EwlProcedure::new(
        n,
        rand_product_unitary(rng, n)?,
        rand_product_unitary(rng, n)?,
        rand_pure_density(rng, dim)?,
        StrategySpace::Grid(GridSpec::full(5, 5, 5)?),
    )?;
    let players = (0..n)
        .map(|_| PlayerStrategy::Single(rand_gate(rng)))
        .collect();
    Ok((p, StrategyProfile::new(players)?))
}

/// Four structural batteries, 100 seeded random cases each: distributions
/// normalize, a global strategy phase changes nothing, su2 gates have unit
/// determinant, and evolution preserves the trace. Each entry reports the
/// battery's worst violation as a fraction of its tolerance.
pub fn claim_structural_properties() -> Result<ClaimResult> {
    // Normalization at 1e-9.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_norm = 0.0f64;
    for _ in 0..100 {
        let (p, profile) = rand_procedure_and_profile(&mut rng)?;
        let dist = outcome_distribution(&p, &profile, None)?;
        worst_norm = worst_norm.max((dist.total() - 1.0).abs());
    }

    // Global phase invariance at 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_phase = 0.0f64;
    for _ in 0..100 {
        let (p, profile) = rand_procedure_and_profile(&mut rng)?;
        let delta = rng.random::<f64>() * TAU;
        let phase = Complex64::from_polar(1.0, delta);
        let original = profile.players()[0]
            .branches()
            .first()
            .expect("single strategies have one branch")
            .matrix()
            .clone();
        let phased = Strategy::new("phased", original.scale(phase))?;
        let shifted = profile.with_player(0, PlayerStrategy::Single(phased))?;
        let a = outcome_distribution(&p, &profile, None)?;
        let b = outcome_distribution(&p, &shifted, None)?;
        for y in all_bit_strings(p.players()) {
            worst_phase = worst_phase.max((a.mass(&y) - b.mass(&y)).abs());
        }
    }

    // su2 determinant at 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_det = 0.0f64;
    for _ in 0..100 {
        let m = su2(&rand_su2_params(&mut rng));
        let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
        worst_det = worst_det.max((det - Complex64::ONE).norm());
    }

    // Trace preservation at 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst_trace = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let dim = 1usize << n;
        let basis_change = rand_product_unitary(&mut rng, n)?;
        let mut weights: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let diag: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let rho = qmat::evolve(&CMatrix::from_diagonal(&diag)?, &basis_change)?;
        let u = rand_product_unitary(&mut rng, n)?;
        let evolved = qmat::evolve(&rho, &u)?;
        worst_trace = worst_trace.max((evolved.trace() - rho.trace()).norm());
    }

    let computed = vec![
        worst_norm / 1e-9,
        worst_phase / 1e-12,
        worst_det / 1e-12,
        worst_trace / 1e-12,
    ];
    Ok(ClaimResult::evaluate(
        "structural_properties",
        "worst violation over 100 seeded cases per battery, reported as a \
         fraction of the battery tolerance: normalization at 1e-9, global \
         phase invariance at 1e-12, su2 determinant at 1e-12, trace \
         preservation at 1e-12",
        vec![0.0, 0.0, 0.0, 0.0],
        computed,
        1.0,
    ))
}
