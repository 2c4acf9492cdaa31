//! Equilibrium and optimality analysis over induced games, plus the
//! classical baselines those analyses are compared against.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ewl::{InducedGame, OutcomeDistribution, PlayerStrategy, StrategyProfile};
use crate::scenario::Scenario;

/// Default cap on exhaustive profile enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A pure profile where no player can gain more than `epsilon` by deviating.
#[derive(Debug, Clone)]
pub struct NashReport {
    /// Canonical move index per player.
    pub move_indices: Vec<usize>,
    /// Move labels, one per player.
    pub labels: Vec<String>,
    pub profile: StrategyProfile,
    pub payoffs: Vec<f64>,
    /// Largest payoff any single player could still gain by deviating.
    pub epsilon: f64,
}

/// Best deterministic classical play and its guaranteed value.
#[derive(Debug, Clone)]
pub struct ClassicalBoundReport {
    /// Per-player response function as [output on input 0, output on input 1].
    pub best_profile: Vec<[u8; 2]>,
    /// Maximum over deterministic profiles of player 1's payoff component,
    /// averaged uniformly over inputs.
    pub value: f64,
}

/// Symmetric profile maximizing the minimum payoff component.
#[derive(Debug, Clone)]
pub struct SymmetricMaxReport {
    pub move_index: usize,
    pub label: String,
    pub strategy: PlayerStrategy,
    /// Minimum payoff component at the maximizing symmetric profile.
    pub value: f64,
    pub payoffs: Vec<f64>,
    /// Best-response gap at the optimum (0 means it is a pure Nash point).
    pub epsilon: f64,
}

/// The move maximizing `player`'s payoff against the rest of `profile`,
/// with the resulting payoff. Ties resolve to the lowest move index.
pub fn best_response(
    g: &InducedGame,
    player: usize,
    profile: &StrategyProfile,
) -> Result<(PlayerStrategy, f64)> {
    if player >= g.players() {
        return Err(Error::Profile(format!(
            "player index {player} outside {} players",
            g.players()
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for idx in 0..g.move_count() {
        let candidate = profile.with_player(player, g.move_at(idx)?)?;
        let value = g.payoffs(&candidate)?[player];
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((idx, value));
        }
    }
    let (idx, value) = best.expect("strategy spaces are nonempty");
    Ok((g.move_at(idx)?, value))
}

/// Exhaustive pure-Nash search with the default evaluation budget.
pub fn find_pure_nash(g: &InducedGame, epsilon: f64) -> Result<Vec<NashReport>> {
    find_pure_nash_with_budget(g, epsilon, DEFAULT_BUDGET)
}

/// Exhaustive pure-Nash search.
///
/// Enumerates every profile, so the profile count must not exceed `budget`.
/// Reports come back in ascending lexicographic profile order; each report's
/// `epsilon` is the profile's actual worst-case deviation gain, which is at
/// most the `epsilon` threshold passed in.
pub fn find_pure_nash_with_budget(
    g: &InducedGame,
    epsilon: f64,
    budget: u64,
) -> Result<Vec<NashReport>> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be finite and nonnegative, got {epsilon}"
        )));
    }
    let n = g.players();
    let m = g.move_count();
    let total_wide = g.profile_count();
    if total_wide > budget as u128 {
        return Err(Error::BudgetExceeded {
            size: total_wide,
            budget,
        });
    }
    let total = total_wide as usize;

    // Pass 1: payoff tensor, profiles enumerated player-0-major.
    let mut tensor = vec![0.0f64; total * n];
    let mut indices = vec![0usize; n];
    for flat in 0..total {
        let payoffs = g.payoffs_at(&indices)?;
        tensor[flat * n..flat * n + n].copy_from_slice(&payoffs);
        advance(&mut indices, m);
    }

    // Pass 2: per-player maxima over that player's move axis.
    let base_size = total / m;
    let mut best = vec![vec![f64::NEG_INFINITY; base_size]; n];
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * m;
    }
    for flat in 0..total {
        for i in 0..n {
            let rebase = (flat / (strides[i] * m)) * strides[i] + flat % strides[i];
            let v = tensor[flat * n + i];
            if v > best[i][rebase] {
                best[i][rebase] = v;
            }
        }
    }

    // Pass 3: keep profiles whose worst deviation gain is within epsilon.
    let mut reports = Vec::new();
    let mut indices = vec![0usize; n];
    for flat in 0..total {
        let mut gap = 0.0f64;
        for i in 0..n {
            let rebase = (flat / (strides[i] * m)) * strides[i] + flat % strides[i];
            gap = gap.max(best[i][rebase] - tensor[flat * n + i]);
        }
        if gap <= epsilon {
            let labels = indices
                .iter()
                .map(|&idx| g.move_label(idx))
                .collect::<Result<Vec<_>>>()?;
            reports.push(NashReport {
                move_indices: indices.clone(),
                labels,
                profile: g.profile_at(&indices)?,
                payoffs: tensor[flat * n..flat * n + n].to_vec(),
                epsilon: gap,
            });
        }
        advance(&mut indices, m);
    }
    Ok(reports)
}

/// Increments a mixed-radix counter whose last digit moves fastest.
fn advance(indices: &mut [usize], radix: usize) {
    for d in indices.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
}

/// Whether no candidate profile weakly improves every payoff and strictly
/// improves at least one.
pub fn is_pareto_optimal(
    g: &InducedGame,
    profile: &StrategyProfile,
    candidates: &[StrategyProfile],
) -> Result<bool> {
    let base = g.payoffs(profile)?;
    for cand in candidates {
        let p = g.payoffs(cand)?;
        let weakly_better = p.iter().zip(&base).all(|(a, b)| a >= b);
        let strictly_better = p.iter().zip(&base).any(|(a, b)| a > b);
        if weakly_better && strictly_better {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pareto check of `profile` against every pure profile of the induced
/// game, enumerated lazily within `budget` payoff evaluations.
pub fn is_pareto_optimal_exhaustive(
    g: &InducedGame,
    profile: &StrategyProfile,
    budget: u64,
) -> Result<bool> {
    let total = g.profile_count();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            size: total,
            budget,
        });
    }
    let base = g.payoffs(profile)?;
    let m = g.move_count();
    let mut indices = vec![0usize; g.players()];
    for _ in 0..total {
        let p = g.payoffs_at(&indices)?;
        let weakly_better = p.iter().zip(&base).all(|(a, b)| a >= b);
        let strictly_better = p.iter().zip(&base).any(|(a, b)| a > b);
        if weakly_better && strictly_better {
            return Ok(false);
        }
        advance(&mut indices, m);
    }
    Ok(true)
}

/// Best value achievable with deterministic classical responses, using the
/// default budget.
pub fn classical_deterministic_bound(s: &Scenario) -> Result<ClassicalBoundReport> {
    classical_deterministic_bound_with_budget(s, DEFAULT_BUDGET)
}

/// Exhausts all 4^n deterministic response functions (each player maps an
/// input bit to an output bit) and returns the profile maximizing player 1's
/// payoff component averaged uniformly over inputs. The scenarios with
/// inputs in this crate pay every player identically on every outcome, so
/// the component choice does not matter for them.
///
/// Shared randomness cannot beat this bound: a randomized profile's value is
/// an average over deterministic profiles, so it is at most the maximum.
pub fn classical_deterministic_bound_with_budget(
    s: &Scenario,
    budget: u64,
) -> Result<ClassicalBoundReport> {
    if !s.has_inputs() {
        return Err(Error::InvalidParameter(format!(
            "scenario `{}` has no inputs, so the deterministic bound is undefined",
            s.name()
        )));
    }
    let n = s.players();
    let total_wide = 4u128.pow(n as u32);
    if total_wide > budget as u128 {
        return Err(Error::BudgetExceeded {
            size: total_wide,
            budget,
        });
    }
    let total = total_wide as usize;

    let mut best_value = f64::NEG_INFINITY;
    let mut best_assignment = 0usize;
    for assignment in 0..total {
        // Function index per player: bit 1 is the response to input 0,
        // bit 0 the response to input 1.
        let mut sum = 0.0;
        for x in s.inputs() {
            let y: Vec<u8> = (0..n)
                .map(|i| {
                    let d = (assignment / 4usize.pow((n - 1 - i) as u32)) % 4;
                    if x[i] == 0 {
                        ((d >> 1) & 1) as u8
                    } else {
                        (d & 1) as u8
                    }
                })
                .collect();
            sum += s.evaluate(Some(x), &y)?[0];
        }
        let value = sum / s.inputs().len() as f64;
        if value > best_value {
            best_value = value;
            best_assignment = assignment;
        }
    }

    let best_profile = (0..n)
        .map(|i| {
            let d = (best_assignment / 4usize.pow((n - 1 - i) as u32)) % 4;
            [((d >> 1) & 1) as u8, (d & 1) as u8]
        })
        .collect();
    Ok(ClassicalBoundReport {
        best_profile,
        value: best_value,
    })
}

/// Empirical outcome distribution of the two-deck card process: each round
/// picks one of the decks {0,0,0,1} and {1,1,1,0} at random, shuffles it,
/// and deals one card per player.
pub fn card_deck_sampler(samples: u64, seed: u64) -> Result<OutcomeDistribution> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "the card process needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for _ in 0..samples {
        let mut deck: [u8; 4] = if rng.random_range(0..2u8) == 0 {
            [0, 0, 0, 1]
        } else {
            [1, 1, 1, 0]
        };
        // Fisher-Yates; each permutation equally likely.
        for i in (1..4).rev() {
            let j = rng.random_range(0..=i);
            deck.swap(i, j);
        }
        *counts.entry(deck.to_vec()).or_insert(0) += 1;
    }
    let masses = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / samples as f64))
        .collect();
    OutcomeDistribution::new(masses)
}

/// Scans symmetric profiles (every player plays the same move) and returns
/// the one maximizing the minimum payoff component, together with its
/// best-response gap. Ties resolve to the lowest move index.
pub fn grid_search_symmetric_max(g: &InducedGame) -> Result<SymmetricMaxReport> {
    grid_search_symmetric_max_with_budget(g, DEFAULT_BUDGET)
}

pub fn grid_search_symmetric_max_with_budget(
    g: &InducedGame,
    budget: u64,
) -> Result<SymmetricMaxReport> {
    let m = g.move_count();
    if m as u128 > budget as u128 {
        return Err(Error::BudgetExceeded {
            size: m as u128,
            budget,
        });
    }
    let n = g.players();
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for idx in 0..m {
        let payoffs = g.payoffs_at(&vec![idx; n])?;
        let value = payoffs.iter().copied().fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(_, b, _)| value > *b) {
            best = Some((idx, value, payoffs));
        }
    }
    let (idx, value, payoffs) = best.expect("strategy spaces are nonempty");
    let profile = g.profile_at(&vec![idx; n])?;
    let mut epsilon = 0.0f64;
    for player in 0..n {
        let (_, br_value) = best_response(g, player, &profile)?;
        epsilon = epsilon.max(br_value - payoffs[player]);
    }
    Ok(SymmetricMaxReport {
        move_index: idx,
        label: g.move_label(idx)?,
        strategy: g.move_at(idx)?,
        value,
        payoffs,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewl::{catalog, induced_game};
    use crate::scenario::{
        default_pd_table, modulo4_scenario, prisoners_dilemma_scenario,
    };

    #[test]
    fn classical_coordination_game_has_the_two_matching_equilibria() {
        let (p, s) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let reports = find_pure_nash(&g, 0.0).unwrap();
        let profiles: Vec<Vec<usize>> = reports.iter().map(|r| r.move_indices.clone()).collect();
        assert_eq!(profiles, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(reports[0].payoffs, vec![2.0, 1.0]);
        assert_eq!(reports[1].payoffs, vec![1.0, 2.0]);
        assert_eq!(reports[0].epsilon, 0.0);
    }

    #[test]
    fn reported_epsilon_matches_a_recomputed_deviation_gap() {
        let (p, s) = catalog("bos_p3").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let reports = find_pure_nash(&g, 0.5).unwrap();
        assert!(!reports.is_empty());
        for r in &reports {
            let base = g.payoffs_at(&r.move_indices).unwrap();
            assert_eq!(base, r.payoffs);
            let mut gap = 0.0f64;
            for player in 0..g.players() {
                for alt in 0..g.move_count() {
                    let mut idx = r.move_indices.clone();
                    idx[player] = alt;
                    let v = g.payoffs_at(&idx).unwrap();
                    gap = gap.max(v[player] - base[player]);
                }
            }
            assert!((gap - r.epsilon).abs() <= 1e-12, "{gap} vs {}", r.epsilon);
        }
    }

    #[test]
    fn classical_dilemma_has_only_mutual_defection() {
        let s = prisoners_dilemma_scenario(default_pd_table()).unwrap();
        let (p, _) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let reports = find_pure_nash(&g, 0.0).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].move_indices, vec![1, 1]);
        assert_eq!(reports[0].payoffs, vec![1.0, 1.0]);

        // Mutual defection is dominated by mutual cooperation.
        let all: Vec<_> = (0..2)
            .flat_map(|a| (0..2).map(move |b| vec![a, b]))
            .map(|idx| g.profile_at(&idx).unwrap())
            .collect();
        assert!(!is_pareto_optimal(&g, &reports[0].profile, &all).unwrap());
        assert!(is_pareto_optimal(&g, &all[0], &all).unwrap());
    }

    #[test]
    fn best_response_to_a_coordinating_partner_is_to_coordinate() {
        let (p, s) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let profile = g.profile_at(&[1, 1]).unwrap();
        let (reply, value) = best_response(&g, 0, &profile).unwrap();
        assert_eq!(reply.label(), "pauli_x");
        assert_eq!(value, 1.0);
    }

    #[test]
    fn nash_search_respects_the_budget() {
        let (p, s) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        assert!(matches!(
            find_pure_nash_with_budget(&g, 0.0, 3),
            Err(Error::BudgetExceeded { size: 4, budget: 3 })
        ));
        assert!(find_pure_nash_with_budget(&g, -0.5, 100).is_err());
    }

    #[test]
    fn deterministic_bound_for_the_residue_game_is_three_quarters() {
        let report = classical_deterministic_bound(&modulo4_scenario()).unwrap();
        assert_eq!(report.value, 0.75);
        assert_eq!(report.best_profile.len(), 3);
    }

    #[test]
    fn deterministic_bound_requires_inputs() {
        let (_, s) = catalog("bos_p1").unwrap();
        assert!(classical_deterministic_bound(&s).is_err());
    }

    #[test]
    fn deterministic_bound_on_constant_scenarios_is_the_constant() {
        use crate::qmat::all_bit_strings;
        use crate::scenario::explicit_scenario;
        use std::collections::BTreeMap;

        let inputs = all_bit_strings(2);
        for constant in [1.0, 0.0] {
            let mut payoffs = BTreeMap::new();
            for x in &inputs {
                for y in all_bit_strings(2) {
                    payoffs.insert((x.clone(), y), vec![constant; 2]);
                }
            }
            let s = explicit_scenario("constant", 2, inputs.clone(), payoffs).unwrap();
            let report = classical_deterministic_bound(&s).unwrap();
            assert_eq!(report.value, constant);
        }
    }

    #[test]
    fn defection_is_the_dominant_reply_in_the_dilemma() {
        let s = prisoners_dilemma_scenario(default_pd_table()).unwrap();
        let (p, _) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let profile = g.profile_at(&[0, 0]).unwrap();
        let (reply, value) = best_response(&g, 0, &profile).unwrap();
        assert_eq!(reply.label(), "pauli_x");
        assert_eq!(value, 5.0);
    }

    #[test]
    fn symmetric_scan_of_classical_minority_play_never_pays() {
        let (p, s) = catalog("minority_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let report = grid_search_symmetric_max(&g).unwrap();
        assert_eq!(report.value, 0.0);
    }

    #[test]
    fn card_process_is_seeded_and_supported_on_odd_parity() {
        let a = card_deck_sampler(2000, 7).unwrap();
        let b = card_deck_sampler(2000, 7).unwrap();
        assert_eq!(a, b, "same seed must reproduce the same distribution");
        let c = card_deck_sampler(2000, 8).unwrap();
        assert_ne!(a, c, "different seeds should differ at this sample size");
        for bits in a.support() {
            let ones = bits.iter().filter(|&&x| x == 1).count();
            assert!(ones == 1 || ones == 3, "outcome {bits:?} off support");
        }
        assert!((a.total() - 1.0).abs() < 1e-12);
        assert!(card_deck_sampler(0, 1).is_err());
    }

    #[test]
    fn symmetric_scan_of_the_classical_coordination_game() {
        let (p, s) = catalog("bos_p1").unwrap();
        let g = induced_game(&p, &s).unwrap();
        let report = grid_search_symmetric_max(&g).unwrap();
        // Symmetric profiles are (identity, identity) with min payoff 1 and
        // (flip, flip) with min payoff 1; the tie resolves to the first.
        assert_eq!(report.move_index, 0);
        assert_eq!(report.value, 1.0);
        assert_eq!(report.epsilon, 0.0);
    }
}
