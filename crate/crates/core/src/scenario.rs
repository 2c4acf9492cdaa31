//! Static game scenarios: who plays, what they may announce, who gets paid.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qmat::all_bit_strings;

/// 2x2 payoff tables for both players, indexed by the joint output.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable2x2 {
    p1: [f64; 4],
    p2: [f64; 4],
}

impl PayoffTable2x2 {
    /// Entries are in output order (0,0), (0,1), (1,0), (1,1).
    pub fn new(p1: [f64; 4], p2: [f64; 4]) -> Result<Self> {
        for (who, table) in [("player1", &p1), ("player2", &p2)] {
            for (k, v) in table.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "{who} payoff at flat index {k} is not finite"
                    )));
                }
            }
        }
        Ok(PayoffTable2x2 { p1, p2 })
    }

    pub fn player1(&self, y1: u8, y2: u8) -> f64 {
        self.p1[(2 * y1 + y2) as usize]
    }

    pub fn player2(&self, y1: u8, y2: u8) -> f64 {
        self.p2[(2 * y1 + y2) as usize]
    }

    pub fn entries(&self) -> (&[f64; 4], &[f64; 4]) {
        (&self.p1, &self.p2)
    }
}

/// Standard prisoners-dilemma payoffs (reward 3, sucker 0, temptation 5, punishment 1).
pub fn default_pd_table() -> PayoffTable2x2 {
    PayoffTable2x2::new([3.0, 0.0, 5.0, 1.0], [3.0, 5.0, 0.0, 1.0]).expect("finite")
}

/// Standard coordination payoffs (favorite 2, other 1, miscoordination 0).
pub fn default_bos_table() -> PayoffTable2x2 {
    PayoffTable2x2::new([2.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 2.0]).expect("finite")
}

#[derive(Debug, Clone, PartialEq)]
enum PayoffRule {
    /// Unit payoff to every player whose output bit is in the strict minority.
    Minority,
    /// Two-player table lookup.
    Table(PayoffTable2x2),
    /// Three players win together iff twice the output sum matches the
    /// input sum modulo four.
    Modulo4,
    /// Arbitrary map from (input, output) to a payoff vector.
    Explicit(BTreeMap<(Vec<u8>, Vec<u8>), Vec<f64>>),
}

/// A static game: players, admissible inputs/outputs, and the payoff map.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    players: usize,
    /// Empty means the game has no inputs (payoff depends on outputs only).
    inputs: Vec<Vec<u8>>,
    outputs: Vec<Vec<u8>>,
    rule: PayoffRule,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn has_inputs(&self) -> bool {
        !self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<u8>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<u8>] {
        &self.outputs
    }

    /// The 2x2 payoff table, when this scenario is table-based.
    pub fn table(&self) -> Option<&PayoffTable2x2> {
        match &self.rule {
            PayoffRule::Table(t) => Some(t),
            _ => None,
        }
    }

    /// Explicit payoff map entries, when this scenario is map-based.
    pub fn explicit_payoffs(&self) -> Option<&BTreeMap<(Vec<u8>, Vec<u8>), Vec<f64>>> {
        match &self.rule {
            PayoffRule::Explicit(map) => Some(map),
            _ => None,
        }
    }

    /// Payoff vector for a joint input (if the game has inputs) and output.
    pub fn evaluate(&self, input: Option<&[u8]>, output: &[u8]) -> Result<Vec<f64>> {
        let input = match (self.has_inputs(), input) {
            (true, Some(x)) => {
                if !self.inputs.iter().any(|cand| cand == x) {
                    return Err(Error::InvalidParameter(format!(
                        "input {x:?} is not admissible in scenario `{}`",
                        self.name
                    )));
                }
                Some(x)
            }
            (false, None) => None,
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "scenario `{}` requires an input",
                    self.name
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!(
                    "scenario `{}` takes no input",
                    self.name
                )))
            }
        };
        if !self.outputs.iter().any(|cand| cand == output) {
            return Err(Error::InvalidParameter(format!(
                "output {output:?} is not admissible in scenario `{}`",
                self.name
            )));
        }
        Ok(match &self.rule {
            PayoffRule::Minority => {
                let ones = output.iter().filter(|&&b| b == 1).count();
                let half = self.players as f64 / 2.0;
                output
                    .iter()
                    .map(|&b| {
                        let share = if b == 1 { ones } else { self.players - ones };
                        if (share as f64) < half {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            PayoffRule::Table(t) => {
                vec![t.player1(output[0], output[1]), t.player2(output[0], output[1])]
            }
            PayoffRule::Modulo4 => {
                let x = input.expect("inputs checked above");
                let sx: i64 = x.iter().map(|&b| b as i64).sum();
                let sy: i64 = output.iter().map(|&b| b as i64).sum();
                let win = (2 * sy - sx).rem_euclid(4) == 0;
                vec![if win { 1.0 } else { 0.0 }; 3]
            }
            PayoffRule::Explicit(map) => {
                let key = (input.map(<[u8]>::to_vec).unwrap_or_default(), output.to_vec());
                map.get(&key)
                    .cloned()
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "no payoff recorded for input {:?}, output {:?}",
                            key.0, key.1
                        ))
                    })?
            }
        })
    }
}

/// No-input game where a strict minority share of the announced bit pays 1.
pub fn minority_scenario(n: usize) -> Result<Scenario> {
    if !(2..=5).contains(&n) {
        return Err(Error::Dimension(format!(
            "minority scenario needs 2 <= n <= 5 players, got {n}"
        )));
    }
    Ok(Scenario {
        name: format!("minority_{n}"),
        players: n,
        inputs: Vec::new(),
        outputs: all_bit_strings(n),
        rule: PayoffRule::Minority,
    })
}

fn check_table_symmetry(t: &PayoffTable2x2) -> Result<()> {
    for y1 in 0..2u8 {
        for y2 in 0..2u8 {
            if t.player2(y1, y2) != t.player1(y2, y1) {
                return Err(Error::Constraint(format!(
                    "$2({y1},{y2}) = $1({y2},{y1}) violated: {} != {}",
                    t.player2(y1, y2),
                    t.player1(y2, y1)
                )));
            }
        }
    }
    Ok(())
}

/// Two-player dilemma: defect tempts, mutual cooperation beats mutual
/// defection, and alternating exploitation cannot beat steady cooperation.
pub fn prisoners_dilemma_scenario(t: PayoffTable2x2) -> Result<Scenario> {
    check_table_symmetry(&t)?;
    let reward = t.player1(0, 0);
    let sucker = t.player1(0, 1);
    let temptation = t.player1(1, 0);
    let punishment = t.player1(1, 1);
    if !(temptation > reward) {
        return Err(Error::Constraint(format!(
            "$1(1,0) > $1(0,0) violated: {temptation} <= {reward}"
        )));
    }
    if !(reward > punishment) {
        return Err(Error::Constraint(format!(
            "$1(0,0) > $1(1,1) violated: {reward} <= {punishment}"
        )));
    }
    if !(punishment > sucker) {
        return Err(Error::Constraint(format!(
            "$1(1,1) > $1(0,1) violated: {punishment} <= {sucker}"
        )));
    }
    if !(reward >= (temptation + sucker) / 2.0) {
        return Err(Error::Constraint(format!(
            "$1(0,0) >= ($1(1,0) + $1(0,1))/2 violated: {reward} < {}",
            (temptation + sucker) / 2.0
        )));
    }
    Ok(Scenario {
        name: "prisoners_dilemma".into(),
        players: 2,
        inputs: Vec::new(),
        outputs: all_bit_strings(2),
        rule: PayoffRule::Table(t),
    })
}

/// Two-player coordination game with opposed favorite outcomes.
pub fn battle_sexes_scenario(t: PayoffTable2x2) -> Result<Scenario> {
    if t.player1(0, 0) != t.player2(1, 1) {
        return Err(Error::Constraint(format!(
            "$1(0,0) = $2(1,1) violated: {} != {}",
            t.player1(0, 0),
            t.player2(1, 1)
        )));
    }
    if t.player1(1, 1) != t.player2(0, 0) {
        return Err(Error::Constraint(format!(
            "$1(1,1) = $2(0,0) violated: {} != {}",
            t.player1(1, 1),
            t.player2(0, 0)
        )));
    }
    let off = t.player1(0, 1);
    for (name, v) in [
        ("$1(1,0)", t.player1(1, 0)),
        ("$2(0,1)", t.player2(0, 1)),
        ("$2(1,0)", t.player2(1, 0)),
    ] {
        if v != off {
            return Err(Error::Constraint(format!(
                "{name} = $1(0,1) violated: {v} != {off}"
            )));
        }
    }
    if !(t.player1(0, 0) > t.player1(1, 1)) {
        return Err(Error::Constraint(format!(
            "$1(0,0) > $1(1,1) violated: {} <= {}",
            t.player1(0, 0),
            t.player1(1, 1)
        )));
    }
    if !(t.player1(1, 1) > off) {
        return Err(Error::Constraint(format!(
            "$1(1,1) > $1(0,1) violated: {} <= {off}",
            t.player1(1, 1)
        )));
    }
    Ok(Scenario {
        name: "battle_sexes".into(),
        players: 2,
        inputs: Vec::new(),
        outputs: all_bit_strings(2),
        rule: PayoffRule::Table(t),
    })
}

/// Three players with even-parity inputs; everyone wins iff twice the output
/// sum equals the input sum modulo four.
pub fn modulo4_scenario() -> Scenario {
    Scenario {
        name: "modulo4".into(),
        players: 3,
        inputs: vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        outputs: all_bit_strings(3),
        rule: PayoffRule::Modulo4,
    }
}

/// Fully custom scenario given by an exhaustive payoff map.
///
/// `inputs` may be empty for a no-input game. Outputs always range over all
/// n-bit strings: a quantum procedure can place probability on any of them,
/// so partial output sets would leave payoffs undefined.
pub fn explicit_scenario(
    name: &str,
    players: usize,
    inputs: Vec<Vec<u8>>,
    payoffs: BTreeMap<(Vec<u8>, Vec<u8>), Vec<f64>>,
) -> Result<Scenario> {
    if !(2..=5).contains(&players) {
        return Err(Error::Dimension(format!(
            "explicit scenario needs 2 <= n <= 5 players, got {players}"
        )));
    }
    for x in &inputs {
        if x.len() != players || x.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "input {x:?} is not a {players}-bit string"
            )));
        }
    }
    for w in inputs.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter(
                "inputs must be strictly increasing in basis order".into(),
            ));
        }
    }
    let outputs = all_bit_strings(players);
    let input_keys: Vec<Vec<u8>> = if inputs.is_empty() {
        vec![Vec::new()]
    } else {
        inputs.clone()
    };
    let mut expected = 0usize;
    for x in &input_keys {
        for y in &outputs {
            let v = payoffs.get(&(x.clone(), y.clone())).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "missing payoff for input {x:?}, output {y:?}"
                ))
            })?;
            if v.len() != players {
                return Err(Error::InvalidParameter(format!(
                    "payoff vector for input {x:?}, output {y:?} has length {}, expected {players}",
                    v.len()
                )));
            }
            if v.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite payoff for input {x:?}, output {y:?}"
                )));
            }
            expected += 1;
        }
    }
    if payoffs.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "payoff map has {} entries beyond the {} admissible pairs",
            payoffs.len() - expected,
            expected
        )));
    }
    Ok(Scenario {
        name: name.to_string(),
        players,
        inputs,
        outputs,
        rule: PayoffRule::Explicit(payoffs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minority_pays_strict_minorities_only() {
        let s = minority_scenario(4).unwrap();
        assert_eq!(s.evaluate(None, &[0, 0, 0, 1]).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.evaluate(None, &[1, 0, 1, 1]).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        // An even split pays nobody.
        assert_eq!(s.evaluate(None, &[0, 0, 1, 1]).unwrap(), vec![0.0; 4]);
        assert_eq!(s.evaluate(None, &[0, 0, 0, 0]).unwrap(), vec![0.0; 4]);

        let s3 = minority_scenario(3).unwrap();
        assert_eq!(s3.evaluate(None, &[0, 1, 1]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn minority_rejects_out_of_range_player_counts() {
        assert!(minority_scenario(1).is_err());
        assert!(minority_scenario(6).is_err());
    }

    #[test]
    fn dilemma_accepts_the_default_table_and_names_violations() {
        assert!(prisoners_dilemma_scenario(default_pd_table()).is_ok());

        // Reward below punishment breaks the ordering chain.
        let bad = PayoffTable2x2::new([1.0, 0.0, 5.0, 3.0], [1.0, 5.0, 0.0, 3.0]).unwrap();
        match prisoners_dilemma_scenario(bad) {
            Err(Error::Constraint(msg)) => assert!(msg.contains("$1(0,0) > $1(1,1)"), "{msg}"),
            other => panic!("expected a constraint error, got {other:?}"),
        }

        // Averaging constraint: reward 2 < (5 + 0)/2.
        let bad = PayoffTable2x2::new([2.0, 0.0, 5.0, 1.0], [2.0, 5.0, 0.0, 1.0]).unwrap();
        match prisoners_dilemma_scenario(bad) {
            Err(Error::Constraint(msg)) => {
                assert!(msg.contains(">= ($1(1,0) + $1(0,1))/2"), "{msg}")
            }
            other => panic!("expected a constraint error, got {other:?}"),
        }
    }

    #[test]
    fn coordination_game_validates_mirrored_diagonals() {
        assert!(battle_sexes_scenario(default_bos_table()).is_ok());

        let bad = PayoffTable2x2::new([2.0, 0.0, 0.0, 1.0], [2.0, 0.0, 0.0, 1.0]).unwrap();
        match battle_sexes_scenario(bad) {
            Err(Error::Constraint(msg)) => assert!(msg.contains("$1(0,0) = $2(1,1)"), "{msg}"),
            other => panic!("expected a constraint error, got {other:?}"),
        }
    }

    #[test]
    fn modulo4_pays_all_or_nothing_by_the_residue_rule() {
        let s = modulo4_scenario();
        assert_eq!(s.inputs().len(), 4);
        // Input sum 2, output sum 1: residue 0, everyone wins.
        assert_eq!(s.evaluate(Some(&[0, 1, 1]), &[1, 0, 0]).unwrap(), vec![1.0; 3]);
        // Input sum 2, output sum 0: residue 2, everyone loses.
        assert_eq!(s.evaluate(Some(&[0, 1, 1]), &[0, 0, 0]).unwrap(), vec![0.0; 3]);
        // Input sum 0 pays even output sums.
        assert_eq!(s.evaluate(Some(&[0, 0, 0]), &[1, 1, 0]).unwrap(), vec![1.0; 3]);

        assert!(s.evaluate(None, &[0, 0, 0]).is_err(), "input required");
        assert!(s.evaluate(Some(&[1, 0, 0]), &[0, 0, 0]).is_err(), "odd-parity input");
    }

    #[test]
    fn explicit_scenario_demands_exhaustive_payoffs() {
        let mut payoffs = BTreeMap::new();
        for y in all_bit_strings(2) {
            payoffs.insert((Vec::new(), y.clone()), vec![1.0, 2.0]);
        }
        assert!(explicit_scenario("custom", 2, Vec::new(), payoffs.clone()).is_ok());

        payoffs.remove(&(Vec::new(), vec![1, 1]));
        assert!(explicit_scenario("custom", 2, Vec::new(), payoffs).is_err());
    }
}
