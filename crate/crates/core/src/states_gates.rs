//! Single-qubit strategy gates, the two-qubit entangler, and initial states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{kron_all, CMatrix, CVector};

const TAU: f64 = 2.0 * PI;

/// Euler-style parameters for a special-unitary 2x2 gate.
///
/// `theta` lies in `[0, pi]`; `phi` and `chi` lie in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Params {
    theta: f64,
    phi: f64,
    chi: f64,
}

impl Su2Params {
    pub fn new(theta: f64, phi: f64, chi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !phi.is_finite() || !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi = {phi} outside [0, 2pi)"
            )));
        }
        if !chi.is_finite() || !(0.0..TAU).contains(&chi) {
            return Err(Error::InvalidParameter(format!(
                "chi = {chi} outside [0, 2pi)"
            )));
        }
        Ok(Su2Params { theta, phi, chi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }
}

/// Names for the gates the toolkit knows how to build.
#[derive(Debug, Clone, PartialEq)]
pub enum GateLabel {
    Identity,
    PauliX,
    PauliY,
    PauliZ,
    Hadamard,
    /// Hadamard composed with the S-adjoint phase, `H * diag(1, -i)`.
    SDaggerHadamard,
    Su2(Su2Params),
    /// Two-qubit entangler with coupling `gamma` in `[0, pi/2]`.
    EwlJ(f64),
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateLabel::Identity => write!(f, "identity"),
            GateLabel::PauliX => write!(f, "pauli_x"),
            GateLabel::PauliY => write!(f, "pauli_y"),
            GateLabel::PauliZ => write!(f, "pauli_z"),
            GateLabel::Hadamard => write!(f, "hadamard"),
            GateLabel::SDaggerHadamard => write!(f, "s_dagger_hadamard"),
            GateLabel::Su2(p) => write!(f, "su2({:.6},{:.6},{:.6})", p.theta, p.phi, p.chi),
            GateLabel::EwlJ(g) => write!(f, "ewl_j({g:.6})"),
        }
    }
}

impl FromStr for GateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" => return Ok(GateLabel::Identity),
            "pauli_x" => return Ok(GateLabel::PauliX),
            "pauli_y" => return Ok(GateLabel::PauliY),
            "pauli_z" => return Ok(GateLabel::PauliZ),
            "hadamard" => return Ok(GateLabel::Hadamard),
            "s_dagger_hadamard" => return Ok(GateLabel::SDaggerHadamard),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("su2(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::UnknownName(format!(
                    "su2 gate needs three comma-separated angles, got `{s}`"
                )));
            }
            let mut vals = [0.0f64; 3];
            for (slot, part) in vals.iter_mut().zip(&parts) {
                *slot = part.trim().parse::<f64>().map_err(|_| {
                    Error::UnknownName(format!("cannot parse angle `{part}` in `{s}`"))
                })?;
            }
            return Ok(GateLabel::Su2(Su2Params::new(vals[0], vals[1], vals[2])?));
        }
        if let Some(body) = s.strip_prefix("ewl_j(").and_then(|r| r.strip_suffix(')')) {
            let g = body.trim().parse::<f64>().map_err(|_| {
                Error::UnknownName(format!("cannot parse coupling `{body}` in `{s}`"))
            })?;
            return Ok(GateLabel::EwlJ(g));
        }
        Err(Error::UnknownName(format!("no gate named `{s}`")))
    }
}

/// The 2x2 gate for the given parameters:
/// `[[e^{i phi} cos(theta/2), e^{i chi} sin(theta/2)],
///   [-e^{-i chi} sin(theta/2), e^{-i phi} cos(theta/2)]]`.
pub fn su2(p: &Su2Params) -> CMatrix {
    let half = p.theta / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let eiphi = Complex64::from_polar(1.0, p.phi);
    let eichi = Complex64::from_polar(1.0, p.chi);
    CMatrix::new(
        2,
        2,
        vec![
            eiphi * c,
            eichi * s,
            -eichi.conj() * s,
            eiphi.conj() * c,
        ],
    )
    .expect("su2 entries are finite")
}

/// Builds the matrix for a gate label.
pub fn named_gate(g: &GateLabel) -> Result<CMatrix> {
    let one = Complex64::ONE;
    let zero = Complex64::ZERO;
    let i = Complex64::I;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match g {
        GateLabel::Identity => Ok(CMatrix::identity(2)),
        GateLabel::PauliX => CMatrix::new(2, 2, vec![zero, one, one, zero]),
        GateLabel::PauliY => CMatrix::new(2, 2, vec![zero, -i, i, zero]),
        GateLabel::PauliZ => CMatrix::new(2, 2, vec![one, zero, zero, -one]),
        GateLabel::Hadamard => CMatrix::new(2, 2, vec![h, h, h, -h]),
        GateLabel::SDaggerHadamard => CMatrix::new(2, 2, vec![h, -i * h, h, i * h]),
        GateLabel::Su2(p) => Ok(su2(p)),
        GateLabel::EwlJ(gamma) => ewl_j(*gamma),
    }
}

/// Two-qubit entangler `cos(gamma) I + i sin(gamma) (sigma_y (x) sigma_y)`.
pub fn ewl_j(gamma: f64) -> Result<CMatrix> {
    if !gamma.is_finite() || !(0.0..=PI / 2.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "entangler coupling gamma = {gamma} outside [0, pi/2]"
        )));
    }
    let c = Complex64::new(gamma.cos(), 0.0);
    let is = Complex64::new(0.0, gamma.sin());
    let z = Complex64::ZERO;
    // sigma_y (x) sigma_y has -1 on the anti-diagonal corners and +1 inside.
    CMatrix::new(
        4,
        4,
        vec![
            c, z, z, -is, //
            z, c, is, z, //
            z, is, c, z, //
            -is, z, z, c,
        ],
    )
}

/// The n-qubit state `(|0...0> + |1...1>)/sqrt(2)` for `2 <= n <= 5`.
pub fn ghz_state(n: usize) -> Result<CVector> {
    if !(2..=5).contains(&n) {
        return Err(Error::Dimension(format!(
            "ghz_state needs 2 <= n <= 5 qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut data = vec![Complex64::ZERO; dim];
    let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
    data[0] = amp;
    data[dim - 1] = amp;
    CVector::new(data)
}

/// Four-qubit mixture that is uniform over the odd-parity basis states.
pub fn minority_rho_in() -> CMatrix {
    let mut diag = vec![Complex64::ZERO; 16];
    for (idx, slot) in diag.iter_mut().enumerate() {
        if (idx as u32).count_ones() % 2 == 1 {
            *slot = Complex64::new(0.125, 0.0);
        }
    }
    CMatrix::from_diagonal(&diag).expect("entries are finite")
}

/// Four-qubit interpolation between a GHZ pair and the alternating
/// weight-two subspace: amplitude `alpha/sqrt(2)` on |0000> and |1111>,
/// `sqrt(1-alpha^2)/2` on |0101>, |0110>, |1001>, |1010>.
pub fn fsslh_psi_in(alpha: f64) -> Result<CVector> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1]"
        )));
    }
    let mut data = vec![Complex64::ZERO; 16];
    let outer = Complex64::new(alpha * FRAC_1_SQRT_2, 0.0);
    let inner = Complex64::new((1.0 - alpha * alpha).max(0.0).sqrt() / 2.0, 0.0);
    data[0b0000] = outer;
    data[0b1111] = outer;
    for idx in [0b0101, 0b0110, 0b1001, 0b1010] {
        data[idx] = inner;
    }
    CVector::new(data)
}

/// Two-qubit diagonal state `diag((1-e1-e2)/2, e1, e2, (1-e1-e2)/2)`;
/// requires `e1 != e2` so the state is not symmetric under player swap.
pub fn f09_rho(eps1: f64, eps2: f64) -> Result<CMatrix> {
    for (name, v) in [("eps1", eps1), ("eps2", eps2)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {v} outside [0, 1]"
            )));
        }
    }
    if eps1 + eps2 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps1 + eps2 = {} exceeds 1",
            eps1 + eps2
        )));
    }
    if eps1 == eps2 {
        return Err(Error::InvalidParameter(
            "eps1 and eps2 must differ to break the player symmetry".into(),
        ));
    }
    let corner = Complex64::new((1.0 - eps1 - eps2) / 2.0, 0.0);
    CMatrix::from_diagonal(&[
        corner,
        Complex64::new(eps1, 0.0),
        Complex64::new(eps2, 0.0),
        corner,
    ])
}

/// Single-qubit measurement projector `|b><b|`.
pub fn basis_projector(bit: u8) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(bit as usize, bit as usize, Complex64::ONE);
    m
}

/// Tensor product of per-player basis projectors for an outcome string.
pub fn outcome_projector(bits: &[u8]) -> Result<CMatrix> {
    let factors: Vec<CMatrix> = bits.iter().map(|&b| basis_projector(b)).collect();
    kron_all(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{conjugate_transpose, is_density_matrix, EXACT_TOL, STRUCTURAL_TOL};

    fn det2(m: &CMatrix) -> Complex64 {
        m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)
    }

    #[test]
    fn su2_params_reject_out_of_range_angles() {
        assert!(Su2Params::new(-0.1, 0.0, 0.0).is_err());
        assert!(Su2Params::new(PI + 0.1, 0.0, 0.0).is_err());
        assert!(Su2Params::new(0.0, TAU, 0.0).is_err());
        assert!(Su2Params::new(0.0, 0.0, -1.0).is_err());
        assert!(Su2Params::new(PI, 0.0, 0.0).is_ok());
    }

    #[test]
    fn su2_at_origin_is_identity_and_at_theta_pi_is_a_swap() {
        let id = su2(&Su2Params::new(0.0, 0.0, 0.0).unwrap());
        assert!(id.max_abs_diff(&CMatrix::identity(2)) <= EXACT_TOL);

        let flip = su2(&Su2Params::new(PI, 0.0, 0.0).unwrap());
        let expected = CMatrix::new(
            2,
            2,
            vec![
                Complex64::ZERO,
                Complex64::ONE,
                -Complex64::ONE,
                Complex64::ZERO,
            ],
        )
        .unwrap();
        assert!(flip.max_abs_diff(&expected) <= EXACT_TOL);

        let generic = su2(&Su2Params::new(1.1, 2.2, 3.3).unwrap());
        assert!((det2(&generic) - Complex64::ONE).norm() <= EXACT_TOL);
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in [
            GateLabel::Identity,
            GateLabel::PauliX,
            GateLabel::PauliY,
            GateLabel::PauliZ,
            GateLabel::Hadamard,
            GateLabel::SDaggerHadamard,
            GateLabel::Su2(Su2Params::new(1.1, 2.2, 3.3).unwrap()),
            GateLabel::EwlJ(0.7),
        ] {
            let m = named_gate(&g).unwrap();
            assert!(m.is_unitary(STRUCTURAL_TOL), "{g} is not unitary");
        }
    }

    #[test]
    fn s_dagger_hadamard_conjugates_z_to_pauli_y() {
        let u = named_gate(&GateLabel::SDaggerHadamard).unwrap();
        let z = named_gate(&GateLabel::PauliZ).unwrap();
        let y = named_gate(&GateLabel::PauliY).unwrap();
        let conj = conjugate_transpose(&u).mul(&z).unwrap().mul(&u).unwrap();
        assert!(conj.max_abs_diff(&y) <= EXACT_TOL);
    }

    #[test]
    fn entangler_matches_its_matrix_exponential() {
        // Oracle: exp(i gamma sigma_y (x) sigma_y) via plain Taylor series.
        let y = named_gate(&GateLabel::PauliY).unwrap();
        let yy = crate::qmat::kron(&y, &y).unwrap();
        for &gamma in &[0.0, 0.3, 1.0, PI / 2.0] {
            let mut term = CMatrix::identity(4);
            let mut acc = CMatrix::identity(4);
            let step = yy.scale(Complex64::new(0.0, gamma));
            for k in 1..40 {
                term = term.mul(&step).unwrap().scale(Complex64::new(1.0 / k as f64, 0.0));
                acc = acc.add(&term).unwrap();
            }
            let j = ewl_j(gamma).unwrap();
            assert!(
                j.max_abs_diff(&acc) <= EXACT_TOL,
                "closed form diverges from series at gamma = {gamma}"
            );
        }
    }

    #[test]
    fn entangler_rejects_out_of_range_coupling() {
        assert!(ewl_j(-0.1).is_err());
        assert!(ewl_j(PI).is_err());
        assert!(ewl_j(PI / 2.0).is_ok());
    }

    #[test]
    fn ghz_state_has_two_equal_amplitudes_and_unit_norm() {
        for n in 2..=5 {
            let v = ghz_state(n).unwrap();
            assert_eq!(v.dim(), 1 << n);
            assert!((v.norm() - 1.0).abs() <= EXACT_TOL);
            assert!((v.get(0).re - FRAC_1_SQRT_2).abs() <= EXACT_TOL);
            assert!((v.get((1 << n) - 1).re - FRAC_1_SQRT_2).abs() <= EXACT_TOL);
            let middle: f64 = (1..(1 << n) - 1).map(|i| v.get(i).norm()).sum();
            assert_eq!(middle, 0.0);
        }
        assert!(ghz_state(1).is_err());
        assert!(ghz_state(6).is_err());
    }

    #[test]
    fn minority_mixture_is_uniform_over_odd_parity() {
        let rho = minority_rho_in();
        assert!(is_density_matrix(&rho, EXACT_TOL));
        for idx in 0..16usize {
            let expected = if (idx as u32).count_ones() % 2 == 1 {
                0.125
            } else {
                0.0
            };
            assert_eq!(rho.get(idx, idx).re, expected, "diagonal entry {idx}");
        }
    }

    #[test]
    fn fsslh_state_is_normalized_across_alpha() {
        for &alpha in &[0.0, 0.25, 0.6, 1.0] {
            let v = fsslh_psi_in(alpha).unwrap();
            assert!((v.norm() - 1.0).abs() <= EXACT_TOL, "alpha = {alpha}");
        }
        // alpha = 1 collapses to the four-qubit GHZ pair.
        let v = fsslh_psi_in(1.0).unwrap();
        let g = ghz_state(4).unwrap();
        assert!(v.outer().max_abs_diff(&g.outer()) <= EXACT_TOL);
        assert!(fsslh_psi_in(1.5).is_err());
        assert!(fsslh_psi_in(-0.1).is_err());
    }

    #[test]
    fn f09_state_validates_its_parameters() {
        let rho = f09_rho(0.1, 0.3).unwrap();
        assert!(is_density_matrix(&rho, EXACT_TOL));
        // The eps weights are stored verbatim; the corners are derived.
        assert_eq!(rho.get(1, 1).re, 0.1);
        assert_eq!(rho.get(2, 2).re, 0.3);
        assert!((rho.get(0, 0).re - 0.3).abs() <= EXACT_TOL);
        assert!((rho.get(3, 3).re - 0.3).abs() <= EXACT_TOL);

        assert!(f09_rho(0.2, 0.2).is_err(), "equal weights must be rejected");
        assert!(f09_rho(0.8, 0.3).is_err(), "weights above unit sum");
        assert!(f09_rho(-0.1, 0.3).is_err());
    }

    #[test]
    fn gate_labels_round_trip_through_strings() {
        let labels = [
            GateLabel::Identity,
            GateLabel::Hadamard,
            GateLabel::SDaggerHadamard,
            GateLabel::Su2(Su2Params::new(1.5, 0.25, 6.0).unwrap()),
            GateLabel::EwlJ(1.5),
        ];
        for l in labels {
            let parsed: GateLabel = l.to_string().parse().unwrap();
            let a = named_gate(&l).unwrap();
            let b = named_gate(&parsed).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-5, "{l} round trip drifted");
        }
        assert!("nonsense".parse::<GateLabel>().is_err());
        assert!("su2(1.0,2.0)".parse::<GateLabel>().is_err());
    }
}
