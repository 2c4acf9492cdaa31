//! Dense complex matrices and vectors sized for few-qubit state spaces.
//!
//! Everything is row-major over `Complex64`. Dimensions are small (at most
//! [`MAX_DIM`] for Kronecker results), so no sparse or blocked structure is
//! used anywhere.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest state-space dimension the toolkit handles (five qubits).
pub const MAX_DIM: usize = 32;

/// Tolerance for structural checks (unitarity, density-matrix validity).
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Tolerance for checks that hold to machine precision.
pub const EXACT_TOL: f64 = 1e-12;

/// Largest imaginary residue tolerated when a trace must be real.
pub const REAL_RESIDUE_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite entry {z} at flat index {k}"
                )));
            }
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
        }
        CMatrix::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Square matrix with the given values on the diagonal.
    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, z) in diag.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite diagonal entry {z} at index {i}"
                )));
            }
            m.set(i, i, *z);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise absolute difference; matrices must share a shape.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff requires equal shapes"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max deviation of `self * self^dagger` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self
            .mul(&conjugate_transpose(self))
            .expect("square product");
        prod.max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Dimension("vector needs at least one entry".into()));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite entry {z} at index {k}"
                )));
            }
        }
        Ok(CVector { data })
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Standard basis vector `|index>` in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Dimension(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut data = vec![Complex64::ZERO; dim];
        data[index] = Complex64::ONE;
        CVector::new(data)
    }

    /// Rank-one density matrix `|v><v|`.
    pub fn outer(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.data[i] * self.data[j].conj());
            }
        }
        m
    }
}

/// Kronecker product; the result must stay within [`MAX_DIM`] per side.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(Error::Dimension(format!(
            "kron result {rows}x{cols} exceeds the {MAX_DIM}-dimensional limit"
        )));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let f = a.get(i1, j1);
            if f == Complex64::ZERO {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out.set(i1 * b.rows + i2, j1 * b.cols + j2, f * b.get(i2, j2));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list, folded left to right.
pub fn kron_all(factors: &[CMatrix]) -> Result<CMatrix> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Dimension("kron_all needs at least one factor".into()))?;
    let mut acc = first.clone();
    for f in iter {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

/// Conjugate transpose (dagger).
pub fn conjugate_transpose(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.set(j, i, a.get(i, j).conj());
        }
    }
    out
}

/// `u * rho * u^dagger` after checking that `u` is unitary.
pub fn evolve(rho: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    if !rho.is_square() || !u.is_square() || rho.rows != u.rows {
        return Err(Error::Dimension(format!(
            "evolve needs square matrices of equal size, got {}x{} and {}x{}",
            rho.rows, rho.cols, u.rows, u.cols
        )));
    }
    let deviation = u.unitarity_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: STRUCTURAL_TOL,
        });
    }
    evolve_unchecked(rho, u)
}

/// Same as [`evolve`] without the unitarity check; callers must validate `u`.
pub(crate) fn evolve_unchecked(rho: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    u.mul(rho)?.mul(&conjugate_transpose(u))
}

/// `Tr(projector * rho)` as a clamped real probability.
///
/// The trace of a projector against a density matrix is real; an imaginary
/// residue above [`REAL_RESIDUE_TOL`] or a real part outside `[0, 1]` by more
/// than the residue tolerance is reported as a numerical-consistency error.
/// In-range values are clamped to `[0, 1]`.
pub fn expectation(rho: &CMatrix, projector: &CMatrix) -> Result<f64> {
    if !rho.is_square() || !projector.is_square() || rho.rows != projector.rows {
        return Err(Error::Dimension(format!(
            "expectation needs square matrices of equal size, got {}x{} and {}x{}",
            rho.rows, rho.cols, projector.rows, projector.cols
        )));
    }
    // Tr(P rho) = sum_{i,j} P[i][j] rho[j][i].
    let mut val = Complex64::ZERO;
    for i in 0..rho.rows {
        for j in 0..rho.cols {
            val += projector.get(i, j) * rho.get(j, i);
        }
    }
    if val.im.abs() > REAL_RESIDUE_TOL {
        return Err(Error::NumericalConsistency(format!(
            "expectation has imaginary residue {:.3e} above {REAL_RESIDUE_TOL:.1e}",
            val.im
        )));
    }
    if val.re < -REAL_RESIDUE_TOL || val.re > 1.0 + REAL_RESIDUE_TOL {
        return Err(Error::NumericalConsistency(format!(
            "expectation {:.6e} is outside [0, 1] beyond the residue tolerance",
            val.re
        )));
    }
    Ok(val.re.clamp(0.0, 1.0))
}

/// Checks Hermiticity, unit trace and positive semidefiniteness within `tol`.
pub fn is_density_matrix(rho: &CMatrix, tol: f64) -> bool {
    if !rho.is_square() || !rho.is_hermitian(tol) {
        return false;
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return false;
    }
    hermitian_eigenvalues(rho).iter().all(|&ev| ev >= -tol)
}

/// Eigenvalues of a (near-)Hermitian matrix, via nalgebra's symmetric solver.
fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.rows;
    let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    na.symmetric_eigenvalues().iter().copied().collect()
}

/// Flat basis index for a bit string; the first bit is the most significant.
pub fn index_of_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| {
        debug_assert!(b <= 1, "bits must be 0 or 1");
        (acc << 1) | b as usize
    })
}

/// Bit string of length `n` for a flat basis index; first bit most significant.
pub fn bits_of_index(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect()
}

/// All `n`-bit strings in ascending index order.
pub fn all_bit_strings(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << n).map(|i| bits_of_index(i, n)).collect()
}
