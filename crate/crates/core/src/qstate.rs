//! N-qubit states: pure-state vectors, density matrices, named presets and
//! the JSON state-file format.
//!
//! Basis states are ordered by their z-eigenvalue bitstrings with qubit 1 as
//! the most significant bit, `|+z⟩ = |0⟩` and `|−z⟩ = |1⟩`. Local x and y
//! eigenstates use `|±x⟩ = (|0⟩ ± |1⟩)/√2` and `|±y⟩ = (|0⟩ ± i|1⟩)/√2`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Default cap on the number of qubits of a dense state.
pub const DEFAULT_MAX_QUBITS: usize = 12;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance on `|‖ψ‖ − 1|` accepted when turning a vector into a density matrix.
pub const NORMALIZATION_TOL: f64 = 1e-8;

const C0: Complex = Complex::new(0.0, 0.0);
const C1: Complex = Complex::new(1.0, 0.0);

pub(crate) fn check_qubits(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::ZeroQubits);
    }
    if n_qubits > cap {
        return Err(Error::TooManyQubits { n_qubits, cap });
    }
    Ok(())
}

/// Single-qubit Pauli operator, `σ⁰ = 1`, `σ¹ = σx`, `σ² = σy`, `σ³ = σz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(index: usize) -> Result<Self> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("Pauli index {index} not in 0..=3")))
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        ['0', 'x', 'y', 'z'][self as usize]
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(self) -> [[Complex; 2]; 2] {
        let i = Complex::new(0.0, 1.0);
        match self {
            Pauli::I => [[C1, C0], [C0, C1]],
            Pauli::X => [[C0, C1], [C1, C0]],
            Pauli::Y => [[C0, -i], [i, C0]],
            Pauli::Z => [[C1, C0], [C0, -C1]],
        }
    }
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex>,
}

impl StateVector {
    /// Wraps amplitudes after checking length and finiteness. Normalization
    /// is checked when the vector is turned into a density matrix.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex>) -> Result<Self> {
        check_qubits(n_qubits, DEFAULT_MAX_QUBITS)?;
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "amplitudes",
                expected,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Like [`StateVector::new`] but rescales to unit norm.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amplitudes)
    }

    /// Tensor product of single-qubit states, qubit 1 first.
    pub fn product(qubits: &[[Complex; 2]]) -> Result<Self> {
        let mut amps = vec![C1];
        for q in qubits {
            amps = amps.iter().flat_map(|&a| [a * q[0], a * q[1]]).collect();
        }
        Self::normalized(qubits.len(), amps)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits, DEFAULT_MAX_QUBITS)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![C0; dim];
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] += h;
        amps[dim - 1] += h;
        Self::new(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Single-qubit eigenstates of σx and σy.
pub mod qubit {
    use super::{Complex, C0, C1};
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    pub const PLUS_Z: [Complex; 2] = [C1, C0];
    pub const MINUS_Z: [Complex; 2] = [C0, C1];
    pub const PLUS_X: [Complex; 2] = [Complex::new(H, 0.0), Complex::new(H, 0.0)];
    pub const MINUS_X: [Complex; 2] = [Complex::new(H, 0.0), Complex::new(-H, 0.0)];
    pub const PLUS_Y: [Complex; 2] = [Complex::new(H, 0.0), Complex::new(0.0, H)];
    pub const MINUS_Y: [Complex; 2] = [Complex::new(H, 0.0), Complex::new(0.0, -H)];
}

/// Dense row-major `2^N × 2^N` density matrix.
///
/// Construction only checks shape and finiteness; the physical invariants are
/// reported by [`DensityMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex>,
}

impl DensityMatrix {
    pub fn from_entries(n_qubits: usize, entries: Vec<Complex>) -> Result<Self> {
        Self::from_entries_with_cap(n_qubits, entries, DEFAULT_MAX_QUBITS)
    }

    pub fn from_entries_with_cap(n_qubits: usize, entries: Vec<Complex>, cap: usize) -> Result<Self> {
        check_qubits(n_qubits, cap)?;
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "matrix entries",
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_qubits, entries })
    }

    /// Builds from a list of rows; fails unless there are `2^N` rows of `2^N`.
    pub fn from_rows(n_qubits: usize, rows: Vec<Vec<Complex>>) -> Result<Self> {
        Self::from_rows_with_cap(n_qubits, rows, DEFAULT_MAX_QUBITS)
    }

    pub fn from_rows_with_cap(n_qubits: usize, rows: Vec<Vec<Complex>>, cap: usize) -> Result<Self> {
        check_qubits(n_qubits, cap)?;
        let dim = 1usize << n_qubits;
        if rows.len() != dim {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "rows",
                expected: dim,
                found: rows.len(),
            });
        }
        if let Some(row) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "columns",
                expected: dim,
                found: row.len(),
            });
        }
        Self::from_entries_with_cap(n_qubits, rows.into_iter().flatten().collect(), cap)
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits, DEFAULT_MAX_QUBITS)?;
        let dim = 1usize << n_qubits;
        let mut entries = vec![C0; dim * dim];
        let w = Complex::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            entries[i * dim + i] = w;
        }
        Ok(Self { n_qubits, entries })
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * lambda + b * (1.0 - lambda))
            .collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr ρ²`, real part.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self.get(i, j) * self.get(j, i)).re;
            }
        }
        s
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate(&self) -> ValidationReport {
        validate_density_matrix(self)
    }

    /// Returns `self` if every invariant holds, the report as an error otherwise.
    pub fn into_valid(self) -> Result<Self> {
        let report = self.validate();
        if report.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidState(report))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NotHermitian,
    TraceNotOne,
    NotPositiveSemidefinite,
}

/// One violated invariant and the measured residual: the Hermiticity
/// defect, `|Tr ρ − 1|`, or the magnitude of the most negative eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn get(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                let what = match v.kind {
                    ViolationKind::NotHermitian => "not Hermitian",
                    ViolationKind::TraceNotOne => "trace differs from one",
                    ViolationKind::NotPositiveSemidefinite => "negative eigenvalue",
                };
                format!("{what} (residual {:e})", v.residual)
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks Hermiticity, unit trace and positive semidefiniteness.
pub fn validate_density_matrix(m: &DensityMatrix) -> ValidationReport {
    let mut violations = Vec::new();
    let herm = m.hermiticity_residual();
    if herm > HERMITIAN_TOL {
        violations.push(Violation {
            kind: ViolationKind::NotHermitian,
            residual: herm,
        });
    }
    let tr = (m.trace() - C1).norm();
    if tr > TRACE_TOL {
        violations.push(Violation {
            kind: ViolationKind::TraceNotOne,
            residual: tr,
        });
    }
    let min_ev = m.eigenvalues().first().copied().unwrap_or(0.0);
    if min_ev < -PSD_TOL {
        violations.push(Violation {
            kind: ViolationKind::NotPositiveSemidefinite,
            residual: -min_ev,
        });
    }
    ValidationReport { violations }
}

/// `|ψ⟩⟨ψ|`.
pub fn from_state_vector(v: &StateVector) -> Result<DensityMatrix> {
    let norm = v.norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let a = v.amplitudes();
    let entries = a
        .iter()
        .flat_map(|&ai| a.iter().map(move |&aj| ai * aj.conj()))
        .collect();
    DensityMatrix::from_entries(v.n_qubits(), entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Ghz,
    BellPhiMinus,
    ProductPlusXMinusX,
    WernerGhz,
    MaximallyMixed,
    ProductAllPlusX,
}

impl PresetKind {
    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Ghz => "ghz",
            PresetKind::BellPhiMinus => "bell_phi_minus",
            PresetKind::ProductPlusXMinusX => "product_plus_x_minus_x",
            PresetKind::WernerGhz => "werner_ghz",
            PresetKind::MaximallyMixed => "maximally_mixed",
            PresetKind::ProductAllPlusX => "product_all_plus_x",
        }
    }
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Schema(format!("unknown preset kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePreset {
    pub kind: PresetKind,
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<f64>,
}

impl StatePreset {
    pub fn new(kind: PresetKind, n_qubits: usize) -> Self {
        Self {
            kind,
            n_qubits,
            visibility: None,
        }
    }

    pub fn werner(n_qubits: usize, visibility: f64) -> Self {
        Self {
            kind: PresetKind::WernerGhz,
            n_qubits,
            visibility: Some(visibility),
        }
    }
}

/// `(|0…0⟩ + sign |1…1⟩)(⟨0…0| + sign ⟨1…1|) / 2`, built entrywise so the
/// corners are exactly `±1/2`.
fn cat_projector(n: usize, sign: f64) -> Result<DensityMatrix> {
    let d = 1usize << n;
    let mut entries = vec![C0; d * d];
    entries[0] = Complex::new(0.5, 0.0);
    entries[d * d - 1] += Complex::new(0.5, 0.0);
    entries[d - 1] += Complex::new(0.5 * sign, 0.0);
    entries[(d - 1) * d] += Complex::new(0.5 * sign, 0.0);
    DensityMatrix::from_entries(n, entries)
}

pub fn build_preset(p: &StatePreset) -> Result<DensityMatrix> {
    build_preset_with_cap(p, DEFAULT_MAX_QUBITS)
}

pub fn build_preset_with_cap(p: &StatePreset, cap: usize) -> Result<DensityMatrix> {
    check_qubits(p.n_qubits, cap)?;
    let n = p.n_qubits;
    let unsupported = || Error::UnsupportedPreset {
        kind: p.kind.name().to_string(),
        n_qubits: n,
    };
    match (p.kind, p.visibility) {
        (PresetKind::WernerGhz, None) => return Err(Error::Schema("werner_ghz preset needs a visibility".into())),
        (PresetKind::WernerGhz, Some(v)) if !(0.0..=1.0).contains(&v) => return Err(Error::InvalidVisibility(v)),
        (PresetKind::WernerGhz, Some(_)) => {}
        (_, Some(v)) => return Err(Error::InvalidVisibility(v)),
        (_, None) => {}
    }
    match p.kind {
        PresetKind::Ghz => cat_projector(n, 1.0),
        PresetKind::BellPhiMinus => {
            if n != 2 {
                return Err(unsupported());
            }
            cat_projector(2, -1.0)
        }
        PresetKind::ProductPlusXMinusX => {
            if n != 2 {
                return Err(unsupported());
            }
            from_state_vector(&StateVector::product(&[qubit::PLUS_X, qubit::MINUS_X])?)
        }
        PresetKind::ProductAllPlusX => from_state_vector(&StateVector::product(&vec![qubit::PLUS_X; n])?),
        PresetKind::MaximallyMixed => DensityMatrix::maximally_mixed(n),
        PresetKind::WernerGhz => {
            let v = p.visibility.unwrap_or_default();
            cat_projector(n, 1.0)?.mix(&DensityMatrix::maximally_mixed(n)?, v)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSpec {
    n_qubits: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorSpec {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vector: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<StatePreset>,
}

fn complex(pair: [f64; 2]) -> Complex {
    Complex::new(pair[0], pair[1])
}

/// Parses a JSON state file and returns the validated density matrix.
pub fn parse_state_file(text: &[u8]) -> Result<DensityMatrix> {
    parse_state_file_with_cap(text, DEFAULT_MAX_QUBITS)
}

pub fn parse_state_file_with_cap(text: &[u8], cap: usize) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_slice(text)?;
    let rho = match (file.matrix, file.vector, file.preset) {
        (Some(m), None, None) => {
            check_qubits(m.n_qubits, cap)?;
            let rows = m
                .entries
                .into_iter()
                .map(|row| row.into_iter().map(complex).collect())
                .collect();
            DensityMatrix::from_rows_with_cap(m.n_qubits, rows, cap)?
        }
        (None, Some(v), None) => {
            check_qubits(v.n_qubits, cap)?;
            let amps = v.amplitudes.into_iter().map(complex).collect();
            from_state_vector(&StateVector::new(v.n_qubits, amps)?)?
        }
        (None, None, Some(p)) => build_preset_with_cap(&p, cap)?,
        (None, None, None) => {
            return Err(Error::Schema(
                "missing field: one of `matrix`, `vector` or `preset` is required".into(),
            ))
        }
        _ => {
            return Err(Error::Schema(
                "exactly one of `matrix`, `vector` or `preset` may be given".into(),
            ))
        }
    };
    rho.into_valid()
}

/// Serializes a density matrix in the `matrix` form of the state file.
pub fn to_state_json(m: &DensityMatrix) -> String {
    let d = m.dim();
    let entries = (0..d)
        .map(|i| (0..d).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect();
    let file = StateFile {
        matrix: Some(MatrixSpec {
            n_qubits: m.n_qubits(),
            entries,
        }),
        ..Default::default()
    };
    serde_json::to_string(&file).expect("state serialization")
}
