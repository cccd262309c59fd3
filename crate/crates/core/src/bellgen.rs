//! Correlation-function Bell inequalities with two dichotomic observables per
//! party.
//!
//! For settings `n₁, n₂` on every qubit and correlation functions `E(k₁…k_N)`,
//! local realism holds iff
//!
//! ```text
//! Σ_s | Σ_k s₁^{k₁} … s_N^{k_N} E(k) | ≤ 2^N,     s_j ∈ {−1, 1}, k_j ∈ {1, 2}
//! ```
//!
//! with `s¹ = s` and `s² = 1`. Every inequality of the family
//! `|Σ_s S(s) Σ_k … E(k)| ≤ 2^N`, one per sign function `S`, follows from it
//! by the triangle inequality. Sign tuples are indexed by a bitmask with bit
//! `N−1−j` set iff `s_j = −1`; setting tuples by a bitmask with bit `N−1−j`
//! set iff `k_j = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infocrit::{maximize_corr_info, DECISION_TOL};
use crate::linalg::{axpy, contract_modes, norm, spherical, Vec3};
use crate::optim::{self, OptimizerOptions, OptimizerReport};
use crate::pauli::{plane_subtensor, rotate_frame_in_plane, CorrelationTensor, LocalFrame, PlaneTensor};

/// Tolerance on `|n| = 1`.
pub const UNIT_TOL: f64 = 1e-10;
/// Tolerance on table values beyond `[−1, 1]`.
pub const TABLE_TOL: f64 = 1e-9;
/// Default number of low-discrepancy starts for the settings search.
pub const DEFAULT_BELL_RESTARTS: usize = 64;

fn check_unit(v: &Vec3) -> Result<()> {
    let l = norm(v);
    if !l.is_finite() || (l - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm: l });
    }
    Ok(())
}

/// Two measurement directions per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingsPair {
    pairs: Vec<(Vec3, Vec3)>,
}

impl SettingsPair {
    pub fn new(pairs: Vec<(Vec3, Vec3)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::ZeroQubits);
        }
        for (a, b) in &pairs {
            check_unit(a)?;
            check_unit(b)?;
        }
        Ok(Self { pairs })
    }

    /// From `(θ₁, φ₁, θ₂, φ₂)` per qubit, polar and azimuthal angles.
    pub fn from_angles(angles: &[f64]) -> Self {
        Self {
            pairs: angles
                .chunks(4)
                .map(|a| (spherical(a[0], a[1]), spherical(a[2], a[3])))
                .collect(),
        }
    }

    /// Directions in the x–y plane at the given azimuths `(φ₁, φ₂)` per qubit.
    pub fn in_plane(azimuths: &[(f64, f64)]) -> Self {
        let h = std::f64::consts::FRAC_PI_2;
        Self {
            pairs: azimuths
                .iter()
                .map(|&(a, b)| (spherical(h, a), spherical(h, b)))
                .collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Vec3, Vec3)] {
        &self.pairs
    }

    pub fn export(&self) -> Vec<SettingExport> {
        self.pairs.iter().map(|&(n1, n2)| SettingExport { n1, n2 }).collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SettingExport {
    pub n1: Vec3,
    pub n2: Vec3,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingsFile {
    pairs: Vec<SettingExport>,
}

/// Parses `{"pairs":[{"n1":[x,y,z],"n2":[x,y,z]},...]}`.
pub fn parse_settings_file(text: &[u8]) -> Result<SettingsPair> {
    let file: SettingsFile = serde_json::from_slice(text)?;
    SettingsPair::new(file.pairs.into_iter().map(|p| (p.n1, p.n2)).collect())
}

pub fn settings_to_json(s: &SettingsPair) -> String {
    serde_json::to_string(&SettingsFile { pairs: s.export() }).expect("settings serialization")
}

/// Settings whose sum and difference lie along a local frame:
/// `n₁ + n₂ = 2 a₁ cos(α + π/2)` and `n₂ − n₁ = 2 a₂ cos(α + π)`.
pub fn settings_from_frame(frame: &LocalFrame, alphas: &[f64]) -> Result<SettingsPair> {
    if alphas.len() != frame.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: frame.n_qubits(),
            found: alphas.len(),
        });
    }
    let pairs = frame
        .axes()
        .iter()
        .zip(alphas)
        .map(|((a1, a2), &al)| {
            let (s, c) = al.sin_cos();
            (axpy(-s, a1, c, a2), axpy(-s, a1, -c, a2))
        })
        .collect();
    SettingsPair::new(pairs)
}

/// Correlation functions `E(k₁…k_N)` over `{1,2}^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    n_qubits: usize,
    values: Vec<f64>,
}

impl CorrelationTable {
    pub fn new(n_qubits: usize, values: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        if n_qubits > 20 {
            return Err(Error::TooManyQubits { n_qubits, cap: 20 });
        }
        let expected = 1usize << n_qubits;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "table values",
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + TABLE_TOL) {
            return Err(Error::InvalidArgument("correlation value outside [-1, 1]".into()));
        }
        Ok(Self { n_qubits, values })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at setting labels `k_j ∈ {1, 2}`.
    pub fn get(&self, k: &[usize]) -> f64 {
        debug_assert_eq!(k.len(), self.n_qubits);
        self.values[k.iter().fold(0, |acc, &x| acc * 2 + (x - 1))]
    }
}

/// `⟨T, n₁ ⊗ … ⊗ n_N⟩`, the quantum correlation for one direction per qubit.
pub fn quantum_correlation(t: &CorrelationTensor, directions: &[Vec3]) -> Result<f64> {
    if directions.len() != t.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: t.n_qubits(),
            found: directions.len(),
        });
    }
    for d in directions {
        check_unit(d)?;
    }
    Ok(contract_modes(&t.cartesian(), t.n_qubits(), 3, 1, directions)[0])
}

pub fn correlation_table(t: &CorrelationTensor, s: &SettingsPair) -> Result<CorrelationTable> {
    if s.n_qubits() != t.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: t.n_qubits(),
            found: s.n_qubits(),
        });
    }
    let mats: Vec<[f64; 6]> = s
        .pairs()
        .iter()
        .map(|(a, b)| [a[0], a[1], a[2], b[0], b[1], b[2]])
        .collect();
    let values = contract_modes(&t.cartesian(), t.n_qubits(), 3, 2, &mats);
    Ok(CorrelationTable {
        n_qubits: t.n_qubits(),
        values,
    })
}

/// `Σ_k s₁^{k₁} … s_N^{k_N} E(k)` for every sign tuple, in sign-mask order.
pub fn signed_sums(table: &CorrelationTable) -> Vec<f64> {
    let n = table.n_qubits();
    let full = (1usize << n) - 1;
    (0..1usize << n)
        .map(|smask| {
            table
                .values
                .iter()
                .enumerate()
                .map(|(kmask, &e)| {
                    // s_j contributes a factor −1 iff s_j = −1 and k_j = 1.
                    if (smask & !kmask & full).count_ones().is_multiple_of(2) {
                        e
                    } else {
                        -e
                    }
                })
                .sum()
        })
        .collect()
}

/// Signs `(s₁, …, s_N)` of a sign mask.
pub fn signs_of(n_qubits: usize, smask: usize) -> Vec<i8> {
    (0..n_qubits)
        .map(|j| if (smask >> (n_qubits - 1 - j)) & 1 == 1 { -1 } else { 1 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellEvaluation {
    pub n_qubits: usize,
    pub lhs: f64,
    /// Modulus for each sign tuple, in sign-mask order.
    pub per_s: Vec<f64>,
    pub bound: f64,
    pub violated: bool,
    pub ratio: f64,
}

/// Left-hand side of the general Bell inequality for a table.
pub fn general_bell_lhs(table: &CorrelationTable) -> BellEvaluation {
    let per_s: Vec<f64> = signed_sums(table).into_iter().map(f64::abs).collect();
    evaluation(table.n_qubits(), per_s)
}

fn evaluation(n_qubits: usize, per_s: Vec<f64>) -> BellEvaluation {
    let lhs: f64 = per_s.iter().sum();
    let bound = (1u64 << n_qubits) as f64;
    BellEvaluation {
        n_qubits,
        lhs,
        per_s,
        bound,
        violated: lhs > bound + DECISION_TOL,
        ratio: lhs / bound,
    }
}

/// A map `{−1, 1}^N → {−1, 1}`, indexed by sign mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignFunction {
    n_qubits: usize,
    values: Vec<i8>,
}

impl SignFunction {
    pub fn new(n_qubits: usize, values: Vec<i8>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        if values.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "sign values",
                expected: 1 << n_qubits,
                found: values.len(),
            });
        }
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument("sign function values must be ±1".into()));
        }
        Ok(Self { n_qubits, values })
    }

    pub fn from_fn(n_qubits: usize, f: impl Fn(&[i8]) -> i8) -> Result<Self> {
        let values = (0..1usize << n_qubits).map(|m| f(&signs_of(n_qubits, m))).collect();
        Self::new(n_qubits, values)
    }

    pub fn constant(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            values: vec![1; 1 << n_qubits],
        }
    }

    /// `S(s) = √2 cos(−π/4 + (s₁ + … + s_N − N)·π/4)`, the sign function
    /// generating CHSH for two qubits and the Mermin–Klyshko series beyond.
    pub fn belinskii_klyshko(n_qubits: usize) -> Result<Self> {
        use std::f64::consts::{FRAC_PI_4, SQRT_2};
        let mut values = Vec::with_capacity(1 << n_qubits);
        for m in 0..1usize << n_qubits {
            let sum: i64 = signs_of(n_qubits, m).iter().map(|&s| s as i64).sum();
            let raw = SQRT_2 * (-FRAC_PI_4 + (sum - n_qubits as i64) as f64 * FRAC_PI_4).cos();
            let rounded = raw.round();
            assert!(
                (raw - rounded).abs() <= 1e-12 && rounded.abs() == 1.0,
                "sign function value {raw} is not ±1"
            );
            values.push(rounded as i8);
        }
        Self::new(n_qubits, values)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Coefficients `c(k) = Σ_s S(s) s₁^{k₁} … s_N^{k_N}` of the inequality
    /// `|Σ_k c(k) E(k)| ≤ 2^N`, in setting-mask order.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let full = (1usize << n) - 1;
        (0..1usize << n)
            .map(|kmask| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(smask, &sv)| {
                        let odd = (smask & !kmask & full).count_ones() % 2 == 1;
                        if odd {
                            -(sv as f64)
                        } else {
                            sv as f64
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

/// `|Σ_s S(s) Σ_k s₁^{k₁} … s_N^{k_N} E(k)|`.
pub fn sign_function_inequality(table: &CorrelationTable, sgn: &SignFunction) -> Result<f64> {
    if sgn.n_qubits() != table.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: table.n_qubits(),
            found: sgn.n_qubits(),
        });
    }
    let sums = signed_sums(table);
    Ok(sums
        .iter()
        .zip(sgn.values())
        .map(|(v, &s)| v * s as f64)
        .sum::<f64>()
        .abs())
}

/// Belinskii–Klyshko combination scaled so that local realism bounds it by 2
/// (the CHSH normalization): the sign-function value divided by `2^{N−1}`.
pub fn belinskii_klyshko_value(table: &CorrelationTable) -> Result<f64> {
    let n = table.n_qubits();
    let raw = sign_function_inequality(table, &SignFunction::belinskii_klyshko(n)?)?;
    Ok(raw / (1u64 << (n - 1)) as f64)
}

/// `|E(1,1) + E(1,2) + E(2,1) − E(2,2)|`.
pub fn chsh_value(table: &CorrelationTable) -> Result<f64> {
    if table.n_qubits() != 2 {
        return Err(Error::QubitCountMismatch {
            expected: 2,
            found: table.n_qubits(),
        });
    }
    Ok(combination(table, &CHSH_COEFFS))
}

/// `|E(1,2,2) + E(2,1,2) + E(2,2,1) − E(1,1,1)|`.
pub fn mermin3_value(table: &CorrelationTable) -> Result<f64> {
    if table.n_qubits() != 3 {
        return Err(Error::QubitCountMismatch {
            expected: 3,
            found: table.n_qubits(),
        });
    }
    Ok(combination(table, &MERMIN3_COEFFS))
}

/// CHSH coefficients in setting-mask order (11, 12, 21, 22).
pub const CHSH_COEFFS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];
/// Mermin coefficients in setting-mask order (111, 112, …, 222).
pub const MERMIN3_COEFFS: [f64; 8] = [-1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];

fn combination(table: &CorrelationTable, coeffs: &[f64]) -> f64 {
    table.values().iter().zip(coeffs).map(|(e, c)| e * c).sum::<f64>().abs()
}

/// Best settings found by [`maximize_general_bell`].
#[derive(Debug, Clone, PartialEq)]
pub struct BellOptimum {
    pub evaluation: BellEvaluation,
    pub settings: SettingsPair,
    pub report: OptimizerReport,
}

impl BellOptimum {
    pub fn export(&self) -> BellReport {
        bell_report(&self.evaluation, &self.settings)
    }
}

/// JSON form of a Bell evaluation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BellReport {
    pub n_qubits: usize,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub violated: bool,
    pub settings: Vec<SettingExport>,
    pub per_s: Vec<PerSignExport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerSignExport {
    pub s: Vec<i8>,
    pub modulus: f64,
}

pub fn bell_report(e: &BellEvaluation, settings: &SettingsPair) -> BellReport {
    BellReport {
        n_qubits: e.n_qubits,
        lhs: e.lhs,
        bound: e.bound,
        ratio: e.ratio,
        violated: e.violated,
        settings: settings.export(),
        per_s: e
            .per_s
            .iter()
            .enumerate()
            .map(|(m, &modulus)| PerSignExport {
                s: signs_of(e.n_qubits, m),
                modulus,
            })
            .collect(),
    }
}

fn settings_bounds(n: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::PI;
    (0..n)
        .flat_map(|_| [(0.0, PI), (0.0, 2.0 * PI), (0.0, PI), (0.0, 2.0 * PI)])
        .collect()
}

/// In-plane starting points: `φ₂ = φ₁ ± π/2` on every qubit with the total
/// offset `Σφ₁` placed at the extrema of `cos(Σφ)` correlations.
fn in_plane_warm_starts(n: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let mut starts = Vec::new();
    for total in [FRAC_PI_4 * (1.0 - n as f64), 0.0, FRAC_PI_4, -FRAC_PI_4] {
        for quarter in [FRAC_PI_2, -FRAC_PI_2] {
            let d = total / n as f64;
            starts.push((0..n).flat_map(|_| [FRAC_PI_2, d, FRAC_PI_2, d + quarter]).collect());
        }
    }
    starts
}

/// `Σ_s |⟨T, ⊗_j (s_j n₁ + n₂)⟩|` straight from the Cartesian tensor.
fn general_lhs_from_tensor(cart: &[f64], n: usize, settings: &SettingsPair) -> f64 {
    let mats: Vec<[f64; 6]> = settings
        .pairs()
        .iter()
        .map(|(a, b)| {
            let p = axpy(1.0, a, 1.0, b);
            let m = axpy(-1.0, a, 1.0, b);
            [p[0], p[1], p[2], m[0], m[1], m[2]]
        })
        .collect();
    contract_modes(cart, n, 3, 2, &mats).iter().map(|v| v.abs()).sum()
}

/// Searches measurement settings maximizing the general Bell left-hand side.
///
/// Parameters are the polar and azimuthal angles of both directions on every
/// qubit. Warm starts are in-plane settings optimal for GHZ-type
/// correlations; `opts.restarts` low-discrepancy starts are added.
pub fn maximize_general_bell(t: &CorrelationTensor, opts: &OptimizerOptions) -> Result<BellOptimum> {
    let n = t.n_qubits();
    let cart = t.cartesian();
    let objective = |x: &[f64]| general_lhs_from_tensor(&cart, n, &SettingsPair::from_angles(x));
    let best = optim::maximize(objective, &settings_bounds(n), &in_plane_warm_starts(n), opts);
    let settings = SettingsPair::new(SettingsPair::from_angles(&best.x).pairs)?;
    let evaluation = general_bell_lhs(&correlation_table(t, &settings)?);
    Ok(BellOptimum {
        evaluation,
        settings,
        report: best.report,
    })
}

/// Like [`maximize_general_bell`] but also starting from caller-supplied
/// settings, e.g. a previous optimum of a related state.
pub fn maximize_general_bell_from(
    t: &CorrelationTensor,
    starts: &[SettingsPair],
    opts: &OptimizerOptions,
) -> Result<BellOptimum> {
    let n = t.n_qubits();
    let cart = t.cartesian();
    let objective = |x: &[f64]| general_lhs_from_tensor(&cart, n, &SettingsPair::from_angles(x));
    let mut warm: Vec<Vec<f64>> = starts.iter().map(settings_to_angles).collect();
    warm.extend(in_plane_warm_starts(n));
    let best = optim::maximize(objective, &settings_bounds(n), &warm, opts);
    let settings = SettingsPair::new(SettingsPair::from_angles(&best.x).pairs)?;
    let evaluation = general_bell_lhs(&correlation_table(t, &settings)?);
    Ok(BellOptimum {
        evaluation,
        settings,
        report: best.report,
    })
}

/// Single local search from `start`, without further starting points.
pub fn refine_general_bell(
    t: &CorrelationTensor,
    start: &SettingsPair,
    opts: &OptimizerOptions,
) -> Result<BellOptimum> {
    let n = t.n_qubits();
    if start.n_qubits() != n {
        return Err(Error::QubitCountMismatch {
            expected: n,
            found: start.n_qubits(),
        });
    }
    let cart = t.cartesian();
    let objective = |x: &[f64]| general_lhs_from_tensor(&cart, n, &SettingsPair::from_angles(x));
    let opts = OptimizerOptions { restarts: 0, ..*opts };
    let best = optim::maximize(objective, &settings_bounds(n), &[settings_to_angles(start)], &opts);
    let settings = SettingsPair::new(SettingsPair::from_angles(&best.x).pairs)?;
    let evaluation = general_bell_lhs(&correlation_table(t, &settings)?);
    Ok(BellOptimum {
        evaluation,
        settings,
        report: best.report,
    })
}

fn settings_to_angles(s: &SettingsPair) -> Vec<f64> {
    let ang = |v: &Vec3| [v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0])];
    s.pairs()
        .iter()
        .flat_map(|(a, b)| {
            let (x, y) = (ang(a), ang(b));
            [x[0], x[1], y[0], y[1]]
        })
        .collect()
}

/// Maximizes `|Σ_k c(k) E(k)|` over settings for fixed coefficients.
pub fn maximize_combination(
    t: &CorrelationTensor,
    coeffs: &[f64],
    opts: &OptimizerOptions,
) -> Result<(f64, SettingsPair, OptimizerReport)> {
    let n = t.n_qubits();
    if coeffs.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            n_qubits: n,
            what: "coefficients",
            expected: 1 << n,
            found: coeffs.len(),
        });
    }
    let cart = t.cartesian();
    let objective = |x: &[f64]| {
        let s = SettingsPair::from_angles(x);
        let mats: Vec<[f64; 6]> = s
            .pairs()
            .iter()
            .map(|(a, b)| [a[0], a[1], a[2], b[0], b[1], b[2]])
            .collect();
        contract_modes(&cart, n, 3, 2, &mats)
            .iter()
            .zip(coeffs)
            .map(|(e, c)| e * c)
            .sum::<f64>()
            .abs()
    };
    let best = optim::maximize(objective, &settings_bounds(n), &in_plane_warm_starts(n), opts);
    let settings = SettingsPair::new(SettingsPair::from_angles(&best.x).pairs)?;
    let value = combination(&correlation_table(t, &settings)?, coeffs);
    Ok((value, settings, best.report))
}

/// `Σ_{x ∈ {1,2}^N} |c_{x₁} … c_{x_N} T_{x₁…x_N}|` with `c_x = cos(α + xπ/2)`.
/// Local realism holds iff its maximum over frames and angles is at most 1.
pub fn necsuf_lhs(pt: &PlaneTensor, alphas: &[f64]) -> Result<f64> {
    let n = pt.n_qubits();
    if alphas.len() != n {
        return Err(Error::QubitCountMismatch {
            expected: n,
            found: alphas.len(),
        });
    }
    let c: Vec<[f64; 2]> = alphas
        .iter()
        .map(|a| {
            let h = std::f64::consts::FRAC_PI_2;
            [(a + h).cos(), (a + 2.0 * h).cos()]
        })
        .collect();
    Ok(pt
        .entries()
        .iter()
        .enumerate()
        .map(|(flat, &t)| {
            let w: f64 = (0..n).map(|j| c[j][(flat >> (n - 1 - j)) & 1]).product();
            (w * t).abs()
        })
        .sum())
}

/// Best in-plane rotation and angles found by [`maximize_necsuf`].
#[derive(Debug, Clone, PartialEq)]
pub struct NecsufOptimum {
    pub value: f64,
    /// Input frame after the optimal in-plane rotations.
    pub frame: LocalFrame,
    pub alphas: Vec<f64>,
    pub report: OptimizerReport,
}

/// Maximizes [`necsuf_lhs`] over in-plane rotations of `frame` and the
/// angles `α_j`, keeping the plane normals fixed.
pub fn maximize_necsuf(t: &CorrelationTensor, frame: &LocalFrame, opts: &OptimizerOptions) -> Result<NecsufOptimum> {
    use std::f64::consts::PI;
    let n = t.n_qubits();
    let base = plane_subtensor(t, frame)?;
    let objective = |x: &[f64]| {
        let rotated = rotate_plane_entries(&base, &x[..n]);
        necsuf_lhs(&rotated, &x[n..]).unwrap_or(0.0)
    };
    let bounds = vec![(0.0, PI); 2 * n];
    let best = optim::maximize(objective, &bounds, &[], opts);
    let rotated = rotate_frame_in_plane(frame, &best.x[..n])?;
    let alphas = best.x[n..].to_vec();
    let value = necsuf_lhs(&plane_subtensor(t, &rotated)?, &alphas)?;
    Ok(NecsufOptimum {
        value,
        frame: rotated,
        alphas,
        report: best.report,
    })
}

fn rotate_plane_entries(pt: &PlaneTensor, angles: &[f64]) -> PlaneTensor {
    let mats: Vec<[f64; 4]> = angles
        .iter()
        .map(|a| {
            let (s, c) = a.sin_cos();
            [c, s, -s, c]
        })
        .collect();
    let entries = contract_modes(pt.entries(), pt.n_qubits(), 2, 2, &mats);
    PlaneTensor::from_entries(pt.n_qubits(), entries).expect("same shape")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SufficientCondition {
    pub max_sum: f64,
    pub holds: bool,
}

/// Local realism is guaranteed when `Σ_{x∈{1,2}^N} T²_x ≤ 1` for every choice
/// of local planes; the maximum is the correlation-information maximum.
pub fn sufficient_lr_condition(t: &CorrelationTensor, opts: &OptimizerOptions) -> Result<SufficientCondition> {
    let max_sum = maximize_corr_info(t, opts)?.max_total;
    Ok(SufficientCondition {
        max_sum,
        holds: max_sum <= 1.0 + DECISION_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::correlation_tensor;
    use crate::qstate::{build_preset, PresetKind, StatePreset};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn tensor(p: StatePreset) -> CorrelationTensor {
        correlation_tensor(&build_preset(&p).unwrap()).unwrap()
    }

    const X: Vec3 = [1.0, 0.0, 0.0];
    const Y: Vec3 = [0.0, 1.0, 0.0];

    #[test]
    fn phi_minus_correlations() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        assert!((quantum_correlation(&t, &[X, X]).unwrap() + 1.0).abs() < 1e-12);
        assert!((quantum_correlation(&t, &[Y, Y]).unwrap() - 1.0).abs() < 1e-12);
        let mm = tensor(StatePreset::new(PresetKind::MaximallyMixed, 2));
        assert_eq!(quantum_correlation(&mm, &[X, Y]).unwrap(), 0.0);
        assert!(matches!(
            quantum_correlation(&t, &[X, [1.0, 1.0, 0.0]]),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn werner_in_plane_table_is_cosine_of_azimuth_sum() {
        let v = 0.7;
        let t = tensor(StatePreset::werner(3, v));
        let az = [(0.1, 1.3), (-0.4, 2.0), (0.9, -0.6)];
        let table = correlation_table(&t, &SettingsPair::in_plane(&az)).unwrap();
        for kmask in 0..8 {
            let sum: f64 = (0..3)
                .map(|j| if (kmask >> (2 - j)) & 1 == 0 { az[j].0 } else { az[j].1 })
                .sum();
            assert!((table.values()[kmask] - v * sum.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_settings_give_constant_table() {
        let t = tensor(StatePreset::werner(2, 0.8));
        let d: Vec3 = [0.6, 0.0, 0.8];
        let table = correlation_table(&t, &SettingsPair::new(vec![(d, d), (X, X)]).unwrap()).unwrap();
        assert!(table.values().iter().all(|&e| (e - table.values()[0]).abs() < 1e-15));
    }

    fn chsh_settings() -> SettingsPair {
        // φ⁻ has E = −cos(φ_a + φ_b) in the x–y plane.
        SettingsPair::in_plane(&[(0.0, FRAC_PI_2), (3.0 * FRAC_PI_4, FRAC_PI_4 + std::f64::consts::PI)])
    }

    #[test]
    fn chsh_optimal_settings_reach_tsirelson() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let table = correlation_table(&t, &chsh_settings()).unwrap();
        assert!(table.values().iter().all(|e| (e.abs() - FRAC_1_SQRT_2).abs() < 1e-12));
        assert!((chsh_value(&table).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let e = general_bell_lhs(&table);
        assert!((e.lhs - 4.0 * SQRT_2).abs() < 1e-12);
        assert!(e.per_s.iter().all(|m| (m - SQRT_2).abs() < 1e-12));
        assert!(e.violated);
    }

    #[test]
    fn zero_table() {
        let e = general_bell_lhs(&CorrelationTable::new(3, vec![0.0; 8]).unwrap());
        assert_eq!(e.lhs, 0.0);
        assert!(!e.violated);
        assert_eq!(e.bound, 8.0);
    }

    #[test]
    fn ghz3_mermin_settings() {
        let t = tensor(StatePreset::new(PresetKind::Ghz, 3));
        let table = correlation_table(&t, &SettingsPair::in_plane(&[(0.0, FRAC_PI_2); 3])).unwrap();
        assert!((mermin3_value(&table).unwrap() - 4.0).abs() < 1e-12);
        let e = general_bell_lhs(&table);
        assert!((e.lhs - 16.0).abs() < 1e-12);
        assert!(e.per_s.iter().all(|m| (m - 2.0).abs() < 1e-12));
    }

    #[test]
    fn constant_sign_function_picks_e22() {
        let table = CorrelationTable::new(2, vec![0.3, -0.2, 0.5, -0.7]).unwrap();
        let v = sign_function_inequality(&table, &SignFunction::constant(2)).unwrap();
        assert!((v - 4.0 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn belinskii_klyshko_coefficients() {
        let chsh = SignFunction::belinskii_klyshko(2).unwrap().coefficients();
        assert_eq!(chsh, vec![2.0, 2.0, 2.0, -2.0]);
        // Three qubits: Mermin with the setting labels 1 ↔ 2 exchanged.
        let m3 = SignFunction::belinskii_klyshko(3).unwrap().coefficients();
        let relabelled: Vec<f64> = (0..8).map(|k| 4.0 * MERMIN3_COEFFS[7 - k]).collect();
        assert_eq!(m3, relabelled);
        for n in 1..=8 {
            SignFunction::belinskii_klyshko(n).unwrap();
        }
    }

    #[test]
    fn bk_value_is_chsh_for_two_qubits() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let table = correlation_table(&t, &chsh_settings()).unwrap();
        let bk = belinskii_klyshko_value(&table).unwrap();
        assert!((bk - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn sign_function_validation() {
        assert!(SignFunction::new(2, vec![1, -1, 0, 1]).is_err());
        assert!(SignFunction::new(2, vec![1, -1]).is_err());
        let s = SignFunction::from_fn(2, |s| s[0] * s[1]).unwrap();
        assert_eq!(s.values(), &[1, -1, -1, 1]);
    }

    #[test]
    fn settings_from_frame_match_eq19_form() {
        let t = tensor(StatePreset::werner(3, 0.9));
        let f = LocalFrame::from_normals(&[[0.0, 0.6, 0.8], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let alphas = [0.3, -1.1, 2.0];
        let s = settings_from_frame(&f, &alphas).unwrap();
        let lhs = general_bell_lhs(&correlation_table(&t, &s).unwrap()).ratio;
        let pt = plane_subtensor(&t, &f).unwrap();
        assert!((lhs - necsuf_lhs(&pt, &alphas).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn necsuf_at_zero_angles_uses_only_y() {
        // c₁ = cos(π/2) = 0, c₂ = cos(π) = −1: only T_{y…y} survives.
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let pt = plane_subtensor(&t, &LocalFrame::canonical(2)).unwrap();
        let v = necsuf_lhs(&pt, &[0.0, 0.0]).unwrap();
        assert!((v - pt.get(&[2, 2]).abs()).abs() < 1e-15);
    }

    /// Exhaustive 0.1° scan over (α₁, α₂).
    fn scan_alphas(pt: &PlaneTensor) -> f64 {
        let mut best = 0.0f64;
        for i in 0..1800 {
            for j in 0..1800 {
                let a = [i as f64 * 0.1f64.to_radians(), j as f64 * 0.1f64.to_radians()];
                best = best.max(necsuf_lhs(pt, &a).unwrap());
            }
        }
        best
    }

    #[test]
    fn necsuf_saturation_needs_rotated_planes() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        // Diagonal block: the α scan cannot beat one.
        let canonical = plane_subtensor(&t, &LocalFrame::canonical(2)).unwrap();
        assert!((scan_alphas(&canonical) - 1.0).abs() < 1e-6);
        // Quarter-turn on one qubit spreads the block; α₁ = α₂ = π/4 saturates √2.
        let f = rotate_frame_in_plane(&LocalFrame::canonical(2), &[FRAC_PI_4, 0.0]).unwrap();
        let pt = plane_subtensor(&t, &f).unwrap();
        assert!((scan_alphas(&pt) - SQRT_2).abs() < 1e-6);
        assert!((necsuf_lhs(&pt, &[FRAC_PI_4, FRAC_PI_4]).unwrap() - SQRT_2).abs() < 1e-12);
        let opt = maximize_necsuf(&t, &LocalFrame::canonical(2), &OptimizerOptions::with_restarts(8)).unwrap();
        assert!((opt.value - SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn necsuf_bounded_by_cauchy_schwarz() {
        let t = tensor(StatePreset::werner(3, 0.9));
        let f = LocalFrame::from_normals(&[[0.0, 0.6, 0.8], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let pt = plane_subtensor(&t, &f).unwrap();
        let bound = pt.sum_squares().sqrt();
        for k in 0..200 {
            let a = [k as f64 * 0.11, k as f64 * 0.37, -(k as f64) * 0.05];
            assert!(necsuf_lhs(&pt, &a).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn maximize_bell_state() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let best = maximize_general_bell(&t, &OptimizerOptions::with_restarts(8)).unwrap();
        assert!(
            (best.evaluation.ratio - SQRT_2).abs() < 1e-6,
            "{}",
            best.evaluation.ratio
        );
        assert!(best.evaluation.violated);
    }

    #[test]
    fn maximize_maximally_mixed_finds_nothing() {
        let t = tensor(StatePreset::new(PresetKind::MaximallyMixed, 2));
        let best = maximize_general_bell(&t, &OptimizerOptions::with_restarts(2)).unwrap();
        assert!(best.evaluation.lhs.abs() < 1e-12);
        assert!(!best.evaluation.violated);
    }

    #[test]
    fn sufficient_condition_examples() {
        let bell = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let c = sufficient_lr_condition(&bell, &OptimizerOptions::with_restarts(4)).unwrap();
        assert!(!c.holds && (c.max_sum - 2.0).abs() < 1e-9);
        let prod = tensor(StatePreset::new(PresetKind::ProductPlusXMinusX, 2));
        let c = sufficient_lr_condition(&prod, &OptimizerOptions::with_restarts(4)).unwrap();
        assert!(c.holds && (c.max_sum - 1.0).abs() < 1e-9);
        let w = tensor(StatePreset::werner(2, 0.6));
        let c = sufficient_lr_condition(&w, &OptimizerOptions::with_restarts(4)).unwrap();
        assert!(c.holds);
        let best = maximize_general_bell(&w, &OptimizerOptions::with_restarts(8)).unwrap();
        assert!(!best.evaluation.violated);
    }

    #[test]
    fn settings_file_round_trip() {
        let s = chsh_settings();
        let back = parse_settings_file(settings_to_json(&s).as_bytes()).unwrap();
        assert_eq!(back, s);
        assert!(matches!(
            parse_settings_file(br#"{"pairs":[{"n1":[1,0,0],"n2":[0.5,0,0]}]}"#),
            Err(Error::NotUnitVector { .. })
        ));
        assert!(matches!(parse_settings_file(b"{\"pairs\":"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_settings_file(br#"{"pairs":[]}"#),
            Err(Error::ZeroQubits)
        ));
    }

    #[test]
    fn report_schema() {
        let t = tensor(StatePreset::new(PresetKind::BellPhiMinus, 2));
        let table = correlation_table(&t, &chsh_settings()).unwrap();
        let json = serde_json::to_value(bell_report(&general_bell_lhs(&table), &chsh_settings())).unwrap();
        assert_eq!(json["bound"], 4.0);
        assert_eq!(json["per_s"][3]["s"], serde_json::json!([-1, -1]));
        assert_eq!(json["settings"].as_array().unwrap().len(), 2);
    }
}
