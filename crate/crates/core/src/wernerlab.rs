//! GHZ-Werner states `V |GHZ⟩⟨GHZ| + (1−V) 1/2^N`: closed-form in-plane
//! correlations, component counts, visibility thresholds and numerical scans
//! of both criteria over the visibility.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellgen::{maximize_general_bell, refine_general_bell};
use crate::error::{Error, Result};
use crate::fmt::format_sig17;
use crate::infocrit::{maximize_corr_info, maximize_corr_info_from};
use crate::optim::OptimizerOptions;
use crate::pauli::{correlation_tensor, PlaneTensor};
use crate::qstate::{build_preset, check_qubits, StatePreset, DEFAULT_MAX_QUBITS};

pub const DEFAULT_GRID: usize = 101;
/// Slack on the visibility threshold for the local-realism verdict.
pub const THRESHOLD_TOL: f64 = 1e-9;
pub const CSV_HEADER: &str = "V,info_sum,bell_lhs,bell_ratio,info_entangled,bell_violated";

fn check_visibility(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidVisibility(v))
    }
}

/// In-plane tensor in the canonical frame: `T = V cos(m_y π/2)` with `m_y`
/// the number of y indices, evaluated exactly (0 for odd `m_y`).
pub fn werner_inplane_tensor(n: usize, v: f64) -> Result<PlaneTensor> {
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    check_visibility(v)?;
    let entries = (0..1usize << n)
        .map(|flat| match flat.count_ones() % 4 {
            0 => v,
            2 => -v,
            _ => 0.0,
        })
        .collect();
    PlaneTensor::from_entries(n, entries)
}

/// Number of nonzero in-plane components, `Σ_k C(N, 2k) = 2^{N−1}`.
pub fn count_nonzero_inplane(n: usize) -> u64 {
    assert!((1..64).contains(&n), "qubit count out of range");
    1u64 << (n - 1)
}

/// Largest visibility compatible with local realism, `(1/√2)^{N−1}`.
pub fn visibility_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "threshold needs at least 2 qubits, got {n}"
        )));
    }
    // Square root of an exact power of two: correctly rounded for every N.
    Ok(0.5f64.powi(n as i32 - 1).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerAnalysis {
    pub n_qubits: usize,
    pub visibility: f64,
    pub nonzero_inplane_count: u64,
    /// `2^{N−1} V²`.
    pub info_sum: f64,
    pub threshold: f64,
    pub lr_describable: bool,
}

pub fn analyze_werner(n: usize, v: f64) -> Result<WernerAnalysis> {
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    check_visibility(v)?;
    let threshold = visibility_threshold(n)?;
    let count = count_nonzero_inplane(n);
    Ok(WernerAnalysis {
        n_qubits: n,
        visibility: v,
        nonzero_inplane_count: count,
        info_sum: count as f64 * v * v,
        threshold,
        lr_describable: v <= threshold + THRESHOLD_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub v: f64,
    pub info_sum: f64,
    pub bell_lhs: f64,
    pub bell_ratio: f64,
    pub info_entangled: bool,
    pub bell_violated: bool,
}

/// Evaluates both criteria numerically on `grid` equally spaced visibilities
/// in `[0, 1]`.
///
/// Both searches run in full once at `V = 1`; every grid point then refines
/// the unit-visibility optima on its own state. Rows are ordered by `V`.
pub fn visibility_scan(n: usize, grid: usize, opts: &OptimizerOptions) -> Result<Vec<ScanRow>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points, got {grid}"
        )));
    }
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    let tensor_at = |v: f64| correlation_tensor(&build_preset(&StatePreset::werner(n, v))?);
    let top = tensor_at(1.0)?;
    let info_ref = maximize_corr_info(&top, opts)?;
    let bell_ref = maximize_general_bell(&top, opts)?;
    (0..grid)
        .into_par_iter()
        .map(|i| {
            let v = i as f64 / (grid - 1) as f64;
            let t = tensor_at(v)?;
            let local = OptimizerOptions { restarts: 0, ..*opts };
            let info = maximize_corr_info_from(&t, std::slice::from_ref(&info_ref.argmax_frame), &local)?;
            let bell = refine_general_bell(&t, &bell_ref.settings, &local)?;
            Ok(ScanRow {
                v,
                info_sum: info.max_total,
                bell_lhs: bell.evaluation.lhs,
                bell_ratio: bell.evaluation.ratio,
                info_entangled: info.entangled,
                bell_violated: bell.evaluation.violated,
            })
        })
        .collect()
}

/// Consecutive grid visibilities `(below, above)` around the first row where
/// `flag` switches on.
pub fn crossing(rows: &[ScanRow], flag: impl Fn(&ScanRow) -> bool) -> Option<(f64, f64)> {
    rows.windows(2)
        .find(|w| !flag(&w[0]) && flag(&w[1]))
        .map(|w| (w[0].v, w[1].v))
}

pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_sig17(r.v),
            format_sig17(r.info_sum),
            format_sig17(r.bell_lhs),
            format_sig17(r.bell_ratio),
            r.info_entangled,
            r.bell_violated
        ));
    }
    out
}
