//! Information content of correlations.
//!
//! For a dichotomic observable with outcome probabilities `p⁺, p⁻` the
//! information is `(p⁺ − p⁻)²`; for a joint observation along local axes it
//! equals the squared correlation tensor element. Summing over the `2^N`
//! joint observations within one measurement plane per qubit gives the
//! correlation information, at most one bit for classically composed states.
//! A state whose maximum over all planes exceeds one bit is flagged entangled.
//!
//! The criterion is evaluated for full N-qubit correlations within a single
//! plane per qubit only. Correlations between subsets of qubits and
//! measurements outside the chosen planes are not considered.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spherical, Vec3};
use crate::optim::{self, OptimizerOptions, OptimizerReport};
use crate::pauli::{plane_label, plane_subtensor, CorrelationTensor, LocalFrame};

/// A verdict flips to entangled only above `1 + DECISION_TOL`.
pub const DECISION_TOL: f64 = 1e-7;
/// Tolerance on `p⁺ + p⁻ = 1`.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Information `(p⁺ − p⁻)²` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InfoMeasure(pub f64);

impl InfoMeasure {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn info_from_probabilities(p_plus: f64, p_minus: f64) -> Result<InfoMeasure> {
    if p_plus < 0.0 || p_minus < 0.0 {
        return Err(Error::NegativeProbability(p_plus.min(p_minus)));
    }
    let sum = p_plus + p_minus;
    if !sum.is_finite() || (sum - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilitySum { sum });
    }
    Ok(InfoMeasure((p_plus - p_minus).powi(2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrInfoResult {
    pub frame: LocalFrame,
    /// Indexed like [`crate::pauli::PlaneTensor`] entries.
    pub per_index: Vec<InfoMeasure>,
    pub total: f64,
}

impl CorrInfoResult {
    /// `(label, value)` pairs such as `("xy", 0.25)`.
    pub fn labelled(&self) -> Vec<(String, f64)> {
        let n = self.frame.n_qubits();
        self.per_index
            .iter()
            .enumerate()
            .map(|(i, m)| (plane_label(n, i), m.0))
            .collect()
    }
}

pub fn corr_info(t: &CorrelationTensor, f: &LocalFrame) -> Result<CorrInfoResult> {
    let plane = plane_subtensor(t, f)?;
    let per_index: Vec<InfoMeasure> = plane.entries().iter().map(|e| InfoMeasure(e * e)).collect();
    let total = per_index.iter().map(|m| m.0).sum();
    Ok(CorrInfoResult {
        frame: f.clone(),
        per_index,
        total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub max_total: f64,
    pub argmax_frame: LocalFrame,
    pub entangled: bool,
    pub optimizer: OptimizerReport,
}

impl CriterionVerdict {
    fn new(max_total: f64, argmax_frame: LocalFrame, optimizer: OptimizerReport) -> Self {
        Self {
            max_total,
            entangled: max_total > 1.0 + DECISION_TOL,
            argmax_frame,
            optimizer,
        }
    }

    pub fn export(&self) -> VerdictExport {
        VerdictExport {
            max_total: self.max_total,
            entangled: self.entangled,
            frame: FrameExport {
                normals: self.argmax_frame.normals(),
            },
            optimizer: OptimizerSummary::from(&self.optimizer),
        }
    }
}

/// JSON form of a verdict.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerdictExport {
    pub max_total: f64,
    pub entangled: bool,
    pub frame: FrameExport,
    pub optimizer: OptimizerSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FrameExport {
    pub normals: Vec<Vec3>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizerSummary {
    pub restarts: usize,
    pub converged: bool,
}

impl From<&OptimizerReport> for OptimizerSummary {
    fn from(r: &OptimizerReport) -> Self {
        Self {
            restarts: r.restarts,
            converged: r.converged,
        }
    }
}

/// Correlation information for the planes with the given normals. Only the
/// normals matter: the in-plane sum is invariant under in-plane rotations,
/// so it is computed as `‖(P₁ ⊗ … ⊗ P_N) T‖²` with `P_j = 1 − n_j n_jᵀ`.
pub fn plane_information(cartesian: &[f64], n_qubits: usize, normals: &[Vec3]) -> f64 {
    let mut buf = cartesian.to_vec();
    project_planes(&mut buf, n_qubits, normals.iter().copied());
    buf.iter().map(|v| v * v).sum()
}

/// Applies `P_j = 1 − n_j n_jᵀ` to every mode in place, one rank-1 update per
/// fiber.
fn project_planes(buf: &mut [f64], n_qubits: usize, normals: impl Iterator<Item = Vec3>) {
    debug_assert_eq!(buf.len(), 3usize.pow(n_qubits as u32));
    for (j, n) in normals.enumerate() {
        let inner = 3usize.pow((n_qubits - j - 1) as u32);
        for block in buf.chunks_exact_mut(3 * inner) {
            let (a, rest) = block.split_at_mut(inner);
            let (b, c) = rest.split_at_mut(inner);
            for ((x, y), z) in a.iter_mut().zip(b.iter_mut()).zip(c.iter_mut()) {
                let d = n[0] * *x + n[1] * *y + n[2] * *z;
                *x -= n[0] * d;
                *y -= n[1] * d;
                *z -= n[2] * d;
            }
        }
    }
}

fn normals_from_angles(x: &[f64]) -> Vec<Vec3> {
    x.chunks(2).map(|a| spherical(a[0], a[1])).collect()
}

/// Maximizes the correlation information over all local measurement planes.
///
/// Each plane is parametrized by the polar and azimuthal angle of its
/// normal; the canonical frame (all normals along z) is always one of the
/// starting points.
pub fn maximize_corr_info(t: &CorrelationTensor, opts: &OptimizerOptions) -> Result<CriterionVerdict> {
    maximize_corr_info_from(t, &[], opts)
}

/// Like [`maximize_corr_info`] with the planes of `starts` as extra starting
/// points.
pub fn maximize_corr_info_from(
    t: &CorrelationTensor,
    starts: &[LocalFrame],
    opts: &OptimizerOptions,
) -> Result<CriterionVerdict> {
    let n = t.n_qubits();
    if let Some(f) = starts.iter().find(|f| f.n_qubits() != n) {
        return Err(Error::QubitCountMismatch {
            expected: n,
            found: f.n_qubits(),
        });
    }
    let cart = t.cartesian();
    let objective = |x: &[f64]| {
        let mut buf = cart.clone();
        project_planes(&mut buf, n, x.chunks(2).map(|a| spherical(a[0], a[1])));
        buf.iter().map(|v| v * v).sum()
    };
    let bounds: Vec<(f64, f64)> = (0..n)
        .flat_map(|_| [(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)])
        .collect();
    let mut warm = vec![vec![0.0; 2 * n]];
    warm.extend(starts.iter().map(|f| {
        f.normals()
            .iter()
            .flat_map(|v| [v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0])])
            .collect::<Vec<f64>>()
    }));
    let best = optim::maximize(objective, &bounds, &warm, opts);
    let frame = LocalFrame::from_normals(&normals_from_angles(&best.x))?;
    let info = corr_info(t, &frame)?;
    Ok(CriterionVerdict::new(info.total, frame, best.report))
}

/// Closed form for two qubits: with `M` the 3×3 Cartesian block, the maximum
/// is the sum of the two largest eigenvalues of `MᵀM`, reached when the two
/// planes are orthogonal to the left and right singular vectors of the
/// weakest singular value. Both vectors come from one SVD so that degenerate
/// singular values stay paired.
pub fn two_qubit_info_criterion(t: &CorrelationTensor) -> Result<CriterionVerdict> {
    if t.n_qubits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "two-qubit criterion needs 2 qubits, got {}",
            t.n_qubits()
        )));
    }
    let m = Matrix3::from_row_slice(&t.cartesian());
    let mut ev: Vec<f64> = SymmetricEigen::new(m.transpose() * m)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let max_total = ev[0] + ev[1];
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let k = svd.singular_values.imin();
    let unit = |x: [f64; 3]| -> Vec3 {
        let l = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        [x[0] / l, x[1] / l, x[2] / l]
    };
    let n1 = unit([u[(0, k)], u[(1, k)], u[(2, k)]]);
    let n2 = unit([v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)]]);
    let frame = LocalFrame::from_normals(&[n1, n2])?;
    Ok(CriterionVerdict::new(max_total, frame, OptimizerReport::exact()))
}
