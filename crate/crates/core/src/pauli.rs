//! Pauli correlation tensor `T_{x₁…x_N} = Tr[ρ σ_{x₁} ⊗ … ⊗ σ_{x_N}]`, its
//! in-plane sub-tensors relative to local frames, and frame rotations.
//!
//! Multi-indices are stored flat with the last qubit fastest. Full tensors use
//! the labels `0, x, y, z` (`0..4`); plane tensors use `x, y` (`1, 2`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, contract_modes, cross, dot, norm, Vec3};
use crate::qstate::{Complex, DensityMatrix, Pauli};

/// Tolerance on the imaginary part of `Tr[ρ σ…]`.
pub const IMAG_TOL: f64 = 1e-10;
/// Tolerance on the orthonormality of local frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Largest qubit count for which the tensor is computed entry by entry.
pub const DIRECT_TRACE_MAX_QUBITS: usize = 6;

/// Full correlation tensor over `{0,1,2,3}^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    n_qubits: usize,
    entries: Vec<f64>,
}

impl CorrelationTensor {
    /// Wraps raw entries, checking the shape, the range `[−1, 1]` and
    /// `T_{0…0} = 1`.
    pub fn from_entries(n_qubits: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = 1usize << (2 * n_qubits);
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "tensor entries",
                expected,
                found: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite() || e.abs() > 1.0 + 1e-9) {
            return Err(Error::InvalidArgument("tensor entry outside [-1, 1]".into()));
        }
        if (entries[0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("T_0…0 = {} differs from 1", entries[0])));
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry at a multi-index of Pauli labels (`0..4` each).
    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.n_qubits);
        self.entries[index.iter().fold(0, |acc, &x| acc * 4 + x)]
    }

    /// Cartesian part (labels x, y, z only) as a flat `3^N` array.
    pub fn cartesian(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut c| {
                let mut idx = 0usize;
                let mut mul = 1usize;
                for _ in 0..n {
                    idx += (c % 3 + 1) * mul;
                    c /= 3;
                    mul *= 4;
                }
                self.entries[idx]
            })
            .collect()
    }

    pub fn export(&self) -> TensorExport {
        TensorExport {
            n_qubits: self.n_qubits,
            order: "xN_fastest".into(),
            labels: ["0", "x", "y", "z"].map(String::from).to_vec(),
            entries: self.entries.clone(),
        }
    }
}

/// JSON form of a correlation tensor.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorExport {
    pub n_qubits: usize,
    pub order: String,
    pub labels: Vec<String>,
    pub entries: Vec<f64>,
}

/// Per-qubit orthonormal pair `(a₁, a₂)` spanning that qubit's x–y plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    axes: Vec<(Vec3, Vec3)>,
}

impl LocalFrame {
    pub fn new(axes: Vec<(Vec3, Vec3)>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::ZeroQubits);
        }
        for (qubit, (a1, a2)) in axes.iter().enumerate() {
            let residual = (norm(a1) - 1.0)
                .abs()
                .max((norm(a2) - 1.0).abs())
                .max(dot(a1, a2).abs());
            if !residual.is_finite() || residual > FRAME_TOL {
                return Err(Error::NonOrthonormalFrame { qubit, residual });
            }
        }
        Ok(Self { axes })
    }

    /// `a₁ = x̂`, `a₂ = ŷ` for every qubit.
    pub fn canonical(n_qubits: usize) -> Self {
        Self {
            axes: vec![([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]); n_qubits],
        }
    }

    /// Frame whose planes have the given unit normals. The in-plane
    /// orientation follows a fixed rule: `a₁` is the reference axis projected
    /// onto the plane, where the reference is `x̂` for normals within ~25° of
    /// the z axis and `ẑ` otherwise, and `a₂ = normal × a₁`.
    pub fn from_normals(normals: &[Vec3]) -> Result<Self> {
        let axes = normals
            .iter()
            .map(|nrm| {
                let len = norm(nrm);
                if !len.is_finite() || (len - 1.0).abs() > 1e-8 {
                    return Err(Error::NotUnitVector { norm: len });
                }
                let nrm = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let reference = if nrm[2].abs() > 0.9 {
                    [1.0, 0.0, 0.0]
                } else {
                    [0.0, 0.0, 1.0]
                };
                let a1 = axpy(1.0, &reference, -dot(&reference, &nrm), &nrm);
                let l = norm(&a1);
                let a1 = [a1[0] / l, a1[1] / l, a1[2] / l];
                let a2 = cross(&nrm, &a1);
                Ok((a1, a2))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[(Vec3, Vec3)] {
        &self.axes
    }

    /// Plane normal `a₁ × a₂` of one qubit.
    pub fn normal(&self, qubit: usize) -> Vec3 {
        let (a1, a2) = &self.axes[qubit];
        cross(a1, a2)
    }

    pub fn normals(&self) -> Vec<Vec3> {
        (0..self.n_qubits()).map(|j| self.normal(j)).collect()
    }
}

/// In-plane sub-tensor over `{x, y}^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneTensor {
    n_qubits: usize,
    entries: Vec<f64>,
}

impl PlaneTensor {
    pub fn from_entries(n_qubits: usize, entries: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        let expected = 1usize << n_qubits;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                n_qubits,
                what: "plane tensor entries",
                expected,
                found: entries.len(),
            });
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Flat entries; bit `N−1−j` of the position is 0 for x and 1 for y on qubit `j`.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry at a multi-index with values 1 (x) or 2 (y).
    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.n_qubits);
        self.entries[index.iter().fold(0, |acc, &x| acc * 2 + (x - 1))]
    }

    pub fn sum_squares(&self) -> f64 {
        self.entries.iter().map(|t| t * t).sum()
    }
}

/// Multi-index label such as `"xyy"` for a flat plane-tensor position.
pub fn plane_label(n_qubits: usize, flat: usize) -> String {
    (0..n_qubits)
        .map(|j| {
            if (flat >> (n_qubits - 1 - j)) & 1 == 0 {
                'x'
            } else {
                'y'
            }
        })
        .collect()
}

/// Computes the full correlation tensor of a state.
pub fn correlation_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    let raw = if rho.n_qubits() <= DIRECT_TRACE_MAX_QUBITS {
        traces_direct(rho)
    } else {
        traces_contracted(rho)
    };
    finish_tensor(rho.n_qubits(), raw)
}

/// Entry-by-entry traces, `Σ_b ρ[b, b⊕f]·phase(b)` for each Pauli string.
pub fn correlation_tensor_direct(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    finish_tensor(rho.n_qubits(), traces_direct(rho))
}

/// Qubit-by-qubit contraction of ρ with the single-qubit Pauli maps.
pub fn correlation_tensor_contracted(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    finish_tensor(rho.n_qubits(), traces_contracted(rho))
}

fn finish_tensor(n_qubits: usize, raw: Vec<Complex>) -> Result<CorrelationTensor> {
    let residue = raw.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residue > IMAG_TOL {
        return Err(Error::NonRealCorrelation { residue });
    }
    Ok(CorrelationTensor {
        n_qubits,
        entries: raw.into_iter().map(|c| c.re).collect(),
    })
}

fn traces_direct(rho: &DensityMatrix) -> Vec<Complex> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let powers_of_i = [
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(-1.0, 0.0),
        Complex::new(0.0, -1.0),
    ];
    (0..1usize << (2 * n))
        .map(|flat| {
            // Decode the Pauli string into flip / sign masks (qubit 1 = MSB).
            let (mut flip, mut sign, mut n_y) = (0usize, 0usize, 0usize);
            for j in 0..n {
                let p = (flat >> (2 * (n - 1 - j))) & 3;
                let bit = 1 << (n - 1 - j);
                match p {
                    1 => flip |= bit,
                    2 => {
                        flip |= bit;
                        sign |= bit;
                        n_y += 1;
                    }
                    3 => sign |= bit,
                    _ => {}
                }
            }
            // ⟨c|σ|b⟩ for c = b ⊕ flip is i^{n_y}·(−1)^{popcount(b & sign)}.
            let mut acc = Complex::new(0.0, 0.0);
            for b in 0..dim {
                let v = rho.get(b, b ^ flip);
                if (b & sign).count_ones() % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc * powers_of_i[n_y % 4]
        })
        .collect()
}

/// `W[x][p]` with `p = 2r + c`: the weight `σ_x[c, r]` of `ρ[r, c]` in `Tr[ρ σ_x]`.
fn trace_map() -> [Complex; 16] {
    let mut w = [Complex::new(0.0, 0.0); 16];
    for p in Pauli::ALL {
        let m = p.matrix();
        for r in 0..2 {
            for c in 0..2 {
                w[p.index() * 4 + 2 * r + c] = m[c][r];
            }
        }
    }
    w
}

fn interleaved_index(n: usize, r: usize, c: usize) -> usize {
    (0..n).fold(0, |acc, j| {
        let shift = n - 1 - j;
        acc * 4 + 2 * ((r >> shift) & 1) + ((c >> shift) & 1)
    })
}

fn traces_contracted(rho: &DensityMatrix) -> Vec<Complex> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let mut inter = vec![Complex::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            inter[interleaved_index(n, r, c)] = rho.get(r, c);
        }
    }
    let w = trace_map();
    contract_modes(&inter, n, 4, 4, &vec![w; n])
}

/// Rebuilds `ρ = 2^−N Σ T_{x₁…x_N} σ_{x₁} ⊗ … ⊗ σ_{x_N}` from a full tensor.
pub fn reconstruct_density(t: &CorrelationTensor) -> Result<DensityMatrix> {
    let n = t.n_qubits();
    let dim = 1usize << n;
    // V[p][x] = σ_x[r, c] / 2 with p = 2r + c.
    let mut v = [Complex::new(0.0, 0.0); 16];
    for p in Pauli::ALL {
        let m = p.matrix();
        for r in 0..2 {
            for c in 0..2 {
                v[(2 * r + c) * 4 + p.index()] = m[r][c] * 0.5;
            }
        }
    }
    let coeffs: Vec<Complex> = t.entries().iter().map(|&e| Complex::new(e, 0.0)).collect();
    let inter = contract_modes(&coeffs, n, 4, 4, &vec![v; n]);
    let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            entries[r * dim + c] = inter[interleaved_index(n, r, c)];
        }
    }
    DensityMatrix::from_entries(n, entries)
}

fn check_frame(t_qubits: usize, f: &LocalFrame) -> Result<()> {
    if f.n_qubits() != t_qubits {
        return Err(Error::QubitCountMismatch {
            expected: t_qubits,
            found: f.n_qubits(),
        });
    }
    Ok(())
}

/// Contracts the Cartesian tensor with `a_{x₁,1} ⊗ … ⊗ a_{x_N,N}`.
pub fn plane_subtensor(t: &CorrelationTensor, f: &LocalFrame) -> Result<PlaneTensor> {
    check_frame(t.n_qubits(), f)?;
    // Frames built through `LocalFrame::new` are already orthonormal.
    let mats: Vec<[f64; 6]> = f
        .axes()
        .iter()
        .map(|(a1, a2)| [a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]])
        .collect();
    let entries = contract_modes(&t.cartesian(), t.n_qubits(), 3, 2, &mats);
    Ok(PlaneTensor {
        n_qubits: t.n_qubits(),
        entries,
    })
}

/// Rotates each qubit's pair by its angle about the plane normal:
/// `a₁ ↦ cos θ a₁ + sin θ a₂`, `a₂ ↦ −sin θ a₁ + cos θ a₂`.
pub fn rotate_frame_in_plane(f: &LocalFrame, angles: &[f64]) -> Result<LocalFrame> {
    if angles.len() != f.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: f.n_qubits(),
            found: angles.len(),
        });
    }
    let axes = f
        .axes()
        .iter()
        .zip(angles)
        .map(|((a1, a2), &th)| {
            let (s, c) = th.sin_cos();
            (axpy(c, a1, s, a2), axpy(-s, a1, c, a2))
        })
        .collect();
    Ok(LocalFrame { axes })
}

/// Two-qubit frame in which the in-plane block is diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub frame: LocalFrame,
    pub plane: PlaneTensor,
    /// In-plane rotation angles applied to the input frame.
    pub angles: [f64; 2],
}

/// Rotates both qubits within their planes so that `T'_xy = T'_yx = 0`.
///
/// Writes the 2×2 block as `h·rot(α₁) + g·refl(α₂)`; the rotations by
/// `(α₂ ± α₁)/2` turn it into `diag(h + g, h − g)`. Signs of the diagonal are
/// not normalized.
pub fn canonical_two_qubit_frame(t: &CorrelationTensor, f: &LocalFrame) -> Result<CanonicalForm> {
    if t.n_qubits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "canonical frame needs 2 qubits, got {}",
            t.n_qubits()
        )));
    }
    let block = plane_subtensor(t, f)?;
    let b = block.entries();
    let (a, bb, c, d) = (b[0], b[1], b[2], b[3]);
    let alpha1 = ((c - bb) / 2.0).atan2((a + d) / 2.0);
    let alpha2 = ((c + bb) / 2.0).atan2((a - d) / 2.0);
    let angles = [(alpha2 + alpha1) / 2.0, (alpha2 - alpha1) / 2.0];
    let frame = rotate_frame_in_plane(f, &angles)?;
    let plane = plane_subtensor(t, &frame)?;
    Ok(CanonicalForm { frame, plane, angles })
}
