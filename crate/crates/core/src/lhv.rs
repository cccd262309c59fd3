//! Explicit local hidden-variable models for correlation tables that satisfy
//! the general Bell inequality.
//!
//! For every sign tuple `s` the hidden probability is
//! `p(s) = 2^−N |Σ_k s₁^{k₁} … s_N^{k_N} E(k)|`, carried by the deterministic
//! strategies with `A_j(n₁) = s_j A_j(n₂)` whose product `Π_j A_j(n₂)` has the
//! sign of the expression inside the modulus. The mass is split uniformly
//! over the `2^{N−1}` such strategies. Whatever probability is left over goes
//! to noise that is uniform over all `4^N` strategies and contributes nothing
//! to any correlation function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bellgen::{general_bell_lhs, signed_sums, CorrelationTable};
use crate::error::{Error, Result};

pub const NOISE_KIND: &str = "uniform_over_all_strategies";
/// Tolerance on total probability.
pub const MASS_TOL: f64 = 1e-10;

/// Predetermined outcomes `A_j(n₁)`, `A_j(n₂)` for every qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a1: Vec<i8>,
    pub a2: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn n_qubits(&self) -> usize {
        self.a1.len()
    }

    /// `Π_j A_j(n_{k_j})` for a setting mask (bit `N−1−j` set iff `k_j = 2`).
    pub fn product(&self, kmask: usize) -> f64 {
        let n = self.n_qubits();
        (0..n)
            .map(|j| {
                if (kmask >> (n - 1 - j)) & 1 == 0 {
                    self.a1[j]
                } else {
                    self.a2[j]
                }
            })
            .product::<i8>() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    pub n_qubits: usize,
    pub atoms: Vec<(DeterministicStrategy, f64)>,
    pub noise_weight: f64,
}

impl LhvModel {
    /// Checks normalization and non-negativity; probabilities down to
    /// `−1e−12` are clamped to zero.
    pub fn new(n_qubits: usize, mut atoms: Vec<(DeterministicStrategy, f64)>, noise_weight: f64) -> Result<Self> {
        if atoms
            .iter()
            .any(|(s, _)| s.a1.len() != n_qubits || s.a2.len() != n_qubits)
        {
            return Err(Error::InvalidArgument(
                "strategy length differs from qubit count".into(),
            ));
        }
        for (_, p) in atoms.iter_mut() {
            if *p < -1e-12 || !p.is_finite() {
                return Err(Error::NegativeProbability(*p));
            }
            *p = p.max(0.0);
        }
        if noise_weight < -1e-12 {
            return Err(Error::NegativeProbability(noise_weight));
        }
        let sum: f64 = atoms.iter().map(|(_, p)| p).sum::<f64>() + noise_weight;
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::ProbabilitySum { sum });
        }
        Ok(Self {
            n_qubits,
            atoms,
            noise_weight: noise_weight.max(0.0),
        })
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }

    pub fn export(&self) -> ModelExport {
        ModelExport {
            n_qubits: self.n_qubits,
            atoms: self
                .atoms
                .iter()
                .map(|(s, p)| AtomExport {
                    a1: s.a1.clone(),
                    a2: s.a2.clone(),
                    p: *p,
                })
                .collect(),
            noise_weight: self.noise_weight,
        }
    }
}

/// JSON form of a model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelExport {
    pub n_qubits: usize,
    pub atoms: Vec<AtomExport>,
    pub noise_weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtomExport {
    pub a1: Vec<i8>,
    pub a2: Vec<i8>,
    pub p: f64,
}

/// Builds the model for a table satisfying the general Bell inequality.
///
/// Sign classes whose signed sum is exactly zero get no mass. Tables that
/// violate the inequality are refused with the offending left-hand side.
pub fn construct_lhv(table: &CorrelationTable) -> Result<LhvModel> {
    let eval = general_bell_lhs(table);
    if eval.violated {
        return Err(Error::BellViolation {
            lhs: eval.lhs,
            bound: eval.bound,
        });
    }
    let n = table.n_qubits();
    let scale = 1.0 / (1u64 << n) as f64;
    let share = 1.0 / (1u64 << (n - 1)) as f64;
    let mut atoms = Vec::new();
    for (smask, inner) in signed_sums(table).into_iter().enumerate() {
        if inner == 0.0 {
            continue;
        }
        let p = scale * inner.abs();
        let want: i8 = if inner > 0.0 { 1 } else { -1 };
        for a2mask in 0..1usize << n {
            let a2: Vec<i8> = (0..n)
                .map(|j| if (a2mask >> (n - 1 - j)) & 1 == 1 { -1 } else { 1 })
                .collect();
            if a2.iter().product::<i8>() != want {
                continue;
            }
            let a1 = (0..n)
                .map(|j| if (smask >> (n - 1 - j)) & 1 == 1 { -a2[j] } else { a2[j] })
                .collect();
            atoms.push((DeterministicStrategy { a1, a2 }, p * share));
        }
    }
    let mass: f64 = atoms.iter().map(|(_, p)| p).sum();
    Ok(LhvModel {
        n_qubits: n,
        atoms,
        noise_weight: (1.0 - mass).max(0.0),
    })
}

/// Correlation contribution of weight-one uniform noise at a setting mask:
/// a product of per-qubit outcome means over the four local strategies,
/// each of which is zero.
pub fn noise_contribution(n_qubits: usize, kmask: usize) -> f64 {
    let local: [[i8; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
    (0..n_qubits)
        .map(|j| {
            let k = (kmask >> (n_qubits - 1 - j)) & 1;
            local.iter().map(|s| s[k] as f64).sum::<f64>() / 4.0
        })
        .product()
}

/// Correlations predicted by the model at every setting of the table.
pub fn model_table(model: &LhvModel) -> Vec<f64> {
    let n = model.n_qubits;
    (0..1usize << n)
        .map(|kmask| {
            let atoms: f64 = model.atoms.iter().map(|(s, p)| p * s.product(kmask)).sum();
            let noise = model.noise_weight * noise_contribution(n, kmask);
            assert_eq!(noise, 0.0, "uniform noise must not contribute");
            atoms + noise
        })
        .collect()
}

/// Largest `|E_model(k) − E(k)|` over all settings.
pub fn verify_lhv(model: &LhvModel, table: &CorrelationTable) -> Result<f64> {
    if model.n_qubits != table.n_qubits() {
        return Err(Error::QubitCountMismatch {
            expected: table.n_qubits(),
            found: model.n_qubits,
        });
    }
    Ok(model_table(model)
        .iter()
        .zip(table.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Draws one strategy: an atom with its probability, otherwise a uniformly
/// random strategy from the noise.
pub fn sample_strategy<R: Rng + ?Sized>(model: &LhvModel, rng: &mut R) -> DeterministicStrategy {
    let mut u: f64 = rng.gen::<f64>() * (model.atom_mass() + model.noise_weight);
    for (s, p) in &model.atoms {
        if u < *p {
            return s.clone();
        }
        u -= p;
    }
    let mut coin = || if rng.gen::<bool>() { 1 } else { -1 };
    let a1 = (0..model.n_qubits).map(|_| coin()).collect();
    let a2 = (0..model.n_qubits).map(|_| coin()).collect();
    DeterministicStrategy { a1, a2 }
}

/// Empirical correlation table of a sample of strategies.
pub fn empirical_table(n_qubits: usize, samples: &[DeterministicStrategy]) -> Result<CorrelationTable> {
    let m = samples.len().max(1) as f64;
    let values = (0..1usize << n_qubits)
        .map(|k| samples.iter().map(|s| s.product(k)).sum::<f64>() / m)
        .collect();
    CorrelationTable::new(n_qubits, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellgen::{correlation_table, SettingsPair};
    use crate::pauli::correlation_tensor;
    use crate::qstate::{build_preset, PresetKind, StatePreset};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_table_is_pure_noise() {
        let m = construct_lhv(&CorrelationTable::new(2, vec![0.0; 4]).unwrap()).unwrap();
        assert!(m.atoms.is_empty());
        assert_eq!(m.noise_weight, 1.0);
        assert_eq!(
            verify_lhv(&m, &CorrelationTable::new(2, vec![0.0; 4]).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn pr_box_is_refused() {
        let t = CorrelationTable::new(2, vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        match construct_lhv(&t) {
            Err(Error::BellViolation { lhs, bound }) => {
                assert_eq!(bound, 4.0);
                assert!((lhs - 8.0).abs() < 1e-12);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    fn product_table() -> CorrelationTable {
        let t =
            correlation_tensor(&build_preset(&StatePreset::new(PresetKind::ProductPlusXMinusX, 2)).unwrap()).unwrap();
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        correlation_table(&t, &SettingsPair::new(vec![(x, y), (x, y)]).unwrap()).unwrap()
    }

    #[test]
    fn product_state_model_round_trip() {
        let table = product_table();
        assert!((table.values()[0] + 1.0).abs() < 1e-12);
        assert!(table.values()[1..].iter().all(|v| v.abs() < 1e-12));
        let m = construct_lhv(&table).unwrap();
        assert!(verify_lhv(&m, &table).unwrap() <= 1e-10);
        assert!((m.atom_mass() + m.noise_weight - 1.0).abs() < 1e-12);
        LhvModel::new(m.n_qubits, m.atoms.clone(), m.noise_weight).unwrap();
    }

    #[test]
    fn perturbed_model_is_detected() {
        let table = product_table();
        let mut m = construct_lhv(&table).unwrap();
        m.atoms[0].1 += 0.1;
        assert!(verify_lhv(&m, &table).unwrap() > 0.05);
        assert!(LhvModel::new(m.n_qubits, m.atoms.clone(), m.noise_weight).is_err());
    }

    #[test]
    fn noise_contributes_nothing() {
        for n in 1..=6 {
            for k in 0..1usize << n {
                assert_eq!(noise_contribution(n, k), 0.0);
            }
        }
    }

    #[test]
    fn single_atom_is_always_drawn() {
        let s = DeterministicStrategy {
            a1: vec![1, -1],
            a2: vec![-1, -1],
        };
        let m = LhvModel::new(2, vec![(s.clone(), 1.0)], 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| sample_strategy(&m, &mut rng) == s));
    }

    #[test]
    fn model_validation() {
        let s = DeterministicStrategy {
            a1: vec![1],
            a2: vec![1],
        };
        assert!(matches!(
            LhvModel::new(1, vec![(s.clone(), -0.1)], 1.1),
            Err(Error::NegativeProbability(_))
        ));
        assert!(matches!(
            LhvModel::new(1, vec![(s.clone(), 0.5)], 0.4),
            Err(Error::ProbabilitySum { .. })
        ));
        assert!(LhvModel::new(2, vec![(s, 0.5)], 0.5).is_err());
    }

    #[test]
    fn export_schema() {
        let m = construct_lhv(&product_table()).unwrap();
        let json = serde_json::to_value(m.export()).unwrap();
        assert_eq!(json["n_qubits"], 2);
        assert_eq!(json["atoms"][0]["a1"].as_array().unwrap().len(), 2);
        assert!(json["noise_weight"].is_number());
    }
}
