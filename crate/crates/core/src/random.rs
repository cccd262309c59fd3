//! Seeded random states and settings for sampling experiments and tests.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bellgen::SettingsPair;
use crate::error::Result;
use crate::linalg::Vec3;
use crate::qstate::{from_state_vector, Complex, DensityMatrix, StateVector};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-random unit vector in R³.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if l > 1e-6 {
            return [v[0] / l, v[1] / l, v[2] / l];
        }
    }
}

fn gaussian_amplitudes<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex> {
    (0..len).map(|_| Complex::new(normal(rng), normal(rng))).collect()
}

/// Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::normalized(n_qubits, gaussian_amplitudes(1 << n_qubits, rng))
}

/// Product of independent Haar-random qubit states.
pub fn product_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    let qubits: Vec<[Complex; 2]> = (0..n_qubits)
        .map(|_| {
            let a = gaussian_amplitudes(2, rng);
            [a[0], a[1]]
        })
        .collect();
    StateVector::product(&qubits)
}

/// Random convex weights (flat Dirichlet).
fn weights<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..count).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn mixture<R: Rng + ?Sized>(
    n_qubits: usize,
    terms: usize,
    rng: &mut R,
    draw: impl Fn(usize, &mut R) -> Result<StateVector>,
) -> Result<DensityMatrix> {
    let w = weights(terms.max(1), rng);
    let mut acc: Option<DensityMatrix> = None;
    let mut acc_weight = 0.0;
    for wi in w {
        let rho = from_state_vector(&draw(n_qubits, rng)?)?;
        acc = Some(match acc {
            None => rho,
            // acc holds weight acc_weight; fold in the next term.
            Some(prev) => prev.mix(&rho, acc_weight / (acc_weight + wi))?,
        });
        acc_weight += wi;
    }
    Ok(acc.expect("at least one term"))
}

/// Mixture of `terms` Haar-random pure states with random weights.
pub fn mixed_state<R: Rng + ?Sized>(n_qubits: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    mixture(n_qubits, terms, rng, |n, r| pure_state(n, r))
}

/// Mixture of `terms` random product states: always separable.
pub fn separable_state<R: Rng + ?Sized>(n_qubits: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    mixture(n_qubits, terms, rng, |n, r| product_state(n, r))
}

/// Two independent random directions per qubit.
pub fn settings<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> SettingsPair {
    let pairs = (0..n_qubits).map(|_| (unit_vector(rng), unit_vector(rng))).collect();
    SettingsPair::new(pairs).expect("unit vectors")
}
