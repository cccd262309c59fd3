//! Entanglement analysis of N-qubit states.
//!
//! Two independent criteria are evaluated from the Pauli correlation tensor of
//! a state:
//!
//! * the correlation-information criterion: the sum of squared correlation
//!   tensor elements over one measurement plane per qubit, maximized over the
//!   planes ([`infocrit`]); more than one bit signals entanglement;
//! * the general two-setting Bell inequality, which summarizes every
//!   correlation-function Bell inequality with two dichotomic observables per
//!   party ([`bellgen`]); whenever it holds, [`lhv`] builds an explicit local
//!   hidden-variable model reproducing the correlations.
//!
//! Qubit ordering: qubit 1 is the most significant bit of a basis index, and
//! every multi-index array in this crate stores the last qubit fastest.

pub mod bellgen;
pub mod error;
pub mod infocrit;
pub mod lhv;
pub mod optim;
pub mod pauli;
pub mod qstate;
pub mod random;
pub mod wernerlab;

mod fmt;
mod linalg;

pub use error::{Error, Result};
pub use fmt::format_sig17;
pub use linalg::Vec3;
