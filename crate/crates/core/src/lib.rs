//! Thermal entanglement and quantum teleportation through a two-spin
//! quantum-dot channel.
//!
//! The dot's four low-energy states map onto two spin-½ particles coupled by
//! `H = (k0/4) S₁·S₂ − r (S₁ᶻ + S₂ᶻ)`. The crate provides
//!
//! - [`linalg`]: small dense complex matrices, Kronecker products, partial
//!   traces and a Jacobi Hermitian eigensolver;
//! - [`dot`]: the Hamiltonian, its spectrum and the Gibbs state, both in
//!   closed form and from numerical diagonalization;
//! - [`entanglement`]: Wootters concurrence and the model's closed forms;
//! - [`teleport`]: the standard one-qubit teleportation protocol with this
//!   state as channel, per-outcome collapse, fidelities and Bloch averages;
//! - [`sweep`] and [`verify`]: parameter sweeps and self-checks behind the
//!   `qdot` command-line tool.

pub mod cli;
pub mod dot;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod sweep;
pub mod teleport;
pub mod verify;

pub use dot::{DotParams, ThermalElements};
pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix};
pub use teleport::{AveragingMethod, BellOutcome, InputState};
