//! Concurrence of two-qubit states: the general Wootters construction, the
//! X-state shortcut, the model's closed form and its zero-temperature limit.

use crate::dot::{boltzmann_exponents, DotParams, ThermalElements};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, singular_values, sqrt_psd, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Descending, nonnegative.
    pub lambdas: [f64; 4],
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
///
/// The `λᵢ` are the square roots of the spectrum of `√ρ·ρ̃·√ρ`, where
/// `ρ̃ = (σʸ⊗σʸ)ρ*(σʸ⊗σʸ)`. They are obtained as the singular values of
/// `√ρ·(σʸ⊗σʸ)·√ρ*`, whose Gram matrix is exactly `√ρ·ρ̃·√ρ`; this avoids
/// taking square roots of roundoff-sized eigenvalues.
pub fn wootters_concurrence(rho: &ComplexMatrix) -> Result<ConcurrenceResult> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.validate_density()?;
    let yy = kron(&pauli::y(), &pauli::y());
    let root = sqrt_psd(rho)?;
    let factor = &(&root * &yy) * &root.conj();
    let sv = singular_values(&factor)?;
    let lambdas = [sv[0], sv[1], sv[2], sv[3]];
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceResult { value, lambdas })
}

/// `C = (2/Z)·max(|y| − √(uv), 0)` for the thermal X-state.
pub fn xstate_concurrence(e: &ThermalElements) -> f64 {
    (2.0 / e.z * (e.y.abs() - (e.u * e.v).sqrt())).max(0.0)
}

/// Closed-form concurrence of the dot at temperature `T`. `T = 0` is routed
/// to [`ground_state_concurrence`].
pub fn model_concurrence(p: &DotParams) -> Result<f64> {
    if p.t == 0.0 {
        return Ok(ground_state_concurrence(p));
    }
    p.require_positive_t()?;
    let ex = boltzmann_exponents(p);
    let shift = ex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let [u, v, a, b] = ex.map(|e| (e - shift).exp());
    let z = u + v + a + b;
    Ok(((b - 3.0 * a) / z).max(0.0))
}

/// Concurrence of the zero-temperature state.
///
/// `1` below the level crossing `|r| = k0/4`, `0.5` exactly on it, `0` above
/// it or whenever `k0 ≤ 0`.
pub fn ground_state_concurrence(p: &DotParams) -> f64 {
    let field = p.r.abs();
    let crossing = p.k0 / 4.0;
    if p.k0 <= 0.0 || field > crossing {
        0.0
    } else if field == crossing {
        0.5
    } else {
        1.0
    }
}

/// Temperature above which the thermal state is separable, `k0 / (4 ln 3)`.
/// `None` when `k0 ≤ 0`, where the state is never entangled.
pub fn critical_temperature(k0: f64) -> Option<f64> {
    (k0 > 0.0).then(|| k0 / (4.0 * 3f64.ln()))
}
