//! Reduced two-spin Hamiltonian of the quantum dot, its exact eigensystem and
//! the thermal equilibrium state.
//!
//! The Hamiltonian is `H = (k0/4) S₁·S₂ − r (S₁ᶻ + S₂ᶻ)` with `r = γB₀` and
//! natural units `ħ = k_B = 1`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, pauli, real, Complex, ComplexMatrix};

/// Model parameters `(k0, r, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotParams {
    /// Exchange splitting; any sign.
    pub k0: f64,
    /// Zeeman product `γB₀`; any sign.
    pub r: f64,
    /// Temperature, `T ≥ 0`. `T = 0` selects the ground-state limit.
    pub t: f64,
}

impl DotParams {
    pub const fn new(k0: f64, r: f64, t: f64) -> Self {
        Self { k0, r, t }
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn with_k0(self, k0: f64) -> Self {
        Self { k0, ..self }
    }

    /// Errors unless `T` is finite and strictly positive.
    pub fn require_positive_t(&self) -> Result<()> {
        if self.t.is_finite() && self.t > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "temperature must be > 0 (got T = {}); use the ground-state query for T = 0",
                self.t
            )))
        }
    }
}

/// Index of each two-qubit basis state in `{|11⟩, |10⟩, |01⟩, |00⟩}`.
pub mod basis {
    pub const UP_UP: usize = 0;
    pub const UP_DOWN: usize = 1;
    pub const DOWN_UP: usize = 2;
    pub const DOWN_DOWN: usize = 3;
}

/// Closed-form spectrum. `energies[i]` belongs to `states[i]`, in the order
/// `|00⟩, |11⟩, (|01⟩+|10⟩)/√2, (|01⟩−|10⟩)/√2`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub energies: [f64; 4],
    pub states: [[Complex; 4]; 4],
}

/// The five scalars of the thermal X-state.
///
/// All weights carry a common factor `exp(-log_scale)`: the true Boltzmann
/// weights are `u·exp(log_scale)` and so on. Ratios such as `u / z` are
/// unaffected, and `log_scale` is chosen as the largest exponent so nothing
/// overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalElements {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub y: f64,
    /// Partition function, `u + v + 2w`.
    pub z: f64,
    pub log_scale: f64,
}

impl ThermalElements {
    /// Diagonal populations `(⟨11|ρ|11⟩, ⟨10|ρ|10⟩, ⟨01|ρ|01⟩, ⟨00|ρ|00⟩)`.
    pub fn populations(&self) -> [f64; 4] {
        [self.u / self.z, self.w / self.z, self.w / self.z, self.v / self.z]
    }
}

fn psi_plus_minus() -> ([Complex; 4], [Complex; 4]) {
    let h = real(FRAC_1_SQRT_2);
    let zero = real(0.0);
    // (|01⟩ + |10⟩)/√2 and (|01⟩ − |10⟩)/√2
    ([zero, h, h, zero], [zero, -h, h, zero])
}

pub fn hamiltonian_matrix(p: &DotParams) -> ComplexMatrix {
    let exchange =
        &(&kron(&pauli::x(), &pauli::x()) + &kron(&pauli::y(), &pauli::y())) + &kron(&pauli::z(), &pauli::z());
    let total_sz = &kron(&pauli::z(), &pauli::identity()) + &kron(&pauli::identity(), &pauli::z());
    &exchange.scale(p.k0 / 16.0) - &total_sz.scale(p.r / 2.0)
}

pub fn eigensystem(p: &DotParams) -> EigenSystem {
    let base = p.k0 / 16.0;
    let mut down_down = [real(0.0); 4];
    down_down[basis::DOWN_DOWN] = real(1.0);
    let mut up_up = [real(0.0); 4];
    up_up[basis::UP_UP] = real(1.0);
    let (triplet, singlet) = psi_plus_minus();
    EigenSystem {
        energies: [base + p.r, base - p.r, base, -3.0 * base],
        states: [down_down, up_up, triplet, singlet],
    }
}

/// Boltzmann exponents `-E/T` for `(u, v, a, b)` where `a` is the weight of
/// the triplet `Ψ₃` and `b` that of the singlet `Ψ₄`.
pub(crate) fn boltzmann_exponents(p: &DotParams) -> [f64; 4] {
    let t16 = 16.0 * p.t;
    [
        -(p.k0 - 16.0 * p.r) / t16,
        -(p.k0 + 16.0 * p.r) / t16,
        -p.k0 / t16,
        3.0 * p.k0 / t16,
    ]
}

pub fn thermal_elements(p: &DotParams) -> Result<ThermalElements> {
    p.require_positive_t()?;
    let ex = boltzmann_exponents(p);
    let shift = ex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let [u, v, a, b] = ex.map(|e| (e - shift).exp());
    let w = 0.5 * (a + b);
    let y = 0.5 * (a - b);
    Ok(ThermalElements {
        u,
        v,
        w,
        y,
        z: u + v + 2.0 * w,
        log_scale: shift,
    })
}

/// X-form density matrix assembled from the thermal elements.
pub fn thermal_state_from_elements(e: &ThermalElements) -> ComplexMatrix {
    use basis::*;
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(UP_UP, UP_UP)] = real(e.u / e.z);
    rho[(UP_DOWN, UP_DOWN)] = real(e.w / e.z);
    rho[(DOWN_UP, DOWN_UP)] = real(e.w / e.z);
    rho[(UP_DOWN, DOWN_UP)] = real(e.y / e.z);
    rho[(DOWN_UP, UP_DOWN)] = real(e.y / e.z);
    rho[(DOWN_DOWN, DOWN_DOWN)] = real(e.v / e.z);
    rho
}

pub fn thermal_state(p: &DotParams) -> Result<ComplexMatrix> {
    Ok(thermal_state_from_elements(&thermal_elements(p)?))
}

/// Gibbs state from a numerical diagonalization of [`hamiltonian_matrix`].
/// Independent of the closed forms above.
pub fn thermal_state_oracle(p: &DotParams) -> Result<ComplexMatrix> {
    p.require_positive_t()?;
    let eig = hermitian_eig(&hamiltonian_matrix(p))?;
    let ground = eig.values[0];
    let boltzmann = |e: f64| (-(e - ground) / p.t).exp();
    let z: f64 = eig.values.iter().map(|&e| boltzmann(e)).sum();
    Ok(eig.reconstruct_with(|e| boltzmann(e) / z))
}

/// Zero-temperature state: the equal-weight mixture over the ground-state
/// manifold.
///
/// Degeneracies are resolved by exact comparison of the level offsets
/// `k0/4 ± r`, `k0/4` and `0` above the singlet.
pub fn ground_state(p: &DotParams) -> ComplexMatrix {
    let sys = eigensystem(p);
    let quarter = p.k0 / 4.0;
    let offsets = [quarter + p.r, quarter - p.r, quarter, 0.0];
    let min = offsets.iter().copied().fold(f64::INFINITY, f64::min);
    let members: Vec<usize> = (0..4).filter(|&i| offsets[i] == min).collect();
    let weight = 1.0 / members.len() as f64;
    let mut rho = ComplexMatrix::zeros(4, 4);
    for &i in &members {
        rho = &rho + &ComplexMatrix::projector(&sys.states[i]).scale(weight);
    }
    rho
}

/// Unitary taking singlet/triplet coordinates `{|1,1⟩, |1,0⟩, |1,−1⟩, |0,0⟩}`
/// to product-spin coordinates.
pub fn singlet_triplet_unitary() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, h, 0.0, h],
        [0.0, h, 0.0, -h],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn singlet_triplet_unitary_inverse() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, h, h, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, h, -h, 0.0],
    ])
}

/// Residuals of the basis change: `‖U·U⁻¹ − I‖` and
/// `‖U·H_ST·U⁻¹ − H‖` (max entrywise).
#[derive(Debug, Clone, Copy)]
pub struct BasisChangeResiduals {
    pub unitarity: f64,
    pub hamiltonian: f64,
}

pub fn basis_change_residuals(p: &DotParams) -> BasisChangeResiduals {
    let u = singlet_triplet_unitary();
    let u_inv = singlet_triplet_unitary_inverse();
    let base = p.k0 / 16.0;
    let h_st = ComplexMatrix::diag_real(&[base - p.r, base, base + p.r, -3.0 * base]);
    let conjugated = &(&u * &h_st) * &u_inv;
    BasisChangeResiduals {
        unitarity: (&u * &u_inv).max_abs_diff(&ComplexMatrix::identity(4)),
        hamiltonian: conjugated.max_abs_diff(&hamiltonian_matrix(p)),
    }
}

pub fn basis_change_check(p: &DotParams) -> bool {
    let res = basis_change_residuals(p);
    res.unitarity <= 1e-12 && res.hamiltonian <= 1e-12
}
