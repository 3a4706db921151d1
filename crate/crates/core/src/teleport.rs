//! Standard teleportation of one qubit through the thermal two-spin channel.
//!
//! The joint state is ordered `input ⊗ channel A ⊗ channel B`. The Bell
//! measurement acts on `(input, A)` and the teleported state is read from
//! `B`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dot::{thermal_elements, thermal_state, DotParams, ThermalElements};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, pauli, real, Complex, ComplexMatrix};
use crate::quadrature::gauss_legendre;

/// Nodes per axis of the product rule used for Bloch-sphere averages.
pub const QUADRATURE_NODES: usize = 64;

/// Smallest branch probability the brute-force collapse will normalize.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-15;

const MC_CHUNK: u64 = 1 << 14;

/// Pure input `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    pub theta: f64,
    pub phi: f64,
}

impl InputState {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Amplitudes in the order `(|1⟩, |0⟩)`.
    pub fn amplitudes(&self) -> [Complex; 2] {
        let (s, cs) = (0.5 * self.theta).sin_cos();
        [real(cs), Complex::from_polar(s, self.phi)]
    }
}

pub fn input_density(s: &InputState) -> ComplexMatrix {
    ComplexMatrix::projector(&s.amplitudes())
}

/// Bell-measurement subspace: `Ψ`-type outcomes give the `o` output,
/// `Φ`-type outcomes the `e` output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subspace {
    Psi,
    Phi,
}

impl Subspace {
    pub fn tag(self) -> &'static str {
        match self {
            Subspace::Psi => "o",
            Subspace::Phi => "e",
        }
    }
}

/// Outcomes `E⁰..E³` in measurement-operator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellOutcome {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PhiPlus,
    ];

    pub fn subspace(self) -> Subspace {
        match self {
            BellOutcome::PsiMinus | BellOutcome::PsiPlus => Subspace::Psi,
            BellOutcome::PhiMinus | BellOutcome::PhiPlus => Subspace::Phi,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PsiMinus => "PsiMinus",
            BellOutcome::PsiPlus => "PsiPlus",
            BellOutcome::PhiMinus => "PhiMinus",
            BellOutcome::PhiPlus => "PhiPlus",
        }
    }

    /// `Ψ± = (|10⟩ ± |01⟩)/√2`, `Φ± = (|11⟩ ± |00⟩)/√2`.
    pub fn state(self) -> [Complex; 4] {
        let h = FRAC_1_SQRT_2;
        let z = 0.0;
        let v = match self {
            BellOutcome::PsiMinus => [z, h, -h, z],
            BellOutcome::PsiPlus => [z, h, h, z],
            BellOutcome::PhiMinus => [h, z, z, -h],
            BellOutcome::PhiPlus => [h, z, z, h],
        };
        v.map(real)
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.state())
    }

    /// Pauli rotation applied to the receiver's qubit for this outcome.
    pub fn correction(self) -> ComplexMatrix {
        match self {
            BellOutcome::PsiMinus => pauli::identity(),
            BellOutcome::PsiPlus => pauli::z(),
            BellOutcome::PhiMinus => pauli::x(),
            BellOutcome::PhiPlus => pauli::y(),
        }
    }
}

pub fn bell_projectors() -> [ComplexMatrix; 4] {
    BellOutcome::ALL.map(BellOutcome::projector)
}

/// `ρ_in ⊗ ρ(T)`.
pub fn joint_state(s: &InputState, p: &DotParams) -> Result<ComplexMatrix> {
    Ok(kron(&input_density(s), &thermal_state(p)?))
}

/// Receiver state after a Bell outcome, normalized, with the outcome's
/// probability.
#[derive(Debug, Clone)]
pub struct Collapsed {
    pub state: ComplexMatrix,
    pub probability: f64,
}

/// Projects the 8x8 joint state with `Eⁱ ⊗ I` and traces out the measured
/// pair.
pub fn collapse_bruteforce(joint: &ComplexMatrix, o: BellOutcome) -> Result<Collapsed> {
    if joint.rows() != 8 || joint.cols() != 8 {
        return Err(Error::DimensionMismatch(format!(
            "joint state must be 8x8, got {}x{}",
            joint.rows(),
            joint.cols()
        )));
    }
    let m = kron(&o.projector(), &pauli::identity());
    let projected = &(&m * joint) * &m.adjoint();
    let reduced = partial_trace(&projected, &[2, 2, 2], &[2])?;
    let probability = reduced.trace().re;
    if probability.is_nan() || probability < MIN_BRANCH_PROBABILITY {
        return Err(Error::DegenerateBranch { probability });
    }
    Ok(Collapsed {
        state: reduced.scale(1.0 / probability),
        probability,
    })
}

/// Trigonometric pieces shared by the closed forms.
#[derive(Clone, Copy)]
struct Angles {
    cos2: f64,
    sin2: f64,
    /// `½ sin θ`
    half_sin: f64,
    /// `e^{iφ}`
    phase: Complex,
}

impl Angles {
    fn of(s: &InputState) -> Self {
        let (sh, ch) = (0.5 * s.theta).sin_cos();
        Self {
            cos2: ch * ch,
            sin2: sh * sh,
            half_sin: 0.5 * s.theta.sin(),
            phase: Complex::from_polar(1.0, s.phi),
        }
    }
}

/// `(z₁, z₂)`: unnormalized traces of the `Ψ`- and `Φ`-type branches.
fn branch_weights(e: &ThermalElements, a: &Angles) -> (f64, f64) {
    (e.w + e.u * a.sin2 + e.v * a.cos2, e.w + e.v * a.sin2 + e.u * a.cos2)
}

fn hermitian2(d0: f64, off: Complex, d1: f64, norm: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[real(d0 / norm), off / norm], [off.conj() / norm, real(d1 / norm)]])
}

/// Closed-form collapsed state and probability `zᵢ/(2Z)` for each outcome.
pub fn collapsed_closed_form(s: &InputState, e: &ThermalElements, o: BellOutcome) -> Collapsed {
    let a = Angles::of(s);
    let (z1, z2) = branch_weights(e, &a);
    let coherence = e.y * a.half_sin;
    let state = match o {
        BellOutcome::PsiMinus => hermitian2(
            e.w * a.cos2 + e.u * a.sin2,
            -coherence * a.phase.conj(),
            e.v * a.cos2 + e.w * a.sin2,
            z1,
        ),
        BellOutcome::PsiPlus => hermitian2(
            e.w * a.cos2 + e.u * a.sin2,
            coherence * a.phase.conj(),
            e.v * a.cos2 + e.w * a.sin2,
            z1,
        ),
        BellOutcome::PhiMinus => hermitian2(
            e.u * a.cos2 + e.w * a.sin2,
            -coherence * a.phase,
            e.w * a.cos2 + e.v * a.sin2,
            z2,
        ),
        BellOutcome::PhiPlus => hermitian2(
            e.u * a.cos2 + e.w * a.sin2,
            coherence * a.phase,
            e.w * a.cos2 + e.v * a.sin2,
            z2,
        ),
    };
    let weight = match o.subspace() {
        Subspace::Psi => z1,
        Subspace::Phi => z2,
    };
    Collapsed {
        state,
        probability: weight / (2.0 * e.z),
    }
}

/// Conjugates the receiver's state by the outcome's Pauli rotation.
pub fn pauli_correction(o: BellOutcome, state: &ComplexMatrix) -> ComplexMatrix {
    let sigma = o.correction();
    &(&sigma * state) * &sigma
}

/// Corrected outputs `(ρᵒ_out, ρᵉ_out)` from the thermal elements.
pub fn output_states_from_elements(s: &InputState, e: &ThermalElements) -> (ComplexMatrix, ComplexMatrix) {
    let a = Angles::of(s);
    let (z1, z2) = branch_weights(e, &a);
    let off = -(e.y * a.half_sin) * a.phase.conj();
    let rho_o = hermitian2(e.w * a.cos2 + e.u * a.sin2, off, e.v * a.cos2 + e.w * a.sin2, z1);
    let rho_e = hermitian2(e.w * a.cos2 + e.v * a.sin2, off, e.u * a.cos2 + e.w * a.sin2, z2);
    (rho_o, rho_e)
}

pub fn output_states(s: &InputState, p: &DotParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    Ok(output_states_from_elements(s, &thermal_elements(p)?))
}

/// `⟨φ_in|ρ_out|φ_in⟩`.
pub fn fidelity(s: &InputState, rho_out: &ComplexMatrix) -> f64 {
    let psi = s.amplitudes();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += psi[i].conj() * rho_out[(i, j)] * psi[j];
        }
    }
    acc.re
}

/// `(F^o, F^e)` for one input state.
pub fn subspace_fidelities(s: &InputState, p: &DotParams) -> Result<(f64, f64)> {
    let (rho_o, rho_e) = output_states(s, p)?;
    Ok((fidelity(s, &rho_o), fidelity(s, &rho_e)))
}

/// One branch of the protocol after correction.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub outcome: BellOutcome,
    pub probability: f64,
    pub output: ComplexMatrix,
    pub fidelity: f64,
}

/// Runs the protocol for every outcome using the closed-form collapse.
pub fn teleport(s: &InputState, p: &DotParams) -> Result<[TeleportOutcome; 4]> {
    let e = thermal_elements(p)?;
    Ok(BellOutcome::ALL.map(|o| {
        let collapsed = collapsed_closed_form(s, &e, o);
        let output = pauli_correction(o, &collapsed.state);
        TeleportOutcome {
            outcome: o,
            probability: collapsed.probability,
            fidelity: fidelity(s, &output),
            output,
        }
    }))
}

/// Scalar per-input quantities used by the sphere averages.
#[derive(Debug, Clone, Copy)]
struct PointFidelities {
    f_o: f64,
    f_e: f64,
    /// Total probability of the `Ψ`-type outcomes, `z₁/Z`.
    p_o: f64,
    p_e: f64,
}

impl PointFidelities {
    fn evaluate(s: &InputState, e: &ThermalElements) -> Self {
        let a = Angles::of(s);
        let (z1, z2) = branch_weights(e, &a);
        let [amp1, amp0] = s.amplitudes();
        // Both outputs share the coherence -½ y sinθ e^{-iφ}.
        let coherence = (amp1.conj() * (-(e.y * a.half_sin) * a.phase.conj()) * amp0).re * 2.0;
        let (w1, w0) = (amp1.norm_sqr(), amp0.norm_sqr());
        let f_o = (w1 * (e.w * a.cos2 + e.u * a.sin2) + w0 * (e.v * a.cos2 + e.w * a.sin2) + coherence) / z1;
        let f_e = (w1 * (e.w * a.cos2 + e.v * a.sin2) + w0 * (e.u * a.cos2 + e.w * a.sin2) + coherence) / z2;
        Self {
            f_o,
            f_e,
            p_o: z1 / e.z,
            p_e: z2 / e.z,
        }
    }

    /// Equal-weight subspace mean, the `F^a` integrand.
    fn mean(&self) -> f64 {
        0.5 * (self.f_o + self.f_e)
    }

    fn outcome_weighted(&self) -> f64 {
        self.p_o * self.f_o + self.p_e * self.f_e
    }
}

/// Per-input fidelities reported together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub f_o: f64,
    pub f_e: f64,
    pub f_a: f64,
}

pub fn fidelity_report(s: &InputState, p: &DotParams) -> Result<FidelityReport> {
    let (f_o, f_e) = subspace_fidelities(s, p)?;
    let f_a = average_fidelity(p, AveragingMethod::Quadrature)?.f_a;
    Ok(FidelityReport { f_o, f_e, f_a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AveragingMethod {
    /// Gauss–Legendre in `cos θ` times trapezoid in `φ`, 64×64 nodes.
    Quadrature,
    /// Uniform sampling of the sphere; reproducible for a given
    /// `(samples, seed)`.
    MonteCarlo { samples: u64, seed: u64 },
}

/// Bloch-sphere averages of the teleportation fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelity {
    /// Average of `½(F^o + F^e)`.
    pub f_a: f64,
    /// Average of `F^o` alone.
    pub f_a_o: f64,
    /// Average of `F^e` alone.
    pub f_a_e: f64,
    /// Average of the outcome-probability-weighted fidelity
    /// `(z₁/Z)·F^o + (z₂/Z)·F^e`.
    pub outcome_weighted: f64,
    /// Standard error of `f_a`; Monte Carlo only.
    pub std_error: Option<f64>,
}

pub fn average_fidelity(p: &DotParams, method: AveragingMethod) -> Result<AverageFidelity> {
    let e = thermal_elements(p)?;
    match method {
        AveragingMethod::Quadrature => Ok(quadrature_average(&e, QUADRATURE_NODES, QUADRATURE_NODES)),
        AveragingMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::Domain(format!(
                    "Monte Carlo averaging needs at least 2 samples, got {samples}"
                )));
            }
            Ok(monte_carlo_average(&e, samples, seed))
        }
    }
}

/// Product rule with `polar_nodes` Gauss–Legendre nodes in `cos θ` and
/// `phase_nodes` equispaced trapezoid nodes in `φ`.
pub fn quadrature_average_with(p: &DotParams, polar_nodes: usize, phase_nodes: usize) -> Result<AverageFidelity> {
    Ok(quadrature_average(&thermal_elements(p)?, polar_nodes, phase_nodes))
}

fn quadrature_average(e: &ThermalElements, polar_nodes: usize, phase_nodes: usize) -> AverageFidelity {
    let (xs, ws) = gauss_legendre(polar_nodes);
    let mut sums = [0.0; 4];
    for j in 0..phase_nodes {
        let phi = 2.0 * PI * j as f64 / phase_nodes as f64;
        for (x, w) in xs.iter().zip(&ws) {
            let f = PointFidelities::evaluate(&InputState::new(x.acos(), phi), e);
            sums[0] += w * f.mean();
            sums[1] += w * f.f_o;
            sums[2] += w * f.f_e;
            sums[3] += w * f.outcome_weighted();
        }
    }
    // (1/4π)·(2π/N_φ)·Σ, with the Legendre weights summing to 2.
    let norm = 1.0 / (2.0 * phase_nodes as f64);
    AverageFidelity {
        f_a: sums[0] * norm,
        f_a_o: sums[1] * norm,
        f_a_e: sums[2] * norm,
        outcome_weighted: sums[3] * norm,
        std_error: None,
    }
}

#[derive(Default, Clone, Copy)]
struct McSums {
    mean: f64,
    mean_sq: f64,
    f_o: f64,
    f_e: f64,
    weighted: f64,
}

fn monte_carlo_average(e: &ThermalElements, samples: u64, seed: u64) -> AverageFidelity {
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<McSums> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            // One independent stream per chunk keeps results independent of
            // scheduling.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let start = chunk * MC_CHUNK;
            let end = (start + MC_CHUNK).min(samples);
            let mut acc = McSums::default();
            for _ in start..end {
                let cos_theta: f64 = 2.0 * rng.gen::<f64>() - 1.0;
                let phi: f64 = 2.0 * PI * rng.gen::<f64>();
                let f = PointFidelities::evaluate(&InputState::new(cos_theta.acos(), phi), e);
                let m = f.mean();
                acc.mean += m;
                acc.mean_sq += m * m;
                acc.f_o += f.f_o;
                acc.f_e += f.f_e;
                acc.weighted += f.outcome_weighted();
            }
            acc
        })
        .collect();

    let total = partials.iter().fold(McSums::default(), |a, b| McSums {
        mean: a.mean + b.mean,
        mean_sq: a.mean_sq + b.mean_sq,
        f_o: a.f_o + b.f_o,
        f_e: a.f_e + b.f_e,
        weighted: a.weighted + b.weighted,
    });
    let n = samples as f64;
    let mean = total.mean / n;
    let variance = ((total.mean_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    AverageFidelity {
        f_a: mean,
        f_a_o: total.f_o / n,
        f_a_e: total.f_e / n,
        outcome_weighted: total.weighted / n,
        std_error: Some((variance / n).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use std::f64::consts::FRAC_PI_3;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn input_density_at_poles_and_equator() {
        assert_eq!(
            input_density(&InputState::new(0.0, 0.3)),
            ComplexMatrix::diag_real(&[1.0, 0.0])
        );
        let south = input_density(&InputState::new(PI, 0.0));
        assert!(close(&south, &ComplexMatrix::diag_real(&[0.0, 1.0]), 1e-15));
        let eq = input_density(&InputState::new(PI / 2.0, 0.0));
        assert!(eq.as_slice().iter().all(|z| (z - real(0.5)).norm() < 1e-15));
    }

    #[test]
    fn bell_projectors_are_complete_and_orthogonal() {
        let e = bell_projectors();
        let sum = e.iter().fold(ComplexMatrix::zeros(4, 4), |acc, m| &acc + m);
        assert!(close(&sum, &ComplexMatrix::identity(4), 1e-15));
        for i in 0..4 {
            for j in 0..4 {
                let prod = &e[i] * &e[j];
                if i == j {
                    assert!(close(&prod, &e[i], 1e-15));
                } else {
                    assert!(prod.max_abs() < 1e-15);
                }
            }
        }
        let psi = BellOutcome::PsiMinus.state();
        let applied = e[0].mul_vec(&psi);
        assert!(applied.iter().zip(&psi).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn subspace_tags() {
        assert_eq!(BellOutcome::PsiPlus.subspace().tag(), "o");
        assert_eq!(BellOutcome::PhiPlus.subspace().tag(), "e");
    }

    #[test]
    fn joint_state_structure() {
        let s = InputState::new(1.1, 0.4);
        let joint = joint_state(&s, &DotParams::new(0.0, 0.0, 1.0)).unwrap();
        let expected = kron(&input_density(&s), &ComplexMatrix::identity(4).scale(0.25));
        assert!(close(&joint, &expected, 1e-16));

        let joint = joint_state(&s, &DotParams::new(3.0, 0.4, 0.7)).unwrap();
        assert!((joint.trace().re - 1.0).abs() < 1e-14);
        let input = partial_trace(&joint, &[2, 2, 2], &[0]).unwrap();
        assert!(close(&input, &input_density(&s), 1e-15));
    }

    #[test]
    fn maximally_mixed_channel_collapse() {
        let p = DotParams::new(0.0, 0.0, 1.0);
        for s in [InputState::new(0.0, 0.0), InputState::new(1.0, 2.0)] {
            let joint = joint_state(&s, &p).unwrap();
            for o in BellOutcome::ALL {
                let c = collapse_bruteforce(&joint, o).unwrap();
                assert!((c.probability - 0.25).abs() < 1e-15);
                assert!(close(&c.state, &ComplexMatrix::identity(2).scale(0.5), 1e-15));
            }
        }
    }

    #[test]
    fn brute_force_matches_closed_form() {
        let p = DotParams::new(4.0, 0.2, 0.2);
        let s = InputState::new(FRAC_PI_3, 0.0);
        let e = thermal_elements(&p).unwrap();
        let joint = joint_state(&s, &p).unwrap();
        let mut total = 0.0;
        for o in BellOutcome::ALL {
            let brute = collapse_bruteforce(&joint, o).unwrap();
            let closed = collapsed_closed_form(&s, &e, o);
            assert!(close(&brute.state, &closed.state, 1e-12), "{o:?}");
            assert!((brute.probability - closed.probability).abs() < 1e-12);
            total += brute.probability;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_rejects_degenerate_branch() {
        // Input |1⟩ through the pure |11⟩ channel never yields Ψ outcomes.
        let mut joint = ComplexMatrix::zeros(8, 8);
        joint[(0, 0)] = real(1.0);
        assert!(matches!(
            collapse_bruteforce(&joint, BellOutcome::PsiMinus),
            Err(Error::DegenerateBranch { .. })
        ));
        assert!(collapse_bruteforce(&ComplexMatrix::identity(4), BellOutcome::PsiMinus).is_err());
    }

    #[test]
    fn pole_input_has_no_coherences() {
        let e = thermal_elements(&DotParams::new(2.0, 0.4, 0.3)).unwrap();
        for o in BellOutcome::ALL {
            let st = collapsed_closed_form(&InputState::new(0.0, 0.9), &e, o).state;
            assert_eq!(st[(0, 1)].norm(), 0.0);
            assert_eq!(st[(1, 0)].norm(), 0.0);
        }
    }

    #[test]
    fn psi_minus_branch_reproduces_input_at_low_temperature() {
        let s = InputState::new(FRAC_PI_3, 0.7);
        let e = thermal_elements(&DotParams::new(4.0, 0.2, 1e-3)).unwrap();
        let st = collapsed_closed_form(&s, &e, BellOutcome::PsiMinus).state;
        assert!(close(&st, &input_density(&s), 1e-12));
    }

    #[test]
    fn corrections_collapse_onto_two_outputs() {
        let s = InputState::new(1.2, 0.8);
        let p = DotParams::new(3.0, 0.6, 0.4);
        let e = thermal_elements(&p).unwrap();
        let (rho_o, rho_e) = output_states(&s, &p).unwrap();
        let rho1 = collapsed_closed_form(&s, &e, BellOutcome::PsiMinus).state;
        assert_eq!(pauli_correction(BellOutcome::PsiMinus, &rho1), rho1);
        assert!(close(&rho1, &rho_o, 0.0));
        for o in BellOutcome::ALL {
            let corrected = pauli_correction(o, &collapsed_closed_form(&s, &e, o).state);
            let target = match o.subspace() {
                Subspace::Psi => &rho_o,
                Subspace::Phi => &rho_e,
            };
            assert!(close(&corrected, target, 1e-15), "{o:?}");
        }
    }

    #[test]
    fn outputs_coincide_without_field() {
        let s = InputState::new(FRAC_PI_3, 0.0);
        let (o, e) = output_states(&s, &DotParams::new(4.0, 0.0, 0.2)).unwrap();
        assert!(close(&o, &e, 1e-12));
        let (o, e) = output_states(&s, &DotParams::new(0.0, 0.0, 0.2)).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(close(&o, &half, 1e-15) && close(&e, &half, 1e-15));
        let (o, _) = output_states(&s, &DotParams::new(4.0, 0.2, 1e-3)).unwrap();
        assert!(close(&o, &input_density(&s), 1e-12));
    }

    #[test]
    fn fidelity_cases() {
        let s = InputState::new(0.9, 2.1);
        assert!((fidelity(&s, &input_density(&s)) - 1.0).abs() < 1e-15);
        assert!((fidelity(&s, &ComplexMatrix::identity(2).scale(0.5)) - 0.5).abs() < 1e-15);
        let rho = ComplexMatrix::from_rows(&[[real(0.3), c(0.1, 0.2)], [c(0.1, -0.2), real(0.7)]]);
        assert_eq!(fidelity(&InputState::new(0.0, 1.0), &rho), 0.3);
    }

    #[test]
    fn subspace_fidelity_cases() {
        let s = InputState::new(FRAC_PI_3, 0.0);
        let (fo, fe) = subspace_fidelities(&s, &DotParams::new(4.0, 0.0, 0.2)).unwrap();
        assert!((fo - fe).abs() < 1e-14);
        let (fo, fe) = subspace_fidelities(&s, &DotParams::new(2.0, 0.2, 1e-3)).unwrap();
        assert!((fo - 1.0).abs() < 1e-12 && (fe - 1.0).abs() < 1e-12);
        let (fo, fe) = subspace_fidelities(&s, &DotParams::new(4.0, 0.2, 0.2)).unwrap();
        assert!(fo > fe);
    }

    #[test]
    fn scalar_integrand_matches_matrix_route() {
        let p = DotParams::new(2.5, 0.7, 0.35);
        let e = thermal_elements(&p).unwrap();
        for (theta, phi) in [(0.0, 0.0), (0.4, 1.0), (1.9, 4.0), (PI, 2.0)] {
            let s = InputState::new(theta, phi);
            let pf = PointFidelities::evaluate(&s, &e);
            let (fo, fe) = subspace_fidelities(&s, &p).unwrap();
            assert!((pf.f_o - fo).abs() < 1e-14 && (pf.f_e - fe).abs() < 1e-14);
            let outs = teleport(&s, &p).unwrap();
            let weighted: f64 = outs.iter().map(|t| t.probability * t.fidelity).sum();
            assert!((pf.outcome_weighted() - weighted).abs() < 1e-14);
        }
    }

    #[test]
    fn teleport_probabilities_sum_to_one() {
        let outs = teleport(&InputState::new(0.7, 0.2), &DotParams::new(1.0, 0.3, 0.5)).unwrap();
        let total: f64 = outs.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!(outs.iter().all(|o| (0.0..=1.0).contains(&o.fidelity)));
    }

    #[test]
    fn average_over_maximally_mixed_channel_is_half() {
        let avg = average_fidelity(&DotParams::new(0.0, 0.0, 1.0), AveragingMethod::Quadrature).unwrap();
        for v in [avg.f_a, avg.f_a_o, avg.f_a_e, avg.outcome_weighted] {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_validates_inputs() {
        let p = DotParams::new(2.0, 0.3, 0.4);
        let m = AveragingMethod::MonteCarlo {
            samples: 40_000,
            seed: 9,
        };
        assert_eq!(average_fidelity(&p, m).unwrap(), average_fidelity(&p, m).unwrap());
        let other = average_fidelity(
            &p,
            AveragingMethod::MonteCarlo {
                samples: 40_000,
                seed: 10,
            },
        )
        .unwrap();
        assert_ne!(average_fidelity(&p, m).unwrap().f_a, other.f_a);
        assert!(average_fidelity(&p, AveragingMethod::MonteCarlo { samples: 1, seed: 0 }).is_err());
    }
}
