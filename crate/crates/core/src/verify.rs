//! Oracle cross-checks behind `qdot verify`.
//!
//! Every check compares an optimized path against an independent one and
//! records the largest deviation seen. Closed forms receive their thermal
//! elements through a caller-supplied function so tests can inject faults.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::fmt::Write as _;

use crate::dot::{
    basis_change_residuals, hamiltonian_matrix, thermal_elements, thermal_state, thermal_state_from_elements,
    thermal_state_oracle, DotParams, ThermalElements,
};
use crate::entanglement::{
    critical_temperature, ground_state_concurrence, model_concurrence, wootters_concurrence, xstate_concurrence,
};
use crate::error::Result;
use crate::teleport::{
    average_fidelity, collapse_bruteforce, collapsed_closed_form, fidelity, joint_state, output_states_from_elements,
    pauli_correction, AveragingMethod, BellOutcome, InputState, Subspace,
};

pub const THERMAL_K0: [f64; 6] = [-4.0, -1.0, 0.0, 1.0, 4.0, 16.0];
pub const THERMAL_R: [f64; 4] = [0.0, 0.2, 1.0, 4.0];
pub const THERMAL_T: [f64; 4] = [0.05, 0.2, 1.0, 5.0];

pub const TELEPORT_K0: [f64; 3] = [0.5, 2.0, 4.0];
pub const TELEPORT_R: [f64; 3] = [0.0, 0.2, 1.0];
pub const TELEPORT_T: [f64; 3] = [0.1, 0.2, 1.0];
pub const TELEPORT_THETA: [f64; 4] = [0.0, FRAC_PI_3, FRAC_PI_2, PI];
pub const TELEPORT_PHI: [f64; 3] = [0.0, FRAC_PI_2, 1.3];

pub const ORDERING_K0: [f64; 6] = [0.5, 1.0, 2.0, 4.0, 10.0, 16.0];
pub const ORDERING_R: [f64; 4] = [0.0, 0.2, 1.0, 4.0];
pub const ORDERING_T: [f64; 4] = [0.05, 0.2, 1.0, 5.0];
/// Polar angles of the ordering scan; the ordering reverses for `θ > π/2`.
pub const ORDERING_THETA_STEPS: usize = 7;

pub const TC_K0: [f64; 3] = [1.0, 4.0, 10.0];
pub const TC_R: [f64; 3] = [0.0, 1.0, 4.0];

/// `(k0, r, T)` points of the quadrature vs Monte Carlo comparison.
pub const AVERAGE_POINTS: [(f64, f64, f64); 3] = [(2.0, 0.2, 0.5), (4.0, 1.0, 0.2), (1.0, 0.5, 1.0)];

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Requested agreement; checks use the larger of this and their own
    /// floor.
    pub tolerance: f64,
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn within(name: &'static str, max_deviation: f64, threshold: f64, detail: String) -> Self {
        Self {
            name,
            max_deviation,
            threshold,
            passed: max_deviation <= threshold,
            detail,
        }
    }

    fn errored(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self {
            name,
            max_deviation: f64::NAN,
            threshold: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:width$}  max_dev={:.3e}  threshold={:.3e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.threshold,
                c.detail,
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        );
        out
    }
}

/// Runs every check with the library's own thermal elements.
pub fn verify(opts: &VerifyOptions) -> VerifyReport {
    verify_with(opts, thermal_elements)
}

/// Runs every check, feeding `elements` to the closed-form paths.
pub fn verify_with<F>(opts: &VerifyOptions, elements: F) -> VerifyReport
where
    F: Fn(&DotParams) -> Result<ThermalElements>,
{
    let tol = opts.tolerance;
    let floor = |pinned: f64| pinned.max(tol);
    let checks = vec![
        lift("thermal-oracle", thermal_oracle(&elements, floor(1e-10))),
        lift("stationarity", stationarity(floor(1e-12))),
        lift("concurrence-agreement", concurrence_agreement(&elements, floor(1e-10))),
        lift("negative-k0-separable", negative_k0(floor(0.0))),
        lift("field-symmetry", field_symmetry(floor(1e-12))),
        lift("critical-temperature", critical_temperature_bisection(floor(1e-6))),
        lift("zero-temperature-limits", zero_temperature(floor(1e-3))),
        lift("collapse-oracle", collapse_oracle(&elements, floor(1e-12))),
        lift("probability-completeness", completeness(&elements, floor(1e-12))),
        lift("correction-collapse", correction_collapse(&elements, floor(1e-12))),
        lift("zero-field-coincidence", zero_field(&elements, floor(1e-12))),
        lift("phase-covariance", phase_covariance(&elements, floor(1e-12))),
        lift("subspace-ordering", subspace_ordering(&elements)),
        lift("basis-change", basis_change(floor(1e-12))),
        lift("average-cross-check", average_cross_check(opts)),
    ];
    VerifyReport { checks }
}

fn lift(name: &'static str, res: Result<(f64, f64, String)>) -> CheckResult {
    match res {
        Ok((dev, threshold, detail)) => CheckResult::within(name, dev, threshold, detail),
        Err(e) => CheckResult::errored(name, e),
    }
}

type Outcome = Result<(f64, f64, String)>;

fn thermal_grid() -> impl Iterator<Item = DotParams> {
    THERMAL_K0.into_iter().flat_map(|k0| {
        THERMAL_R
            .into_iter()
            .flat_map(move |r| THERMAL_T.into_iter().map(move |t| DotParams::new(k0, r, t)))
    })
}

fn teleport_grid() -> impl Iterator<Item = (DotParams, InputState)> {
    TELEPORT_K0.into_iter().flat_map(|k0| {
        TELEPORT_R.into_iter().flat_map(move |r| {
            TELEPORT_T.into_iter().flat_map(move |t| {
                TELEPORT_THETA.into_iter().flat_map(move |theta| {
                    TELEPORT_PHI
                        .into_iter()
                        .map(move |phi| (DotParams::new(k0, r, t), InputState::new(theta, phi)))
                })
            })
        })
    })
}

/// Tracks the maximum deviation and where it occurred.
struct Worst {
    dev: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            dev: 0.0,
            at: String::new(),
        }
    }

    fn see(&mut self, dev: f64, at: impl FnOnce() -> String) {
        // NaN sticks so that it registers as a failure.
        if self.dev.is_nan() {
            return;
        }
        if dev.is_nan() || dev > self.dev {
            self.dev = dev;
            self.at = at();
        }
    }

    fn finish(self, threshold: f64, points: usize) -> (f64, f64, String) {
        let detail = if self.at.is_empty() {
            format!("{points} points")
        } else {
            format!("{points} points, worst at {}", self.at)
        };
        let dev = if self.dev.is_nan() { f64::INFINITY } else { self.dev };
        (dev, threshold, detail)
    }
}

fn label(p: &DotParams) -> String {
    format!("k0={} r={} T={}", p.k0, p.r, p.t)
}

fn label_input(p: &DotParams, s: &InputState) -> String {
    format!("{} theta={:.4} phi={:.4}", label(p), s.theta, s.phi)
}

fn thermal_oracle<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for p in thermal_grid() {
        let closed = thermal_state_from_elements(&elements(&p)?);
        let oracle = thermal_state_oracle(&p)?;
        worst.see(closed.max_abs_diff(&oracle), || label(&p));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

fn stationarity(threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for p in thermal_grid() {
        let h = hamiltonian_matrix(&p);
        let dev = thermal_state(&p)?.commutator(&h).max_abs() / h.max_abs().max(1.0);
        worst.see(dev, || label(&p));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

fn concurrence_agreement<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for p in thermal_grid() {
        let closed = model_concurrence(&p)?;
        let e = elements(&p)?;
        let xform = xstate_concurrence(&e);
        let general = wootters_concurrence(&thermal_state_from_elements(&e))?.value;
        let oracle = wootters_concurrence(&thermal_state(&p)?)?.value;
        let dev = [xform, general, oracle]
            .iter()
            .map(|c| (c - closed).abs())
            .fold(0.0, f64::max);
        worst.see(dev, || label(&p));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

fn negative_k0(threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for p in thermal_grid().filter(|p| p.k0 < 0.0) {
        worst.see(model_concurrence(&p)?, || label(&p));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

fn field_symmetry(threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for p in thermal_grid() {
        let flipped = p.with_r(-p.r);
        let dev = (model_concurrence(&p)? - model_concurrence(&flipped)?).abs();
        let general = (wootters_concurrence(&thermal_state(&p)?)?.value
            - wootters_concurrence(&thermal_state(&flipped)?)?.value)
            .abs();
        worst.see(dev.max(general), || label(&p));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

/// Locates the entangled-to-separable transition of `C(T)` without using
/// the closed-form temperature: a geometric scan finds the last entangled
/// and first separable temperatures, then bisection narrows the bracket.
pub fn bisect_critical_temperature(k0: f64, r: f64) -> Result<Option<f64>> {
    let entangled = |t: f64| -> Result<bool> { Ok(model_concurrence(&DotParams::new(k0, r, t))? > 0.0) };
    let mut t = 1e-3;
    let mut seen_entangled = false;
    let mut lo = f64::NAN;
    while t < 1e4 {
        if entangled(t)? {
            seen_entangled = true;
            lo = t;
        } else if seen_entangled {
            break;
        }
        t *= 1.1;
    }
    if !seen_entangled || t >= 1e4 {
        return Ok(None);
    }
    let mut hi = t;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entangled(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn critical_temperature_bisection(threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for k0 in TC_K0 {
        let expected = critical_temperature(k0).expect("positive k0");
        for r in TC_R {
            let dev = match bisect_critical_temperature(k0, r)? {
                Some(found) => (found - expected).abs(),
                None => f64::INFINITY,
            };
            worst.see(dev, || format!("k0={k0} r={r}"));
            n += 1;
        }
    }
    Ok(worst.finish(threshold, n))
}

fn zero_temperature(threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    for (k0, r, want) in [(4.0, 0.5, 1.0), (4.0, 2.0, 0.0)] {
        let got = model_concurrence(&DotParams::new(k0, r, 1e-3))?;
        worst.see((got - want).abs(), || format!("k0={k0} r={r} T=1e-3"));
    }
    let crossing = ground_state_concurrence(&DotParams::new(4.0, 1.0, 0.0));
    worst.see((crossing - 0.5).abs(), || "k0=4 r=1 T=0".into());
    Ok(worst.finish(threshold, 3))
}

fn collapse_oracle<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for (p, s) in teleport_grid() {
        let e = elements(&p)?;
        let joint = joint_state(&s, &p)?;
        for o in BellOutcome::ALL {
            let brute = collapse_bruteforce(&joint, o)?;
            let closed = collapsed_closed_form(&s, &e, o);
            let dev = brute
                .state
                .max_abs_diff(&closed.state)
                .max((brute.probability - closed.probability).abs());
            worst.see(dev, || format!("{} {}", label_input(&p, &s), o.label()));
            n += 1;
        }
    }
    Ok(worst.finish(threshold, n))
}

fn completeness<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for (p, s) in teleport_grid() {
        let e = elements(&p)?;
        let total: f64 = BellOutcome::ALL
            .iter()
            .map(|&o| collapsed_closed_form(&s, &e, o).probability)
            .sum();
        worst.see((total - 1.0).abs(), || label_input(&p, &s));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

/// Brute-force branches after correction against the closed-form outputs.
fn correction_collapse<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for (p, s) in teleport_grid() {
        let (rho_o, rho_e) = output_states_from_elements(&s, &elements(&p)?);
        let joint = joint_state(&s, &p)?;
        for o in BellOutcome::ALL {
            let corrected = pauli_correction(o, &collapse_bruteforce(&joint, o)?.state);
            let target = match o.subspace() {
                Subspace::Psi => &rho_o,
                Subspace::Phi => &rho_e,
            };
            worst.see(corrected.max_abs_diff(target), || {
                format!("{} {}", label_input(&p, &s), o.label())
            });
            n += 1;
        }
    }
    Ok(worst.finish(threshold, n))
}

fn zero_field<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for (p, s) in teleport_grid().filter(|(p, _)| p.r == 0.0) {
        let (rho_o, rho_e) = output_states_from_elements(&s, &elements(&p)?);
        worst.see(rho_o.max_abs_diff(&rho_e), || label_input(&p, &s));
        n += 1;
    }
    Ok(worst.finish(threshold, n))
}

fn phase_covariance<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F, threshold: f64) -> Outcome {
    let mut worst = Worst::new();
    let mut n = 0;
    for (p, s) in teleport_grid().filter(|(_, s)| s.phi == 0.0) {
        let e = elements(&p)?;
        let (o0, e0) = output_states_from_elements(&s, &e);
        let base = (fidelity(&s, &o0), fidelity(&s, &e0));
        for phi in [0.4, 1.3, 2.9, 4.4, 6.0] {
            let rotated = InputState::new(s.theta, phi);
            let (o1, e1) = output_states_from_elements(&rotated, &e);
            let dev = (fidelity(&rotated, &o1) - base.0)
                .abs()
                .max((fidelity(&rotated, &e1) - base.1).abs());
            worst.see(dev, || label_input(&p, &rotated));
            n += 1;
        }
    }
    Ok(worst.finish(threshold, n))
}

/// Scans `F^o − F^e` over the ordering grid with `θ ∈ [0, π/2]`. The
/// deviation is the largest amount by which `F^e` exceeds `F^o`; the check
/// also requires a strict gap at `(4, 0.2, 0.2, π/3)`.
fn subspace_ordering<F: Fn(&DotParams) -> Result<ThermalElements>>(elements: &F) -> Outcome {
    const SLACK: f64 = 1e-12;
    let fidelities = |p: &DotParams, s: &InputState| -> Result<(f64, f64)> {
        let (o, e) = output_states_from_elements(s, &elements(p)?);
        Ok((fidelity(s, &o), fidelity(s, &e)))
    };
    let mut worst = Worst::new();
    let mut n = 0;
    for k0 in ORDERING_K0 {
        for r in ORDERING_R {
            for t in ORDERING_T {
                let p = DotParams::new(k0, r, t);
                for i in 0..ORDERING_THETA_STEPS {
                    let s = InputState::new(FRAC_PI_2 * i as f64 / (ORDERING_THETA_STEPS - 1) as f64, 0.0);
                    let (f_o, f_e) = fidelities(&p, &s)?;
                    worst.see((f_e - f_o).max(0.0), || label_input(&p, &s));
                    n += 1;
                }
            }
        }
    }
    let reference = DotParams::new(4.0, 0.2, 0.2);
    let (f_o, f_e) = fidelities(&reference, &InputState::new(FRAC_PI_3, 0.0))?;
    let (dev, threshold, detail) = worst.finish(SLACK, n);
    let strict = f_o > f_e;
    let detail = format!("{detail}; gap at (4, 0.2, 0.2, pi/3) = {:.3e}", f_o - f_e);
    Ok((if strict { dev } else { f64::INFINITY }, threshold, detail))
}

fn basis_change(threshold: f64) -> Outcome {
    let res = basis_change_residuals(&DotParams::new(16.0, 1.0, 1.0));
    Ok((
        res.unitarity.max(res.hamiltonian),
        threshold,
        format!(
            "unitarity={:.3e} hamiltonian={:.3e} at k0=16 r=1",
            res.unitarity, res.hamiltonian
        ),
    ))
}

/// Quadrature against seeded Monte Carlo. Passes within four standard
/// errors; the deviation is reported in units of the standard error.
fn average_cross_check(opts: &VerifyOptions) -> Outcome {
    const SIGMAS: f64 = 4.0;
    let mut worst_z: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut detail = Vec::new();
    for (k0, r, t) in AVERAGE_POINTS {
        let p = DotParams::new(k0, r, t);
        let quad = average_fidelity(&p, AveragingMethod::Quadrature)?;
        let mc = average_fidelity(
            &p,
            AveragingMethod::MonteCarlo {
                samples: opts.mc_samples,
                seed: opts.seed,
            },
        )?;
        let se = mc.std_error.unwrap_or(f64::NAN);
        let diff = (quad.f_a - mc.f_a).abs();
        // A sub-tolerance difference passes even when the error estimate
        // vanishes.
        let z = if diff <= opts.tolerance { 0.0 } else { diff / se };
        worst_z = if z.is_nan() { f64::INFINITY } else { worst_z.max(z) };
        worst_abs = worst_abs.max(diff);
        detail.push(format!("({k0},{r},{t}): |diff|={diff:.2e} se={se:.2e}"));
    }
    let mut text = format!("{} samples, seed {}; {}", opts.mc_samples, opts.seed, detail.join("; "));
    if worst_abs > opts.tolerance {
        let _ = write!(
            text,
            "; max |diff| {worst_abs:.2e} exceeds tol {:.1e} (statistical)",
            opts.tolerance
        );
    }
    Ok((worst_z, SIGMAS, text))
}
