//! Parameter sweeps over `(k0, r, T, θ)` and the figure presets.

use std::f64::consts::FRAC_PI_3;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dot::{thermal_elements, DotParams};
use crate::entanglement::{critical_temperature, ground_state_concurrence, model_concurrence};
use crate::error::{Error, Result};
use crate::teleport::{average_fidelity, subspace_fidelities, AveragingMethod, InputState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    K0,
    R,
    T,
    Theta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::K0 => "k0",
            Param::R => "r",
            Param::T => "T",
            Param::Theta => "theta",
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k0" => Ok(Param::K0),
            "r" => Ok(Param::R),
            "T" | "t" => Ok(Param::T),
            "theta" => Ok(Param::Theta),
            other => Err(Error::InvalidSweep(format!(
                "unknown axis `{other}` (expected k0, r, T or theta)"
            ))),
        }
    }
}

/// Inclusive grid `min + i·(max − min)/(steps − 1)`, `i = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Self { param, min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + i as f64 * step).collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `name:min:max:steps`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, steps] = parts.as_slice() else {
            return Err(Error::InvalidSweep(format!(
                "axis `{s}` is not of the form name:min:max:steps"
            )));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSweep(format!("`{x}` is not a number in axis `{s}`")))
        };
        let steps = steps
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidSweep(format!("`{steps}` is not a step count in axis `{s}`")))?;
        Ok(Axis::new(name.trim().parse()?, num(min)?, num(max)?, steps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Thermal concurrence.
    C,
    /// Critical temperature; reported as 0 when `k0 ≤ 0`.
    Tc,
    FO,
    FE,
    /// Bloch average of `½(F^o + F^e)`.
    FA,
    FAO,
    FAE,
    /// Bloch average of the outcome-weighted fidelity.
    FAW,
    Populations,
    /// Zero-temperature concurrence.
    GroundC,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::C => "C",
            Quantity::Tc => "Tc",
            Quantity::FO => "F_o",
            Quantity::FE => "F_e",
            Quantity::FA => "F_a",
            Quantity::FAO => "F_a_o",
            Quantity::FAE => "F_a_e",
            Quantity::FAW => "F_a_w",
            Quantity::Populations => "populations",
            Quantity::GroundC => "C0",
        }
    }

    pub fn columns(self) -> Vec<&'static str> {
        match self {
            Quantity::Populations => vec!["p11", "p10", "p01", "p00"],
            q => vec![q.name()],
        }
    }

    pub fn is_fidelity(self) -> bool {
        matches!(
            self,
            Quantity::FO | Quantity::FE | Quantity::FA | Quantity::FAO | Quantity::FAE | Quantity::FAW
        )
    }

    fn is_average(self) -> bool {
        matches!(self, Quantity::FA | Quantity::FAO | Quantity::FAE | Quantity::FAW)
    }

    pub fn needs_temperature(self) -> bool {
        !matches!(self, Quantity::Tc | Quantity::GroundC)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = match s.trim() {
            "C" => Quantity::C,
            "Tc" => Quantity::Tc,
            "F_o" => Quantity::FO,
            "F_e" => Quantity::FE,
            "F_a" => Quantity::FA,
            "F_a_o" => Quantity::FAO,
            "F_a_e" => Quantity::FAE,
            "F_a_w" => Quantity::FAW,
            "populations" => Quantity::Populations,
            "C0" => Quantity::GroundC,
            other => {
                return Err(Error::InvalidSweep(format!("unknown quantity `{other}`")));
            }
        };
        Ok(q)
    }
}

/// A discrete list of values for one parameter, emitted as the outermost
/// column (figure panels or curve families).
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub param: Param,
    pub values: Vec<f64>,
}

/// Parameter values used where no axis varies them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed {
    pub k0: f64,
    pub r: f64,
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Default for Fixed {
    fn default() -> Self {
        Self {
            k0: 4.0,
            r: 1.0,
            t: 0.2,
            theta: FRAC_PI_3,
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub series: Option<Series>,
    /// Zero to two axes; zero evaluates the single fixed point.
    pub axes: Vec<Axis>,
    pub fixed: Fixed,
    pub quantities: Vec<Quantity>,
    /// Used for the Bloch-averaged quantities.
    pub averaging: AveragingMethod,
}

impl SweepSpec {
    fn varying(&self) -> Vec<Param> {
        self.series
            .iter()
            .map(|s| s.param)
            .chain(self.axes.iter().map(|a| a.param))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantities.is_empty() {
            return Err(Error::InvalidSweep("no quantities requested".into()));
        }
        if self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "at most two sweep axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            if a.steps < 2 {
                return Err(Error::InvalidSweep(format!(
                    "axis {} needs at least 2 steps",
                    a.param.name()
                )));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(Error::InvalidSweep(format!(
                    "axis {} needs finite min < max (got {}..{})",
                    a.param.name(),
                    a.min,
                    a.max
                )));
            }
        }
        if let Some(s) = &self.series {
            if s.values.is_empty() || s.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "series {} needs finite values",
                    s.param.name()
                )));
            }
        }
        let varying = self.varying();
        for (i, p) in varying.iter().enumerate() {
            if varying[..i].contains(p) {
                return Err(Error::InvalidSweep(format!("parameter {} varied twice", p.name())));
            }
        }
        let wants_fidelity = self.quantities.iter().any(|q| q.is_fidelity());
        if varying.contains(&Param::Theta) && !wants_fidelity {
            return Err(Error::InvalidSweep("a theta axis requires a fidelity quantity".into()));
        }
        if self.quantities.iter().any(|q| q.needs_temperature()) {
            let lowest_t = if let Some(a) = self.axes.iter().find(|a| a.param == Param::T) {
                a.min
            } else if let Some(s) = self.series.as_ref().filter(|s| s.param == Param::T) {
                s.values.iter().copied().fold(f64::INFINITY, f64::min)
            } else {
                self.fixed.t
            };
            if lowest_t.is_nan() || lowest_t <= 0.0 {
                return Err(Error::Domain(format!(
                    "temperatures must be > 0 (lowest requested T = {lowest_t}); \
                     use the `ground-state` query for T = 0"
                )));
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<String> {
        self.varying()
            .iter()
            .map(|p| p.name().to_string())
            .chain(self.quantities.iter().flat_map(|q| q.columns()).map(String::from))
            .collect()
    }

    /// Grid points in lexicographic order: series outermost, then the axes in
    /// the order given.
    fn points(&self) -> Vec<Vec<(Param, f64)>> {
        let mut dims: Vec<(Param, Vec<f64>)> = Vec::new();
        if let Some(s) = &self.series {
            dims.push((s.param, s.values.clone()));
        }
        for a in &self.axes {
            dims.push((a.param, a.values()));
        }
        let mut points = vec![Vec::new()];
        for (param, values) in dims {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push((param, v));
                        next
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Serial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidSweep(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

/// Sweep result: one row per grid point, axis values first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

fn evaluate_point(spec: &SweepSpec, point: &[(Param, f64)]) -> Result<Vec<f64>> {
    let mut fixed = spec.fixed;
    for &(param, v) in point {
        match param {
            Param::K0 => fixed.k0 = v,
            Param::R => fixed.r = v,
            Param::T => fixed.t = v,
            Param::Theta => fixed.theta = v,
        }
    }
    let p = DotParams::new(fixed.k0, fixed.r, fixed.t);
    let input = InputState::new(fixed.theta, fixed.phi);

    let mut row: Vec<f64> = point.iter().map(|&(_, v)| v).collect();
    let mut subspace = None;
    let mut averages = None;
    for &q in &spec.quantities {
        if q.is_fidelity() && !q.is_average() && subspace.is_none() {
            subspace = Some(subspace_fidelities(&input, &p)?);
        }
        if q.is_average() && averages.is_none() {
            averages = Some(average_fidelity(&p, spec.averaging)?);
        }
        match q {
            Quantity::C => row.push(model_concurrence(&p)?),
            Quantity::Tc => row.push(critical_temperature(p.k0).unwrap_or(0.0)),
            Quantity::FO => row.push(subspace.unwrap().0),
            Quantity::FE => row.push(subspace.unwrap().1),
            Quantity::FA => row.push(averages.unwrap().f_a),
            Quantity::FAO => row.push(averages.unwrap().f_a_o),
            Quantity::FAE => row.push(averages.unwrap().f_a_e),
            Quantity::FAW => row.push(averages.unwrap().outcome_weighted),
            Quantity::Populations => row.extend(thermal_elements(&p)?.populations()),
            Quantity::GroundC => row.push(ground_state_concurrence(&p)),
        }
    }
    if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite value {bad} at {point:?}")));
    }
    Ok(row)
}

/// Evaluates every grid point. Rows come back in lexicographic order and
/// are bitwise identical for either execution mode.
pub fn run_sweep(spec: &SweepSpec, execution: Execution) -> Result<SweepTable> {
    spec.validate()?;
    let points = spec.points();
    let rows: Result<Vec<Vec<f64>>> = match execution {
        Execution::Parallel => points.par_iter().map(|pt| evaluate_point(spec, pt)).collect(),
        Execution::Serial => points.iter().map(|pt| evaluate_point(spec, pt)).collect(),
    };
    Ok(SweepTable {
        columns: spec.columns(),
        rows: rows?,
    })
}

/// Fixed parameters and axes for figures 1-5.
pub fn figure_preset(id: u8) -> Result<SweepSpec> {
    let fidelities = vec![Quantity::FO, Quantity::FE, Quantity::FA];
    let spec = match id {
        1 => SweepSpec {
            series: Some(Series {
                param: Param::T,
                values: vec![0.2, 1.0],
            }),
            axes: vec![Axis::new(Param::K0, -2.0, 10.0, 61), Axis::new(Param::R, 0.0, 4.0, 41)],
            fixed: Fixed::default(),
            quantities: vec![Quantity::C],
            averaging: AveragingMethod::Quadrature,
        },
        2 => SweepSpec {
            series: Some(Series {
                param: Param::K0,
                values: vec![3.0, 4.0, 5.0, 10.0],
            }),
            axes: vec![Axis::new(Param::T, 0.05, 3.0, 60)],
            fixed: Fixed {
                r: 1.0,
                ..Fixed::default()
            },
            quantities: vec![Quantity::C],
            averaging: AveragingMethod::Quadrature,
        },
        3 => SweepSpec {
            series: None,
            axes: vec![Axis::new(Param::T, 0.01, 3.0, 50)],
            fixed: Fixed {
                k0: 2.0,
                r: 0.2,
                theta: FRAC_PI_3,
                ..Fixed::default()
            },
            quantities: fidelities,
            averaging: AveragingMethod::Quadrature,
        },
        4 => SweepSpec {
            series: None,
            axes: vec![Axis::new(Param::K0, 0.0, 10.0, 50)],
            fixed: Fixed {
                t: 0.2,
                r: 0.2,
                theta: FRAC_PI_3,
                ..Fixed::default()
            },
            quantities: fidelities,
            averaging: AveragingMethod::Quadrature,
        },
        5 => SweepSpec {
            series: None,
            axes: vec![Axis::new(Param::R, 0.0, 10.0, 50)],
            fixed: Fixed {
                t: 0.2,
                k0: 4.0,
                theta: FRAC_PI_3,
                ..Fixed::default()
            },
            quantities: fidelities,
            averaging: AveragingMethod::Quadrature,
        },
        other => {
            return Err(Error::InvalidSweep(format!("no figure {other} (expected 1-5)")));
        }
    };
    Ok(spec)
}
