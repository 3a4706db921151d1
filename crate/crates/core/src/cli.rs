//! The `qdot` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::sweep::{figure_preset, run_sweep, Axis, Execution, Fixed, OutputFormat, Quantity, SweepSpec};
use crate::teleport::AveragingMethod;
use crate::verify::{verify, VerifyOptions, DEFAULT_MC_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY_FAILED: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qdot",
    version,
    about = "Thermal entanglement and teleportation fidelity of a two-spin quantum dot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thermal concurrence C.
    Concurrence,
    /// Subspace and Bloch-averaged teleportation fidelities.
    Fidelity,
    /// Critical temperature k0 / (4 ln 3).
    Tc,
    /// Data for figure preset 1-5.
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
    },
    /// Runs every oracle cross-check and prints a pass/fail report.
    Verify,
    /// Zero-temperature concurrence.
    GroundState,
}

/// Flags shared by all subcommands. Every field may also be set in the
/// `--config` file; flags win.
#[derive(Debug, Default, Clone, Args)]
struct CommonArgs {
    /// File of `key = value` lines mirroring these flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Exchange coupling [default: 4].
    #[arg(long, global = true, allow_negative_numbers = true)]
    k0: Option<f64>,
    /// Zeeman coupling [default: 1].
    #[arg(long, global = true, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Temperature [default: 0.2].
    #[arg(long, global = true, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Input polar angle [default: pi/3].
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Input phase [default: 0].
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Sweep axis `name:min:max:steps` with name in {k0, r, T, theta}.
    #[arg(long, global = true, value_name = "AXIS")]
    sweep: Vec<String>,
    /// Comma-separated quantities: C, Tc, F_o, F_e, F_a, F_a_o, F_a_e, F_a_w, populations, C0.
    #[arg(long, global = true, value_name = "LIST")]
    quantities: Option<String>,
    /// Output file [default: standard output].
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// csv or json [default: csv].
    #[arg(long, global = true)]
    format: Option<String>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count; fidelity averages use quadrature unless set.
    #[arg(long, global = true)]
    mc_samples: Option<u64>,
    /// Agreement tolerance for `verify` [default: 1e-10].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Evaluate grid points on one thread.
    #[arg(long, global = true)]
    serial: bool,
}

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSweep(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I>(args: I) -> u8
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("qdot: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let common = match &cli.common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
            merge(cli.common.clone(), parse_config(&text)?)
        }
        None => cli.common.clone(),
    };
    let format = match &common.format {
        Some(f) => f.parse::<OutputFormat>()?,
        None => OutputFormat::Csv,
    };

    if let Command::Verify = cli.command {
        let opts = VerifyOptions {
            tolerance: common.tol.unwrap_or(DEFAULT_TOLERANCE),
            mc_samples: common.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
            seed: common.seed.unwrap_or(DEFAULT_SEED),
        };
        if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
            return Err(Failure::usage("--tol must be > 0"));
        }
        let report = verify(&opts);
        emit(&common, &report.render())?;
        return Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED });
    }

    let spec = build_spec(&cli.command, &common)?;
    let execution = if common.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let table = run_sweep(&spec, execution)?;
    emit(&common, &table.render(format))?;
    Ok(EXIT_OK)
}

fn build_spec(command: &Command, common: &CommonArgs) -> Result<SweepSpec, Failure> {
    if let Command::Fig { id } = command {
        if !common.sweep.is_empty() || common.quantities.is_some() {
            return Err(Failure::usage("`fig` takes no --sweep or --quantities"));
        }
        return Ok(figure_preset(*id)?);
    }
    let defaults: &[Quantity] = match command {
        Command::Concurrence => &[Quantity::C],
        Command::Fidelity => &[Quantity::FO, Quantity::FE, Quantity::FA],
        Command::Tc => &[Quantity::Tc],
        Command::GroundState => &[Quantity::GroundC],
        Command::Fig { .. } | Command::Verify => unreachable!("handled above"),
    };
    let quantities = match &common.quantities {
        Some(list) => list.split(',').map(str::parse).collect::<Result<Vec<_>, _>>()?,
        None => defaults.to_vec(),
    };
    if common.sweep.len() > 2 {
        return Err(Failure::usage(format!(
            "--sweep given {} times; at most 2",
            common.sweep.len()
        )));
    }
    let axes = common
        .sweep
        .iter()
        .map(|s| s.parse::<Axis>())
        .collect::<Result<Vec<_>, _>>()?;
    let base = Fixed::default();
    let fixed = Fixed {
        k0: common.k0.unwrap_or(base.k0),
        r: common.r.unwrap_or(base.r),
        t: common.t.unwrap_or(base.t),
        theta: common.theta.unwrap_or(base.theta),
        phi: common.phi.unwrap_or(base.phi),
    };
    let averaging = match common.mc_samples {
        Some(samples) => AveragingMethod::MonteCarlo {
            samples,
            seed: common.seed.unwrap_or(DEFAULT_SEED),
        },
        None => AveragingMethod::Quadrature,
    };
    Ok(SweepSpec {
        series: None,
        axes,
        fixed,
        quantities,
        averaging,
    })
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), Failure> {
    let written = match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    written.map_err(Failure::usage)
}

/// Reads `key = value` lines. Blank lines and `#` comments are skipped;
/// keys may carry a leading `--`; `sweep` may repeat.
fn parse_config(text: &str) -> Result<CommonArgs, Failure> {
    let mut cfg = CommonArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Failure::usage(format!("config line {}: {what}", lineno + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{value}` is not a number")))
        };
        let integer = || {
            value
                .parse::<u64>()
                .map_err(|_| bad(&format!("`{value}` is not an integer")))
        };
        match key.as_str() {
            "k0" => cfg.k0 = Some(float()?),
            "r" => cfg.r = Some(float()?),
            "t" | "T" => cfg.t = Some(float()?),
            "theta" => cfg.theta = Some(float()?),
            "phi" => cfg.phi = Some(float()?),
            "tol" => cfg.tol = Some(float()?),
            "seed" => cfg.seed = Some(integer()?),
            "mc-samples" => cfg.mc_samples = Some(integer()?),
            "sweep" => cfg.sweep.push(value.to_string()),
            "quantities" => cfg.quantities = Some(value.to_string()),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => cfg.format = Some(value.to_string()),
            "serial" => {
                cfg.serial = value
                    .parse::<bool>()
                    .map_err(|_| bad(&format!("`{value}` is not true or false")))?
            }
            other => return Err(bad(&format!("unknown key `{other}`"))),
        }
    }
    Ok(cfg)
}

fn merge(flags: CommonArgs, file: CommonArgs) -> CommonArgs {
    CommonArgs {
        config: flags.config,
        k0: flags.k0.or(file.k0),
        r: flags.r.or(file.r),
        t: flags.t.or(file.t),
        theta: flags.theta.or(file.theta),
        phi: flags.phi.or(file.phi),
        sweep: if flags.sweep.is_empty() {
            file.sweep
        } else {
            flags.sweep
        },
        quantities: flags.quantities.or(file.quantities),
        out: flags.out.or(file.out),
        format: flags.format.or(file.format),
        seed: flags.seed.or(file.seed),
        mc_samples: flags.mc_samples.or(file.mc_samples),
        tol: flags.tol.or(file.tol),
        serial: flags.serial || file.serial,
    }
}
