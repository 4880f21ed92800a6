//! `poptransfer`: simulate, design and scan coherent population transfer.

mod config;

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use poptransfer::analytic::{self, flatness_frequency};
use poptransfer::control::{self, ControlDesign, Family};
use poptransfer::dressed::decompose;
use poptransfer::numeric::{self, IntegratorConfig};
use poptransfer::trajectory::fmt17;
use poptransfer::{CouplingModel, Error, Pulse, Trajectory};

use config::{Format, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "poptransfer", version, about = "Coherent population transfer in degenerate n-state systems")]
struct Cli {
    /// Run configuration (JSON), used by `simulate`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; overrides the configured path. Defaults to standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest accepted deviation for `simulate --mode compare`.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,

    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a trajectory from a run configuration.
    Simulate {
        /// Overrides `run.mode`.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Print a complete-transfer design.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Enumerate three-state designs as CSV.
    Table {
        #[arg(long, default_value_t = 35)]
        max_product: i64,
    },
    /// Measure `1 - P2(t0)` against the splitting ratio `omega / omega21`.
    Leakage {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// RK4 steps up to t0.
        #[arg(long, default_value_t = 4000)]
        steps: usize,
    },
    /// Field frequency that keeps `P2 >= 1 - pcr` for a time `ts`.
    Flatness {
        #[arg(long)]
        pcr: f64,
        #[arg(long)]
        ts: f64,
    },
    /// Rectangular kicks of shrinking width against the ideal delta kick.
    Kick(KickArgs),
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Quantum numbers (n1, n2).
    ThreeState {
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        n2: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i8,
        /// Also print the harmonic field strength chi for this frequency.
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Reduced symmetric n-state system.
    NState {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        n0: i64,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Two states reaching P2 = v^2.
    TwoState {
        #[arg(long)]
        v: f64,
        #[arg(long)]
        omega: Option<f64>,
    },
}

#[derive(Args)]
struct KickArgs {
    #[arg(long = "A0", alias = "a0")]
    a0: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    widths: Vec<f64>,
    /// 2 or 3 states.
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    /// RK4 step; defaults to the smallest width / 200.
    #[arg(long)]
    dt: Option<f64>,
}

/// A failure with its exit code: 2 for usage or configuration, 3 for numerics.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidPulse(_)
            | Error::InvalidModel(_)
            | Error::DimensionTooSmall(_)
            | Error::InvalidQuantumNumbers { .. }
            | Error::DomainError(_)
            | Error::OutOfDomain(_)
            | Error::Json(_) => 2,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.tol >= 0.0) {
        return Err(Failure::config(format!("--tol must be >= 0, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Simulate { mode } => simulate(cli, *mode),
        Command::Design(d) => design(d),
        Command::Table { max_product } => table(cli, *max_product),
        Command::Leakage { ratios, omega, steps } => leakage(cli, ratios, *omega, *steps),
        Command::Flatness { pcr, ts } => {
            println!("omega={}", flatness_frequency(*pcr, *ts)?);
            Ok(())
        }
        Command::Kick(args) => kick(cli, args),
    }
}

/// Opens `path`, or standard output when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::numeric(format!("cannot write {}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_failure(e: impl std::fmt::Display) -> Failure {
    Failure::numeric(format!("write failed: {e}"))
}

/// Time of interest: the first field maximum `T/4` of a harmonic pulse, the
/// end of a kick, or the last sample of a sampled envelope.
fn transfer_time(pulse: &Pulse) -> f64 {
    match pulse {
        Pulse::Harmonic { omega, .. } => FRAC_PI_2 / omega,
        Pulse::DeltaKick { t0, .. } => *t0,
        Pulse::RectKick { t0, width, .. } => t0 + 0.5 * width,
        Pulse::CustomSampled(s) => s.samples().last().map_or(0.0, |(t, _)| t),
    }
}

fn simulate(cli: &Cli, mode: Option<Mode>) -> Outcome {
    let path = cli.config.as_deref().ok_or_else(|| Failure::config("simulate needs --config"))?;
    let config = RunConfig::from_path(path).map_err(Failure::config)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let pulse = config.pulse(base).map_err(Failure::config)?;
    let model = config.model(pulse).map_err(Failure::config)?;
    let mode = mode.unwrap_or(config.run.mode);
    let t_end = config.run.t_end;
    let intervals = config.run.samples - 1;

    let (trajectory, deviation) = match mode {
        Mode::Analytic => {
            let basis = decompose(&model)?;
            let times: Vec<f64> = (0..=intervals).map(|k| t_end * k as f64 / intervals as f64).collect();
            (analytic::trajectory(&model, &basis, &times)?, None)
        }
        Mode::Numeric | Mode::Compare => {
            let integrator = numeric_grid(&model, t_end, config.run.dt, intervals);
            let numeric = numeric::integrate(&model, &integrator)?;
            let deviation = if mode == Mode::Compare {
                let basis = decompose(&model)?;
                let analytic = analytic::trajectory(&model, &basis, &numeric.times)?;
                Some(numeric::compare(&numeric, &analytic)?)
            } else {
                None
            };
            (numeric, deviation)
        }
    };

    // a configured path is relative to the config file, like samples_file
    let configured = config.output_path().map(|p| base.join(p));
    let out_path = cli.out.as_deref().or(configured.as_deref());
    let mut out = sink(out_path)?;
    match config.format() {
        Format::Csv => trajectory.write_csv(&mut out, true)?,
        Format::Json => trajectory.write_json(&mut out)?,
    }
    out.flush().map_err(write_failure)?;
    drop(out);

    let summary = summary_line(&model, &trajectory);
    if out_path.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if let Some(dev) = deviation {
        let line = format!("max_deviation={dev} tol={}", cli.tol);
        if out_path.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        if !(dev <= cli.tol) {
            return Err(Failure::numeric(format!("analytic and numeric trajectories differ by {dev} > {}", cli.tol)));
        }
    }
    Ok(())
}

/// Default steps run at this fraction of the largest allowed step, which keeps
/// the norm drift of long strongly driven runs below 1e-8.
const DEFAULT_DT_MARGIN: f64 = 2.0;

/// Output every `stride` steps so that `intervals` rows follow `t = 0`.
fn numeric_grid(model: &CouplingModel, t_end: f64, dt: Option<f64>, intervals: usize) -> IntegratorConfig {
    match dt {
        Some(dt) => {
            let steps = (t_end / dt).ceil().max(1.0) as usize;
            IntegratorConfig { stride: (steps / intervals).max(1), ..IntegratorConfig::new(dt, t_end) }
        }
        None => {
            let dt_max = numeric::max_stable_dt(model) / DEFAULT_DT_MARGIN;
            let per_interval = (t_end / intervals as f64 / dt_max).ceil().max(1.0) as usize;
            let steps = per_interval * intervals;
            IntegratorConfig { stride: per_interval, ..IntegratorConfig::new(t_end / steps as f64, t_end) }
        }
    }
}

fn summary_line(model: &CouplingModel, trajectory: &Trajectory) -> String {
    let t0 = transfer_time(model.pulse());
    let (t, p2) = match trajectory.nearest(t0) {
        Some(i) => (trajectory.times[i], trajectory.probabilities[i][1]),
        None => (t0, f64::NAN),
    };
    format!("t0={t} P2(t0)={p2} closure_max_err={}", trajectory.closure_max_err())
}

fn design(cmd: &DesignCommand) -> Outcome {
    let (design, omega) = match cmd {
        DesignCommand::ThreeState { n1, n2, sign, omega } => (control::design_3state(*n1, *n2, *sign)?, omega),
        DesignCommand::NState { n, n0, omega } => (control::design_nstate(*n, *n0)?, omega),
        DesignCommand::TwoState { v, omega } => (control::design_2state(*v)?, omega),
    };
    println!("{}", design_line(&design));
    if let Family::ThreeState { n_o, n_o_prime, .. } = design.family {
        println!("ne={} no={n_o} noprime={n_o_prime}", n_o + n_o_prime);
    }
    if let Some(omega) = omega {
        match control::pulse_for_design(&design, *omega)? {
            Pulse::Harmonic { chi, .. } => println!("chi={chi} omega={omega}"),
            _ => unreachable!("designs map to harmonic pulses"),
        }
    }
    Ok(())
}

fn design_line(d: &ControlDesign) -> String {
    match d.family {
        Family::TwoState { .. } => format!("A_t0={}", control::fmt3(d.action_area)),
        _ => format!("A_t0={} alpha={} beta={}", control::fmt3(d.action_area), control::fmt3(d.alpha), d.beta),
    }
}

fn table(cli: &Cli, max_product: i64) -> Outcome {
    let designs = control::enumerate_designs(max_product);
    if designs.is_empty() {
        eprintln!("warning: no valid (n1, n2) with n1*n2 <= {max_product}");
    }
    let mut out = sink(cli.out.as_deref())?;
    control::write_table_csv(&designs, &mut out)?;
    out.flush().map_err(write_failure)
}

fn leakage(cli: &Cli, ratios: &[f64], omega: f64, steps: usize) -> Outcome {
    let points = numeric::leakage_scan(numeric::two_state_leakage_family(omega), omega, ratios, steps)?;
    let mut out = sink(cli.out.as_deref())?;
    writeln!(out, "ratio,omega21,one_minus_P2,delta_a2_sq,estimate").map_err(write_failure)?;
    for p in &points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt17(p.ratio),
            fmt17(p.omega21),
            fmt17(p.deficit),
            fmt17(p.delta_a2_sq),
            fmt17(p.estimate)
        )
        .map_err(write_failure)?;
    }
    out.flush().map_err(write_failure)?;
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.ratio.is_finite() && p.deficit > 0.0)
        .map(|p| (p.ratio, p.deficit))
        .collect();
    if finite.len() >= 2 {
        eprintln!("slope={}", numeric::log_log_slope(&finite));
    }
    Ok(())
}

fn kick(cli: &Cli, args: &KickArgs) -> Outcome {
    if args.widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Failure::config("widths must be positive"));
    }
    let pulse = Pulse::rect_kick(args.a0, args.t0, args.widths[0])?;
    let model = match args.states {
        2 => CouplingModel::standard_2state(0.0, 0.0, pulse),
        3 => CouplingModel::standard_3state(args.alpha, args.beta, [0.0; 3], pulse),
        s => return Err(Failure::config(format!("--states must be 2 or 3, got {s}"))),
    };
    let smallest = args.widths.iter().copied().fold(f64::INFINITY, f64::min);
    let dt = match args.dt {
        Some(dt) => dt,
        None => {
            let narrowest = model.clone().with_pulse(Pulse::rect_kick(args.a0, args.t0, smallest)?);
            (smallest / 200.0).min(numeric::max_stable_dt(&narrowest))
        }
    };
    let points = numeric::kick_convergence(&model, args.a0, args.t0, &args.widths, dt)?;
    let mut out = sink(cli.out.as_deref())?;
    writeln!(out, "width,P2_final,P2_ideal").map_err(write_failure)?;
    for p in &points {
        writeln!(out, "{},{},{}", fmt17(p.width), fmt17(p.p2_final), fmt17(p.p2_ideal)).map_err(write_failure)?;
    }
    out.flush().map_err(write_failure)
}
