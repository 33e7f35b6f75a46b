use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use varbound::config::{BasisChoice, BoundConfig};
use varbound::entropic::c_constant;
use varbound::fuzz::{run_fuzz, FuzzOptions};
use varbound::perm::Permutation;
use varbound::problem::{load_problem, Problem};
use varbound::quantum::Construction;
use varbound::report::{BoundReport, IntervalReport, Sections, COEFFICIENT_BOUNDS};
use varbound::scenarios::ScenarioKind;
use varbound::sweep::{parse_theta_range, run_sweep, to_csv, to_json};
use varbound::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PURITY: u8 = 3;

/// Variance-based uncertainty bounds for pairs of observables.
#[derive(Parser, Debug)]
#[command(name = "varbound", version)]
struct Cli {
    /// Relative slack for ordering and containment checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format (csv is only available for sweeps).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ConstructionArg {
    Basis,
    Fidelity,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum BasisArg {
    Computational,
    EigenA,
    EigenB,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScenarioArg {
    Spin1,
    Spinhalf,
    Custom,
}

#[derive(Args, Debug, Clone)]
struct BoundFlags {
    /// Coefficient construction; overrides the problem file.
    #[arg(long, value_enum)]
    construction: Option<ConstructionArg>,
    /// Expansion frame for the basis construction; overrides the problem file.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    /// Second permutation of the sum bound as comma-separated 0-based images.
    #[arg(long, value_delimiter = ',')]
    pi2: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Product-form bounds, the full I_k chain and the product interval.
    Product {
        input: PathBuf,
        #[command(flatten)]
        flags: BoundFlags,
    },
    /// Sum-form bounds and the sum interval.
    Sum {
        input: PathBuf,
        #[command(flatten)]
        flags: BoundFlags,
    },
    /// Both uncertainty intervals.
    Interval {
        input: PathBuf,
        #[command(flatten)]
        flags: BoundFlags,
    },
    /// One row of bounds per angle of a scenario family.
    Sweep {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        /// start:end:steps in radians; endpoints accept `pi` (e.g. 0:pi/2:201).
        #[arg(long, allow_hyphen_values = true)]
        theta_range: String,
        /// Problem file supplying observables, `state` and `sweep_state` for custom sweeps.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[command(flatten)]
        flags: BoundFlags,
    },
    /// Randomized invariant checks.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// min:max dimension, inclusive.
        #[arg(long, default_value = "2:6")]
        dim_range: String,
        /// Replay a single trial.
        #[arg(long)]
        trial: Option<u64>,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// The entropy-variance constant for two spectra.
    Cconst {
        /// Comma-separated eigenvalues of A.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        eigs_a: Vec<f64>,
        /// Comma-separated eigenvalues of B.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        eigs_b: Vec<f64>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Purity { .. } => EXIT_PURITY,
            Error::Containment { .. } => EXIT_VIOLATION,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if code == EXIT_PURITY {
            message.push_str(&format!(
                "\nunavailable bounds: {}\nhint: --construction fidelity works for mixed states",
                COEFFICIENT_BOUNDS.join(", ")
            ));
        }
        Failure { code, message }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn read_problem(path: &Path, flags: &BoundFlags) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let mut problem = load_problem(&text)?;
    apply_flags(&mut problem.config, flags)?;
    Ok(problem)
}

fn apply_flags(config: &mut BoundConfig, flags: &BoundFlags) -> Result<(), Failure> {
    if let Some(c) = flags.construction {
        config.construction = match c {
            ConstructionArg::Basis => Construction::Basis,
            ConstructionArg::Fidelity => Construction::Fidelity,
        };
    }
    if let Some(b) = flags.basis {
        config.basis = match b {
            BasisArg::Computational => BasisChoice::Computational,
            BasisArg::EigenA => BasisChoice::EigenA,
            BasisArg::EigenB => BasisChoice::EigenB,
        };
    }
    if let Some(images) = &flags.pi2 {
        config.pi2 = Some(Permutation::new(images.clone())?);
    }
    Ok(())
}

fn check_pi2(config: &BoundConfig, n: usize) -> Result<(), Failure> {
    match &config.pi2 {
        Some(p) if p.len() != n => Err(input_error(format!("--pi2 has length {}, problem dimension is {n}", p.len()))),
        _ => Ok(()),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, body).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_only(cli: &Cli) -> Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(input_error("csv output is only available for sweep"));
    }
    Ok(())
}

fn parse_dim_range(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || input_error(format!("dimension range {text:?} must look like min:max"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        return Err(input_error("--tolerance must be a nonnegative number"));
    }
    match &cli.command {
        Command::Product { input, flags } | Command::Sum { input, flags } => {
            json_only(cli)?;
            let p = read_problem(input, flags)?;
            check_pi2(&p.config, p.a.dim())?;
            let sections =
                if matches!(cli.command, Command::Product { .. }) { Sections::PRODUCT } else { Sections::SUM };
            let report = BoundReport::compute(&p.state, &p.a, &p.b, &p.config, sections)?;
            emit(cli, &report.to_json())?;
        }
        Command::Interval { input, flags } => {
            json_only(cli)?;
            let p = read_problem(input, flags)?;
            check_pi2(&p.config, p.a.dim())?;
            emit(cli, &IntervalReport::compute(&p.state, &p.a, &p.b, &p.config)?.to_json())?;
        }
        Command::Sweep { scenario, theta_range, problem, flags } => {
            let thetas = parse_theta_range(theta_range)?;
            let (kind, mut config) = match scenario {
                ScenarioArg::Spin1 => (ScenarioKind::Spin1LxLy, BoundConfig::default()),
                ScenarioArg::Spinhalf => (ScenarioKind::SpinHalfSxSz, BoundConfig::default()),
                ScenarioArg::Custom => {
                    let path = problem.as_ref().ok_or_else(|| input_error("custom sweeps need --problem"))?;
                    let p = read_problem(path, &BoundFlags { construction: None, basis: None, pi2: None })?;
                    let end = p
                        .sweep_state
                        .ok_or_else(|| input_error("custom sweeps need a sweep_state in the problem file"))?;
                    let start = p.state.pure_vector()?.into_owned();
                    (ScenarioKind::Custom { a: p.a, b: p.b, start, end }, p.config)
                }
            };
            apply_flags(&mut config, flags)?;
            check_pi2(&config, kind.observables().0.dim())?;
            let rows = run_sweep(&kind, &thetas, &config, cli.tolerance)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => to_csv(&rows),
                Format::Json => to_json(&rows),
            };
            emit(cli, &text)?;
        }
        Command::Fuzz { trials, dim_range, trial, report, inject_sign_flip } => {
            json_only(cli)?;
            if *trials == 0 {
                return Err(input_error("--trials must be at least 1"));
            }
            let (dim_min, dim_max) = parse_dim_range(dim_range)?;
            let opts = FuzzOptions {
                trials: *trials,
                dim_min,
                dim_max,
                seed: cli.seed,
                tolerance: cli.tolerance,
                only_trial: *trial,
                sign_flip: *inject_sign_flip,
            };
            let result = run_fuzz(&opts)?;
            let text = result.to_json();
            if let Some(path) = report {
                std::fs::write(path, format!("{text}\n"))
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            }
            emit(cli, &text)?;
            if !result.passed() {
                for v in &result.violations {
                    eprintln!(
                        "violation: seed {} trial {} invariant {} magnitude {:e}: {}\n  reproduce: {}",
                        v.seed, v.trial, v.invariant, v.magnitude, v.detail, v.reproducer
                    );
                }
                return Ok(EXIT_VIOLATION);
            }
            eprintln!("fuzz: {} trials, {} invariants, no violations", result.trials_run, result.invariants.len());
        }
        Command::Cconst { eigs_a, eigs_b } => {
            json_only(cli)?;
            let c = c_constant(eigs_a, eigs_b)?;
            emit(cli, &serde_json::to_string_pretty(&c).expect("serializable"))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
