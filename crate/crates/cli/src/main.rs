use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use certcalc::oracle::audit;
use certcalc::scenario::{
    default_grid, density_output, density_rows, eval_output, evaluate, is_axis, parse_axis, parse_count,
    parse_count_axis, parse_future, parse_scenario, plan, plan_output, sweep, sweep_output, EvalRecord, Format,
    FutureTrials, PlanOutcome, PlanRecord, PriorParams, QuadratureParams, ScenarioFile, SweepAxis, DEFAULT_N_MAX,
};
use certcalc::Error;
use clap::{Args, Parser, Subcommand};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_UNATTAINABLE: u8 = 4;

/// Posterior and predictive probabilities of all-future-success after n of n
/// successes.
#[derive(Parser)]
#[command(name = "certcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Eval(ScenarioArgs),
    /// Evaluate along an axis given as --n or --N (list, range, or log range).
    Sweep(ScenarioArgs),
    /// Find the smallest n whose value reaches --target.
    Plan(ScenarioArgs),
    /// Tabulate prior and posterior densities over a p grid.
    Density {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Grid of p values, in axis syntax (default: 101 points over the support).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Run the oracle cross-checks.
    #[command(hide = true)]
    Verify {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON scenario file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prior family, e.g. bayes-laplace, jeffreys, j-shaped, left-truncated.
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "decay-k")]
    decay_k: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated masses for R = 0..=N (custom prior).
    #[arg(long, value_delimiter = ',')]
    masses: Option<Vec<f64>>,
    /// Observed successes.
    #[arg(long = "n")]
    n: Option<String>,
    /// Future trials, or "limit".
    #[arg(long = "N")]
    future: Option<String>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long = "n-max")]
    n_max: Option<u64>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Distance from a divergent endpoint at which integration stops.
    #[arg(long)]
    eps: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

impl ScenarioArgs {
    /// Scenario file merged with the scalar flags. `--n` and `--N` are only
    /// applied when `counts` is set, since sweeps read them as axes.
    fn scenario(&self, counts: bool) -> Result<ScenarioFile, Failure> {
        let mut file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
                parse_scenario(&text)?
            }
            None => ScenarioFile::default(),
        };
        let mut flags = ScenarioFile::default();
        let prior = PriorParams {
            family: self.prior.clone(),
            alpha: self.alpha,
            beta: self.beta,
            k: self.k,
            q: self.q,
            decay_k: self.decay_k,
            lambda: self.lambda,
            eta: self.eta,
            omega: self.omega,
            a: self.a,
            b: self.b,
            c: self.c,
            masses: self.masses.clone(),
        };
        if prior != PriorParams::default() {
            flags.prior = Some(prior);
        }
        if self.eps.is_some() {
            flags.quadrature = Some(QuadratureParams {
                endpoint_eps: self.eps,
                ..QuadratureParams::default()
            });
        }
        if counts {
            flags.n = self.n.as_deref().map(parse_count).transpose()?;
            flags.future = self.future.as_deref().map(parse_future).transpose()?;
        }
        flags.target = self.target;
        flags.n_max = self.n_max;
        file.overlay(&flags);
        Ok(file)
    }

    fn format(&self) -> Result<Format, Failure> {
        Ok(self.format.parse()?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let result = match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot write output: {e}"),
    })
}

fn cmd_eval(args: &ScenarioArgs) -> Result<u8, Failure> {
    let file = args.scenario(true)?;
    let prior = file.prior_choice()?;
    let n = file.require_n()?;
    let future = file.require_future()?;
    let quadrature = file.quadrature_spec()?;
    let evaluation = evaluate(&prior, n, future, &quadrature)?;
    let record = EvalRecord {
        prior,
        n,
        future,
        quadrature,
        evaluation,
    };
    emit(args.out.as_deref(), &eval_output(&record, args.format()?))?;
    Ok(0)
}

fn cmd_sweep(args: &ScenarioArgs) -> Result<u8, Failure> {
    let file = args.scenario(false)?;
    let prior = file.prior_choice()?;
    let quadrature = file.quadrature_spec()?;
    let n_flag = args.n.as_deref();
    let future_flag = args.future.as_deref();
    if n_flag.is_some_and(is_axis) && future_flag.is_some_and(is_axis) {
        return Err(config_failure("sweep takes one axis; give a list or range to only one of --n and --N"));
    }
    let (axis, values, n, future) = if let Some(spec) = future_flag.filter(|s| is_axis(s)) {
        let n = match n_flag {
            Some(s) => parse_count(s)?,
            None => file.require_n()?,
        };
        // N comes from the axis
        (SweepAxis::Future, parse_count_axis(spec)?, n, FutureTrials::Limit)
    } else if let Some(spec) = n_flag {
        let future = match future_flag {
            Some(s) => parse_future(s)?,
            None => file.require_future()?,
        };
        // n comes from the axis
        (SweepAxis::Sample, parse_count_axis(spec)?, 0, future)
    } else {
        return Err(config_failure("sweep needs an axis: give --n or --N as a list or range"));
    };
    let rows = sweep(&prior, axis, &values, n, future, &quadrature)?;
    emit(args.out.as_deref(), &sweep_output(axis, &rows, args.format()?))?;
    Ok(0)
}

fn cmd_plan(args: &ScenarioArgs) -> Result<u8, Failure> {
    let file = args.scenario(true)?;
    let prior = file.prior_choice()?;
    let future = file.require_future()?;
    let target = file.target.ok_or_else(|| config_failure("plan needs --target"))?;
    let quadrature = file.quadrature_spec()?;
    let outcome = plan(&prior, future, target, file.n_max.unwrap_or(DEFAULT_N_MAX), &quadrature)?;
    let record = PlanRecord {
        prior,
        future,
        target,
        outcome,
    };
    emit(args.out.as_deref(), &plan_output(&record, args.format()?))?;
    Ok(match outcome {
        PlanOutcome::Found { .. } => 0,
        PlanOutcome::Unattainable { .. } => EXIT_UNATTAINABLE,
    })
}

fn cmd_density(args: &ScenarioArgs, grid: Option<&str>) -> Result<u8, Failure> {
    let file = args.scenario(true)?;
    let prior = file.prior_choice()?;
    let n = file.n.unwrap_or(0);
    let quadrature = file.quadrature_spec()?;
    let grid = match grid {
        Some(spec) => parse_axis(spec)?,
        None => default_grid(&prior, n)?,
    };
    let rows = density_rows(&prior, n, &grid, &quadrature)?;
    emit(args.out.as_deref(), &density_output(&rows, args.format()?))?;
    Ok(0)
}

fn cmd_verify(seed: u64) -> Result<u8, Failure> {
    let checks = audit(seed);
    let mut text = String::new();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status} {}: {}\n", c.name, c.detail));
    }
    emit(None, &text)?;
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { EXIT_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Density { scenario, grid } => cmd_density(scenario, grid.as_deref()),
        Command::Verify { seed } => cmd_verify(*seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("certcalc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
