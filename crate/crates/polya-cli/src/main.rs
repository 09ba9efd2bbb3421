//! Command-line interface for the Pólya return-probability library.
//!
//! Subcommands:
//! - `pd`: return probabilities p(d) by one or all of the analytic routes,
//!   with a cross-method consistency column in `all` mode.
//! - `fc`: direct evaluation of the Lauricella F_C series.
//! - `laplace-check`: randomized verification of the Laplace-transform
//!   identity behind the series route.
//! - `mc`: Monte Carlo random-walk estimate of the return probability.
//! - `watson`: quasi-Monte Carlo estimate of the lattice Green integral.
//!
//! Data goes to stdout (CSV or JSON lines); diagnostics go to stderr.
//! Exit codes: 0 success, 1 usage error, 2 parameter/constraint violation,
//! 3 tolerance breach, 4 resource limit exceeded.

mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use polya_core::{
    lattice_green_integral, lauricella_fc, return_probability, verify_lemma1, Error,
    LatticeIntegralConfig, LauricellaParams, Method, SeriesConfig, WalkConfig,
};
use output::{real, Emitter, Format, OutputRecord};

const EXIT_USAGE: u8 = 1;
const EXIT_CONSTRAINT: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

/// Return probabilities of the simple random walk on Z^d.
#[derive(Parser)]
#[command(name = "polya", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute p(d) = 1 - 1/u(d) for transient dimensions d >= 3.
    Pd(PdArgs),
    /// Evaluate the Lauricella F_C series directly.
    Fc(FcArgs),
    /// Verify the Laplace-transform identity on random parameter draws.
    LaplaceCheck(LaplaceCheckArgs),
    /// Estimate the return probability by simulating random walks.
    Mc(McArgs),
    /// Estimate the lattice Green integral by quasi-Monte Carlo.
    Watson(WatsonArgs),
}

#[derive(Args)]
struct PdArgs {
    /// Dimension or inclusive range, e.g. `3` or `3..10`; supported range 3..=64.
    #[arg(long, default_value = "3", value_parser = parse_d_range)]
    d: DRange,
    /// Computation route; `all` runs every route applicable at each d and
    /// reports their largest pairwise relative difference.
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,
    /// Relative tolerance for the series/quadrature truncation.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_positive_real)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FcArgs {
    /// Numerator parameter a.
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Numerator parameter b.
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Denominator parameters, comma-separated, e.g. `1,1,1`.
    #[arg(long, value_parser = parse_real_list)]
    c: RealList,
    /// Arguments, comma-separated; must have the same length as --c.
    #[arg(long, value_parser = parse_real_list)]
    x: RealList,
    /// Largest shell index to sum.
    #[arg(long, default_value_t = 200_000)]
    nmax: usize,
    /// Stop once a shell contributes less than this relative to the total.
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive_real)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct LaplaceCheckArgs {
    /// Number of random parameter draws to test.
    #[arg(long, default_value_t = 50)]
    count: u32,
    /// Seed for the parameter draws.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest acceptable relative difference between the two sides.
    #[arg(long, default_value_t = 1e-6, value_parser = parse_positive_real)]
    tolerance: f64,
}

#[derive(Args)]
struct McArgs {
    /// Dimension of the lattice (the walk oracle also accepts 1 and 2).
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Number of independent walks.
    #[arg(long, default_value_t = 100_000)]
    walks: u64,
    /// Maximum steps per walk before truncation.
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    /// Seed; each walk derives its own counter-based stream, so results are
    /// identical for any worker count.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Number of threads.
    #[arg(long, default_value_t = 1)]
    workers: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct WatsonArgs {
    /// Dimension; must be >= 3 (the integral diverges for d = 1, 2).
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Number of lattice points.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Seed for the Cranley-Patterson shifts.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Apply the d/(2 pi)^d prefactor so the estimate targets u(d) directly.
    /// Without it the raw integral of 1/(d - sum cos x_j) over the cube is
    /// reported. The flag is explicit because published statements of the
    /// integral differ on whether the prefactor is included.
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Series,
    Quad,
    Gamma,
    All,
}

#[derive(Debug, Clone, Copy)]
struct DRange {
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone)]
struct RealList(Vec<f64>);

fn parse_d_range(s: &str) -> Result<DRange, String> {
    let parse_one = |part: &str| -> Result<u32, String> {
        part.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{part}` is not a dimension"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((left, right)) => (parse_one(left)?, parse_one(right)?),
        None => {
            let d = parse_one(s)?;
            (d, d)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    if lo < 3 {
        return Err(format!(
            "d = {lo} is recurrent: for d = 1 and d = 2 the walk returns with probability 1, \
             so there is nothing to compute; supported dimensions are 3..=64"
        ));
    }
    if hi > 64 {
        return Err(format!("d = {hi} is beyond the supported range 3..=64"));
    }
    Ok(DRange { lo, hi })
}

fn parse_positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(format!("`{s}` must be a positive finite number"));
    }
    Ok(v)
}

fn parse_real_list(s: &str) -> Result<RealList, String> {
    let items: Result<Vec<f64>, _> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{part}` is not a number"))
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err("list must not be empty".to_string());
    }
    Ok(RealList(items))
}

/// A failure that terminates the process with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Maps library errors onto the exit-code contract.
fn failure_from(err: Error) -> Failure {
    let code = match err {
        Error::StepBudgetExceeded { .. } => EXIT_RESOURCE,
        _ => EXIT_CONSTRAINT,
    };
    Failure::new(code, err.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Pd(args) => run_pd(args),
        Command::Fc(args) => run_fc(args),
        Command::LaplaceCheck(args) => run_laplace_check(args),
        Command::Mc(args) => run_mc(args),
        Command::Watson(args) => run_watson(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn method_label(method: Method) -> &'static str {
    match method {
        Method::Series => "series",
        Method::Quadrature => "quad",
        Method::GammaProduct => "gamma",
    }
}

fn run_pd(args: PdArgs) -> Result<(), Failure> {
    let config = SeriesConfig {
        tolerance: args.tolerance,
        ..SeriesConfig::default()
    };
    let cross_check = args.method == MethodArg::All;
    let mut emitter = Emitter::new(args.format, cross_check);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut worst_diff = 0.0f64;

    for d in args.d.lo..=args.d.hi {
        let methods: Vec<Method> = match args.method {
            MethodArg::Series => vec![Method::Series],
            MethodArg::Quad => vec![Method::Quadrature],
            MethodArg::Gamma => vec![Method::GammaProduct],
            // `all` runs every route that exists at this dimension; the
            // closed-form gamma product is specific to d = 3.
            MethodArg::All => {
                let mut list = vec![Method::Series, Method::Quadrature];
                if d == 3 {
                    list.push(Method::GammaProduct);
                }
                list
            }
        };
        let mut rows = Vec::with_capacity(methods.len());
        for method in methods {
            let start = Instant::now();
            let result = return_probability(d, method, &config).map_err(failure_from)?;
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(OutputRecord {
                d,
                method: method_label(method),
                value: result.p,
                error_estimate: result.error_estimate,
                elapsed_ms,
                max_pairwise_rel_diff: None,
            });
        }
        if cross_check {
            let mut max_diff = 0.0f64;
            for i in 0..rows.len() {
                for j in (i + 1)..rows.len() {
                    let scale = rows[i].value.abs().max(rows[j].value.abs()).max(f64::MIN_POSITIVE);
                    max_diff = max_diff.max((rows[i].value - rows[j].value).abs() / scale);
                }
            }
            worst_diff = worst_diff.max(max_diff);
            for row in &mut rows {
                row.max_pairwise_rel_diff = Some(max_diff);
            }
        }
        for row in &rows {
            emitter
                .emit(&mut out, row)
                .map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?;
        }
    }

    if cross_check && worst_diff > 10.0 * args.tolerance {
        return Err(Failure::new(
            EXIT_TOLERANCE,
            format!(
                "cross-method disagreement {} exceeds 10 x tolerance = {}",
                real(worst_diff),
                real(10.0 * args.tolerance)
            ),
        ));
    }
    Ok(())
}

fn run_fc(args: FcArgs) -> Result<(), Failure> {
    let c = args.c.0;
    let x = args.x.0;
    if c.len() != x.len() {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "--c and --x must have the same length (got {} and {})",
                c.len(),
                x.len()
            ),
        ));
    }
    let params = LauricellaParams {
        a: args.a,
        b: args.b,
        c,
        x,
    };
    let config = SeriesConfig {
        tolerance: args.tolerance,
        n_max: args.nmax,
        ..SeriesConfig::default()
    };
    let start = Instant::now();
    let eval = lauricella_fc(&params, &config).map_err(failure_from)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if eval.outside_domain {
        return Err(Failure::new(
            EXIT_CONSTRAINT,
            "arguments lie outside the convergence domain (sum of sqrt(|x_i|) must be < 1)",
        ));
    }
    if !eval.converged {
        eprintln!(
            "warning: series not converged after {} shells; last shell still contributes {}",
            eval.shells_used,
            real(eval.error_indicator)
        );
    }
    let record = OutputRecord {
        d: params.c.len() as u32,
        method: "fc",
        value: eval.value,
        error_estimate: eval.error_indicator.abs(),
        elapsed_ms,
        max_pairwise_rel_diff: None,
    };
    let mut emitter = Emitter::new(args.format, false);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    emitter
        .emit(&mut out, &record)
        .map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?;
    Ok(())
}

fn run_laplace_check(args: LaplaceCheckArgs) -> Result<(), Failure> {
    if args.count == 0 {
        return Err(Failure::new(EXIT_USAGE, "--count must be at least 1"));
    }
    let report = verify_lemma1(args.count, args.seed).map_err(failure_from)?;
    // Deterministic report: no timing, so repeated runs are byte-identical.
    println!(
        "laplace-check count={} seed={} max_rel_diff={} mean_rel_diff={} worst_index={}",
        report.count,
        args.seed,
        real(report.max_rel_diff),
        real(report.mean_rel_diff),
        report.worst_index
    );
    if report.max_rel_diff > args.tolerance {
        return Err(Failure::new(
            EXIT_TOLERANCE,
            format!(
                "max relative difference {} exceeds tolerance {}",
                real(report.max_rel_diff),
                real(args.tolerance)
            ),
        ));
    }
    Ok(())
}

fn run_mc(args: McArgs) -> Result<(), Failure> {
    let config = WalkConfig {
        d: args.d,
        walks: args.walks,
        horizon: args.horizon,
        seed: args.seed,
        workers: args.workers,
        ..WalkConfig::default()
    };
    let start = Instant::now();
    let estimate = polya_core::estimate_return(&config).map_err(failure_from)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    eprintln!(
        "mc: returned={} escaped={} truncated={} ci95=[{},{}]",
        estimate.returned,
        estimate.escaped,
        estimate.truncated,
        real(estimate.ci95.0),
        real(estimate.ci95.1)
    );
    let record = OutputRecord {
        d: args.d,
        method: "mc",
        value: estimate.p_hat,
        error_estimate: estimate.std_err,
        elapsed_ms,
        max_pairwise_rel_diff: None,
    };
    let mut emitter = Emitter::new(args.format, false);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    emitter
        .emit(&mut out, &record)
        .map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?;
    Ok(())
}

fn run_watson(args: WatsonArgs) -> Result<(), Failure> {
    let config = LatticeIntegralConfig {
        samples: args.samples,
        seed: args.seed,
        normalize: args.normalize,
    };
    let start = Instant::now();
    let estimate = lattice_green_integral(args.d, &config).map_err(failure_from)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if estimate.clamped > 0 {
        eprintln!(
            "note: {} of {} points fell inside the singular cutoff and were clamped",
            estimate.clamped, args.samples
        );
    }
    let record = OutputRecord {
        d: args.d,
        method: "watson",
        value: estimate.value,
        error_estimate: estimate.error_estimate,
        elapsed_ms,
        max_pairwise_rel_diff: None,
    };
    let mut emitter = Emitter::new(args.format, false);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    emitter
        .emit(&mut out, &record)
        .map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?;
    Ok(())
}
