use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{Serialize, SerializeMap, Serializer};

use linesearch::lowerbound::{lower_bound_cr, optimal_beta, scan_beta};
use linesearch::num::{format_f64, Num};
use linesearch::numeric::golden_section;
use linesearch::oracle::{
    expected_detection_time, simulate_detection, sup_cr, DEFAULT_SAMPLES_PER_ROUND, DEFAULT_TOL,
};
use linesearch::strategies::{
    closed_form_for, fast_cr, fast_ratio, fast_trajectory, hybrid_cr, hybrid_cr1, hybrid_cr2, hybrid_trajectory,
    slow_ratio, slow_trajectory,
};
use linesearch::tuner::{
    build_heatmap, fast_slow_threshold, fast_slow_threshold_printed, optimize_hybrid, OptimizeBudget,
    Quantity, A_MAX, A_MIN,
};
use linesearch::verify::{run_checks, GROUPS};
use linesearch::{validate_params, Error, SearchParams, StrategyKind, StrategySpec, Trajectory};

#[derive(Parser)]
#[command(name = "linesearch", version, about = "Search on the line with unreliable fast detection")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LINESEARCH_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form competitive ratio.
    Cr(CrArgs),
    /// Exact expected ratio at a target, or the worst case over targets.
    Oracle(OracleArgs),
    /// Monte Carlo estimate of the detection time.
    Simulate(SimulateArgs),
    /// Tune the hybrid strategy.
    Optimize(OptimizeArgs),
    /// Grid of a quantity over (p, v).
    Heatmap(HeatmapArgs),
    /// Lower bound for p = 0.
    LowerBound(LowerBoundArgs),
    /// Run the built-in checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Fast,
    Slow,
    Hybrid,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GridFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct StrategyArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Detection probability at full speed.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Slow speed.
    #[arg(long, default_value_t = 0.0)]
    v: f64,
    /// Expansion ratio.
    #[arg(long)]
    a: Option<f64>,
    /// Scouting fraction (hybrid only).
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Args)]
struct CrArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Also print the alternative fast/slow threshold expression.
    #[arg(long)]
    alternative_threshold: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Signed target position.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sup")]
    d: Option<f64>,
    /// Search for the worst target instead.
    #[arg(long, conflicts_with = "d")]
    sup: bool,
    #[arg(long, default_value_t = 40)]
    rounds: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_ROUND)]
    samples: usize,
    /// Relative tolerance of the series tail.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, allow_hyphen_values = true)]
    d: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    v: f64,
    /// Points per axis of the coarse grid.
    #[arg(long, default_value_t = OptimizeBudget::default().coarse)]
    coarse: usize,
    #[arg(long, default_value_t = OptimizeBudget::default().max_iterations)]
    max_iterations: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    quantity: Quantity,
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long, default_value_t = 0.0)]
    v_min: f64,
    #[arg(long, default_value_t = 1.0)]
    v_max: f64,
    /// Recorded in the output metadata.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = OptimizeBudget::default().coarse)]
    coarse: usize,
    #[arg(long, default_value_t = OptimizeBudget::default().max_iterations)]
    max_iterations: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    format: GridFormat,
}

#[derive(Args)]
struct LowerBoundArgs {
    #[arg(long)]
    v: f64,
    /// Evaluate at this beta instead of the optimum.
    #[arg(long)]
    beta: Option<f64>,
    /// Also tabulate the ratio at this many beta values.
    #[arg(long)]
    scan: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run one group of checks.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(GROUPS))]
    only: Option<String>,
    #[arg(long)]
    json: bool,
}

enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Pairs(Vec<(f64, f64)>),
}

/// Ordered key/value output rendered as text or JSON.
#[derive(Default)]
struct Report(Vec<(&'static str, Value)>);

impl Report {
    fn num(mut self, key: &'static str, x: f64) -> Self {
        self.0.push((key, Value::Num(x)));
        self
    }

    fn int(mut self, key: &'static str, x: u64) -> Self {
        self.0.push((key, Value::Int(x)));
        self
    }

    fn flag(mut self, key: &'static str, x: bool) -> Self {
        self.0.push((key, Value::Bool(x)));
        self
    }

    fn text(mut self, key: &'static str, x: impl Into<String>) -> Self {
        self.0.push((key, Value::Str(x.into())));
        self
    }

    fn pairs(mut self, key: &'static str, x: Vec<(f64, f64)>) -> Self {
        self.0.push((key, Value::Pairs(x)));
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                for (key, value) in &self.0 {
                    match value {
                        Value::Num(x) => writeln!(s, "{key}: {}", format_f64(*x)),
                        Value::Int(x) => writeln!(s, "{key}: {x}"),
                        Value::Bool(x) => writeln!(s, "{key}: {x}"),
                        Value::Str(x) => writeln!(s, "{key}: {x}"),
                        Value::Pairs(xs) => {
                            let _ = writeln!(s, "{key}:");
                            xs.iter().try_for_each(|(x, y)| {
                                writeln!(s, "  {} {}", format_f64(*x), format_f64(*y))
                            })
                        }
                    }
                    .expect("write to string");
                }
                s
            }
        }
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (key, value) in &self.0 {
            match value {
                Value::Num(x) => map.serialize_entry(key, &Num(*x))?,
                Value::Int(x) => map.serialize_entry(key, x)?,
                Value::Bool(x) => map.serialize_entry(key, x)?,
                Value::Str(x) => map.serialize_entry(key, x)?,
                Value::Pairs(xs) => {
                    let xs: Vec<[Num; 2]> = xs.iter().map(|&(x, y)| [Num(x), Num(y)]).collect();
                    map.serialize_entry(key, &xs)?
                }
            }
        }
        map.end()
    }
}

struct Failure {
    code: &'static str,
    message: String,
    exit: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: e.code(), message: e.to_string(), exit: 2 }
    }
}

type CmdResult = Result<(String, u8), Failure>;

/// Strategy with defaults filled in: optimal ratios for fast and slow,
/// tuned parameters for the hybrid.
fn resolve(args: &StrategyArgs) -> Result<(SearchParams, StrategySpec), Error> {
    let params = SearchParams::new(args.p, args.v)?;
    let spec = match args.algorithm {
        Algorithm::Fast => StrategySpec::fast(match args.a {
            Some(a) => a,
            None => fast_ratio(args.p)?,
        }),
        Algorithm::Slow => StrategySpec::slow(match args.a {
            Some(a) => a,
            None => slow_ratio(args.v)?,
        }),
        Algorithm::Hybrid => {
            let (a, b) = match (args.a, args.b) {
                (Some(a), Some(b)) => (a, b),
                (None, None) => {
                    let t = optimize_hybrid(args.p, args.v, &OptimizeBudget::default())?;
                    (t.a_star, t.b_star)
                }
                (Some(a), None) => {
                    let m = golden_section(|b| hybrid_value(a, b, args.p, args.v), 0.0, 1.0, 1e-10, 200);
                    (a, m.x)
                }
                (None, Some(b)) => {
                    let m = golden_section(|a| hybrid_value(a, b, args.p, args.v), A_MIN, A_MAX, 1e-10, 200);
                    (m.x, b)
                }
            };
            StrategySpec::hybrid(a, b)
        }
    };
    validate_params(params, spec)
}

fn hybrid_value(a: f64, b: f64, p: f64, v: f64) -> f64 {
    hybrid_cr(a, b, p, v).map_or(f64::INFINITY, |c| c.value)
}

fn trajectory(params: SearchParams, spec: &StrategySpec) -> Result<Trajectory, Error> {
    match spec.kind {
        StrategyKind::Fast => fast_trajectory(params, spec.a),
        StrategyKind::Slow => slow_trajectory(params, spec.a),
        StrategyKind::Hybrid => hybrid_trajectory(params, spec.a, spec.b),
    }
}

fn header(params: &SearchParams, spec: &StrategySpec) -> Report {
    let r = Report::default()
        .text("algorithm", spec.kind.as_str())
        .num("p", params.p())
        .num("v", params.v())
        .num("a", spec.a);
    if spec.kind == StrategyKind::Hybrid {
        r.num("b", spec.b)
    } else {
        r
    }
}

fn cmd_cr(args: &CrArgs) -> CmdResult {
    if let (Algorithm::Fast, 0.0, None) = (args.strategy.algorithm, args.strategy.p, args.strategy.a) {
        // No expansion ratio helps when fast passes never detect.
        let params = SearchParams::new(0.0, args.strategy.v)?;
        let r = Report::default()
            .text("algorithm", "fast")
            .num("p", params.p())
            .num("v", params.v())
            .num("cr", fast_cr(0.0)?.value)
            .text("formula", "Fast");
        return Ok((r.render(args.format), 0));
    }
    let (params, spec) = resolve(&args.strategy)?;
    let cf = closed_form_for(&params, &spec)?;
    let mut r = header(&params, &spec).num("cr", cf.value).text("formula", format!("{:?}", cf.formula));
    if spec.kind == StrategyKind::Hybrid {
        r = r
            .num("cr1", hybrid_cr1(spec.a, spec.b, params.v())?.value)
            .num("cr2", hybrid_cr2(spec.a, spec.b, params.p(), params.v())?.value);
    }
    if spec.kind == StrategyKind::Fast {
        r = r.num("slow_speed_threshold", fast_slow_threshold(params.p())?);
        if args.alternative_threshold {
            r = r.num("slow_speed_threshold_alternative", fast_slow_threshold_printed(params.p())?);
        }
    }
    Ok((r.render(args.format), 0))
}

fn cmd_oracle(args: &OracleArgs) -> CmdResult {
    let (params, spec) = resolve(&args.strategy)?;
    let traj = trajectory(params, &spec)?;
    let closed = closed_form_for(&params, &spec)?.value;
    let r = header(&params, &spec);
    let r = if let Some(d) = args.d {
        let e = expected_detection_time(&traj, d, args.tol)?;
        r.num("d", d)
            .num("expected_time", e.value)
            .num("cr", e.value / d.abs())
            .num("tail_bound", e.tail_bound)
            .int("passes", e.passes as u64)
    } else {
        let s = sup_cr(&traj, args.rounds, args.samples)?;
        let profile = s.per_round_profile.iter().map(|&(i, c)| (i as f64, c)).collect();
        r.int("rounds", args.rounds as u64)
            .num("sup_cr", s.sup_cr)
            .num("argmax_d", s.argmax_d)
            .int("argmax_round", s.argmax_round as u64)
            .num("closed_form", closed)
            .num("relative_delta", (s.sup_cr - closed) / closed)
            .pairs("per_round", profile)
    };
    Ok((r.render(args.format), 0))
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let (params, spec) = resolve(&args.strategy)?;
    let traj = trajectory(params, &spec)?;
    let exact = expected_detection_time(&traj, args.d, args.tol)?.value;
    let mc = simulate_detection(&traj, args.d, args.trials, args.seed)?;
    let diff = mc.mean - exact;
    // Agreement to rounding is exact; this also covers certain detection,
    // where the standard error is only rounding noise.
    let z = if diff.abs() <= 1e-12 * exact.abs() {
        0.0
    } else if mc.std_error > 0.0 {
        diff / mc.std_error
    } else {
        f64::INFINITY.copysign(diff)
    };
    let r = header(&params, &spec)
        .num("d", args.d)
        .int("trials", mc.trials)
        .int("seed", args.seed)
        .num("mean", mc.mean)
        .num("std_error", mc.std_error)
        .num("exact", exact)
        .num("z", z);
    Ok((r.render(args.format), if z.abs() > 5.0 { 1 } else { 0 }))
}

fn cmd_optimize(args: &OptimizeArgs) -> CmdResult {
    let budget = OptimizeBudget { coarse: args.coarse, max_iterations: args.max_iterations };
    let t = optimize_hybrid(args.p, args.v, &budget)?;
    if t.hit_a_bound {
        eprintln!("warning: optimum at the upper bound a = {A_MAX}");
    }
    let r = Report::default()
        .num("p", args.p)
        .num("v", args.v)
        .num("a_star", t.a_star)
        .num("b_star", t.b_star)
        .num("cr_star", t.cr_star)
        .num("cr1", t.cr1)
        .num("cr2", t.cr2)
        .int("iterations", t.iterations as u64)
        .flag("converged", t.converged)
        .flag("hit_a_bound", t.hit_a_bound);
    Ok((r.render(args.format), 0))
}

fn cmd_heatmap(args: &HeatmapArgs) -> CmdResult {
    let budget = OptimizeBudget { coarse: args.coarse, max_iterations: args.max_iterations };
    let grid = build_heatmap(
        args.quantity,
        args.grid,
        (args.p_min, args.p_max),
        (args.v_min, args.v_max),
        &budget,
        args.seed,
    )?;
    let body = match args.format {
        GridFormat::Csv => grid.to_csv(),
        GridFormat::Json => grid.to_json(),
    };
    match &args.output {
        None => Ok((body, 0)),
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Failure {
                code: "Io",
                message: format!("{}: {e}", path.display()),
                exit: 2,
            })?;
            Ok((String::new(), 0))
        }
    }
}

fn cmd_lower_bound(args: &LowerBoundArgs) -> CmdResult {
    let mut r = Report::default().num("v", args.v);
    r = match args.beta {
        Some(beta) => r.num("beta", beta).num("cr", lower_bound_cr(args.v, beta)?.value),
        None => {
            let o = optimal_beta(args.v)?;
            r.num("beta_star", o.beta).num("cr", o.cr).int("iterations", o.iterations as u64)
        }
    };
    if let Some(points) = args.scan {
        r = r.pairs("scan", scan_beta(args.v, points)?);
    }
    Ok((r.render(args.format), 0))
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let results = run_checks(args.only.as_deref());
    let failures = results.iter().filter(|c| !c.passed).count();
    let out = if args.json {
        let mut s = serde_json::to_string_pretty(&results).expect("serializable");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for c in &results {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{status}] {:>2} {:<12} {}", c.id, c.group, c.name);
            let _ = writeln!(s, "       expected:  {}", c.expected);
            let _ = writeln!(s, "       actual:    {}", c.actual);
            let _ = writeln!(s, "       tolerance: {}", c.tolerance);
        }
        let _ = writeln!(s, "{} checks, {failures} failed", results.len());
        s
    };
    Ok((out, failures.min(u8::MAX as usize) as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error[ThreadPool]: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Cr(a) => cmd_cr(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Heatmap(a) => cmd_heatmap(a),
        Command::LowerBound(a) => cmd_lower_bound(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message);
            ExitCode::from(f.exit)
        }
    }
}
