//! `capprox` command-line front end. Every run prints one JSON run record on
//! stdout; exit codes: 0 success, 2 bad arguments or input, 3 numerical
//! failure, 4 I/O error.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::CliError;

#[derive(Parser)]
#[command(name = "capprox", version, about = "Compact-set numerics in C^n")]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not
    /// depend on this setting.
    #[arg(long, global = true, env = "CAPPROX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize a shape into a compact net.
    Shape(ShapeArgs),
    /// Hausdorff distance between two nets.
    Hausdorff(HausdorffArgs),
    /// Image of a net under a map (one --f per component).
    Image(ImageArgs),
    /// Grid contour around a planar net, optionally partitioned.
    Contour(ContourArgs),
    /// Rational approximation by Riemann sums of the Cauchy integral.
    Runge(RungeArgs),
    /// Taylor coefficients from the distinguished boundary of a polydisc.
    Taylor(TaylorArgs),
    /// Laurent coefficients on a torus.
    Laurent(LaurentArgs),
    /// Grid approximation of the polynomially convex hull.
    Hull(HullArgs),
    /// Grid approximation of the rationally convex hull.
    Rhull(RhullArgs),
    /// Lower estimate of the Siciak extremal function.
    Siciak(ExtremalArgs),
    /// Estimate of the pluricomplex Green function log Φ.
    Green(ExtremalArgs),
    /// Transforms of a random compact set over a finite sample space.
    RandomDemo(RandomDemoArgs),
    /// Measurable min-index selection from a sequence of random functions.
    Select(SelectArgs),
    /// Per-atom polynomial approximation of random holomorphic functions.
    Okaweil(OkaWeilArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Shape(_) => "shape",
            Command::Hausdorff(_) => "hausdorff",
            Command::Image(_) => "image",
            Command::Contour(_) => "contour",
            Command::Runge(_) => "runge",
            Command::Taylor(_) => "taylor",
            Command::Laurent(_) => "laurent",
            Command::Hull(_) => "hull",
            Command::Rhull(_) => "rhull",
            Command::Siciak(_) => "siciak",
            Command::Green(_) => "green",
            Command::RandomDemo(_) => "random-demo",
            Command::Select(_) => "select",
            Command::Okaweil(_) => "okaweil",
        }
    }

    fn parameters(&self) -> Value {
        let v = match self {
            Command::Shape(a) => serde_json::to_value(a),
            Command::Hausdorff(a) => serde_json::to_value(a),
            Command::Image(a) => serde_json::to_value(a),
            Command::Contour(a) => serde_json::to_value(a),
            Command::Runge(a) => serde_json::to_value(a),
            Command::Taylor(a) => serde_json::to_value(a),
            Command::Laurent(a) => serde_json::to_value(a),
            Command::Hull(a) => serde_json::to_value(a),
            Command::Rhull(a) => serde_json::to_value(a),
            Command::Siciak(a) | Command::Green(a) => serde_json::to_value(a),
            Command::RandomDemo(a) => serde_json::to_value(a),
            Command::Select(a) => serde_json::to_value(a),
            Command::Okaweil(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }
}

/// Net output: inline, or written to `--out` with the path recorded.
#[derive(Args, Serialize)]
struct OutArg {
    /// Write the main result here instead of inlining it in the record.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ShapeArgs {
    /// Shape JSON (inline, path, or - for stdin), e.g. {"kind":"disk","center":[0,0],"radius":1}
    #[arg(long)]
    shape: String,
    /// Net mesh h.
    #[arg(long)]
    h: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct HausdorffArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

#[derive(Args, Serialize)]
struct ImageArgs {
    #[arg(long)]
    k: String,
    /// Component expression; repeat for maps into C^m.
    #[arg(long = "f", required = true)]
    f: Vec<String>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct ContourArgs {
    #[arg(long)]
    k: String,
    /// Neighbourhood: points within this distance of K.
    #[arg(
        long,
        conflicts_with = "forbidden",
        required_unless_present = "forbidden"
    )]
    margin: Option<f64>,
    /// Neighbourhood: the plane minus these points (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    forbidden: Vec<String>,
    /// Grid square side (default: margin/8).
    #[arg(long)]
    cell: Option<f64>,
    /// Also partition the contour into pieces shorter than this.
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Rule {
    Trapezoid,
    TerminalPoint,
}

#[derive(Args, Serialize)]
struct RungeArgs {
    /// Function holomorphic near K, e.g. "1/(z-2)".
    #[arg(long)]
    f: String,
    #[arg(long)]
    k: String,
    /// f must be holomorphic within this distance of K.
    #[arg(long)]
    margin: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    cell: Option<f64>,
    #[arg(long, value_enum, default_value = "trapezoid")]
    rule: Rule,
    #[arg(long, default_value_t = 24)]
    max_halvings: usize,
    #[arg(long, default_value_t = 2_000_000)]
    max_nodes: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct TaylorArgs {
    #[arg(long)]
    f: String,
    /// Polydisc radii, one per variable.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Total degree bound.
    #[arg(long)]
    degree: u32,
    /// Quadrature nodes per circle.
    #[arg(long, default_value_t = capprox::series::DEFAULT_NODES)]
    nodes: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct LaurentArgs {
    #[arg(long)]
    f: String,
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Bound on |ν_j| for every index.
    #[arg(long)]
    order: u32,
    #[arg(long, default_value_t = capprox::series::DEFAULT_NODES)]
    nodes: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct FamilyArgs {
    /// Maximal total degree of the family.
    #[arg(long)]
    deg: u32,
    /// Coefficient height: Gaussian rationals a/b with |a|,|b| ≤ height.
    #[arg(long)]
    height: u32,
    /// Refuse (or with --truncate, cut) families larger than this.
    #[arg(long, default_value_t = 4_000_000)]
    cap: usize,
    #[arg(long)]
    truncate: bool,
}

#[derive(Args, Serialize)]
struct HullArgs {
    #[arg(long)]
    k: String,
    #[command(flatten)]
    family: FamilyArgs,
    /// Candidate grid resolution.
    #[arg(long, default_value_t = 0.05)]
    res: f64,
    /// Relative slack η in |p(z)| ≤ (1+η) max_K |p|.
    #[arg(long, default_value_t = capprox::hulls::DEFAULT_SLACK)]
    slack: f64,
    /// Add a gradient bound times the net mesh to each threshold.
    #[arg(long)]
    net_compensated: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Serialize)]
struct RhullArgs {
    #[command(flatten)]
    hull: HullArgs,
    /// Rational function, e.g. "1/z" (repeatable).
    #[arg(long = "r")]
    r: Vec<String>,
    /// Skip rationals whose denominator gets this small on K.
    #[arg(long, default_value_t = capprox::numeric::DEFAULT_TAU_SING)]
    tau_sing: f64,
}

#[derive(Args, Serialize)]
struct ExtremalArgs {
    #[arg(long)]
    k: String,
    /// Evaluation point, comma-separated complex coordinates.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Chebyshev polynomials T_1..T_N (one variable).
    #[arg(long, group = "fam")]
    chebyshev: Option<u32>,
    /// Monomials z, …, z^N (one variable).
    #[arg(long, group = "fam")]
    monomials: Option<u32>,
    /// Enumerated family of this degree (needs --height).
    #[arg(long, group = "fam", requires = "height")]
    deg: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long, default_value_t = 4_000_000)]
    cap: usize,
    #[arg(long)]
    truncate: bool,
    /// Use members as given instead of normalizing by max_K |p|.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Serialize)]
struct RandomDemoArgs {
    /// Random compact set JSON; default: two atoms with circle / disk values.
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value_t = 2)]
    deg: u32,
    #[arg(long, default_value_t = 1)]
    height: u32,
    #[arg(long, default_value_t = 0.05)]
    res: f64,
    /// Also evaluate the Siciak estimate at this point.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
}

#[derive(Args, Serialize)]
struct SelectArgs {
    /// Selection input JSON: {"k": random compact, "target": random
    /// expression table, "sequence": [tables...]}.
    #[arg(long, conflicts_with = "battery", required_unless_present = "battery")]
    input: Option<String>,
    /// Built-in battery: Taylor sums of exp with per-atom index offsets on
    /// the closed unit disk.
    #[arg(long)]
    battery: bool,
    #[arg(long, default_value_t = 100)]
    outcomes: usize,
    #[arg(long, default_value_t = 10)]
    atoms: usize,
    #[arg(long, default_value_t = 20)]
    length: u32,
    #[arg(long)]
    eps: f64,
}

#[derive(Args, Serialize)]
struct OkaWeilArgs {
    /// Random compact set JSON.
    #[arg(long)]
    k: String,
    /// Expression used for every outcome, or a random expression table JSON.
    #[arg(long)]
    f: String,
    #[arg(long)]
    eps: f64,
    /// Radii of a polydisc on which f is holomorphic, containing every K(ω).
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Degree budget.
    #[arg(long, default_value_t = 20)]
    budget: u32,
    #[arg(long, default_value_t = 64)]
    nodes: usize,
}

/// What a subcommand produced.
pub struct Report {
    pub outputs: Value,
    pub warnings: Vec<String>,
}

fn run(cmd: &Command) -> Result<Report, CliError> {
    use commands as c;
    match cmd {
        Command::Shape(a) => c::shape(a),
        Command::Hausdorff(a) => c::hausdorff(a),
        Command::Image(a) => c::image(a),
        Command::Contour(a) => c::contour(a),
        Command::Runge(a) => c::runge(a),
        Command::Taylor(a) => c::taylor(a),
        Command::Laurent(a) => c::laurent(a),
        Command::Hull(a) => c::hull(a),
        Command::Rhull(a) => c::rhull(a),
        Command::Siciak(a) => c::siciak(a),
        Command::Green(a) => c::green(a),
        Command::RandomDemo(a) => c::random_demo(a),
        Command::Select(a) => c::select(a),
        Command::Okaweil(a) => c::okaweil(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (result, threads) = capprox::exec::with_threads(cli.threads, || {
        (run(&cli.command), capprox::exec::current_threads())
    });
    let timing = json!({
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        "threads": threads,
    });
    let mut record = json!({
        "subcommand": cli.command.name(),
        "parameters": cli.command.parameters(),
        "timing": timing,
    });
    let code = match result {
        Ok(report) => {
            record["status"] = json!("ok");
            record["outputs"] = report.outputs;
            record["warnings"] = json!(report.warnings);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            record["status"] = json!("error");
            record["error"] = json!(e.to_string());
            record["outputs"] = json!({});
            record["warnings"] = json!([]);
            e.exit_code()
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("record serializes")
    );
    ExitCode::from(code)
}
