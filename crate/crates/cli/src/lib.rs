//! The `hypwalk` command-line tool: builds and checks polygons, evaluates
//! the singularity criteria, runs the numerical verifiers and the random-walk
//! simulations, and writes JSON/CSV artifacts.

pub mod document;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hypwalk_core::coxeter::{coxeter_criterion, CoxeterPolygon};
use hypwalk_core::freewalk::{
    criterion_witness, cylinder_measures, green_distance, mc_first_passage, solve_first_passage,
    MeasureKind, StepDistribution,
};
use hypwalk_core::fuchswalk::{
    boundary_histogram, dimension_report, entropy_upper_bounds, estimate_drift, simulate, SimParams,
    WalkSample,
};
use hypwalk_core::inequality::{
    collar_quick_test, polygon_criterion, verify_arccos_bound, verify_scalar_bounds, verify_sqrt_bound,
    OptReport,
};
use hypwalk_core::polygon::{
    build, check_cycle, dual, neutralizing_pairs, random_polygon_retrying, reduce_to_acute, side_pairings,
    PolygonSpec, SymmetricPolygon,
};
use hypwalk_core::sampling::stream_rng;
use hypwalk_core::with_threads;

use document::{PolygonDocument, Report};

#[derive(Debug, Parser)]
#[command(name = "hypwalk", version, about = "Random walks on symmetric hyperbolic polygon groups")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "HYPWALK_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, check and transform polygons.
    #[command(subcommand)]
    Polygon(PolygonCmd),
    /// Singularity criterion for the side-pairing group of a polygon.
    Criterion(CriterionArgs),
    /// Reflection-group variant of the criterion.
    #[command(subcommand)]
    Coxeter(CoxeterCmd),
    /// First-passage quantities of nearest-neighbour walks on free groups.
    #[command(subcommand)]
    Free(FreeCmd),
    /// Numerical checks of the optimization lemmas.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Monte Carlo walks on the side-pairing group.
    #[command(subcommand)]
    Walk(WalkCmd),
}

#[derive(Debug, Subcommand)]
pub enum PolygonCmd {
    /// Build a polygon and write its JSON document.
    Build(BuildArgs),
    /// Re-derive a polygon document and report its properties.
    Check(InputArgs),
    /// Dual polygon of a polygon with total angle 4π.
    Dual(InputArgs),
    /// Remove obtuse angles by pentagon surgery.
    Reduce(InputArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoxeterCmd {
    /// Criterion for the reflection group of a polygon with angles π/k.
    Criterion(CoxeterArgs),
}

#[derive(Debug, Subcommand)]
pub enum FreeCmd {
    /// Solve for the first-passage probabilities.
    Solve(SolveArgs),
    /// Hitting measures of the first-letter cylinders.
    Cylinders(MeasureArgs),
    /// Generators whose length beats the comparison walk.
    Witness(WitnessArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Σ arccos(x_i x_{i+1}) ≥ π on the shifted simplex.
    Arccos(SimplexArgs),
    /// The square-root bound on the simplex.
    Sqrt(SimplexArgs),
    /// The two scalar bounds on [0, 1].
    Scalar(ScalarArgs),
}

#[derive(Debug, Subcommand)]
pub enum WalkCmd {
    /// Terminal positions of independent walks.
    Simulate(SimulateArgs),
    /// Drift estimate with a 95% interval.
    Drift(WalkArgs),
    /// Exact entropy bounds H(μⁿ)/n.
    Entropy(EntropyArgs),
    /// Histogram of boundary angles.
    Histogram(HistogramArgs),
    /// Criterion, drift, entropy bounds and dimension bound.
    Report(ReportArgs),
}

/// `uniform` or a comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum ListSpec {
    Uniform,
    Values(Vec<f64>),
}

fn parse_list(s: &str) -> Result<ListSpec, String> {
    if s == "uniform" {
        return Ok(ListSpec::Uniform);
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(ListSpec::Values)
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Half the number of sides.
    #[arg(long)]
    pub m: usize,
    /// Central angles between consecutive feet, in radians.
    #[arg(long, default_value = "uniform", value_parser = parse_list)]
    pub alpha: ListSpec,
    /// Apothem weights, scaled to meet the cycle condition when `--k` is set,
    /// otherwise taken as the apothems themselves.
    #[arg(long, default_value = "uniform", value_parser = parse_list)]
    pub weights: ListSpec,
    /// Target cycle integer: vertex angles sum to 2π/k.
    #[arg(long)]
    pub k: Option<u32>,
    /// Vertex angles π/k_i instead of a cycle target; writes `k_values`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k", "alpha", "random"])]
    pub reflection_k: Option<Vec<u32>>,
    /// Random central angles and weights.
    #[arg(long, requires_all = ["seed", "k"])]
    pub random: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Polygon document.
    pub polygon: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Step distribution document {"kind", "m", "probabilities"}.
    #[arg(long, conflicts_with = "uniform")]
    pub measure: Option<PathBuf>,
    /// Uniform step distribution.
    #[arg(long)]
    pub uniform: bool,
    /// Generator count for `--uniform` when no polygon fixes it.
    #[arg(long)]
    pub m: Option<usize>,
    /// Measure kind for `--uniform`.
    #[arg(long, value_enum, default_value = "free")]
    pub kind: Kind,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Free,
    Involutive,
}

impl From<Kind> for MeasureKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Free => MeasureKind::Free,
            Kind::Involutive => MeasureKind::Involutive,
        }
    }
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    /// Polygon document.
    #[arg(required_unless_present = "lengths")]
    pub polygon: Option<PathBuf>,
    /// Translation lengths instead of a polygon.
    #[arg(long, value_delimiter = ',', conflicts_with = "polygon")]
    pub lengths: Option<Vec<f64>>,
    /// Also search for a witness generator against the comparison walk.
    #[arg(long)]
    pub witness: bool,
    /// Step distribution for the witness search (uniform when omitted).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CoxeterArgs {
    /// Polygon document whose vertex angles are π/k_i.
    pub polygon: PathBuf,
    /// Involutive step distribution (uniform when omitted).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Monte Carlo paths per symbol for an independent check.
    #[arg(long, requires = "seed")]
    pub mc_paths: Option<usize>,
    /// Step horizon of the Monte Carlo check.
    #[arg(long, default_value_t = 10_000)]
    pub horizon: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Polygon document supplying the translation lengths.
    #[arg(long, required_unless_present = "lengths")]
    pub polygon: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', conflicts_with = "polygon")]
    pub lengths: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimplexArgs {
    #[arg(long)]
    pub m: usize,
    /// Grid plus random sample points.
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScalarArgs {
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Polygon document.
    pub polygon: PathBuf,
    /// Free step distribution on the side pairings (uniform when omitted).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    pub polygon: PathBuf,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Largest convolution power.
    #[arg(long, default_value_t = 2)]
    pub n_max: usize,
    /// Write (n, H(μⁿ)/n) pairs here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Write (bin centre, frequency) pairs here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 2)]
    pub n_max: usize,
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    /// Files written, in order.
    pub artifacts: Vec<PathBuf>,
}

/// Failure of a command after argument parsing.
#[derive(Debug)]
pub enum Failure {
    Domain(hypwalk_core::Error),
    Io { path: PathBuf, message: String },
    Format { path: PathBuf, message: String },
    VerificationFailed(String),
}

impl From<hypwalk_core::Error> for Failure {
    fn from(e: hypwalk_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Domain(e) => serde_json::json!({ "kind": e.kind(), "message": e.to_string() }),
            Failure::Io { path, message } => {
                serde_json::json!({ "kind": "Io", "path": path, "message": message })
            }
            Failure::Format { path, message } => {
                serde_json::json!({ "kind": "Format", "path": path, "message": message })
            }
            Failure::VerificationFailed(message) => {
                serde_json::json!({ "kind": "VerificationFailed", "message": message })
            }
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Session<'a> {
    stdout: &'a mut (dyn Write + Send),
    stderr: &'a mut (dyn Write + Send),
    artifacts: Vec<PathBuf>,
}

impl Session<'_> {
    fn emit_text(&mut self, out: &Option<PathBuf>, text: &str) -> Outcome {
        match out {
            Some(path) => {
                fs::write(path, text).map_err(|e| io_failure(path, e))?;
                self.artifacts.push(path.clone());
            }
            None => {
                self.stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
            }
        }
        Ok(())
    }

    fn emit<T: Serialize>(&mut self, out: &Option<PathBuf>, value: &T) -> Outcome {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        self.emit_text(out, &text)
    }

    fn write_plot(&mut self, path: &Option<PathBuf>, series: &[(f64, f64)]) -> Outcome {
        if let Some(path) = path {
            let mut text = String::from("x,y\n");
            for (x, y) in series {
                text.push_str(&format!("{x:?},{y:?}\n"));
            }
            fs::write(path, text).map_err(|e| io_failure(path, e))?;
            self.artifacts.push(path.clone());
        }
        Ok(())
    }

    fn warn(&mut self, message: &str) {
        let _ = writeln!(self.stderr, "warning: {message}");
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io { path: path.to_path_buf(), message: e.to_string() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Format { path: path.to_path_buf(), message: e.to_string() })
}

fn read_polygon(path: &Path) -> std::result::Result<SymmetricPolygon, Failure> {
    Ok(read_json::<PolygonDocument>(path)?.to_polygon()?)
}

/// The measure in `path`, or the uniform one of the given kind.
fn measure_or_uniform(
    path: &Option<PathBuf>,
    kind: MeasureKind,
    m: usize,
) -> std::result::Result<StepDistribution, Failure> {
    match path {
        Some(p) => Ok(read_json(p)?),
        None => Ok(StepDistribution::uniform(kind, m)?),
    }
}

fn resolve_measure(args: &MeasureArgs, m: Option<usize>) -> std::result::Result<StepDistribution, Failure> {
    if let Some(p) = &args.measure {
        return read_json(p);
    }
    let m = args.m.or(m).ok_or_else(|| {
        Failure::Domain(hypwalk_core::Error::InvalidArgument(
            "give --measure, or --uniform with --m".into(),
        ))
    })?;
    Ok(StepDistribution::uniform(args.kind.into(), m)?)
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return CommandResult { exit_code: code, artifacts: Vec::new() };
        }
    };
    let mut session = Session { stdout, stderr, artifacts: Vec::new() };
    let threads = cli.threads;
    let outcome = with_threads(threads, || dispatch(cli.command, &mut session));
    let exit_code = match outcome {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(session.stderr, "{}", failure.to_json());
            1
        }
    };
    CommandResult { exit_code, artifacts: session.artifacts }
}

fn dispatch(command: Command, s: &mut Session) -> Outcome {
    match command {
        Command::Polygon(PolygonCmd::Build(a)) => polygon_build(a, s),
        Command::Polygon(PolygonCmd::Check(a)) => polygon_check(a, s),
        Command::Polygon(PolygonCmd::Dual(a)) => {
            let d = dual(&read_polygon(&a.polygon)?)?;
            let sigma = d.sigma();
            s.emit(&a.out.output, &serde_json::json!({ "dual": d, "sigma": sigma }))
        }
        Command::Polygon(PolygonCmd::Reduce(a)) => {
            let p = reduce_to_acute(&read_polygon(&a.polygon)?)?;
            s.emit(&a.out.output, &PolygonDocument::from_polygon(&p))
        }
        Command::Criterion(a) => criterion_cmd(a, s),
        Command::Coxeter(CoxeterCmd::Criterion(a)) => {
            let p: CoxeterPolygon = read_json::<PolygonDocument>(&a.polygon)?.to_coxeter()?;
            let mu = measure_or_uniform(&a.measure, MeasureKind::Involutive, p.m())?;
            s.emit(&a.out.output, &Report::new(coxeter_criterion(&p, &mu)?))
        }
        Command::Free(FreeCmd::Solve(a)) => free_solve(a, s),
        Command::Free(FreeCmd::Cylinders(a)) => {
            let mu = resolve_measure(&a, None)?;
            let fp = solve_first_passage(&mu)?;
            let nu = cylinder_measures(&fp)?;
            s.emit(&a.out.output, &serde_json::json!({ "x": fp.x, "cylinders": nu }))
        }
        Command::Free(FreeCmd::Witness(a)) => {
            let (lengths, m) = match (&a.polygon, &a.lengths) {
                (Some(p), _) => {
                    let p = read_polygon(p)?;
                    (polygon_criterion(&p).lengths, Some(p.m()))
                }
                (None, Some(l)) => (l.clone(), None),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let mu = resolve_measure(&a.measure, m)?;
            s.emit(&a.measure.out.output, &criterion_witness(&lengths, &mu)?)
        }
        Command::Verify(v) => verify_cmd(v, s),
        Command::Walk(w) => walk_cmd(w, s),
    }
}

fn polygon_build(a: BuildArgs, s: &mut Session) -> Outcome {
    let m = a.m;
    let weights = match &a.weights {
        ListSpec::Uniform => vec![1.0; m],
        ListSpec::Values(v) => v.clone(),
    };
    if let Some(k) = &a.reflection_k {
        let p = CoxeterPolygon::build(&weights, k)?;
        if p.m() != m {
            return Err(hypwalk_core::Error::InvalidArgument(format!("built m = {}, asked for {m}", p.m())).into());
        }
        return s.emit(&a.out.output, &PolygonDocument::from_coxeter(&p));
    }
    let polygon = if a.random {
        let seed = a.seed.expect("clap requires --seed with --random");
        let k = a.k.expect("clap requires --k with --random");
        random_polygon_retrying(&mut stream_rng(seed, 0), m, k, 1000)?
    } else {
        let alpha = match &a.alpha {
            ListSpec::Uniform => vec![std::f64::consts::PI / m as f64; m],
            ListSpec::Values(v) => v.clone(),
        };
        match a.k {
            Some(_) => build(&PolygonSpec { m, central_angles: alpha, apothem_weights: weights, target_k: a.k })?,
            None => {
                let p = SymmetricPolygon::from_parts(&alpha, &weights, None)?;
                let k = check_cycle(&p).ok();
                p.with_k(k)
            }
        }
    };
    s.emit(&a.out.output, &PolygonDocument::from_polygon(&polygon))
}

#[derive(Serialize)]
struct CheckReport {
    m: usize,
    k: Option<u32>,
    cycle_k: Option<u32>,
    angle_sum: f64,
    area: f64,
    max_deviation: f64,
    consistent: bool,
    obtuse: Vec<usize>,
    neutralizing_pairs: Vec<(usize, usize)>,
    disjoint_pairs: bool,
    collar_quick_test: bool,
    sigma: f64,
}

fn polygon_check(a: InputArgs, s: &mut Session) -> Outcome {
    let doc: PolygonDocument = read_json(&a.polygon)?;
    let (p, deviation) = doc.rebuild()?;
    let pairs = neutralizing_pairs(&p);
    let cycle_k = check_cycle(&p).ok();
    let report = CheckReport {
        m: p.m(),
        k: p.k(),
        cycle_k,
        angle_sum: p.angle_sum(),
        area: p.area(),
        max_deviation: deviation,
        consistent: deviation <= document::CONSISTENCY_TOL,
        obtuse: pairs.obtuse,
        neutralizing_pairs: pairs.pairs,
        disjoint_pairs: pairs.disjoint,
        collar_quick_test: collar_quick_test(p.apothems(), p.m())?,
        sigma: p.sigma(),
    };
    s.emit(&a.out.output, &report)?;
    if !report.consistent {
        return Err(hypwalk_core::Error::InvalidArgument(format!(
            "stored fields deviate from the recomputed polygon by {deviation:e}"
        ))
        .into());
    }
    if let (Some(k), Some(found)) = (p.k(), cycle_k) {
        if k != found {
            return Err(hypwalk_core::Error::InvalidArgument(format!(
                "document declares k = {k} but the angles give k = {found}"
            ))
            .into());
        }
    } else if p.k().is_some() {
        check_cycle(&p)?;
    }
    Ok(())
}

fn criterion_cmd(a: CriterionArgs, s: &mut Session) -> Outcome {
    let (lengths, m) = match (&a.polygon, &a.lengths) {
        (Some(path), _) => {
            let p = read_polygon(path)?;
            (polygon_criterion(&p).lengths, p.m())
        }
        (None, Some(l)) => (l.clone(), l.len() / 2),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let mut report = Report::new(hypwalk_core::inequality::criterion(&lengths));
    if a.witness {
        let mu = measure_or_uniform(&a.measure, MeasureKind::Free, m)?;
        report.witness = Some(criterion_witness(&lengths, &mu)?);
    }
    s.emit(&a.out.output, &report)
}

#[derive(Serialize)]
struct McCheck {
    symbol: usize,
    estimate: f64,
    stderr: f64,
    z_score: f64,
}

fn free_solve(a: SolveArgs, s: &mut Session) -> Outcome {
    let mu = resolve_measure(&a.measure, None)?;
    let fp = solve_first_passage(&mu)?;
    let green = (0..mu.symbols())
        .map(|j| green_distance(&fp, j).ok())
        .collect::<Vec<_>>();
    let mut doc = serde_json::json!({
        "kind": fp.kind,
        "m": fp.m,
        "x": fp.x,
        "residual": fp.residual,
        "iterations": fp.iterations,
        "green_distances": green,
    });
    if let Some(paths) = a.mc_paths {
        let seed = a.seed.expect("clap requires --seed with --mc-paths");
        let mut checks = Vec::new();
        for j in 0..mu.symbols() {
            let est = mc_first_passage(&mu, j, paths, a.horizon, seed.wrapping_add(j as u64))?;
            let z = if est.stderr > 0.0 { (est.estimate - fp.x[j]) / est.stderr } else { 0.0 };
            checks.push(McCheck { symbol: j, estimate: est.estimate, stderr: est.stderr, z_score: z });
        }
        doc["monte_carlo"] = serde_json::json!({
            "paths": paths,
            "horizon": a.horizon,
            "seed": seed,
            "note": "walks are truncated at the horizon, so estimates are biased low by the passages that happen later",
            "checks": checks,
        });
    }
    s.emit(&a.measure.out.output, &doc)
}

fn verify_cmd(v: VerifyCmd, s: &mut Session) -> Outcome {
    let (name, report, out): (&str, OptReport, Option<PathBuf>) = match v {
        VerifyCmd::Arccos(a) => ("arccos", verify_arccos_bound(a.m, a.budget, a.seed)?, a.out.output),
        VerifyCmd::Sqrt(a) => ("sqrt", verify_sqrt_bound(a.m, a.budget, a.seed)?, a.out.output),
        VerifyCmd::Scalar(a) => ("scalar", verify_scalar_bounds(a.budget)?, a.out.output),
    };
    s.emit(&out, &report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::VerificationFailed(format!(
            "{name} bound: {} violations, minimum {}",
            report.violations.len(),
            report.minimum_found
        )))
    }
}

fn walk_sample(a: &WalkArgs) -> std::result::Result<(SymmetricPolygon, StepDistribution, WalkSample), Failure> {
    let p = read_polygon(&a.polygon)?;
    let mu = measure_or_uniform(&a.measure, MeasureKind::Free, p.m())?;
    let sample = simulate(&side_pairings(&p), &mu, a.steps, a.paths, a.seed)?;
    Ok((p, mu, sample))
}

fn walk_cmd(w: WalkCmd, s: &mut Session) -> Outcome {
    match w {
        WalkCmd::Simulate(a) => {
            let (_, _, sample) = walk_sample(&a.walk)?;
            match a.format {
                Format::Json => s.emit(&a.walk.out.output, &sample),
                Format::Csv => {
                    let mut text = String::from("path,distance,boundary_angle,radius\n");
                    for (i, p) in sample.paths.iter().enumerate() {
                        text.push_str(&format!("{i},{:?},{:?},{:?}\n", p.distance, p.boundary_angle, p.radius));
                    }
                    s.emit_text(&a.walk.out.output, &text)
                }
            }
        }
        WalkCmd::Drift(a) => {
            let (_, _, sample) = walk_sample(&a)?;
            s.emit(&a.out.output, &estimate_drift(&sample)?)
        }
        WalkCmd::Entropy(a) => {
            let p = read_polygon(&a.polygon)?;
            let mu = measure_or_uniform(&a.measure, MeasureKind::Free, p.m())?;
            let bounds = entropy_upper_bounds(&mu, &side_pairings(&p), a.n_max)?;
            let series: Vec<(f64, f64)> = bounds.iter().enumerate().map(|(i, &h)| ((i + 1) as f64, h)).collect();
            s.write_plot(&a.plot_data, &series)?;
            s.emit(&a.out.output, &serde_json::json!({ "entropy_bounds": bounds }))
        }
        WalkCmd::Histogram(a) => {
            let (_, _, sample) = walk_sample(&a.walk)?;
            let h = boundary_histogram(&sample, a.bins)?;
            if !h.quality_ok {
                s.warn(&format!(
                    "only {:.1}% of walks ended beyond radius 0.99; increase --steps",
                    100.0 * h.settled_fraction
                ));
            }
            s.write_plot(&a.plot_data, &h.plot_series())?;
            s.emit_text(&a.walk.out.output, &h.to_csv())
        }
        WalkCmd::Report(a) => {
            let p = read_polygon(&a.walk.polygon)?;
            let mu = measure_or_uniform(&a.walk.measure, MeasureKind::Free, p.m())?;
            let params = SimParams { steps: a.walk.steps, paths: a.walk.paths, seed: a.walk.seed, n_max: a.n_max };
            let d = dimension_report(&p, &mu, params)?;
            let report = Report {
                criterion: d.criterion,
                witness: None,
                drift: Some(d.drift),
                entropy_bounds: Some(d.entropy_bounds),
                dimension_bound: Some(d.dimension_bound),
            };
            s.emit(&a.walk.out.output, &report)
        }
    }
}
