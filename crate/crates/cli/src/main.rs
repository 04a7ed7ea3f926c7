use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use strip_steiner::coord::parse_decimal;
use strip_steiner::fpt::FptConfig;
use strip_steiner::io::{read_instance, read_tree, to_json_pretty, write_instance, write_tree, Instance};
use strip_steiner::random::{generate_hooks_with, generate_random_instance, GenSpec, GeneratorMeta, HookParams};
use strip_steiner::render::{render_svg, RenderOptions};
use strip_steiner::solve::{solve, verify, Algorithm, SolveOptions};
use strip_steiner::sparse_dp::Cap;
use strip_steiner::stats::{instance_stats, StatsReport};
use strip_steiner::{Decimal, Error};

const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_RESOURCE: u8 = 5;

#[derive(Parser)]
#[command(name = "strip-steiner", version, about = "Exact rectilinear Steiner trees in a narrow strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random or hook-gadget instance.
    Generate(GenerateArgs),
    /// Solve an instance and write the tree.
    Solve(SolveArgs),
    /// Verify a tree file against its instance.
    Check {
        instance: PathBuf,
        tree: PathBuf,
    },
    /// Draw an instance, optionally with a tree, as SVG.
    Render(RenderArgs),
    /// Wall counts and detection rates over instances or a generated batch.
    Stats(StatsArgs),
    /// Time the solvers on generated instances.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, required_unless_present = "hooks")]
    n: Option<usize>,
    #[arg(long, value_parser = decimal)]
    delta: Decimal,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    scale: i64,
    /// Redraw spacings until they are below delta.
    #[arg(long)]
    spacing_below_delta: bool,
    /// Hook gadget as HOOKSxPOINTS, e.g. 2x3.
    #[arg(long, conflicts_with = "n")]
    hooks: Option<String>,
    /// One height per hook, counted from 1.
    #[arg(long, value_delimiter = ',', requires = "hooks")]
    probes: Vec<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "auto", value_parser = algorithm)]
    algorithm: Algorithm,
    /// Crossing cap for the sparse DP: a number, `auto` or `escalate`.
    #[arg(long, value_parser = cap)]
    cap: Option<Cap>,
    #[arg(long, value_parser = decimal)]
    delta_threshold: Option<Decimal>,
    /// Largest mirrored pattern tried at a soft wall.
    #[arg(long)]
    mirrored_cap: Option<usize>,
    #[arg(long)]
    verify: bool,
    /// Print wall-clock time per phase to stderr.
    #[arg(long)]
    time: bool,
    /// Tree file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    instance: PathBuf,
    tree: Option<PathBuf>,
    #[arg(long)]
    show_walls: bool,
    #[arg(long)]
    show_separators: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    instances: Vec<PathBuf>,
    /// JSON batch: {"n", "delta", "seeds", "scale"?, "spacing_below_delta"?}.
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Also solve each instance and record tonicity and stage sizes.
    #[arg(long)]
    solve: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 12, 16])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = decimal, default_values = ["0.5", "2"])]
    deltas: Vec<Decimal>,
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, default_value = "fpt", value_parser = algorithm)]
    algorithm: Algorithm,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(serde::Deserialize)]
struct BatchSpec {
    n: usize,
    delta: serde_json::Number,
    seeds: Vec<u64>,
    #[serde(default = "default_scale")]
    scale: i64,
    #[serde(default)]
    spacing_below_delta: bool,
}

fn default_scale() -> i64 {
    1000
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    delta: String,
    seed: u64,
    algorithm: Algorithm,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_units: Option<i64>,
    phases: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// An error with the exit code of its class.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible | Error::NoSolution | Error::DisconnectedGrid => EXIT_INFEASIBLE,
            Error::Mismatch(_) | Error::GridMismatch | Error::OffGrid(_) => EXIT_VERIFY,
            Error::TooManyTerminals { .. } | Error::TooManyEdges { .. } | Error::SubproblemTooLarge { .. } => EXIT_RESOURCE,
            _ => EXIT_PARSE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn decimal(s: &str) -> Result<Decimal, String> {
    parse_decimal(s).map_err(|e| e.to_string())
}

fn algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn cap(s: &str) -> Result<Cap, String> {
    match s {
        "auto" => Ok(Cap::Auto),
        "escalate" => Ok(Cap::Escalate),
        _ => s.parse().map(Cap::Fixed).map_err(|_| format!("cap must be a number, auto or escalate, got {s:?}")),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    read_instance(&read(path)?).map_err(|e| {
        let f = Failure::from(e);
        fail(f.code, format!("{}: {}", path.display(), f.message))
    })
}

/// Writes through a temporary file in the target directory, then renames.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| fail(EXIT_RESOURCE, format!("write failed: {e}"));
    let Some(path) = path else {
        std::io::stdout().write_all(text.as_bytes()).map_err(io)?;
        return Ok(());
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    if a.delta <= Decimal::ZERO {
        return Err(fail(EXIT_PARSE, "delta must be positive"));
    }
    let inst = if let Some(h) = &a.hooks {
        let (m, k) = h
            .split_once('x')
            .and_then(|(m, k)| Some((m.parse::<usize>().ok()?, k.parse::<usize>().ok()?)))
            .ok_or_else(|| fail(EXIT_PARSE, format!("--hooks expects HOOKSxPOINTS, got {h:?}")))?;
        if a.probes.contains(&0) {
            return Err(fail(EXIT_PARSE, "probe heights count from 1"));
        }
        let choices: Vec<usize> = a.probes.iter().map(|c| c - 1).collect();
        let params = HookParams { scale: a.scale, ..HookParams::default() };
        let set = generate_hooks_with(m, k, a.delta, &choices, &params)?;
        let meta = GeneratorMeta {
            kind: "hooks".into(),
            seed: None,
            prng: None,
            params: serde_json::json!({ "hooks": m, "points_per_hook": k, "probes": a.probes, "delta": a.delta.to_string(), "geometry": params }),
        };
        Instance { set, generator: Some(meta) }
    } else {
        let spec = GenSpec {
            spacing_below_delta: a.spacing_below_delta,
            ..GenSpec::new(a.n.expect("clap requires n"), a.delta, a.seed, a.scale)
        };
        Instance { set: generate_random_instance(&spec)?, generator: Some(spec.metadata()) }
    };
    emit(a.output.as_deref(), &write_instance(&inst))
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let mut fpt = FptConfig { mirrored_cap: a.mirrored_cap, ..FptConfig::default() };
    if let Some(t) = a.delta_threshold {
        fpt.delta_threshold = t;
    }
    let opts = SolveOptions { algorithm: a.algorithm, cap: a.cap, fpt, time: a.time };
    let solved = solve(&inst, &opts)?;
    if let Some(t) = &solved.report.timings {
        for (phase, secs) in &t.phases {
            eprintln!("{phase}: {secs:.6} s");
        }
    }
    emit(a.output.as_deref(), &write_tree(&solved.tree, inst.set.scale()))?;
    if let Some(r) = &a.report {
        emit(Some(r), &to_json_pretty(&solved.report))?;
    }
    if a.verify {
        let v = verify(&inst, &solved.tree)?;
        if !v.ok {
            eprint!("{}", to_json_pretty(&v));
            return Err(fail(EXIT_VERIFY, "verification failed"));
        }
    }
    Ok(())
}

fn check(instance: &Path, tree: &Path) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let t = read_tree(&read(tree)?, &inst.set)?;
    let v = verify(&inst, &t)?;
    print!("{}", to_json_pretty(&v));
    if v.ok {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, "verification failed"))
    }
}

fn render(a: RenderArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let tree = a.tree.as_deref().map(|t| read_tree(&read(t)?, &inst.set).map_err(Failure::from)).transpose()?;
    let opts = RenderOptions { show_walls: a.show_walls, show_separators: a.show_separators };
    emit(a.output.as_deref(), &render_svg(&inst.set, tree.as_ref(), &opts))
}

fn one_stats(inst: &Instance, with_solve: bool) -> Result<StatsReport, Failure> {
    let mut s = instance_stats(&inst.set);
    if with_solve {
        let solved = solve(inst, &SolveOptions::default())?;
        s.tonicity_profiles.push(solved.report.tonicity_profile);
        let stages = solved.report.fpt.map(|f| f.intervals.into_iter().map(|i| i.stage_sizes).collect()).unwrap_or_default();
        s.stage_sizes.push(stages);
    }
    Ok(s)
}

fn stats(a: StatsArgs) -> Result<(), Failure> {
    let mut instances = a.instances.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some(b) = &a.batch {
        let spec: BatchSpec = serde_json::from_str(&read(b)?).map_err(|e| fail(EXIT_PARSE, format!("batch: {e}")))?;
        let delta = parse_decimal(&spec.delta.to_string())?;
        let generated: Vec<Instance> = spec
            .seeds
            .par_iter()
            .map(|&seed| {
                let g = GenSpec { spacing_below_delta: spec.spacing_below_delta, ..GenSpec::new(spec.n, delta, seed, spec.scale) };
                Ok(Instance { set: generate_random_instance(&g)?, generator: Some(g.metadata()) })
            })
            .collect::<Result<_, Error>>()?;
        instances.extend(generated);
    }
    let parts: Vec<StatsReport> = instances.par_iter().map(|i| one_stats(i, a.solve)).collect::<Result<_, _>>()?;
    let report = parts.into_iter().fold(StatsReport::default(), StatsReport::merge);
    emit(a.output.as_deref(), &to_json_pretty(&report))
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for &n in &a.sizes {
        for &delta in &a.deltas {
            for seed in 0..a.seeds {
                let spec = GenSpec::new(n, delta, seed, 1000);
                let inst = Instance { set: generate_random_instance(&spec)?, generator: Some(spec.metadata()) };
                let opts = SolveOptions { algorithm: a.algorithm, time: true, ..SolveOptions::default() };
                let mut row = BenchRow {
                    n,
                    delta: delta.to_string(),
                    seed,
                    algorithm: a.algorithm,
                    length_units: None,
                    phases: Vec::new(),
                    error: None,
                };
                match solve(&inst, &opts) {
                    Ok(s) => {
                        row.algorithm = s.report.algorithm;
                        row.length_units = Some(s.report.length_units);
                        row.phases = s.report.timings.map(|t| t.phases).unwrap_or_default();
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    emit(a.output.as_deref(), &to_json_pretty(&rows))
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("STRIP_STEINER_THREADS") {
        let n: usize = v.parse().map_err(|_| fail(EXIT_PARSE, format!("STRIP_STEINER_THREADS={v:?} is not a count")))?;
        // Only fails when a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads().and_then(|()| match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Check { instance, tree } => check(&instance, &tree),
        Command::Render(a) => render(a),
        Command::Stats(a) => stats(a),
        Command::Bench(a) => bench(a),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
