use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use barrier_core::experiment::{format_csv, format_table, run_bench, BenchConfig, CellOutcome};
use barrier_core::files::{read_barriers, read_candidates, write_arrangement, write_candidates, write_solution};
use barrier_core::geometry::{parse_coord, Segment};
use barrier_core::pipeline::candidates_for;
use barrier_core::render::{render_svg, Scene};
use barrier_core::{
    export_lp, generate, read_instance, solve_instance, verify_separation, write_instance, CandidateMode, GenKind,
    GenSpec, Instance, SolveStatus,
};

const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_UNVERIFIED: u8 = 5;

#[derive(Parser)]
#[command(name = "barrier", version, about = "Fewest straight barriers separating sets of planar objects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    Generate(GenerateArgs),
    /// List candidate barrier segments for an instance.
    Candidates(CandidatesArgs),
    /// Compute a minimum barrier set and check it.
    Solve(SolveArgs),
    /// Check whether given barriers separate the sets.
    Verify(VerifyArgs),
    /// Draw an instance, optionally with barriers and candidates, as SVG.
    Render(RenderArgs),
    /// Time a family of generated instances.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// random-points, points-polygons, tsp-polygons or grid-squares.
    #[arg(long)]
    kind: GenKind,
    #[arg(long)]
    sets: usize,
    /// Objects per set.
    #[arg(long)]
    objects: usize,
    /// Obstacles per set; defaults to the number of objects per set.
    #[arg(long)]
    obstacles: Option<usize>,
    /// Side of the square workspace.
    #[arg(long, default_value = "100")]
    extent: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ModeArgs {
    /// bitangent or sampled:<r>.
    #[arg(long, default_value = "bitangent")]
    mode: CandidateMode,
}

#[derive(Args)]
struct CandidatesArgs {
    instance: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    /// Seconds before the best selection found so far is reported.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Solution file; printed to stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the cells and adjacencies as JSON.
    #[arg(long)]
    dump_arrangement: Option<PathBuf>,
    /// Also write the 0-1 model in LP format.
    #[arg(long)]
    lp: Option<PathBuf>,
    /// Leave the wall-clock time out of the solution file.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    /// A list of segments, a list of barrier records, or a solution file.
    barriers: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    instance: PathBuf,
    /// Solution or barrier file whose barriers are drawn in red.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Candidate file drawn as thin dashed lines.
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    kind: GenKind,
    /// Set counts, as a list (`2,3`) or range (`2-4`).
    #[arg(long, default_value = "2", value_parser = parse_counts)]
    sets: Counts,
    /// Objects per set, as a list or range.
    #[arg(long, default_value = "1-6", value_parser = parse_counts)]
    objects: Counts,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Seed of the first trial; later trials count up from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    mode: ModeArgs,
    /// Seconds per instance; cells exceeding it print `-`.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// CSV output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Leave timing columns out of the CSV.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Debug, Clone)]
struct Counts(Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    let bad = || format!("expected a list like 1,2,3 or a range like 1-6, got {s:?}");
    if let Some((a, b)) = s.split_once('-') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok(Counts((a..=b).collect()));
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<Vec<_>, _>>().map(Counts)
}

/// Failure with a message and an exit code.
struct Fail(u8, String);

impl Fail {
    fn input(msg: impl ToString) -> Fail {
        Fail(EXIT_INPUT, msg.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn read_text(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Fail> {
    read_instance(&read_text(path)?).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail(1, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn seconds(v: f64) -> Result<Duration, Fail> {
    Duration::try_from_secs_f64(v).map_err(|_| Fail::input(format!("bad time limit {v}")))
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let extent = parse_coord(&a.extent).map_err(|e| Fail::input(format!("--extent: {e}")))?;
    let mut spec = GenSpec::new(a.kind, a.sets, a.objects, a.seed);
    spec.obstacles_per_set = a.obstacles.unwrap_or(a.objects);
    spec.workspace_extent = extent;
    let inst = generate(&spec).map_err(|e| Fail(1, e.to_string()))?;
    emit(a.output.as_deref(), &write_instance(&inst))?;
    eprintln!(
        "{}: k={} objects/set={} obstacles={} seed={}",
        a.kind,
        inst.num_sets(),
        a.objects,
        inst.obstacles.len(),
        a.seed
    );
    Ok(0)
}

fn cmd_candidates(a: CandidatesArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let cands = candidates_for(&inst, a.mode.mode);
    emit(a.output.as_deref(), &write_candidates(&cands))?;
    eprintln!("{} candidates ({})", cands.len(), a.mode.mode);
    Ok(0)
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let limit = seconds(a.time_limit)?;
    let out = solve_instance(&inst, a.mode.mode, Some(limit)).map_err(|e| Fail(EXIT_UNVERIFIED, e.to_string()))?;
    emit(a.output.as_deref(), &write_solution(&out, !a.omit_timing))?;
    if let (Some(p), Some(arr)) = (&a.dump_arrangement, &out.arrangement) {
        emit(Some(p), &write_arrangement(arr))?;
    }
    if let (Some(p), Some(model)) = (&a.lp, &out.model) {
        emit(Some(p), &export_lp(model))?;
    }
    let status = match out.solution.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::TimeLimit => "time limit",
    };
    eprintln!(
        "{status}: {} barriers, N={} M={}, {:.3}s, verified={}",
        out.solution.objective_value,
        out.candidates.len(),
        out.arrangement.as_ref().map_or(0, |r| r.num_cells()),
        out.timings.solve_total().as_secs_f64(),
        out.verified()
    );
    Ok(match out.solution.status {
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        _ if !out.verified() => EXIT_UNVERIFIED,
        SolveStatus::TimeLimit => EXIT_TIMEOUT,
        SolveStatus::Optimal => 0,
    })
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let barriers = read_barriers(&read_text(&a.barriers)?).map_err(|e| Fail::input(format!("{}: {e}", a.barriers.display())))?;
    match verify_separation(&inst, &barriers) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if report.ok { 0 } else { 1 })
        }
        Err(e) => Err(Fail(1, e.to_string())),
    }
}

fn cmd_render(a: RenderArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let barriers: Vec<Segment> = match &a.solution {
        Some(p) => read_barriers(&read_text(p)?)
            .map_err(|e| Fail::input(format!("{}: {e}", p.display())))?
            .into_iter()
            .map(|b| b.segment)
            .collect(),
        None => Vec::new(),
    };
    let candidates: Vec<Segment> = match &a.candidates {
        Some(p) => read_candidates(&read_text(p)?)
            .map_err(|e| Fail::input(format!("{}: {e}", p.display())))?
            .into_iter()
            .map(|c| c.geometry)
            .collect(),
        None => Vec::new(),
    };
    emit(a.output.as_deref(), &render_svg(&inst, &Scene { barriers: &barriers, candidates: &candidates }))?;
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Outcome {
    let cfg = BenchConfig {
        kind: a.kind,
        sets: a.sets.0,
        objects: a.objects.0,
        trials: a.trials,
        base_seed: a.seed,
        mode: a.mode.mode,
        time_limit: Some(seconds(a.time_limit)?),
    };
    let cells = run_bench(&cfg, |c| {
        let note = match &c.outcome {
            CellOutcome::Solved(_) => format!("{:.3}s mean", c.mean_seconds().unwrap_or(0.0)),
            CellOutcome::TimedOut => "time limit".to_string(),
            CellOutcome::NotGenerated(e) => e.clone(),
        };
        eprintln!("sets={} objects={}: {note}", c.sets, c.objects);
    })
    .map_err(|e| Fail(EXIT_UNVERIFIED, e.to_string()))?;
    print!("{}", format_table(&cfg, &cells));
    if let Some(p) = &a.output {
        emit(Some(p), &format_csv(&cfg, &cells, !a.omit_timing))?;
    }
    let unverified = cells.iter().flat_map(|c| c.trials()).any(|t| !t.verified);
    Ok(if unverified { EXIT_UNVERIFIED } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Candidates(a) => cmd_candidates(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
