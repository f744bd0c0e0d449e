//! Timing tables over generated instance families: rows are set counts,
//! columns are objects per set, and each cell averages several seeds.

use std::fmt::Write as _;
use std::time::Duration;

use crate::ilp::SolveStatus;
use crate::instance::{generate, GenKind, GenSpec};
use crate::pipeline::{solve_instance, CandidateMode, PipelineError};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kind: GenKind,
    pub sets: Vec<usize>,
    pub objects: Vec<usize>,
    pub trials: usize,
    /// Trial `t` uses seed `base_seed + t`.
    pub base_seed: u64,
    pub mode: CandidateMode,
    pub time_limit: Option<Duration>,
}

impl BenchConfig {
    pub fn new(kind: GenKind, sets: Vec<usize>, objects: Vec<usize>) -> Self {
        BenchConfig { kind, sets, objects, trials: 10, base_seed: 0, mode: CandidateMode::Bitangent, time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub seed: u64,
    pub seconds: f64,
    pub status: SolveStatus,
    pub objective: usize,
    pub num_candidates: usize,
    pub num_cells: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Solved(Vec<Trial>),
    /// Some trial ran out of time.
    TimedOut,
    /// The generator could not place the shapes.
    NotGenerated(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub sets: usize,
    pub objects: usize,
    pub outcome: CellOutcome,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (n, s) = v.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

impl BenchCell {
    pub fn trials(&self) -> &[Trial] {
        match &self.outcome {
            CellOutcome::Solved(t) => t,
            _ => &[],
        }
    }

    pub fn mean_seconds(&self) -> Option<f64> {
        matches!(self.outcome, CellOutcome::Solved(_)).then(|| mean(self.trials().iter().map(|t| t.seconds)))
    }

    pub fn median_seconds(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.trials().iter().map(|t| t.seconds).collect();
        if v.is_empty() || !matches!(self.outcome, CellOutcome::Solved(_)) {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
    }
}

pub fn run_cell(cfg: &BenchConfig, sets: usize, objects: usize) -> Result<BenchCell, PipelineError> {
    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let seed = cfg.base_seed + t as u64;
        let inst = match generate(&GenSpec::new(cfg.kind, sets, objects, seed)) {
            Ok(i) => i,
            Err(e) => return Ok(BenchCell { sets, objects, outcome: CellOutcome::NotGenerated(e.to_string()) }),
        };
        let out = solve_instance(&inst, cfg.mode, cfg.time_limit)?;
        let seconds = out.timings.solve_total().as_secs_f64();
        let over = cfg.time_limit.is_some_and(|l| out.timings.solve_total() > l);
        if out.solution.status == SolveStatus::TimeLimit || over {
            return Ok(BenchCell { sets, objects, outcome: CellOutcome::TimedOut });
        }
        trials.push(Trial {
            seed,
            seconds,
            status: out.solution.status,
            objective: out.solution.objective_value,
            num_candidates: out.candidates.len(),
            num_cells: out.arrangement.as_ref().map_or(0, |a| a.num_cells()),
            verified: out.verified(),
        });
    }
    Ok(BenchCell { sets, objects, outcome: CellOutcome::Solved(trials) })
}

/// Runs every cell; `progress` sees each one as it finishes.
pub fn run_bench(cfg: &BenchConfig, mut progress: impl FnMut(&BenchCell)) -> Result<Vec<BenchCell>, PipelineError> {
    let mut cells = Vec::new();
    for &s in &cfg.sets {
        for &o in &cfg.objects {
            let cell = run_cell(cfg, s, o)?;
            progress(&cell);
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Mean seconds per cell, with `-` for cells that timed out or could not
/// be generated.
pub fn format_table(cfg: &BenchConfig, cells: &[BenchCell]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>6}", "sets");
    for o in &cfg.objects {
        let _ = write!(out, " {o:>9}");
    }
    out.push('\n');
    for &s in &cfg.sets {
        let _ = write!(out, "{s:>6}");
        for &o in &cfg.objects {
            let v = cells
                .iter()
                .find(|c| c.sets == s && c.objects == o)
                .and_then(BenchCell::mean_seconds)
                .map_or("-".to_string(), |v| format!("{v:.3}"));
            let _ = write!(out, " {v:>9}");
        }
        out.push('\n');
    }
    out
}

/// One row per cell. Timing columns are left out when `with_timing` is
/// false so that repeated runs give identical files.
pub fn format_csv(cfg: &BenchConfig, cells: &[BenchCell], with_timing: bool) -> String {
    let mut out = String::new();
    out.push_str("kind,mode,sets,objects,trials,status");
    if with_timing {
        out.push_str(",mean_seconds,median_seconds");
    }
    out.push_str(",mean_candidates,mean_cells,mean_objective,all_verified\n");
    for c in cells {
        let status = match &c.outcome {
            CellOutcome::Solved(_) => "solved",
            CellOutcome::TimedOut => "timeout",
            CellOutcome::NotGenerated(_) => "not_generated",
        };
        let _ = write!(out, "{},{},{},{},{},{status}", cfg.kind, cfg.mode, c.sets, c.objects, cfg.trials);
        let dash = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$}"));
        if with_timing {
            let _ = write!(out, ",{},{}", dash(c.mean_seconds(), 6), dash(c.median_seconds(), 6));
        }
        let t = c.trials();
        let solved = !t.is_empty();
        let avg = |f: fn(&Trial) -> f64| solved.then(|| mean(t.iter().map(f)));
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            dash(avg(|t| t.num_candidates as f64), 1),
            dash(avg(|t| t.num_cells as f64), 1),
            dash(avg(|t| t.objective as f64), 2),
            if solved { t.iter().all(|t| t.verified).to_string() } else { "-".to_string() }
        );
    }
    out
}
