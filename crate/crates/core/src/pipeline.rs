//! Candidates, arrangement, model, solve and verification in one call.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::arrangement::{build_arrangement, ArrangementError, ArrangementResult};
use crate::candidates::{enumerate_bitangents, enumerate_sampled_tangents, CandidateSegment};
use crate::ilp::{build_model, solve, IlpModel, Solution, SolveStatus};
use crate::instance::Instance;
use crate::verifier::{verify_separation, Barrier, VerificationReport, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateMode {
    Bitangent,
    Sampled(u32),
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateMode::Bitangent => f.write_str("bitangent"),
            CandidateMode::Sampled(r) => write!(f, "sampled:{r}"),
        }
    }
}

impl FromStr for CandidateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "bitangent" {
            return Ok(CandidateMode::Bitangent);
        }
        if let Some(r) = s.strip_prefix("sampled:") {
            return match r.parse::<u32>() {
                Ok(r) if r >= 1 => Ok(CandidateMode::Sampled(r)),
                _ => Err(format!("bad resolution in {s:?}; expected a positive integer")),
            };
        }
        Err(format!("unknown mode {s:?}; expected bitangent or sampled:<r>"))
    }
}

pub fn candidates_for(inst: &Instance, mode: CandidateMode) -> Vec<CandidateSegment> {
    match mode {
        CandidateMode::Bitangent => enumerate_bitangents(inst),
        CandidateMode::Sampled(r) => enumerate_sampled_tangents(inst, r),
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Arrangement(ArrangementError),
    #[error("selected barriers rejected by the checker: {0}")]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub candidates: Duration,
    pub arrangement: Duration,
    pub solve: Duration,
    pub verify: Duration,
}

impl Timings {
    /// Everything except the final independent check.
    pub fn solve_total(&self) -> Duration {
        self.candidates + self.arrangement + self.solve
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub mode: CandidateMode,
    pub candidates: Vec<CandidateSegment>,
    /// Absent when two sets share a cell and nothing can separate them.
    pub arrangement: Option<ArrangementResult>,
    pub model: Option<IlpModel>,
    pub solution: Solution,
    pub barriers: Vec<Barrier>,
    pub selected: Vec<CandidateSegment>,
    pub verification: Option<VerificationReport>,
    pub timings: Timings,
}

impl SolveOutcome {
    pub fn verified(&self) -> bool {
        self.verification.as_ref().is_some_and(|v| v.ok)
    }
}

pub fn solve_instance(
    inst: &Instance,
    mode: CandidateMode,
    time_limit: Option<Duration>,
) -> Result<SolveOutcome, PipelineError> {
    let mut timings = Timings::default();
    let t = Instant::now();
    let candidates = candidates_for(inst, mode);
    timings.candidates = t.elapsed();
    solve_with_candidates(inst, mode, candidates, time_limit, timings)
}

pub fn solve_with_candidates(
    inst: &Instance,
    mode: CandidateMode,
    candidates: Vec<CandidateSegment>,
    time_limit: Option<Duration>,
    mut timings: Timings,
) -> Result<SolveOutcome, PipelineError> {
    let t = Instant::now();
    let arrangement = match build_arrangement(inst, &candidates) {
        Ok(a) => a,
        Err(ArrangementError::LabelConflict { .. }) => {
            timings.arrangement = t.elapsed();
            return Ok(SolveOutcome {
                mode,
                candidates,
                arrangement: None,
                model: None,
                solution: Solution::infeasible(0),
                barriers: Vec::new(),
                selected: Vec::new(),
                verification: None,
                timings,
            });
        }
        Err(e) => return Err(PipelineError::Arrangement(e)),
    };
    timings.arrangement = t.elapsed();

    let t = Instant::now();
    let model = build_model(&arrangement, inst.num_sets());
    let remaining = time_limit.map(|l| l.saturating_sub(timings.candidates + timings.arrangement));
    let solution = solve(&model, remaining);
    timings.solve = t.elapsed();

    let selected: Vec<CandidateSegment> = solution.selected.iter().map(|&id| candidates[id].clone()).collect();
    let barriers: Vec<Barrier> = selected.iter().map(Barrier::from_candidate).collect();
    let t = Instant::now();
    let verification = if solution.status == SolveStatus::Infeasible {
        None
    } else {
        Some(verify_separation(inst, &barriers)?)
    };
    timings.verify = t.elapsed();

    Ok(SolveOutcome {
        mode,
        candidates,
        arrangement: Some(arrangement),
        model: Some(model),
        solution,
        barriers,
        selected,
        verification,
        timings,
    })
}
