//! JSON documents for solutions, candidate lists, arrangement dumps and
//! barrier lists. Coordinates follow the instance convention: strings
//! holding a decimal or a `p/q` fraction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{ArrangementResult, CellKind};
use crate::candidates::{AnchorOwner, CandidateSegment, CandidateSource, Side};
use crate::geometry::{GeometryError, Point, Segment};
use crate::ilp::SolveStatus;
use crate::instance::ShapeRef;
use crate::pipeline::SolveOutcome;
use crate::verifier::Barrier;

type CoordPair = [String; 2];

#[derive(Debug, Error)]
pub enum FileError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("parse error in {field}: {source}")]
    Field {
        field: String,
        #[source]
        source: GeometryError,
    },
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn point_doc(p: &Point) -> CoordPair {
    p.to_strings()
}

fn segment_doc(s: &Segment) -> [CoordPair; 2] {
    [point_doc(&s.a), point_doc(&s.b)]
}

fn read_point(pair: &CoordPair, field: &str) -> Result<Point, FileError> {
    Point::parse(&pair[0], &pair[1]).map_err(|source| FileError::Field { field: field.to_string(), source })
}

fn read_segment(pair: &[CoordPair; 2], field: &str) -> Result<Segment, FileError> {
    let a = read_point(&pair[0], &format!("{field}[0]"))?;
    let b = read_point(&pair[1], &format!("{field}[1]"))?;
    Segment::new(a, b).map_err(|source| FileError::Field { field: field.to_string(), source })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinDoc {
    pub point: CoordPair,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarrierDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<usize>,
    pub segment: [CoordPair; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pins: Vec<PinDoc>,
}

impl BarrierDoc {
    pub fn of(b: &Barrier, candidate: Option<usize>) -> Self {
        BarrierDoc {
            candidate,
            segment: segment_doc(&b.segment),
            pins: b.pins.iter().map(|(p, side)| PinDoc { point: point_doc(p), side: *side }).collect(),
        }
    }

    pub fn to_barrier(&self, field: &str) -> Result<Barrier, FileError> {
        let segment = read_segment(&self.segment, &format!("{field}.segment"))?;
        let pins = self
            .pins
            .iter()
            .enumerate()
            .map(|(i, p)| Ok((read_point(&p.point, &format!("{field}.pins[{i}]"))?, p.side)))
            .collect::<Result<Vec<_>, FileError>>()?;
        Ok(Barrier { segment, pins })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusDoc {
    Optimal,
    Infeasible,
    TimeLimit,
}

impl From<SolveStatus> for StatusDoc {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => StatusDoc::Optimal,
            SolveStatus::Infeasible => StatusDoc::Infeasible,
            SolveStatus::TimeLimit => StatusDoc::TimeLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub status: StatusDoc,
    pub mode: String,
    pub objective: usize,
    /// N: number of candidate segments.
    pub num_candidates: usize,
    /// M: number of cells.
    pub num_cells: usize,
    pub barriers: Vec<BarrierDoc>,
    pub verified: bool,
    /// Seconds spent on candidates, arrangement and solve. Omitted when
    /// byte-stable output is wanted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl SolutionDoc {
    pub fn of(out: &SolveOutcome, with_timing: bool) -> Self {
        SolutionDoc {
            status: out.solution.status.into(),
            mode: out.mode.to_string(),
            objective: out.solution.objective_value,
            num_candidates: out.candidates.len(),
            num_cells: out.arrangement.as_ref().map_or(0, ArrangementResult::num_cells),
            barriers: out.barriers.iter().zip(&out.selected).map(|(b, c)| BarrierDoc::of(b, Some(c.id))).collect(),
            verified: out.verified(),
            wall_clock_seconds: with_timing.then(|| out.timings.solve_total().as_secs_f64()),
        }
    }
}

pub fn write_solution(out: &SolveOutcome, with_timing: bool) -> String {
    to_pretty(&SolutionDoc::of(out, with_timing))
}

pub fn read_solution(text: &str) -> Result<SolutionDoc, FileError> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BarrierFile {
    Solution(SolutionDoc),
    Docs(Vec<BarrierDoc>),
    Segments(Vec<[CoordPair; 2]>),
}

/// Reads barriers from a bare list of segments, a list of barrier records,
/// or a solution document.
pub fn read_barriers(text: &str) -> Result<Vec<Barrier>, FileError> {
    let file: BarrierFile = serde_json::from_str(text)?;
    match file {
        BarrierFile::Solution(doc) => read_barrier_docs(&doc.barriers),
        BarrierFile::Docs(docs) => read_barrier_docs(&docs),
        BarrierFile::Segments(segs) => segs
            .iter()
            .enumerate()
            .map(|(i, s)| Ok(Barrier::plain(read_segment(s, &format!("[{i}]"))?)))
            .collect(),
    }
}

fn read_barrier_docs(docs: &[BarrierDoc]) -> Result<Vec<Barrier>, FileError> {
    docs.iter().enumerate().map(|(i, d)| d.to_barrier(&format!("barriers[{i}]"))).collect()
}

pub fn write_barriers(barriers: &[Barrier]) -> String {
    let docs: Vec<BarrierDoc> = barriers.iter().map(|b| BarrierDoc::of(b, None)).collect();
    to_pretty(&docs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangencyDoc {
    pub anchor: CoordPair,
    pub owner: AnchorOwner,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDoc {
    pub id: usize,
    pub segment: [CoordPair; 2],
    pub source: CandidateSource,
    pub tangencies: Vec<TangencyDoc>,
}

pub fn write_candidates(candidates: &[CandidateSegment]) -> String {
    let docs: Vec<CandidateDoc> = candidates
        .iter()
        .map(|c| CandidateDoc {
            id: c.id,
            segment: segment_doc(&c.geometry),
            source: c.source,
            tangencies: c
                .tangencies
                .iter()
                .map(|t| TangencyDoc { anchor: point_doc(&t.anchor), owner: t.owner, side: t.side })
                .collect(),
        })
        .collect();
    to_pretty(&docs)
}

pub fn read_candidates(text: &str) -> Result<Vec<CandidateSegment>, FileError> {
    let docs: Vec<CandidateDoc> = serde_json::from_str(text)?;
    docs.iter()
        .map(|d| {
            let field = format!("candidate {}", d.id);
            let tangencies = d
                .tangencies
                .iter()
                .map(|t| {
                    Ok(crate::candidates::Tangency { anchor: read_point(&t.anchor, &field)?, owner: t.owner, side: t.side })
                })
                .collect::<Result<Vec<_>, FileError>>()?;
            Ok(CandidateSegment {
                id: d.id,
                geometry: read_segment(&d.segment, &field)?.canonical(),
                tangencies,
                source: d.source,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct CellDoc {
    id: usize,
    kind: &'static str,
    boundary: Vec<CoordPair>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    holes: Vec<Vec<CoordPair>>,
    objects: Vec<ShapeRef>,
    label: Option<usize>,
    representative_point: CoordPair,
}

#[derive(Debug, Serialize)]
struct AdjacencyDoc {
    cells: [usize; 2],
    covering_candidates: Vec<usize>,
    portions: Vec<[CoordPair; 2]>,
}

#[derive(Debug, Serialize)]
struct ArrangementDoc {
    num_candidates: usize,
    vertices: usize,
    edges: usize,
    faces: usize,
    components: usize,
    cells: Vec<CellDoc>,
    adjacencies: Vec<AdjacencyDoc>,
}

pub fn write_arrangement(arr: &ArrangementResult) -> String {
    let doc = ArrangementDoc {
        num_candidates: arr.num_candidates,
        vertices: arr.stats.vertices,
        edges: arr.stats.edges,
        faces: arr.stats.faces,
        components: arr.stats.components,
        cells: arr
            .cells
            .iter()
            .map(|c| CellDoc {
                id: c.id,
                kind: match c.kind {
                    CellKind::Face => "face",
                    CellKind::Object => "object",
                },
                boundary: c.boundary.iter().map(point_doc).collect(),
                holes: c.holes.iter().map(|h| h.iter().map(point_doc).collect()).collect(),
                objects: c.objects.clone(),
                label: c.label,
                representative_point: point_doc(&c.representative_point),
            })
            .collect(),
        adjacencies: arr
            .adjacencies
            .iter()
            .map(|a| AdjacencyDoc {
                cells: [a.cells.0, a.cells.1],
                covering_candidates: a.covering_candidates.clone(),
                portions: a.portions.iter().map(segment_doc).collect(),
            })
            .collect(),
    };
    to_pretty(&doc)
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::enumerate_bitangents;
    use crate::instance::{Instance, Shape};
    use crate::geometry::Polygon;

    fn two_points() -> Instance {
        Instance {
            workspace: Polygon::from_ints(&[(0, 0), (10, 0), (10, 10), (0, 10)]).unwrap(),
            sets: vec![vec![Shape::Point(Point::from_ints(2, 3))], vec![Shape::Point(Point::from_ints(7, 5))]],
            obstacles: vec![],
        }
    }

    #[test]
    fn candidates_round_trip() {
        let cands = enumerate_bitangents(&two_points());
        let text = write_candidates(&cands);
        assert_eq!(read_candidates(&text).unwrap(), cands);
    }

    #[test]
    fn barrier_formats() {
        let plain = r#"[[["5", "0"], ["5", "10"]]]"#;
        let b = read_barriers(plain).unwrap();
        assert_eq!(b, vec![Barrier::plain(Segment::new(Point::from_ints(5, 0), Point::from_ints(5, 10)).unwrap())]);
        let pinned = Barrier {
            segment: Segment::new(Point::from_ints(0, 0), Point::from_ints(10, 10)).unwrap(),
            pins: vec![(Point::from_ints(5, 5), Side::Above)],
        };
        let text = write_barriers(std::slice::from_ref(&pinned));
        assert_eq!(read_barriers(&text).unwrap(), vec![pinned]);
        assert!(matches!(read_barriers(r#"[[["1.2.3", "0"], ["5", "10"]]]"#), Err(FileError::Field { .. })));
    }

    #[test]
    fn solution_round_trip_through_barriers() {
        let out = crate::pipeline::solve_instance(&two_points(), crate::pipeline::CandidateMode::Bitangent, None).unwrap();
        let text = write_solution(&out, false);
        assert!(!text.contains("wall_clock"));
        let doc = read_solution(&text).unwrap();
        assert_eq!(doc.objective, 1);
        assert_eq!(doc.status, StatusDoc::Optimal);
        assert_eq!(read_barriers(&text).unwrap(), out.barriers);
        assert!(write_solution(&out, true).contains("wall_clock_seconds"));
    }
}
