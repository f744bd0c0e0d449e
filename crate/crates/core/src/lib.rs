//! Minimum-cardinality straight-line barriers that separate `k` sets of
//! planar objects among obstacles.
//!
//! The pipeline: enumerate candidate segments ([`candidates`]), cut free
//! space into cells along them ([`arrangement`]), pick the fewest
//! candidates that keep differently labeled cells apart ([`ilp`]), and
//! check the result with an independent decomposition ([`verifier`]).
//! [`pipeline::solve_instance`] runs all of it.

pub mod arrangement;
pub mod candidates;
pub mod experiment;
pub mod files;
pub mod geometry;
pub mod ilp;
pub mod instance;
pub mod pipeline;
pub mod render;
pub mod verifier;

pub use arrangement::{build_arrangement, ArrangementError, ArrangementResult};
pub use candidates::{enumerate_bitangents, enumerate_sampled_tangents, CandidateSegment, Side};
pub use geometry::{Coord, Point, Polygon, Segment};
pub use ilp::{build_model, export_lp, solve, IlpModel, Solution, SolveStatus};
pub use instance::{generate, read_instance, write_instance, GenKind, GenSpec, Instance, Shape, ShapeRef};
pub use pipeline::{solve_instance, CandidateMode, SolveOutcome};
pub use verifier::{brute_force_minimum, verify_separation, Barrier, VerificationReport};
