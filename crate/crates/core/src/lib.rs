//! Break minimization for mirrored and plain double round-robin tournaments.
//!
//! The crate covers the whole pipeline used to study the problem as a QUBO:
//!
//! * [`schedule`]: Kirkman (circle-method) timetables, slot shuffling,
//!   mirroring, home/away assignments and break counting.
//! * [`qubo`]: the pair decomposition of a double round-robin timetable,
//!   the one-variable-per-pair reduction, the resulting unconstrained
//!   quadratic model, its Ising form and its source graph.
//! * [`solver`]: exact Gray-code enumeration, simulated annealing, steepest
//!   descent and a time-to-target harness.
//! * [`embedding`]: Chimera and Pegasus hardware graphs and a greedy
//!   chain-growth minor embedder.
//! * [`penalty`]: the permutation-matrix penalty model and its feasibility
//!   statistics.
//! * [`experiment`]: seeded experiment drivers that produce table-shaped
//!   reports.
//!
//! Teams and slots are 0-based inside the crate and 1-based in every
//! serialized form.

pub mod embedding;
pub mod error;
pub mod experiment;
pub mod penalty;
pub mod qubo;
pub mod report;
pub mod rng;
pub mod schedule;
pub mod solver;

pub use embedding::{Embedding, EmbeddingStats, HardwareGraph, Topology};
pub use error::{Error, Result};
pub use qubo::{IsingModel, PairIndex, Qubo, Sign, SourceGraph, VariableMap};
pub use report::ValidationReport;
pub use schedule::{HaAssignment, Kind, Timetable};
pub use solver::{AnnealConfig, Sample, SampleSet, Solver};
