//! Simulator and command-line harness for `ringpart-core`.
//!
//! * [`gen`]: request generators,
//! * [`trace`]: the JSONL trace format,
//! * [`experiment`]: trial runner and CSV summaries,
//! * [`verify`]: offline replay of the structural bounds in a trace.

pub mod error;
pub mod experiment;
pub mod gen;
pub mod trace;
pub mod verify;

pub use error::SimError;
pub use experiment::{run_experiment, Algo, ExperimentResult, ExperimentSpec, InitialKind, Mts, TrialRow};
pub use gen::{generate, GeneratorSpec};
pub use trace::{read_trace_file, Trace};
pub use verify::{verify_trace, Report};
