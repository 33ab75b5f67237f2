//! Online balanced graph partitioning for ring communication patterns.
//!
//! `n` processes sit on a cycle and only neighbouring processes talk to each
//! other. Every request on an edge whose endpoints live on different servers
//! costs 1, every process migration costs 1, and the online algorithms are
//! allowed a constant factor of extra capacity per server compared to the
//! offline optimum.
//!
//! The crate contains
//!
//! * [`ring`]: the problem model, colorings and the cost ledger,
//! * [`smin`]: the smooth minimum kernel and its gradient,
//! * [`hitting`]: the randomized interval growing strategy for the hitting
//!   game on a line,
//! * [`mts`]: metrical task system solvers on a line metric and the exact
//!   offline optimum,
//! * [`dynamic_partitioner`]: the shifted-interval algorithm that runs one
//!   MTS instance per interval,
//! * [`static_partitioner`]: slicing, clustering and scheduling on top of
//!   per-interval hitting games,
//! * [`oracles`]: brute-force optima and the deterministic lower-bound
//!   adversary.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coupling;
pub mod dynamic_partitioner;
mod error;
pub mod hitting;
pub mod mts;
pub mod oracles;
pub mod ring;
pub mod rng;
pub mod smin;
pub mod static_partitioner;

pub use dynamic_partitioner::{DynamicPartitioner, MtsKind};
pub use error::{Error, InvariantKind, InvariantViolation};
pub use ring::{
    Coloring, CostBreakdown, CostLedger, EdgeId, IntervalEvent, IntervalEventKind, IntervalId,
    RingConfig, StepRecord,
};
pub use static_partitioner::StaticPartitioner;

/// Common surface of the two online algorithms.
pub trait OnlinePartitioner {
    /// Serves one request and returns the costs it caused.
    fn serve(&mut self, edge: EdgeId) -> Result<CostBreakdown, Error>;

    /// Current assignment of processes to servers.
    fn coloring(&self) -> &Coloring;

    fn ledger(&self) -> &CostLedger;

    /// Re-checks every structural guarantee of the algorithm.
    fn check_invariants(&self) -> Result<(), InvariantViolation>;

    fn name(&self) -> &'static str;
}
