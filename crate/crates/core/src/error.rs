use core::fmt;

/// Errors raised by the algorithms and oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that needs at least one entry got an empty vector.
    EmptyVector,
    LengthMismatch { expected: usize, found: usize },
    /// A numeric parameter outside its admissible range.
    Parameter { name: &'static str, value: f64 },
    EdgeOutOfRange { edge: usize, limit: usize },
    ServerOutOfRange { server: u32, ell: usize },
    CapacityExceeded { server: u32, load: usize, capacity: usize },
    InvalidConfig(&'static str),
    /// An exact oracle refused an instance beyond its size guard.
    TooLarge { work: f64, limit: f64 },
    NotAdjacent,
    /// A deterministic-only routine was handed a randomized strategy.
    Randomized,
    Invariant(InvariantViolation),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyVector => write!(f, "empty vector"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::Parameter { name, value } => write!(f, "parameter {name} out of range: {value}"),
            Error::EdgeOutOfRange { edge, limit } => {
                write!(f, "edge {edge} out of range (limit {limit})")
            }
            Error::ServerOutOfRange { server, ell } => {
                write!(f, "server {server} out of range (ell = {ell})")
            }
            Error::CapacityExceeded { server, load, capacity } => {
                write!(f, "server {server} holds {load} processes, capacity {capacity}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::TooLarge { work, limit } => {
                write!(f, "instance too large for exact search: {work:.3e} > {limit:.3e}")
            }
            Error::NotAdjacent => write!(f, "slices are not adjacent"),
            Error::Randomized => write!(f, "strategy is randomized"),
            Error::Invariant(v) => write!(f, "{v}"),
        }
    }
}

impl From<InvariantViolation> for Error {
    fn from(v: InvariantViolation) -> Self {
        Error::Invariant(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantKind {
    LoadBound,
    ColorClusterSize,
    SingletonClusterSize,
    SlicePartition,
    CutInsideInterval,
    IntervalMultiplicity,
    DominatedCutContainment,
    MonochromaticCost,
    ProxyHit,
    ProxyMove,
    PhysicalMigrations,
    NoLightServer,
}

impl InvariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InvariantKind::LoadBound => "load_bound",
            InvariantKind::ColorClusterSize => "color_cluster_size",
            InvariantKind::SingletonClusterSize => "singleton_cluster_size",
            InvariantKind::SlicePartition => "slice_partition",
            InvariantKind::CutInsideInterval => "cut_inside_interval",
            InvariantKind::IntervalMultiplicity => "interval_multiplicity",
            InvariantKind::DominatedCutContainment => "dominated_cut_containment",
            InvariantKind::MonochromaticCost => "monochromatic_cost",
            InvariantKind::ProxyHit => "proxy_hit",
            InvariantKind::ProxyMove => "proxy_move",
            InvariantKind::PhysicalMigrations => "physical_migrations",
            InvariantKind::NoLightServer => "no_light_server",
        }
    }
}

/// A violated structural guarantee: `value` exceeded `bound` at `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantViolation {
    pub kind: InvariantKind,
    pub step: u64,
    pub value: f64,
    pub bound: f64,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invariant {} violated at step {}: {} > {}",
            self.kind.as_str(),
            self.step,
            self.value,
            self.bound
        )
    }
}

impl core::error::Error for Error {}

impl core::error::Error for InvariantViolation {}
