//! The ring model: configuration, colorings, arcs and cost accounting.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// Parameters of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingConfig {
    /// Number of processes on the ring.
    pub n: usize,
    /// Number of servers.
    pub ell: usize,
    /// Server capacity of the offline algorithms.
    pub k: usize,
    /// Augmentation slack.
    pub epsilon: f64,
    pub seed: u64,
}

impl RingConfig {
    pub fn new(n: usize, ell: usize, k: usize, epsilon: f64, seed: u64) -> Result<Self, Error> {
        let cfg = RingConfig { n, ell, k, epsilon, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be at least 1"));
        }
        if self.ell < 2 {
            return Err(Error::InvalidConfig("ell must be at least 2"));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("the ring needs at least 2 processes"));
        }
        if self.n > self.ell * self.k {
            return Err(Error::InvalidConfig("n exceeds ell * k"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Parameter { name: "epsilon", value: self.epsilon });
        }
        Ok(())
    }

    pub fn edge(&self, i: usize) -> Result<EdgeId, Error> {
        if i < self.n {
            Ok(EdgeId(i))
        } else {
            Err(Error::EdgeOutOfRange { edge: i, limit: self.n })
        }
    }
}

/// The edge between process `i` and process `i + 1 mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn endpoints(self, n: usize) -> (usize, usize) {
        (self.0, (self.0 + 1) % n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalId(pub u32);

/// Contiguous run of `len` processes starting at `start`, read clockwise.
///
/// An arc of `len` nodes holds the `len - 1` edges `start, .., start + len - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn new(start: usize, len: usize, n: usize) -> Self {
        Arc { start: start % n, len }
    }

    pub fn offset(&self, p: usize, n: usize) -> usize {
        (p + n - self.start) % n
    }

    pub fn contains_node(&self, p: usize, n: usize) -> bool {
        self.len >= n || self.offset(p % n, n) < self.len
    }

    pub fn contains_edge(&self, e: usize, n: usize) -> bool {
        self.len > 0 && self.offset(e % n, n) < self.len - 1
    }

    pub fn edge_count(&self) -> usize {
        self.len.saturating_sub(1)
    }

    /// Ring edge of the `j`-th edge inside the arc.
    pub fn edge_at(&self, j: usize, n: usize) -> usize {
        (self.start + j) % n
    }

    pub fn node_at(&self, j: usize, n: usize) -> usize {
        (self.start + j) % n
    }

    /// Whether every node of `other` lies in `self`.
    pub fn contains_arc(&self, other: &Arc, n: usize) -> bool {
        if self.len >= n {
            return true;
        }
        other.len <= self.len && self.offset(other.start, n) + other.len <= self.len
    }
}

/// Assignment of every process to a server.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(Vec<u32>);

impl Coloring {
    pub fn new(colors: Vec<u32>) -> Self {
        Coloring(colors)
    }

    /// Contiguous blocks of `k` processes per server: process `p` goes to `p / k`.
    pub fn blocks(n: usize, k: usize) -> Self {
        Coloring((0..n).map(|p| (p / k) as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn color(&self, p: usize) -> u32 {
        self.0[p % self.0.len()]
    }

    pub fn set(&mut self, p: usize, server: u32) {
        self.0[p] = server;
    }

    /// Communication cost of a request: 1 iff the edge crosses servers.
    pub fn serve_request(&self, edge: EdgeId) -> u64 {
        let n = self.0.len();
        let (a, b) = edge.endpoints(n);
        u64::from(self.0[a] != self.0[b])
    }

    /// Load of every server `0..ell`.
    pub fn loads(&self, ell: usize) -> Vec<usize> {
        let top = self.0.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut loads = vec![0usize; ell.max(top)];
        for &c in &self.0 {
            loads[c as usize] += 1;
        }
        loads
    }

    pub fn max_load(&self) -> usize {
        self.loads(0).into_iter().max().unwrap_or(0)
    }

    pub fn check_servers(&self, ell: usize) -> Result<(), Error> {
        match self.0.iter().find(|&&c| c as usize >= ell) {
            Some(&c) => Err(Error::ServerOutOfRange { server: c, ell }),
            None => Ok(()),
        }
    }

    /// Fails if a server holds more than `capacity` processes.
    pub fn check_capacity(&self, ell: usize, capacity: usize) -> Result<(), Error> {
        self.check_servers(ell)?;
        for (s, &load) in self.loads(ell).iter().enumerate() {
            if load > capacity {
                return Err(Error::CapacityExceeded { server: s as u32, load, capacity });
            }
        }
        Ok(())
    }

    pub fn check_load(&self, bound: f64) -> LoadReport {
        let loads = self.loads(0);
        let violations: Vec<(u32, usize)> = loads
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l as f64 > bound)
            .map(|(s, &l)| (s as u32, l))
            .collect();
        LoadReport { max_load: loads.iter().copied().max().unwrap_or(0), bound, violations }
    }

    /// Relabels servers in order of first occurrence.
    pub fn canonical(&self) -> Coloring {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        let colors = self
            .0
            .iter()
            .map(|&c| {
                let next = map.len() as u32;
                *map.entry(c).or_insert(next)
            })
            .collect();
        Coloring(colors)
    }
}

/// Number of processes whose server differs between two colorings.
pub fn migration_cost(from: &Coloring, to: &Coloring) -> Result<u64, Error> {
    if from.len() != to.len() {
        return Err(Error::LengthMismatch { expected: from.len(), found: to.len() });
    }
    Ok(from.0.iter().zip(&to.0).filter(|(a, b)| a != b).count() as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub max_load: usize,
    pub bound: f64,
    /// Servers above the bound with their loads.
    pub violations: Vec<(u32, usize)>,
}

impl LoadReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The five cost components of an online run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Communication cost.
    pub hit: u64,
    /// Migrations caused by moving cut edges.
    pub moves: u64,
    /// Migrations caused by merging slices.
    pub merge: u64,
    /// Migrations into a color cluster.
    pub mono: u64,
    /// Migrations done by the rebalancing loop.
    pub bal: u64,
}

impl CostBreakdown {
    pub fn total(&self) -> u64 {
        self.hit + self.moves + self.merge + self.mono + self.bal
    }

    pub fn migrations(&self) -> u64 {
        self.moves + self.merge + self.mono + self.bal
    }

    pub fn add(&mut self, other: &CostBreakdown) {
        self.hit += other.hit;
        self.moves += other.moves;
        self.merge += other.merge;
        self.mono += other.mono;
        self.bal += other.bal;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalEventKind {
    Grown { len: usize },
    MonoDeactivated,
    Dominated { by: IntervalId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalEvent {
    pub interval: IntervalId,
    pub kind: IntervalEventKind,
}

/// Structural statistics attached to a step by the static algorithm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClusterStats {
    pub max_color_cluster: usize,
    pub max_singleton: usize,
    pub max_multiplicity: usize,
}

/// One line of the per-step trace. Step 0 holds the initial placement.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub edge: Option<EdgeId>,
    pub costs: CostBreakdown,
    pub max_load: usize,
    pub events: Vec<IntervalEvent>,
    pub clusters: Option<ClusterStats>,
}

/// Hit and move cost attributed to one interval.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntervalCost {
    pub hit: u64,
    pub moves: u64,
}

#[derive(Debug, Clone, Default)]
pub struct CostLedger {
    totals: CostBreakdown,
    per_interval: BTreeMap<IntervalId, IntervalCost>,
    trace: Vec<StepRecord>,
    keep_trace: bool,
}

impl CostLedger {
    pub fn new(keep_trace: bool) -> Self {
        CostLedger { keep_trace, ..Default::default() }
    }

    pub fn totals(&self) -> &CostBreakdown {
        &self.totals
    }

    pub fn per_interval(&self) -> &BTreeMap<IntervalId, IntervalCost> {
        &self.per_interval
    }

    pub fn trace(&self) -> &[StepRecord] {
        &self.trace
    }

    pub fn record(&mut self, rec: StepRecord) {
        self.totals.add(&rec.costs);
        if self.keep_trace {
            self.trace.push(rec);
        }
    }

    pub fn charge_interval(&mut self, id: IntervalId, hit: u64, moves: u64) {
        let entry = self.per_interval.entry(id).or_default();
        entry.hit += hit;
        entry.moves += moves;
    }

    /// Sum of the per-interval attributions.
    pub fn interval_sums(&self) -> IntervalCost {
        self.per_interval.values().fold(IntervalCost::default(), |acc, c| IntervalCost {
            hit: acc.hit + c.hit,
            moves: acc.moves + c.moves,
        })
    }

    /// Whether the stored trace adds up to the totals (vacuous without a trace).
    pub fn trace_consistent(&self) -> bool {
        if !self.keep_trace {
            return true;
        }
        let mut sum = CostBreakdown::default();
        for rec in &self.trace {
            sum.add(&rec.costs);
        }
        sum == self.totals
    }
}
