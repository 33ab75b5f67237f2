//! Online algorithm against a dynamic optimum with augmentation `2 + eps`.
//!
//! With `k' = ceil((1 + eps) k)` and `l' = ceil(n / k')`, a random shift
//! `R in 0..k'` places the intervals `I_i = [R + i k', R + (i + 1) k']`
//! (0-based `i`) around the ring; consecutive intervals share one node and
//! the last one may overlap the first. Each interval runs its own MTS
//! instance whose states are the interval's `k'` edges; the chosen state is
//! the interval's cut edge. The processes between the cut of `I_i` and the
//! cut of `I_{i+1}` are placed on server `i`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, InvariantKind, InvariantViolation};
use crate::mts::{offline_opt, MtsLineProblem, MtsSolver, SminSolver, WorkFunctionSolver};
use crate::ring::{
    migration_cost, Arc, Coloring, CostBreakdown, CostLedger, EdgeId, IntervalCost, IntervalId,
    RingConfig, StepRecord,
};
use crate::rng::{interval_stream, stream, StreamRng, STREAM_SHIFT};
use crate::OnlinePartitioner;

/// Which MTS solver drives the cut edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MtsKind {
    #[default]
    Smin,
    Wfa,
}

impl MtsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MtsKind::Smin => "smin",
            MtsKind::Wfa => "wfa",
        }
    }
}

#[derive(Debug, Clone)]
enum Solver {
    Wfa(WorkFunctionSolver),
    Smin(Box<SminSolver<StreamRng>>),
}

impl MtsSolver for Solver {
    fn state(&self) -> usize {
        match self {
            Solver::Wfa(s) => s.state(),
            Solver::Smin(s) => s.state(),
        }
    }

    fn serve(&mut self, costs: &[f64]) -> Result<f64, Error> {
        match self {
            Solver::Wfa(s) => s.serve(costs),
            Solver::Smin(s) => s.serve(costs),
        }
    }
}

/// `ceil((1 + eps) k)`, robust to the rounding of `(1 + eps) k`.
pub fn k_prime(k: usize, epsilon: f64) -> usize {
    let raw = (1.0 + epsilon) * k as f64;
    let rounded = libm::round(raw);
    if (raw - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        libm::ceil(raw) as usize
    }
}

/// Largest slice the algorithm can produce: `2(1+eps)k`, or `2k' - 1` when
/// `(1+eps)k` is fractional and the rounding up of `k'` adds a little.
pub fn load_bound(cfg: &RingConfig) -> f64 {
    let kp = k_prime(cfg.k, cfg.epsilon);
    (2.0 * (1.0 + cfg.epsilon) * cfg.k as f64).max((2 * kp - 1) as f64)
}

/// Interval placement for one shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftLayout {
    pub n: usize,
    pub k_prime: usize,
    /// Number of intervals `l'`.
    pub count: usize,
    pub shift: usize,
}

impl ShiftLayout {
    pub fn new(n: usize, k_prime: usize, shift: usize) -> Result<Self, Error> {
        if k_prime == 0 || n == 0 {
            return Err(Error::InvalidConfig("empty layout"));
        }
        if shift >= k_prime {
            return Err(Error::Parameter { name: "shift", value: shift as f64 });
        }
        Ok(ShiftLayout { n, k_prime, count: n.div_ceil(k_prime), shift })
    }

    /// First node of interval `i`, not reduced modulo `n`.
    pub fn interval_origin(&self, i: usize) -> usize {
        self.shift + i * self.k_prime
    }

    /// Node arc of interval `i` (`k' + 1` nodes).
    pub fn arc(&self, i: usize) -> Arc {
        Arc::new(self.interval_origin(i), self.k_prime + 1, self.n)
    }

    /// Ring edge of state `j` of interval `i`.
    pub fn edge(&self, i: usize, j: usize) -> usize {
        (self.interval_origin(i) + j) % self.n
    }

    /// Unit cost vector of a request on `edge` restricted to interval `i`,
    /// or `None` when the interval does not contain the edge.
    pub fn cost_vector(&self, i: usize, edge: usize) -> Option<Vec<f64>> {
        let mut hit = false;
        let costs: Vec<f64> = (0..self.k_prime)
            .map(|j| {
                let on = self.edge(i, j) == edge;
                hit |= on;
                if on {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        hit.then_some(costs)
    }

    /// Coloring induced by the cut states: slice `i` runs from just after
    /// the cut of `I_i` to the cut of `I_{i+1}` and lives on server `i`.
    ///
    /// The last interval may overlap the first; if its cut passes the first
    /// cut the wrap slice is empty and the last cut is treated as sitting on
    /// the first one.
    pub fn map_servers(&self, cuts: &[usize]) -> Coloring {
        let n = self.n;
        let first = self.interval_origin(0) + cuts[0];
        let mut colors = vec![0u32; n];
        for i in 0..self.count {
            let from = (self.interval_origin(i) + cuts[i]).min(first + n);
            let to = if i + 1 < self.count {
                (self.interval_origin(i + 1) + cuts[i + 1]).min(first + n)
            } else {
                first + n
            };
            for p in from + 1..=to {
                colors[p % n] = i as u32;
            }
        }
        Coloring::new(colors)
    }
}

/// Realized cost of one interval against its offline MTS optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalComparison {
    pub interval: IntervalId,
    pub realized: u64,
    pub mts_opt: f64,
}

#[derive(Debug, Clone)]
pub struct DynamicPartitioner {
    cfg: RingConfig,
    layout: ShiftLayout,
    kind: MtsKind,
    solvers: Vec<Solver>,
    starts: Vec<usize>,
    cuts: Vec<usize>,
    coloring: Coloring,
    ledger: CostLedger,
    step: u64,
    initial_migrations: u64,
    requests: Vec<EdgeId>,
    load_bound: f64,
}

impl DynamicPartitioner {
    pub fn new(
        cfg: RingConfig,
        initial: &Coloring,
        kind: MtsKind,
        keep_trace: bool,
    ) -> Result<Self, Error> {
        cfg.validate()?;
        if initial.len() != cfg.n {
            return Err(Error::LengthMismatch { expected: cfg.n, found: initial.len() });
        }
        initial.check_servers(cfg.ell)?;
        let kp = k_prime(cfg.k, cfg.epsilon);
        let shift = stream(cfg.seed, STREAM_SHIFT).random_range(0..kp);
        Self::with_shift(cfg, initial, kind, keep_trace, shift)
    }

    /// Same as [`DynamicPartitioner::new`] with a fixed shift.
    pub fn with_shift(
        cfg: RingConfig,
        initial: &Coloring,
        kind: MtsKind,
        keep_trace: bool,
        shift: usize,
    ) -> Result<Self, Error> {
        cfg.validate()?;
        let kp = k_prime(cfg.k, cfg.epsilon);
        let layout = ShiftLayout::new(cfg.n, kp, shift)?;
        if layout.count > cfg.ell {
            return Err(Error::InvalidConfig("more intervals than servers"));
        }
        let start = (kp - 1) / 2;
        let problem = MtsLineProblem::new(kp, start)?;
        let solvers = (0..layout.count)
            .map(|i| match kind {
                MtsKind::Wfa => Solver::Wfa(WorkFunctionSolver::new(problem)),
                MtsKind::Smin => {
                    Solver::Smin(Box::new(SminSolver::new(problem, interval_stream(cfg.seed, i as u32))))
                }
            })
            .collect();
        let cuts = vec![start; layout.count];
        let coloring = layout.map_servers(&cuts);
        let initial_migrations = migration_cost(initial, &coloring)?;
        let mut ledger = CostLedger::new(keep_trace);
        ledger.record(StepRecord {
            step: 0,
            edge: None,
            costs: CostBreakdown { moves: initial_migrations, ..Default::default() },
            max_load: coloring.max_load(),
            events: Vec::new(),
            clusters: None,
        });
        Ok(DynamicPartitioner {
            cfg,
            layout,
            kind,
            solvers,
            starts: vec![start; layout.count],
            cuts,
            coloring,
            ledger,
            step: 0,
            initial_migrations,
            requests: Vec::new(),
            load_bound: load_bound(&cfg),
        })
    }

    pub fn layout(&self) -> &ShiftLayout {
        &self.layout
    }

    pub fn mts_kind(&self) -> MtsKind {
        self.kind
    }

    /// Cut edge of every interval as a ring edge.
    pub fn cut_edges(&self) -> Vec<EdgeId> {
        self.cuts.iter().enumerate().map(|(i, &j)| EdgeId(self.layout.edge(i, j))).collect()
    }

    pub fn initial_migrations(&self) -> u64 {
        self.initial_migrations
    }

    pub fn map_servers(&self) -> Coloring {
        self.layout.map_servers(&self.cuts)
    }

    /// Per-interval attributed `(hit, move)` sums.
    pub fn proxy_costs(&self) -> IntervalCost {
        self.ledger.interval_sums()
    }

    /// Compares every interval's realized hit + move cost with the offline
    /// MTS optimum on its restricted request sequence.
    pub fn interval_comparisons(&self) -> Result<Vec<IntervalComparison>, Error> {
        (0..self.layout.count)
            .map(|i| {
                let tasks: Vec<Vec<f64>> = self
                    .requests
                    .iter()
                    .filter_map(|e| self.layout.cost_vector(i, e.0))
                    .collect();
                let problem = MtsLineProblem::new(self.layout.k_prime, self.starts[i])?;
                let id = IntervalId(i as u32);
                let c = self.ledger.per_interval().get(&id).copied().unwrap_or_default();
                Ok(IntervalComparison {
                    interval: id,
                    realized: c.hit + c.moves,
                    mts_opt: offline_opt(problem, &tasks)?,
                })
            })
            .collect()
    }

    fn violation(&self, kind: InvariantKind, value: f64, bound: f64) -> InvariantViolation {
        InvariantViolation { kind, step: self.step, value, bound }
    }
}

impl OnlinePartitioner for DynamicPartitioner {
    fn serve(&mut self, edge: EdgeId) -> Result<CostBreakdown, Error> {
        let e = self.cfg.edge(edge.0)?.0;
        self.step += 1;
        self.requests.push(edge);
        let mut costs = CostBreakdown { hit: self.coloring.serve_request(edge), ..Default::default() };
        for i in 0..self.layout.count {
            let Some(task) = self.layout.cost_vector(i, e) else { continue };
            let old = self.cuts[i];
            let hit = u64::from(task[old] > 0.0);
            self.solvers[i].serve(&task)?;
            let new = self.solvers[i].state();
            self.cuts[i] = new;
            self.ledger.charge_interval(IntervalId(i as u32), hit, old.abs_diff(new) as u64);
        }
        let next = self.layout.map_servers(&self.cuts);
        costs.moves = migration_cost(&self.coloring, &next)?;
        self.coloring = next;
        self.ledger.record(StepRecord {
            step: self.step,
            edge: Some(edge),
            costs,
            max_load: self.coloring.max_load(),
            events: Vec::new(),
            clusters: None,
        });
        Ok(costs)
    }

    fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let max_load = self.coloring.max_load() as f64;
        if max_load > self.load_bound {
            return Err(self.violation(InvariantKind::LoadBound, max_load, self.load_bound));
        }
        if let Some(&c) = self.cuts.iter().find(|&&c| c >= self.layout.k_prime) {
            return Err(self.violation(
                InvariantKind::CutInsideInterval,
                c as f64,
                self.layout.k_prime as f64,
            ));
        }
        let proxy = self.proxy_costs();
        let totals = self.ledger.totals();
        if totals.hit > proxy.hit {
            return Err(self.violation(InvariantKind::ProxyHit, totals.hit as f64, proxy.hit as f64));
        }
        let moves = totals.moves - self.initial_migrations;
        if moves > proxy.moves {
            return Err(self.violation(InvariantKind::ProxyMove, moves as f64, proxy.moves as f64));
        }
        Ok(())
    }

    fn name(&self) -> &'static str {
        "dynamic"
    }
}
