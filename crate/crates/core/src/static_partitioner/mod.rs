//! Static-model algorithm.
//!
//! Every initial cut edge gets an interval of two nodes running its own
//! hitting game on the ring. The cut edges of the active intervals cut the
//! ring into slices, slices are grouped into clusters by their initial colors
//! and clusters are scheduled on servers with a bounded overload.

mod clustering;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use clustering::{
    classify, merge_cost, mono_cost, rebalance, Assignment, ClusterId, Placement, SliceRef,
};

use crate::coupling::couple;
use crate::error::{Error, InvariantKind, InvariantViolation};
use crate::hitting::{delta_bar_for, growth_extension};
use crate::ring::{
    migration_cost, Arc, ClusterStats, Coloring, CostBreakdown, CostLedger, EdgeId,
    IntervalEvent, IntervalEventKind, IntervalId, RingConfig, StepRecord,
};
use crate::rng::{interval_stream, StreamRng};
use crate::smin::{grad_smin_c, ProbVector};
use crate::OnlinePartitioner;

/// Derived parameters and the structural bounds checked after every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticParams {
    /// `min(eps / 2, 1)`.
    pub eps_prime: f64,
    /// `max(2 / (2 + eps'), 14/15)`.
    pub delta_bar: f64,
    /// `(3 + 2 eps') k`.
    pub load_bound: f64,
    /// `2 k`.
    pub color_cluster_bound: f64,
    /// `(3 + 2 (1 - delta_bar) / delta_bar) k`.
    pub singleton_bound: f64,
    /// `6 + 8 ceil(log2(k + 1))`.
    pub multiplicity_bound: usize,
    /// Allowed ratio of monochromatic cost to move plus merge cost.
    pub mono_ratio: f64,
}

impl StaticParams {
    pub fn new(k: usize, epsilon: f64) -> Self {
        let eps_prime = (epsilon / 2.0).min(1.0);
        let delta_bar = delta_bar_for(eps_prime);
        let kf = k as f64;
        StaticParams {
            eps_prime,
            delta_bar,
            load_bound: (3.0 + 2.0 * eps_prime) * kf,
            color_cluster_bound: 2.0 * kf,
            singleton_bound: (3.0 + 2.0 * (1.0 - delta_bar) / delta_bar) * kf,
            multiplicity_bound: 6 + 8 * ceil_log2(k + 1),
            mono_ratio: 8.0,
        }
    }
}

fn ceil_log2(m: usize) -> usize {
    (usize::BITS - (m - 1).leading_zeros()) as usize
}

/// Whether strictly more than `delta * |arc|` processes of the arc share one
/// initial color.
pub fn is_monochromatic(arc: &Arc, initial: &Coloring, delta: f64) -> bool {
    match top_color(arc, initial) {
        // The margin keeps `14 > 14/15 * 15` false despite rounding.
        Some((_, count)) => count as f64 > delta * arc.len as f64 + 1e-9,
        None => false,
    }
}

/// Most frequent initial color of the arc and its count, lowest color on ties.
fn top_color(arc: &Arc, initial: &Coloring) -> Option<(u32, usize)> {
    let n = initial.len();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for j in 0..arc.len.min(n) {
        *counts.entry(initial.color(arc.node_at(j, n))).or_default() += 1;
    }
    counts.into_iter().max_by_key(|&(c, count)| (count, core::cmp::Reverse(c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalStatus {
    Active,
    /// Deactivated because it became monochromatic right after growing.
    Monochromatic,
    /// Deactivated because a grown interval covered it.
    Dominated,
}

/// An interval of the slicing procedure.
#[derive(Debug, Clone)]
pub struct RingInterval {
    id: IntervalId,
    arc: Arc,
    center: usize,
    core: Option<Arc>,
    rank: u32,
    status: IntervalStatus,
    /// Offset of the cut edge inside the arc.
    cut: Option<usize>,
    dist: ProbVector,
    rng: StreamRng,
}

impl RingInterval {
    pub fn id(&self) -> IntervalId {
        self.id
    }

    pub fn arc(&self) -> Arc {
        self.arc
    }

    /// The initial cut edge the interval was created around.
    pub fn center(&self) -> usize {
        self.center
    }

    /// Extent before the most recent growth; `None` for initial intervals.
    pub fn core(&self) -> Option<Arc> {
        self.core
    }

    /// Growth count plus one.
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn status(&self) -> IntervalStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status == IntervalStatus::Active
    }

    /// Current cut edge as a ring edge.
    pub fn cut_edge(&self, n: usize) -> Option<usize> {
        self.cut.map(|j| self.arc.edge_at(j, n))
    }

    pub fn distribution(&self) -> &ProbVector {
        &self.dist
    }
}

/// A run of consecutive processes between two cut positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slice {
    pub id: u64,
    pub start: usize,
    pub len: usize,
    pub cluster: ClusterId,
}

impl Slice {
    pub fn arc(&self) -> Arc {
        Arc { start: self.start, len: self.len }
    }

    fn end(&self, n: usize) -> usize {
        (self.start + self.len - 1) % n
    }
}

pub struct StaticPartitioner {
    cfg: RingConfig,
    params: StaticParams,
    cap: usize,
    initial: Coloring,
    counts: Vec<u64>,
    intervals: Vec<RingInterval>,
    /// Number of active intervals whose cut sits on each edge.
    cut_mult: BTreeMap<usize, u32>,
    /// Sorted by start.
    slices: Vec<Slice>,
    servers: BTreeMap<ClusterId, u32>,
    next_slice: u64,
    next_singleton: u64,
    /// Number of intervals, at their current extent, covering each process.
    coverage: Vec<usize>,
    coloring: Coloring,
    ledger: CostLedger,
    step: u64,
    violation: Option<InvariantViolation>,
}

impl StaticPartitioner {
    pub fn new(cfg: RingConfig, initial: &Coloring, keep_trace: bool) -> Result<Self, Error> {
        cfg.validate()?;
        if initial.len() != cfg.n {
            return Err(Error::LengthMismatch { expected: cfg.n, found: initial.len() });
        }
        initial.check_capacity(cfg.ell, cfg.k)?;
        let n = cfg.n;
        let cuts: Vec<usize> = (0..n).filter(|&e| initial.serve_request(EdgeId(e)) == 1).collect();
        let intervals: Vec<RingInterval> = cuts
            .iter()
            .enumerate()
            .map(|(i, &e)| RingInterval {
                id: IntervalId(i as u32),
                arc: Arc::new(e, 2, n),
                center: e,
                core: None,
                rank: 1,
                status: IntervalStatus::Active,
                cut: Some(0),
                dist: ProbVector::point(1, 0),
                rng: interval_stream(cfg.seed, i as u32),
            })
            .collect();
        let mut coverage = vec![0usize; n];
        for iv in &intervals {
            for j in 0..iv.arc.len {
                coverage[iv.arc.node_at(j, n)] += 1;
            }
        }
        let cut_mult = cuts.iter().map(|&e| (e, 1)).collect();
        let mut p = StaticPartitioner {
            cfg,
            params: StaticParams::new(cfg.k, cfg.epsilon),
            cap: (cfg.k + 1).min(n),
            initial: initial.clone(),
            counts: vec![0; n],
            intervals,
            cut_mult,
            slices: Vec::new(),
            servers: (0..cfg.ell as u32).map(|c| (ClusterId::Color(c), c)).collect(),
            next_slice: 0,
            next_singleton: 0,
            coverage,
            coloring: initial.clone(),
            ledger: CostLedger::new(keep_trace),
            step: 0,
            violation: None,
        };
        for (start, len) in p.slice_bounds() {
            let cluster = ClusterId::Color(initial.color(start));
            let id = p.fresh_slice_id();
            p.slices.push(Slice { id, start, len, cluster });
        }
        p.slices.sort_by_key(|s| s.start);
        p.coloring = p.physical();
        let record = StepRecord {
            step: 0,
            edge: None,
            costs: CostBreakdown::default(),
            max_load: p.coloring.max_load(),
            events: Vec::new(),
            clusters: Some(p.cluster_stats()),
        };
        p.ledger.record(record);
        Ok(p)
    }

    pub fn params(&self) -> &StaticParams {
        &self.params
    }

    pub fn initial(&self) -> &Coloring {
        &self.initial
    }

    /// Request count of every edge.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn intervals(&self) -> &[RingInterval] {
        &self.intervals
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn server_of(&self, cluster: ClusterId) -> Option<u32> {
        self.servers.get(&cluster).copied()
    }

    /// Distinct cut positions of the active intervals, in ring order.
    pub fn cut_positions(&self) -> Vec<usize> {
        self.cut_mult.keys().copied().collect()
    }

    /// Size of every non-empty cluster.
    pub fn cluster_sizes(&self) -> BTreeMap<ClusterId, usize> {
        let mut sizes = BTreeMap::new();
        for s in &self.slices {
            *sizes.entry(s.cluster).or_default() += s.len;
        }
        sizes
    }

    pub fn cluster_stats(&self) -> ClusterStats {
        let mut stats = ClusterStats {
            max_multiplicity: self.coverage.iter().copied().max().unwrap_or(0),
            ..Default::default()
        };
        for (id, size) in self.cluster_sizes() {
            match id {
                ClusterId::Color(_) => stats.max_color_cluster = stats.max_color_cluster.max(size),
                ClusterId::Singleton(_) => stats.max_singleton = stats.max_singleton.max(size),
            }
        }
        stats
    }

    fn fresh_slice_id(&mut self) -> u64 {
        self.next_slice += 1;
        self.next_slice - 1
    }

    fn violation(&self, kind: InvariantKind, value: f64, bound: f64) -> InvariantViolation {
        InvariantViolation { kind, step: self.step, value, bound }
    }

    fn note(&mut self, v: InvariantViolation) {
        if self.violation.is_none() {
            self.violation = Some(v);
        }
    }

    /// `(start, len)` of every slice implied by the cut positions.
    fn slice_bounds(&self) -> Vec<(usize, usize)> {
        let n = self.cfg.n;
        let pos = self.cut_positions();
        match pos.len() {
            0 => vec![(0, n)],
            1 => vec![((pos[0] + 1) % n, n)],
            m => (0..m)
                .map(|i| {
                    let len = if i + 1 < m { pos[i + 1] - pos[i] } else { n - pos[i] + pos[0] };
                    ((pos[i] + 1) % n, len)
                })
                .collect(),
        }
    }

    fn physical(&self) -> Coloring {
        let n = self.cfg.n;
        let mut colors = vec![0u32; n];
        for s in &self.slices {
            let server = self.servers[&s.cluster];
            for j in 0..s.len {
                colors[s.arc().node_at(j, n)] = server;
            }
        }
        Coloring::new(colors)
    }

    /// Runs the clustering rule on a changed slice; returns its cluster and
    /// the monochromatic cost.
    fn assign(&mut self, arc: &Arc, prev: ClusterId) -> (ClusterId, u64) {
        let rule = classify(top_color(arc, &self.initial), arc.len, prev);
        let cost = mono_cost(rule, arc.len, prev);
        match rule {
            Assignment::Color(c) => (ClusterId::Color(c), cost),
            Assignment::Singleton => {
                let id = ClusterId::Singleton(self.next_singleton);
                self.next_singleton += 1;
                self.servers.insert(id, self.servers[&prev]);
                (id, 0)
            }
        }
    }

    /// Rebuilds the slices after the set of cut positions changed by a cut
    /// movement. Unchanged slices keep their cluster; every other slice takes
    /// the cluster of the old slice it overlaps most and then runs the
    /// clustering rule. Outside the region the cut swept over, a changed
    /// slice lies in a single old slice, so at most the swept processes
    /// change server.
    fn reslice(&mut self, costs: &mut CostBreakdown) {
        let n = self.cfg.n;
        let old = core::mem::take(&mut self.slices);
        let mut fresh = Vec::new();
        for (start, len) in self.slice_bounds() {
            if let Some(s) = old.iter().find(|s| s.start == start && s.len == len) {
                fresh.push(*s);
                continue;
            }
            let arc = Arc { start, len };
            let pred = old
                .iter()
                .max_by_key(|s| (overlap(&s.arc(), &arc, n), core::cmp::Reverse(s.id)))
                .copied()
                .expect("a ring has at least one slice");
            let (cluster, mono) = self.assign(&arc, pred.cluster);
            costs.mono += mono;
            let id = self.fresh_slice_id();
            fresh.push(Slice { id, start, len, cluster });
        }
        fresh.sort_by_key(|s| s.start);
        self.slices = fresh;
    }

    /// Merges the two slices around cut position `a`, which just lost its
    /// last cut.
    fn merge_at(&mut self, a: usize, costs: &mut CostBreakdown) {
        let n = self.cfg.n;
        if self.slices.len() < 2 {
            return;
        }
        let li = self.slices.iter().position(|s| s.end(n) == a).expect("slice ends at a cut");
        let ri = self.slices.iter().position(|s| s.start == (a + 1) % n).expect("slice after a cut");
        let (l, r) = (self.slices[li], self.slices[ri]);
        let as_ref = |s: &Slice| SliceRef { id: s.id, len: s.len, cluster: s.cluster };
        let (cost, l_smaller) = merge_cost(as_ref(&l), as_ref(&r));
        costs.merge += cost;
        let larger = if l_smaller { r } else { l };
        let arc = Arc { start: l.start, len: l.len + r.len };
        let (cluster, mono) = self.assign(&arc, larger.cluster);
        costs.mono += mono;
        let id = self.fresh_slice_id();
        self.slices.retain(|s| s.id != l.id && s.id != r.id);
        self.slices.push(Slice { id, start: arc.start, len: arc.len, cluster });
        self.slices.sort_by_key(|s| s.start);
    }

    fn add_cut(&mut self, e: usize) -> bool {
        let m = self.cut_mult.entry(e).or_insert(0);
        *m += 1;
        *m == 1
    }

    fn remove_cut(&mut self, e: usize) -> bool {
        let m = self.cut_mult.get_mut(&e).expect("cut is registered");
        *m -= 1;
        if *m == 0 {
            self.cut_mult.remove(&e);
            true
        } else {
            false
        }
    }

    /// Resamples the cut of interval `i` from `grad smin_c(x_I)`, `c = |I| - 1`,
    /// coupled with `old`. Returns the distance moved.
    fn resample(&mut self, i: usize, old: &ProbVector, costs: &mut CostBreakdown) -> Result<u64, Error> {
        let n = self.cfg.n;
        let arc = self.intervals[i].arc;
        let x: Vec<f64> =
            (0..arc.edge_count()).map(|j| self.counts[arc.edge_at(j, n)] as f64).collect();
        let fresh = grad_smin_c(&x, (arc.len - 1) as f64)?;
        let iv = &mut self.intervals[i];
        let from = iv.cut.expect("active interval has a cut");
        let to = couple(old.as_slice(), fresh.as_slice(), from, &mut iv.rng)?;
        iv.dist = fresh;
        iv.cut = Some(to);
        let moved = from.abs_diff(to) as u64;
        if moved > 0 {
            let removed = self.remove_cut(arc.edge_at(from, n));
            let added = self.add_cut(arc.edge_at(to, n));
            if removed || added {
                self.reslice(costs);
            }
        }
        costs.moves += moved;
        Ok(moved)
    }

    fn deactivate(&mut self, i: usize, status: IntervalStatus, costs: &mut CostBreakdown) {
        let n = self.cfg.n;
        let e = self.intervals[i].cut_edge(n).expect("active interval has a cut");
        self.intervals[i].status = status;
        self.intervals[i].cut = None;
        if self.remove_cut(e) {
            self.merge_at(e, costs);
        }
    }

    fn should_grow(&self, iv: &RingInterval) -> bool {
        let n = self.cfg.n;
        if !iv.is_active() || iv.arc.len >= self.cap {
            return false;
        }
        let min = (0..iv.arc.edge_count()).map(|j| self.counts[iv.arc.edge_at(j, n)]).min();
        min.unwrap_or(0) as f64 >= (1.0 - self.params.delta_bar) * iv.arc.len as f64
    }

    fn grow(
        &mut self,
        i: usize,
        costs: &mut CostBreakdown,
        events: &mut Vec<IntervalEvent>,
    ) -> Result<(), Error> {
        let n = self.cfg.n;
        let old_arc = self.intervals[i].arc;
        let (left, right) = growth_extension(old_arc.len, self.cap);
        let arc = Arc::new(old_arc.start + n - left, old_arc.len + left + right, n);
        for j in (0..left).chain(left + old_arc.len..arc.len) {
            self.coverage[arc.node_at(j, n)] += 1;
        }
        let id = self.intervals[i].id;
        let old = {
            let iv = &mut self.intervals[i];
            iv.arc = arc;
            iv.core = Some(old_arc);
            iv.rank += 1;
            iv.cut = iv.cut.map(|j| j + left);
            iv.dist.embed(left, arc.edge_count())
        };
        events.push(IntervalEvent { interval: id, kind: IntervalEventKind::Grown { len: arc.len } });
        if is_monochromatic(&arc, &self.initial, self.params.delta_bar) {
            self.deactivate(i, IntervalStatus::Monochromatic, costs);
            events.push(IntervalEvent { interval: id, kind: IntervalEventKind::MonoDeactivated });
            return Ok(());
        }
        for j in 0..self.intervals.len() {
            let other = &self.intervals[j];
            if j == i || !other.is_active() || !arc.contains_arc(&other.arc, n) {
                continue;
            }
            let other_id = other.id;
            let cut = other.cut_edge(n).expect("active interval has a cut");
            if !arc.contains_edge(cut, n) {
                let v = self.violation(
                    InvariantKind::DominatedCutContainment,
                    cut as f64,
                    arc.start as f64,
                );
                self.note(v);
            }
            self.deactivate(j, IntervalStatus::Dominated, costs);
            events.push(IntervalEvent {
                interval: other_id,
                kind: IntervalEventKind::Dominated { by: id },
            });
        }
        let moved = self.resample(i, &old, costs)?;
        self.ledger.charge_interval(id, 0, moved);
        Ok(())
    }

    fn rebalance(&mut self, costs: &mut CostBreakdown) -> Result<(), Error> {
        let sizes = self.cluster_sizes();
        self.servers.retain(|id, _| matches!(id, ClusterId::Color(_)) || sizes.contains_key(id));
        let mut placements: BTreeMap<ClusterId, Placement> = self
            .servers
            .iter()
            .map(|(&id, &server)| (id, Placement { size: sizes.get(&id).copied().unwrap_or(0), server }))
            .collect();
        costs.bal += rebalance(&mut placements, self.cfg.ell, self.cfg.k, self.params.eps_prime, self.step)?;
        for (id, p) in placements {
            self.servers.insert(id, p.server);
        }
        Ok(())
    }
}

/// Number of processes two arcs share.
fn overlap(a: &Arc, b: &Arc, n: usize) -> usize {
    let o = (b.start + n - a.start) % n;
    let direct = a.len.min(o + b.len).saturating_sub(o);
    let wrapped = a.len.min((o + b.len).saturating_sub(n));
    direct + wrapped
}

impl OnlinePartitioner for StaticPartitioner {
    fn serve(&mut self, edge: EdgeId) -> Result<CostBreakdown, Error> {
        let n = self.cfg.n;
        let e = self.cfg.edge(edge.0)?.0;
        self.step += 1;
        let mut costs = CostBreakdown { hit: self.coloring.serve_request(edge), ..Default::default() };
        let mut events = Vec::new();
        self.counts[e] += 1;
        for i in 0..self.intervals.len() {
            let iv = &self.intervals[i];
            if !iv.is_active() || !iv.arc.contains_edge(e, n) {
                continue;
            }
            let hit = u64::from(iv.cut_edge(n) == Some(e));
            let old = iv.dist.clone();
            let id = iv.id;
            let moved = self.resample(i, &old, &mut costs)?;
            self.ledger.charge_interval(id, hit, moved);
        }
        while let Some(i) = self.intervals.iter().position(|iv| self.should_grow(iv)) {
            self.grow(i, &mut costs, &mut events)?;
        }
        self.rebalance(&mut costs)?;
        let next = self.physical();
        let physical = migration_cost(&self.coloring, &next)?;
        if physical > costs.migrations() {
            let v = self.violation(
                InvariantKind::PhysicalMigrations,
                physical as f64,
                costs.migrations() as f64,
            );
            self.note(v);
        }
        self.coloring = next;
        let record = StepRecord {
            step: self.step,
            edge: Some(edge),
            costs,
            max_load: self.coloring.max_load(),
            events,
            clusters: Some(self.cluster_stats()),
        };
        self.ledger.record(record);
        Ok(costs)
    }

    fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn check_invariants(&self) -> Result<(), InvariantViolation> {
        if let Some(v) = &self.violation {
            return Err(v.clone());
        }
        let n = self.cfg.n;
        let p = &self.params;
        let max_load = self.coloring.max_load() as f64;
        if max_load > p.load_bound {
            return Err(self.violation(InvariantKind::LoadBound, max_load, p.load_bound));
        }
        let stats = self.cluster_stats();
        if stats.max_color_cluster as f64 > p.color_cluster_bound {
            return Err(self.violation(
                InvariantKind::ColorClusterSize,
                stats.max_color_cluster as f64,
                p.color_cluster_bound,
            ));
        }
        if stats.max_singleton as f64 > p.singleton_bound {
            return Err(self.violation(
                InvariantKind::SingletonClusterSize,
                stats.max_singleton as f64,
                p.singleton_bound,
            ));
        }
        if stats.max_multiplicity > p.multiplicity_bound {
            return Err(self.violation(
                InvariantKind::IntervalMultiplicity,
                stats.max_multiplicity as f64,
                p.multiplicity_bound as f64,
            ));
        }
        let total: usize = self.slices.iter().map(|s| s.len).sum();
        let contiguous = self
            .slices
            .iter()
            .zip(self.slices.iter().cycle().skip(1))
            .all(|(a, b)| self.slices.len() == 1 || (a.start + a.len) % n == b.start);
        let bounded = self.cut_mult.is_empty()
            || self.slices.iter().all(|s| self.cut_mult.contains_key(&s.end(n)));
        if total != n || !contiguous || !bounded {
            return Err(self.violation(InvariantKind::SlicePartition, total as f64, n as f64));
        }
        let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
        for iv in &self.intervals {
            let ok = match (iv.is_active(), iv.cut_edge(n)) {
                (true, Some(c)) => {
                    *mult.entry(c).or_default() += 1;
                    iv.arc.contains_edge(c, n)
                }
                (false, None) => true,
                _ => false,
            };
            if !ok {
                return Err(self.violation(
                    InvariantKind::CutInsideInterval,
                    iv.id.0 as f64,
                    iv.arc.len as f64,
                ));
            }
        }
        if mult != self.cut_mult {
            return Err(self.violation(InvariantKind::CutInsideInterval, 0.0, 0.0));
        }
        let totals = self.ledger.totals();
        let mono_bound = p.mono_ratio * (totals.moves + totals.merge) as f64;
        if totals.mono as f64 > mono_bound {
            return Err(self.violation(InvariantKind::MonochromaticCost, totals.mono as f64, mono_bound));
        }
        Ok(())
    }

    fn name(&self) -> &'static str {
        "static"
    }
}
