//! The hitting game on a line of `k` edges and the interval growing strategy.
//!
//! Nodes are `v_1 ..= v_{k+1}` and edge `e_i` joins `v_i` and `v_{i+1}`; all
//! public indices here are 1-based to match that picture. The strategy keeps
//! its position inside an interval of nodes around the central edge
//! `e_s, s = ceil(k / 2)`. Inside the interval the position is distributed as
//! `grad smin_c(x_I)` with `c = |I| - 1`, where `x_I` are the request counts of
//! the interval's edges. Once every edge of the interval has been requested
//! at least `(1 - delta_bar) * |I|` times the interval doubles, capped at the
//! whole line.

use alloc::vec;
use alloc::vec::Vec;

use crate::coupling::couple;
use crate::error::Error;
use crate::mts::{MtsLineProblem, MtsSolver, WorkFunctionSolver};
use crate::rng::StreamRng;
use crate::smin::{grad_smin_c, ProbVector};

/// Smallest admissible threshold parameter.
pub const MIN_DELTA_BAR: f64 = 14.0 / 15.0;

/// `max(2 / (2 + eps), 14/15)`.
pub fn delta_bar_for(epsilon: f64) -> f64 {
    (2.0 / (2.0 + epsilon)).max(MIN_DELTA_BAR)
}

/// Starting edge `ceil(k / 2)` (at least 1).
pub fn start_edge(k: usize) -> usize {
    k.div_ceil(2).max(1)
}

/// Bounds of the interval after one growth step.
///
/// The node count doubles; if that would exceed `cap` nodes the interval is
/// extended to exactly `cap` nodes, the odd node going to the left. Returns
/// `(extend_left, extend_right)`.
pub fn growth_extension(len: usize, cap: usize) -> (usize, usize) {
    let target = (2 * len).min(cap).max(len);
    let ext = target - len;
    let left = ext.div_ceil(2);
    (left, ext - left)
}

/// A strategy for the hitting game, used by the lower-bound adversary.
pub trait LineStrategy {
    /// Current edge, 1-based.
    fn position(&self) -> usize;

    /// Serves a request on edge `e` and returns hit plus moving cost.
    fn request(&mut self, e: usize) -> Result<u64, Error>;

    fn is_randomized(&self) -> bool {
        false
    }
}

/// Never leaves its starting edge.
#[derive(Debug, Clone)]
pub struct StayPut {
    position: usize,
}

impl StayPut {
    pub fn new(k: usize) -> Self {
        StayPut { position: start_edge(k) }
    }
}

impl LineStrategy for StayPut {
    fn position(&self) -> usize {
        self.position
    }

    fn request(&mut self, e: usize) -> Result<u64, Error> {
        Ok(u64::from(e == self.position))
    }
}

/// The deterministic work function solver playing the hitting game.
#[derive(Debug, Clone)]
pub struct WfaLine {
    solver: WorkFunctionSolver,
    k: usize,
}

impl WfaLine {
    pub fn new(k: usize) -> Result<Self, Error> {
        let problem = MtsLineProblem::new(k, start_edge(k) - 1)?;
        Ok(WfaLine { solver: WorkFunctionSolver::new(problem), k })
    }
}

impl LineStrategy for WfaLine {
    fn position(&self) -> usize {
        self.solver.state() + 1
    }

    fn request(&mut self, e: usize) -> Result<u64, Error> {
        if e == 0 || e > self.k {
            return Err(Error::EdgeOutOfRange { edge: e, limit: self.k });
        }
        let mut costs = vec![0.0; self.k];
        costs[e - 1] = 1.0;
        let cost = self.solver.serve(&costs)?;
        Ok(libm::round(cost) as u64)
    }
}

/// Outcome of a single request.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HitStep {
    pub hit: u64,
    /// Distance travelled, including relocations after growth.
    pub moved: u64,
    pub growths: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowOutcome {
    Grown { left: usize, right: usize, moved: u64 },
    /// The interval already spans the whole line.
    Final,
}

/// State of the interval growing algorithm.
#[derive(Debug, Clone)]
pub struct HittingGame<R = StreamRng> {
    k: usize,
    start: usize,
    delta_bar: f64,
    counts: Vec<u64>,
    left: usize,
    right: usize,
    phase: u32,
    position: usize,
    dist: ProbVector,
    rng: R,
    hit_cost: u64,
    move_cost: u64,
}

impl<R: rand::Rng> HittingGame<R> {
    pub fn new(k: usize, delta_bar: f64, rng: R) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::Parameter { name: "k", value: 0.0 });
        }
        if !(MIN_DELTA_BAR..1.0).contains(&delta_bar) {
            return Err(Error::Parameter { name: "delta_bar", value: delta_bar });
        }
        let start = start_edge(k);
        Ok(HittingGame {
            k,
            start,
            delta_bar,
            counts: vec![0; k],
            left: start,
            right: start + 1,
            phase: 0,
            position: start,
            dist: ProbVector::point(1, 0),
            rng,
            hit_cost: 0,
            move_cost: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Interval as a 1-based node range `[left, right]`.
    pub fn bounds(&self) -> (usize, usize) {
        (self.left, self.right)
    }

    /// Number of nodes `|I|`.
    pub fn len(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_initial(&self) -> bool {
        self.len() == 2 && self.phase == 0
    }

    pub fn is_final(&self) -> bool {
        self.len() == self.k + 1
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn distribution(&self) -> &ProbVector {
        &self.dist
    }

    /// Request count of every edge, index `e - 1`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn hit_cost(&self) -> u64 {
        self.hit_cost
    }

    pub fn move_cost(&self) -> u64 {
        self.move_cost
    }

    pub fn total_cost(&self) -> u64 {
        self.hit_cost + self.move_cost
    }

    /// `min(I)`: the smallest request count over the interval's edges.
    pub fn interval_min(&self) -> u64 {
        self.counts[self.left - 1..self.right - 1].iter().copied().min().unwrap_or(0)
    }

    fn interval_counts(&self) -> Vec<f64> {
        self.counts[self.left - 1..self.right - 1].iter().map(|&c| c as f64).collect()
    }

    fn should_grow(&self) -> bool {
        !self.is_final()
            && self.interval_min() as f64 >= (1.0 - self.delta_bar) * self.len() as f64
    }

    fn resample(&mut self, old: &ProbVector) -> Result<u64, Error> {
        let fresh = grad_smin_c(&self.interval_counts(), (self.len() - 1) as f64)?;
        let from = self.position - self.left;
        let to = couple(old.as_slice(), fresh.as_slice(), from, &mut self.rng)?;
        self.dist = fresh;
        self.position = self.left + to;
        Ok(from.abs_diff(to) as u64)
    }

    pub fn request(&mut self, e: usize) -> Result<HitStep, Error> {
        if e == 0 || e > self.k {
            return Err(Error::EdgeOutOfRange { edge: e, limit: self.k });
        }
        let mut step = HitStep::default();
        self.counts[e - 1] += 1;
        if (self.left..self.right).contains(&e) {
            step.hit = u64::from(self.position == e);
            let old = self.dist.clone();
            step.moved += self.resample(&old)?;
        }
        while self.should_grow() {
            if let GrowOutcome::Grown { moved, .. } = self.grow()? {
                step.moved += moved;
                step.growths += 1;
            }
        }
        self.hit_cost += step.hit;
        self.move_cost += step.moved;
        Ok(step)
    }

    /// Grows the interval once and relocates the position inside it.
    ///
    /// Move cost is charged to the caller through the returned outcome.
    pub fn grow(&mut self) -> Result<GrowOutcome, Error> {
        if self.is_final() {
            return Ok(GrowOutcome::Final);
        }
        let (ext_left, ext_right) = growth_extension(self.len(), self.k + 1);
        let mut left = self.left as isize - ext_left as isize;
        let mut right = self.right + ext_right;
        if left < 1 {
            right += (1 - left) as usize;
            left = 1;
        }
        let mut left = left as usize;
        if right > self.k + 1 {
            left -= right - (self.k + 1);
            right = self.k + 1;
        }
        let old = self.dist.embed(self.left - left, right - left);
        self.left = left;
        self.right = right;
        self.phase += 1;
        let moved = self.resample(&old)?;
        Ok(GrowOutcome::Grown { left, right, moved })
    }
}

impl<R: rand::Rng> LineStrategy for HittingGame<R> {
    fn position(&self) -> usize {
        self.position
    }

    fn request(&mut self, e: usize) -> Result<u64, Error> {
        let step = HittingGame::request(self, e)?;
        Ok(step.hit + step.moved)
    }

    fn is_randomized(&self) -> bool {
        true
    }
}

/// Cost of the best static strategy: pick edge `p` once, pay `|s - p|`,
/// then pay every request on `p`. `counts[e - 1]` holds the requests on `e_e`.
pub fn static_opt(s: usize, counts: &[u64]) -> u64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i + 1).abs_diff(s) as u64 + c)
        .min()
        .unwrap_or(0)
}
