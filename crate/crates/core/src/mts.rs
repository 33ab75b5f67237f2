//! Metrical task systems on the line metric `d(i, j) = |i - j|`.
//!
//! A solver sits in one of `m` states. For every cost vector it picks a new
//! state and pays the distance travelled plus the cost of the new state.

use alloc::vec;
use alloc::vec::Vec;

use crate::coupling::couple;
use crate::error::Error;
use crate::rng::StreamRng;
use crate::smin::{grad_smin_c, ProbVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MtsLineProblem {
    pub m: usize,
    pub start: usize,
}

impl MtsLineProblem {
    pub fn new(m: usize, start: usize) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::Parameter { name: "m", value: 0.0 });
        }
        if start >= m {
            return Err(Error::EdgeOutOfRange { edge: start, limit: m });
        }
        Ok(MtsLineProblem { m, start })
    }
}

pub trait MtsSolver {
    fn state(&self) -> usize;

    /// Serves one cost vector; returns movement plus the new state's cost.
    fn serve(&mut self, costs: &[f64]) -> Result<f64, Error>;
}

/// In-place `b(s) = min_x a(x) + |x - s|`.
fn line_envelope(a: &mut [f64]) {
    for s in 1..a.len() {
        a[s] = a[s].min(a[s - 1] + 1.0);
    }
    for s in (0..a.len().saturating_sub(1)).rev() {
        a[s] = a[s].min(a[s + 1] + 1.0);
    }
}

fn check_len(m: usize, costs: &[f64]) -> Result<(), Error> {
    if costs.len() == m {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: m, found: costs.len() })
    }
}

/// Work function: `w_t(s) = T_t(s) + min_x (w_{t-1}(x) + |x - s|)`.
#[derive(Debug, Clone)]
pub struct WorkFunction {
    values: Vec<f64>,
}

impl WorkFunction {
    pub fn new(problem: MtsLineProblem) -> Self {
        let values = (0..problem.m).map(|s| s.abs_diff(problem.start) as f64).collect();
        WorkFunction { values }
    }

    pub fn update(&mut self, costs: &[f64]) {
        line_envelope(&mut self.values);
        for (w, c) in self.values.iter_mut().zip(costs) {
            *w += c;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Exact offline optimum by dynamic programming over the work function.
pub fn offline_opt<C: AsRef<[f64]>>(problem: MtsLineProblem, tasks: &[C]) -> Result<f64, Error> {
    let mut w = WorkFunction::new(problem);
    for t in tasks {
        check_len(problem.m, t.as_ref())?;
        w.update(t.as_ref());
    }
    Ok(w.min())
}

/// Deterministic work function algorithm.
///
/// Moves to `argmin_s w_t(s) + |current - s|`, ties toward the smaller state.
#[derive(Debug, Clone)]
pub struct WorkFunctionSolver {
    work: WorkFunction,
    state: usize,
}

impl WorkFunctionSolver {
    pub fn new(problem: MtsLineProblem) -> Self {
        WorkFunctionSolver { work: WorkFunction::new(problem), state: problem.start }
    }

    pub fn work(&self) -> &WorkFunction {
        &self.work
    }
}

impl MtsSolver for WorkFunctionSolver {
    fn state(&self) -> usize {
        self.state
    }

    fn serve(&mut self, costs: &[f64]) -> Result<f64, Error> {
        check_len(self.work.values.len(), costs)?;
        self.work.update(costs);
        let cur = self.state;
        let mut best = cur;
        let mut best_val = f64::INFINITY;
        for (s, w) in self.work.values.iter().enumerate() {
            let v = w + s.abs_diff(cur) as f64;
            if v < best_val {
                best_val = v;
                best = s;
            }
        }
        self.state = best;
        Ok(best.abs_diff(cur) as f64 + costs[best])
    }
}

/// Randomized solver: the state follows `grad smin_m(X)` of the cumulative
/// cost vector `X`, repositioned by maximal coupling after every task.
///
/// Until the first non-zero task the state is the problem's start.
#[derive(Debug, Clone)]
pub struct SminSolver<R = StreamRng> {
    cumulative: Vec<f64>,
    dist: ProbVector,
    state: usize,
    rng: R,
}

impl<R: rand::Rng> SminSolver<R> {
    pub fn new(problem: MtsLineProblem, rng: R) -> Self {
        SminSolver {
            cumulative: vec![0.0; problem.m],
            dist: ProbVector::point(problem.m, problem.start),
            state: problem.start,
            rng,
        }
    }

    /// The distribution the solver is currently sampled from.
    pub fn target(&self) -> Result<ProbVector, Error> {
        grad_smin_c(&self.cumulative, self.cumulative.len() as f64)
    }
}

impl<R: rand::Rng> MtsSolver for SminSolver<R> {
    fn state(&self) -> usize {
        self.state
    }

    fn serve(&mut self, costs: &[f64]) -> Result<f64, Error> {
        check_len(self.cumulative.len(), costs)?;
        if costs.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::Parameter { name: "cost", value: f64::NAN });
        }
        let cur = self.state;
        if costs.iter().any(|&c| c > 0.0) {
            for (x, c) in self.cumulative.iter_mut().zip(costs) {
                *x += c;
            }
            let fresh = self.target()?;
            self.state = couple(self.dist.as_slice(), fresh.as_slice(), cur, &mut self.rng)?;
            self.dist = fresh;
        }
        Ok(self.state.abs_diff(cur) as f64 + costs[self.state])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn unit(m: usize, at: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[at] = 1.0;
        v
    }

    #[test]
    fn single_state() {
        let p = MtsLineProblem::new(1, 0).unwrap();
        let mut wfa = WorkFunctionSolver::new(p);
        let mut smin = SminSolver::new(p, stream(0, 0));
        for _ in 0..5 {
            assert_eq!(wfa.serve(&[1.0]).unwrap(), 1.0);
            assert_eq!(smin.serve(&[1.0]).unwrap(), 1.0);
            assert_eq!((wfa.state(), smin.state()), (0, 0));
        }
    }

    #[test]
    fn wfa_two_states_repeated_requests() {
        let p = MtsLineProblem::new(2, 0).unwrap();
        let mut wfa = WorkFunctionSolver::new(p);
        let total: f64 = (0..3).map(|_| wfa.serve(&[1.0, 0.0]).unwrap()).sum();
        assert!((1.0..=3.0).contains(&total));
        assert_eq!(wfa.state(), 1);
        assert_eq!(offline_opt(p, &[unit(2, 0), unit(2, 0), unit(2, 0)]).unwrap(), 1.0);
    }

    #[test]
    fn zero_costs_never_move() {
        let p = MtsLineProblem::new(5, 2).unwrap();
        let mut wfa = WorkFunctionSolver::new(p);
        let mut smin = SminSolver::new(p, stream(1, 1));
        for _ in 0..20 {
            assert_eq!(wfa.serve(&[0.0; 5]).unwrap(), 0.0);
            assert_eq!(smin.serve(&[0.0; 5]).unwrap(), 0.0);
        }
        assert_eq!((wfa.state(), smin.state()), (2, 2));
    }

    #[test]
    fn offline_opt_examples() {
        let p = MtsLineProblem::new(3, 1).unwrap();
        assert_eq!(offline_opt::<Vec<f64>>(p, &[]).unwrap(), 0.0);
        let tasks: Vec<Vec<f64>> = (0..10).map(|i| unit(3, if i % 2 == 0 { 0 } else { 2 })).collect();
        assert_eq!(offline_opt(p, &tasks).unwrap(), 0.0);
        assert!(offline_opt(p, &[vec![1.0]]).is_err());
    }

    #[test]
    fn smin_solver_distribution() {
        let p = MtsLineProblem::new(4, 0).unwrap();
        let s = SminSolver::new(p, stream(0, 0));
        assert_eq!(s.target().unwrap(), ProbVector::uniform(4));
        let p = MtsLineProblem::new(2, 0).unwrap();
        let mut s = SminSolver::new(p, stream(0, 0));
        s.cumulative = vec![2.0 * 2f64.ln(), 0.0];
        let t = s.target().unwrap();
        assert!((t.as_slice()[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((t.as_slice()[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wfa_escapes_repeated_hits() {
        let p = MtsLineProblem::new(6, 3).unwrap();
        let mut wfa = WorkFunctionSolver::new(p);
        let mut moved = false;
        for _ in 0..20 {
            let before = wfa.state();
            wfa.serve(&unit(6, before)).unwrap();
            moved |= wfa.state() != before;
        }
        assert!(moved);
    }
}
