//! Offline replay of the structural guarantees recorded in a trace.

use std::collections::BTreeMap;
use std::fmt;

use ringpart_core::dynamic_partitioner::load_bound;
use ringpart_core::static_partitioner::StaticParams;
use ringpart_core::CostBreakdown;

use crate::error::SimError;
use crate::trace::{Trace, TraceSummary};

const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    LoadBound,
    ColorCluster,
    SingletonCluster,
    Multiplicity,
    MonochromaticCost,
    Ledger,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::LoadBound => "load_bound",
            Category::ColorCluster => "color_cluster",
            Category::SingletonCluster => "singleton_cluster",
            Category::Multiplicity => "multiplicity",
            Category::MonochromaticCost => "monochromatic_cost",
            Category::Ledger => "ledger",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub step: u64,
    pub detail: String,
}

/// First violation per category; empty when the trace is clean.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub findings: BTreeMap<Category, Finding>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    fn note(&mut self, cat: Category, step: u64, detail: String) {
        self.findings.entry(cat).or_insert(Finding { step, detail });
    }

    fn bound(&mut self, cat: Category, step: u64, value: f64, bound: f64) {
        if value > bound + SLACK {
            self.note(cat, step, format!("{value} > {bound}"));
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cat, v) in &self.findings {
            writeln!(f, "{}: step {}: {}", cat.as_str(), v.step, v.detail)?;
        }
        Ok(())
    }
}

pub fn verify_trace(trace: &Trace) -> Result<Report, SimError> {
    let h = &trace.header;
    let cfg = h.config()?;
    if h.initial.len() != h.n {
        return Err(SimError::Spec(format!("initial placement has {} entries, n = {}", h.initial.len(), h.n)));
    }
    let is_static = match h.algo.as_str() {
        "static" => true,
        "dynamic" => false,
        other => return Err(SimError::Spec(format!("unknown algorithm `{other}`"))),
    };
    let params = StaticParams::new(h.k, h.epsilon);
    let load = if is_static { params.load_bound } else { load_bound(&cfg) };

    let mut r = Report::default();
    let mut totals = CostBreakdown::default();
    for (i, s) in trace.steps.iter().enumerate() {
        let step = s.step;
        if step != i as u64 {
            r.note(Category::Ledger, step, format!("expected step {i}"));
        }
        if s.algorithm != h.algo {
            r.note(Category::Ledger, step, format!("algorithm `{}` in a `{}` trace", s.algorithm, h.algo));
        }
        match s.edge {
            None if step != 0 => r.note(Category::Ledger, step, "missing edge".into()),
            Some(_) if step == 0 => r.note(Category::Ledger, step, "initial step carries an edge".into()),
            Some(e) if e >= h.n => r.note(Category::Ledger, step, format!("edge {e} out of range")),
            _ => {}
        }
        if s.cost_hit > 1 {
            r.note(Category::Ledger, step, format!("hit cost {} for one request", s.cost_hit));
        }
        totals.add(&s.costs());

        r.bound(Category::LoadBound, step, s.max_load as f64, load);
        if is_static {
            if let Some(v) = s.max_color_cluster {
                r.bound(Category::ColorCluster, step, v as f64, params.color_cluster_bound);
            }
            if let Some(v) = s.max_singleton {
                r.bound(Category::SingletonCluster, step, v as f64, params.singleton_bound);
            }
            if let Some(v) = s.max_multiplicity {
                r.bound(Category::Multiplicity, step, v as f64, params.multiplicity_bound as f64);
            }
            let mono_bound = params.mono_ratio * (totals.moves + totals.merge) as f64;
            r.bound(Category::MonochromaticCost, step, totals.mono as f64, mono_bound);
        }
    }
    if trace.steps.first().is_none_or(|s| s.edge.is_some()) {
        r.note(Category::Ledger, 0, "missing initial step".into());
    }
    let expect = TraceSummary::from_steps(&trace.steps);
    if expect != trace.summary {
        r.note(Category::Ledger, trace.steps.len() as u64, format!("summary {:?} != step sums {:?}", trace.summary, expect));
    }
    Ok(r)
}
