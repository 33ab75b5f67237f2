//! JSONL traces.
//!
//! A trace is a header line `{"header": {...}}`, one line per step (step 0
//! is the initial placement and has `"edge": null`) and a closing line
//! `{"summary": {...}}`. A file without the summary line is truncated and
//! fails to parse.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ringpart_core::{
    CostBreakdown, EdgeId, IntervalEvent, IntervalEventKind, RingConfig, StepRecord,
};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub algo: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mts: Option<String>,
    pub n: usize,
    pub ell: usize,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub trial: usize,
    pub initial: Vec<u32>,
}

impl TraceHeader {
    pub fn config(&self) -> Result<RingConfig, SimError> {
        Ok(RingConfig::new(self.n, self.ell, self.k, self.epsilon, self.seed)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub interval: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by: Option<u32>,
}

impl From<&IntervalEvent> for TraceEvent {
    fn from(e: &IntervalEvent) -> Self {
        let (kind, len, by) = match e.kind {
            IntervalEventKind::Grown { len } => ("grown", Some(len), None),
            IntervalEventKind::MonoDeactivated => ("mono_deactivated", None, None),
            IntervalEventKind::Dominated { by } => ("dominated", None, Some(by.0)),
        };
        TraceEvent { interval: e.interval.0, kind: kind.to_string(), len, by }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStep {
    pub step: u64,
    pub edge: Option<usize>,
    pub algorithm: String,
    pub cost_hit: u64,
    pub cost_move: u64,
    pub cost_merge: u64,
    pub cost_mono: u64,
    pub cost_bal: u64,
    pub max_load: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<TraceEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_color_cluster: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_singleton: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_multiplicity: Option<usize>,
}

impl TraceStep {
    pub fn from_record(rec: &StepRecord, algorithm: &str) -> Self {
        TraceStep {
            step: rec.step,
            edge: rec.edge.map(|e| e.0),
            algorithm: algorithm.to_string(),
            cost_hit: rec.costs.hit,
            cost_move: rec.costs.moves,
            cost_merge: rec.costs.merge,
            cost_mono: rec.costs.mono,
            cost_bal: rec.costs.bal,
            max_load: rec.max_load,
            events: rec.events.iter().map(TraceEvent::from).collect(),
            max_color_cluster: rec.clusters.map(|c| c.max_color_cluster),
            max_singleton: rec.clusters.map(|c| c.max_singleton),
            max_multiplicity: rec.clusters.map(|c| c.max_multiplicity),
        }
    }

    pub fn costs(&self) -> CostBreakdown {
        CostBreakdown {
            hit: self.cost_hit,
            moves: self.cost_move,
            merge: self.cost_merge,
            mono: self.cost_mono,
            bal: self.cost_bal,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub steps: u64,
    pub cost_hit: u64,
    pub cost_move: u64,
    pub cost_merge: u64,
    pub cost_mono: u64,
    pub cost_bal: u64,
    pub total: u64,
    pub max_load: usize,
}

impl TraceSummary {
    pub fn from_steps(steps: &[TraceStep]) -> Self {
        let mut costs = CostBreakdown::default();
        for s in steps {
            costs.add(&s.costs());
        }
        TraceSummary {
            steps: steps.iter().filter(|s| s.edge.is_some()).count() as u64,
            cost_hit: costs.hit,
            cost_move: costs.moves,
            cost_merge: costs.merge,
            cost_mono: costs.mono,
            cost_bal: costs.bal,
            total: costs.total(),
            max_load: steps.iter().map(|s| s.max_load).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub steps: Vec<TraceStep>,
    pub summary: TraceSummary,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: TraceHeader,
}

#[derive(Serialize, Deserialize)]
struct SummaryLine {
    summary: TraceSummary,
}

impl Trace {
    pub fn requests(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().filter_map(|s| s.edge.map(EdgeId))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        let io = |e| SimError::io("<trace>", e);
        serde_json::to_writer(&mut w, &HeaderLine { header: self.header.clone() })?;
        w.write_all(b"\n").map_err(io)?;
        for s in &self.steps {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n").map_err(io)?;
        }
        serde_json::to_writer(&mut w, &SummaryLine { summary: self.summary.clone() })?;
        w.write_all(b"\n").map_err(io)?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Trace, SimError> {
        let parse = |line: usize, msg: String| SimError::Parse { line, msg };
        let mut header = None;
        let mut steps = Vec::new();
        let mut summary = None;
        let mut last = 0;
        for (i, line) in r.lines().enumerate() {
            let no = i + 1;
            last = no;
            let line = line.map_err(|e| parse(no, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            if summary.is_some() {
                return Err(parse(no, "content after summary".into()));
            }
            if header.is_none() {
                let h: HeaderLine = serde_json::from_str(&line).map_err(|e| parse(no, format!("bad header: {e}")))?;
                header = Some(h.header);
                continue;
            }
            if line.trim_start().starts_with("{\"summary\"") {
                let s: SummaryLine = serde_json::from_str(&line).map_err(|e| parse(no, format!("bad summary: {e}")))?;
                summary = Some(s.summary);
                continue;
            }
            let step: TraceStep = serde_json::from_str(&line).map_err(|e| parse(no, format!("bad step: {e}")))?;
            steps.push(step);
        }
        let header = header.ok_or_else(|| parse(1, "missing header".into()))?;
        let summary = summary.ok_or_else(|| parse(last + 1, "truncated trace: missing summary".into()))?;
        Ok(Trace { header, steps, summary })
    }
}

pub fn read_trace_file(path: &Path) -> Result<Trace, SimError> {
    let f = File::open(path).map_err(|e| SimError::io(path, e))?;
    Trace::read(BufReader::new(f)).map_err(|e| match e {
        SimError::Parse { line, msg } => SimError::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })
}

pub fn write_trace_file(path: &Path, trace: &Trace) -> Result<(), SimError> {
    let f = File::create(path).map_err(|e| SimError::io(path, e))?;
    let mut w = BufWriter::new(f);
    trace.write(&mut w)?;
    w.flush().map_err(|e| SimError::io(path, e))
}
