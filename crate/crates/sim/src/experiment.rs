//! Experiment runner: trials, CSV summary rows and per-trial traces.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use ringpart_core::oracles::{dynamic_opt_ring, static_opt_ring};
use ringpart_core::rng::{derive_seed, stream, STREAM_INITIAL};
use ringpart_core::{
    Coloring, DynamicPartitioner, EdgeId, Error, MtsKind, OnlinePartitioner, RingConfig,
    StaticPartitioner,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SimError;
use crate::gen::{generate, GeneratorSpec};
use crate::trace::{write_trace_file, Trace, TraceHeader, TraceStep, TraceSummary};

pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Dynamic,
    Static,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Dynamic => "dynamic",
            Algo::Static => "static",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mts {
    #[default]
    Smin,
    Wfa,
}

impl From<Mts> for MtsKind {
    fn from(m: Mts) -> Self {
        match m {
            Mts::Smin => MtsKind::Smin,
            Mts::Wfa => MtsKind::Wfa,
        }
    }
}

/// How the initial placement is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    /// Consecutive blocks of `k` processes per server.
    #[default]
    Blocks,
    /// A uniformly shuffled block placement.
    Random,
}

fn ser_gen<S: Serializer>(g: &GeneratorSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(g)
}

fn de_gen<'de, D: Deserializer<'de>>(d: D) -> Result<GeneratorSpec, D::Error> {
    let s = String::deserialize(d)?;
    GeneratorSpec::from_str(&s).map_err(serde::de::Error::custom)
}

fn one() -> usize {
    1
}

/// Everything needed to reproduce a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algo: Algo,
    #[serde(default)]
    pub mts: Mts,
    pub n: usize,
    pub ell: usize,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(serialize_with = "ser_gen", deserialize_with = "de_gen")]
    pub gen: GeneratorSpec,
    /// Requests per trial.
    pub len: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub initial: InitialKind,
    #[serde(default)]
    pub with_oracle: bool,
    /// Output directory for the summary and the traces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn config(&self, seed: u64) -> Result<RingConfig, SimError> {
        Ok(RingConfig::new(self.n, self.ell, self.k, self.epsilon, seed)?)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::Spec("trials must be at least 1".into()));
        }
        self.config(self.seed)?;
        self.gen.validate(self.n)
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.seed, trial as u64)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One CSV row. Oracle columns are empty when not requested or when the
/// instance exceeds the oracle size guards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub algo: String,
    #[serde(rename = "N")]
    pub requests: usize,
    pub cost_hit: u64,
    pub cost_move: u64,
    pub cost_merge: u64,
    pub cost_mono: u64,
    pub cost_bal: u64,
    pub total: u64,
    pub max_load: usize,
    pub opt_static: Option<u64>,
    pub opt_dynamic: Option<u64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub trace: Trace,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub trials: Vec<TrialOutcome>,
}

impl ExperimentResult {
    pub fn rows(&self) -> impl Iterator<Item = &TrialRow> {
        self.trials.iter().map(|t| &t.row)
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>, SimError> {
        rows_to_csv(self.rows())
    }

    /// Writes `summary.csv` and `trial_<i>.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), SimError> {
        fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
        let csv_path = dir.join(SUMMARY_FILE);
        fs::write(&csv_path, self.csv_bytes()?).map_err(|e| SimError::io(&csv_path, e))?;
        for t in &self.trials {
            write_trace_file(&dir.join(trace_file_name(t.row.trial)), &t.trace)?;
        }
        Ok(())
    }
}

pub fn trace_file_name(trial: usize) -> String {
    format!("trial_{trial}.jsonl")
}

pub fn rows_to_csv<'a>(rows: impl IntoIterator<Item = &'a TrialRow>) -> Result<Vec<u8>, SimError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut any = false;
    for r in rows {
        w.serialize(r)?;
        any = true;
    }
    if !any {
        w.write_record([
            "trial", "seed", "algo", "N", "cost_hit", "cost_move", "cost_merge", "cost_mono", "cost_bal",
            "total", "max_load", "opt_static", "opt_dynamic", "ratio",
        ])?;
    }
    w.into_inner().map_err(|e| SimError::io("<csv>", e.into_error()))
}

/// Initial placement for a trial.
pub fn initial_coloring(kind: InitialKind, cfg: &RingConfig) -> Coloring {
    let blocks = Coloring::blocks(cfg.n, cfg.k);
    match kind {
        InitialKind::Blocks => blocks,
        InitialKind::Random => {
            let mut colors = blocks.into_inner();
            colors.shuffle(&mut stream(cfg.seed, STREAM_INITIAL));
            Coloring::new(colors)
        }
    }
}

fn make_partitioner(
    algo: Algo,
    mts: Mts,
    cfg: RingConfig,
    initial: &Coloring,
) -> Result<Box<dyn OnlinePartitioner + Send>, Error> {
    Ok(match algo {
        Algo::Dynamic => Box::new(DynamicPartitioner::new(cfg, initial, mts.into(), true)?),
        Algo::Static => Box::new(StaticPartitioner::new(cfg, initial, true)?),
    })
}

fn oracle(result: Result<u64, Error>) -> Result<Option<u64>, SimError> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::TooLarge { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Runs one online algorithm over `requests`, checking its invariants after
/// every step.
pub fn run_online(
    algo: Algo,
    mts: Mts,
    cfg: RingConfig,
    initial: &Coloring,
    requests: &[EdgeId],
) -> Result<Vec<TraceStep>, SimError> {
    let mut p = make_partitioner(algo, mts, cfg, initial)?;
    p.check_invariants().map_err(Error::from)?;
    for &e in requests {
        p.serve(e)?;
        p.check_invariants().map_err(Error::from)?;
    }
    Ok(p.ledger().trace().iter().map(|r| TraceStep::from_record(r, p.name())).collect())
}

pub fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialOutcome, SimError> {
    let seed = spec.trial_seed(trial);
    let cfg = spec.config(seed)?;
    let initial = initial_coloring(spec.initial, &cfg);
    let requests = generate(&spec.gen, cfg.n, spec.len, seed)?;
    let steps = run_online(spec.algo, spec.mts, cfg, &initial, &requests)?;
    let summary = TraceSummary::from_steps(&steps);
    let (opt_static, opt_dynamic) = if spec.with_oracle {
        (
            oracle(static_opt_ring(&cfg, &initial, &requests))?,
            oracle(dynamic_opt_ring(&cfg, &initial, &requests))?,
        )
    } else {
        (None, None)
    };
    let ratio = opt_dynamic.filter(|&o| o > 0).map(|o| summary.total as f64 / o as f64);
    let row = TrialRow {
        trial,
        seed,
        algo: spec.algo.as_str().to_string(),
        requests: requests.len(),
        cost_hit: summary.cost_hit,
        cost_move: summary.cost_move,
        cost_merge: summary.cost_merge,
        cost_mono: summary.cost_mono,
        cost_bal: summary.cost_bal,
        total: summary.total,
        max_load: summary.max_load,
        opt_static,
        opt_dynamic,
        ratio,
    };
    let header = TraceHeader {
        algo: spec.algo.as_str().to_string(),
        mts: (spec.algo == Algo::Dynamic).then(|| MtsKind::from(spec.mts).as_str().to_string()),
        n: cfg.n,
        ell: cfg.ell,
        k: cfg.k,
        epsilon: cfg.epsilon,
        seed,
        trial,
        initial: initial.into_inner(),
    };
    Ok(TrialOutcome { row, trace: Trace { header, steps, summary } })
}

/// Runs all trials in parallel; results come back in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, SimError> {
    spec.validate()?;
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentResult { spec: spec.clone(), trials })
}

/// Parameters that `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    N,
    Ell,
    K,
    Epsilon,
    Seed,
    Len,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepParam::N => "n",
            SweepParam::Ell => "ell",
            SweepParam::K => "k",
            SweepParam::Epsilon => "epsilon",
            SweepParam::Seed => "seed",
            SweepParam::Len => "len",
        };
        f.write_str(s)
    }
}

impl SweepParam {
    /// Copy of `base` with the parameter set to `value`.
    pub fn apply(self, base: &ExperimentSpec, value: &str) -> Result<ExperimentSpec, SimError> {
        let bad = || SimError::Spec(format!("bad value `{value}` for {self}"));
        let int = || value.parse::<usize>().map_err(|_| bad());
        let mut s = base.clone();
        match self {
            SweepParam::N => s.n = int()?,
            SweepParam::Ell => s.ell = int()?,
            SweepParam::K => s.k = int()?,
            SweepParam::Epsilon => s.epsilon = value.parse().map_err(|_| bad())?,
            SweepParam::Seed => s.seed = value.parse().map_err(|_| bad())?,
            SweepParam::Len => s.len = int()?,
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(algo: Algo) -> ExperimentSpec {
        ExperimentSpec {
            algo,
            mts: Mts::Smin,
            n: 8,
            ell: 2,
            k: 4,
            epsilon: 0.5,
            seed: 7,
            gen: "uniform_random".parse().unwrap(),
            len: 40,
            trials: 3,
            initial: InitialKind::Blocks,
            with_oracle: true,
            out: None,
        }
    }

    #[test]
    fn rows_match_traces() {
        for algo in [Algo::Dynamic, Algo::Static] {
            let r = run_experiment(&spec(algo)).unwrap();
            assert_eq!(r.trials.len(), 3);
            for t in &r.trials {
                let sum: u64 = t.trace.steps.iter().map(|s| s.costs().total()).sum();
                assert_eq!(t.row.total, sum);
                assert_eq!(t.row.requests, 40);
                assert!(t.row.opt_dynamic.unwrap() <= t.row.opt_static.unwrap());
            }
        }
    }

    #[test]
    fn fixed_edge_trials_repeat() {
        let mut s = spec(Algo::Static);
        s.gen = "fixed_edge:edge=3".parse().unwrap();
        s.seed = 1;
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.trials.len(), 3);
        // Trials share the workload but not the seed.
        assert_ne!(r.trials[0].row.seed, r.trials[1].row.seed);
    }

    #[test]
    fn empty_sequence_and_csv_shape() {
        let mut s = spec(Algo::Dynamic);
        s.len = 0;
        s.trials = 1;
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.trials[0].row.cost_hit, 0);
        let csv = String::from_utf8(r.csv_bytes().unwrap()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "trial,seed,algo,N,cost_hit,cost_move,cost_merge,cost_mono,cost_bal,total,max_load,opt_static,opt_dynamic,ratio"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn oracle_guard_gives_empty_columns() {
        let mut s = spec(Algo::Dynamic);
        s.n = 40;
        s.ell = 4;
        s.k = 10;
        s.trials = 1;
        let r = run_experiment(&s).unwrap();
        assert_eq!(r.trials[0].row.opt_static, None);
        let csv = String::from_utf8(r.csv_bytes().unwrap()).unwrap();
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,"));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(Algo::Static);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"gen\":\"uniform_random\""));
        assert_eq!(serde_json::from_str::<ExperimentSpec>(&json).unwrap(), s);
        let mut bad = s.clone();
        bad.trials = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn random_initial_is_balanced() {
        let cfg = RingConfig::new(12, 3, 4, 0.5, 5).unwrap();
        let c = initial_coloring(InitialKind::Random, &cfg);
        assert_eq!(c.loads(3), vec![4, 4, 4]);
        assert_ne!(c, Coloring::blocks(12, 4));
    }
}
