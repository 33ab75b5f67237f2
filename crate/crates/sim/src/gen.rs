//! Request generators.
//!
//! A generator is written `kind[:key=value,...]`, e.g. `fixed_edge:edge=3`,
//! `zipf_edges:s=1.2` or `moving_hotspot:window=4,period=25`. The sequence
//! length is supplied separately.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Zipf};
use ringpart_core::hitting::{StayPut, WfaLine};
use ringpart_core::oracles::position_adversary;
use ringpart_core::rng::{stream, STREAM_GENERATOR};
use ringpart_core::EdgeId;

use crate::error::SimError;
use crate::trace::read_trace_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryStrategy {
    Stay,
    Wfa,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    FixedEdge { edge: usize },
    UniformRandom,
    /// Zipf law with exponent `s` over a seeded ranking of the edges.
    ZipfEdges { s: f64 },
    /// Requests uniformly inside a window of `window` edges whose left end
    /// advances by one edge every `period` requests, starting at `start`
    /// (random when absent).
    MovingHotspot { window: usize, period: usize, start: Option<usize> },
    /// Always requests the position of a deterministic hitting-game strategy
    /// playing on the line of edges `1..=n`; line edge `e` is ring edge `e - 1`.
    AdversaryStay { strategy: AdversaryStrategy },
    /// Replays the requests of a stored trace.
    TraceFile { path: PathBuf },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::FixedEdge { edge } => write!(f, "fixed_edge:edge={edge}"),
            GeneratorSpec::UniformRandom => write!(f, "uniform_random"),
            GeneratorSpec::ZipfEdges { s } => write!(f, "zipf_edges:s={s}"),
            GeneratorSpec::MovingHotspot { window, period, start } => {
                write!(f, "moving_hotspot:window={window},period={period}")?;
                match start {
                    Some(s) => write!(f, ",start={s}"),
                    None => Ok(()),
                }
            }
            GeneratorSpec::AdversaryStay { strategy } => {
                let name = match strategy {
                    AdversaryStrategy::Stay => "stay",
                    AdversaryStrategy::Wfa => "wfa",
                };
                write!(f, "adversary_stay:strategy={name}")
            }
            GeneratorSpec::TraceFile { path } => write!(f, "trace_file:path={}", path.display()),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = SimError;

    fn from_str(spec: &str) -> Result<Self, SimError> {
        let err = |msg: String| SimError::Generator { spec: spec.to_string(), msg };
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{kv}`")))?;
            params.push((k.trim(), v.trim()));
        }
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        fn num<T: FromStr>(v: Option<&str>, key: &str) -> Result<Option<T>, String> {
            v.map(|s| s.parse::<T>().map_err(|_| format!("bad value for {key}: `{s}`"))).transpose()
        }
        let allowed: &[&str] = match kind {
            "fixed_edge" => &["edge"],
            "uniform_random" => &[],
            "zipf_edges" => &["s"],
            "moving_hotspot" => &["window", "period", "start"],
            "adversary_stay" => &["strategy"],
            "trace_file" => &["path"],
            _ => return Err(err(format!("unknown generator `{kind}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(err(format!("unknown parameter `{k}`")));
        }
        let g = match kind {
            "fixed_edge" => GeneratorSpec::FixedEdge {
                edge: num(get("edge"), "edge").map_err(err)?.ok_or_else(|| err("missing edge".into()))?,
            },
            "uniform_random" => GeneratorSpec::UniformRandom,
            "zipf_edges" => GeneratorSpec::ZipfEdges { s: num(get("s"), "s").map_err(err)?.unwrap_or(1.0) },
            "moving_hotspot" => GeneratorSpec::MovingHotspot {
                window: num(get("window"), "window").map_err(err)?.unwrap_or(1),
                period: num(get("period"), "period").map_err(err)?.unwrap_or(1),
                start: num(get("start"), "start").map_err(err)?,
            },
            "adversary_stay" => GeneratorSpec::AdversaryStay {
                strategy: match get("strategy").unwrap_or("stay") {
                    "stay" => AdversaryStrategy::Stay,
                    "wfa" => AdversaryStrategy::Wfa,
                    other => return Err(err(format!("unknown strategy `{other}`"))),
                },
            },
            _ => GeneratorSpec::TraceFile {
                path: get("path").ok_or_else(|| err("missing path".into()))?.into(),
            },
        };
        Ok(g)
    }
}

impl GeneratorSpec {
    /// Short name of the generator kind.
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::FixedEdge { .. } => "fixed_edge",
            GeneratorSpec::UniformRandom => "uniform_random",
            GeneratorSpec::ZipfEdges { .. } => "zipf_edges",
            GeneratorSpec::MovingHotspot { .. } => "moving_hotspot",
            GeneratorSpec::AdversaryStay { .. } => "adversary_stay",
            GeneratorSpec::TraceFile { .. } => "trace_file",
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), SimError> {
        let err = |msg: &str| SimError::Generator { spec: self.to_string(), msg: msg.to_string() };
        match *self {
            GeneratorSpec::FixedEdge { edge } if edge >= n => Err(err("edge out of range")),
            GeneratorSpec::ZipfEdges { s } if !(s >= 0.0 && s.is_finite()) => Err(err("s must be >= 0")),
            GeneratorSpec::MovingHotspot { window, period, start } => {
                if window == 0 || window > n || period == 0 {
                    Err(err("need 1 <= window <= n and period >= 1"))
                } else if start.is_some_and(|s| s >= n) {
                    Err(err("start out of range"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Generates `len` requests on a ring of `n` edges. Deterministic in `seed`.
pub fn generate(spec: &GeneratorSpec, n: usize, len: usize, seed: u64) -> Result<Vec<EdgeId>, SimError> {
    spec.validate(n)?;
    let mut rng = stream(seed, STREAM_GENERATOR);
    let edges: Vec<usize> = match spec {
        GeneratorSpec::FixedEdge { edge } => vec![*edge; len],
        GeneratorSpec::UniformRandom => (0..len).map(|_| rng.random_range(0..n)).collect(),
        GeneratorSpec::ZipfEdges { s } => {
            let mut rank: Vec<usize> = (0..n).collect();
            rank.shuffle(&mut rng);
            let zipf = Zipf::new(n as f64, *s).map_err(|e| SimError::Generator {
                spec: spec.to_string(),
                msg: e.to_string(),
            })?;
            (0..len).map(|_| rank[(zipf.sample(&mut rng) as usize).clamp(1, n) - 1]).collect()
        }
        GeneratorSpec::MovingHotspot { window, period, start } => {
            let start = start.unwrap_or_else(|| rng.random_range(0..n));
            (0..len)
                .map(|t| {
                    let offset = if *window > 1 { rng.random_range(0..*window) } else { 0 };
                    (start + t / period + offset) % n
                })
                .collect()
        }
        GeneratorSpec::AdversaryStay { strategy } => {
            let t = len.max(n * n);
            let run = match strategy {
                AdversaryStrategy::Stay => position_adversary(&mut StayPut::new(n), n, t)?,
                AdversaryStrategy::Wfa => position_adversary(&mut WfaLine::new(n)?, n, t)?,
            };
            run.requests.into_iter().take(len).map(|e| e - 1).collect()
        }
        GeneratorSpec::TraceFile { path } => {
            let trace = read_trace_file(path)?;
            let edges: Vec<usize> = trace.requests().map(|e| e.0).collect();
            if let Some(&e) = edges.iter().find(|&&e| e >= n) {
                return Err(SimError::Generator {
                    spec: spec.to_string(),
                    msg: format!("trace requests edge {e} on a ring of {n}"),
                });
            }
            edges.into_iter().take(len).collect()
        }
    };
    Ok(edges.into_iter().map(EdgeId).collect())
}
