use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ringpart::experiment::{rows_to_csv, SweepParam};
use ringpart::{
    read_trace_file, run_experiment, verify_trace, Algo, ExperimentSpec, GeneratorSpec, InitialKind, Mts,
};
use ringpart_core::oracles::{dynamic_opt_ring, static_opt_ring};
use ringpart_core::{Coloring, EdgeId};

#[derive(Parser)]
#[command(name = "ringpart", version, about = "Online balanced partitioning of ring demands")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run trials and write summary.csv plus one JSONL trace per trial.
    Simulate(SimArgs),
    /// Exact offline optimum for the requests of a trace.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Check the structural bounds recorded in traces.
    Verify {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
    /// Repeat `simulate` for several values of one parameter.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Static,
    Dynamic,
}

#[derive(Args)]
struct SimArgs {
    /// JSON file with the same fields as the flags; flags given on the
    /// command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long, value_enum)]
    mts: Option<Mts>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Generator, e.g. `uniform_random` or `moving_hotspot:window=4,period=25`.
    #[arg(long)]
    gen: Option<GeneratorSpec>,
    /// Requests per trial.
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    initial: Option<InitialKind>,
    #[arg(long)]
    with_oracle: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimArgs {
    /// `fallback` fills one field when neither the config nor the flags set it.
    fn spec(&self, fallback: Option<(String, serde_json::Value)>) -> Result<ExperimentSpec> {
        let mut v = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str::<serde_json::Value>(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => serde_json::json!({}),
        };
        let obj = v.as_object_mut().context("config must be a JSON object")?;
        let mut set = |key: &str, val: Option<serde_json::Value>| {
            if let Some(val) = val {
                obj.insert(key.to_string(), val);
            }
        };
        set("algo", self.algo.map(|a| a.as_str().into()));
        set("mts", self.mts.map(|m| serde_json::to_value(m).unwrap()));
        set("n", self.n.map(Into::into));
        set("ell", self.ell.map(Into::into));
        set("k", self.k.map(Into::into));
        set("epsilon", self.epsilon.map(Into::into));
        set("seed", self.seed.map(Into::into));
        set("gen", self.gen.as_ref().map(|g| g.to_string().into()));
        set("len", self.len.map(Into::into));
        set("trials", self.trials.map(Into::into));
        set("initial", self.initial.map(|i| serde_json::to_value(i).unwrap()));
        set("out", self.out.as_ref().map(|p| p.display().to_string().into()));
        if self.with_oracle {
            set("with_oracle", Some(true.into()));
        }
        if let Some((key, val)) = fallback {
            obj.entry(key).or_insert(val);
        }
        let spec: ExperimentSpec = serde_json::from_value(v).context("incomplete experiment (see --help)")?;
        spec.validate()?;
        Ok(spec)
    }
}

fn simulate(spec: &ExperimentSpec) -> Result<Vec<ringpart::TrialRow>> {
    let out = spec.out.as_ref().context("--out is required")?;
    let result = run_experiment(spec)?;
    result.write_to(out)?;
    eprintln!("{} trials written to {}", result.trials.len(), out.display());
    Ok(result.trials.into_iter().map(|t| t.row).collect())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Simulate(args) => {
            simulate(&args.spec(None)?)?;
        }
        Cmd::Sweep { param, values, sim } => {
            let first = serde_json::from_str(&values[0]).with_context(|| format!("bad value `{}`", values[0]))?;
            let base = sim.spec(Some((param.to_string(), first)))?;
            let root = base.out.clone().context("--out is required")?;
            let mut lines = Vec::new();
            for value in &values {
                let mut spec = param.apply(&base, value)?;
                spec.validate()?;
                spec.out = Some(root.join(format!("{param}={value}")));
                let rows = simulate(&spec)?;
                let csv = String::from_utf8(rows_to_csv(&rows)?)?;
                for (i, line) in csv.lines().enumerate() {
                    if i == 0 && lines.is_empty() {
                        lines.push(format!("{param},{line}"));
                    } else if i > 0 {
                        lines.push(format!("{value},{line}"));
                    }
                }
            }
            let path = root.join("sweep.csv");
            fs::write(&path, lines.join("\n") + "\n").with_context(|| format!("writing {}", path.display()))?;
        }
        Cmd::Oracle { kind, trace } => {
            let t = read_trace_file(&trace)?;
            let cfg = t.header.config()?;
            let initial = Coloring::new(t.header.initial.clone());
            let requests: Vec<EdgeId> = t.requests().collect();
            let opt = match kind {
                OracleKind::Static => static_opt_ring(&cfg, &initial, &requests),
                OracleKind::Dynamic => dynamic_opt_ring(&cfg, &initial, &requests),
            }
            .with_context(|| format!("oracle on {}", trace.display()))?;
            println!("{opt}");
        }
        Cmd::Verify { traces } => {
            let mut failed = false;
            for path in &traces {
                let report = verify_trace(&read_trace_file(path)?)?;
                if !report.is_clean() {
                    failed = true;
                    print!("{}:\n{report}", path.display());
                }
            }
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
