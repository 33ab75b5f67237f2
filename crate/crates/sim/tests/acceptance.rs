//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ringpart --test acceptance`. All tolerances,
//! grids and frozen constants are pinned below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use ringpart::experiment::{initial_coloring, run_online};
use ringpart::{generate, run_experiment, Algo, ExperimentSpec, GeneratorSpec, InitialKind, Mts};
use ringpart_core::hitting::{start_edge, static_opt, HittingGame, StayPut, WfaLine, MIN_DELTA_BAR};
use ringpart_core::mts::{offline_opt, MtsLineProblem, MtsSolver, WorkFunctionSolver};
use ringpart_core::oracles::{dynamic_opt_ring, position_adversary, static_opt_ring};
use ringpart_core::rng::{derive_seed, stream};
use ringpart_core::smin::{grad_smin_c, smin_c};
use ringpart_core::static_partitioner::StaticParams;
use ringpart_core::{Coloring, DynamicPartitioner, EdgeId, MtsKind, OnlinePartitioner, RingConfig, StaticPartitioner};

type Outcome = Result<String, String>;

/// Seed namespace of this suite; each criterion derives its own streams.
const MASTER: u64 = 0x5eed_ac0e;

fn rng(criterion: u64, index: u64) -> ringpart_core::rng::StreamRng {
    stream(derive_seed(MASTER, criterion), index)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 -------------------------------------------------------------------------

const SMIN_VECTORS: usize = 1000;
const SMIN_TOL: f64 = 1e-9;
const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-6;

fn smin_suite() -> Outcome {
    let scales = [1.0, 2.0, 8.0, 64.0];
    let mut worst_fd: f64 = 0.0;
    for i in 0..SMIN_VECTORS {
        let mut r = rng(1, i as u64);
        let len = r.random_range(1..=64);
        let c = scales[i % scales.len()];
        let x: Vec<f64> = (0..len).map(|_| r.random_range(0.0..=50.0)).collect();
        let l: Vec<f64> = (0..len).map(|_| r.random_range(0.0..=1.0)).collect();
        let y: Vec<f64> = x.iter().zip(&l).map(|(a, b)| a + b).collect();
        let s = smin_c(&x, c).map_err(|e| e.to_string())?;
        let g = grad_smin_c(&x, c).map_err(|e| e.to_string())?;
        let min = x.iter().copied().fold(f64::INFINITY, f64::min);
        check(s <= min + SMIN_TOL && s >= min - c * (len as f64).ln() - SMIN_TOL, || {
            format!("sandwich fails on vector {i}")
        })?;
        let mass: f64 = g.as_slice().iter().sum();
        check((mass - 1.0).abs() <= SMIN_TOL && g.as_slice().iter().all(|&p| p >= 0.0), || {
            format!("gradient of vector {i} is not a distribution")
        })?;
        let inner = g.dot(&l);
        let gain = smin_c(&y, c).unwrap() - s;
        check(gain >= 0.5 * inner - SMIN_TOL, || format!("lower-bound inequality fails on vector {i}"))?;
        // Stability holds for any nonnegative increment, not only unit ones.
        let top = [1.0, 5.0, 50.0][i % 3];
        let big: Vec<f64> = (0..len).map(|_| if r.random_bool(0.5) { r.random_range(0.0..=top) } else { 0.0 }).collect();
        let z: Vec<f64> = x.iter().zip(&big).map(|(a, b)| a + b).collect();
        let drift = grad_smin_c(&z, c).unwrap().l1_distance(&g);
        check(drift <= 2.0 / c * g.dot(&big) + SMIN_TOL, || format!("L1 stability fails on vector {i}"))?;
        for j in 0..len {
            let mut up = x.clone();
            let mut down = x.clone();
            up[j] += FD_STEP;
            down[j] -= FD_STEP;
            let fd = (smin_c(&up, c).unwrap() - smin_c(&down, c).unwrap()) / (2.0 * FD_STEP);
            let exact = g.as_slice()[j];
            // Relative to the largest partial derivative: tiny entries are
            // below the resolution of a difference quotient.
            let top = g.as_slice().iter().copied().fold(0.0, f64::max);
            let rel = (fd - exact).abs() / top;
            worst_fd = worst_fd.max(rel);
            check(rel <= FD_REL_TOL, || format!("finite differences off by {rel:e} on vector {i}"))?;
        }
    }
    Ok(format!("{SMIN_VECTORS} vectors, worst finite-difference error {worst_fd:.1e}"))
}

// 2 -------------------------------------------------------------------------

fn stay_put_adversary() -> Outcome {
    let mut out = Vec::new();
    for k in [4usize, 16, 64] {
        let run = position_adversary(&mut StayPut::new(k), k, k * k).map_err(|e| e.to_string())?;
        // Integer form of cost / opt >= k / 2.
        check(2 * run.strategy_cost >= k as u64 * run.opt, || {
            format!("k={k}: cost {} opt {}", run.strategy_cost, run.opt)
        })?;
        out.push(format!("k={k}: {}/{}", run.strategy_cost, run.opt));
    }
    Ok(out.join(", "))
}

// 3 -------------------------------------------------------------------------

/// Requests per run, as a multiple of `k`.
const HG_LEN_PER_K: usize = 20;
const HG_SEEDS: u64 = 50;
/// Frozen constant `C` of the `C ln k` bound. Calibrated on k = 16, where the
/// largest mean ratio over the four generators was 1.506 ln k (zipf).
const HG_C: f64 = 1.6;

#[derive(Clone, Copy, Debug)]
enum HgGen {
    Fixed,
    Uniform,
    Zipf,
    AdversaryReplay,
}

fn hg_requests(gen: HgGen, k: usize, len: usize, seed: u64) -> Vec<usize> {
    let mut r = stream(seed, 7);
    match gen {
        HgGen::Fixed => vec![start_edge(k); len],
        HgGen::Uniform => (0..len).map(|_| r.random_range(1..=k)).collect(),
        HgGen::Zipf => {
            let spec = GeneratorSpec::ZipfEdges { s: 1.2 };
            generate(&spec, k, len, seed).unwrap().into_iter().map(|e| e.0 + 1).collect()
        }
        HgGen::AdversaryReplay => {
            let t = len.max(k * k);
            let run = position_adversary(&mut WfaLine::new(k).unwrap(), k, t).unwrap();
            run.requests.into_iter().take(len).collect()
        }
    }
}

/// Mean over seeds of `cost / opt` for the interval growing strategy.
fn hg_mean_ratio(k: usize, gen: HgGen) -> Result<f64, String> {
    let len = HG_LEN_PER_K * k;
    let delta_bar = MIN_DELTA_BAR;
    let ratios = (0..HG_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let s = derive_seed(derive_seed(MASTER, 3), seed * 1000 + k as u64);
            let reqs = hg_requests(gen, k, len, s);
            let mut g = HittingGame::new(k, delta_bar, stream(s, 8)).map_err(|e| e.to_string())?;
            for &e in &reqs {
                g.request(e).map_err(|e| e.to_string())?;
            }
            let opt = static_opt(start_edge(k), g.counts());
            let cost = g.total_cost();
            // The start edge was never requested: nothing moved, nothing paid.
            if opt == 0 {
                return if cost == 0 { Ok(1.0) } else { Err(format!("k={k} {gen:?}: cost {cost} with zero optimum")) };
            }
            Ok(cost as f64 / opt as f64)
        })
        .collect::<Result<Vec<f64>, String>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn hitting_game_ratio() -> Outcome {
    let gens = [HgGen::Fixed, HgGen::Uniform, HgGen::Zipf, HgGen::AdversaryReplay];
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for k in [16usize, 64, 256] {
        let mut worst: f64 = 0.0;
        for gen in gens {
            let ratio = hg_mean_ratio(k, gen)?;
            let c = ratio / (k as f64).ln();
            worst = worst.max(c);
            if c > HG_C {
                failures.push(format!("k={k} {gen:?}: mean ratio {ratio:.3} = {c:.3} ln k"));
            }
        }
        out.push(format!("k={k}: max ratio/ln k {worst:.3}"));
    }
    let detail = format!("C={HG_C}; {}", out.join(", "));
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

// 4 -------------------------------------------------------------------------

fn opt_lower_bound() -> Outcome {
    let k = 32;
    let len = 1000;
    let checked = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let s = derive_seed(derive_seed(MASTER, 4), seed);
            let gen = [HgGen::Uniform, HgGen::Zipf, HgGen::Fixed, HgGen::AdversaryReplay][seed as usize % 4];
            let reqs = hg_requests(gen, k, len, s);
            let mut g = HittingGame::new(k, MIN_DELTA_BAR, stream(s, 8)).map_err(|e| e.to_string())?;
            let mut states = 0u64;
            for (t, &e) in reqs.iter().enumerate() {
                g.request(e).map_err(|e| e.to_string())?;
                if g.is_initial() {
                    continue;
                }
                states += 1;
                let opt = static_opt(start_edge(k), g.counts());
                // delta_bar = 14/15: (1 - delta_bar)/2 |I| = |I| / 30.
                let ok = 2 * opt >= g.interval_min() && 30 * opt >= g.len() as u64;
                check(ok, || {
                    format!("seed {seed} step {t}: opt {opt}, min(I) {}, |I| {}", g.interval_min(), g.len())
                })?;
            }
            Ok(states)
        })
        .collect::<Result<Vec<u64>, String>>()?;
    Ok(format!("{} interval states checked", checked.iter().sum::<u64>()))
}

// 5 -------------------------------------------------------------------------

fn gens_for_micro() -> [GeneratorSpec; 4] {
    [
        GeneratorSpec::UniformRandom,
        GeneratorSpec::ZipfEdges { s: 1.2 },
        GeneratorSpec::MovingHotspot { window: 3, period: 25, start: None },
        GeneratorSpec::AdversaryStay { strategy: ringpart::gen::AdversaryStrategy::Wfa },
    ]
}

fn dynamic_invariants() -> Outcome {
    let (n, ell, k, len) = (64, 8, 8, 5000);
    let eps = [0.25, 0.5, 1.0];
    let gens = gens_for_micro();
    let worst = (0..100u64)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(derive_seed(MASTER, 5), run);
            let epsilon = eps[run as usize % 3];
            let kind = if run % 2 == 0 { MtsKind::Smin } else { MtsKind::Wfa };
            let cfg = RingConfig::new(n, ell, k, epsilon, seed).map_err(|e| e.to_string())?;
            let initial = initial_coloring(if run % 4 < 2 { InitialKind::Blocks } else { InitialKind::Random }, &cfg);
            let reqs = generate(&gens[(run / 2) as usize % 4], n, len, seed).map_err(|e| e.to_string())?;
            let mut p = DynamicPartitioner::new(cfg, &initial, kind, false).map_err(|e| e.to_string())?;
            let bound = 2.0 * (1.0 + epsilon) * k as f64;
            let mut worst: f64 = p.coloring().max_load() as f64 / bound;
            for &e in &reqs {
                p.serve(e).map_err(|e| e.to_string())?;
                p.check_invariants().map_err(|v| format!("run {run}: {v}"))?;
                let load = p.coloring().max_load() as f64;
                check(load <= bound, || format!("run {run}: load {load} > {bound}"))?;
                worst = worst.max(load / bound);
            }
            let proxy = p.proxy_costs();
            let totals = p.ledger().totals();
            check(totals.hit <= proxy.hit && totals.moves <= p.initial_migrations() + proxy.moves, || {
                format!("run {run}: ledger {totals:?} exceeds proxy {proxy:?}")
            })?;
            Ok(worst)
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let w = worst.into_iter().fold(0.0, f64::max);
    Ok(format!("100 runs x {len} steps, worst load / bound {w:.3}"))
}

// 6 -------------------------------------------------------------------------

const DYN_OPT_FACTOR: u64 = 100;

/// `seeds x 4` instances `(seed index, generator index, generator, seed)`.
fn micro_instances(criterion: u64, n: usize, seeds: u64) -> Vec<(u64, usize, GeneratorSpec, u64)> {
    let gens = gens_for_micro();
    let mut out = Vec::new();
    for s in 0..seeds {
        for (g, spec) in gens.iter().enumerate() {
            let seed = derive_seed(derive_seed(MASTER, criterion), (n as u64) << 32 | s << 4 | g as u64);
            out.push((s, g, spec.clone(), seed));
        }
    }
    out
}

fn dynamic_vs_opt() -> Outcome {
    let (n, ell, k, epsilon, len) = (8, 2, 4, 0.5, 200);
    let results = micro_instances(6, n, 100)
        .into_par_iter()
        .map(|(s, g, spec, seed)| {
            let cfg = RingConfig::new(n, ell, k, epsilon, seed).map_err(|e| e.to_string())?;
            let initial = initial_coloring(if s % 2 == 0 { InitialKind::Blocks } else { InitialKind::Random }, &cfg);
            let reqs = generate(&spec, n, len, seed).map_err(|e| e.to_string())?;
            let mts = if s % 2 == 0 { Mts::Smin } else { Mts::Wfa };
            let steps = run_online(Algo::Dynamic, mts, cfg, &initial, &reqs).map_err(|e| e.to_string())?;
            let total: u64 = steps.iter().map(|st| st.costs().total()).sum();
            let opt = dynamic_opt_ring(&cfg, &initial, &reqs).map_err(|e| e.to_string())?;
            check(total <= DYN_OPT_FACTOR * opt + 2 * n as u64, || {
                format!("seed {s} gen {g}: total {total}, opt {opt}")
            })?;
            Ok((total, opt))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let worst = results.iter().filter(|r| r.1 > 0).map(|&(t, o)| t as f64 / o as f64).fold(0.0, f64::max);
    let mean = results.iter().map(|r| r.0 as f64).sum::<f64>() / results.iter().map(|r| r.1 as f64).sum::<f64>();
    Ok(format!("{} instances, aggregate ratio {mean:.2}, worst {worst:.2}", results.len()))
}

// 7 -------------------------------------------------------------------------

fn static_invariants() -> Outcome {
    let (n, ell, k, len) = (60, 6, 10, 3000);
    let gens = gens_for_micro();
    let stats = (0..100u64)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(derive_seed(MASTER, 7), run);
            let epsilon = if run % 2 == 0 { 0.5 } else { 1.0 };
            let params = StaticParams::new(k, epsilon);
            let cfg = RingConfig::new(n, ell, k, epsilon, seed).map_err(|e| e.to_string())?;
            let initial = initial_coloring(if run % 4 < 2 { InitialKind::Blocks } else { InitialKind::Random }, &cfg);
            let reqs = generate(&gens[(run / 2) as usize % 4], n, len, seed).map_err(|e| e.to_string())?;
            let mut p = StaticPartitioner::new(cfg, &initial, false).map_err(|e| e.to_string())?;
            let mut worst = [0usize; 4];
            for &e in &reqs {
                p.serve(e).map_err(|e| e.to_string())?;
                p.check_invariants().map_err(|v| format!("run {run}: {v}"))?;
                let load = p.coloring().max_load();
                check(load as f64 <= params.load_bound, || format!("run {run}: load {load}"))?;
                let c = p.cluster_stats();
                worst = [
                    worst[0].max(load),
                    worst[1].max(c.max_color_cluster),
                    worst[2].max(c.max_singleton),
                    worst[3].max(c.max_multiplicity),
                ];
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>, String>>()?;
    let w = stats.iter().fold([0; 4], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])]);
    Ok(format!(
        "100 runs x {len} steps; worst load {}, color cluster {}, singleton {}, multiplicity {}",
        w[0], w[1], w[2], w[3]
    ))
}

// 8 -------------------------------------------------------------------------

/// Frozen constant `C'` of the `C' ln^2 k` bound. Calibrated on n = 12, where
/// the largest per-instance ratio was 1.602 ln^2 k; n = 10 and n = 8 are held
/// out.
const STATIC_C: f64 = 1.7;

fn static_vs_opt() -> Outcome {
    let (ell, k, len) = (2, 6, 300);
    let ln2k = (k as f64).ln().powi(2);
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for n in [12usize, 10, 8] {
        let results = micro_instances(8, n, 100)
            .into_par_iter()
            .map(|(s, g, spec, seed)| {
                let epsilon = if s % 2 == 0 { 0.5 } else { 1.0 };
                let cfg = RingConfig::new(n, ell, k, epsilon, seed).map_err(|e| e.to_string())?;
                let initial = initial_coloring(if s % 4 < 2 { InitialKind::Blocks } else { InitialKind::Random }, &cfg);
                let reqs = generate(&spec, n, len, seed).map_err(|e| e.to_string())?;
                let steps = run_online(Algo::Static, Mts::Smin, cfg, &initial, &reqs).map_err(|e| e.to_string())?;
                let total: u64 = steps.iter().map(|st| st.costs().total()).sum();
                let opt = static_opt_ring(&cfg, &initial, &reqs).map_err(|e| e.to_string())?;
                Ok((s, g, total, opt))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let mut worst: f64 = 0.0;
        for &(s, g, total, opt) in &results {
            let c = if opt == 0 {
                if total == 0 { 0.0 } else { f64::INFINITY }
            } else {
                total as f64 / opt as f64 / ln2k
            };
            worst = worst.max(c);
            if c > STATIC_C && failures.len() < 5 {
                failures.push(format!("n={n} seed {s} gen {g}: total {total}, opt {opt}"));
            }
        }
        out.push(format!("n={n}: max ratio/ln^2 k {worst:.3}"));
    }
    let detail = format!("C'={STATIC_C}; {}", out.join(", "));
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

// 9 -------------------------------------------------------------------------

fn brute_force(m: usize, start: usize, tasks: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let total = m.pow(tasks.len() as u32);
    for code in 0..total {
        let (mut c, mut state, mut cost) = (code, start, 0.0);
        for t in tasks {
            let next = c % m;
            c /= m;
            cost += state.abs_diff(next) as f64 + t[next];
            state = next;
        }
        best = best.min(cost);
    }
    best
}

fn mts_equivalence() -> Outcome {
    let mut worst_wfa: f64 = 0.0;
    for i in 0..500u64 {
        let mut r = rng(9, i);
        let m = r.random_range(1..=4);
        let start = r.random_range(0..m);
        let len = r.random_range(0..=8);
        let integral = i % 2 == 0;
        let tasks: Vec<Vec<f64>> = (0..len)
            .map(|_| {
                (0..m)
                    .map(|_| if integral { r.random_range(0..=3) as f64 } else { r.random_range(0.0..3.0) })
                    .collect()
            })
            .collect();
        let problem = MtsLineProblem::new(m, start).map_err(|e| e.to_string())?;
        let dp = offline_opt(problem, &tasks).map_err(|e| e.to_string())?;
        let bf = brute_force(m, start, &tasks);
        check((dp - bf).abs() <= 1e-9, || format!("instance {i}: dp {dp} vs brute force {bf}"))?;
        let mut wfa = WorkFunctionSolver::new(problem);
        let mut total = 0.0;
        for t in &tasks {
            total += wfa.serve(t).map_err(|e| e.to_string())?;
        }
        let mf = m as f64;
        let bound = (2.0 * mf - 1.0) * dp + 2.0 * mf * mf;
        check(total <= bound + 1e-9, || format!("instance {i}: WFA {total} > {bound}"))?;
        worst_wfa = worst_wfa.max(total - (2.0 * mf - 1.0) * dp);
    }
    Ok(format!("500 instances exact; WFA worst additive term {worst_wfa:.2}"))
}

// 10 ------------------------------------------------------------------------

fn oracle_crosscheck() -> Outcome {
    for i in 0..200u64 {
        let mut r = rng(10, i);
        let (n, ell, k) = [(4, 2, 2), (5, 2, 3), (6, 2, 3), (6, 3, 2), (6, 2, 4), (7, 3, 3), (8, 2, 4)][i as usize % 7];
        let cfg = RingConfig::new(n, ell, k, 0.5, i).map_err(|e| e.to_string())?;
        let initial = initial_coloring(InitialKind::Random, &RingConfig { seed: r.next_u64(), ..cfg });
        let len = r.random_range(0..=12);
        let reqs: Vec<EdgeId> = (0..len).map(|_| EdgeId(r.random_range(0..n))).collect();
        let d = dynamic_opt_ring(&cfg, &initial, &reqs).map_err(|e| e.to_string())?;
        let s = static_opt_ring(&cfg, &initial, &reqs).map_err(|e| e.to_string())?;
        check(d <= s, || format!("instance {i}: dynamic {d} > static {s}"))?;

        let shift = r.random_range(1..n);
        let rotated = Coloring::new((0..n).map(|p| initial.color((p + n - shift) % n)).collect());
        let rreqs: Vec<EdgeId> = reqs.iter().map(|e| EdgeId((e.0 + shift) % n)).collect();
        let mut perm: Vec<u32> = (0..ell as u32).collect();
        perm.rotate_left(1 + r.random_range(0..ell) % ell);
        let renamed = Coloring::new(initial.as_slice().iter().map(|&c| perm[c as usize]).collect());
        for (name, init, rq) in [("rotation", &rotated, &rreqs), ("relabeling", &renamed, &reqs)] {
            let d2 = dynamic_opt_ring(&cfg, init, rq).map_err(|e| e.to_string())?;
            let s2 = static_opt_ring(&cfg, init, rq).map_err(|e| e.to_string())?;
            check((d2, s2) == (d, s), || format!("instance {i}: {name} changes optima ({d},{s}) -> ({d2},{s2})"))?;
        }
    }
    Ok("200 instances".into())
}

// 11 ------------------------------------------------------------------------

fn determinism() -> Outcome {
    let specs = [
        ExperimentSpec {
            algo: Algo::Static,
            mts: Mts::Smin,
            n: 30,
            ell: 3,
            k: 10,
            epsilon: 0.5,
            seed: 42,
            gen: GeneratorSpec::ZipfEdges { s: 1.1 },
            len: 800,
            trials: 6,
            initial: InitialKind::Random,
            with_oracle: false,
            out: None,
        },
        ExperimentSpec {
            algo: Algo::Dynamic,
            mts: Mts::Smin,
            n: 8,
            ell: 2,
            k: 4,
            epsilon: 0.5,
            seed: 43,
            gen: GeneratorSpec::MovingHotspot { window: 2, period: 10, start: None },
            len: 100,
            trials: 6,
            initial: InitialKind::Blocks,
            with_oracle: true,
            out: None,
        },
    ];
    for spec in &specs {
        let a = run_experiment(spec).map_err(|e| e.to_string())?.csv_bytes().map_err(|e| e.to_string())?;
        let b = run_experiment(spec).map_err(|e| e.to_string())?.csv_bytes().map_err(|e| e.to_string())?;
        check(a == b, || format!("{} experiment is not reproducible", spec.algo.as_str()))?;
    }
    Ok("2 specs, byte-identical CSV".into())
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "smin properties", limit: Duration::from_secs(5), run: smin_suite },
        Criterion { id: 2, name: "deterministic lower bound", limit: Duration::from_secs(10), run: stay_put_adversary },
        Criterion { id: 3, name: "hitting game ratio", limit: Duration::from_secs(120), run: hitting_game_ratio },
        Criterion { id: 4, name: "hitting game OPT lower bound", limit: Duration::from_secs(60), run: opt_lower_bound },
        Criterion { id: 5, name: "dynamic invariants", limit: Duration::from_secs(120), run: dynamic_invariants },
        Criterion { id: 6, name: "dynamic vs exact OPT", limit: Duration::from_secs(300), run: dynamic_vs_opt },
        Criterion { id: 7, name: "static invariants", limit: Duration::from_secs(120), run: static_invariants },
        Criterion { id: 8, name: "static vs exact OPT", limit: Duration::from_secs(300), run: static_vs_opt },
        Criterion { id: 9, name: "MTS oracle equivalence", limit: Duration::from_secs(30), run: mts_equivalence },
        Criterion { id: 10, name: "oracle cross-checks", limit: Duration::from_secs(60), run: oracle_crosscheck },
        Criterion { id: 11, name: "determinism", limit: Duration::from_secs(60), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let t = Instant::now();
        let mut result = (c.run)();
        let took = t.elapsed();
        if result.is_ok() && took > c.limit {
            result = Err(format!("took {took:.1?}, limit {:?}", c.limit));
        }
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => {
                failed += 1;
                ("FAIL", d.clone())
            }
        };
        println!("[{tag}] {:>2} {}: {detail} ({took:.2?})", c.id, c.name);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
