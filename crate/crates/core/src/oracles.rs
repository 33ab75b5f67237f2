//! Exact offline optima at desk scale and the position-requesting adversary.
//!
//! Colorings are enumerated in canonical form (servers named in order of
//! first occurrence), which divides the search space by up to `ell!`. Serving
//! costs do not depend on server names, and the cheapest way to reach a
//! canonical coloring is found by an assignment of its labels to servers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::hitting::{start_edge, static_opt, LineStrategy};
use crate::ring::{Coloring, EdgeId, RingConfig};

/// Upper limit on `ell^n / ell!` for the enumeration.
pub const ENUMERATION_LIMIT: f64 = 1e7;
/// Upper limit on `N * |states|^2` for the dynamic program.
pub const DP_LIMIT: f64 = 1e8;

fn enumeration_work(n: usize, ell: usize) -> f64 {
    let log = n as f64 * libm::log(ell as f64) - (1..=ell).map(|i| libm::log(i as f64)).sum::<f64>();
    libm::exp(log)
}

/// All capacity-feasible colorings of `n` processes on `ell` servers of
/// capacity `k`, in canonical form.
pub fn canonical_colorings(n: usize, ell: usize, k: usize) -> Result<Vec<Coloring>, Error> {
    let work = enumeration_work(n, ell);
    if work > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { work, limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::new();
    let mut colors = vec![0u32; n];
    let mut loads = vec![0usize; ell];
    fill(0, 0, &mut colors, &mut loads, k, &mut out);
    Ok(out)
}

fn fill(
    i: usize,
    used: usize,
    colors: &mut Vec<u32>,
    loads: &mut Vec<usize>,
    k: usize,
    out: &mut Vec<Coloring>,
) {
    if i == colors.len() {
        out.push(Coloring::new(colors.clone()));
        return;
    }
    for c in 0..(used + 1).min(loads.len()) {
        if loads[c] == k {
            continue;
        }
        colors[i] = c as u32;
        loads[c] += 1;
        fill(i + 1, used.max(c + 1), colors, loads, k, out);
        loads[c] -= 1;
    }
}

/// Fewest migrations turning `from` into some relabeling of `to`.
///
/// Labels of `to` are assigned injectively to servers so as to keep as many
/// processes in place as possible (bitmask dynamic program over servers).
pub fn min_relabel_migration(from: &Coloring, to: &Coloring, ell: usize) -> Result<u64, Error> {
    if from.len() != to.len() {
        return Err(Error::LengthMismatch { expected: from.len(), found: to.len() });
    }
    let labels = to.as_slice().iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let servers = ell.max(from.as_slice().iter().map(|&c| c as usize + 1).max().unwrap_or(0));
    if labels > servers {
        return Err(Error::ServerOutOfRange { server: labels as u32 - 1, ell: servers });
    }
    let mut overlap = vec![vec![0u64; servers]; labels];
    for (&f, &t) in from.as_slice().iter().zip(to.as_slice()) {
        overlap[t as usize][f as usize] += 1;
    }
    // best[mask]: largest overlap with the first popcount(mask) labels placed
    // on the servers in `mask`.
    let mut best = vec![None::<u64>; 1 << servers];
    best[0] = Some(0);
    let mut kept = 0;
    for mask in 0..1usize << servers {
        let Some(v) = best[mask] else { continue };
        let label = mask.count_ones() as usize;
        if label == labels {
            kept = kept.max(v);
            continue;
        }
        for s in (0..servers).filter(|s| mask & (1 << s) == 0) {
            let next = &mut best[mask | (1 << s)];
            let cand = v + overlap[label][s];
            if next.is_none_or(|old| cand > old) {
                *next = Some(cand);
            }
        }
    }
    Ok(from.len() as u64 - kept)
}

fn check_instance(cfg: &RingConfig, initial: &Coloring, requests: &[EdgeId]) -> Result<(), Error> {
    cfg.validate()?;
    if initial.len() != cfg.n {
        return Err(Error::LengthMismatch { expected: cfg.n, found: initial.len() });
    }
    initial.check_servers(cfg.ell)?;
    for e in requests {
        cfg.edge(e.0)?;
    }
    Ok(())
}

fn cut_cost(coloring: &Coloring, per_edge: &[u64]) -> u64 {
    per_edge.iter().enumerate().map(|(e, &c)| c * coloring.serve_request(EdgeId(e))).sum()
}

/// Best static strategy: migrate once before the first request, then serve
/// everything from one capacity-feasible coloring.
pub fn static_opt_ring(cfg: &RingConfig, initial: &Coloring, requests: &[EdgeId]) -> Result<u64, Error> {
    check_instance(cfg, initial, requests)?;
    let mut per_edge = vec![0u64; cfg.n];
    for e in requests {
        per_edge[e.0] += 1;
    }
    let mut best = u64::MAX;
    for chi in canonical_colorings(cfg.n, cfg.ell, cfg.k)? {
        let comm = cut_cost(&chi, &per_edge);
        if comm >= best {
            continue;
        }
        best = best.min(comm + min_relabel_migration(initial, &chi, cfg.ell)?);
    }
    Ok(best)
}

/// Best dynamic strategy: shortest path through the time-expanded graph of
/// canonical colorings, migrating freely between requests.
pub fn dynamic_opt_ring(cfg: &RingConfig, initial: &Coloring, requests: &[EdgeId]) -> Result<u64, Error> {
    check_instance(cfg, initial, requests)?;
    let states = canonical_colorings(cfg.n, cfg.ell, cfg.k)?;
    let s = states.len();
    let work = requests.len().max(1) as f64 * (s as f64) * (s as f64);
    if work > DP_LIMIT {
        return Err(Error::TooLarge { work, limit: DP_LIMIT });
    }
    let mut dist = vec![vec![0u64; s]; s];
    for a in 0..s {
        for b in a + 1..s {
            let d = min_relabel_migration(&states[a], &states[b], cfg.ell)?;
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let mut f = states
        .iter()
        .map(|chi| min_relabel_migration(initial, chi, cfg.ell))
        .collect::<Result<Vec<u64>, Error>>()?;
    let mut next = vec![0u64; s];
    for &e in requests {
        for (a, slot) in next.iter_mut().enumerate() {
            let reach = (0..s).map(|b| f[b] + dist[b][a]).min().unwrap_or(0);
            *slot = reach + states[a].serve_request(e);
        }
        core::mem::swap(&mut f, &mut next);
    }
    Ok(f.into_iter().min().unwrap_or(0))
}

/// Outcome of [`position_adversary`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryRun {
    /// Requested edges, 1-based.
    pub requests: Vec<usize>,
    pub strategy_cost: u64,
    /// Best static strategy cost on the produced sequence.
    pub opt: u64,
    pub ratio: f64,
    /// `strategy_cost / opt >= k / 2`, checked as `2 cost >= k opt`.
    pub bound_holds: bool,
}

/// Requests the current position of a deterministic hitting-game strategy
/// `t >= k^2` times.
///
/// Each request costs the strategy at least 1, while staying on the least
/// requested edge costs at most `t / k + k`.
pub fn position_adversary<S: LineStrategy + ?Sized>(
    strategy: &mut S,
    k: usize,
    t: usize,
) -> Result<AdversaryRun, Error> {
    if strategy.is_randomized() {
        return Err(Error::Randomized);
    }
    if k == 0 || t < k * k {
        return Err(Error::Parameter { name: "t", value: t as f64 });
    }
    let mut counts = vec![0u64; k];
    let mut requests = Vec::with_capacity(t);
    let mut cost = 0;
    for _ in 0..t {
        let e = strategy.position();
        cost += strategy.request(e)?;
        counts[e - 1] += 1;
        requests.push(e);
    }
    let opt = static_opt(start_edge(k), &counts);
    Ok(AdversaryRun {
        requests,
        strategy_cost: cost,
        opt,
        ratio: if opt == 0 { f64::INFINITY } else { cost as f64 / opt as f64 },
        bound_holds: 2 * cost >= k as u64 * opt,
    })
}
