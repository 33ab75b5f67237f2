//! Clustering rules for slices and the scheduling of clusters on servers.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{InvariantKind, InvariantViolation};

/// A cluster is either the color `c` cluster or a cluster of one slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClusterId {
    Color(u32),
    Singleton(u64),
}

/// Outcome of the clustering rule for a changed slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Color(u32),
    Singleton,
}

/// Clustering rule for a slice of `len` processes whose most frequent initial
/// color `c` has `count` members, given the cluster `prev` of its predecessor.
///
/// * no strict majority: singleton,
/// * strictly more than 3/4 of color `c`: the color `c` cluster,
/// * otherwise the color `c` cluster only if `prev` already was it.
pub fn classify(top: Option<(u32, usize)>, len: usize, prev: ClusterId) -> Assignment {
    match top {
        Some((c, count)) if 2 * count > len => {
            if 4 * count > 3 * len || prev == ClusterId::Color(c) {
                Assignment::Color(c)
            } else {
                Assignment::Singleton
            }
        }
        _ => Assignment::Singleton,
    }
}

/// Monochromatic migration cost of an assignment: the slice pays its size
/// when it enters a color cluster it was not part of.
pub fn mono_cost(assignment: Assignment, len: usize, prev: ClusterId) -> u64 {
    match assignment {
        Assignment::Color(c) if prev != ClusterId::Color(c) => len as u64,
        _ => 0,
    }
}

/// Slice summary used by [`merge_cost`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceRef {
    pub id: u64,
    pub len: usize,
    pub cluster: ClusterId,
}

/// Cost of merging two adjacent slices, and whether `a` is the smaller one.
///
/// The smaller slice moves to the cluster of the larger one; equal sizes
/// count the lower id as smaller. Two slices of the same color cluster
/// already share a server and merge for free.
pub fn merge_cost(a: SliceRef, b: SliceRef) -> (u64, bool) {
    let a_smaller = a.len < b.len || (a.len == b.len && a.id < b.id);
    let same_color = matches!(a.cluster, ClusterId::Color(_)) && a.cluster == b.cluster;
    let cost = if same_color { 0 } else { a.len.min(b.len) as u64 };
    (cost, a_smaller)
}

/// Size and server of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub size: usize,
    pub server: u32,
}

fn loads(clusters: &BTreeMap<ClusterId, Placement>, ell: usize) -> Vec<usize> {
    let mut loads = vec![0usize; ell];
    for p in clusters.values() {
        loads[p.server as usize] += p.size;
    }
    loads
}

fn lightest(loads: &[usize], skip: &[usize]) -> Option<usize> {
    (0..loads.len()).filter(|s| !skip.contains(s)).min_by_key(|&s| (loads[s], s))
}

/// Scheduling procedure.
///
/// With `X` the largest cluster size and `D = max(2, X / k)`, every server
/// with load above `(D + eps') k` sheds its smallest clusters onto a server
/// of load at most `k` until its load is at most `D k`. A cluster larger
/// than `k` first gets its target emptied onto another light server.
/// Returns the number of migrated processes.
pub fn rebalance(
    clusters: &mut BTreeMap<ClusterId, Placement>,
    ell: usize,
    k: usize,
    eps_prime: f64,
    step: u64,
) -> Result<u64, InvariantViolation> {
    let largest = clusters.values().map(|p| p.size).max().unwrap_or(0);
    let d = (largest as f64 / k as f64).max(2.0);
    let trigger = (d + eps_prime) * k as f64;
    let target = d * k as f64;
    let no_light = |load: usize| InvariantViolation {
        kind: InvariantKind::NoLightServer,
        step,
        value: load as f64,
        bound: k as f64,
    };
    let mut moved = 0u64;
    while let Some(s) = (0..ell).find(|&s| loads(clusters, ell)[s] as f64 > trigger) {
        while loads(clusters, ell)[s] as f64 > target {
            let (&cid, place) = clusters
                .iter()
                .filter(|(_, p)| p.server as usize == s && p.size > 0)
                .min_by_key(|(id, p)| (p.size, **id))
                .expect("an overloaded server holds a cluster");
            let size = place.size;
            let load = loads(clusters, ell);
            let to = lightest(&load, &[s]).ok_or_else(|| no_light(load[s]))?;
            if load[to] > k {
                return Err(no_light(load[to]));
            }
            if size > k && load[to] > 0 {
                let spare = lightest(&load, &[s, to]).ok_or_else(|| no_light(load[to]))?;
                if load[spare] > k {
                    return Err(no_light(load[spare]));
                }
                for p in clusters.values_mut().filter(|p| p.server as usize == to) {
                    p.server = spare as u32;
                    moved += p.size as u64;
                }
            }
            let p = clusters.get_mut(&cid).expect("cluster exists");
            p.server = to as u32;
            moved += size as u64;
        }
    }
    Ok(moved)
}
