//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use asborder::events::{EventKind, Snapshot};
use asborder::graph::{edge_key, AsEdge, AsGraph, AsNode};
use asborder::ingest::{Asn, Prefix, Relationships};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn graph(nodes: impl IntoIterator<Item = u32>, edges: &[(u32, u32)]) -> AsGraph {
    let mut g = AsGraph::default();
    for a in nodes {
        g.nodes.insert(Asn(a), AsNode::new(Asn(a)));
    }
    for &(x, y) in edges {
        for a in [x, y] {
            g.nodes.entry(Asn(a)).or_insert_with(|| AsNode::new(Asn(a)));
        }
        let (a, b) = edge_key(Asn(x), Asn(y));
        g.edges.insert((a, b), AsEdge { a, b, obs_count: 1, rel: None });
    }
    g
}

/// Erdos-Renyi style graph on ASNs 1..=n with roughly `m` distinct edges.
pub fn random_edges<R: Rng>(rng: &mut R, n: u32, m: usize) -> Vec<(u32, u32)> {
    let mut set = BTreeSet::new();
    let mut tries = 0;
    while set.len() < m && tries < m * 20 {
        tries += 1;
        let x = rng.gen_range(1..=n);
        let y = rng.gen_range(1..=n);
        if x != y {
            set.insert((x.min(y), x.max(y)));
        }
    }
    set.into_iter().collect()
}

fn bfs(adj: &BTreeMap<u32, Vec<u32>>, s: u32) -> (BTreeMap<u32, usize>, BTreeMap<u32, f64>) {
    let mut dist = BTreeMap::from([(s, 0usize)]);
    let mut count = BTreeMap::from([(s, 1.0f64)]);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[&v] {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&v] + 1);
                count.insert(w, 0.0);
                queue.push_back(w);
            }
            if dist[&w] == dist[&v] + 1 {
                *count.get_mut(&w).unwrap() += count[&v];
            }
        }
    }
    (dist, count)
}

/// Betweenness from pairwise shortest-path counts: v lies on a fraction
/// `sigma(s,v) sigma(v,t) / sigma(s,t)` of the s-t geodesics when
/// `d(s,v) + d(v,t) = d(s,t)`. Summed over unordered pairs.
pub fn betweenness_by_counting(g: &AsGraph) -> (BTreeMap<u32, f64>, BTreeMap<(u32, u32), f64>) {
    let mut adj: BTreeMap<u32, Vec<u32>> = g.nodes.keys().map(|a| (a.0, Vec::new())).collect();
    for &(a, b) in g.edges.keys() {
        adj.get_mut(&a.0).unwrap().push(b.0);
        adj.get_mut(&b.0).unwrap().push(a.0);
    }
    let all: BTreeMap<u32, _> = adj.keys().map(|&s| (s, bfs(&adj, s))).collect();
    let mut nodes: BTreeMap<u32, f64> = adj.keys().map(|&a| (a, 0.0)).collect();
    let mut edges: BTreeMap<(u32, u32), f64> = g.edges.keys().map(|(a, b)| ((a.0, b.0), 0.0)).collect();
    let ids: Vec<u32> = adj.keys().copied().collect();
    for (i, &s) in ids.iter().enumerate() {
        let (ds, cs) = &all[&s];
        for &t in &ids[i + 1..] {
            let Some(&dst) = ds.get(&t) else { continue };
            let (dt, ct) = &all[&t];
            let total = cs[&t];
            for &v in &ids {
                if v == s || v == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (ds.get(&v), dt.get(&v)) {
                    if a + b == dst {
                        *nodes.get_mut(&v).unwrap() += cs[&v] * ct[&v] / total;
                    }
                }
            }
            for (&(u, v), score) in edges.iter_mut() {
                for (x, y) in [(u, v), (v, u)] {
                    if let (Some(a), Some(b)) = (ds.get(&x), dt.get(&y)) {
                        if a + 1 + b == dst {
                            *score += cs[&x] * ct[&y] / total;
                        }
                    }
                }
            }
        }
    }
    (nodes, edges)
}

/// Smallest number of sets whose union weight reaches `required`, by
/// trying every subset in order of size.
pub fn min_cover_exhaustive(sets: &[Vec<usize>], weights: &[u128], required: u128) -> Option<usize> {
    let k = sets.len();
    assert!(k <= 20);
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let mut covered = vec![false; weights.len()];
        for (i, s) in sets.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for &e in s {
                    covered[e] = true;
                }
            }
        }
        let w: u128 = covered.iter().zip(weights).filter(|(c, _)| **c).map(|(_, w)| *w).sum();
        if w >= required {
            best = Some(size);
        }
    }
    best
}

/// Distinct addresses covered by prefixes inside 10.0.0.0/16, counted
/// one address at a time.
pub fn span_by_bitset(prefixes: &[Prefix]) -> u128 {
    let mut bits = vec![false; 1 << 16];
    for p in prefixes {
        let start = (p.base() & 0xffff) as usize;
        for b in bits.iter_mut().skip(start).take(p.size() as usize) {
            *b = true;
        }
    }
    bits.iter().filter(|b| **b).count() as u128
}

/// Random prefix inside 10.0.0.0/16 with length 16..=32.
pub fn random_prefix_in_16<R: Rng>(rng: &mut R) -> Prefix {
    let len: u8 = rng.gen_range(16..=32);
    let host: u32 = rng.gen_range(0..(1u32 << 16));
    let base = (10u32 << 24) | host;
    let mask = if len == 0 { 0 } else { u32::MAX << (32 - len) };
    let ip = std::net::Ipv4Addr::from(base & mask);
    format!("{ip}/{len}").parse().unwrap()
}

/// Hijack events for a one-snapshot learning window, computed pair by pair.
pub fn naive_hijacks_w1(snaps: &[Snapshot], rels: &Relationships) -> BTreeSet<(u64, EventKind, Prefix, Asn, Asn)> {
    let mut out = BTreeSet::new();
    for w in snaps.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let single = |p: &Prefix| -> Option<Asn> {
            let os = prev.origins().get(p)?;
            (os.len() == 1).then(|| *os.iter().next().unwrap())
        };
        for (q, xs) in cur.origins() {
            let (kind, o) = if let Some(o) = single(q) {
                (EventKind::MoasHijack, o)
            } else if !prev.origins().contains_key(q) {
                let cover = cur
                    .origins()
                    .keys()
                    .filter(|c| c.strictly_contains(q))
                    .max_by_key(|c| c.len());
                let Some(cover) = cover else { continue };
                let Some(o) = single(cover) else { continue };
                if !cur.origins()[cover].contains(&o) {
                    continue;
                }
                (EventKind::SubprefixHijack, o)
            } else {
                continue;
            };
            for &x in xs {
                if x != o && !rels.is_sibling(o, x) {
                    out.insert((cur.timestamp, kind, *q, o, x));
                }
            }
        }
    }
    out
}

/// Closed-form least squares from raw sums.
pub fn ols_from_sums(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Random replay: `steps` snapshots over a handful of nested prefixes and
/// origins, each row present with some probability.
pub fn random_replay<R: Rng>(rng: &mut R, steps: u64) -> Vec<Snapshot> {
    let prefixes = ["10.0.0.0/16", "10.0.0.0/24", "10.0.0.0/25", "10.0.1.0/24", "10.1.0.0/16"];
    let origins = [64500u32, 64501, 64502, 64666];
    (1..=steps)
        .map(|t| {
            let mut rows = Vec::new();
            for p in prefixes {
                let mut os: Vec<u32> = origins.to_vec();
                os.shuffle(rng);
                let k = [0usize, 1, 1, 1, 2][rng.gen_range(0..5)];
                for o in &os[..k] {
                    rows.push(format!("{t}|v{}|{p}|100 {o}", rng.gen_range(0..3)));
                }
            }
            let entries = rows
                .iter()
                .map(|r| asborder::ingest::parse_table_line(r, 1).unwrap().unwrap())
                .collect();
            Snapshot::new(t, entries)
        })
        .collect()
}
