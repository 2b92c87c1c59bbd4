//! Minimum vertex cuts between AS sets, by max-flow on the split graph.
//!
//! Every vertex `v` becomes `in(v) -> out(v)` with capacity 1 (infinite for
//! terminals that may not be cut) and every undirected edge becomes two
//! infinite arcs `out(u) -> in(v)`, `out(v) -> in(u)`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use super::{AsGraph, Indexed};
use crate::ingest::Asn;

const INF: u32 = u32::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("AS{0} is both a source and a sink")]
    Overlap(Asn),
    #[error("AS{0} is not in the graph")]
    UnknownAsn(Asn),
    #[error("no vertex cut exists: source AS{from} is adjacent to sink AS{to}")]
    Impossible { from: Asn, to: Asn },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutOptions {
    /// Allow source vertices themselves to be part of the cut.
    pub sources_cuttable: bool,
}

struct FlowNet {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, u: usize, v: usize, c: u32) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Augments until the flow reaches `limit` or no path remains.
    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let n = self.adj.len();
        let mut flow = 0u32;
        let mut via = vec![usize::MAX; n];
        while flow < limit {
            via.iter_mut().for_each(|x| *x = usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && v != s && via[v] == usize::MAX {
                        via[v] = e;
                        if v == t {
                            reached = true;
                            break;
                        }
                        queue.push_back(v);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                break;
            }
            let mut bottleneck = u32::MAX;
            let mut v = t;
            while v != s {
                let e = via[v];
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            if bottleneck >= INF {
                return INF;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            flow = flow.saturating_add(bottleneck);
        }
        flow
    }
}

struct Problem<'a> {
    ix: &'a Indexed,
    is_source: Vec<bool>,
    is_sink: Vec<bool>,
    sources_cuttable: bool,
}

impl Problem<'_> {
    fn flow(&self, removed: &HashSet<usize>, limit: u32) -> u32 {
        let n = self.ix.asns.len();
        let (s, t) = (2 * n, 2 * n + 1);
        let mut net = FlowNet::new(2 * n + 2);
        for v in 0..n {
            if removed.contains(&v) {
                continue;
            }
            let c = if self.is_sink[v] || (self.is_source[v] && !self.sources_cuttable) {
                INF
            } else {
                1
            };
            net.add(2 * v, 2 * v + 1, c);
            if self.is_source[v] {
                net.add(s, 2 * v, INF);
            }
            if self.is_sink[v] {
                net.add(2 * v + 1, t, INF);
            }
            for &(w, _) in &self.ix.adj[v] {
                if !removed.contains(&w) {
                    net.add(2 * v + 1, 2 * w, INF);
                }
            }
        }
        net.max_flow(s, t, limit)
    }

    /// Vertices on some source-to-sink walk that avoids passing through
    /// other terminals.
    fn candidates(&self) -> Vec<usize> {
        let reach = |starts: &[bool], stops: &[bool]| {
            let n = starts.len();
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = (0..n).filter(|&v| starts[v]).collect();
            for &v in &queue {
                seen[v] = true;
            }
            while let Some(v) = queue.pop_front() {
                if stops[v] {
                    continue;
                }
                for &(w, _) in &self.ix.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen
        };
        let fwd = reach(&self.is_source, &self.is_sink);
        let bwd = reach(&self.is_sink, &self.is_source);
        (0..self.ix.asns.len())
            .filter(|&v| fwd[v] && bwd[v] && !self.is_sink[v])
            .filter(|&v| self.sources_cuttable || !self.is_source[v])
            .collect()
    }
}

/// Smallest set of non-terminal ASes whose removal disconnects every source
/// from every sink. Among minimum cuts, the lexicographically smallest
/// sorted ASN list is returned.
pub fn min_vertex_cut(
    g: &AsGraph,
    sources: &BTreeSet<Asn>,
    sinks: &BTreeSet<Asn>,
) -> Result<BTreeSet<Asn>, CutError> {
    min_vertex_cut_with(g, sources, sinks, CutOptions::default())
}

pub fn min_vertex_cut_with(
    g: &AsGraph,
    sources: &BTreeSet<Asn>,
    sinks: &BTreeSet<Asn>,
    opts: CutOptions,
) -> Result<BTreeSet<Asn>, CutError> {
    if let Some(a) = sources.intersection(sinks).next() {
        return Err(CutError::Overlap(*a));
    }
    for a in sources.iter().chain(sinks) {
        if !g.nodes.contains_key(a) {
            return Err(CutError::UnknownAsn(*a));
        }
    }
    if !opts.sources_cuttable {
        for &s in sources {
            for &t in sinks {
                if g.edge(s, t).is_some() {
                    return Err(CutError::Impossible { from: s, to: t });
                }
            }
        }
    }
    let ix = Indexed::new(g);
    let n = ix.asns.len();
    let mut is_source = vec![false; n];
    let mut is_sink = vec![false; n];
    for a in sources {
        is_source[ix.index[a]] = true;
    }
    for a in sinks {
        is_sink[ix.index[a]] = true;
    }
    let problem = Problem {
        ix: &ix,
        is_source,
        is_sink,
        sources_cuttable: opts.sources_cuttable,
    };
    let mut removed = HashSet::new();
    let mut k = problem.flow(&removed, INF);
    debug_assert!(k < INF, "terminal adjacency was checked above");
    for v in problem.candidates() {
        if k == 0 {
            break;
        }
        removed.insert(v);
        if problem.flow(&removed, k) == k - 1 {
            k -= 1;
        } else {
            removed.remove(&v);
        }
    }
    Ok(removed.into_iter().map(|v| ix.asns[v]).collect())
}
