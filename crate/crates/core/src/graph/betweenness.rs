//! Brandes betweenness over the undirected, unweighted AS graph.
//!
//! Scores are raw pair counts: every unordered pair {s, t} distributes one
//! unit across its shortest paths, split evenly among equal-length paths.
//! Node scores exclude the endpoints.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::{AsGraph, Indexed};
use crate::ingest::Asn;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Betweenness {
    pub nodes: BTreeMap<Asn, f64>,
    pub edges: BTreeMap<(Asn, Asn), f64>,
}

struct Scratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<(usize, usize)>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }
}

fn accumulate_from(
    g: &Indexed,
    s: usize,
    sc: &mut Scratch,
    node_acc: &mut [f64],
    edge_acc: &mut [f64],
) {
    for &v in &sc.order {
        sc.dist[v] = -1;
        sc.sigma[v] = 0.0;
        sc.delta[v] = 0.0;
        sc.preds[v].clear();
    }
    sc.order.clear();
    sc.dist[s] = 0;
    sc.sigma[s] = 1.0;
    sc.queue.push_back(s);
    while let Some(v) = sc.queue.pop_front() {
        sc.order.push(v);
        for &(w, eid) in &g.adj[v] {
            if sc.dist[w] < 0 {
                sc.dist[w] = sc.dist[v] + 1;
                sc.queue.push_back(w);
            }
            if sc.dist[w] == sc.dist[v] + 1 {
                sc.sigma[w] += sc.sigma[v];
                sc.preds[w].push((v, eid));
            }
        }
    }
    for i in (0..sc.order.len()).rev() {
        let w = sc.order[i];
        let coeff = (1.0 + sc.delta[w]) / sc.sigma[w];
        for k in 0..sc.preds[w].len() {
            let (v, eid) = sc.preds[w][k];
            let c = sc.sigma[v] * coeff;
            edge_acc[eid] += c;
            sc.delta[v] += c;
        }
        if w != s {
            node_acc[w] += sc.delta[w];
        }
    }
}

/// Node and edge betweenness. Sources are processed in a fixed number of
/// chunks whose partial sums are added in order, so results do not depend on
/// thread scheduling.
pub fn betweenness(g: &AsGraph) -> Betweenness {
    let ix = Indexed::new(g);
    let n = ix.asns.len();
    let m = ix.edge_keys.len();
    if n == 0 {
        return Betweenness::default();
    }
    let chunk = n.div_ceil(64.min(n));
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = sources
        .par_chunks(chunk)
        .map(|srcs| {
            let mut sc = Scratch::new(n);
            let mut node_acc = vec![0.0; n];
            let mut edge_acc = vec![0.0; m];
            for &s in srcs {
                accumulate_from(&ix, s, &mut sc, &mut node_acc, &mut edge_acc);
            }
            (node_acc, edge_acc)
        })
        .collect();
    let mut node_total = vec![0.0; n];
    let mut edge_total = vec![0.0; m];
    for (na, ea) in partials {
        node_total.iter_mut().zip(na).for_each(|(t, x)| *t += x);
        edge_total.iter_mut().zip(ea).for_each(|(t, x)| *t += x);
    }
    // Each unordered pair was counted from both ends.
    Betweenness {
        nodes: ix
            .asns
            .iter()
            .zip(node_total)
            .map(|(&a, v)| (a, v / 2.0))
            .collect(),
        edges: ix
            .edge_keys
            .iter()
            .zip(edge_total)
            .map(|(&k, v)| (k, v / 2.0))
            .collect(),
    }
}
