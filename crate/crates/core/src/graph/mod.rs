//! AS-level graph built from routing tables, plus the algorithms run over it.

mod betweenness;
mod cut;
pub mod export;
mod relations;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::ingest::{Asn, CountryCode, Prefix, Registry, Relationships, RibEntry, Step};
use crate::metrics::{address_span, AddressSpan};

pub use betweenness::{betweenness, Betweenness};
pub use cut::{min_vertex_cut, min_vertex_cut_with, CutError, CutOptions};
pub use relations::{customer_cone, valley_free, GraphError, Validity};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsNode {
    pub asn: Asn,
    pub country: CountryCode,
    pub name: Option<String>,
    /// Prefixes this AS was seen originating.
    pub prefixes: BTreeSet<Prefix>,
    pub addr_count: AddressSpan,
}

impl AsNode {
    pub fn new(asn: Asn) -> Self {
        AsNode {
            asn,
            country: CountryCode::UNKNOWN,
            name: None,
            prefixes: BTreeSet::new(),
            addr_count: AddressSpan::default(),
        }
    }

    pub fn is_private(&self) -> bool {
        self.asn.is_private()
    }
}

/// Relationship attached to an undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRel {
    /// The given endpoint is the provider.
    Provider(Asn),
    P2p,
    S2s,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsEdge {
    /// Lower endpoint.
    pub a: Asn,
    /// Higher endpoint.
    pub b: Asn,
    /// Number of distinct routing tables in which the adjacency appears.
    pub obs_count: u32,
    pub rel: Option<EdgeRel>,
}

/// Canonical undirected key, lower ASN first.
pub fn edge_key(x: Asn, y: Asn) -> (Asn, Asn) {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsGraph {
    pub nodes: BTreeMap<Asn, AsNode>,
    pub edges: BTreeMap<(Asn, Asn), AsEdge>,
    /// Number of distinct (vantage, timestamp) tables merged.
    pub tables: usize,
}

impl AsGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, x: Asn, y: Asn) -> Option<&AsEdge> {
        self.edges.get(&edge_key(x, y))
    }

    /// Sorted neighbor sets for every node.
    pub fn adjacency(&self) -> BTreeMap<Asn, BTreeSet<Asn>> {
        let mut adj: BTreeMap<Asn, BTreeSet<Asn>> =
            self.nodes.keys().map(|&a| (a, BTreeSet::new())).collect();
        for &(a, b) in self.edges.keys() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    /// Attaches display names; unknown ASNs are ignored.
    pub fn annotate_names(&mut self, names: &BTreeMap<Asn, String>) {
        for (asn, node) in self.nodes.iter_mut() {
            if let Some(n) = names.get(asn) {
                node.name = Some(n.clone());
            }
        }
    }

    /// Origin ASes for every prefix in the graph.
    pub fn prefix_origins(&self) -> BTreeMap<Prefix, BTreeSet<Asn>> {
        let mut out: BTreeMap<Prefix, BTreeSet<Asn>> = BTreeMap::new();
        for node in self.nodes.values() {
            for p in &node.prefixes {
                out.entry(*p).or_default().insert(node.asn);
            }
        }
        out
    }

    /// Induced subgraph on `keep`.
    pub fn subgraph(&self, keep: &BTreeSet<Asn>) -> AsGraph {
        AsGraph {
            nodes: self
                .nodes
                .iter()
                .filter(|(a, _)| keep.contains(a))
                .map(|(a, n)| (*a, n.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|((a, b), _)| keep.contains(a) && keep.contains(b))
                .map(|(k, e)| (*k, e.clone()))
                .collect(),
            tables: self.tables,
        }
    }
}

fn edge_rel(rels: &Relationships, a: Asn, b: Asn) -> Option<EdgeRel> {
    rels.step(a, b).map(|s| match s {
        Step::P2c => EdgeRel::Provider(a),
        Step::C2p => EdgeRel::Provider(b),
        Step::P2p => EdgeRel::P2p,
        Step::S2s => EdgeRel::S2s,
    })
}

/// Builds the graph. One routing table is one (vantage, timestamp) pair; an
/// adjacency contributes at most one observation per table.
pub fn build_graph<'a>(
    entries: impl IntoIterator<Item = &'a RibEntry>,
    registry: &Registry,
    rels: &Relationships,
) -> AsGraph {
    let mut tables: HashMap<(&'a str, u64), u32> = HashMap::new();
    let mut seen: HashMap<(Asn, Asn), HashSet<u32>> = HashMap::new();
    let mut nodes: BTreeMap<Asn, AsNode> = BTreeMap::new();
    for e in entries {
        let next_id = tables.len() as u32;
        let table = *tables.entry(e.table_key()).or_insert(next_id);
        for &asn in e.path.hops() {
            nodes.entry(asn).or_insert_with(|| AsNode::new(asn));
        }
        nodes
            .get_mut(&e.origin())
            .expect("inserted above")
            .prefixes
            .insert(e.prefix);
        for (x, y) in e.path.links() {
            seen.entry(edge_key(x, y)).or_default().insert(table);
        }
    }
    for node in nodes.values_mut() {
        node.country = registry.country_of_asn(node.asn);
        node.addr_count = address_span(&node.prefixes);
    }
    let edges = seen
        .into_iter()
        .map(|((a, b), t)| {
            (
                (a, b),
                AsEdge {
                    a,
                    b,
                    obs_count: t.len() as u32,
                    rel: edge_rel(rels, a, b),
                },
            )
        })
        .collect();
    AsGraph {
        nodes,
        edges,
        tables: tables.len(),
    }
}

/// Drops edges seen in fewer than `min_obs` tables.
pub fn prune_edges(g: &AsGraph, min_obs: u32, drop_isolated: bool) -> AsGraph {
    let edges: BTreeMap<_, _> = g
        .edges
        .iter()
        .filter(|(_, e)| e.obs_count >= min_obs)
        .map(|(k, e)| (*k, e.clone()))
        .collect();
    let nodes = if drop_isolated {
        let touched: BTreeSet<Asn> = edges.keys().flat_map(|&(a, b)| [a, b]).collect();
        g.nodes
            .iter()
            .filter(|(a, _)| touched.contains(a))
            .map(|(a, n)| (*a, n.clone()))
            .collect()
    } else {
        g.nodes.clone()
    };
    AsGraph {
        nodes,
        edges,
        tables: g.tables,
    }
}

/// ASes originating at least `min_prefixes` prefixes.
pub fn major_nodes(g: &AsGraph, min_prefixes: usize) -> BTreeSet<Asn> {
    g.nodes
        .values()
        .filter(|n| n.prefixes.len() >= min_prefixes)
        .map(|n| n.asn)
        .collect()
}

/// Dense index over a graph for the traversal algorithms.
pub(crate) struct Indexed {
    pub asns: Vec<Asn>,
    pub index: HashMap<Asn, usize>,
    /// (neighbor, edge id) per node.
    pub adj: Vec<Vec<(usize, usize)>>,
    pub edge_keys: Vec<(Asn, Asn)>,
}

impl Indexed {
    pub fn new(g: &AsGraph) -> Self {
        let asns: Vec<Asn> = g.nodes.keys().copied().collect();
        let index: HashMap<Asn, usize> = asns.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut adj = vec![Vec::new(); asns.len()];
        let mut edge_keys = Vec::with_capacity(g.edges.len());
        for (eid, &(a, b)) in g.edges.keys().enumerate() {
            let (ia, ib) = (index[&a], index[&b]);
            adj[ia].push((ib, eid));
            adj[ib].push((ia, eid));
            edge_keys.push((a, b));
        }
        Indexed {
            asns,
            index,
            adj,
            edge_keys,
        }
    }
}
