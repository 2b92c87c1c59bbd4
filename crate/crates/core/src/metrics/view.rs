use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::span::{address_span, AddressSpan};
use crate::graph::AsGraph;
use crate::ingest::{Asn, CountryCode, Prefix, Registry};

/// A country's slice of the AS graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CountryView {
    pub country: CountryCode,
    /// Observed ASes registered to the country.
    pub domestic: BTreeSet<Asn>,
    /// Domestic ASes with at least one foreign neighbor.
    pub frontier: BTreeSet<Asn>,
    /// Edges with both endpoints domestic.
    pub internal_edges: usize,
    /// Edges with exactly one domestic endpoint, including `external_unknown`.
    pub external_edges: usize,
    /// External edges whose foreign endpoint has no registered country.
    pub external_unknown: usize,
    /// Union of domestically originated address space.
    pub total_addr: AddressSpan,
    /// Every origin seen for each prefix with at least one domestic origin.
    pub prefix_origins: BTreeMap<Prefix, BTreeSet<Asn>>,
    /// False when the registry has no record for the country.
    pub registered: bool,
}

impl CountryView {
    pub fn is_domestic(&self, asn: Asn) -> bool {
        self.domestic.contains(&asn)
    }

    /// Domestic ASes originating at least one prefix.
    pub fn advertising(&self) -> BTreeSet<Asn> {
        self.prefix_origins
            .values()
            .flatten()
            .filter(|a| self.domestic.contains(a))
            .copied()
            .collect()
    }

    /// Foreign ASes adjacent to some domestic AS.
    pub fn foreign_neighbors(&self, g: &AsGraph) -> BTreeSet<Asn> {
        g.edges
            .keys()
            .filter_map(|&(a, b)| match (self.is_domestic(a), self.is_domestic(b)) {
                (true, false) => Some(b),
                (false, true) => Some(a),
                _ => None,
            })
            .collect()
    }
}

pub fn country_view(g: &AsGraph, registry: &Registry, cc: CountryCode) -> CountryView {
    let registered = registry.has_country(cc);
    if !registered {
        log::warn!("country {cc} has no registry records");
    }
    let domestic: BTreeSet<Asn> = g
        .nodes
        .values()
        .filter(|n| n.country == cc && !cc.is_unknown())
        .map(|n| n.asn)
        .collect();
    let mut view = CountryView {
        country: cc,
        registered,
        ..Default::default()
    };
    for &(a, b) in g.edges.keys() {
        let (da, db) = (domestic.contains(&a), domestic.contains(&b));
        match (da, db) {
            (true, true) => view.internal_edges += 1,
            (true, false) | (false, true) => {
                view.external_edges += 1;
                let (inside, outside) = if da { (a, b) } else { (b, a) };
                view.frontier.insert(inside);
                if g.nodes[&outside].country.is_unknown() {
                    view.external_unknown += 1;
                }
            }
            _ => {}
        }
    }
    let all_origins = g.prefix_origins();
    for asn in &domestic {
        for p in &g.nodes[asn].prefixes {
            view.prefix_origins.insert(*p, all_origins[p].clone());
        }
    }
    view.total_addr = address_span(view.prefix_origins.keys());
    view.domestic = domestic;
    view
}

/// Countries of the distinct foreign ASes adjacent to the country, one count
/// per AS.
pub fn neighbor_histogram(view: &CountryView, g: &AsGraph) -> BTreeMap<CountryCode, usize> {
    let mut hist = BTreeMap::new();
    for asn in view.foreign_neighbors(g) {
        *hist.entry(g.nodes[&asn].country).or_insert(0) += 1;
    }
    hist
}
