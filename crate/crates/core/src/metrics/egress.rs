//! Which frontier ASes carry a country's address space to the outside.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::complexity::domestic_segment;
use super::control::exclusive_weights;
use super::view::CountryView;
use super::MetricsError;
use crate::graph::{min_vertex_cut_with, AsGraph, CutOptions};
use crate::ingest::{Asn, Family, Prefix, RibEntry};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EgressShare {
    pub asn: Asn,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Egress {
    /// Frontier ASes by descending share, ties by ASN.
    pub ranked: Vec<EgressShare>,
    /// Smallest domestic AS set separating every domestic origin from every
    /// foreign neighbor. Origins may be part of it.
    pub cut: BTreeSet<Asn>,
    /// Observed (prefix, table) crossings that contributed.
    pub crossings: usize,
}

/// The AS through which a path for a domestic prefix leaves the country, or
/// `None` if the path never leaves it.
pub fn exit_hop(view: &CountryView, hops: &[Asn]) -> Option<Asn> {
    let seg = domestic_segment(view, hops);
    (seg.len() < hops.len()).then(|| seg.first().copied()).flatten()
}

pub fn egress_bottlenecks<'a>(
    view: &CountryView,
    entries: impl IntoIterator<Item = &'a RibEntry>,
    g: &AsGraph,
    family: Family,
) -> Result<Egress, MetricsError> {
    if view.frontier.is_empty() {
        return Err(MetricsError::NoFrontier(view.country));
    }
    let weights = exclusive_weights(view.prefix_origins.keys(), family);
    let mut exits: BTreeMap<(Prefix, &str, u64), Asn> = BTreeMap::new();
    for e in entries {
        if !weights.contains_key(&e.prefix) {
            continue;
        }
        let Some(x) = exit_hop(view, e.path.hops()) else { continue };
        exits
            .entry((e.prefix, e.vantage.as_str(), e.timestamp))
            .and_modify(|cur| *cur = (*cur).min(x))
            .or_insert(x);
    }
    let mut by_as: BTreeMap<Asn, u128> = BTreeMap::new();
    for ((p, _, _), x) in &exits {
        *by_as.entry(*x).or_default() += weights[p];
    }
    let total: u128 = by_as.values().sum();
    let mut ranked: Vec<EgressShare> = by_as
        .iter()
        .filter(|(_, w)| **w > 0)
        .map(|(asn, w)| EgressShare {
            asn: *asn,
            share: *w as f64 / total as f64,
        })
        .collect();
    ranked.sort_by(|a, b| b.share.total_cmp(&a.share).then(a.asn.cmp(&b.asn)));

    let foreign = view.foreign_neighbors(g);
    let keep: BTreeSet<Asn> = view.domestic.union(&foreign).copied().collect();
    let sub = g.subgraph(&keep);
    let origins: BTreeSet<Asn> = view
        .advertising()
        .into_iter()
        .filter(|a| sub.nodes.contains_key(a))
        .collect();
    let cut = min_vertex_cut_with(
        &sub,
        &origins,
        &foreign,
        CutOptions {
            sources_cuttable: true,
        },
    )
    .map_err(MetricsError::Cut)?;
    Ok(Egress {
        ranked,
        cut,
        crossings: exits.len(),
    })
}
