//! Points of control: the fewest domestic ASes whose originated address
//! space reaches a coverage target, found by greedy weighted max-coverage.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::view::CountryView;
use super::MetricsError;
use crate::graph::{customer_cone, AsGraph};
use crate::ingest::{Asn, Family, Prefix, Relationships};

/// Address weight of each prefix after removing the space claimed by more
/// specific prefixes in the same set. The weights of a set sum to its span.
pub fn exclusive_weights<'a>(
    prefixes: impl IntoIterator<Item = &'a Prefix>,
    family: Family,
) -> BTreeMap<Prefix, u128> {
    let sorted: BTreeSet<Prefix> = prefixes
        .into_iter()
        .filter(|p| p.family() == family)
        .copied()
        .collect();
    let mut weights: BTreeMap<Prefix, u128> = sorted.iter().map(|p| (*p, p.size())).collect();
    let mut stack: Vec<Prefix> = Vec::new();
    for p in &sorted {
        while stack.last().is_some_and(|top| !top.contains(p)) {
            stack.pop();
        }
        if let Some(parent) = stack.last() {
            let w = weights.get_mut(parent).expect("parent is in the set");
            *w = w.saturating_sub(p.size());
        }
        stack.push(*p);
    }
    weights
}

/// Smallest number of addresses meeting `target` of `total`, tolerant of
/// floating-point noise when the product is an integer.
pub fn required_coverage(target: f64, total: u128) -> u128 {
    let raw = target * total as f64;
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-9 * raw.abs().max(1.0) {
        nearest as u128
    } else {
        raw.ceil() as u128
    }
}

/// One candidate set for [`greedy_cover`]: element indices into the weight
/// table.
#[derive(Debug, Clone)]
pub struct CoverSet {
    pub asn: Asn,
    pub elements: Vec<usize>,
}

/// Repeatedly picks the set adding the most uncovered weight (ties to the
/// lowest ASN) until `required` is met. Returns `None` if the sets cannot
/// reach it.
pub fn greedy_cover(sets: &[CoverSet], weights: &[u128], required: u128) -> Option<(Vec<Asn>, u128)> {
    let mut order: Vec<&CoverSet> = sets.iter().collect();
    order.sort_by_key(|s| s.asn);
    let mut covered = vec![false; weights.len()];
    let mut used = vec![false; order.len()];
    let mut total = 0u128;
    let mut picked = Vec::new();
    while total < required {
        let mut best: Option<(usize, u128)> = None;
        for (i, s) in order.iter().enumerate() {
            if used[i] {
                continue;
            }
            let gain: u128 = s
                .elements
                .iter()
                .filter(|&&e| !covered[e])
                .map(|&e| weights[e])
                .sum();
            if gain > 0 && best.map_or(true, |(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best?;
        used[i] = true;
        for &e in &order[i].elements {
            covered[e] = true;
        }
        total += gain;
        picked.push(order[i].asn);
    }
    Some((picked, total))
}

/// How a candidate AS's coverage is measured.
#[derive(Clone, Copy)]
pub enum Coverage<'a> {
    /// Addresses the AS originates itself.
    Originated,
    /// Addresses originated anywhere in the AS's domestic customer cone.
    CustomerCone {
        graph: &'a AsGraph,
        rels: &'a Relationships,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlValue {
    pub points_of_control: Vec<Asn>,
    /// `points_of_control.len() / as_observed`.
    pub value: f64,
    pub as_observed: usize,
    pub covered: u128,
    pub total: u128,
    pub target: f64,
}

pub fn control_value(view: &CountryView, coverage_target: f64) -> Result<ControlValue, MetricsError> {
    control_value_with(view, coverage_target, Family::V4, Coverage::Originated)
}

pub fn control_value_with(
    view: &CountryView,
    coverage_target: f64,
    family: Family,
    coverage: Coverage<'_>,
) -> Result<ControlValue, MetricsError> {
    if !(coverage_target > 0.0 && coverage_target <= 1.0) {
        return Err(MetricsError::InvalidTarget(coverage_target));
    }
    let total = view.total_addr.get(family);
    if total == 0 {
        return Err(MetricsError::NoAddresses(view.country));
    }
    let weights = exclusive_weights(view.prefix_origins.keys(), family);
    let index: BTreeMap<Prefix, usize> = weights.keys().enumerate().map(|(i, p)| (*p, i)).collect();
    let weight_vec: Vec<u128> = weights.values().copied().collect();

    let mut originated: BTreeMap<Asn, BTreeSet<usize>> = BTreeMap::new();
    for (p, origins) in &view.prefix_origins {
        let Some(&i) = index.get(p) else { continue };
        for a in origins.iter().filter(|a| view.is_domestic(**a)) {
            originated.entry(*a).or_default().insert(i);
        }
    }
    let sets: Vec<CoverSet> = match coverage {
        Coverage::Originated => originated
            .iter()
            .map(|(a, els)| CoverSet {
                asn: *a,
                elements: els.iter().copied().collect(),
            })
            .collect(),
        Coverage::CustomerCone { graph, rels } => view
            .domestic
            .iter()
            .filter_map(|&a| {
                let cone = customer_cone(graph, rels, a).ok()?;
                let els: BTreeSet<usize> = cone
                    .iter()
                    .filter_map(|m| originated.get(m))
                    .flatten()
                    .copied()
                    .collect();
                (!els.is_empty()).then(|| CoverSet {
                    asn: a,
                    elements: els.into_iter().collect(),
                })
            })
            .collect(),
    };
    let required = required_coverage(coverage_target, total);
    let reachable: u128 = {
        let all: BTreeSet<usize> = sets.iter().flat_map(|s| s.elements.iter().copied()).collect();
        all.iter().map(|&e| weight_vec[e]).sum()
    };
    let (points, covered) =
        greedy_cover(&sets, &weight_vec, required).ok_or(MetricsError::Shortfall {
            required,
            reachable,
            total,
        })?;
    let as_observed = view.domestic.len();
    Ok(ControlValue {
        value: points.len() as f64 / as_observed as f64,
        points_of_control: points,
        as_observed,
        covered,
        total,
        target: coverage_target,
    })
}
