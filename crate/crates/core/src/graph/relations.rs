use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::AsGraph;
use crate::ingest::{AsPath, Asn, Relationships, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("AS{0} is not in the graph")]
    UnknownAsn(Asn),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Valid,
    Invalid,
    Unknown,
}

const UP: u8 = 1;
const PEERED: u8 = 2;
const DOWN: u8 = 4;

fn advance(phases: u8, step: Step) -> u8 {
    let mut out = 0;
    for phase in [UP, PEERED, DOWN] {
        if phases & phase == 0 {
            continue;
        }
        out |= match (phase, step) {
            (_, Step::S2s) => phase,
            (UP, Step::C2p) => UP,
            (UP, Step::P2p) => PEERED,
            (_, Step::P2c) => DOWN,
            _ => 0,
        };
    }
    out
}

/// Checks a path against the pattern `c2p* p2p? p2c*`, with sibling links
/// transparent.
///
/// Hops without a known relationship may take any type. The result is
/// `Invalid` only when no assignment of the unknown hops is valley-free, and
/// `Unknown` when some assignment is but at least one hop is unlabeled.
pub fn valley_free(path: &AsPath, rels: &Relationships) -> Validity {
    let mut phases = UP;
    let mut missing = false;
    for (x, y) in path.links() {
        phases = match rels.step(x, y) {
            Some(step) => advance(phases, step),
            None => {
                missing = true;
                [Step::C2p, Step::P2p, Step::P2c, Step::S2s]
                    .into_iter()
                    .fold(0, |acc, s| acc | advance(phases, s))
            }
        };
        if phases == 0 {
            return Validity::Invalid;
        }
    }
    if missing {
        Validity::Unknown
    } else {
        Validity::Valid
    }
}

/// ASes reachable from `asn` through provider-to-customer links (siblings
/// traversed in both directions), restricted to adjacencies present in `g`.
pub fn customer_cone(
    g: &AsGraph,
    rels: &Relationships,
    asn: Asn,
) -> Result<BTreeSet<Asn>, GraphError> {
    if !g.nodes.contains_key(&asn) {
        return Err(GraphError::UnknownAsn(asn));
    }
    let adj = g.adjacency();
    let mut cone = BTreeSet::from([asn]);
    let mut queue = VecDeque::from([asn]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[&x] {
            if matches!(rels.step(x, y), Some(Step::P2c | Step::S2s)) && cone.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(cone)
}
