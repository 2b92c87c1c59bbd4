use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::{check_order, EventKind, EventRecord, EventsError, Snapshot};
use crate::ingest::{Asn, Prefix, Registry, Relationships};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct HijackScan {
    pub events: Vec<EventRecord>,
    /// Distinct prefixes passed over at least once for lacking a stable
    /// origin.
    pub unstable_skipped: usize,
}

/// The single origin `p` had in every snapshot of `window`.
fn stable_origin(window: &[Snapshot], p: &Prefix) -> Option<Asn> {
    let mut origin = None;
    for s in window {
        let os = s.origins_of(p)?;
        if os.len() != 1 {
            return None;
        }
        let o = *os.first()?;
        if origin.is_some_and(|prev| prev != o) {
            return None;
        }
        origin = Some(o);
    }
    origin
}

fn nearest_covering(snap: &Snapshot, p: &Prefix) -> Option<Prefix> {
    std::iter::successors(p.parent(), Prefix::parent).find(|q| snap.origins_of(q).is_some())
}

/// Origin-change hijacks after a learning period of `learn_window`
/// snapshots. A prefix whose origin was the same single AS in each of the
/// preceding `learn_window` snapshots raises a MOAS event for any other,
/// non-sibling origin. A prefix absent from that whole window raises a
/// sub-prefix event when its nearest announced covering prefix has a stable
/// origin that is still announcing it and differs from the new origin.
pub fn detect_hijacks(
    snaps: &[Snapshot],
    learn_window: usize,
    rels: &Relationships,
    registry: &Registry,
) -> Result<HijackScan, EventsError> {
    check_order(snaps)?;
    let w = learn_window.max(1);
    if snaps.len() <= w {
        log::warn!(
            "hijack detection needs {} snapshots, have {}",
            w + 1,
            snaps.len()
        );
        return Ok(HijackScan::default());
    }
    let mut events = Vec::new();
    let mut skipped: HashSet<Prefix> = HashSet::new();
    for i in w..snaps.len() {
        let (window, cur) = (&snaps[i - w..i], &snaps[i]);
        for (q, xs) in cur.origins() {
            let (kind, expected) = if let Some(o) = stable_origin(window, q) {
                (EventKind::MoasHijack, o)
            } else if window.iter().all(|s| s.origins_of(q).is_none()) {
                let Some(cover) = nearest_covering(cur, q) else { continue };
                let Some(o) = stable_origin(window, &cover) else { continue };
                if !cur.origins_of(&cover).is_some_and(|os| os.contains(&o)) {
                    continue;
                }
                (EventKind::SubprefixHijack, o)
            } else {
                skipped.insert(*q);
                continue;
            };
            for &x in xs {
                if x == expected || rels.is_sibling(expected, x) {
                    continue;
                }
                let t_end = snaps[i + 1..]
                    .iter()
                    .find(|s| !s.origins_of(q).is_some_and(|os| os.contains(&x)))
                    .map(|s| s.timestamp);
                events.push(EventRecord {
                    t_start: cur.timestamp,
                    kind,
                    prefix: *q,
                    expected_origin: Some(expected),
                    observed_origin: Some(x),
                    t_end,
                    country: registry.country_of_prefix(q),
                });
            }
        }
    }
    events.sort();
    let skipped: BTreeSet<Prefix> = skipped.into_iter().collect();
    Ok(HijackScan {
        events,
        unstable_skipped: skipped.len(),
    })
}
