use std::collections::BTreeSet;

use super::{check_order, EventKind, EventRecord, EventsError, Snapshot};
use crate::ingest::{CountryCode, Prefix, Registry};

/// A prefix seen by at least `min_vis` vantages that drops to zero opens an
/// outage; it closes at the first snapshot where any vantage sees it again.
pub fn detect_outages(
    snaps: &[Snapshot],
    min_vis: usize,
    registry: &Registry,
) -> Result<Vec<EventRecord>, EventsError> {
    if snaps.len() < 2 {
        return Err(EventsError::NeedHistory(snaps.len()));
    }
    check_order(snaps)?;
    let prefixes: BTreeSet<Prefix> = snaps
        .iter()
        .flat_map(|s| s.visibility().keys().copied())
        .collect();
    let mut events = Vec::new();
    for p in prefixes {
        let mut open: Option<EventRecord> = None;
        for w in snaps.windows(2) {
            let (prev, cur) = (&w[0], &w[1]);
            let vis = cur.vantage_count(&p);
            match open.as_mut() {
                Some(ev) if vis > 0 => {
                    ev.t_end = Some(cur.timestamp);
                    events.extend(open.take());
                }
                Some(_) => {}
                None if vis == 0 && prev.vantage_count(&p) >= min_vis => {
                    open = Some(EventRecord {
                        t_start: cur.timestamp,
                        kind: EventKind::Outage,
                        prefix: p,
                        expected_origin: prev.origins_of(&p).and_then(|o| o.first().copied()),
                        observed_origin: None,
                        t_end: None,
                        country: registry.country_of_prefix(&p),
                    });
                }
                None => {}
            }
        }
        events.extend(open);
    }
    events.sort();
    Ok(events)
}

/// Share of `cc`'s prefixes in outage at time `at`, over the country's
/// prefixes seen in any snapshot up to `at`.
pub fn outage_fraction(
    events: &[EventRecord],
    snaps: &[Snapshot],
    registry: &Registry,
    cc: CountryCode,
    at: u64,
) -> f64 {
    let known: BTreeSet<Prefix> = snaps
        .iter()
        .take_while(|s| s.timestamp <= at)
        .flat_map(|s| s.visibility().keys())
        .filter(|p| registry.country_of_prefix(p) == cc)
        .copied()
        .collect();
    if known.is_empty() {
        return 0.0;
    }
    let dark: BTreeSet<Prefix> = events
        .iter()
        .filter(|e| e.kind == EventKind::Outage && known.contains(&e.prefix))
        .filter(|e| e.t_start <= at && e.t_end.map_or(true, |t| at < t))
        .map(|e| e.prefix)
        .collect();
    dark.len() as f64 / known.len() as f64
}

/// Largest [`outage_fraction`] over the snapshot timestamps, earliest first
/// on ties.
pub fn peak_outage_fraction(
    events: &[EventRecord],
    snaps: &[Snapshot],
    registry: &Registry,
    cc: CountryCode,
) -> Option<(u64, f64)> {
    snaps
        .iter()
        .map(|s| (s.timestamp, outage_fraction(events, snaps, registry, cc, s.timestamp)))
        .fold(None, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::ingest::Asn;

    fn seen_by(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|v| format!("v{v}|{prefix}|100 7")).collect()
    }

    fn snap_n(ts: u64, n: usize) -> Snapshot {
        let rows = seen_by(n, "2.0.0.0/24");
        snap(ts, &rows.iter().map(String::as_str).collect::<Vec<_>>())
    }

    #[test]
    fn five_to_zero() {
        let reg = registry(&[("IR", "2.0.0.0/16")]);
        let ev = detect_outages(&[snap_n(1, 5), snap_n(2, 0)], 3, &reg).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].t_start, 2);
        assert_eq!(ev[0].t_end, None);
        assert_eq!(ev[0].expected_origin, Some(Asn(7)));
        assert_eq!(ev[0].country, "IR".parse().unwrap());
    }

    #[test]
    fn partial_loss_is_not_outage() {
        let reg = registry(&[]);
        assert!(detect_outages(&[snap_n(1, 5), snap_n(2, 2)], 3, &reg).unwrap().is_empty());
    }

    #[test]
    fn closes_on_return() {
        let reg = registry(&[]);
        let ev = detect_outages(&[snap_n(1, 5), snap_n(2, 0), snap_n(3, 0), snap_n(4, 4)], 3, &reg).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].t_start, ev[0].t_end), (2, Some(4)));
    }

    #[test]
    fn low_visibility_guard() {
        let reg = registry(&[]);
        assert!(detect_outages(&[snap_n(1, 2), snap_n(2, 0)], 3, &reg).unwrap().is_empty());
    }

    #[test]
    fn two_gaps_two_records() {
        let reg = registry(&[]);
        let s = [snap_n(1, 3), snap_n(2, 0), snap_n(3, 3), snap_n(4, 0)];
        let ev = detect_outages(&s, 3, &reg).unwrap();
        assert_eq!(ev.len(), 2);
    }

    #[test]
    fn needs_history_and_order() {
        let reg = registry(&[]);
        assert_eq!(detect_outages(&[snap_n(1, 5)], 3, &reg), Err(EventsError::NeedHistory(1)));
        assert!(matches!(
            detect_outages(&[snap_n(2, 5), snap_n(2, 0)], 3, &reg),
            Err(EventsError::NotIncreasing { .. })
        ));
    }

    #[test]
    fn fraction_44_percent() {
        let reg = registry(&[("IR", "2.0.0.0/16")]);
        let mut before = Vec::new();
        let mut after = Vec::new();
        for i in 0..25 {
            let rows = seen_by(3, &format!("2.0.{i}.0/24"));
            before.extend(rows.clone());
            if i >= 11 {
                after.extend(rows);
            }
        }
        let s0 = snap(1, &before.iter().map(String::as_str).collect::<Vec<_>>());
        let s1 = snap(2, &after.iter().map(String::as_str).collect::<Vec<_>>());
        let snaps = [s0, s1];
        let ev = detect_outages(&snaps, 3, &reg).unwrap();
        assert_eq!(ev.len(), 11);
        let ir = "IR".parse().unwrap();
        assert!((outage_fraction(&ev, &snaps, &reg, ir, 2) - 0.44).abs() < 1e-12);
        assert_eq!(outage_fraction(&ev, &snaps, &reg, ir, 1), 0.0);
        assert_eq!(peak_outage_fraction(&ev, &snaps, &reg, ir).unwrap().0, 2);
    }
}
