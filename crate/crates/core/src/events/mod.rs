//! Routing events across a time-ordered sequence of table snapshots.

mod export;
mod hijack;
mod outage;
mod regression;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{Asn, CountryCode, Prefix, Registry, RibEntry};

pub use export::{write_events_csv, write_events_jsonl};
pub use hijack::{detect_hijacks, HijackScan};
pub use outage::{detect_outages, outage_fraction, peak_outage_fraction};
pub use regression::{event_regression, FittedPoint, RegressionFit, RegressionPoint, Transform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventsError {
    #[error("need history: at least 2 snapshots are required, got {0}")]
    NeedHistory(usize),
    #[error("snapshot timestamps must strictly increase (snapshot {index} at {ts})")]
    NotIncreasing { index: usize, ts: u64 },
    #[error("regression needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("regression regressor has zero variance")]
    ZeroVariance,
    #[error("{0} has a non-positive AS count")]
    NonPositiveAsCount(CountryCode),
    #[error("confidence level {0} is outside (0, 1)")]
    InvalidLevel(f64),
}

/// All tables observed at one timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub timestamp: u64,
    pub entries: Vec<RibEntry>,
    visibility: BTreeMap<Prefix, BTreeSet<String>>,
    origins: BTreeMap<Prefix, BTreeSet<Asn>>,
}

impl Snapshot {
    pub fn new(timestamp: u64, entries: Vec<RibEntry>) -> Self {
        let mut visibility: BTreeMap<Prefix, BTreeSet<String>> = BTreeMap::new();
        let mut origins: BTreeMap<Prefix, BTreeSet<Asn>> = BTreeMap::new();
        for e in &entries {
            visibility.entry(e.prefix).or_default().insert(e.vantage.clone());
            origins.entry(e.prefix).or_default().insert(e.origin());
        }
        Snapshot {
            timestamp,
            entries,
            visibility,
            origins,
        }
    }

    /// Vantages seeing each prefix.
    pub fn visibility(&self) -> &BTreeMap<Prefix, BTreeSet<String>> {
        &self.visibility
    }

    pub fn origins(&self) -> &BTreeMap<Prefix, BTreeSet<Asn>> {
        &self.origins
    }

    pub fn vantage_count(&self, p: &Prefix) -> usize {
        self.visibility.get(p).map_or(0, BTreeSet::len)
    }

    pub fn origins_of(&self, p: &Prefix) -> Option<&BTreeSet<Asn>> {
        self.origins.get(p)
    }
}

/// Groups entries into snapshots by timestamp, in ascending order.
pub fn group_snapshots(entries: impl IntoIterator<Item = RibEntry>) -> Vec<Snapshot> {
    let mut by_ts: BTreeMap<u64, Vec<RibEntry>> = BTreeMap::new();
    for e in entries {
        by_ts.entry(e.timestamp).or_default().push(e);
    }
    by_ts
        .into_iter()
        .map(|(ts, es)| Snapshot::new(ts, es))
        .collect()
}

pub(crate) fn check_order(snaps: &[Snapshot]) -> Result<(), EventsError> {
    for (i, w) in snaps.windows(2).enumerate() {
        if w[1].timestamp <= w[0].timestamp {
            return Err(EventsError::NotIncreasing {
                index: i + 1,
                ts: w[1].timestamp,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Outage,
    MoasHijack,
    SubprefixHijack,
}

impl EventKind {
    pub fn is_hijack(self) -> bool {
        self != EventKind::Outage
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Outage => "outage",
            EventKind::MoasHijack => "moas_hijack",
            EventKind::SubprefixHijack => "subprefix_hijack",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EventRecord {
    pub t_start: u64,
    pub kind: EventKind,
    pub prefix: Prefix,
    pub expected_origin: Option<Asn>,
    pub observed_origin: Option<Asn>,
    /// First snapshot where the condition no longer holds.
    pub t_end: Option<u64>,
    pub country: CountryCode,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub outages: usize,
    pub hijacks: usize,
}

impl EventCounts {
    pub fn total(&self) -> usize {
        self.outages + self.hijacks
    }
}

/// Event counts by the registered country of each event's prefix.
pub fn country_event_rate(events: &[EventRecord], registry: &Registry) -> BTreeMap<CountryCode, EventCounts> {
    let mut out: BTreeMap<CountryCode, EventCounts> = BTreeMap::new();
    for e in events {
        let c = out.entry(registry.country_of_prefix(&e.prefix)).or_default();
        if e.kind.is_hijack() {
            c.hijacks += 1;
        } else {
            c.outages += 1;
        }
    }
    out
}
