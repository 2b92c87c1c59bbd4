use serde::Serialize;

use crate::ingest::{CountryCode, RecordKind, Registry};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub year: u32,
    /// Delegated ASNs of the country allocated by the end of `year`.
    pub count: usize,
    /// The same count over every registry record.
    pub world: usize,
    /// `count / world`, zero when the world count is zero.
    pub share: f64,
}

/// Cumulative delegated ASN counts per year end. Records without a usable
/// date are left out.
pub fn growth_series(
    registry: &Registry,
    cc: CountryCode,
    years: impl IntoIterator<Item = u32>,
) -> Vec<GrowthPoint> {
    let dated: Vec<(u32, CountryCode)> = registry
        .records()
        .iter()
        .filter(|r| r.kind == RecordKind::Asn && r.status.is_delegated())
        .filter_map(|r| r.year().map(|y| (y, r.country)))
        .collect();
    years
        .into_iter()
        .map(|year| {
            let upto = dated.iter().filter(|(y, _)| *y <= year);
            let world = upto.clone().count();
            let count = upto.filter(|(_, c)| *c == cc).count();
            GrowthPoint {
                year,
                count,
                world,
                share: if world == 0 { 0.0 } else { count as f64 / world as f64 },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_delegations;

    fn registry(rows: &[(&str, u32, u32)]) -> Registry {
        let mut text = String::new();
        let mut asn = 1;
        for (cc, year, n) in rows {
            for _ in 0..*n {
                text.push_str(&format!("ripencc|{cc}|asn|{asn}|1|{year}0601|allocated\n"));
                asn += 1;
            }
        }
        Registry::new(parse_delegations(text.as_bytes(), &Default::default()).unwrap().records)
    }

    #[test]
    fn cumulative() {
        let reg = registry(&[("IR", 2009, 2), ("IR", 2010, 3)]);
        let s = growth_series(&reg, "IR".parse().unwrap(), 2009..=2010);
        assert_eq!(s.iter().map(|p| p.count).collect::<Vec<_>>(), vec![2, 5]);
    }

    #[test]
    fn empty_country() {
        let reg = registry(&[("IR", 2009, 2)]);
        let s = growth_series(&reg, "TR".parse().unwrap(), 2008..=2009);
        assert!(s.iter().all(|p| p.count == 0 && p.share == 0.0));
        assert_eq!(s[0].world, 0);
    }

    #[test]
    fn world_share() {
        let reg = registry(&[("IR", 2009, 2), ("US", 2009, 98)]);
        let s = growth_series(&reg, "IR".parse().unwrap(), [2009]);
        assert_eq!(s[0].world, 100);
        assert_eq!(s[0].share, 0.02);
    }
}
