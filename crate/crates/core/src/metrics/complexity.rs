//! Address-weighted route diversity inside a country.
//!
//! For each domestically originated prefix `p`, the domestic segment of an
//! observed path is its longest suffix made only of domestic ASes. With
//! `R_p` distinct segments and `w_p` the prefix's most-specific address
//! weight normalized over observed prefixes, the score is
//! `sum_p w_p * log2(R_p)` bits.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::control::exclusive_weights;
use super::view::CountryView;
use super::MetricsError;
use crate::ingest::{Asn, Family, Prefix, RibEntry};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Complexity {
    pub bits: f64,
    /// Prefixes contributing to the score.
    pub observed_prefixes: usize,
    /// Domestic prefixes with no observed path, left out of the weights.
    pub excluded_prefixes: usize,
}

/// Longest suffix of `hops` lying entirely inside `view.domestic`.
pub fn domestic_segment<'a>(view: &CountryView, hops: &'a [Asn]) -> &'a [Asn] {
    let start = hops
        .iter()
        .rposition(|a| !view.is_domestic(*a))
        .map_or(0, |i| i + 1);
    &hops[start..]
}

pub fn complexity_score<'a>(
    view: &CountryView,
    entries: impl IntoIterator<Item = &'a RibEntry>,
    family: Family,
) -> Result<Complexity, MetricsError> {
    if view.domestic.is_empty() {
        return Err(MetricsError::EmptyView(view.country));
    }
    let weights = exclusive_weights(view.prefix_origins.keys(), family);
    let mut segments: BTreeMap<Prefix, HashSet<&[Asn]>> = BTreeMap::new();
    for e in entries {
        if !weights.contains_key(&e.prefix) {
            continue;
        }
        let seg = domestic_segment(view, e.path.hops());
        if seg.is_empty() {
            continue;
        }
        segments.entry(e.prefix).or_default().insert(seg);
    }
    let excluded = weights.len() - segments.len();
    if excluded > 0 {
        log::warn!(
            "{}: {excluded} domestic prefixes have no observed domestic path",
            view.country
        );
    }
    let norm: u128 = segments.keys().map(|p| weights[p]).sum();
    if norm == 0 {
        return Err(MetricsError::NoObservedPaths(view.country));
    }
    let bits = segments
        .iter()
        .map(|(p, segs)| weights[p] as f64 / norm as f64 * (segs.len() as f64).log2())
        .sum();
    Ok(Complexity {
        bits,
        observed_prefixes: segments.len(),
        excluded_prefixes: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_table_line, CountryCode};
    use std::collections::BTreeSet;

    fn view(domestic: &[u32], prefixes: &[(&str, u32)]) -> CountryView {
        let mut v = CountryView {
            country: "SY".parse::<CountryCode>().unwrap(),
            domestic: domestic.iter().map(|&a| Asn(a)).collect(),
            ..Default::default()
        };
        for (p, o) in prefixes {
            v.prefix_origins
                .insert(p.parse().unwrap(), BTreeSet::from([Asn(*o)]));
        }
        v
    }

    fn rows(lines: &[&str]) -> Vec<RibEntry> {
        lines
            .iter()
            .map(|l| parse_table_line(l, 1).unwrap().unwrap())
            .collect()
    }

    #[test]
    fn segment_extraction() {
        let v = view(&[1, 2, 3], &[]);
        let hops = [Asn(9), Asn(2), Asn(8), Asn(1), Asn(3)];
        assert_eq!(domestic_segment(&v, &hops), &[Asn(1), Asn(3)]);
        assert!(domestic_segment(&v, &[Asn(1), Asn(9)]).is_empty());
        assert_eq!(domestic_segment(&v, &[Asn(1), Asn(2)]).len(), 2);
    }

    #[test]
    fn star_is_zero() {
        // Every prefix reaches the outside through the single hub AS 1.
        let v = view(&[1, 2, 3], &[("2.0.0.0/24", 2), ("2.0.1.0/24", 3)]);
        let e = rows(&[
            "1|a|2.0.0.0/24|100 1 2",
            "1|b|2.0.0.0/24|200 1 2",
            "1|a|2.0.1.0/24|100 1 3",
        ]);
        let c = complexity_score(&v, &e, Family::V4).unwrap();
        assert_eq!(c.bits, 0.0);
    }

    #[test]
    fn four_segments_two_bits() {
        let v = view(&[1, 2, 3, 4, 5], &[("2.0.0.0/24", 5)]);
        let e = rows(&[
            "1|a|2.0.0.0/24|100 1 5",
            "1|b|2.0.0.0/24|100 2 5",
            "1|c|2.0.0.0/24|100 3 5",
            "1|d|2.0.0.0/24|100 4 1 5",
        ]);
        assert_eq!(complexity_score(&v, &e, Family::V4).unwrap().bits, 2.0);
    }

    #[test]
    fn weighted_two_and_eight() {
        let v = view(
            &[1, 2, 3, 4, 5, 6, 7, 8, 10, 11],
            &[("2.0.0.0/24", 10), ("2.0.1.0/24", 11)],
        );
        let mut lines = vec![
            "1|a|2.0.0.0/24|100 1 10".to_string(),
            "1|a|2.0.0.0/24|100 2 10".to_string(),
        ];
        for k in 1..=8 {
            lines.push(format!("1|a|2.0.1.0/24|100 {k} 11"));
        }
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let c = complexity_score(&v, &rows(&refs), Family::V4).unwrap();
        assert!((c.bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unobserved_prefix_excluded() {
        let v = view(&[1, 2, 3], &[("2.0.0.0/24", 3), ("2.0.1.0/24", 3)]);
        let e = rows(&["1|a|2.0.0.0/24|100 1 3", "1|a|2.0.0.0/24|100 2 3"]);
        let c = complexity_score(&v, &e, Family::V4).unwrap();
        assert_eq!(c.bits, 1.0);
        assert_eq!(c.excluded_prefixes, 1);
    }

    #[test]
    fn duplicate_rows_ignored() {
        let v = view(&[1, 2, 3], &[("2.0.0.0/24", 3)]);
        let one = rows(&["1|a|2.0.0.0/24|100 1 3", "1|a|2.0.0.0/24|100 2 3"]);
        let mut two = one.clone();
        two.extend(one.clone());
        assert_eq!(
            complexity_score(&v, &one, Family::V4).unwrap(),
            complexity_score(&v, &two, Family::V4).unwrap()
        );
    }

    #[test]
    fn empty_and_unobserved() {
        let v = view(&[], &[]);
        assert!(matches!(
            complexity_score(&v, &[], Family::V4),
            Err(MetricsError::EmptyView(_))
        ));
        let v = view(&[1], &[("2.0.0.0/24", 1)]);
        assert!(matches!(
            complexity_score(&v, &[], Family::V4),
            Err(MetricsError::NoObservedPaths(_))
        ));
    }
}
