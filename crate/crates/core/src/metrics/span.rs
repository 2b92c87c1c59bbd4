use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::ingest::{Family, Prefix};

/// Distinct address counts, one per family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressSpan {
    pub v4: u128,
    pub v6: u128,
}

impl AddressSpan {
    pub fn get(&self, family: Family) -> u128 {
        match family {
            Family::V4 => self.v4,
            Family::V6 => self.v6,
        }
    }
}

impl AddAssign for AddressSpan {
    fn add_assign(&mut self, rhs: Self) {
        self.v4 = self.v4.saturating_add(rhs.v4);
        self.v6 = self.v6.saturating_add(rhs.v6);
    }
}

/// Merged, sorted, disjoint inclusive intervals covered by `prefixes`.
pub fn merged_intervals<'a>(
    prefixes: impl IntoIterator<Item = &'a Prefix>,
    family: Family,
) -> Vec<(u128, u128)> {
    let mut iv: Vec<(u128, u128)> = prefixes
        .into_iter()
        .filter(|p| p.family() == family)
        .map(|p| (p.base(), p.last()))
        .collect();
    iv.sort_unstable();
    let mut out: Vec<(u128, u128)> = Vec::with_capacity(iv.len());
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Number of distinct addresses covered by the union of `prefixes`.
pub fn address_span<'a>(prefixes: impl IntoIterator<Item = &'a Prefix> + Clone) -> AddressSpan {
    let count = |fam| {
        merged_intervals(prefixes.clone(), fam)
            .iter()
            .fold(0u128, |acc, (lo, hi)| acc.saturating_add((hi - lo).saturating_add(1)))
    };
    AddressSpan {
        v4: count(Family::V4),
        v6: count(Family::V6),
    }
}
