use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A 32-bit autonomous system number.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Asn(pub u32);

impl Asn {
    /// AS_TRANS placeholder; kept as an ordinary hop.
    pub const TRANS: Asn = Asn(23456);

    /// Private-use or reserved range. These stay in paths but never get a
    /// country.
    pub fn is_private(self) -> bool {
        matches!(self.0, 64512..=65534 | 4_200_000_000..=4_294_967_294)
    }
}

impl fmt::Display for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Asn {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_prefix("AS").unwrap_or(s);
        match s.parse::<u32>() {
            Ok(0) => Err(PathError::ZeroAsn),
            Ok(v) => Ok(Asn(v)),
            Err(_) => Err(PathError::BadAsn(s.to_string())),
        }
    }
}

impl From<u32> for Asn {
    fn from(v: u32) -> Self {
        Asn(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("empty AS path")]
    Empty,
    #[error("routing loop: AS{0} repeats non-adjacently")]
    Loop(Asn),
    #[error("ASN 0 is not a valid hop")]
    ZeroAsn,
    #[error("non-numeric ASN {0:?}")]
    BadAsn(String),
}

/// A loop-free AS path with prepending collapsed. The last hop is the origin.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct AsPath(Vec<Asn>);

impl AsPath {
    pub fn hops(&self) -> &[Asn] {
        &self.0
    }

    pub fn origin(&self) -> Asn {
        *self.0.last().expect("AsPath is never empty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Adjacent hop pairs in path order.
    pub fn links(&self) -> impl Iterator<Item = (Asn, Asn)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

impl fmt::Display for AsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, asn) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{asn}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u32>> for AsPath {
    type Error = PathError;

    fn try_from(raw: Vec<u32>) -> Result<Self, Self::Error> {
        let hops: Vec<Asn> = raw.into_iter().map(Asn).collect();
        normalize_path(&hops)
    }
}

impl From<AsPath> for Vec<u32> {
    fn from(p: AsPath) -> Self {
        p.0.into_iter().map(|a| a.0).collect()
    }
}

/// Collapses prepending and validates the result.
pub fn normalize_path(raw: &[Asn]) -> Result<AsPath, PathError> {
    if raw.is_empty() {
        return Err(PathError::Empty);
    }
    let mut hops: Vec<Asn> = Vec::with_capacity(raw.len());
    for &asn in raw {
        if asn.0 == 0 {
            return Err(PathError::ZeroAsn);
        }
        if hops.last() == Some(&asn) {
            continue;
        }
        if hops.contains(&asn) {
            return Err(PathError::Loop(asn));
        }
        hops.push(asn);
    }
    Ok(AsPath(hops))
}
