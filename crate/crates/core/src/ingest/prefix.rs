//! IP prefixes as (family, base, length) triples.

use std::fmt;
use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Address family of a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    V4,
    V6,
}

impl Family {
    /// Number of address bits in this family.
    pub fn bits(self) -> u8 {
        match self {
            Family::V4 => 32,
            Family::V6 => 128,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::V4 => "v4",
            Family::V6 => "v6",
        })
    }
}

impl FromStr for Family {
    type Err = PrefixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "v4" | "ipv4" | "4" => Ok(Family::V4),
            "v6" | "ipv6" | "6" => Ok(Family::V6),
            other => Err(PrefixError::Syntax(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("invalid prefix syntax: {0:?}")]
    Syntax(String),
    #[error("invalid prefix length /{len} for {family}")]
    Length { family: Family, len: u32 },
    #[error("host bits set below /{len} in {addr}")]
    HostBits { addr: String, len: u8 },
}

/// A CIDR block. Host bits below the mask are always zero.
///
/// Ordering is by family, then base address, then length, so a covering
/// prefix sorts immediately before the prefixes it contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prefix {
    family: Family,
    base: u128,
    len: u8,
}

impl Prefix {
    /// Builds a prefix, rejecting bad lengths and set host bits.
    pub fn new(addr: IpAddr, len: u8) -> Result<Self, PrefixError> {
        let (family, base) = split_addr(addr);
        Self::from_parts(family, base, len)
    }

    pub fn from_parts(family: Family, base: u128, len: u8) -> Result<Self, PrefixError> {
        if len > family.bits() {
            return Err(PrefixError::Length {
                family,
                len: len as u32,
            });
        }
        if family == Family::V4 && base > u32::MAX as u128 {
            return Err(PrefixError::Syntax(format!("{base:#x}")));
        }
        let p = Prefix { family, base, len };
        if base & p.host_mask() != 0 {
            return Err(PrefixError::HostBits {
                addr: p.addr().to_string(),
                len,
            });
        }
        Ok(p)
    }

    /// Builds a prefix, silently clearing any host bits.
    pub fn truncating(addr: IpAddr, len: u8) -> Result<Self, PrefixError> {
        let (family, base) = split_addr(addr);
        if len > family.bits() {
            return Err(PrefixError::Length {
                family,
                len: len as u32,
            });
        }
        let mut p = Prefix { family, base, len };
        p.base &= !p.host_mask();
        Ok(p)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    /// Network address as an integer in the family's address space.
    pub fn base(&self) -> u128 {
        self.base
    }

    pub fn addr(&self) -> IpAddr {
        match self.family {
            Family::V4 => IpAddr::V4(Ipv4Addr::from(self.base as u32)),
            Family::V6 => IpAddr::V6(Ipv6Addr::from(self.base)),
        }
    }

    fn host_bits(&self) -> u32 {
        (self.family.bits() - self.len) as u32
    }

    fn host_mask(&self) -> u128 {
        match self.host_bits() {
            0 => 0,
            128 => u128::MAX,
            n => (1u128 << n) - 1,
        }
    }

    /// Last address covered (inclusive).
    pub fn last(&self) -> u128 {
        self.base | self.host_mask()
    }

    /// Number of addresses covered. `::/0` saturates at `u128::MAX`.
    pub fn size(&self) -> u128 {
        match self.host_bits() {
            128 => u128::MAX,
            n => 1u128 << n,
        }
    }

    /// True if `other` lies inside `self` (a prefix contains itself).
    pub fn contains(&self, other: &Prefix) -> bool {
        self.family == other.family
            && self.len <= other.len
            && other.base & !self.host_mask() == self.base
    }

    /// True if `other` is strictly more specific than `self` and inside it.
    pub fn strictly_contains(&self, other: &Prefix) -> bool {
        self.len < other.len && self.contains(other)
    }

    /// The covering prefix one bit shorter, if any.
    pub fn parent(&self) -> Option<Prefix> {
        if self.len == 0 {
            return None;
        }
        let mut p = Prefix {
            family: self.family,
            base: self.base,
            len: self.len - 1,
        };
        p.base &= !p.host_mask();
        Some(p)
    }

    /// Reserved, private, loopback, link-local and multicast space.
    pub fn is_bogon(&self) -> bool {
        let table: &[(u128, u8)] = match self.family {
            Family::V4 => BOGONS_V4,
            Family::V6 => BOGONS_V6,
        };
        table.iter().any(|&(base, len)| {
            Prefix {
                family: self.family,
                base,
                len,
            }
            .contains(self)
        })
    }
}

const BOGONS_V4: &[(u128, u8)] = &[
    (0x0000_0000, 8),
    (0x0a00_0000, 8),
    (0x7f00_0000, 8),
    (0xa9fe_0000, 16),
    (0xac10_0000, 12),
    (0xc0a8_0000, 16),
    (0xe000_0000, 3),
];

const BOGONS_V6: &[(u128, u8)] = &[
    (0, 8),
    (0xfc00 << 112, 7),
    (0xfe80 << 112, 10),
    (0xff00 << 112, 8),
];

fn split_addr(addr: IpAddr) -> (Family, u128) {
    match addr {
        IpAddr::V4(a) => (Family::V4, u32::from(a) as u128),
        IpAddr::V6(a) => (Family::V6, u128::from(a)),
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.addr(), self.len)
    }
}

impl FromStr for Prefix {
    type Err = PrefixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (addr, len) = s
            .split_once('/')
            .ok_or_else(|| PrefixError::Syntax(s.to_string()))?;
        let addr: IpAddr = addr
            .parse()
            .map_err(|_| PrefixError::Syntax(s.to_string()))?;
        let len: u32 = len
            .parse()
            .map_err(|_| PrefixError::Syntax(s.to_string()))?;
        let family = split_addr(addr).0;
        if len > family.bits() as u32 {
            return Err(PrefixError::Length { family, len });
        }
        Prefix::new(addr, len as u8)
    }
}

impl Serialize for Prefix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Prefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
