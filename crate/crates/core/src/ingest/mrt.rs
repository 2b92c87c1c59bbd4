//! TABLE_DUMP_V2 RIB dump reader (RFC 6396 subset).
//!
//! Every MRT record is a 12-byte header (timestamp, type, subtype, length,
//! all big-endian) followed by `length` payload bytes. Only type 13 with
//! subtypes PEER_INDEX_TABLE, RIB_IPV4_UNICAST and RIB_IPV6_UNICAST is
//! decoded; other records are skipped and counted.

use std::collections::VecDeque;
use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};

use serde::Serialize;
use thiserror::Error;

use super::path::{normalize_path, Asn};
use super::prefix::{Family, Prefix};
use super::rib::RibEntry;
use super::IngestOptions;

pub const TABLE_DUMP_V2: u16 = 13;
pub const PEER_INDEX_TABLE: u16 = 1;
pub const RIB_IPV4_UNICAST: u16 = 2;
pub const RIB_IPV6_UNICAST: u16 = 4;

const HEADER_LEN: usize = 12;
const ATTR_AS_PATH: u8 = 2;
const SEG_AS_SET: u8 = 1;
const SEG_AS_SEQUENCE: u8 = 2;
const SEG_CONFED_SEQUENCE: u8 = 3;
const SEG_CONFED_SET: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MrtError {
    #[error("truncated MRT header at offset {offset}")]
    TruncatedHeader { offset: usize },
    #[error("truncated MRT record at offset {offset}: header announces {need} payload bytes, {have} present")]
    TruncatedPayload {
        offset: usize,
        need: usize,
        have: usize,
    },
    #[error("malformed {what} at offset {offset}")]
    Malformed { offset: usize, what: &'static str },
    #[error("RIB record at offset {offset} precedes the PEER_INDEX_TABLE")]
    MissingPeerIndex { offset: usize },
}

impl MrtError {
    pub fn offset(&self) -> usize {
        match *self {
            MrtError::TruncatedHeader { offset }
            | MrtError::TruncatedPayload { offset, .. }
            | MrtError::Malformed { offset, .. }
            | MrtError::MissingPeerIndex { offset } => offset,
        }
    }
}

/// Counters accumulated while reading a dump.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MrtStats {
    pub records: usize,
    /// RIB rows seen, before any filtering.
    pub rib_entries: usize,
    pub entries: usize,
    /// Rows whose AS_PATH carried an AS_SET segment.
    pub as_set_skipped: usize,
    /// Rows without an AS_PATH or with an empty one.
    pub no_path: usize,
    /// Rows whose path failed validation (loops, ASN 0).
    pub invalid_path: usize,
    pub bogons: usize,
    /// Records of an unsupported type or subtype.
    pub unknown_records: usize,
}

#[derive(Debug, Clone)]
struct Peer {
    asn: Asn,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8], base: usize) -> Self {
        Cursor { data, pos: 0, base }
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], MrtError> {
        if self.data.len() - self.pos < n {
            return Err(MrtError::Malformed {
                offset: self.base + self.pos,
                what,
            });
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, MrtError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, MrtError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, MrtError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn offset(&self) -> usize {
        self.base + self.pos
    }

    fn is_empty(&self) -> bool {
        self.pos == self.data.len()
    }
}

/// Streaming reader over an in-memory MRT dump.
///
/// Yields one [`RibEntry`] per (prefix, RIB entry) pair. After a fatal error
/// the iterator is exhausted, so entries read before a corrupt record remain
/// usable.
pub struct MrtReader<'a> {
    buf: &'a [u8],
    pos: usize,
    collector: String,
    opts: IngestOptions,
    peers: Option<Vec<Peer>>,
    vantages: Vec<String>,
    pending: VecDeque<RibEntry>,
    stats: MrtStats,
    done: bool,
}

impl<'a> MrtReader<'a> {
    /// `collector` names the vantage prefix; when empty the dump's view name
    /// is used instead.
    pub fn new(buf: &'a [u8], collector: &str, opts: IngestOptions) -> Self {
        MrtReader {
            buf,
            pos: 0,
            collector: collector.to_string(),
            opts,
            peers: None,
            vantages: Vec::new(),
            pending: VecDeque::new(),
            stats: MrtStats::default(),
            done: false,
        }
    }

    pub fn stats(&self) -> &MrtStats {
        &self.stats
    }

    /// Byte offset of the next unread record.
    pub fn position(&self) -> usize {
        self.pos
    }

    fn next_record(&mut self) -> Result<bool, MrtError> {
        let start = self.pos;
        let rest = &self.buf[start..];
        if rest.is_empty() {
            return Ok(false);
        }
        if rest.len() < HEADER_LEN {
            return Err(MrtError::TruncatedHeader { offset: start });
        }
        let timestamp = u32::from_be_bytes([rest[0], rest[1], rest[2], rest[3]]);
        let kind = u16::from_be_bytes([rest[4], rest[5]]);
        let subtype = u16::from_be_bytes([rest[6], rest[7]]);
        let length = u32::from_be_bytes([rest[8], rest[9], rest[10], rest[11]]) as usize;
        let have = rest.len() - HEADER_LEN;
        if have < length {
            return Err(MrtError::TruncatedPayload {
                offset: start,
                need: length,
                have,
            });
        }
        let payload = &rest[HEADER_LEN..HEADER_LEN + length];
        let body = start + HEADER_LEN;
        self.stats.records += 1;
        match (kind, subtype) {
            (TABLE_DUMP_V2, PEER_INDEX_TABLE) => self.peer_index(payload, body)?,
            (TABLE_DUMP_V2, RIB_IPV4_UNICAST) => {
                self.rib(payload, body, timestamp, Family::V4, start)?
            }
            (TABLE_DUMP_V2, RIB_IPV6_UNICAST) => {
                self.rib(payload, body, timestamp, Family::V6, start)?
            }
            _ => {
                self.stats.unknown_records += 1;
                log::debug!("skipping MRT record type {kind}/{subtype} at offset {start}");
            }
        }
        self.pos = body + length;
        Ok(true)
    }

    fn peer_index(&mut self, payload: &[u8], base: usize) -> Result<(), MrtError> {
        let mut c = Cursor::new(payload, base);
        c.u32("collector BGP ID")?;
        let name_len = c.u16("view name length")? as usize;
        let view = String::from_utf8_lossy(c.take(name_len, "view name")?).into_owned();
        let count = c.u16("peer count")? as usize;
        let mut peers = Vec::with_capacity(count);
        for _ in 0..count {
            let peer_type = c.u8("peer type")?;
            c.u32("peer BGP ID")?;
            let ip_len = if peer_type & 0x01 != 0 { 16 } else { 4 };
            c.take(ip_len, "peer address")?;
            let asn = if peer_type & 0x02 != 0 {
                c.u32("peer AS")?
            } else {
                c.u16("peer AS")? as u32
            };
            peers.push(Peer { asn: Asn(asn) });
        }
        let collector = if !self.collector.is_empty() {
            self.collector.clone()
        } else if !view.is_empty() {
            view
        } else {
            "mrt".to_string()
        };
        self.vantages = peers
            .iter()
            .map(|p| format!("{collector}:{}", p.asn))
            .collect();
        self.peers = Some(peers);
        Ok(())
    }

    fn rib(
        &mut self,
        payload: &[u8],
        base: usize,
        timestamp: u32,
        family: Family,
        record_offset: usize,
    ) -> Result<(), MrtError> {
        let Some(peers) = self.peers.as_ref() else {
            return Err(MrtError::MissingPeerIndex {
                offset: record_offset,
            });
        };
        let npeers = peers.len();
        let mut c = Cursor::new(payload, base);
        c.u32("sequence number")?;
        let at = c.offset();
        let plen = c.u8("prefix length")?;
        if plen > family.bits() {
            return Err(MrtError::Malformed {
                offset: at,
                what: "prefix length",
            });
        }
        let raw = c.take((plen as usize).div_ceil(8), "prefix")?;
        let addr = match family {
            Family::V4 => {
                let mut b = [0u8; 4];
                b[..raw.len()].copy_from_slice(raw);
                IpAddr::V4(Ipv4Addr::from(b))
            }
            Family::V6 => {
                let mut b = [0u8; 16];
                b[..raw.len()].copy_from_slice(raw);
                IpAddr::V6(Ipv6Addr::from(b))
            }
        };
        let prefix = Prefix::truncating(addr, plen).map_err(|_| MrtError::Malformed {
            offset: at,
            what: "prefix",
        })?;
        let count = c.u16("entry count")?;
        for _ in 0..count {
            let at = c.offset();
            let peer_index = c.u16("peer index")? as usize;
            if peer_index >= npeers {
                return Err(MrtError::Malformed {
                    offset: at,
                    what: "peer index",
                });
            }
            c.u32("originated time")?;
            let attr_len = c.u16("attribute length")? as usize;
            let attr_base = c.offset();
            let attrs = c.take(attr_len, "attributes")?;
            self.stats.rib_entries += 1;
            let hops = match decode_as_path(attrs, attr_base)? {
                PathOutcome::Set => {
                    self.stats.as_set_skipped += 1;
                    continue;
                }
                PathOutcome::Missing => {
                    self.stats.no_path += 1;
                    continue;
                }
                PathOutcome::Sequence(h) => h,
            };
            if hops.is_empty() {
                self.stats.no_path += 1;
                continue;
            }
            let Ok(path) = normalize_path(&hops) else {
                self.stats.invalid_path += 1;
                continue;
            };
            if timestamp == 0 {
                self.stats.invalid_path += 1;
                continue;
            }
            if self.opts.filter_bogons && prefix.is_bogon() {
                self.stats.bogons += 1;
                continue;
            }
            self.stats.entries += 1;
            self.pending.push_back(RibEntry {
                timestamp: timestamp as u64,
                vantage: self.vantages[peer_index].clone(),
                prefix,
                path,
            });
        }
        if !c.is_empty() {
            return Err(MrtError::Malformed {
                offset: c.offset(),
                what: "trailing bytes in RIB record",
            });
        }
        Ok(())
    }
}

enum PathOutcome {
    Missing,
    Set,
    Sequence(Vec<Asn>),
}

fn decode_as_path(attrs: &[u8], base: usize) -> Result<PathOutcome, MrtError> {
    let mut c = Cursor::new(attrs, base);
    let mut outcome = PathOutcome::Missing;
    while !c.is_empty() {
        let flags = c.u8("attribute flags")?;
        let code = c.u8("attribute type")?;
        let len = if flags & 0x10 != 0 {
            c.u16("attribute length")? as usize
        } else {
            c.u8("attribute length")? as usize
        };
        let value_base = c.offset();
        let value = c.take(len, "attribute value")?;
        if code != ATTR_AS_PATH {
            continue;
        }
        let mut s = Cursor::new(value, value_base);
        let mut hops = Vec::new();
        let mut has_set = false;
        while !s.is_empty() {
            let at = s.offset();
            let seg_type = s.u8("segment type")?;
            let n = s.u8("segment length")? as usize;
            let raw = s.take(n * 4, "segment ASNs")?;
            let asns = raw
                .chunks_exact(4)
                .map(|b| Asn(u32::from_be_bytes([b[0], b[1], b[2], b[3]])));
            match seg_type {
                SEG_AS_SEQUENCE => hops.extend(asns),
                SEG_AS_SET => has_set = true,
                SEG_CONFED_SEQUENCE | SEG_CONFED_SET => {}
                _ => {
                    return Err(MrtError::Malformed {
                        offset: at,
                        what: "AS_PATH segment type",
                    })
                }
            }
        }
        outcome = if has_set {
            PathOutcome::Set
        } else {
            PathOutcome::Sequence(hops)
        };
    }
    Ok(outcome)
}

impl Iterator for MrtReader<'_> {
    type Item = Result<RibEntry, MrtError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(e) = self.pending.pop_front() {
                return Some(Ok(e));
            }
            if self.done {
                return None;
            }
            match self.next_record() {
                Ok(true) => {}
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    self.pending.clear();
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Reads a complete dump. Any fatal error discards the whole parse.
pub fn parse_mrt(
    bytes: &[u8],
    collector: &str,
    opts: IngestOptions,
) -> Result<(Vec<RibEntry>, MrtStats), MrtError> {
    let mut reader = MrtReader::new(bytes, collector, opts);
    let entries = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok((entries, reader.stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(ts: u32, kind: u16, sub: u16, payload: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        v.extend_from_slice(&ts.to_be_bytes());
        v.extend_from_slice(&kind.to_be_bytes());
        v.extend_from_slice(&sub.to_be_bytes());
        v.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        v.extend_from_slice(payload);
        v
    }

    fn peer_index(asns: &[u32]) -> Vec<u8> {
        let mut p = vec![192, 0, 2, 1, 0, 0];
        p.extend_from_slice(&(asns.len() as u16).to_be_bytes());
        for &a in asns {
            p.push(0x02);
            p.extend_from_slice(&[192, 0, 2, 2]);
            p.extend_from_slice(&[198, 51, 100, 1]);
            p.extend_from_slice(&a.to_be_bytes());
        }
        record(1, TABLE_DUMP_V2, PEER_INDEX_TABLE, &p)
    }

    fn as_path_attr(segments: &[(u8, &[u32])]) -> Vec<u8> {
        let mut v = Vec::new();
        for (t, asns) in segments {
            v.push(*t);
            v.push(asns.len() as u8);
            for a in *asns {
                v.extend_from_slice(&a.to_be_bytes());
            }
        }
        let mut attr = vec![0x40, ATTR_AS_PATH, v.len() as u8];
        attr.extend(v);
        attr
    }

    fn rib_v4(ts: u32, prefix: [u8; 3], plen: u8, attrs: &[u8]) -> Vec<u8> {
        let mut p = vec![0, 0, 0, 0, plen];
        p.extend_from_slice(&prefix[..(plen as usize).div_ceil(8)]);
        p.extend_from_slice(&1u16.to_be_bytes());
        p.extend_from_slice(&0u16.to_be_bytes());
        p.extend_from_slice(&ts.to_be_bytes());
        p.extend_from_slice(&(attrs.len() as u16).to_be_bytes());
        p.extend_from_slice(attrs);
        record(ts, TABLE_DUMP_V2, RIB_IPV4_UNICAST, &p)
    }

    fn no_bogon_filter() -> IngestOptions {
        IngestOptions {
            strict: true,
            filter_bogons: false,
        }
    }

    #[test]
    fn single_entry() {
        let mut buf = peer_index(&[64500]);
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[64500, 64501])]);
        buf.extend(rib_v4(1_560_000_000, [10, 0, 0], 24, &attrs));
        let (entries, stats) = parse_mrt(&buf, "rrc00", no_bogon_filter()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].prefix.to_string(), "10.0.0.0/24");
        assert_eq!(entries[0].path.hops(), &[Asn(64500), Asn(64501)]);
        assert_eq!(entries[0].vantage, "rrc00:64500");
        assert_eq!(entries[0].timestamp, 1_560_000_000);
        assert_eq!(stats.entries, 1);
    }

    #[test]
    fn eleven_bytes_truncated_at_zero() {
        let err = parse_mrt(&[0u8; 11], "x", no_bogon_filter()).unwrap_err();
        assert_eq!(err, MrtError::TruncatedHeader { offset: 0 });
    }

    #[test]
    fn as_set_skipped_and_counted() {
        let mut buf = peer_index(&[64500]);
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[64500]), (SEG_AS_SET, &[1, 2])]);
        buf.extend(rib_v4(1_560_000_000, [10, 0, 0], 24, &attrs));
        let (entries, stats) = parse_mrt(&buf, "rrc00", no_bogon_filter()).unwrap();
        assert!(entries.is_empty());
        assert_eq!(stats.as_set_skipped, 1);
    }

    #[test]
    fn rib_before_peer_index_is_fatal() {
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[1])]);
        let buf = rib_v4(5, [2, 0, 0], 8, &attrs);
        assert_eq!(
            parse_mrt(&buf, "x", no_bogon_filter()).unwrap_err(),
            MrtError::MissingPeerIndex { offset: 0 }
        );
    }

    #[test]
    fn unknown_records_skipped() {
        let mut buf = record(1, 16, 4, &[1, 2, 3]);
        buf.extend(record(1, TABLE_DUMP_V2, 6, &[]));
        buf.extend(peer_index(&[7]));
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[7, 8])]);
        buf.extend(rib_v4(9, [2, 1, 0], 16, &attrs));
        let (entries, stats) = parse_mrt(&buf, "x", no_bogon_filter()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(stats.unknown_records, 2);
    }

    #[test]
    fn two_byte_peer_as_and_extended_length() {
        let mut p = vec![0, 0, 0, 0, 0, 4, b'v', b'i', b'e', b'w', 0, 1];
        p.push(0x00);
        p.extend_from_slice(&[1, 1, 1, 1, 2, 2, 2, 2]);
        p.extend_from_slice(&701u16.to_be_bytes());
        let mut buf = record(1, TABLE_DUMP_V2, PEER_INDEX_TABLE, &p);
        let mut attrs = vec![0x50, ATTR_AS_PATH, 0, 10, SEG_AS_SEQUENCE, 2];
        attrs.extend_from_slice(&701u32.to_be_bytes());
        attrs.extend_from_slice(&174u32.to_be_bytes());
        buf.extend(rib_v4(3, [2, 0, 0], 8, &attrs));
        let (entries, _) = parse_mrt(&buf, "", no_bogon_filter()).unwrap();
        assert_eq!(entries[0].vantage, "view:701");
        assert_eq!(entries[0].path.hops(), &[Asn(701), Asn(174)]);
    }

    #[test]
    fn truncation_never_panics() {
        let mut buf = peer_index(&[64500, 64501]);
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[64500, 64501])]);
        buf.extend(rib_v4(1_560_000_000, [2, 0, 0], 24, &attrs));
        let boundaries = [0, peer_index(&[64500, 64501]).len(), buf.len()];
        for cut in 0..buf.len() {
            let r = parse_mrt(&buf[..cut], "x", no_bogon_filter());
            assert_eq!(r.is_ok(), boundaries.contains(&cut), "cut at {cut}");
        }
    }

    #[test]
    fn partial_results_survive_corruption() {
        let mut buf = peer_index(&[1]);
        let attrs = as_path_attr(&[(SEG_AS_SEQUENCE, &[1, 2])]);
        buf.extend(rib_v4(5, [2, 0, 0], 8, &attrs));
        buf.extend_from_slice(&[0, 0, 0]);
        let mut reader = MrtReader::new(&buf, "x", no_bogon_filter());
        assert!(reader.next().unwrap().is_ok());
        assert!(matches!(
            reader.next(),
            Some(Err(MrtError::TruncatedHeader { .. }))
        ));
        assert!(reader.next().is_none());
    }
}
