//! Minimal TABLE_DUMP_V2 writer for building test dumps.
#![allow(dead_code)]

use std::net::IpAddr;

pub struct Route {
    pub prefix: &'static str,
    /// (peer index, AS_PATH segments as (type, asns)).
    pub entries: Vec<(u16, Vec<(u8, Vec<u32>)>)>,
}

fn record(ts: u32, sub: u16, payload: &[u8]) -> Vec<u8> {
    let mut v = Vec::new();
    v.extend_from_slice(&ts.to_be_bytes());
    v.extend_from_slice(&13u16.to_be_bytes());
    v.extend_from_slice(&sub.to_be_bytes());
    v.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    v.extend_from_slice(payload);
    v
}

pub fn peer_index(view: &str, peers: &[u32]) -> Vec<u8> {
    let mut p = vec![192, 0, 2, 1];
    p.extend_from_slice(&(view.len() as u16).to_be_bytes());
    p.extend_from_slice(view.as_bytes());
    p.extend_from_slice(&(peers.len() as u16).to_be_bytes());
    for (i, &asn) in peers.iter().enumerate() {
        if i % 2 == 0 {
            p.push(0x02);
            p.extend_from_slice(&[192, 0, 2, 10]);
            p.extend_from_slice(&[198, 51, 100, i as u8]);
        } else {
            p.push(0x03);
            p.extend_from_slice(&[192, 0, 2, 11]);
            p.extend_from_slice(&"2001:db8::1".parse::<std::net::Ipv6Addr>().unwrap().octets());
        }
        p.extend_from_slice(&asn.to_be_bytes());
    }
    p
}

fn as_path(segments: &[(u8, Vec<u32>)]) -> Vec<u8> {
    let mut body = Vec::new();
    for (kind, asns) in segments {
        body.push(*kind);
        body.push(asns.len() as u8);
        for a in asns {
            body.extend_from_slice(&a.to_be_bytes());
        }
    }
    let mut attr = vec![0x40, 1, 1, 0];
    if body.len() > 255 {
        attr.extend_from_slice(&[0x50, 2]);
        attr.extend_from_slice(&(body.len() as u16).to_be_bytes());
    } else {
        attr.extend_from_slice(&[0x40, 2, body.len() as u8]);
    }
    attr.extend_from_slice(&body);
    attr
}

/// A dump with a peer index followed by one RIB record per route.
pub fn dump(ts: u32, view: &str, peers: &[u32], routes: &[Route]) -> Vec<u8> {
    let mut out = record(ts, 1, &peer_index(view, peers));
    for (seq, r) in routes.iter().enumerate() {
        let (addr, len) = r.prefix.split_once('/').unwrap();
        let addr: IpAddr = addr.parse().unwrap();
        let len: u8 = len.parse().unwrap();
        let (sub, octets) = match addr {
            IpAddr::V4(a) => (2u16, a.octets().to_vec()),
            IpAddr::V6(a) => (4u16, a.octets().to_vec()),
        };
        let mut body = (seq as u32).to_be_bytes().to_vec();
        body.push(len);
        body.extend_from_slice(&octets[..(len as usize).div_ceil(8)]);
        body.extend_from_slice(&(r.entries.len() as u16).to_be_bytes());
        for (peer, segs) in &r.entries {
            let attrs = as_path(segs);
            body.extend_from_slice(&peer.to_be_bytes());
            body.extend_from_slice(&ts.to_be_bytes());
            body.extend_from_slice(&(attrs.len() as u16).to_be_bytes());
            body.extend_from_slice(&attrs);
        }
        out.extend(record(ts, sub, &body));
    }
    out
}

/// Byte offsets where each record ends.
pub fn record_ends(bytes: &[u8]) -> Vec<usize> {
    let mut ends = Vec::new();
    let mut pos = 0;
    while pos + 12 <= bytes.len() {
        let len = u32::from_be_bytes(bytes[pos + 8..pos + 12].try_into().unwrap()) as usize;
        pos += 12 + len;
        ends.push(pos);
    }
    ends
}
