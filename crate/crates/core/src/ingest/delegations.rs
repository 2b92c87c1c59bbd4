//! RIR delegated-extended statistics.
//!
//! Rows look like `registry|cc|type|start|value|date|status[|opaque-id]`.
//! For `ipv4` rows the value is an address count, for `ipv6` rows it is a
//! prefix length, and for `asn` rows it is the number of consecutive ASNs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::net::IpAddr;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::path::Asn;
use super::prefix::{Family, Prefix, PrefixError};
use super::{IngestError, IngestOptions, LineError, LineErrorKind, ParseReport, Parsed};

/// ISO-3166 alpha-2 code, or `ZZ` when unknown.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub const UNKNOWN: CountryCode = CountryCode(*b"ZZ");

    pub fn is_unknown(self) -> bool {
        self == Self::UNKNOWN
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ASCII letters")
    }
}

impl FromStr for CountryCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        if b.len() == 2 && b.iter().all(u8::is_ascii_alphabetic) {
            Ok(CountryCode([
                b[0].to_ascii_uppercase(),
                b[1].to_ascii_uppercase(),
            ]))
        } else {
            Err(format!("invalid country code {s:?}"))
        }
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Default for CountryCode {
    fn default() -> Self {
        Self::UNKNOWN
    }
}

impl Serialize for CountryCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CountryCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Asn,
    V4Block,
    V6Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Allocated,
    Assigned,
    Other,
}

impl Status {
    pub fn is_delegated(self) -> bool {
        matches!(self, Status::Allocated | Status::Assigned)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Resource {
    Asn(Asn),
    /// Minimal CIDR cover of the delegated range.
    Block(Vec<Prefix>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryRecord {
    pub registry: String,
    pub country: CountryCode,
    pub kind: RecordKind,
    pub resource: Resource,
    /// Addresses in the block; zero for ASN rows.
    pub addr_count: u128,
    /// Allocation date as `YYYYMMDD`, or 0 when missing or malformed.
    pub date: u32,
    pub status: Status,
}

impl RegistryRecord {
    pub fn year(&self) -> Option<u32> {
        (self.date != 0).then_some(self.date / 10_000)
    }
}

/// Splits `count` addresses starting at `start` into the minimal list of
/// aligned CIDR blocks.
pub fn decompose_range(family: Family, start: u128, count: u128) -> Result<Vec<Prefix>, PrefixError> {
    let bits = family.bits() as u32;
    let space_max: u128 = if bits == 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    };
    if count == 0 || start > space_max || count - 1 > space_max - start {
        return Err(PrefixError::Syntax(format!(
            "range of {count} addresses at {start:#x} does not fit the {family} space"
        )));
    }
    let mut out = Vec::new();
    let mut cur = start;
    let mut remaining = count;
    loop {
        let align = if cur == 0 { bits } else { cur.trailing_zeros().min(bits) };
        let fit = 127 - remaining.leading_zeros();
        let k = align.min(fit);
        out.push(Prefix::from_parts(family, cur, (bits - k) as u8)?);
        let size = 1u128 << k;
        remaining -= size;
        if remaining == 0 {
            break;
        }
        cur += size;
    }
    Ok(out)
}

fn parse_date(s: &str) -> Option<u32> {
    if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v: u32 = s.parse().ok()?;
    let (month, day) = ((v / 100) % 100, v % 100);
    ((1..=12).contains(&month) && (1..=31).contains(&day)).then_some(v)
}

fn is_header(fields: &[&str]) -> bool {
    fields.iter().any(|f| *f == "summary")
        || fields
            .first()
            .is_some_and(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit() || b == b'.'))
}

fn parse_row(
    fields: &[&str],
    lineno: usize,
    report: &mut ParseReport,
) -> Result<Vec<RegistryRecord>, LineError> {
    let err = |msg: String| LineError {
        line: lineno,
        kind: LineErrorKind::Field(msg),
    };
    if fields.len() < 7 {
        return Err(err(format!("expected at least 7 fields, found {}", fields.len())));
    }
    let country = match fields[1] {
        "" | "*" => CountryCode::UNKNOWN,
        cc => cc.parse().map_err(err)?,
    };
    let date = match parse_date(fields[5]) {
        Some(d) => d,
        None => {
            report
                .warnings
                .push(format!("line {lineno}: malformed date {:?}", fields[5]));
            0
        }
    };
    let status = match fields[6] {
        "allocated" => Status::Allocated,
        "assigned" => Status::Assigned,
        _ => Status::Other,
    };
    let base = |kind, resource, addr_count| RegistryRecord {
        registry: fields[0].to_string(),
        country,
        kind,
        resource,
        addr_count,
        date,
        status,
    };
    match fields[2] {
        "asn" => {
            let first: u32 = fields[3]
                .parse()
                .map_err(|_| err(format!("bad ASN {:?}", fields[3])))?;
            let n: u32 = fields[4]
                .parse()
                .map_err(|_| err(format!("bad ASN count {:?}", fields[4])))?;
            if n == 0 || first.checked_add(n - 1).is_none() {
                return Err(err(format!("bad ASN range {first}+{n}")));
            }
            Ok((0..n)
                .map(|i| base(RecordKind::Asn, Resource::Asn(Asn(first + i)), 0))
                .collect())
        }
        "ipv4" => {
            let addr: IpAddr = fields[3]
                .parse()
                .ok()
                .filter(IpAddr::is_ipv4)
                .ok_or_else(|| err(format!("bad IPv4 address {:?}", fields[3])))?;
            let count: u128 = fields[4]
                .parse()
                .map_err(|_| err(format!("bad address count {:?}", fields[4])))?;
            let start = match addr {
                IpAddr::V4(a) => u32::from(a) as u128,
                IpAddr::V6(_) => unreachable!(),
            };
            let prefixes = decompose_range(Family::V4, start, count).map_err(|e| LineError {
                line: lineno,
                kind: LineErrorKind::Prefix(e),
            })?;
            Ok(vec![base(RecordKind::V4Block, Resource::Block(prefixes), count)])
        }
        "ipv6" => {
            let addr: IpAddr = fields[3]
                .parse()
                .ok()
                .filter(IpAddr::is_ipv6)
                .ok_or_else(|| err(format!("bad IPv6 address {:?}", fields[3])))?;
            let len: u8 = fields[4]
                .parse()
                .ok()
                .filter(|l| *l <= 128)
                .ok_or_else(|| err(format!("bad IPv6 prefix length {:?}", fields[4])))?;
            let p = Prefix::new(addr, len).map_err(|e| LineError {
                line: lineno,
                kind: LineErrorKind::Prefix(e),
            })?;
            Ok(vec![base(RecordKind::V6Block, Resource::Block(vec![p]), p.size())])
        }
        other => {
            report
                .warnings
                .push(format!("line {lineno}: unknown resource type {other:?}"));
            Ok(Vec::new())
        }
    }
}

pub fn parse_delegations<R: BufRead>(
    reader: R,
    opts: &IngestOptions,
) -> Result<Parsed<RegistryRecord>, IngestError> {
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if is_header(&fields) {
            continue;
        }
        match parse_row(&fields, i + 1, &mut report) {
            Ok(rows) => {
                report.rows += rows.len();
                records.extend(rows);
            }
            Err(e) if opts.strict => return Err(e.into()),
            Err(e) => report.errors.push(e),
        }
    }
    Ok(Parsed { records, report })
}

/// Lookup index over registry records.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    records: Vec<RegistryRecord>,
    asn_country: HashMap<Asn, CountryCode>,
    blocks: BTreeMap<(Family, u128), (u128, CountryCode)>,
}

impl Registry {
    pub fn new(records: Vec<RegistryRecord>) -> Self {
        let mut asn_country = HashMap::new();
        let mut blocks = BTreeMap::new();
        for r in &records {
            if r.country.is_unknown() {
                continue;
            }
            match &r.resource {
                Resource::Asn(a) if !a.is_private() => {
                    asn_country.insert(*a, r.country);
                }
                Resource::Asn(_) => {}
                Resource::Block(ps) => {
                    for p in ps {
                        blocks.insert((p.family(), p.base()), (p.last(), r.country));
                    }
                }
            }
        }
        Registry {
            records,
            asn_country,
            blocks,
        }
    }

    pub fn records(&self) -> &[RegistryRecord] {
        &self.records
    }

    /// Registered country of an ASN; private ASNs are always `ZZ`.
    pub fn country_of_asn(&self, asn: Asn) -> CountryCode {
        self.asn_country.get(&asn).copied().unwrap_or_default()
    }

    /// Country of the registered block fully containing `p`.
    pub fn country_of_prefix(&self, p: &Prefix) -> CountryCode {
        self.blocks
            .range(..=(p.family(), p.base()))
            .next_back()
            .filter(|((fam, _), (last, _))| *fam == p.family() && *last >= p.last())
            .map(|(_, (_, cc))| *cc)
            .unwrap_or_default()
    }

    /// Countries with at least one record.
    pub fn countries(&self) -> BTreeSet<CountryCode> {
        self.records
            .iter()
            .map(|r| r.country)
            .filter(|c| !c.is_unknown())
            .collect()
    }

    pub fn has_country(&self, cc: CountryCode) -> bool {
        self.records.iter().any(|r| r.country == cc)
    }

    /// Delegated (allocated or assigned) ASNs registered to `cc`.
    pub fn delegated_asns(&self, cc: CountryCode) -> usize {
        self.records
            .iter()
            .filter(|r| r.country == cc && r.kind == RecordKind::Asn && r.status.is_delegated())
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Parsed<RegistryRecord> {
        parse_delegations(
            text.as_bytes(),
            &IngestOptions {
                strict: true,
                filter_bogons: false,
            },
        )
        .unwrap()
    }

    fn p(s: &str) -> Prefix {
        s.parse().unwrap()
    }

    #[test]
    fn asn_row() {
        let r = parse("ripencc|IR|asn|12880|1|19990721|allocated").records;
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].country.as_str(), "IR");
        assert_eq!(r[0].kind, RecordKind::Asn);
        assert_eq!(r[0].resource, Resource::Asn(Asn(12880)));
        assert_eq!(r[0].date, 19990721);
        assert_eq!(r[0].year(), Some(1999));
    }

    #[test]
    fn asn_range_expands() {
        let r = parse("arin|US|asn|1000|3|20000101|assigned").records;
        assert_eq!(r.len(), 3);
        assert_eq!(r[2].resource, Resource::Asn(Asn(1002)));
    }

    #[test]
    fn ipv4_power_of_two() {
        let r = parse("ripencc|IR|ipv4|2.176.0.0|65536|20100810|allocated").records;
        assert_eq!(r[0].kind, RecordKind::V4Block);
        assert_eq!(r[0].addr_count, 65536);
        assert_eq!(r[0].resource, Resource::Block(vec![p("2.176.0.0/16")]));
    }

    #[test]
    fn ipv4_non_power_of_two() {
        let r = parse("ripencc|IR|ipv4|5.0.0.0|768|20120101|allocated").records;
        assert_eq!(
            r[0].resource,
            Resource::Block(vec![p("5.0.0.0/23"), p("5.0.2.0/24")])
        );
    }

    #[test]
    fn ipv6_count_is_length() {
        let r = parse("ripencc|IR|ipv6|2a01:5e80::|29|20120101|allocated").records;
        assert_eq!(r[0].resource, Resource::Block(vec![p("2a01:5e80::/29")]));
        assert_eq!(r[0].addr_count, 1u128 << 99);
    }

    #[test]
    fn headers_unknown_types_and_dates() {
        let text = "2|ripencc|20190601|100|19830705|20190531|+0200\n\
                    ripencc|*|asn|*|5|summary\n\
                    ripencc|IR|foo|1|1|20190101|allocated\n\
                    ripencc||ipv4|185.0.0.0|256||available\n\
                    ripencc|TR|asn|9121|1|2019xx01|allocated\n";
        let parsed = parse(text);
        assert_eq!(parsed.records.len(), 2);
        assert_eq!(parsed.records[0].country, CountryCode::UNKNOWN);
        assert_eq!(parsed.records[0].status, Status::Other);
        assert_eq!(parsed.records[1].date, 0);
        assert_eq!(parsed.report.warnings.len(), 3);
    }

    #[test]
    fn registry_lookups() {
        let parsed = parse(
            "ripencc|IR|asn|12880|1|19990721|allocated\n\
             ripencc|IR|ipv4|5.0.0.0|768|20120101|allocated\n\
             ripencc|TR|asn|9121|1|19990101|allocated\n",
        );
        let reg = Registry::new(parsed.records);
        let ir: CountryCode = "IR".parse().unwrap();
        assert_eq!(reg.country_of_asn(Asn(12880)), ir);
        assert_eq!(reg.country_of_asn(Asn(1)), CountryCode::UNKNOWN);
        assert_eq!(reg.country_of_prefix(&p("5.0.2.0/25")), ir);
        assert_eq!(reg.country_of_prefix(&p("5.0.0.0/22")), CountryCode::UNKNOWN);
        assert_eq!(reg.country_of_prefix(&p("6.0.0.0/8")), CountryCode::UNKNOWN);
        assert_eq!(reg.delegated_asns(ir), 1);
        assert_eq!(reg.countries().len(), 2);
    }

    #[test]
    fn decomposition_edges() {
        assert_eq!(
            decompose_range(Family::V4, 0, 1 << 32).unwrap(),
            vec![p("0.0.0.0/0")]
        );
        assert!(decompose_range(Family::V4, u32::MAX as u128, 2).is_err());
        assert!(decompose_range(Family::V4, 0, 0).is_err());
        assert_eq!(
            decompose_range(Family::V4, 1, 3).unwrap(),
            vec![p("0.0.0.1/32"), p("0.0.0.2/31")]
        );
    }
}
