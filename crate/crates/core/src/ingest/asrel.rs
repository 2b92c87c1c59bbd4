//! AS relationship files (`a|b|code`) and AS name lists.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::path::Asn;
use super::{IngestError, IngestOptions, LineError, LineErrorKind, ParseReport, Parsed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    /// `a` is a provider of `b`.
    P2c,
    P2p,
    S2s,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelRecord {
    pub a: Asn,
    pub b: Asn,
    pub rel: Rel,
}

/// Relationship of one path step `x -> y`, read in the direction of the
/// announcement's propagation toward the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// `x` is a customer of `y`.
    C2p,
    /// `x` is a provider of `y`.
    P2c,
    P2p,
    S2s,
}

/// Symmetric lookup over relationship records.
#[derive(Debug, Clone, Default)]
pub struct Relationships {
    steps: HashMap<(Asn, Asn), Step>,
}

impl Relationships {
    pub fn new<'a>(records: impl IntoIterator<Item = &'a RelRecord>) -> Self {
        let mut steps = HashMap::new();
        for r in records {
            let (fwd, back) = match r.rel {
                Rel::P2c => (Step::P2c, Step::C2p),
                Rel::P2p => (Step::P2p, Step::P2p),
                Rel::S2s => (Step::S2s, Step::S2s),
            };
            steps.insert((r.a, r.b), fwd);
            steps.insert((r.b, r.a), back);
        }
        Relationships { steps }
    }

    pub fn step(&self, x: Asn, y: Asn) -> Option<Step> {
        self.steps.get(&(x, y)).copied()
    }

    pub fn is_sibling(&self, x: Asn, y: Asn) -> bool {
        self.step(x, y) == Some(Step::S2s)
    }

    pub fn len(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn parse_rel_file<R: BufRead>(
    reader: R,
    opts: &IngestOptions,
    code_to_rel: fn(&str) -> Option<Rel>,
) -> Result<Parsed<RelRecord>, IngestError> {
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| LineError {
            line: i + 1,
            kind: LineErrorKind::Field(msg),
        };
        let row = (|| {
            let fields: Vec<&str> = line.split('|').collect();
            if fields.len() < 3 {
                return Err(err(format!("expected a|b|code, found {line:?}")));
            }
            let a: Asn = fields[0].parse().map_err(|e| LineError {
                line: i + 1,
                kind: LineErrorKind::Path(e),
            })?;
            let b: Asn = fields[1].parse().map_err(|e| LineError {
                line: i + 1,
                kind: LineErrorKind::Path(e),
            })?;
            if a == b {
                return Err(err(format!("self relationship on AS{a}")));
            }
            let rel = code_to_rel(fields[2].trim())
                .ok_or_else(|| err(format!("unknown relationship code {:?}", fields[2])))?;
            Ok(RelRecord { a, b, rel })
        })();
        match row {
            Ok(r) => {
                report.rows += 1;
                records.push(r);
            }
            Err(e) if opts.strict => return Err(e.into()),
            Err(e) => report.errors.push(e),
        }
    }
    Ok(Parsed { records, report })
}

/// Serial-1 (and serial-2, extra fields ignored): `-1` is p2c, `0` is p2p.
pub fn parse_asrel<R: BufRead>(
    reader: R,
    opts: &IngestOptions,
) -> Result<Parsed<RelRecord>, IngestError> {
    parse_rel_file(reader, opts, |code| match code {
        "-1" => Some(Rel::P2c),
        "0" => Some(Rel::P2p),
        _ => None,
    })
}

/// Sibling file of `a|b|1` rows.
pub fn parse_siblings<R: BufRead>(
    reader: R,
    opts: &IngestOptions,
) -> Result<Parsed<RelRecord>, IngestError> {
    parse_rel_file(reader, opts, |code| (code == "1").then_some(Rel::S2s))
}

/// `ASN name...` lines, e.g. `12880 DCI-AS, IR`. Unparseable lines are ignored.
pub fn parse_asnames<R: BufRead>(reader: R) -> Result<BTreeMap<Asn, String>, IngestError> {
    let mut names = BTreeMap::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let Some((asn, name)) = line.split_once(|c: char| c.is_whitespace() || c == '|') else {
            continue;
        };
        if let Ok(asn) = asn.parse::<Asn>() {
            let name = name.trim();
            if !name.is_empty() {
                names.insert(asn, name.to_string());
            }
        }
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict() -> IngestOptions {
        IngestOptions {
            strict: true,
            filter_bogons: false,
        }
    }

    #[test]
    fn codes() {
        let r = parse_asrel("# header\n1|2|-1\n1|3|0\n".as_bytes(), &strict()).unwrap();
        assert_eq!(
            r.records,
            vec![
                RelRecord { a: Asn(1), b: Asn(2), rel: Rel::P2c },
                RelRecord { a: Asn(1), b: Asn(3), rel: Rel::P2p },
            ]
        );
    }

    #[test]
    fn serial2_extra_field() {
        let r = parse_asrel("1|2|-1|bgp\n".as_bytes(), &strict()).unwrap();
        assert_eq!(r.records.len(), 1);
    }

    #[test]
    fn row_errors() {
        let e = parse_asrel("1|1|0\n".as_bytes(), &strict()).unwrap_err();
        assert!(e.to_string().contains("self relationship"), "{e}");
        assert!(parse_asrel("1|2|5\n".as_bytes(), &strict()).is_err());
        assert!(parse_asrel("1|2|1\n".as_bytes(), &strict()).is_err());
        let lenient = parse_asrel("1|2|5\n1|2|0\n".as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(lenient.records.len(), 1);
        assert_eq!(lenient.report.errors.len(), 1);
    }

    #[test]
    fn siblings_and_steps() {
        let mut recs = parse_siblings("5|6|1\n".as_bytes(), &strict()).unwrap().records;
        recs.extend(parse_asrel("1|2|-1\n".as_bytes(), &strict()).unwrap().records);
        let rels = Relationships::new(&recs);
        assert_eq!(rels.step(Asn(1), Asn(2)), Some(Step::P2c));
        assert_eq!(rels.step(Asn(2), Asn(1)), Some(Step::C2p));
        assert!(rels.is_sibling(Asn(6), Asn(5)));
        assert_eq!(rels.step(Asn(1), Asn(5)), None);
        assert_eq!(rels.len(), 2);
    }

    #[test]
    fn names() {
        let n = parse_asnames("12880 DCI-AS, IR\nAS58224 TCI\nbad\n".as_bytes()).unwrap();
        assert_eq!(n[&Asn(12880)], "DCI-AS, IR");
        assert_eq!(n[&Asn(58224)], "TCI");
        assert_eq!(n.len(), 2);
    }
}
