use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::path::{normalize_path, Asn, PathError};
use super::prefix::Prefix;
use super::{IngestError, IngestOptions, LineError, LineErrorKind, ParseReport, Parsed};

/// One routing-table row: a vantage point's route to a prefix at a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RibEntry {
    pub timestamp: u64,
    pub vantage: String,
    pub prefix: Prefix,
    pub path: super::AsPath,
}

impl RibEntry {
    pub fn origin(&self) -> Asn {
        self.path.origin()
    }

    /// Identifies the routing table this row belongs to.
    pub fn table_key(&self) -> (&str, u64) {
        (&self.vantage, self.timestamp)
    }
}

/// Canonical text form: `timestamp|vantage|prefix|asn asn ...`.
impl fmt::Display for RibEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}",
            self.timestamp, self.vantage, self.prefix, self.path
        )
    }
}

/// Parses one line of the text table format. Blank and `#` lines give `None`.
pub fn parse_table_line(line: &str, lineno: usize) -> Result<Option<RibEntry>, LineError> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.trim().is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let err = |kind| LineError { line: lineno, kind };
    let fields: Vec<&str> = line.split('|').collect();
    if fields.len() != 4 {
        return Err(err(LineErrorKind::Field(format!(
            "expected 4 fields, found {}",
            fields.len()
        ))));
    }
    let timestamp: u64 = fields[0]
        .trim()
        .parse()
        .map_err(|_| err(LineErrorKind::Field(format!("bad timestamp {:?}", fields[0]))))?;
    if timestamp == 0 {
        return Err(err(LineErrorKind::Field("timestamp must be positive".into())));
    }
    let vantage = fields[1].trim();
    if vantage.is_empty() {
        return Err(err(LineErrorKind::Field("empty vantage".into())));
    }
    let prefix: Prefix = fields[2]
        .trim()
        .parse()
        .map_err(|e| err(LineErrorKind::Prefix(e)))?;
    let hops = fields[3]
        .split_whitespace()
        .map(str::parse::<Asn>)
        .collect::<Result<Vec<_>, PathError>>()
        .map_err(|e| err(LineErrorKind::Path(e)))?;
    let path = normalize_path(&hops).map_err(|e| err(LineErrorKind::Path(e)))?;
    Ok(Some(RibEntry {
        timestamp,
        vantage: vantage.to_string(),
        prefix,
        path,
    }))
}

/// Reads a whole text table.
///
/// In strict mode the first bad line aborts with its line number; in lenient
/// mode bad lines are skipped and recorded in the report.
pub fn parse_table_text<R: BufRead>(
    reader: R,
    opts: &IngestOptions,
) -> Result<Parsed<RibEntry>, IngestError> {
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        match parse_table_line(&line, i + 1) {
            Ok(None) => {}
            Ok(Some(entry)) => {
                if opts.filter_bogons && entry.prefix.is_bogon() {
                    report.bogons += 1;
                    continue;
                }
                report.rows += 1;
                records.push(entry);
            }
            Err(e) if opts.strict => return Err(IngestError::Line(e)),
            Err(e) => report.errors.push(e),
        }
    }
    Ok(Parsed { records, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ParseMode;

    fn strict_no_bogon() -> IngestOptions {
        IngestOptions {
            strict: true,
            filter_bogons: false,
        }
    }

    #[test]
    fn parses_row() {
        let e = parse_table_line("1560000000|rrc00|10.0.0.0/24|64500 64501 64502", 1)
            .unwrap()
            .unwrap();
        assert_eq!(e.origin(), Asn(64502));
        assert_eq!(e.vantage, "rrc00");
        assert_eq!(e.timestamp, 1_560_000_000);
    }

    #[test]
    fn bad_mask_is_line_error() {
        let e = parse_table_line("1560000000|rrc00|10.0.0.0/33|64500", 7).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.to_string().contains("invalid prefix length"), "{e}");
    }

    #[test]
    fn prepending_collapsed() {
        let e = parse_table_line("1560000000|rrc00|10.0.0.0/24|701 701 701 174", 1)
            .unwrap()
            .unwrap();
        assert_eq!(e.path.hops(), &[Asn(701), Asn(174)]);
    }

    #[test]
    fn other_line_errors() {
        assert!(parse_table_line("1|v|2.0.0.0/8|", 1).is_err());
        assert!(parse_table_line("1|v|2.0.0.0/8|12 x", 1).is_err());
        assert!(parse_table_line("0|v|2.0.0.0/8|12", 1).is_err());
        assert!(parse_table_line("1|v|2.0.0.0/8", 1).is_err());
        assert_eq!(parse_table_line("# comment", 1).unwrap(), None);
        assert_eq!(parse_table_line("   ", 1).unwrap(), None);
    }

    #[test]
    fn strict_aborts_lenient_counts() {
        let text = "1|a|2.0.0.0/8|1 2\n1|a|2.0.0.0/33|1\n1|a|3.0.0.0/8|1 3\n";
        let err = parse_table_text(text.as_bytes(), &strict_no_bogon()).unwrap_err();
        assert!(matches!(err, IngestError::Line(LineError { line: 2, .. })));

        let lenient = IngestOptions::for_mode(ParseMode::Lenient);
        let parsed = parse_table_text(text.as_bytes(), &lenient).unwrap();
        assert_eq!(parsed.records.len(), 2);
        assert_eq!(parsed.report.errors.len(), 1);
    }

    #[test]
    fn bogons_filtered_by_default() {
        let text = "1|a|10.0.0.0/24|1 2\n1|a|2.0.0.0/8|1 2\n";
        let parsed = parse_table_text(text.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.report.bogons, 1);
        let kept = parse_table_text(text.as_bytes(), &strict_no_bogon()).unwrap();
        assert_eq!(kept.records.len(), 2);
    }

    #[test]
    fn display_round_trips() {
        let line = "1560000000|rrc00:3356|2001:db8::/32|3356 64500";
        let e = parse_table_line(line, 1).unwrap().unwrap();
        assert_eq!(e.to_string(), line);
    }
}
