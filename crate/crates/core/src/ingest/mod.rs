//! Parsers for the external data formats: MRT TABLE_DUMP_V2 RIB dumps,
//! pipe-separated text tables, RIR delegated-extended statistics, AS
//! relationship files and AS name lists.
//!
//! Every parser is pure over its input. Bulk archives are normally read in
//! lenient mode, where malformed rows are skipped and counted; fixtures use
//! strict mode, where the first malformed row aborts the parse.

mod asrel;
mod delegations;
pub mod mrt;
mod path;
mod prefix;
mod rib;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use asrel::{parse_asnames, parse_asrel, parse_siblings, Rel, RelRecord, Relationships, Step};
pub use delegations::{
    decompose_range, parse_delegations, CountryCode, RecordKind, Registry, RegistryRecord,
    Resource, Status,
};
pub use mrt::{parse_mrt, MrtError, MrtReader, MrtStats};
pub use path::{normalize_path, AsPath, Asn, PathError};
pub use prefix::{Family, Prefix, PrefixError};
pub use rib::{parse_table_line, parse_table_text, RibEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Abort on the first malformed row instead of skipping it.
    pub strict: bool,
    /// Drop RIB rows for reserved address space.
    pub filter_bogons: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            strict: false,
            filter_bogons: true,
        }
    }
}

impl IngestOptions {
    pub fn for_mode(mode: ParseMode) -> Self {
        IngestOptions {
            strict: mode == ParseMode::Strict,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineErrorKind {
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("{0}")]
    Field(String),
}

/// A rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub kind: LineErrorKind,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.kind)
    }
}

impl std::error::Error for LineError {}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Line(#[from] LineError),
    #[error(transparent)]
    Mrt(#[from] MrtError),
}

/// Tallies from a text-format parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Records accepted.
    pub rows: usize,
    /// Rows rejected in lenient mode.
    pub errors: Vec<LineError>,
    /// Rows dropped by the bogon filter.
    pub bogons: usize,
    /// Non-fatal oddities (unknown row types, malformed dates).
    pub warnings: Vec<String>,
}

impl Serialize for ParseReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ParseReport", 4)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("errors", &self.errors.len())?;
        st.serialize_field("bogons", &self.bogons)?;
        st.serialize_field("warnings", &self.warnings.len())?;
        st.end()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub report: ParseReport,
}
