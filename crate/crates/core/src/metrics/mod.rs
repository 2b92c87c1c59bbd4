//! Per-country measurements over the AS graph.

mod complexity;
mod control;
mod egress;
mod growth;
mod report;
mod span;
mod view;

use thiserror::Error;

use crate::graph::CutError;
use crate::ingest::CountryCode;

pub use complexity::{complexity_score, domestic_segment, Complexity};
pub use control::{
    control_value, control_value_with, exclusive_weights, greedy_cover, required_coverage,
    ControlValue, CoverSet, Coverage,
};
pub use egress::{egress_bottlenecks, exit_hop, Egress, EgressShare};
pub use growth::{growth_series, GrowthPoint};
pub use report::{country_report, write_reports_csv, MetricsReport, ReportOptions};
pub use span::{address_span, merged_intervals, AddressSpan};
pub use view::{country_view, neighbor_histogram, CountryView};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("coverage target {0} is outside (0, 1]")]
    InvalidTarget(f64),
    #[error("{0} has no announced addresses")]
    NoAddresses(CountryCode),
    #[error("{0} has no observed ASes")]
    EmptyView(CountryCode),
    #[error("{0} has no observed paths for its prefixes")]
    NoObservedPaths(CountryCode),
    #[error("{0} has no frontier ASes")]
    NoFrontier(CountryCode),
    #[error("coverage shortfall: need {required} of {total} addresses, candidates reach {reachable}")]
    Shortfall {
        required: u128,
        reachable: u128,
        total: u128,
    },
    #[error(transparent)]
    Cut(CutError),
}
