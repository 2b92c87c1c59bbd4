//! Per-country summary combining the tallies, control value, complexity and
//! egress analysis.

use std::io::Write;

use serde::Serialize;

use super::complexity::complexity_score;
use super::control::{control_value_with, Coverage};
use super::egress::{egress_bottlenecks, EgressShare};
use super::view::country_view;
use crate::graph::AsGraph;
use crate::ingest::{Asn, CountryCode, Family, Registry, RibEntry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub coverage_target: f64,
    pub family: Family,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            coverage_target: 0.9,
            family: Family::V4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub country: CountryCode,
    pub family: Family,
    /// Delegated ASNs in the registry.
    pub as_total: usize,
    /// Domestic ASes originating at least one prefix.
    pub as_advertised: usize,
    /// Domestic ASes present in the graph.
    pub as_observed: usize,
    pub internal_edges: usize,
    pub external_edges: usize,
    pub external_unknown: usize,
    pub total_addr: u128,
    pub control_value: Option<f64>,
    pub points_of_control: Vec<Asn>,
    pub complexity: Option<f64>,
    pub bottlenecks: Vec<EgressShare>,
    pub gatekeepers: Vec<Asn>,
    /// Metrics that could not be computed, with the reason.
    pub notes: Vec<String>,
}

pub fn country_report<'a>(
    g: &AsGraph,
    entries: &'a [RibEntry],
    registry: &Registry,
    cc: CountryCode,
    opts: ReportOptions,
) -> MetricsReport {
    let view = country_view(g, registry, cc);
    let mut notes = Vec::new();
    let control = control_value_with(&view, opts.coverage_target, opts.family, Coverage::Originated)
        .map_err(|e| notes.push(format!("control value: {e}")))
        .ok();
    let complexity = complexity_score(&view, entries, opts.family)
        .map_err(|e| notes.push(format!("complexity: {e}")))
        .ok();
    let egress = egress_bottlenecks(&view, entries, g, opts.family)
        .map_err(|e| notes.push(format!("egress: {e}")))
        .ok();
    MetricsReport {
        country: cc,
        family: opts.family,
        as_total: registry.delegated_asns(cc),
        as_advertised: view.advertising().len(),
        as_observed: view.domestic.len(),
        internal_edges: view.internal_edges,
        external_edges: view.external_edges,
        external_unknown: view.external_unknown,
        total_addr: view.total_addr.get(opts.family),
        control_value: control.as_ref().map(|c| c.value),
        points_of_control: control.map(|c| c.points_of_control).unwrap_or_default(),
        complexity: complexity.map(|c| c.bits),
        bottlenecks: egress.as_ref().map(|e| e.ranked.clone()).unwrap_or_default(),
        gatekeepers: egress.map(|e| e.cut.into_iter().collect()).unwrap_or_default(),
        notes,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn join(asns: &[Asn]) -> String {
    asns.iter().map(Asn::to_string).collect::<Vec<_>>().join(" ")
}

/// One row per report. AS lists are space separated inside their cell.
pub fn write_reports_csv<W: Write>(reports: &[MetricsReport], w: W) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "country",
        "family",
        "as_total",
        "as_advertised",
        "as_observed",
        "internal_edges",
        "external_edges",
        "external_unknown",
        "total_addr",
        "control_value",
        "points_of_control",
        "complexity",
        "top_egress",
        "top_egress_share",
        "gatekeepers",
    ])?;
    for r in reports {
        let top = r.bottlenecks.first();
        wr.write_record([
            r.country.to_string(),
            r.family.to_string(),
            r.as_total.to_string(),
            r.as_advertised.to_string(),
            r.as_observed.to_string(),
            r.internal_edges.to_string(),
            r.external_edges.to_string(),
            r.external_unknown.to_string(),
            r.total_addr.to_string(),
            opt(r.control_value),
            join(&r.points_of_control),
            opt(r.complexity),
            top.map(|s| s.asn.to_string()).unwrap_or_default(),
            opt(top.map(|s| s.share)),
            join(&r.gatekeepers),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::{parse_delegations, parse_table_line, Relationships};

    #[test]
    fn toy_country() {
        let reg_text = "ripencc|IR|asn|1|3|20100101|allocated\nripencc|US|asn|9|1|20100101|allocated\n";
        let reg = Registry::new(parse_delegations(reg_text.as_bytes(), &Default::default()).unwrap().records);
        let entries: Vec<RibEntry> = [
            "1|a|2.0.0.0/24|9 1 2",
            "1|a|2.0.1.0/24|9 1 3",
            "1|a|2.0.2.0/23|9 1",
        ]
        .iter()
        .map(|l| parse_table_line(l, 1).unwrap().unwrap())
        .collect();
        let g = build_graph(&entries, &reg, &Relationships::default());
        let r = country_report(&g, &entries, &reg, "IR".parse().unwrap(), ReportOptions::default());
        assert_eq!(r.as_total, 3);
        assert_eq!(r.as_observed, 3);
        assert_eq!(r.as_advertised, 3);
        assert_eq!((r.internal_edges, r.external_edges), (2, 1));
        assert_eq!(r.total_addr, 1024);
        // AS1 holds half, AS2 and AS3 a quarter each: 90% needs all three.
        assert_eq!(r.points_of_control, vec![Asn(1), Asn(2), Asn(3)]);
        assert_eq!(r.control_value, Some(1.0));
        assert_eq!(r.complexity, Some(0.0));
        assert_eq!(r.gatekeepers, vec![Asn(1)]);
        assert!(r.notes.is_empty());

        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("IR,v4,3,3,3,2,1,0,1024,1.000000,1 2 3,0.000000,1,1.000000,1"));
    }
}
