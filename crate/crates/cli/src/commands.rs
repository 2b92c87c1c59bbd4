use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use asborder::events::{
    country_event_rate, detect_hijacks, detect_outages, event_regression, group_snapshots,
    peak_outage_fraction, write_events_csv, write_events_jsonl, RegressionPoint,
};
use asborder::graph::{betweenness, export, major_nodes, AsGraph};
use asborder::ingest::{parse_table_text, CountryCode, MrtReader, RibEntry};
use asborder::metrics::{
    country_report, country_view, growth_series, neighbor_histogram, write_reports_csv, ReportOptions,
};
use serde_json::{json, Value};

use crate::config::{require_existing, usage, RunConfig};
use crate::load;

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("writing {}", path.display()))?,
    ))
}

fn write_json(path: &Path, v: &Value) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn parse_country(s: &str) -> anyhow::Result<CountryCode> {
    s.parse().map_err(|_| usage(format!("invalid country code {s:?}")))
}

pub fn ingest(cfg: &RunConfig) -> anyhow::Result<()> {
    if cfg.mrt.is_empty() && cfg.tables.is_empty() {
        return Err(usage("nothing to ingest: set `mrt` or `tables`"));
    }
    require_existing("input", cfg.mrt.iter().chain(&cfg.tables))?;
    let opts = load::options(cfg);
    let mut entries: Vec<RibEntry> = Vec::new();
    let mut inputs = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    for root in &cfg.mrt {
        let collector = root
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let files = load::expand_inputs(root)?;
        if files.is_empty() {
            warnings.push(format!("{}: no files", root.display()));
        }
        for f in files {
            let bytes = std::fs::read(&f).with_context(|| format!("reading {}", f.display()))?;
            let mut reader = MrtReader::new(&bytes, &collector, opts);
            let mut error = None;
            for item in reader.by_ref() {
                match item {
                    Ok(e) => entries.push(e),
                    Err(e) if cfg.strict => {
                        return Err(usage(format!("{}: {e}", f.display())));
                    }
                    Err(e) => error = Some(e.to_string()),
                }
            }
            if let Some(e) = &error {
                warnings.push(format!("{}: {e}; kept entries read before it", f.display()));
            }
            inputs.push(json!({
                "path": f.display().to_string(),
                "format": "mrt",
                "stats": serde_json::to_value(reader.stats())?,
                "error": error,
            }));
        }
    }
    for root in &cfg.tables {
        let files = load::expand_inputs(root)?;
        if files.is_empty() {
            warnings.push(format!("{}: no files", root.display()));
        }
        for f in files {
            let file = File::open(&f).with_context(|| format!("opening {}", f.display()))?;
            let parsed = parse_table_text(std::io::BufReader::new(file), &opts)
                .map_err(|e| usage(format!("{}: {e}", f.display())))?;
            for e in parsed.report.errors.iter().take(20) {
                warnings.push(format!("{}: {e}", f.display()));
            }
            inputs.push(json!({
                "path": f.display().to_string(),
                "format": "text",
                "stats": serde_json::to_value(&parsed.report)?,
            }));
            entries.extend(parsed.records);
        }
    }
    entries.sort();
    entries.dedup();
    if entries.is_empty() {
        warnings.push("no routing entries ingested".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let rib = cfg.rib_path();
    let mut w = create(&rib)?;
    for e in &entries {
        writeln!(w, "{e}")?;
    }
    w.flush()?;
    let snapshots: BTreeSet<u64> = entries.iter().map(|e| e.timestamp).collect();
    let vantages: BTreeSet<&str> = entries.iter().map(|e| e.vantage.as_str()).collect();
    write_json(
        &cfg.out.join("ingest_summary.json"),
        &json!({
            "rows": entries.len(),
            "snapshots": snapshots.len(),
            "vantages": vantages.len(),
            "inputs": inputs,
            "warnings": warnings,
        }),
    )?;
    println!("{} rows in {} snapshots -> {}", entries.len(), snapshots.len(), rib.display());
    Ok(())
}

pub fn graph(cfg: &RunConfig) -> anyhow::Result<()> {
    let world = load::world(cfg, false)?;
    let g = &world.graph;
    export::write_edge_list(g, create(&cfg.out.join("graph.csv"))?)?;

    let bc = betweenness(g);
    let mut w = create(&cfg.out.join("betweenness.csv"))?;
    writeln!(w, "asn,country,betweenness")?;
    for (asn, score) in &bc.nodes {
        writeln!(w, "{asn},{},{score}", g.nodes[asn].country)?;
    }
    w.flush()?;
    let mut ranked: Vec<_> = bc.nodes.iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(a.1).then(a.0.cmp(b.0)));
    let top: Vec<Value> = ranked
        .iter()
        .take(10)
        .map(|(a, s)| json!({"asn": a, "country": g.nodes[a].country, "betweenness": s}))
        .collect();
    write_json(
        &cfg.out.join("graph_summary.json"),
        &json!({
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "edges_before_prune": world.edges_before_prune,
            "tables": g.tables,
            "prune_min_obs": cfg.prune_min_obs,
            "major_min_prefixes": cfg.major_min_prefixes,
            "major_nodes": major_nodes(g, cfg.major_min_prefixes).len(),
            "top_betweenness": top,
        }),
    )?;
    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(())
}

/// Parses `2005-2019` or a single year.
fn parse_years(s: &str) -> anyhow::Result<std::ops::RangeInclusive<u32>> {
    let bad = || usage(format!("invalid year range {s:?}"));
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

pub fn metrics(cfg: &RunConfig, countries: &[String], all: bool, years: Option<&str>) -> anyhow::Result<()> {
    if countries.is_empty() && !all {
        return Err(usage("name at least one --country or pass --all"));
    }
    let years = years.map(parse_years).transpose()?;
    let world = load::world(cfg, true)?;
    let ccs: Vec<CountryCode> = if all {
        world.registry.countries().into_iter().collect()
    } else {
        let mut v = Vec::new();
        for c in countries {
            let cc = parse_country(c)?;
            if !world.registry.has_country(cc) {
                return Err(usage(format!("country {cc} has no registry records")));
            }
            v.push(cc);
        }
        v
    };
    let opts = ReportOptions {
        coverage_target: cfg.coverage_target,
        family: cfg.family,
    };
    let mut reports = Vec::new();
    let mut json_rows = Vec::new();
    for cc in &ccs {
        let r = country_report(&world.graph, &world.entries, &world.registry, *cc, opts);
        for n in &r.notes {
            log::warn!("{cc}: {n}");
        }
        let view = country_view(&world.graph, &world.registry, *cc);
        let mut v = serde_json::to_value(&r)?;
        v["neighbors"] = serde_json::to_value(neighbor_histogram(&view, &world.graph))?;
        json_rows.push(v);
        reports.push(r);
    }
    write_reports_csv(&reports, create(&cfg.out.join("metrics.csv"))?)?;
    write_json(&cfg.out.join("metrics.json"), &Value::Array(json_rows))?;
    if let Some(years) = years {
        let mut w = create(&cfg.out.join("growth.csv"))?;
        writeln!(w, "country,year,count,world,share")?;
        for cc in &ccs {
            for p in growth_series(&world.registry, *cc, years.clone()) {
                writeln!(w, "{cc},{},{},{},{}", p.year, p.count, p.world, p.share)?;
            }
        }
        w.flush()?;
    }
    println!("{} country reports -> {}", reports.len(), cfg.out.join("metrics.csv").display());
    Ok(())
}

pub fn events(cfg: &RunConfig) -> anyhow::Result<()> {
    let registry = load::registry(cfg, false)?;
    let rels = load::relationships(cfg)?;
    let snaps = group_snapshots(load::rib(cfg)?);
    if snaps.len() < 2 {
        return Err(usage(format!(
            "need history: events need at least 2 snapshots, found {}",
            snaps.len()
        )));
    }
    let outages = detect_outages(&snaps, cfg.min_vis, &registry).map_err(|e| usage(e.to_string()))?;
    let scan = detect_hijacks(&snaps, cfg.learn_window, &rels, &registry).map_err(|e| usage(e.to_string()))?;
    let mut events = outages;
    events.extend(scan.events);
    events.sort();
    write_events_jsonl(&events, create(&cfg.out.join("events.jsonl"))?)?;
    write_events_csv(&events, create(&cfg.out.join("events.csv"))?)?;

    let rates = country_event_rate(&events, &registry);
    let by_country: serde_json::Map<String, Value> = rates
        .iter()
        .map(|(cc, c)| {
            let peak = peak_outage_fraction(&events, &snaps, &registry, *cc);
            (
                cc.to_string(),
                json!({
                    "outages": c.outages,
                    "hijacks": c.hijacks,
                    "peak_outage_fraction": peak.map(|p| p.1),
                    "peak_at": peak.map(|p| p.0),
                }),
            )
        })
        .collect();
    write_json(
        &cfg.out.join("events_summary.json"),
        &json!({
            "snapshots": snaps.len(),
            "first": snaps.first().map(|s| s.timestamp),
            "last": snaps.last().map(|s| s.timestamp),
            "min_vis": cfg.min_vis,
            "learn_window": cfg.learn_window,
            "events": events.len(),
            "unstable_skipped": scan.unstable_skipped,
            "by_country": by_country,
        }),
    )?;

    let points: Vec<RegressionPoint> = registry
        .countries()
        .into_iter()
        .filter_map(|cc| {
            let n = registry.delegated_asns(cc);
            (n > 0).then(|| RegressionPoint {
                country: cc,
                as_count: n as f64,
                event_count: rates.get(&cc).map_or(0, |c| c.total()) as f64,
            })
        })
        .collect();
    let reg_path = cfg.out.join("regression.json");
    match event_regression(&points, cfg.level, cfg.transform) {
        Ok(fit) => write_json(&reg_path, &serde_json::to_value(&fit)?)?,
        Err(e) => {
            log::warn!("regression skipped: {e}");
            if reg_path.exists() {
                std::fs::remove_file(&reg_path)?;
            }
        }
    }
    println!("{} events over {} snapshots", events.len(), snaps.len());
    Ok(())
}

/// Reads `country,as_count,event_count` rows; a header row is allowed.
fn read_points(path: &Path) -> anyhow::Result<Vec<RegressionPoint>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("country")) {
            continue;
        }
        let bad = |what: &str| usage(format!("{}:{}: {what}", path.display(), i + 1));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bad("expected country,as_count,event_count"));
        }
        out.push(RegressionPoint {
            country: parse_country(f[0])?,
            as_count: f[1].parse().map_err(|_| bad("bad as_count"))?,
            event_count: f[2].parse().map_err(|_| bad("bad event_count"))?,
        });
    }
    Ok(out)
}

pub fn regress(cfg: &RunConfig, points: &Path) -> anyhow::Result<()> {
    require_existing("points file", [&points.to_path_buf()])?;
    let pts = read_points(points)?;
    let fit = event_regression(&pts, cfg.level, cfg.transform).map_err(|e| usage(e.to_string()))?;
    write_json(&cfg.out.join("regression.json"), &serde_json::to_value(&fit)?)?;
    println!(
        "slope {:.4}, intercept {:.4}, R2 {:.4}, flagged: {}",
        fit.slope,
        fit.intercept,
        fit.r_squared,
        fit.flagged().map(|p| p.country.to_string()).collect::<Vec<_>>().join(" ")
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportWhat {
    Graph,
    Country,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Dot,
    Gexf,
    Csv,
}

/// Domestic ASes plus their foreign neighbors.
fn country_subgraph(g: &AsGraph, world: &load::World, cc: CountryCode) -> AsGraph {
    let view = country_view(g, &world.registry, cc);
    let keep: BTreeSet<_> = view.domestic.union(&view.foreign_neighbors(g)).copied().collect();
    g.subgraph(&keep)
}

pub fn export(
    cfg: &RunConfig,
    what: ExportWhat,
    format: ExportFormat,
    country: Option<&str>,
    output: Option<PathBuf>,
) -> anyhow::Result<()> {
    let (cc, stem) = match (what, country) {
        (ExportWhat::Graph, _) => (None, "graph".to_string()),
        (ExportWhat::Country, Some(c)) => {
            let cc = parse_country(c)?;
            (Some(cc), cc.to_string())
        }
        (ExportWhat::Country, None) => return Err(usage("--country is required for a country export")),
    };
    let world = load::world(cfg, cc.is_some())?;
    let g = match cc {
        Some(cc) => {
            if !world.registry.has_country(cc) {
                return Err(usage(format!("country {cc} has no registry records")));
            }
            country_subgraph(&world.graph, &world, cc)
        }
        None => world.graph.clone(),
    };
    let ext = match format {
        ExportFormat::Dot => "dot",
        ExportFormat::Gexf => "gexf",
        ExportFormat::Csv => "csv",
    };
    let path = output.unwrap_or_else(|| cfg.out.join(format!("{stem}.{ext}")));
    let mut w = create(&path)?;
    match format {
        ExportFormat::Dot => w.write_all(export::to_dot(&g).as_bytes())?,
        ExportFormat::Gexf => w.write_all(export::to_gexf(&g).as_bytes())?,
        ExportFormat::Csv => export::write_edge_list(&g, &mut w)?,
    }
    w.flush()?;
    println!("{} nodes, {} edges -> {}", g.node_count(), g.edge_count(), path.display());
    Ok(())
}
