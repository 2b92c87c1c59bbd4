//! Reading inputs named by the run configuration.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use asborder::graph::{build_graph, prune_edges, AsGraph};
use asborder::ingest::{
    parse_asnames, parse_asrel, parse_delegations, parse_siblings, parse_table_text, Asn,
    IngestOptions, Registry, Relationships, RibEntry,
};

use crate::config::{require_existing, usage, RunConfig};

pub fn options(cfg: &RunConfig) -> IngestOptions {
    IngestOptions {
        strict: cfg.strict,
        ..Default::default()
    }
}

fn open(p: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(p).with_context(|| format!("opening {}", p.display()))?,
    ))
}

/// Regular files under `p` in path order, or `p` itself if it is a file.
pub fn expand_inputs(p: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if p.is_file() {
        return Ok(vec![p.to_path_buf()]);
    }
    let mut out = Vec::new();
    let mut stack = vec![p.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.is_file() {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn registry(cfg: &RunConfig, required: bool) -> anyhow::Result<Registry> {
    if cfg.delegations.is_empty() {
        if required {
            return Err(usage("no delegation file configured (set `delegations`)"));
        }
        log::warn!("no delegation file configured; every AS and prefix is unregistered");
        return Ok(Registry::default());
    }
    require_existing("delegation file", &cfg.delegations)?;
    let opts = options(cfg);
    let mut records = Vec::new();
    for p in &cfg.delegations {
        let parsed = parse_delegations(open(p)?, &opts)
            .map_err(|e| usage(format!("{}: {e}", p.display())))?;
        for e in &parsed.report.errors {
            log::warn!("{}: {e}", p.display());
        }
        records.extend(parsed.records);
    }
    Ok(Registry::new(records))
}

pub fn relationships(cfg: &RunConfig) -> anyhow::Result<Relationships> {
    let opts = options(cfg);
    let mut records = Vec::new();
    if let Some(p) = &cfg.asrel {
        require_existing("AS relationship file", [p])?;
        let parsed = parse_asrel(open(p)?, &opts).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        records.extend(parsed.records);
    }
    if let Some(p) = &cfg.siblings {
        require_existing("sibling file", [p])?;
        let parsed = parse_siblings(open(p)?, &opts).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        records.extend(parsed.records);
    }
    Ok(Relationships::new(&records))
}

pub fn names(cfg: &RunConfig) -> anyhow::Result<BTreeMap<Asn, String>> {
    match &cfg.asnames {
        Some(p) => {
            require_existing("AS name file", [p])?;
            Ok(parse_asnames(open(p)?)?)
        }
        None => Ok(BTreeMap::new()),
    }
}

/// The canonical table written by `ingest`.
pub fn rib(cfg: &RunConfig) -> anyhow::Result<Vec<RibEntry>> {
    let p = cfg.rib_path();
    if !p.exists() {
        return Err(usage(format!(
            "canonical table {} not found; run `asborder ingest` first or set `rib`",
            p.display()
        )));
    }
    let parsed = parse_table_text(open(&p)?, &IngestOptions { strict: true, filter_bogons: false })
        .map_err(|e| usage(format!("{}: {e}", p.display())))?;
    Ok(parsed.records)
}

/// Loads the canonical table and builds the pruned, annotated graph.
pub struct World {
    pub entries: Vec<RibEntry>,
    pub registry: Registry,
    pub graph: AsGraph,
    pub edges_before_prune: usize,
}

pub fn world(cfg: &RunConfig, registry_required: bool) -> anyhow::Result<World> {
    let registry = registry(cfg, registry_required)?;
    let rels = relationships(cfg)?;
    let names = names(cfg)?;
    let entries = rib(cfg)?;
    let mut full = build_graph(&entries, &registry, &rels);
    full.annotate_names(&names);
    let graph = prune_edges(&full, cfg.prune_min_obs, false);
    log::info!(
        "graph: {} nodes, {} of {} edges kept at min_obs {}",
        graph.node_count(),
        graph.edge_count(),
        full.edge_count(),
        cfg.prune_min_obs
    );
    Ok(World {
        entries,
        registry,
        edges_before_prune: full.edge_count(),
        graph,
    })
}
