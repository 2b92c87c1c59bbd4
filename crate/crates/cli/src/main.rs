//! `asborder`: build AS graphs from BGP tables and measure national
//! Internet borders.

mod commands;
mod config;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use asborder::ingest::Family;
use clap::{Args, Parser, Subcommand};

use commands::{ExportFormat, ExportWhat};
use config::{parse_transform, usage, RunConfig, UsageError};

#[derive(Parser)]
#[command(name = "asborder", version, about = "AS-level graph and country border analysis from BGP tables")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Run configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Abort on the first malformed input record.
    #[arg(long, global = true)]
    strict: bool,
    /// Address family for span and coverage: `v4` or `v6`.
    #[arg(long, global = true, value_parser = parse_family)]
    family: Option<Family>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// MRT file or directory; repeatable.
    #[arg(long, global = true)]
    mrt: Vec<PathBuf>,
    /// Text table (`ts|vantage|prefix|path`) file or directory; repeatable.
    #[arg(long, global = true)]
    tables: Vec<PathBuf>,
    /// RIR delegated-extended file; repeatable.
    #[arg(long, global = true)]
    delegations: Vec<PathBuf>,
    /// CAIDA `a|b|rel` relationship file.
    #[arg(long, global = true)]
    asrel: Option<PathBuf>,
    /// Sibling pairs as `a|b|1` rows.
    #[arg(long, global = true)]
    siblings: Option<PathBuf>,
    /// `asn name` lines used to label nodes.
    #[arg(long, global = true)]
    asnames: Option<PathBuf>,
    /// Canonical table to read instead of `<out>/rib.txt`.
    #[arg(long, global = true)]
    rib: Option<PathBuf>,
    /// Drop edges seen in fewer routing tables than this.
    #[arg(long, global = true)]
    prune_min_obs: Option<u32>,
    /// Prefix count at which an AS is reported as major.
    #[arg(long, global = true)]
    major_min_prefixes: Option<usize>,
    /// Address share the points of control must cover, in (0, 1].
    #[arg(long, global = true)]
    coverage_target: Option<f64>,
    /// Vantages a prefix needs before going dark counts as an outage.
    #[arg(long, global = true)]
    min_vis: Option<usize>,
    /// Snapshots an origin must hold before a change counts as a hijack.
    #[arg(long, global = true)]
    learn_window: Option<usize>,
    /// Prediction interval level, in (0, 1).
    #[arg(long, global = true)]
    level: Option<f64>,
    /// `loglog` or `identity`.
    #[arg(long, global = true, value_parser = parse_transform)]
    transform: Option<asborder::events::Transform>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|_| format!("unknown family {s:?} (expected v4 or v6)"))
}

#[derive(Subcommand)]
enum Command {
    /// Parse MRT dumps and text tables into one canonical sorted table.
    Ingest,
    /// Build the pruned AS graph with edge list and betweenness.
    Graph,
    /// Per-country tallies, control value, complexity and egress.
    Metrics {
        /// ISO country code; repeatable.
        #[arg(long = "country")]
        countries: Vec<String>,
        /// Every country in the registry.
        #[arg(long)]
        all: bool,
        /// Also write ASN growth for a year range such as `2005-2019`.
        #[arg(long)]
        years: Option<String>,
    },
    /// Outages and hijacks across the snapshots, with per-country regression.
    Events,
    /// Fit events against AS counts from a `country,as_count,event_count` file.
    Regress {
        #[arg(long)]
        points: PathBuf,
    },
    /// Write the graph or a country's neighborhood as DOT, GEXF or CSV.
    Export {
        #[arg(long, value_enum, default_value = "graph")]
        what: ExportWhat,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        country: Option<String>,
        /// Output file instead of `<out>/<name>.<ext>`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn resolve(o: GlobalOpts) -> anyhow::Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let set_list = |dst: &mut Vec<PathBuf>, src: Vec<PathBuf>| {
        if !src.is_empty() {
            *dst = src;
        }
    };
    set_list(&mut cfg.mrt, o.mrt);
    set_list(&mut cfg.tables, o.tables);
    set_list(&mut cfg.delegations, o.delegations);
    cfg.strict |= o.strict;
    cfg.family = o.family.unwrap_or(cfg.family);
    cfg.out = o.out.unwrap_or(cfg.out);
    cfg.asrel = o.asrel.or(cfg.asrel);
    cfg.siblings = o.siblings.or(cfg.siblings);
    cfg.asnames = o.asnames.or(cfg.asnames);
    cfg.rib = o.rib.or(cfg.rib);
    cfg.prune_min_obs = o.prune_min_obs.unwrap_or(cfg.prune_min_obs);
    cfg.major_min_prefixes = o.major_min_prefixes.unwrap_or(cfg.major_min_prefixes);
    cfg.coverage_target = o.coverage_target.unwrap_or(cfg.coverage_target);
    cfg.min_vis = o.min_vis.unwrap_or(cfg.min_vis);
    cfg.learn_window = o.learn_window.unwrap_or(cfg.learn_window);
    cfg.level = o.level.unwrap_or(cfg.level);
    cfg.transform = o.transform.unwrap_or(cfg.transform);
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = resolve(cli.opts)?;
    match cli.cmd {
        Command::Ingest => commands::ingest(&cfg),
        Command::Graph => commands::graph(&cfg),
        Command::Metrics { countries, all, years } => commands::metrics(&cfg, &countries, all, years.as_deref()),
        Command::Events => commands::events(&cfg),
        Command::Regress { points } => commands::regress(&cfg, &points),
        Command::Export {
            what,
            format,
            country,
            output,
        } => commands::export(&cfg, what, format, country.as_deref(), output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
