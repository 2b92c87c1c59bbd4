//! DOT, GEXF 1.2 and edge-list CSV renderings. Output order follows the
//! graph's sorted maps, so identical graphs serialize to identical bytes.

use std::fmt::Write as _;
use std::io::{Read, Write};

use thiserror::Error;

use super::{edge_key, AsEdge, AsGraph, AsNode, EdgeRel};
use crate::ingest::Asn;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("edge list row {row}: {msg}")]
    Row { row: usize, msg: String },
}

fn rel_label(e: &AsEdge) -> &'static str {
    match e.rel {
        None => "",
        Some(EdgeRel::Provider(p)) if p == e.a => "p2c",
        Some(EdgeRel::Provider(_)) => "c2p",
        Some(EdgeRel::P2p) => "p2p",
        Some(EdgeRel::S2s) => "s2s",
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(g: &AsGraph) -> String {
    let mut out = String::from("graph asgraph {\n");
    for n in g.nodes.values() {
        let _ = write!(out, "  \"{}\" [cc=\"{}\"", n.asn, n.country);
        if let Some(name) = &n.name {
            let _ = write!(out, ", name=\"{}\"", dot_escape(name));
        }
        out.push_str("];\n");
    }
    for e in g.edges.values() {
        let _ = write!(out, "  \"{}\" -- \"{}\" [obs={}", e.a, e.b, e.obs_count);
        let rel = rel_label(e);
        if !rel.is_empty() {
            let _ = write!(out, ", rel=\"{rel}\"");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn node_label(n: &AsNode) -> String {
    match &n.name {
        Some(name) => format!("AS{} {}", n.asn, name),
        None => format!("AS{}", n.asn),
    }
}

pub fn to_gexf(g: &AsGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<gexf xmlns=\"http://gexf.net/1.2\" xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://gexf.net/1.2 http://gexf.net/1.2/gexf.xsd\" version=\"1.2\">\n",
    );
    out.push_str("  <graph mode=\"static\" defaultedgetype=\"undirected\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    out.push_str("      <attribute id=\"cc\" title=\"cc\" type=\"string\"/>\n");
    out.push_str("      <attribute id=\"prefixes\" title=\"prefixes\" type=\"integer\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <attributes class=\"edge\">\n");
    out.push_str("      <attribute id=\"obs\" title=\"obs\" type=\"integer\"/>\n");
    out.push_str("      <attribute id=\"rel\" title=\"rel\" type=\"string\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for n in g.nodes.values() {
        let _ = writeln!(
            out,
            "      <node id=\"{}\" label=\"{}\">\n        <attvalues>\n          \
             <attvalue for=\"cc\" value=\"{}\"/>\n          \
             <attvalue for=\"prefixes\" value=\"{}\"/>\n        </attvalues>\n      </node>",
            n.asn,
            xml_escape(&node_label(n)),
            n.country,
            n.prefixes.len()
        );
    }
    out.push_str("    </nodes>\n");
    out.push_str("    <edges>\n");
    for (i, e) in g.edges.values().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{}\">\n        <attvalues>\n          \
             <attvalue for=\"obs\" value=\"{}\"/>\n          \
             <attvalue for=\"rel\" value=\"{}\"/>\n        </attvalues>\n      </edge>",
            e.a,
            e.b,
            e.obs_count,
            e.obs_count,
            rel_label(e)
        );
    }
    out.push_str("    </edges>\n");
    out.push_str("  </graph>\n");
    out.push_str("</gexf>\n");
    out
}

/// Writes `a,b,obs_count,rel` rows with a header.
pub fn write_edge_list<W: Write>(g: &AsGraph, w: W) -> Result<(), ExportError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["a", "b", "obs_count", "rel"])?;
    for e in g.edges.values() {
        wr.write_record([
            e.a.to_string(),
            e.b.to_string(),
            e.obs_count.to_string(),
            rel_label(e).to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads an edge list written by [`write_edge_list`]. Nodes carry no
/// attributes beyond their ASN.
pub fn read_edge_list<R: Read>(r: R) -> Result<AsGraph, ExportError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut g = AsGraph::default();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let err = |msg: String| ExportError::Row { row, msg };
        if rec.len() < 3 {
            return Err(err(format!("expected 4 columns, found {}", rec.len())));
        }
        let x: Asn = rec[0].parse().map_err(|e| err(format!("{e}")))?;
        let y: Asn = rec[1].parse().map_err(|e| err(format!("{e}")))?;
        if x == y {
            return Err(err(format!("self loop on AS{x}")));
        }
        let obs_count: u32 = rec[2]
            .parse()
            .ok()
            .filter(|c| *c >= 1)
            .ok_or_else(|| err(format!("bad obs_count {:?}", &rec[2])))?;
        let rel = match rec.get(3).unwrap_or("") {
            "" => None,
            "p2c" => Some(EdgeRel::Provider(x)),
            "c2p" => Some(EdgeRel::Provider(y)),
            "p2p" => Some(EdgeRel::P2p),
            "s2s" => Some(EdgeRel::S2s),
            other => return Err(err(format!("unknown rel {other:?}"))),
        };
        for asn in [x, y] {
            g.nodes.entry(asn).or_insert_with(|| AsNode::new(asn));
        }
        let (a, b) = edge_key(x, y);
        g.edges.insert(
            (a, b),
            AsEdge {
                a,
                b,
                obs_count,
                rel,
            },
        );
    }
    Ok(g)
}
