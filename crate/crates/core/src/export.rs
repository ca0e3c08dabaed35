//! Graph serialization: DOT, GraphML and edge-list CSV with a node table.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PercolationGraph;
use crate::spin::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Dot,
    Graphml,
    EdgeCsv,
}

impl GraphFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            GraphFormat::Dot => "dot",
            GraphFormat::Graphml => "graphml",
            GraphFormat::EdgeCsv => "edges.csv",
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "graphml" => Ok(GraphFormat::Graphml),
            "edge-csv" | "csv" => Ok(GraphFormat::EdgeCsv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRow {
    pub id: usize,
    pub label: String,
    pub domain_walls: usize,
    pub degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub src: usize,
    pub dst: usize,
}

pub fn node_rows(g: &PercolationGraph) -> Vec<NodeRow> {
    (0..g.num_nodes())
        .map(|id| NodeRow {
            id,
            label: Configuration::new(id, g.n()).map(|c| c.label()).unwrap_or_default(),
            domain_walls: g.domain_walls(id),
            degree: g.degree(id),
        })
        .collect()
}

/// Serializes `g`. Nodes are emitted in index order.
pub fn export_graph(g: &PercolationGraph, format: GraphFormat) -> Result<Vec<u8>> {
    match format {
        GraphFormat::Dot => Ok(to_dot(g).into_bytes()),
        GraphFormat::Graphml => Ok(to_graphml(g).into_bytes()),
        GraphFormat::EdgeCsv => {
            let rows: Vec<EdgeRow> = g.edges().iter().map(|&(src, dst)| EdgeRow { src, dst }).collect();
            crate::output::csv_bytes(&rows)
        }
    }
}

/// Companion node table (`id,label,domain_walls,degree`).
pub fn node_csv(g: &PercolationGraph) -> Result<Vec<u8>> {
    crate::output::csv_bytes(&node_rows(g))
}

/// Reads an edge-list CSV written by [`export_graph`].
pub fn parse_edge_csv(bytes: &[u8]) -> Result<Vec<(usize, usize)>> {
    let rows: Vec<EdgeRow> = crate::output::csv_from_bytes(bytes)?;
    Ok(rows.into_iter().map(|r| (r.src, r.dst)).collect())
}

fn to_dot(g: &PercolationGraph) -> String {
    let mut out = String::from("graph percolation {\n");
    for node in node_rows(g) {
        let _ = writeln!(
            out,
            "  {} [label=\"{}\", domain_walls={}, degree={}];",
            node.id, node.label, node.domain_walls, node.degree
        );
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
    out
}

fn to_graphml(g: &PercolationGraph) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n",
        "  <key id=\"domain_walls\" for=\"node\" attr.name=\"domain_walls\" attr.type=\"int\"/>\n",
        "  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n",
        "  <graph id=\"percolation\" edgedefault=\"undirected\">\n",
    ));
    for node in node_rows(g) {
        let _ = writeln!(
            out,
            "    <node id=\"n{}\"><data key=\"label\">{}</data><data key=\"domain_walls\">{}</data><data key=\"degree\">{}</data></node>",
            node.id, node.label, node.domain_walls, node.degree
        );
    }
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        let _ = writeln!(out, "    <edge id=\"e{k}\" source=\"n{a}\" target=\"n{b}\"/>");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
