//! Edge-list export: `src_id,dst_id,weight` with a one-line header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::Adjacency;
use crate::error::{Error, Result};

/// Write edges with weight above `weight_floor`. Undirected graphs list each
/// edge once (`src` before `dst` in node order); directed graphs list every
/// off-diagonal entry. An optional preamble is written as a leading `#` line.
pub fn write_edge_list<G: Adjacency + ?Sized>(
    graph: &G,
    path: impl AsRef<Path>,
    weight_floor: f64,
    preamble: Option<&str>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    if let Some(p) = preamble {
        writeln!(out, "# {p}").map_err(io)?;
    }
    writeln!(out, "src_id,dst_id,weight").map_err(io)?;
    let ids = graph.node_ids();
    for i in 0..graph.len() {
        for (j, w) in graph.out_edges(i) {
            if w > weight_floor && (graph.is_directed() || j > i) {
                writeln!(out, "{},{},{}", ids[i], ids[j], w).map_err(io)?;
            }
        }
    }
    out.flush().map_err(io)
}

/// A parsed edge list. Node ids appear in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub node_ids: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = rdr.headers()?.clone();
    if header.iter().ne(["src_id", "dst_id", "weight"]) {
        return Err(Error::Graph(format!(
            "{}: unexpected edge-list header {:?}",
            path.display(),
            header
        )));
    }
    let mut node_ids: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut intern = |id: &str| -> usize {
        *index.entry(id.to_string()).or_insert_with(|| {
            node_ids.push(id.to_string());
            node_ids.len() - 1
        })
    };
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let w: f64 = rec[2].parse().map_err(|_| {
            Error::Graph(format!("{}: invalid weight {:?}", path.display(), &rec[2]))
        })?;
        let (i, j) = (intern(&rec[0]), intern(&rec[1]));
        edges.push((i, j, w));
    }
    Ok(EdgeList { node_ids, edges })
}
