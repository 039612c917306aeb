//! Reading flow panels from CSV.
//!
//! The input has the header `year,layer,source,target,value`. Rows with the
//! same key are summed. Nodes are ordered by an optional node-list file (one
//! label per line) or, by default, lexicographically, so the ordering never
//! depends on row order. Lines starting with `#` are comments, so files
//! written by the tools (which carry `#` metadata) read back directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use ecm_core::MultiplexDataset;
use serde::Serialize;

use crate::error::{Result, ToolError};

const HEADER: [&str; 5] = ["year", "layer", "source", "target", "value"];

struct Row {
    line: u64,
    year: i32,
    layer: String,
    source: String,
    target: String,
    value: f64,
}

fn parse_rows<R: Read>(reader: R, path: &Path) -> Result<Vec<Row>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let err = |line: u64, message: String| ToolError::Parse { path: path.to_path_buf(), line, message };
    let headers = csv.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != HEADER {
        return Err(err(1, format!("expected header {:?}, found {:?}", HEADER.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let year = record[0].parse::<i32>().map_err(|e| err(line, format!("year {:?}: {e}", &record[0])))?;
        let value = record[4].parse::<f64>().map_err(|e| err(line, format!("value {:?}: {e}", &record[4])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(err(line, format!("value {value} must be finite and non-negative")));
        }
        if record[1].is_empty() || record[2].is_empty() || record[3].is_empty() {
            return Err(err(line, "empty layer or node label".into()));
        }
        if record[2] == record[3] && value != 0.0 {
            return Err(err(line, format!("self-flow on node {:?}", &record[2])));
        }
        rows.push(Row {
            line,
            year,
            layer: record[1].to_string(),
            source: record[2].to_string(),
            target: record[3].to_string(),
            value,
        });
    }
    Ok(rows)
}

/// Reads one label per line; blank lines and `#` comments are skipped.
pub fn read_node_list(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
    let mut nodes = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ToolError::io(path, e))?;
        let label = line.trim();
        if label.is_empty() || label.starts_with('#') {
            continue;
        }
        if !seen.insert(label.to_string()) {
            return Err(ToolError::Parse { path: path.to_path_buf(), line: k as u64 + 1, message: format!("duplicate node {label:?}") });
        }
        nodes.push(label.to_string());
    }
    Ok(nodes)
}

/// Parses a flow panel from any reader; `path` only labels error messages.
pub fn parse_dataset<R: Read>(reader: R, path: &Path, nodes: Option<Vec<String>>) -> Result<MultiplexDataset> {
    let rows = parse_rows(reader, path)?;
    let nodes = match nodes {
        Some(n) => n,
        None => {
            let set: BTreeSet<&str> = rows.iter().flat_map(|r| [r.source.as_str(), r.target.as_str()]).collect();
            set.into_iter().map(str::to_string).collect()
        }
    };
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut dataset = MultiplexDataset::new(nodes.clone());
    for row in &rows {
        let lookup = |label: &str| {
            index.get(label).copied().ok_or_else(|| ToolError::Parse {
                path: path.to_path_buf(),
                line: row.line,
                message: format!("node {label:?} missing from the node list"),
            })
        };
        let (s, t) = (lookup(&row.source)?, lookup(&row.target)?);
        dataset.add_flow(row.year, &row.layer, s, t, row.value).map_err(|e| ToolError::Parse {
            path: path.to_path_buf(),
            line: row.line,
            message: e.to_string(),
        })?;
    }
    Ok(dataset)
}

pub fn read_dataset(path: &Path, node_list: Option<&Path>) -> Result<MultiplexDataset> {
    let nodes = node_list.map(read_node_list).transpose()?;
    let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
    parse_dataset(BufReader::new(file), path, nodes)
}

/// What `ecm ingest` reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub nodes: usize,
    pub years: Vec<i32>,
    pub layers: Vec<String>,
    /// Total flow per (year, layer).
    pub totals: Vec<(i32, String, f64)>,
}

pub fn summarize(dataset: &MultiplexDataset) -> Result<DatasetSummary> {
    let mut totals = Vec::new();
    for &year in dataset.years() {
        for layer in dataset.layers() {
            totals.push((year, layer.clone(), dataset.layer_total(year, layer)?));
        }
    }
    Ok(DatasetSummary {
        nodes: dataset.node_count(),
        years: dataset.years().to_vec(),
        layers: dataset.layers().to_vec(),
        totals,
    })
}
