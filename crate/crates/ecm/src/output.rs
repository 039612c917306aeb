//! Text formats written by the tools. Every file starts with `#` metadata
//! lines; numbers use the shortest representation that round-trips, and
//! undefined values are empty fields.

use std::fmt::Write as _;
use std::path::Path;

use ecm_core::solver::TraceRow;
use ecm_core::{BiasReport, ModelComparison, ModelParams, NodeStatistics, PanelSummary, Statistic, WeightedGraph};
use serde::Serialize;

use crate::error::{Result, ToolError};

/// Ordered `key: value` metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(Vec<(String, String)>);

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self, out: &mut String) {
        for (k, v) in &self.0 {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The definedness conventions, recorded in every statistics file.
pub const DEFINEDNESS_NOTE: &str =
    "knn and snn need k >= 1, c and cw need k >= 2 (observed) or a positive denominator (expected); undefined entries are empty and excluded from summaries";

pub fn stats_csv(stats: &NodeStatistics, meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# definedness: {DEFINEDNESS_NOTE}");
    out.push_str("node,k,s,knn,c,snn,cw,model,flags\n");
    for i in 0..stats.len() {
        let r = stats.row(i);
        let undefined: Vec<&str> = [("knn", r.knn), ("c", r.c), ("snn", r.snn), ("cw", r.cw)]
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| *n)
            .collect();
        let flags = if undefined.is_empty() { String::new() } else { format!("undefined:{}", undefined.join("+")) };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&stats.nodes[i]),
            r.degree,
            r.strength,
            opt(r.knn),
            opt(r.c),
            opt(r.snn),
            opt(r.cw),
            stats.provenance,
            flags
        );
    }
    out
}

/// One line of the panel time series.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub snapshot: i32,
    pub layer: String,
    pub statistic: Statistic,
    /// `observed`, `ecm` or `wcm`.
    pub source: String,
    pub summary: PanelSummary,
}

pub const PANEL_HEADER: &str = "snapshot,layer,statistic,source,mean,std,corr_constraint,corr_expected,ci_low,ci_high";

pub fn panel_csv(rows: &[PanelRow], meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# std: population standard deviation of the defined entries");
    let _ = writeln!(out, "# corr_constraint: Pearson correlation with k (knn, c) or s (snn, cw)");
    let _ = writeln!(out, "# corr_expected: Pearson correlation between observed and model-expected lists");
    let _ = writeln!(out, "# ci_low, ci_high: Monte Carlo percentile interval of the mean over sampled graphs");
    out.push_str(PANEL_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.snapshot,
            csv_field(&r.layer),
            r.statistic,
            r.source,
            opt(s.mean),
            opt(s.std),
            opt(s.corr_constraint),
            opt(s.corr_expected),
            opt(s.ci.map(|c| c.0)),
            opt(s.ci.map(|c| c.1)),
        );
    }
    out
}

pub const COMPARISON_HEADER: &str = "snapshot,layer,nodes,loglik_ecm,loglik_wcm,params_ecm,params_wcm,aicc_ecm,aicc_wcm,bic_ecm,bic_wcm,w_aicc_ecm,w_aicc_wcm,w_bic_ecm,w_bic_wcm";

pub const BIC_NOTE: &str = "BIC sample size is the dyad count N(N-1)/2";

pub fn comparison_row(snapshot: i32, layer: &str, c: &ModelComparison) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        snapshot,
        csv_field(layer),
        c.nodes,
        c.ecm.log_likelihood,
        c.wcm.log_likelihood,
        c.ecm.parameters,
        c.wcm.parameters,
        c.ecm.aic_c,
        c.wcm.aic_c,
        c.ecm.bic,
        c.wcm.bic,
        c.aic_c_weight_ecm,
        c.aic_c_weight_wcm,
        c.bic_weight_ecm,
        c.bic_weight_wcm
    )
}

pub fn comparison_csv(rows: &[(i32, String, ModelComparison)], meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# {BIC_NOTE}");
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    for (y, l, c) in rows {
        out.push_str(&comparison_row(*y, l, c));
    }
    out
}

#[derive(Serialize)]
struct ComparisonDoc<'a> {
    snapshot: Option<i32>,
    layer: Option<&'a str>,
    bic_sample_size: &'a str,
    #[serde(flatten)]
    comparison: &'a ModelComparison,
}

pub fn comparison_json(snapshot: Option<i32>, layer: Option<&str>, c: &ModelComparison) -> String {
    let doc = ComparisonDoc { snapshot, layer, bic_sample_size: "dyads N(N-1)/2", comparison: c };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

pub fn bias_csv(report: &BiasReport, nodes: &[String], meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# tolerance: {}", report.tolerance);
    out.push_str("node_i,node_j,bias,class\n");
    for p in &report.pairs {
        let _ = writeln!(out, "{},{},{},{}", csv_field(&nodes[p.i]), csv_field(&nodes[p.j]), p.bias, p.class);
    }
    out
}

#[derive(Serialize)]
struct BiasSummary {
    tolerance: f64,
    classified: usize,
    extensive: usize,
    intensive: usize,
    neutral: usize,
    excluded: usize,
    extensive_fraction: f64,
    intensive_fraction: f64,
    neutral_fraction: f64,
    note: &'static str,
}

pub fn bias_json(report: &BiasReport) -> String {
    let s = BiasSummary {
        tolerance: report.tolerance,
        classified: report.classified(),
        extensive: report.extensive,
        intensive: report.intensive,
        neutral: report.neutral,
        excluded: report.excluded,
        extensive_fraction: report.extensive_fraction(),
        intensive_fraction: report.intensive_fraction(),
        neutral_fraction: report.neutral_fraction(),
        note: "per-class fractions are a descriptive summary; excluded dyads have an isolated endpoint",
    };
    serde_json::to_string_pretty(&s).expect("serializable") + "\n"
}

pub fn trace_csv(rows: &[TraceRow], meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str("iteration,max_degree_residual,max_strength_residual,log_likelihood\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration, r.max_degree_residual, r.max_relative_strength_residual, r.log_likelihood
        );
    }
    out
}

/// A sampled graph in the ingestion format, one row per linked dyad.
pub fn edge_list_csv(graph: &WeightedGraph, snapshot: i32, layer: &str, meta: &Metadata) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str("year,layer,source,target,value\n");
    let nodes = graph.nodes();
    for (i, j, w) in graph.edges() {
        let _ = writeln!(out, "{snapshot},{},{},{},{w}", csv_field(layer), csv_field(&nodes[i]), csv_field(&nodes[j]));
    }
    out
}

pub fn params_json(params: &ModelParams) -> String {
    serde_json::to_string_pretty(params).expect("serializable") + "\n"
}

pub fn read_params(path: &Path) -> Result<ModelParams> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ToolError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| ToolError::io(path, e))
}
