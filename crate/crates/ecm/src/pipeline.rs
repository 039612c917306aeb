//! The full panel workflow: for every (year, layer selection) cell,
//! aggregate, round, fit, describe, sample, compare and classify.
//!
//! Cells are independent jobs. Each one is computed in memory and the
//! results are written in cell order afterwards, so outputs do not depend
//! on scheduling or on the number of worker threads.

use std::path::{Path, PathBuf};

use ecm_core::sampler::interval_from_samples;
use ecm_core::solver::TraceRow;
use ecm_core::summary::mean;
use ecm_core::{
    bias_report, fit_with_trace, panel_summary, symmetrize_and_round, FitError, LayerSelection, ModelComparison,
    ModelKind, ModelParams, MultiplexDataset, NodeStatistics, PanelSummary, SampleConfig, Statistic, WeightedGraph,
};
use rayon::prelude::*;

use crate::config::RunManifest;
use crate::error::{Result, ToolError};
use crate::output::{self, Metadata, PanelRow};
use crate::parallel;

/// One (year, layer selection) unit of work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub year: i32,
    pub selection: LayerSelection,
}

impl Cell {
    pub fn label(&self) -> String {
        format!("{}_{}", self.year, self.selection.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    Failed(String),
}

/// Everything a cell produced, with paths relative to the output directory.
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub cell: Cell,
    pub status: CellStatus,
    pub notes: Vec<String>,
    pub files: Vec<(PathBuf, String)>,
    pub panel_rows: Vec<PanelRow>,
    pub comparison: Option<ModelComparison>,
}

/// Cells in year order, then in the order the selections were given.
pub fn plan_cells(manifest: &RunManifest, dataset: &MultiplexDataset) -> Result<Vec<Cell>> {
    if dataset.layers().is_empty() {
        return Err(ToolError::Config("the dataset has no layers".into()));
    }
    let years = manifest.years.resolve(dataset)?;
    let selections = manifest.selections()?;
    for s in &selections {
        dataset.resolve(s)?;
    }
    Ok(years
        .iter()
        .flat_map(|&year| selections.iter().map(move |s| Cell { year, selection: s.clone() }))
        .collect())
}

/// Weighted graph of a cell: layers summed, then symmetrized and rounded.
pub fn cell_graph(dataset: &MultiplexDataset, cell: &Cell) -> Result<WeightedGraph> {
    let matrix = dataset.aggregate_selection(cell.year, &cell.selection)?;
    Ok(symmetrize_and_round(&matrix, dataset.nodes().to_vec())?)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sample streams of one model in one cell, derived from the
/// run seed so different cells and models never share streams.
pub fn cell_seed(seed: u64, cell: &Cell, kind: ModelKind) -> u64 {
    let tag = format!("{}/{}", cell.label(), kind);
    splitmix(seed ^ splitmix(fnv1a(tag.as_bytes())))
}

fn metadata(manifest: &RunManifest, cell: &Cell) -> Metadata {
    Metadata::new()
        .with("tool", concat!("ecm-tools ", env!("CARGO_PKG_VERSION")))
        .with("snapshot", cell.year)
        .with("layer", cell.selection.label())
        .with("normalize", manifest.normalize)
}

/// Mean of every statistic over `samples` graphs drawn from `params`.
fn sampled_means(params: &ModelParams, config: &SampleConfig, scale: f64) -> Vec<[Option<f64>; 4]> {
    parallel::map_samples(config.sample_count, |m| {
        let g = ecm_core::sample_graph(params, config.seed, m);
        let mut s = ecm_core::observed_stats(&g);
        s.scale_weights(scale);
        Statistic::ALL.map(|stat| mean(s.values(stat)))
    })
}

struct Fitted {
    params: ModelParams,
    expected: NodeStatistics,
}

pub fn process_cell(dataset: &MultiplexDataset, manifest: &RunManifest, cell: &Cell) -> Result<CellOutput> {
    let graph = cell_graph(dataset, cell)?;
    let meta = metadata(manifest, cell);
    let dir = PathBuf::from("cells").join(cell.label());
    let mut out = CellOutput {
        cell: cell.clone(),
        status: CellStatus::Ok,
        notes: Vec::new(),
        files: Vec::new(),
        panel_rows: Vec::new(),
        comparison: None,
    };

    let total = graph.total_weight();
    let scale = if manifest.normalize && total > 0 { 1.0 / total as f64 } else { 1.0 };
    let mut observed = parallel::observed_stats(&graph);
    observed.scale_weights(scale);
    out.files.push((dir.join("stats_observed.csv"), output::stats_csv(&observed, &meta)));

    let mut fitted: Vec<(ModelKind, Fitted)> = Vec::new();
    let mut failures = Vec::new();
    for &kind in &manifest.models {
        let mut trace: Vec<TraceRow> = Vec::new();
        let result = fit_with_trace(&graph, kind, &manifest.fit, |row| trace.push(row));
        if manifest.trace {
            out.files.push((dir.join(format!("trace_{kind}.csv")), output::trace_csv(&trace, &meta.clone().with("model", kind))));
        }
        match result {
            Ok(params) => {
                out.files.push((dir.join(format!("params_{kind}.json")), output::params_json(&params)));
                let mut expected = parallel::expected_stats(&params);
                expected.scale_weights(scale);
                out.files.push((dir.join(format!("stats_{kind}.csv")), output::stats_csv(&expected, &meta)));
                fitted.push((kind, Fitted { params, expected }));
            }
            Err(FitError::NotConverged { best, .. }) => {
                let message = format!("{kind} fit did not converge");
                out.files.push((dir.join(format!("params_{kind}.json")), output::params_json(&best)));
                failures.push(message);
            }
            Err(FitError::Input(e)) => return Err(e.into()),
        }
    }

    let sample_config = manifest.sample_config();
    for stat in Statistic::ALL {
        let list = observed.values(stat);
        let constraint = observed.constraint(stat);
        let none = vec![None; list.len()];
        out.panel_rows.push(PanelRow {
            snapshot: cell.year,
            layer: cell.selection.label(),
            statistic: stat,
            source: "observed".into(),
            summary: panel_summary(list, constraint, &none)?,
        });
    }
    for (kind, f) in &fitted {
        let intervals: Option<Vec<Option<ecm_core::Interval>>> = match &sample_config {
            Some(cfg) => {
                let cfg = SampleConfig { seed: cell_seed(cfg.seed, cell, *kind), ..*cfg };
                let means = sampled_means(&f.params, &cfg, scale);
                let per_stat = (0..4)
                    .map(|s| {
                        let column: Vec<Option<f64>> = means.iter().map(|m| m[s]).collect();
                        interval_from_samples(&column, cfg.alpha)
                    })
                    .collect::<ecm_core::Result<Vec<_>>>()?;
                Some(per_stat)
            }
            None => None,
        };
        for (s, stat) in Statistic::ALL.into_iter().enumerate() {
            let mut summary: PanelSummary =
                panel_summary(f.expected.values(stat), observed.constraint(stat), observed.values(stat))?;
            if let Some(Some(iv)) = intervals.as_ref().map(|v| v[s]) {
                summary = summary.with_ci(iv.low, iv.high);
            }
            out.panel_rows.push(PanelRow {
                snapshot: cell.year,
                layer: cell.selection.label(),
                statistic: stat,
                source: kind.name().into(),
                summary,
            });
        }
    }

    let ecm = fitted.iter().find(|(k, _)| *k == ModelKind::Ecm).map(|(_, f)| &f.params);
    let wcm = fitted.iter().find(|(k, _)| *k == ModelKind::Wcm).map(|(_, f)| &f.params);
    if let (Some(e), Some(w)) = (ecm, wcm) {
        let (le, lw) = (e.diagnostics().log_likelihood, w.diagnostics().log_likelihood);
        match ModelComparison::new(graph.len(), le, lw) {
            Ok(c) => {
                out.files.push((
                    dir.join("comparison.json"),
                    output::comparison_json(Some(cell.year), Some(&cell.selection.label()), &c),
                ));
                out.comparison = Some(c);
            }
            Err(e @ ecm_core::Error::NestingViolated { .. }) => return Err(e.into()),
            Err(e) => out.notes.push(format!("comparison skipped: {e}")),
        }
    }
    if let Some(e) = ecm {
        let report = bias_report(e, manifest.bias_tolerance)?;
        out.files.push((dir.join("bias.csv"), output::bias_csv(&report, e.nodes(), &meta)));
        out.files.push((dir.join("bias.json"), output::bias_json(&report)));
    }

    if !failures.is_empty() {
        out.status = CellStatus::Failed(failures.join("; "));
    }
    Ok(out)
}

/// Outcome of a panel run.
#[derive(Debug, Clone)]
pub struct PanelReport {
    pub cells: Vec<CellOutput>,
}

impl PanelReport {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.status != CellStatus::Ok).count()
    }
}

/// Manifest as recorded in the output directory. Worker count and output
/// location are left out because they do not affect results.
fn manifest_json(manifest: &RunManifest) -> String {
    let mut m = manifest.clone();
    m.out = PathBuf::from(".");
    serde_json::to_string_pretty(&m).expect("serializable") + "\n"
}

fn cells_csv(report: &PanelReport) -> String {
    let mut s = String::from("snapshot,layer,status,message\n");
    for c in &report.cells {
        let (status, mut message) = match &c.status {
            CellStatus::Ok => ("ok", String::new()),
            CellStatus::Failed(m) => ("failed", m.clone()),
        };
        for n in &c.notes {
            if !message.is_empty() {
                message.push_str("; ");
            }
            message.push_str(n);
        }
        s.push_str(&format!("{},{},{},\"{}\"\n", c.cell.year, c.cell.selection.label(), status, message.replace('"', "'")));
    }
    s
}

/// Computes every cell with at most `jobs` worker threads and writes the
/// bundle below `manifest.out`.
pub fn run_panel(manifest: &RunManifest, dataset: &MultiplexDataset, jobs: usize) -> Result<PanelReport> {
    manifest.validate()?;
    let cells = plan_cells(manifest, dataset)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ToolError::Config(format!("thread pool: {e}")))?;
    let outputs: Vec<Result<CellOutput>> =
        pool.install(|| cells.par_iter().map(|c| process_cell(dataset, manifest, c)).collect());
    let cells = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    let report = PanelReport { cells };
    write_report(manifest, &report)?;
    Ok(report)
}

fn write_report(manifest: &RunManifest, report: &PanelReport) -> Result<()> {
    let root: &Path = &manifest.out;
    let meta = Metadata::new()
        .with("tool", concat!("ecm-tools ", env!("CARGO_PKG_VERSION")))
        .with("normalize", manifest.normalize)
        .with("seed", manifest.seed)
        .with("samples", manifest.samples)
        .with("alpha", manifest.alpha);
    for c in &report.cells {
        for (rel, contents) in &c.files {
            output::write_file(&root.join(rel), contents)?;
        }
    }
    let rows: Vec<PanelRow> = report.cells.iter().flat_map(|c| c.panel_rows.iter().cloned()).collect();
    output::write_file(&root.join("panel_summary.csv"), &output::panel_csv(&rows, &meta))?;
    let comparisons: Vec<(i32, String, ModelComparison)> = report
        .cells
        .iter()
        .filter_map(|c| c.comparison.map(|m| (c.cell.year, c.cell.selection.label(), m)))
        .collect();
    output::write_file(&root.join("comparison.csv"), &output::comparison_csv(&comparisons, &meta))?;
    output::write_file(&root.join("cells.csv"), &cells_csv(report))?;
    output::write_file(&root.join("manifest.json"), &manifest_json(manifest))?;
    Ok(())
}
