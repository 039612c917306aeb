use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ecm_core::{bias_report, fit_with_trace, FitError, ModelComparison, ModelKind};
use rayon::prelude::*;

use crate::config::{parse_models, RunManifest};
use crate::error::{Result, ToolError};
use crate::ingest;
use crate::output::{self, Metadata};
use crate::parallel;
use crate::pipeline::{self, Cell};

#[derive(Debug, Parser)]
#[command(name = "ecm", version, about = "Maximum-entropy null models for weighted trade networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Dataset and cell selection shared by the data-driven subcommands.
#[derive(Debug, Args, Default)]
pub struct Selection {
    /// Flow panel CSV (year,layer,source,target,value).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Node-list file fixing the node order.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Years: `a..b`, a comma list, or `all`.
    #[arg(long)]
    pub years: Option<String>,
    /// Layer selections: `all`, `top14`, `showcase`, or codes (`84`, `84+85`), comma separated.
    #[arg(long)]
    pub layers: Option<String>,
    /// Manifest in TOML or JSON; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a flow panel and print a summary.
    Ingest {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        nodes: Option<PathBuf>,
    },
    /// Fit models to every selected cell and write their parameters.
    Fit {
        #[command(flatten)]
        selection: Selection,
        /// `ecm`, `wcm` or `both`.
        #[arg(long)]
        model: Option<String>,
        /// Also write per-iteration convergence traces.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Observed statistics of the selected cells, plus expected ones for given parameters.
    Stats {
        #[command(flatten)]
        selection: Selection,
        /// Fitted parameter files (one cell only).
        #[arg(long)]
        params: Vec<PathBuf>,
        #[arg(long)]
        normalize: bool,
    },
    /// Draw graphs from a fitted ensemble as edge lists.
    Sample {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Year written into the edge lists.
        #[arg(long, default_value_t = 0)]
        year: i32,
        /// Layer label written into the edge lists.
        #[arg(long, default_value = "sample")]
        layer: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Information-criterion comparison of an ECM and a WCM fit.
    Compare {
        /// The two parameter files, in any order.
        #[arg(long, num_args = 2, required = true)]
        params: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-dyad extensive/intensive bias of an ECM fit.
    Bias {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = ecm_core::bias::DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// The full workflow over all selected cells.
    Panel {
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo samples per model and cell (at least 100; 0 disables intervals).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn manifest_from(selection: &Selection) -> Result<RunManifest> {
    let mut m = match &selection.config {
        Some(path) => RunManifest::load(path)?,
        None => RunManifest::default(),
    };
    if let Some(d) = &selection.data {
        m.data = Some(d.clone());
    }
    if let Some(n) = &selection.nodes {
        m.nodes = Some(n.clone());
    }
    if let Some(y) = &selection.years {
        m.years = y.parse()?;
    }
    if let Some(l) = &selection.layers {
        m.layers = vec![l.clone()];
    }
    if let Some(o) = &selection.out {
        m.out = o.clone();
    }
    Ok(m)
}

fn load(manifest: &RunManifest) -> Result<ecm_core::MultiplexDataset> {
    ingest::read_dataset(manifest.data_path()?, manifest.nodes.as_deref())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ToolError::Config(format!("thread pool: {e}")))
}

fn cmd_ingest(data: &Path, nodes: Option<&Path>) -> Result<()> {
    let dataset = ingest::read_dataset(data, nodes)?;
    let s = ingest::summarize(&dataset)?;
    println!("nodes: {}", s.nodes);
    println!("years: {}", s.years.iter().map(i32::to_string).collect::<Vec<_>>().join(","));
    println!("layers: {}", s.layers.join(","));
    for (y, l, t) in &s.totals {
        println!("total {y} {l}: {t}");
    }
    Ok(())
}

/// A cell, the model fitted to it, its trace and the fit result.
type FitOutcome = (Cell, ModelKind, Vec<ecm_core::TraceRow>, Result<ecm_core::ModelParams, FitError>);

fn cmd_fit(manifest: &RunManifest, jobs: usize) -> Result<()> {
    manifest.validate()?;
    let dataset = load(manifest)?;
    let cells = pipeline::plan_cells(manifest, &dataset)?;
    let work: Vec<(Cell, ModelKind)> =
        cells.iter().flat_map(|c| manifest.models.iter().map(move |&k| (c.clone(), k))).collect();
    let results: Vec<Result<FitOutcome>> =
        pool(jobs)?.install(|| {
            work.par_iter()
                .map(|(cell, kind)| {
                    let graph = pipeline::cell_graph(&dataset, cell)?;
                    let mut trace = Vec::new();
                    let fitted = fit_with_trace(&graph, *kind, &manifest.fit, |r| trace.push(r));
                    Ok((cell.clone(), *kind, trace, fitted))
                })
                .collect()
        });
    let mut failed = 0;
    for r in results {
        let (cell, kind, trace, fitted) = r?;
        let dir = manifest.out.join("cells").join(cell.label());
        if manifest.trace {
            let meta = Metadata::new().with("snapshot", cell.year).with("layer", cell.selection.label()).with("model", kind);
            output::write_file(&dir.join(format!("trace_{kind}.csv")), &output::trace_csv(&trace, &meta))?;
        }
        let params = match fitted {
            Ok(p) => p,
            Err(FitError::NotConverged { best, .. }) => {
                eprintln!("{}: {kind} fit did not converge", cell.label());
                failed += 1;
                *best
            }
            Err(FitError::Input(e)) => return Err(e.into()),
        };
        output::write_file(&dir.join(format!("params_{kind}.json")), &output::params_json(&params))?;
    }
    if failed > 0 {
        return Err(ToolError::CellsFailed { failed, total: work.len() });
    }
    Ok(())
}

fn cmd_stats(manifest: &RunManifest, params: &[PathBuf], normalize: bool) -> Result<()> {
    let dataset = load(manifest)?;
    let cells = pipeline::plan_cells(manifest, &dataset)?;
    if !params.is_empty() && cells.len() != 1 {
        return Err(ToolError::Config("--params needs exactly one selected year and layer".into()));
    }
    for cell in &cells {
        let graph = pipeline::cell_graph(&dataset, cell)?;
        let total = graph.total_weight();
        let scale = if normalize && total > 0 { 1.0 / total as f64 } else { 1.0 };
        let meta = Metadata::new()
            .with("snapshot", cell.year)
            .with("layer", cell.selection.label())
            .with("normalize", normalize);
        let dir = manifest.out.join("cells").join(cell.label());
        let mut observed = parallel::observed_stats(&graph);
        observed.scale_weights(scale);
        output::write_file(&dir.join("stats_observed.csv"), &output::stats_csv(&observed, &meta))?;
        for path in params {
            let p = output::read_params(path)?;
            if p.nodes() != graph.nodes() {
                return Err(ToolError::Config(format!("{}: node labels differ from the dataset", path.display())));
            }
            let mut expected = parallel::expected_stats(&p);
            expected.scale_weights(scale);
            output::write_file(&dir.join(format!("stats_{}.csv", p.kind())), &output::stats_csv(&expected, &meta))?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(params: &Path, samples: usize, seed: u64, year: i32, layer: &str, out: &Path, jobs: usize) -> Result<()> {
    let p = output::read_params(params)?;
    let meta = Metadata::new().with("model", p.kind()).with("seed", seed);
    let files: Vec<String> = pool(jobs)?.install(|| {
        (0..samples as u64)
            .into_par_iter()
            .map(|m| {
                let g = ecm_core::sample_graph(&p, seed, m);
                output::edge_list_csv(&g, year, layer, &meta.clone().with("sample", m))
            })
            .collect()
    });
    for (m, text) in files.iter().enumerate() {
        output::write_file(&out.join(format!("sample_{m:05}.csv")), text)?;
    }
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let a = output::read_params(&paths[0])?;
    let b = output::read_params(&paths[1])?;
    let (ecm, wcm) = match (a.kind(), b.kind()) {
        (ModelKind::Ecm, ModelKind::Wcm) => (a, b),
        (ModelKind::Wcm, ModelKind::Ecm) => (b, a),
        _ => return Err(ToolError::Config("compare needs one ECM and one WCM parameter file".into())),
    };
    if ecm.nodes() != wcm.nodes() {
        return Err(ToolError::Config("the two fits cover different nodes".into()));
    }
    let c = ModelComparison::new(ecm.len(), ecm.diagnostics().log_likelihood, wcm.diagnostics().log_likelihood)?;
    println!("AICc ECM {} WCM {} (weights {} / {})", c.ecm.aic_c, c.wcm.aic_c, c.aic_c_weight_ecm, c.aic_c_weight_wcm);
    println!("BIC  ECM {} WCM {} (weights {} / {})", c.ecm.bic, c.wcm.bic, c.bic_weight_ecm, c.bic_weight_wcm);
    if let Some(dir) = out {
        output::write_file(&dir.join("comparison.json"), &output::comparison_json(None, None, &c))?;
    }
    Ok(())
}

fn cmd_bias(params: &Path, tolerance: f64, out: &Path) -> Result<()> {
    let p = output::read_params(params)?;
    let report = bias_report(&p, tolerance)?;
    output::write_file(&out.join("bias.csv"), &output::bias_csv(&report, p.nodes(), &Metadata::new()))?;
    output::write_file(&out.join("bias.json"), &output::bias_json(&report))?;
    println!(
        "extensive {} intensive {} neutral {} excluded {}",
        report.extensive, report.intensive, report.neutral, report.excluded
    );
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { data, nodes } => cmd_ingest(&data, nodes.as_deref()),
        Command::Fit { selection, model, trace, jobs } => {
            let mut m = manifest_from(&selection)?;
            if let Some(model) = model {
                m.models = parse_models(&model)?;
            }
            m.trace |= trace;
            cmd_fit(&m, jobs)
        }
        Command::Stats { selection, params, normalize } => {
            let m = manifest_from(&selection)?;
            cmd_stats(&m, &params, normalize || m.normalize)
        }
        Command::Sample { params, samples, seed, year, layer, out, jobs } => {
            cmd_sample(&params, samples, seed, year, &layer, &out, jobs)
        }
        Command::Compare { params, out } => cmd_compare(&params, out.as_deref()),
        Command::Bias { params, tolerance, out } => cmd_bias(&params, tolerance, &out),
        Command::Panel { selection, model, seed, samples, normalize, trace, jobs } => {
            let mut m = manifest_from(&selection)?;
            if let Some(model) = model {
                m.models = parse_models(&model)?;
            }
            if let Some(s) = seed {
                m.seed = s;
            }
            if let Some(s) = samples {
                m.samples = s;
            }
            m.normalize |= normalize;
            m.trace |= trace;
            let dataset = load(&m)?;
            let report = pipeline::run_panel(&m, &dataset, jobs)?;
            let failed = report.failed();
            if failed > 0 {
                return Err(ToolError::CellsFailed { failed, total: report.cells.len() });
            }
            Ok(())
        }
    }
}

/// Parses the process arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
