//! End-to-end run: records → snapshots → metrics, stability and routing
//! tables → plot data → manifest.
//!
//! Snapshots are processed in parallel on the current rayon pool (see
//! [`ln_topo_core::par::with_threads`]); every output file is assembled in
//! memory and written once, and the manifest is written last.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use ln_topo_core::gossip::{
    order_records, read_hex_payloads, read_length_prefixed, read_records, ParseMode, ReadError, ReadOutcome,
    Timestamp,
};
use ln_topo_core::metrics::{Evaluator, MetricError, MetricId, MetricParams, MetricSeries, MetricValue, Mode, PairSource};
use ln_topo_core::par;
use ln_topo_core::routing::{
    hop_statistics, simulate, CostModel, HopStatistics, HopTally, ModelKind, RoutingError, SimulationConfig,
};
use ln_topo_core::snapshot::{build_series, write_snapshot, SnapshotError, SnapshotIoError};
use ln_topo_core::stability::{stability_series, StabilitySeries};
use ln_topo_core::{Snapshot, TopologyGraph};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, PipelineConfig, RecordFormat};
use crate::report::{self, Figure, PlotInputs, ReportError};
use crate::tables::{self, HopSummaryRow};

pub const MANIFEST_FILE: &str = "run_manifest";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: ReadError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    SnapshotIo(#[from] SnapshotIoError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

impl PipelineError {
    pub fn is_config(&self) -> bool {
        matches!(self, PipelineError::Config(_))
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

/// Reads a record file and puts it in replay order.
pub fn load_records(path: &Path, format: RecordFormat, strict: bool) -> Result<ReadOutcome, PipelineError> {
    let mode = if strict { ParseMode::Strict } else { ParseMode::Lenient };
    let file = fs::File::open(path).map_err(io_at(path))?;
    let reader = BufReader::new(file);
    let outcome = match format {
        RecordFormat::Lines => read_records(reader, mode),
        RecordFormat::Hex => read_hex_payloads(reader, mode),
        RecordFormat::Binary => read_length_prefixed(reader, mode),
    }
    .map_err(|source| PipelineError::Read { path: path.to_path_buf(), source })?;
    Ok(ReadOutcome { records: order_records(outcome.records), skipped: outcome.skipped })
}

pub struct Ingested {
    pub records: usize,
    pub skipped: usize,
    pub snapshots: Vec<Snapshot>,
}

/// Loads the configured records and builds the snapshot series.
pub fn build_snapshots(cfg: &PipelineConfig) -> Result<Ingested, PipelineError> {
    cfg.check_paths()?;
    let schedule = cfg.schedule.timestamps()?;
    let outcome = load_records(&cfg.records, cfg.format, cfg.strict)?;
    let snapshots = build_series(&outcome.records, &schedule, cfg.liveness_window)?;
    Ok(Ingested { records: outcome.records.len(), skipped: outcome.skipped, snapshots })
}

pub type LorenzOutcome = Result<(Vec<(f64, f64)>, Mode), MetricError>;

pub struct SnapshotMetrics {
    pub at: Timestamp,
    pub values: Vec<(MetricId, Result<MetricValue, MetricError>)>,
    pub lorenz: LorenzOutcome,
}

/// Evaluates `metrics` and the betweenness Lorenz curve on every snapshot.
pub fn compute_metrics(snapshots: &[Snapshot], metrics: &[MetricId], params: &MetricParams) -> Vec<SnapshotMetrics> {
    par::map_collect(snapshots.len(), |i| {
        let g = TopologyGraph::from_snapshot(&snapshots[i]);
        let eval = Evaluator::new(&g, *params);
        let values = metrics.iter().map(|&id| (id, eval.compute(id))).collect();
        SnapshotMetrics { at: snapshots[i].at, values, lorenz: eval.betweenness_lorenz() }
    })
}

pub fn metric_series(results: &[SnapshotMetrics]) -> MetricSeries {
    let mut series = MetricSeries::new();
    for r in results {
        for (id, v) in &r.values {
            series.insert(r.at, *id, v.clone());
        }
    }
    series
}

pub struct SimulationRun {
    pub at: Timestamp,
    pub model: ModelKind,
    pub outcome: Result<(HopTally, HopStatistics), RoutingError>,
}

/// Simulates every (snapshot, model) combination.
pub fn run_simulations(
    snapshots: &[Snapshot],
    models: &[ModelKind],
    cost: &CostModel,
    sim: &SimulationConfig,
) -> Vec<SimulationRun> {
    let jobs: Vec<(usize, ModelKind)> =
        (0..snapshots.len()).flat_map(|i| models.iter().map(move |&m| (i, m))).collect();
    par::map_collect(jobs.len(), |j| {
        let (i, model) = jobs[j];
        let cost = CostModel { kind: model, ..*cost };
        let outcome = simulate(&snapshots[i], &cost, sim).and_then(|t| {
            let stats = hop_statistics(&t)?;
            Ok((t, stats))
        });
        SimulationRun { at: snapshots[i].at, model, outcome }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub snapshots: usize,
    pub records: usize,
    pub skipped_records: usize,
    /// Metric error rows plus failed Lorenz curves and simulations.
    pub partial_failures: usize,
    /// Relative path → SHA-256 hex of every file written, manifest excluded.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output directory that remembers the hash of everything written to it.
struct OutputTree {
    root: PathBuf,
    hashes: BTreeMap<String, String>,
}

impl OutputTree {
    fn new(root: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(root).map_err(io_at(root))?;
        Ok(OutputTree { root: root.to_path_buf(), hashes: BTreeMap::new() })
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_at(parent))?;
        }
        fs::write(&path, bytes).map_err(io_at(&path))?;
        self.hashes.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn write_with(&mut self, rel: &str, f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(io_at(&self.root.join(rel)))?;
        self.write(rel, &buf)
    }

    /// Records files some other writer already put under `rel`.
    fn adopt_dir(&mut self, rel: &str) -> Result<(), PipelineError> {
        let dir = self.root.join(rel);
        let mut names: Vec<_> = fs::read_dir(&dir)
            .map_err(io_at(&dir))?
            .filter_map(|e| e.ok().and_then(|e| e.file_name().into_string().ok()))
            .collect();
        names.sort();
        for name in names {
            let path = dir.join(&name);
            let bytes = fs::read(&path).map_err(io_at(&path))?;
            self.hashes.insert(format!("{rel}/{name}"), sha256_hex(&bytes));
        }
        Ok(())
    }
}

/// Runs the whole pipeline and writes the output tree.
///
/// Individual metric, Lorenz and simulation failures become error rows and
/// are counted in [`RunSummary::partial_failures`]; only configuration,
/// input and I/O problems abort the run.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let ingested = build_snapshots(cfg)?;
    let snapshots = &ingested.snapshots;
    let mut out = OutputTree::new(&cfg.output_dir)?;
    let mut notes: Vec<String> = Vec::new();
    let mut failures = 0;

    if cfg.write_snapshots {
        for s in snapshots {
            let rel = format!("snapshots/{}", s.at);
            write_snapshot(s, &cfg.output_dir.join(&rel))?;
            out.adopt_dir(&rel)?;
        }
    }

    let results = compute_metrics(snapshots, &cfg.metrics, &cfg.metric_params);
    let series = metric_series(&results);
    failures += series.error_count();
    out.write_with("metrics.csv", |w| series.write_csv(w))?;

    let mut inputs = PlotInputs { metrics: series, ..Default::default() };
    for r in &results {
        match &r.lorenz {
            Ok((curve, mode)) => {
                out.write_with(&tables::lorenz_file(r.at), |w| tables::write_lorenz(w, r.at, curve, *mode))?;
                inputs.lorenz.insert(r.at, curve.clone());
            }
            Err(e) => {
                failures += 1;
                notes.push(format!("lorenz_{} = error:{}", r.at, e.code()));
            }
        }
    }

    if cfg.stability_enabled {
        let stability = match stability_series(snapshots, &cfg.stability) {
            Ok(s) => s,
            Err(e) => {
                notes.push(format!("stability = skipped: {e}"));
                StabilitySeries::default()
            }
        };
        for (ts, reason) in &stability.skipped_samples {
            notes.push(format!("stability_samples_{ts} = skipped: {reason}"));
        }
        out.write_with("stability.csv", |w| stability.write_csv(w))?;
        inputs.stability = Some(stability);
    }

    if cfg.simulation_enabled && !cfg.models.is_empty() {
        let sim = cfg.simulation;
        let runs = run_simulations(snapshots, &cfg.models, &cfg.cost, &sim);
        let mut summary = Vec::with_capacity(runs.len());
        for run in &runs {
            match &run.outcome {
                Ok((tally, stats)) => {
                    out.write_with(&tables::hops_file(run.model, run.at), |w| {
                        tables::write_hops(w, run.at, tally, sim.seed, sim.amount_msat)
                    })?;
                    out.write_with(&tables::hopcurve_file(run.model, run.at), |w| {
                        tables::write_hopcurve(w, run.at, run.model, &stats.curve, sim.seed, sim.amount_msat)
                    })?;
                    inputs.hop_curves.insert((run.at, run.model), stats.curve.clone());
                }
                Err(_) => failures += 1,
            }
            summary.push(HopSummaryRow {
                at: run.at,
                model: run.model,
                outcome: run.outcome.as_ref().map(|(t, s)| (t, s)),
                amount_msat: sim.amount_msat,
                seed: sim.seed,
            });
        }
        out.write_with("hopsummary.csv", |w| tables::write_hopsummary(w, &summary))?;
    }

    for figure in Figure::ALL {
        match report::render(&inputs, figure) {
            Ok(text) => out.write(&format!("plots/{}", figure.file_name()), text.as_bytes())?,
            Err(ReportError::MissingColumns { columns, .. }) => {
                notes.push(format!("plot_{figure} = skipped: missing {}", columns.join(" ")))
            }
            Err(e) => return Err(e.into()),
        }
    }

    let summary = RunSummary {
        snapshots: snapshots.len(),
        records: ingested.records,
        skipped_records: ingested.skipped,
        partial_failures: failures,
        outputs: out.hashes.clone(),
    };
    let manifest = manifest_text(cfg, &summary, &notes);
    let path = cfg.output_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest).map_err(io_at(&path))?;
    Ok(summary)
}

/// The manifest in the config file syntax. It holds no wall-clock time or
/// thread count, so identical configs give identical manifests.
pub fn manifest_text(cfg: &PipelineConfig, summary: &RunSummary, notes: &[String]) -> String {
    let ff_seed = cfg.stability.sampler.map(|s| s.seed.to_string()).unwrap_or_else(|| "none".into());
    let mut text = format!(
        "[run]\ntoolkit = {} {}\nconfig_sha256 = {}\nsnapshots = {}\nrecords = {}\nskipped_records = {}\n\
         partial_failures = {}\n\n[seeds]\nmetrics = {}\nstability_forest_fire = {ff_seed}\nsimulation = {}\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        sha256_hex(&cfg.source),
        summary.snapshots,
        summary.records,
        summary.skipped_records,
        summary.partial_failures,
        cfg.metric_params.seed,
        cfg.simulation.seed,
    );
    let pairs = match cfg.metric_params.pair_source {
        PairSource::Edges => "edges".to_string(),
        PairSource::SampledNonEdges { n, .. } => format!("non_edges:{n}"),
    };
    text.push_str(&format!(
        "\n[conventions]\ndistance_metrics = largest_component\nlorenz = largest_component_betweenness\n\
         channel_equivalence = max_hops_in_t_next:{}\nlink_prediction_pairs = {pairs}\n\
         failed_routes = not_resampled\nliveness_window = {}\n",
        1 + cfg.stability.hop_slack,
        cfg.liveness_window,
    ));
    if !notes.is_empty() {
        text.push_str("\n[notes]\n");
        for n in notes {
            text.push_str(n);
            text.push('\n');
        }
    }
    text.push_str("\n[outputs]\n");
    for (name, hash) in &summary.outputs {
        text.push_str(&format!("{name} = {hash}\n"));
    }
    text
}
