use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ln_topo::config::{parse_cadence, PipelineConfig, RecordFormat, Schedule};
use ln_topo::pipeline::{self, load_records};
use ln_topo::report::{emit_plot_data, Figure, PlotInputs, ReportError};
use ln_topo::tables;
use ln_topo_core::gossip::synth::{synthesize, SynthConfig};
use ln_topo_core::gossip::{write_records, Timestamp};
use ln_topo_core::metrics::MetricId;
use ln_topo_core::par;
use ln_topo_core::routing::{hop_statistics, simulate, CostModel, ModelKind, SimulationConfig};
use ln_topo_core::snapshot::{build_series, build_snapshot, read_snapshot, write_snapshot, DEFAULT_LIVENESS_WINDOW};
use ln_topo_core::stability::stability_series;
use ln_topo_core::Snapshot;

/// Lightning Network topology toolkit.
#[derive(Parser)]
#[command(name = "ln-topo", version)]
struct Cli {
    /// Pipeline config; its values are defaults for every subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse gossip records and write them in replay order (line format).
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the snapshot at one timestamp.
    Snapshot {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        at: Timestamp,
        #[arg(long)]
        window: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a snapshot series into OUT/<timestamp>/.
    Series {
        #[command(flatten)]
        input: InputArgs,
        /// START:STEP:COUNT
        #[arg(long, conflicts_with = "schedule")]
        cadence: Option<String>,
        /// File with one timestamp per line.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        window: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute metrics over a directory of snapshots into a metrics CSV.
    Metrics {
        /// Directory whose subdirectories are snapshots.
        #[arg(long)]
        snapshots: PathBuf,
        /// Comma-separated metric ids, or `all`.
        #[arg(long)]
        list: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare consecutive snapshots.
    Stability {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        hop_slack: Option<u32>,
        /// Skip the ForestFire-sampled rows.
        #[arg(long)]
        no_samples: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Route random payments over one snapshot and tally intermediaries.
    Simulate {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = "lnd")]
        model: ModelKind,
        #[arg(long)]
        ntx: Option<usize>,
        #[arg(long)]
        amount: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write plot data files from a pipeline output directory.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Figure names (default: every figure whose data is present).
        #[arg(long = "figure")]
        figures: Vec<Figure>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline described by --config.
    All,
    /// Generate a synthetic gossip record file.
    Synth {
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long, default_value_t = 600)]
        channels: usize,
        #[arg(long, default_value_t = 35)]
        days: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<RecordFormat>,
    /// Reject malformed records instead of skipping them.
    #[arg(long)]
    strict: bool,
}

fn parse_format(s: &str) -> Result<RecordFormat, String> {
    match s {
        "lines" => Ok(RecordFormat::Lines),
        "hex" => Ok(RecordFormat::Hex),
        "binary" => Ok(RecordFormat::Binary),
        _ => Err(format!("expected lines|hex|binary, got {s:?}")),
    }
}

/// A failure that maps to exit status 1 with a config-specific prefix.
#[derive(Debug)]
struct ConfigFailure(String);

impl std::fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigFailure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let threads = cli.threads.unwrap_or_else(par::current_threads);
    match par::with_threads(threads, || run(cli)) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(partial) => {
            eprintln!("finished with {partial} partial failure(s)");
            ExitCode::from(2)
        }
        Err(e) => {
            if e.downcast_ref::<ConfigFailure>().is_some() {
                eprintln!("config error: {e:#}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(1)
        }
    }
}

/// Returns the number of partial failures.
fn run(cli: Cli) -> Result<usize> {
    let cfg = match &cli.config {
        Some(path) => Some(PipelineConfig::load(path).map_err(|e| ConfigFailure(e.to_string()))?),
        None => None,
    };
    let cfg = cfg.as_ref();
    match cli.command {
        Command::Ingest { input, out } => {
            let (path, format, strict) = resolve_input(&input, cfg)?;
            let outcome = load_records(&path, format, strict)?;
            eprintln!("{} records, {} skipped", outcome.records.len(), outcome.skipped);
            match out {
                Some(p) => {
                    let file = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_records(BufWriter::new(file), &outcome.records)?;
                }
                None => write_records(io::stdout().lock(), &outcome.records)?,
            }
            Ok(0)
        }
        Command::Snapshot { input, at, window, out } => {
            let (path, format, strict) = resolve_input(&input, cfg)?;
            let records = load_records(&path, format, strict)?.records;
            let window = window.or(cfg.map(|c| c.liveness_window)).unwrap_or(DEFAULT_LIVENESS_WINDOW);
            let snap = build_snapshot(&records, at, window)?;
            write_snapshot(&snap, &out)?;
            eprintln!("{} nodes, {} channels", snap.node_count(), snap.channel_count());
            Ok(0)
        }
        Command::Series { input, cadence, schedule, window, out } => {
            let (path, format, strict) = resolve_input(&input, cfg)?;
            let schedule = match (cadence, schedule) {
                (Some(c), _) => parse_cadence(&c).map_err(|e| ConfigFailure(e.to_string()))?,
                (None, Some(file)) => Schedule::File(file),
                (None, None) => match cfg {
                    Some(c) => c.schedule.clone(),
                    None => return Err(ConfigFailure("need --cadence, --schedule or --config".into()).into()),
                },
            };
            let window = window.or(cfg.map(|c| c.liveness_window)).unwrap_or(DEFAULT_LIVENESS_WINDOW);
            let records = load_records(&path, format, strict)?.records;
            let series = build_series(&records, &schedule.timestamps()?, window)?;
            for s in &series {
                write_snapshot(s, &out.join(s.at.to_string()))?;
            }
            eprintln!("{} snapshots written to {}", series.len(), out.display());
            Ok(0)
        }
        Command::Metrics { snapshots, list, seed, out } => {
            let snaps = read_snapshot_dir(&snapshots)?;
            let mut params = cfg.map(|c| c.metric_params).unwrap_or_default();
            if let Some(s) = seed {
                params.seed = s;
            }
            let ids: Vec<MetricId> = match list.as_deref() {
                Some("all") => MetricId::ALL.to_vec(),
                Some(l) => l
                    .split(',')
                    .map(|s| s.trim().parse::<MetricId>().map_err(|e| ConfigFailure(e).into()))
                    .collect::<Result<_>>()?,
                None => cfg.map(|c| c.metrics.clone()).unwrap_or_else(|| MetricId::ALL.to_vec()),
            };
            let results = pipeline::compute_metrics(&snaps, &ids, &params);
            let series = pipeline::metric_series(&results);
            write_file(&out, |w| series.write_csv(w))?;
            Ok(series.error_count())
        }
        Command::Stability { snapshots, hop_slack, no_samples, out } => {
            let snaps = read_snapshot_dir(&snapshots)?;
            let mut sc = cfg.map(|c| c.stability).unwrap_or_default();
            if let Some(h) = hop_slack {
                sc.hop_slack = h;
            }
            if no_samples {
                sc.sampler = None;
            }
            let series = stability_series(&snaps, &sc)?;
            for (ts, reason) in &series.skipped_samples {
                eprintln!("samples skipped at {ts}: {reason}");
            }
            write_file(&out, |w| series.write_csv(w))?;
            Ok(0)
        }
        Command::Simulate { snapshot, model, ntx, amount, seed, out } => {
            let snap = read_snapshot(&snapshot)?;
            let defaults = cfg.map(|c| c.simulation).unwrap_or_default();
            let sim = SimulationConfig {
                n_tx: ntx.unwrap_or(defaults.n_tx),
                amount_msat: amount.unwrap_or(defaults.amount_msat),
                seed: seed.unwrap_or(defaults.seed),
            };
            let cost = cfg.map(|c| c.cost_model(model)).unwrap_or_else(|| CostModel::new(model));
            let tally = simulate(&snap, &cost, &sim)?;
            let stats = hop_statistics(&tally)?;
            write_file(&out, |w| tables::write_hops(w, snap.at, &tally, sim.seed, sim.amount_msat))?;
            eprintln!(
                "{model}: {}/{} routed, hop gini {:.4}",
                tally.n_routed, tally.n_requests, stats.gini
            );
            Ok(0)
        }
        Command::Report { input, figures, out } => {
            let inputs = PlotInputs::load(&input)?;
            let out = out.unwrap_or_else(|| input.join("plots"));
            let explicit = !figures.is_empty();
            let figures = if explicit { figures } else { Figure::ALL.to_vec() };
            for figure in figures {
                match emit_plot_data(&inputs, figure, &out) {
                    Ok(path) => eprintln!("wrote {}", path.display()),
                    Err(e @ ReportError::MissingColumns { .. }) if !explicit => eprintln!("skipped: {e}"),
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(0)
        }
        Command::All => {
            let Some(cfg) = cfg else {
                return Err(ConfigFailure("`all` requires --config".into()).into());
            };
            let summary = pipeline::run_pipeline(cfg)?;
            eprintln!(
                "{} snapshots, {} records ({} skipped), {} files in {}",
                summary.snapshots,
                summary.records,
                summary.skipped_records,
                summary.outputs.len() + 1,
                cfg.output_dir.display()
            );
            Ok(summary.partial_failures)
        }
        Command::Synth { nodes, channels, days, seed, out } => {
            if nodes < 2 || days == 0 {
                bail!("need at least two nodes and one day");
            }
            let d = SynthConfig::default();
            let records = synthesize(&SynthConfig { nodes, channels, end: d.start + days * 86_400, seed, ..d });
            write_file(&out, |w| write_records(w, &records))?;
            eprintln!("{} records written to {}", records.len(), out.display());
            Ok(0)
        }
    }
}

fn resolve_input(input: &InputArgs, cfg: Option<&PipelineConfig>) -> Result<(PathBuf, RecordFormat, bool)> {
    let path = match (&input.records, cfg) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) => c.records.clone(),
        (None, None) => return Err(ConfigFailure("need --records or --config".into()).into()),
    };
    if !path.is_file() {
        return Err(ConfigFailure(format!("records file not found: {}", path.display())).into());
    }
    let format = input.format.or(cfg.map(|c| c.format)).unwrap_or(RecordFormat::Lines);
    Ok((path, format, input.strict || cfg.is_some_and(|c| c.strict)))
}

/// Every subdirectory of `dir` holding a snapshot, in timestamp order.
fn read_snapshot_dir(dir: &Path) -> Result<Vec<Snapshot>> {
    let mut snaps = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.join(ln_topo_core::snapshot::META_FILE).is_file() {
            snaps.push(read_snapshot(&path)?);
        }
    }
    if snaps.is_empty() {
        bail!("no snapshots under {}", dir.display());
    }
    snaps.sort_by_key(|s| s.at);
    Ok(snaps)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}
