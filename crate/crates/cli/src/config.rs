//! Pipeline configuration: a line-oriented `key = value` file with
//! `[section]` headers and `#` comments.
//!
//! ```text
//! [input]
//! records = gossip.tsv
//! format = lines
//!
//! [snapshots]
//! cadence = 1546300800:604800:5
//! window = 1209600
//!
//! [metrics]
//! list = density, mean_degree, diameter
//! seed = 1
//!
//! [simulation]
//! models = lnd, cln
//! n_tx = 5000
//!
//! [output]
//! dir = out
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ln_topo_core::gossip::Timestamp;
use ln_topo_core::graph::ForestFireConfig;
use ln_topo_core::metrics::{MetricId, MetricParams, PairSource, SamplingPolicy};
use ln_topo_core::routing::{CostModel, ModelKind, SimulationConfig};
use ln_topo_core::snapshot::DEFAULT_LIVENESS_WINDOW;
use ln_topo_core::stability::StabilityConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("config [{section}] {key}: {reason}")]
    Invalid { section: String, key: String, reason: String },
    #[error("config: {0}")]
    Missing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    /// Tab-separated line records.
    Lines,
    /// One hex-encoded BOLT#7 payload per line.
    Hex,
    /// Raw payloads with 2-byte length prefixes.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    File(PathBuf),
    /// `count` timestamps starting at `start`, `step` seconds apart.
    Cadence { start: Timestamp, step: u64, count: usize },
}

impl Schedule {
    pub fn timestamps(&self) -> Result<Vec<Timestamp>, ConfigError> {
        match self {
            Schedule::Cadence { start, step, count } => Ok((0..*count as u64).map(|i| start + i * step).collect()),
            Schedule::File(path) => {
                let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                text.lines()
                    .map(|l| l.split('#').next().unwrap_or("").trim())
                    .enumerate()
                    .filter(|(_, l)| !l.is_empty())
                    .map(|(i, l)| {
                        l.parse().map_err(|_| ConfigError::Invalid {
                            section: "snapshots".into(),
                            key: "schedule".into(),
                            reason: format!("{}:{}: not a unix timestamp: {l:?}", path.display(), i + 1),
                        })
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub records: PathBuf,
    pub format: RecordFormat,
    pub strict: bool,
    pub schedule: Schedule,
    pub liveness_window: u64,
    pub metrics: Vec<MetricId>,
    pub metric_params: MetricParams,
    pub stability_enabled: bool,
    pub stability: StabilityConfig,
    pub simulation_enabled: bool,
    pub models: Vec<ModelKind>,
    pub simulation: SimulationConfig,
    pub cost: CostModel,
    pub output_dir: PathBuf,
    /// Write each snapshot's CSV files under `snapshots/<ts>/`.
    pub write_snapshots: bool,
    /// Raw bytes of the config file, hashed into the run manifest.
    pub source: Vec<u8>,
}

impl PipelineConfig {
    /// Reads and validates a config file, including the existence of the
    /// files it references.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let bytes = fs::read(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| ConfigError::Syntax { line: 0, reason: "not valid UTF-8".into() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = Self::parse(&text, base)?;
        cfg.source = bytes;
        cfg.check_paths()?;
        Ok(cfg)
    }

    pub fn check_paths(&self) -> Result<(), ConfigError> {
        if !self.records.is_file() {
            return Err(invalid("input", "records", format!("file not found: {}", self.records.display())));
        }
        if let Schedule::File(p) = &self.schedule {
            if !p.is_file() {
                return Err(invalid("snapshots", "schedule", format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }

    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::parse(text)?;
        let path = |p: String| if Path::new(&p).is_absolute() { PathBuf::from(p) } else { base.join(p) };

        let records = path(raw.take("input", "records").ok_or_else(|| ConfigError::Missing("[input] records is required".into()))?);
        let format = match raw.take("input", "format").as_deref() {
            None | Some("lines") => RecordFormat::Lines,
            Some("hex") => RecordFormat::Hex,
            Some("binary") => RecordFormat::Binary,
            Some(other) => return Err(invalid("input", "format", format!("expected lines|hex|binary, got {other:?}"))),
        };
        let strict = raw.parse_or("input", "strict", false)?;

        let schedule = match (raw.take("snapshots", "schedule"), raw.take("snapshots", "cadence")) {
            (Some(_), Some(_)) => {
                return Err(invalid("snapshots", "schedule", "give either schedule or cadence, not both".into()))
            }
            (Some(file), None) => Schedule::File(path(file)),
            (None, Some(c)) => parse_cadence(&c)?,
            (None, None) => return Err(ConfigError::Missing("[snapshots] needs schedule or cadence".into())),
        };
        let liveness_window = raw.parse_or("snapshots", "window", DEFAULT_LIVENESS_WINDOW)?;

        let metrics = match raw.take("metrics", "list").as_deref() {
            None | Some("all") => MetricId::ALL.to_vec(),
            Some(list) => {
                let mut ids = Vec::new();
                for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let id: MetricId = name.parse().map_err(|e| invalid("metrics", "list", e))?;
                    if !ids.contains(&id) {
                        ids.push(id);
                    }
                }
                ids
            }
        };
        let d = MetricParams::default();
        let sampling = match raw.take("metrics", "sampling").as_deref() {
            None | Some("auto") => SamplingPolicy::Auto,
            Some("exact") => SamplingPolicy::Exact,
            Some("sampled") => SamplingPolicy::Sampled,
            Some(other) => return Err(invalid("metrics", "sampling", format!("expected auto|exact|sampled, got {other:?}"))),
        };
        let seed = raw.parse_or("metrics", "seed", d.seed)?;
        let pair_source = match raw.take("metrics", "pair_source") {
            None => PairSource::Edges,
            Some(s) if s == "edges" => PairSource::Edges,
            Some(s) => match s.strip_prefix("non_edges") {
                Some("") => PairSource::SampledNonEdges { n: 100_000, seed },
                Some(rest) => {
                    let n = rest
                        .strip_prefix(':')
                        .and_then(|n| n.parse().ok())
                        .ok_or_else(|| invalid("metrics", "pair_source", format!("bad value {s:?}")))?;
                    PairSource::SampledNonEdges { n, seed }
                }
                None => return Err(invalid("metrics", "pair_source", format!("expected edges or non_edges[:N], got {s:?}"))),
            },
        };
        let metric_params = MetricParams {
            seed,
            sample_size: raw.parse_or("metrics", "sample_size", d.sample_size)?,
            linear_cap: raw.parse_or("metrics", "linear_cap", d.linear_cap)?,
            cubic_cap: raw.parse_or("metrics", "cubic_cap", d.cubic_cap)?,
            communicability_cap: raw.parse_or("metrics", "communicability_cap", d.communicability_cap)?,
            sampling,
            ccpa_alpha: raw.parse_or("metrics", "ccpa_alpha", d.ccpa_alpha)?,
            pair_source,
            forest_fire_p: raw.parse_or("metrics", "forest_fire_p", d.forest_fire_p)?,
        };
        if !(0.0..=1.0).contains(&metric_params.ccpa_alpha) {
            return Err(invalid("metrics", "ccpa_alpha", "must lie in [0, 1]".into()));
        }
        if metric_params.sample_size == 0 {
            return Err(invalid("metrics", "sample_size", "must be positive".into()));
        }

        let ff = ForestFireConfig::default();
        let sampler = ForestFireConfig {
            target_size: raw.parse_or("stability", "sample_size", ff.target_size)?,
            count: raw.parse_or("stability", "samples", ff.count)?,
            p_forward: raw.parse_or("stability", "p_forward", ff.p_forward)?,
            seed: raw.parse_or("stability", "seed", ff.seed)?,
        };
        if !(0.0..=1.0).contains(&sampler.p_forward) {
            return Err(invalid("stability", "p_forward", "must lie in [0, 1]".into()));
        }
        let stability = StabilityConfig {
            hop_slack: raw.parse_or("stability", "hop_slack", 0)?,
            sampler: (sampler.count > 0).then_some(sampler),
            long_range: raw.parse_or("stability", "long_range", true)?,
        };
        let stability_enabled = raw.parse_or("stability", "enabled", true)?;

        let simulation_enabled = raw.parse_or("simulation", "enabled", true)?;
        let models = match raw.take("simulation", "models") {
            None => ModelKind::ALL.to_vec(),
            Some(list) => {
                let mut out = Vec::new();
                for m in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let k: ModelKind = m.parse().map_err(|e| invalid("simulation", "models", e))?;
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
                out
            }
        };
        let sd = SimulationConfig::default();
        let simulation = SimulationConfig {
            n_tx: raw.parse_or("simulation", "n_tx", sd.n_tx)?,
            amount_msat: raw.parse_or("simulation", "amount_msat", sd.amount_msat)?,
            seed: raw.parse_or("simulation", "seed", sd.seed)?,
        };
        if simulation.amount_msat == 0 {
            return Err(invalid("simulation", "amount_msat", "must be positive".into()));
        }

        let c = CostModel::new(ModelKind::Lnd);
        let cost = CostModel {
            kind: ModelKind::Lnd,
            lnd_risk_factor: raw.parse_or("cost", "lnd_risk_factor", c.lnd_risk_factor)?,
            cln_risk_factor: raw.parse_or("cost", "cln_risk_factor", c.cln_risk_factor)?,
            cln_blocks_per_year: raw.parse_or("cost", "cln_blocks_per_year", c.cln_blocks_per_year)?,
            ecl_hop_base: raw.parse_or("cost", "ecl_hop_base", c.ecl_hop_base)?,
            ecl_w_base: raw.parse_or("cost", "ecl_w_base", c.ecl_w_base)?,
            ecl_w_cltv: raw.parse_or("cost", "ecl_w_cltv", c.ecl_w_cltv)?,
            ecl_cltv_max: raw.parse_or("cost", "ecl_cltv_max", c.ecl_cltv_max)?,
            epsilon: raw.parse_or("cost", "epsilon", c.epsilon)?,
        };
        cost.validate().map_err(|e| invalid("cost", "*", e))?;

        let output_dir = path(raw.take("output", "dir").unwrap_or_else(|| "out".into()));
        let write_snapshots = raw.parse_or("output", "snapshots", false)?;

        raw.reject_leftovers()?;
        Ok(PipelineConfig {
            records,
            format,
            strict,
            schedule,
            liveness_window,
            metrics,
            metric_params,
            stability_enabled,
            stability,
            simulation_enabled,
            models,
            simulation,
            cost,
            output_dir,
            write_snapshots,
            source: text.as_bytes().to_vec(),
        })
    }

    pub fn cost_model(&self, kind: ModelKind) -> CostModel {
        CostModel { kind, ..self.cost }
    }
}

fn invalid(section: &str, key: &str, reason: String) -> ConfigError {
    ConfigError::Invalid { section: section.into(), key: key.into(), reason }
}

/// Parses `START:STEP:COUNT`.
pub fn parse_cadence(s: &str) -> Result<Schedule, ConfigError> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || invalid("snapshots", "cadence", format!("expected START:STEP:COUNT, got {s:?}"));
    let [start, step, count] = parts.as_slice() else { return Err(bad()) };
    let schedule = Schedule::Cadence {
        start: start.parse().map_err(|_| bad())?,
        step: step.parse().map_err(|_| bad())?,
        count: count.parse().map_err(|_| bad())?,
    };
    if matches!(schedule, Schedule::Cadence { step: 0, count, .. } if count > 1) {
        return Err(invalid("snapshots", "cadence", "step must be positive".into()));
    }
    Ok(schedule)
}

/// Section → key → (value, line number).
struct RawConfig {
    entries: BTreeMap<(String, String), (String, usize)>,
}

const KNOWN_SECTIONS: &[&str] = &["input", "snapshots", "metrics", "stability", "simulation", "cost", "output"];

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !KNOWN_SECTIONS.contains(&name) {
                    return Err(ConfigError::Syntax { line: line_no, reason: format!("unknown section [{name}]") });
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: line_no, reason: format!("expected `key = value`, got {line:?}") });
            };
            let Some(sec) = &section else {
                return Err(ConfigError::Syntax { line: line_no, reason: "key outside of any section".into() });
            };
            let key = (sec.clone(), key.trim().to_string());
            if entries.insert(key.clone(), (value.trim().to_string(), line_no)).is_some() {
                return Err(ConfigError::Syntax { line: line_no, reason: format!("duplicate key {}", key.1) });
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.entries.remove(&(section.to_string(), key.to_string())).map(|(v, _)| v)
    }

    fn parse_or<T: std::str::FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| invalid(section, key, format!("{v:?}: {e}"))),
        }
    }

    fn reject_leftovers(&self) -> Result<(), ConfigError> {
        match self.entries.iter().next() {
            None => Ok(()),
            Some(((s, k), (_, line))) => {
                Err(ConfigError::Syntax { line: *line, reason: format!("unknown key `{k}` in [{s}]") })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[input]\nrecords = g.tsv\n[snapshots]\ncadence = 100:10:3\n";

    #[test]
    fn defaults_and_paths() {
        let cfg = PipelineConfig::parse(MINIMAL, Path::new("/data")).unwrap();
        assert_eq!(cfg.records, PathBuf::from("/data/g.tsv"));
        assert_eq!(cfg.schedule.timestamps().unwrap(), vec![100, 110, 120]);
        assert_eq!(cfg.metrics.len(), MetricId::ALL.len());
        assert_eq!(cfg.models, ModelKind::ALL.to_vec());
        assert_eq!(cfg.liveness_window, DEFAULT_LIVENESS_WINDOW);
        assert_eq!(cfg.output_dir, PathBuf::from("/data/out"));
    }

    #[test]
    fn overrides() {
        let text = format!(
            "{MINIMAL}# comment\n[metrics]\nlist = density, diameter # trailing\nseed = 4\npair_source = non_edges:50\n\
             [stability]\nhop_slack = 1\nsamples = 0\n[simulation]\nmodels = cln\n[cost]\nepsilon = 0.5\n"
        );
        let cfg = PipelineConfig::parse(&text, Path::new(".")).unwrap();
        assert_eq!(cfg.metrics, vec![MetricId::Density, MetricId::Diameter]);
        assert_eq!(cfg.metric_params.pair_source, PairSource::SampledNonEdges { n: 50, seed: 4 });
        assert_eq!(cfg.stability.hop_slack, 1);
        assert!(cfg.stability.sampler.is_none());
        assert_eq!(cfg.models, vec![ModelKind::Cln]);
        assert_eq!(cfg.cost_model(ModelKind::Ecl).epsilon, 0.5);
    }

    #[test]
    fn errors() {
        let cases = [
            ("[input]\n", "records"),
            ("[inputs]\nrecords = x\n", "unknown section"),
            (&format!("{MINIMAL}[metrics]\nlist = nope\n"), "unknown metric"),
            (&format!("{MINIMAL}[metrics]\ncolour = red\n"), "unknown key"),
            (&format!("{MINIMAL}[simulation]\nn_tx = many\n"), "n_tx"),
            (&format!("{MINIMAL}[snapshots]\ncadence = 1:1:1\n"), "duplicate"),
            ("records = x\n", "outside"),
        ];
        for (text, needle) in cases {
            let err = PipelineConfig::parse(text, Path::new(".")).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }

    #[test]
    fn missing_records_file_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, MINIMAL).unwrap();
        let err = PipelineConfig::load(&path).unwrap_err();
        assert!(err.to_string().contains("file not found"));
    }
}
