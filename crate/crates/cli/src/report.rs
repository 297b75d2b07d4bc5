//! Plot-ready data files: whitespace-separated columns under a single
//! `#`-prefixed header line. Multi-curve figures separate curves with a
//! blank line (gnuplot's `index`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ln_topo_core::gossip::Timestamp;
use ln_topo_core::metrics::{MetricId, MetricSeries, SeriesRow};
use ln_topo_core::routing::ModelKind;
use ln_topo_core::stability::{Scope, StabilitySeries};
use thiserror::Error;

use crate::tables::{self, TableError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Figure {
    DensityDegree,
    Powerlaw,
    PaScore,
    Connectivity,
    Function,
    Patterns,
    Stability,
    Hops,
    Lorenz,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::DensityDegree,
        Figure::Powerlaw,
        Figure::PaScore,
        Figure::Connectivity,
        Figure::Function,
        Figure::Patterns,
        Figure::Stability,
        Figure::Hops,
        Figure::Lorenz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::DensityDegree => "density_degree",
            Figure::Powerlaw => "powerlaw",
            Figure::PaScore => "pa_score",
            Figure::Connectivity => "connectivity",
            Figure::Function => "function",
            Figure::Patterns => "patterns",
            Figure::Stability => "stability",
            Figure::Hops => "hops",
            Figure::Lorenz => "lorenz",
        }
    }

    /// Metric columns of the per-snapshot figures, in output order.
    pub fn metric_columns(self) -> &'static [MetricId] {
        use MetricId::*;
        match self {
            Figure::DensityDegree => &[MeanDegree, Density],
            Figure::Powerlaw => &[PowerlawAlpha, PowerlawR2],
            Figure::PaScore => &[AvgPreferentialAttachment, AvgPreferentialAttachmentNorm],
            Figure::Connectivity => &[BridgeCount, MinEdgeCoverSize, Transitivity],
            Figure::Function => &[BurtsEffectiveSize, EffectiveSize, InformationCentrality, GlobalEfficiency],
            Figure::Patterns => &[AvgResourceAllocation, AvgJaccard, FlpCommunityCount, AlpCommunityCount],
            Figure::Stability | Figure::Hops | Figure::Lorenz => &[],
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.dat", self.as_str())
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("figure {figure}: missing columns: {}", columns.join(", "))]
    MissingColumns { figure: Figure, columns: Vec<String> },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{path}: {reason}")]
    Metrics { path: PathBuf, reason: String },
}

/// Everything the figures draw from.
#[derive(Debug, Clone, Default)]
pub struct PlotInputs {
    pub metrics: MetricSeries,
    /// `None` when stability was not computed.
    pub stability: Option<StabilitySeries>,
    /// `(rank fraction, cumulative hop share)` per snapshot and model.
    pub hop_curves: BTreeMap<(Timestamp, ModelKind), Vec<(f64, f64)>>,
    /// Betweenness Lorenz curve per snapshot.
    pub lorenz: BTreeMap<Timestamp, Vec<(f64, f64)>>,
}

impl PlotInputs {
    /// Loads whatever a pipeline output directory contains. Absent files
    /// leave the corresponding input empty.
    pub fn load(dir: &Path) -> Result<Self, ReportError> {
        let mut inputs = PlotInputs::default();
        let metrics = dir.join("metrics.csv");
        if metrics.is_file() {
            let file = fs::File::open(&metrics).map_err(|source| ReportError::Io { path: metrics.clone(), source })?;
            inputs.metrics = MetricSeries::read_csv(std::io::BufReader::new(file))
                .map_err(|e| ReportError::Metrics { path: metrics.clone(), reason: e.to_string() })?;
        }
        let stability = dir.join("stability.csv");
        if stability.is_file() {
            inputs.stability = Some(tables::read_stability(&stability)?);
        }
        let entries = fs::read_dir(dir).map_err(|source| ReportError::Io { path: dir.into(), source })?;
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .collect();
        names.sort();
        for name in names {
            let Some(stem) = name.strip_suffix(".csv") else { continue };
            if let Some(rest) = stem.strip_prefix("hopcurve_") {
                let Some((model, ts)) = rest.split_once('_') else { continue };
                let (Ok(model), Ok(ts)) = (model.parse::<ModelKind>(), ts.parse::<Timestamp>()) else { continue };
                let (_, curve) = tables::read_hopcurve(&dir.join(&name))?;
                inputs.hop_curves.insert((ts, model), curve);
            } else if let Some(ts) = stem.strip_prefix("lorenz_").and_then(|t| t.parse::<Timestamp>().ok()) {
                let (_, curve) = tables::read_lorenz(&dir.join(&name))?;
                inputs.lorenz.insert(ts, curve);
            }
        }
        Ok(inputs)
    }
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => v.to_string(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf" } else { "-inf" }.to_string(),
        _ => "nan".to_string(),
    }
}

fn missing(figure: Figure, columns: &[&str]) -> ReportError {
    ReportError::MissingColumns { figure, columns: columns.iter().map(|c| c.to_string()).collect() }
}

/// Renders one figure's data file.
pub fn render(inputs: &PlotInputs, figure: Figure) -> Result<String, ReportError> {
    let mut out = String::new();
    match figure {
        Figure::Stability => {
            const COLS: [&str; 10] = [
                "t", "t_next", "i_node", "i_channel", "ks_D", "ks_p", "wasserstein", "wasserstein_norm",
                "i_node_sampled", "i_channel_sampled",
            ];
            let series = inputs.stability.as_ref().filter(|s| s.rows_with_scope(Scope::Full).next().is_some());
            let series = series.ok_or_else(|| missing(figure, &COLS[2..]))?;
            let sampled: BTreeMap<Timestamp, _> = series.rows_with_scope(Scope::SampleMean).map(|r| (r.t, r)).collect();
            writeln!(out, "# {}", COLS.join(" ")).unwrap();
            for r in series.rows_with_scope(Scope::Full) {
                let s = sampled.get(&r.t);
                let fields = [
                    r.i_node,
                    r.i_channel,
                    r.ks.map(|k| k.statistic),
                    r.ks.map(|k| k.p_value),
                    r.wasserstein,
                    r.wasserstein_norm,
                    s.and_then(|s| s.i_node),
                    s.and_then(|s| s.i_channel),
                ];
                let cells: Vec<String> = fields.into_iter().map(cell).collect();
                writeln!(out, "{} {} {}", r.t, r.t_next, cells.join(" ")).unwrap();
            }
        }
        Figure::Hops => {
            if inputs.hop_curves.is_empty() {
                return Err(missing(figure, &["rank_fraction", "cum_hop_share"]));
            }
            writeln!(out, "# ts model rank_fraction cum_hop_share").unwrap();
            for (i, ((ts, model), curve)) in inputs.hop_curves.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                for (x, y) in curve {
                    writeln!(out, "{ts} {model} {x} {y}").unwrap();
                }
            }
        }
        Figure::Lorenz => {
            if inputs.lorenz.is_empty() {
                return Err(missing(figure, &["population_share", "betweenness_share"]));
            }
            writeln!(out, "# ts population_share betweenness_share").unwrap();
            for (i, (ts, curve)) in inputs.lorenz.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                for (x, y) in curve {
                    writeln!(out, "{ts} {x} {y}").unwrap();
                }
            }
        }
        _ => {
            let columns = figure.metric_columns();
            let mut timestamps = BTreeSet::new();
            let mut present = BTreeSet::new();
            for (ts, id, _) in inputs.metrics.iter() {
                timestamps.insert(ts);
                present.insert(id);
            }
            let absent: Vec<&str> = columns.iter().filter(|c| !present.contains(c)).map(|c| c.as_str()).collect();
            if !absent.is_empty() {
                return Err(missing(figure, &absent));
            }
            let names: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
            writeln!(out, "# ts {}", names.join(" ")).unwrap();
            for ts in timestamps {
                let cells: Vec<String> = columns
                    .iter()
                    .map(|&id| match inputs.metrics.get(ts, id) {
                        Some(SeriesRow::Value(v)) => cell(v.scalar()),
                        _ => cell(None),
                    })
                    .collect();
                writeln!(out, "{ts} {}", cells.join(" ")).unwrap();
            }
        }
    }
    Ok(out)
}

/// Writes `<dir>/<figure>.dat` and returns its path.
pub fn emit_plot_data(inputs: &PlotInputs, figure: Figure, dir: &Path) -> Result<PathBuf, ReportError> {
    let text = render(inputs, figure)?;
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.into(), source })?;
    let path = dir.join(figure.file_name());
    fs::write(&path, text).map_err(|source| ReportError::Io { path: path.clone(), source })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ln_topo_core::metrics::{MetricError, MetricValue, Mode, Value};

    fn data_lines(text: &str) -> Vec<Vec<&str>> {
        text.lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().collect())
            .collect()
    }

    fn put(series: &mut MetricSeries, ts: Timestamp, metric: MetricId, x: f64) {
        series.insert(ts, metric, Ok(MetricValue { metric, value: Value::Scalar(x), mode: Mode::Exact }));
    }

    #[test]
    fn names_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
        }
        assert!("fig3".parse::<Figure>().is_err());
    }

    #[test]
    fn metric_figure_layout_and_nan() {
        let mut inputs = PlotInputs::default();
        for ts in [10, 20, 30] {
            put(&mut inputs.metrics, ts, MetricId::MeanDegree, 2.0);
            put(&mut inputs.metrics, ts, MetricId::Density, 0.5);
        }
        inputs.metrics.insert(20, MetricId::Density, Err(MetricError::EmptyGraph));
        let text = render(&inputs, Figure::DensityDegree).unwrap();
        assert_eq!(text.lines().next(), Some("# ts mean_degree density"));
        let rows = data_lines(&text);
        assert_eq!(rows, vec![vec!["10", "2", "0.5"], vec!["20", "2", "nan"], vec!["30", "2", "0.5"]]);
        match render(&inputs, Figure::Powerlaw) {
            Err(ReportError::MissingColumns { columns, .. }) => assert_eq!(columns, ["powerlaw_alpha", "powerlaw_r2"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn curve_figures_need_data() {
        let inputs = PlotInputs::default();
        for f in [Figure::Hops, Figure::Lorenz, Figure::Stability] {
            assert!(matches!(render(&inputs, f), Err(ReportError::MissingColumns { .. })), "{f}");
        }
    }

    #[test]
    fn curves_are_blocked() {
        let mut inputs = PlotInputs::default();
        inputs.lorenz.insert(1, vec![(0.0, 0.0), (1.0, 1.0)]);
        inputs.lorenz.insert(2, vec![(0.0, 0.0), (0.5, 0.1), (1.0, 1.0)]);
        let text = render(&inputs, Figure::Lorenz).unwrap();
        assert_eq!(data_lines(&text).len(), 5);
        assert_eq!(text.matches("\n\n").count(), 1);
    }
}
