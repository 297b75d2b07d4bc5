//! Metric time series and their CSV form.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{MetricError, MetricId, MetricValue, Mode, Value};
use crate::gossip::Timestamp;

pub const CSV_HEADER: &str = "timestamp,metric_id,value,mode,n_samples,seed";

#[derive(Debug, Error)]
pub enum MetricCsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// One cell of the series: a value, or the code of the error that prevented
/// computing it.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesRow {
    Value(MetricValue),
    Error(String),
}

/// Rows keyed by `(timestamp, metric)`, at most one per key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricSeries {
    rows: BTreeMap<(Timestamp, MetricId), SeriesRow>,
}

impl MetricSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a computation outcome, replacing any earlier row for the key.
    pub fn insert(&mut self, at: Timestamp, metric: MetricId, outcome: Result<MetricValue, MetricError>) {
        let row = match outcome {
            Ok(v) => SeriesRow::Value(v),
            Err(e) => SeriesRow::Error(e.code().to_string()),
        };
        self.rows.insert((at, metric), row);
    }

    pub fn get(&self, at: Timestamp, metric: MetricId) -> Option<&SeriesRow> {
        self.rows.get(&(at, metric))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn error_count(&self) -> usize {
        self.rows.values().filter(|r| matches!(r, SeriesRow::Error(_))).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Timestamp, MetricId, &SeriesRow)> {
        self.rows.iter().map(|(&(t, m), r)| (t, m, r))
    }

    /// `(timestamp, value)` points of a scalar metric, skipping error rows.
    pub fn scalar_points(&self, metric: MetricId) -> Vec<(Timestamp, f64)> {
        self.iter()
            .filter(|&(_, m, _)| m == metric)
            .filter_map(|(t, _, r)| match r {
                SeriesRow::Value(v) => v.scalar().map(|x| (t, x)),
                SeriesRow::Error(_) => None,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (t, m, row) in self.iter() {
            match row {
                SeriesRow::Value(v) => match v.mode {
                    Mode::Exact => writeln!(w, "{t},{m},{},exact,,", v.value)?,
                    Mode::Sampled { n_samples, seed } => {
                        writeln!(w, "{t},{m},{},sampled,{n_samples},{seed}", v.value)?
                    }
                },
                SeriesRow::Error(code) => writeln!(w, "{t},{m},,error:{code},,")?,
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, MetricCsvError> {
        let mut series = MetricSeries::new();
        let mut lines = r.lines();
        let bad = |line: usize, reason: String| MetricCsvError::Malformed { line, reason };
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim_end) != Some(CSV_HEADER) {
            return Err(bad(1, format!("expected header `{CSV_HEADER}`")));
        }
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(line_no, format!("expected 6 fields, found {}", f.len())));
            }
            let t: Timestamp = f[0].parse().map_err(|e| bad(line_no, format!("timestamp: {e}")))?;
            let metric: MetricId = f[1].parse().map_err(|e| bad(line_no, e))?;
            let row = if let Some(code) = f[3].strip_prefix("error:") {
                SeriesRow::Error(code.to_string())
            } else {
                let parts: Result<Vec<f64>, _> = f[2].split(';').map(str::parse).collect();
                let parts = parts.map_err(|e| bad(line_no, format!("value: {e}")))?;
                let value = if parts.len() == 1 { Value::Scalar(parts[0]) } else { Value::Vector(parts) };
                let mode = match f[3] {
                    "exact" => Mode::Exact,
                    "sampled" => Mode::Sampled {
                        n_samples: f[4].parse().map_err(|e| bad(line_no, format!("n_samples: {e}")))?,
                        seed: f[5].parse().map_err(|e| bad(line_no, format!("seed: {e}")))?,
                    },
                    other => return Err(bad(line_no, format!("unknown mode `{other}`"))),
                };
                SeriesRow::Value(MetricValue { metric, value, mode })
            };
            if series.rows.insert((t, metric), row).is_some() {
                return Err(bad(line_no, format!("duplicate row for ({t}, {metric})")));
            }
        }
        Ok(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut s = MetricSeries::new();
        s.insert(10, MetricId::Density, Ok(MetricValue { metric: MetricId::Density, value: Value::Scalar(0.25), mode: Mode::Exact }));
        s.insert(
            10,
            MetricId::LorenzBetweenness,
            Ok(MetricValue {
                metric: MetricId::LorenzBetweenness,
                value: Value::Vector(vec![0.0, 0.1, 1.0]),
                mode: Mode::Sampled { n_samples: 50, seed: 7 },
            }),
        );
        s.insert(20, MetricId::PowerlawAlpha, Err(MetricError::DegenerateDistribution("x".into())));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "timestamp,metric_id,value,mode,n_samples,seed\n\
             10,density,0.25,exact,,\n\
             10,lorenz_betweenness,0;0.1;1,sampled,50,7\n\
             20,powerlaw_alpha,,error:degenerate_distribution,,\n"
        );
        assert_eq!(MetricSeries::read_csv(&buf[..]).unwrap(), s);
        assert_eq!(s.error_count(), 1);
        assert_eq!(s.scalar_points(MetricId::Density), vec![(10, 0.25)]);
    }

    #[test]
    fn duplicate_rows_rejected() {
        let text = "timestamp,metric_id,value,mode,n_samples,seed\n1,density,0.5,exact,,\n1,density,0.5,exact,,\n";
        assert!(matches!(
            MetricSeries::read_csv(text.as_bytes()),
            Err(MetricCsvError::Malformed { line: 3, .. })
        ));
    }
}
