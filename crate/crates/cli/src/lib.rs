//! Pipeline orchestration and report output for the `ln-topo` command.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod tables;

pub use config::{ConfigError, PipelineConfig};
pub use pipeline::{run_pipeline, PipelineError, RunSummary};
pub use report::{emit_plot_data, Figure, PlotInputs, ReportError};
