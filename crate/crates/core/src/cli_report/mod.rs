//! Run configuration and report emission.

mod config;
mod emit;

pub use config::{load_config, parse_config, DriftModeName, DriftSection, OutputSection, RateSection, ReportFormat, RunConfig};
pub use emit::{emit_report, read_report, write_csv, write_histograms, write_json, ReportFile};
