//! Simulation harness around `bearing-core`: configuration files, seeded
//! single runs and Monte Carlo batches, CSV export, and self-contained SVG
//! plots of trajectories and error curves.

pub mod cli;
pub mod config;
pub mod csv;
pub mod metrics;
pub mod plot;
pub mod run;

pub use config::{parse_config, ConfigError, ObserverChoice, RunConfig};
pub use csv::{format_records, write_csv};
pub use metrics::{BatchMetrics, RunMetrics};
pub use plot::{render_svg, write_plot};
pub use run::{run_batch, run_single, run_single_detailed, Record, RunError, RunOutput};
