//! Config-driven front end for `twinch-core`: TOML scenarios in, CSV tables out.

pub mod app;
pub mod config;
pub mod emit;
pub mod units;

pub use app::{cli_main, exit, CliError, Report};
pub use config::{parse_config, serialize_config, ConfigError, RunConfig};
pub use emit::{emit_trace, render_trace, EmitError, TRACE_HEADER};
