//! File formats, the panel pipeline and the `ecm` command line on top of
//! [`ecm_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod parallel;
pub mod pipeline;

pub use config::{RunManifest, YearSpec};
pub use error::{Result, ToolError};
pub use pipeline::{run_panel, PanelReport};
