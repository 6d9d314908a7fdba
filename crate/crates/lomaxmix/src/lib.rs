//! File formats, versioned fit reports and the `lomaxmix` command-line tool
//! built on [`lomaxmix_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod model_spec;
pub mod report;

pub use error::CliError;
pub use report::{FitReport, SCHEMA_VERSION};
