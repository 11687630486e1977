//! Scenario runner: TOML scenarios in, JSON or aligned-text reports and CSV
//! tables out.

pub mod bundled;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{CliError, Result};
pub use report::{BatchReport, ScenarioReport, Status};
pub use run::{run, run_batch, Artifact};
pub use scenario::Scenario;
