//! Batch engine for `lindsteady-core`: TOML run configurations, sweep grids,
//! figure presets, CSV records and matrix dumps.

pub mod check;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{load_config, parse_config, RunConfig};
pub use error::{HarnessError, Result};
pub use grid::{load_grid, parse_grid, SweepGrid};
pub use output::{read_matrix_dump, write_matrix_dump, write_records_csv, ResultRecord};
pub use presets::{preset, Preset};
pub use run::{run_point, run_sweep, solve_point, PointOutput};
