//! Configuration files and run output.

mod config;
mod csv;
mod manifest;
mod vtk;

pub use config::{parse_config, serialize_config, VALID_KEYS};
pub use csv::{diagnostics_csv, parse_diagnostics_csv, write_diagnostics_csv, CSV_HEADER};
pub use manifest::{build_id, PhaseTimings, RunManifest};
pub use vtk::{vtk_string, write_vtk};
