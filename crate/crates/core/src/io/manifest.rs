//! JSON record of a completed run.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub mesh_and_fem_s: f64,
    pub bem_s: f64,
    pub eddy_setup_s: f64,
    pub llg_solves_s: f64,
    pub eddy_solves_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// The configuration as parsed, in `key=value` form.
    pub config: String,
    pub build_id: String,
    pub steps: usize,
    pub timings: PhaseTimings,
    pub files: Vec<PathBuf>,
}

/// Package version plus the commit hash when one was provided at build time.
pub fn build_id() -> String {
    match option_env!("ELLG_GIT_HASH") {
        Some(h) => format!("{}+{h}", env!("CARGO_PKG_VERSION")),
        None => format!("{}+unknown", env!("CARGO_PKG_VERSION")),
    }
}

impl RunManifest {
    /// Checks that every listed file exists, then writes the manifest.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(missing) = self.files.iter().find(|f| !f.exists()) {
            return Err(Error::InvalidArgument(format!("manifest lists missing file {}", missing.display())));
        }
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}
