//! Deterministic artifact writers. Every run directory gets a manifest
//! recording the resolved configuration and code version; CSV tables carry
//! a header row and print floats with 17 significant digits so identical
//! configs reproduce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{CliError, LoadedConfig};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

pub struct RunOutput {
    dir: PathBuf,
    csv: bool,
    json: bool,
    files: Vec<String>,
}

impl RunOutput {
    pub fn create(dir: &Path, cfg: &LoadedConfig) -> Result<RunOutput, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(RunOutput {
            dir: dir.to_path_buf(),
            csv: cfg.csv,
            json: cfg.json,
            files: Vec::new(),
        })
    }

    /// Writes a CSV table (if the run requested CSV output). Rows are
    /// emitted in the order given; cells are written verbatim, so numeric
    /// cells should already be formatted with `fmt_float`.
    pub fn csv_table(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), CliError> {
        if !self.csv {
            return Ok(());
        }
        let path = self.dir.join(name);
        let mut writer = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        writer.write_record(header).map_err(|e| io_err(&path, e))?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            writer.write_record(&row).map_err(|e| io_err(&path, e))?;
        }
        writer.flush().map_err(|e| io_err(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes a pretty-printed JSON document (if the run requested JSON
    /// output). Object keys are sorted by construction, so serialization
    /// is deterministic.
    pub fn json_doc(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        if !self.json {
            return Ok(());
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes the manifest. Always emitted, whatever formats were chosen:
    /// it records the config as given, the unit-resolved parameters, and
    /// the code version, which is enough to reproduce the run exactly.
    pub fn finish(mut self, cfg: &LoadedConfig, jobs: Option<usize>) -> Result<PathBuf, CliError> {
        self.files.sort();
        let mut formats = Vec::new();
        if cfg.csv {
            formats.push("csv");
        }
        if cfg.json {
            formats.push("json");
        }
        let manifest = json!({
            "code_version": env!("CARGO_PKG_VERSION"),
            "scenario": cfg.scenario.name(),
            "config": cfg.raw,
            "parameters_resolved": cfg.resolved_value(),
            "formats": formats,
            "jobs": jobs,
            "output_files": self.files,
        });
        let path = self.dir.join("manifest.json");
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| io_err(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(self.dir)
    }
}
