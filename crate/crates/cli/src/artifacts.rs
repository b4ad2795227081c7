use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Files, warnings and scalar results collected while one run executes.
#[derive(Debug, Default)]
pub struct RunState {
    pub dir: PathBuf,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub metrics: BTreeMap<String, serde_json::Value>,
}

impl RunState {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            ..Default::default()
        })
    }

    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let f = File::create(self.dir.join(name))?;
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
        Ok(BufWriter::new(f))
    }

    /// Creates `name` and hands it to a writer from the core crate.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(BufWriter<File>) -> slowpass::Result<BufWriter<File>>,
    {
        let w = f(self.create(name)?)?;
        finish(w)
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("metric values serialize");
        self.metrics.insert(key.to_string(), v);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

pub fn finish<W: Write>(w: BufWriter<W>) -> Result<(), CliError> {
    let mut inner = w.into_inner().map_err(|e| e.into_error())?;
    inner.flush()?;
    Ok(())
}
