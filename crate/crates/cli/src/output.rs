//! Report writing: a JSON envelope per command plus tidy CSV tables.

use crate::config::Format;
use crate::error::CliResult;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Version of the report envelope.
pub const ENVELOPE_SCHEMA: u32 = 1;

/// A tidy table: one header, one row per observation.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    module_version: &'a str,
    config_hash: &'a str,
    report: &'a T,
}

pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
    pub config_hash: String,
    pub version: &'static str,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Output {
    pub fn new(dir: PathBuf, format: Format, config_bytes: &[u8]) -> Self {
        Output { dir, format, config_hash: config_hash(config_bytes), version: env!("CARGO_PKG_VERSION") }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `<command>.json` and/or `<command>.csv`; returns the paths written.
    pub fn write<T: Serialize>(&self, command: &str, report: &T, table: &Table) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        if self.format.json() {
            let env = Envelope {
                schema: ENVELOPE_SCHEMA,
                command,
                module_version: self.version,
                config_hash: &self.config_hash,
                report,
            };
            let p = self.path(&format!("{command}.json"));
            let mut text = serde_json::to_string_pretty(&env)?;
            text.push('\n');
            fs::write(&p, text)?;
            written.push(p);
        }
        if self.format.csv() {
            let p = self.path(&format!("{command}.csv"));
            self.write_table(&p, table)?;
            written.push(p);
        }
        Ok(written)
    }

    /// CSV with the config hash and module version appended to every row.
    pub fn write_table(&self, path: &Path, table: &Table) -> CliResult<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = table.header.clone();
        header.extend(["config_hash".to_string(), "module_version".to_string()]);
        w.write_record(&header)?;
        for row in &table.rows {
            let mut r = row.clone();
            r.extend([self.config_hash.clone(), self.version.to_string()]);
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }
}
