//! Deterministic output writing: CSV tables and JSON reports, each embedding
//! the configuration hash and seed, plus helpers shared by the subcommands.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Destination directory plus the metadata stamped into every file.
pub struct OutputWriter {
    dir: PathBuf,
    config_hash: String,
    seed: u64,
    written: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn new(dir: &Path, config_hash: &str, seed: u64) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            seed,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Write a CSV file: two metadata comment lines, a header row, then rows.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<PathBuf> {
        let mut text = String::new();
        text.push_str(&format!("# config_hash={}\n", self.config_hash));
        text.push_str(&format!("# seed={}\n", self.seed));
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    /// Write a JSON report wrapped with a `meta` object.
    pub fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> io::Result<PathBuf> {
        let doc = serde_json::json!({
            "meta": { "config_hash": self.config_hash, "seed": self.seed },
            "result": payload,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Write an SVG document, inserting the metadata as a leading comment.
    pub fn svg(&mut self, name: &str, body: &str) -> io::Result<PathBuf> {
        let stamped = body.replacen(
            "<svg ",
            &format!(
                "<!-- config_hash={} seed={} -->\n<svg ",
                self.config_hash, self.seed
            ),
            1,
        );
        self.write(name, stamped.as_bytes())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Fixed-precision float formatting shared by all tabular output, so reruns
/// are byte-identical.
pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}
