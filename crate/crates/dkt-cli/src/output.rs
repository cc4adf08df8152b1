//! CSV and JSON writers with reproducible formatting: floats carry 17
//! significant digits (round-trip exact for f64), so identical runs produce
//! byte-identical files.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dkt_core::ObservableField;
use dkt_core::RatioHistogram;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid -0e0 vs 0e0 churn
        "0.0000000000000000e0".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

pub struct OutputDir {
    dir: PathBuf,
    written: Vec<(String, String)>,
    started: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputDir { dir: dir.to_path_buf(), written: Vec::new(), started: Instant::now() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes bytes and records the file's checksum for the metadata sidecar.
    pub fn write_file(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        let digest = Sha256::digest(contents.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{:02x}", b)).collect();
        self.written.push((name.to_string(), hex));
        Ok(())
    }

    pub fn write_field_csv(&mut self, name: &str, field: &ObservableField) -> Result<()> {
        let mut out = String::from("theta,phi,value\n");
        for (it, &theta) in field.grid.thetas().iter().enumerate() {
            for (ip, &phi) in field.grid.phis().iter().enumerate() {
                out.push_str(&fmt_f64(theta));
                out.push(',');
                out.push_str(&fmt_f64(phi));
                out.push(',');
                out.push_str(&fmt_f64(field.values[[it, ip]]));
                out.push('\n');
            }
        }
        self.write_file(name, &out)
    }

    pub fn write_histogram_csv(&mut self, name: &str, hist: &RatioHistogram) -> Result<()> {
        let mut out = String::from("bin_left,bin_right,density\n");
        for (i, d) in hist.densities.iter().enumerate() {
            out.push_str(&fmt_f64(hist.bin_edges[i]));
            out.push(',');
            out.push_str(&fmt_f64(hist.bin_edges[i + 1]));
            out.push(',');
            out.push_str(&fmt_f64(*d));
            out.push('\n');
        }
        self.write_file(name, &out)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_file(name, &text)
    }

    /// Emits the metadata sidecar: resolved config, artifact version,
    /// wall-clock and per-output checksums. Identical config and seed give
    /// identical checksums; only the wall-clock field varies between runs.
    pub fn finish<T: Serialize>(self, subcommand: &str, config: &T) -> Result<()> {
        #[derive(Serialize)]
        struct FileEntry {
            file: String,
            sha256: String,
        }
        #[derive(Serialize)]
        struct Metadata<'a, T> {
            artifact_version: &'a str,
            subcommand: &'a str,
            config: &'a T,
            wall_clock_seconds: f64,
            outputs: Vec<FileEntry>,
        }
        let meta = Metadata {
            artifact_version: ARTIFACT_VERSION,
            subcommand,
            config,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self
                .written
                .iter()
                .map(|(file, sha256)| FileEntry { file: file.clone(), sha256: sha256.clone() })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        let path = self.path("run_meta.json");
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [1.0, -0.123456789012345, 3.0e-300, 7.25, std::f64::consts::PI] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{} -> {}", x, s);
        }
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
    }
}
