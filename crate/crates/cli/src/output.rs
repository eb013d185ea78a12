use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::fail::Failure;

/// Collects the files of one run and writes `run_manifest.json` last.
pub struct RunOutput {
    dir: PathBuf,
    files: Vec<PathBuf>,
    started: Instant,
}

/// Round-trippable text form of a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunOutput {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, Failure> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Writes `<name>.csv` and its JSON mirror `<name>.json`.
    pub fn table(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
        let csv_path = self.dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
        }
        w.flush()?;
        self.files.push(csv_path);

        let mirror = json!({ "columns": columns, "rows": rows });
        self.json(name, &mirror)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let path = self.dir.join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_vec_pretty(value)?)?;
        self.files.push(path);
        Ok(())
    }

    pub fn finish(self, command: &str, config: &ScenarioConfig) -> Result<PathBuf, Failure> {
        let mut files = Vec::new();
        for path in &self.files {
            let bytes = std::fs::read(path)?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            files.push(json!({ "path": name, "sha256": sha256_hex(&bytes), "bytes": bytes.len() }));
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest: Value = json!({
            "program": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "files": files,
            "wall_time_seconds": self.started.elapsed().as_secs_f64(),
            "timestamp_unix": timestamp,
            "threads": rayon::current_num_threads(),
        });
        let path = self.dir.join("run_manifest.json");
        std::fs::write(&path, serde_json::to_vec_pretty(&manifest)?)?;
        Ok(path)
    }
}
