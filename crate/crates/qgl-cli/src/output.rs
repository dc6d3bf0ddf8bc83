//! Report assembly and atomic file output.

use crate::RunError;
use std::io::Write;
use std::path::Path;

/// Tabular experiment result. Rows are preformatted strings so the on-disk
/// bytes are a pure function of the data (and the seed).
pub struct Report {
    pub experiment: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Human-readable descriptions of failing rows; empty means the run
    /// passed.
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row arity mismatch");
        self.rows.push(cells);
    }

    pub fn to_csv(&self, timestamp: u64) -> String {
        let mut out = String::new();
        // Volatile header; everything below it is deterministic per seed,
        // except columns that report wall-clock measurements.
        out.push_str(&format!("# generated: unix:{timestamp}\n"));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, timestamp: u64, config_echo: &toml::Value) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(r.iter())
                    .map(|(k, v)| ((*k).to_string(), serde_json::Value::String(v.clone())))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "experiment": self.experiment,
            "generated": format!("unix:{timestamp}"),
            "columns": self.columns,
            "rows": rows,
            "passed": self.passed(),
            "failures": self.failures,
            "config": toml_to_json(config_echo),
        });
        serde_json::to_string_pretty(&doc).expect("report serialization")
    }
}

fn toml_to_json(v: &toml::Value) -> serde_json::Value {
    match v {
        toml::Value::String(s) => serde_json::Value::String(s.clone()),
        toml::Value::Integer(i) => serde_json::json!(i),
        toml::Value::Float(f) => serde_json::json!(f),
        toml::Value::Boolean(b) => serde_json::json!(b),
        toml::Value::Datetime(d) => serde_json::Value::String(d.to_string()),
        toml::Value::Array(a) => serde_json::Value::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => serde_json::Value::Object(
            t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect(),
        ),
    }
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let stem = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{stem}.tmp-{}", std::process::id()));
    let mut f = std::fs::File::create(&tmp)
        .map_err(|e| RunError::Config(format!("cannot create {}: {e}", tmp.display())))?;
    f.write_all(contents.as_bytes())
        .and_then(|_| f.sync_all())
        .map_err(|e| RunError::Config(format!("write failed: {e}")))?;
    drop(f);
    std::fs::rename(&tmp, path)
        .map_err(|e| RunError::Config(format!("rename to {} failed: {e}", path.display())))
}

/// Fixed-precision float formatting used for every deterministic cell.
pub fn fnum(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.12e}")
    }
}

pub fn fbool(b: bool) -> String {
    if b { "pass".into() } else { "fail".into() }
}
