//! Input loading with content hashes, provenance, and rendering.

use std::fmt::Write as _;
use std::path::Path;

use reclab::io::{SpaceFile, SystemFile};
use reclab::{FiniteMetricSpace, FiniteSystem};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::config::{input, Failure, Outcome};

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Reads input files and remembers what was read.
#[derive(Default)]
pub struct Loader {
    pub inputs: Vec<InputRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

impl Loader {
    pub fn text(&mut self, path: &Path) -> Outcome<String> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            bytes: text.len(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    pub fn json(&mut self, path: &Path) -> Outcome<Value> {
        let text = self.text(path)?;
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
    }

    pub fn system(&mut self, path: &Path) -> Outcome<FiniteSystem> {
        let text = self.text(path)?;
        let file: SystemFile = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
        file.to_system().map_err(|e| located(path, e))
    }

    /// A space file, or the space of a system file.
    pub fn space(&mut self, path: &Path) -> Outcome<FiniteMetricSpace> {
        let value = self.json(path)?;
        let file: SpaceFile = if let Some(space) = value.get("space").filter(|_| value.get("map").is_some()) {
            serde_json::from_value(space.clone())
        } else {
            serde_json::from_value(value)
        }
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
        file.to_space().map_err(|e| located(path, e))
    }
}

fn located(path: &Path, e: reclab::Error) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// The result of one command before rendering.
pub struct Report {
    /// JSON object; the provenance block is added on output.
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
    /// False when a checked property failed (exit 1).
    pub ok: bool,
}

impl Report {
    pub fn new(result: impl Serialize, text: String, ok: bool) -> Self {
        Self {
            result: serde_json::to_value(result).expect("results serialize"),
            text,
            csv: None,
            ok,
        }
    }
}

pub fn provenance(command: &str, config: &Value, loader: &Loader) -> Value {
    json!({
        "tool": concat!("reclab ", env!("CARGO_PKG_VERSION")),
        "algorithm": reclab::ALGORITHM_VERSION,
        "command": command,
        "config": config,
        "inputs": loader.inputs,
        "capacity_cap": reclab::capacity_cap(),
    })
}

pub fn render(report: &Report, format: Format, provenance: Value) -> Outcome<String> {
    match format {
        Format::Json => {
            let mut body = report.result.clone();
            match body.as_object_mut() {
                // Sets carry their own provenance; the run's block extends it.
                Some(m) => match (m.get_mut("provenance"), provenance) {
                    (Some(Value::Object(own)), Value::Object(run)) => own.extend(run),
                    (_, run) => {
                        m.insert("provenance".into(), run);
                    }
                },
                None => body = json!({ "result": body, "provenance": provenance }),
            }
            Ok(serde_json::to_string_pretty(&body).expect("json renders") + "\n")
        }
        Format::Text => {
            let mut out = report.text.clone();
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let _ = writeln!(out, "-- provenance");
            let _ = writeln!(out, "command: {}", provenance["command"].as_str().unwrap_or(""));
            let _ = writeln!(out, "algorithm: {}", reclab::ALGORITHM_VERSION);
            let _ = writeln!(out, "config: {}", provenance["config"]);
            for i in provenance["inputs"].as_array().into_iter().flatten() {
                let _ = writeln!(out, "input: {} sha256 {}", i["path"].as_str().unwrap_or(""), i["sha256"].as_str().unwrap_or(""));
            }
            Ok(out)
        }
        Format::Csv => {
            let csv = report
                .csv
                .as_ref()
                .ok_or_else(|| input("csv output is only available for sets and return times"))?;
            Ok(format!("# provenance: {provenance}\n{csv}"))
        }
    }
}
