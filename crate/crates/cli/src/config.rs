//! `--config` overlay and the failure type shared by all commands.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Global;

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Input(String),
    /// Exit 3.
    Capacity(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Capacity(m) => write!(f, "capacity error: {m}"),
        }
    }
}

impl From<reclab::Error> for Failure {
    fn from(e: reclab::Error) -> Self {
        match e {
            reclab::Error::Capacity { .. } => Failure::Capacity(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// Required argument that may come from the command line or the config.
pub fn need<T: Clone>(v: &Option<T>, name: &str) -> Outcome<T> {
    v.clone().ok_or_else(|| input(format!("missing --{name}")))
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Overlays the keys of the `--config` file onto the global flags and the
/// command arguments, and returns the merged values. Keys may use `-` or
/// `_`; unknown keys are an input error.
pub fn merge<A: Serialize + DeserializeOwned>(global: &mut Global, args: &mut A) -> Outcome<Value> {
    let mut g = object(serde_json::to_value(&*global).expect("flags serialize"));
    let mut a = object(serde_json::to_value(&*args).expect("flags serialize"));
    if let Some(path) = global.config.clone() {
        for (key, value) in read_config(&path)? {
            let key = key.replace('_', "-");
            if a.contains_key(&key) {
                a.insert(key, value);
            } else if g.contains_key(&key) {
                g.insert(key, value);
            } else {
                return Err(input(format!("{}: unknown config key {key:?}", path.display())));
            }
        }
        let keep = global.config.take();
        *global = serde_json::from_value(Value::Object(g.clone()))
            .map_err(|e| input(format!("{}: {e}", path.display())))?;
        global.config = keep;
        *args = serde_json::from_value(Value::Object(a.clone())).map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    let mut merged = a;
    if global.recheck {
        merged.insert("recheck".into(), Value::Bool(true));
    }
    Ok(Value::Object(merged))
}

fn read_config(path: &Path) -> Outcome<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(input(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(input(format!("{}: {e}", path.display()))),
    }
}
