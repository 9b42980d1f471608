//! Flat records, tables of records, and their JSON/CSV serialization.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// One output row: scalar fields plus the anchor slug naming what it measures.
pub type Record = BTreeMap<String, Value>;

/// Flattens `body` into a record; nested objects become dotted keys, arrays
/// stay as values.
pub fn record(anchor: &str, body: impl Serialize) -> Record {
    let mut rec = Record::new();
    rec.insert("anchor".into(), Value::String(anchor.into()));
    flatten_into(&mut rec, "", serde_json::to_value(body).expect("record body serializes"));
    rec
}

fn flatten_into(rec: &mut Record, prefix: &str, value: Value) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten_into(rec, &key, v);
            }
        }
        other => {
            let key = if prefix.is_empty() { "value".to_string() } else { prefix.to_string() };
            rec.insert(key, other);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub rows: Vec<Record>,
}

impl Table {
    pub fn new(name: &str) -> Self {
        Table { name: name.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, rec: Record) {
        self.rows.push(rec);
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> =
            self.rows.iter().map(|r| Value::Object(r.clone().into_iter().collect::<Map<_, _>>())).collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    }

    /// Header is the sorted union of keys; nested values become compact JSON.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let columns: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.keys()).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(columns.iter().map(|c| c.as_str())).map_err(internal)?;
        for row in &self.rows {
            let cells: Vec<String> = columns
                .iter()
                .map(|c| match row.get(*c) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                })
                .collect();
            w.write_record(&cells).map_err(internal)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
