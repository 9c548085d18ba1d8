//! Serialization of results. Every floating-point number in a result is
//! rounded to the configured number of significant digits, identically in
//! JSON and CSV.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Formats a number for CSV; the digits match the JSON rendering.
pub fn csv_number(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    serde_json::to_string(&r).unwrap_or_else(|_| r.to_string())
}

pub fn csv_optional(x: Option<f64>, digits: usize) -> String {
    x.map(|v| csv_number(v, digits)).unwrap_or_default()
}

pub fn csv_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(|x| round_sig(x, digits)).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|i| round_value(i, digits)),
        Value::Object(map) => map.values_mut().for_each(|i| round_value(i, digits)),
        _ => {}
    }
}

/// JSON document emitted by every command: the command name, the resolved
/// configuration (full precision, re-runnable as `--config`), optional
/// preset provenance, and the rounded result.
pub fn json_document(
    command: &str,
    config: Option<&impl Serialize>,
    provenance: Option<&impl Serialize>,
    result: &impl Serialize,
    digits: usize,
) -> Result<Vec<u8>, CliError> {
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String(command.into()));
    if let Some(c) = config {
        doc.insert("config".into(), to_value(c)?);
    }
    if let Some(p) = provenance {
        doc.insert("provenance".into(), to_value(p)?);
    }
    let mut result = to_value(result)?;
    round_value(&mut result, digits);
    doc.insert("result".into(), result);
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(json_err)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(json_err)
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Config(format!("serialization failed: {e}"))
}

/// Writes a header and rows as RFC 4180 CSV.
pub fn csv_table<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
