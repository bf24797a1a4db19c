//! Machine-readable emission: a single JSON record per invocation, or
//! RFC-4180-style CSV (comma separators, quoted fields where needed,
//! `\n` line ends). Floats are printed with Rust's shortest round-trip
//! formatting, so identical values always serialise to identical bytes.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
pub struct Metadata {
    /// Seed used for sampling commands; absent for purely analytic ones.
    pub seed: Option<u64>,
    pub timestamp_unix: u64,
    pub version: &'static str,
}

/// The one JSON object every command emits in JSON mode.
#[derive(Serialize)]
pub struct OutputRecord<I: Serialize, R: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: I,
    pub rows: Vec<R>,
    pub metadata: Metadata,
}

pub fn record<I: Serialize, R: Serialize>(
    command: &'static str,
    inputs: I,
    rows: Vec<R>,
    seed: Option<u64>,
) -> OutputRecord<I, R> {
    OutputRecord {
        schema_version: SCHEMA_VERSION,
        command,
        inputs,
        rows,
        metadata: Metadata {
            seed,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION"),
        },
    }
}

pub fn to_json<I: Serialize, R: Serialize>(record: &OutputRecord<I, R>) -> String {
    let mut text = serde_json::to_string_pretty(record).expect("record serialises");
    text.push('\n');
    text
}

/// In-memory CSV table rendered with a header row.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self) -> String {
        let mut out = String::new();
        push_row(&mut out, &self.header);
        for row in &self.rows {
            push_row(&mut out, row);
        }
        out
    }
}

fn push_row(out: &mut String, fields: &[String]) {
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&escape(field));
    }
    out.push('\n');
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn field_f64(v: f64) -> String {
    format!("{v}")
}

pub fn field_opt(v: Option<f64>) -> String {
    v.map(field_f64).unwrap_or_default()
}

/// Column-label fragment for a coverage percentage: 50.0 -> "band50",
/// 99.5 -> "band99.5".
pub fn band_label(coverage: f64) -> String {
    format!("band{coverage}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_with_special_characters_are_quoted() {
        let table = Table {
            header: vec!["plain".into(), "with,comma".into()],
            rows: vec![vec!["a\"b".into(), "x".into()]],
        };
        assert_eq!(table.render(), "plain,\"with,comma\"\n\"a\"\"b\",x\n");
    }

    #[test]
    fn float_fields_round_trip() {
        let v = 0.123456789012345678;
        assert_eq!(field_f64(v).parse::<f64>().unwrap(), v);
        assert_eq!(field_opt(None), "");
        assert_eq!(band_label(50.0), "band50");
        assert_eq!(band_label(99.5), "band99.5");
    }
}
