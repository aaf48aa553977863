//! Artifacts: `results.csv`, `summary.json` and field files in the output
//! directory. Everything written is a pure function of the configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lplab_core::io::write_field;
use lplab_core::quasinorm::{format_extended, Flag, SpaceParams};
use lplab_core::verify::Verdict;
use lplab_core::SampledField;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const CSV_HEADER: [&str; 8] = ["function_id", "characterization", "s", "p", "q", "L", "value", "flag"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub function_id: String,
    pub characterization: String,
    pub s: String,
    pub p: String,
    pub q: String,
    #[serde(rename = "L")]
    pub order: u32,
    pub value: String,
    pub flag: String,
}

impl Row {
    pub fn new(id: impl Into<String>, characterization: impl Into<String>, params: &SpaceParams, value: f64, flag: Flag) -> Self {
        Self {
            function_id: id.into(),
            characterization: characterization.into(),
            s: format_extended(params.s),
            p: format_extended(params.p),
            q: format_extended(params.q),
            order: params.order,
            value: format_number(value),
            flag: flag.as_str().to_string(),
        }
    }
}

/// Shortest round-trip decimal, `inf`/`nan` spelled out.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format_extended(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NO-VERDICT")]
    NoVerdict,
    #[serde(rename = "ERROR")]
    Error,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Self::Pass,
            Verdict::Fail => Self::Fail,
            Verdict::NoVerdict => Self::NoVerdict,
        }
    }
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Ok | Self::Pass | Self::NoVerdict => 0,
            Self::Fail | Self::Error => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "OK",
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NoVerdict => "NO-VERDICT",
            Self::Error => "ERROR",
        }
    }
}

/// What a command produced, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    /// One line for the terminal.
    pub headline: String,
    pub rows: Vec<Row>,
    pub result: Value,
    /// File stem (relative to the output directory) and field.
    pub fields: Vec<(String, SampledField)>,
    /// Additional JSON documents, by file stem.
    pub documents: Vec<(String, Value)>,
}

impl Outcome {
    pub fn new(status: Status, headline: String, rows: Vec<Row>, result: Value) -> Self {
        Self { status, headline, rows, result, fields: Vec::new(), documents: Vec::new() }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: String,
    status: Status,
    /// Verdicts are measurements on finite grids, not proofs.
    note: &'static str,
    config: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    result: &'a Value,
}

/// Paths of the artifacts written by [`write_outcome`].
#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub summary: PathBuf,
    /// Field files and extra JSON documents.
    pub fields: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    w.write_record(CSV_HEADER).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_field_file(path: &Path, field: &SampledField) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    write_field(field, &mut out).map_err(|e| io_err(path, e))?;
    out.flush().map_err(|e| io_err(path, e))
}

/// Writes the CSV, the JSON summary (with `error` when the computation
/// failed) and every field of `outcome`.
pub fn write_outcome(
    dir: &Path,
    command: &str,
    config: &Value,
    outcome: &Outcome,
    error: Option<String>,
) -> Result<Written, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let csv = dir.join("results.csv");
    write_csv(&csv, &outcome.rows)?;
    let mut fields = Vec::with_capacity(outcome.fields.len());
    for (stem, field) in &outcome.fields {
        let path = dir.join(format!("{stem}.bin"));
        write_field_file(&path, field)?;
        fields.push(path);
    }
    for (stem, doc) in &outcome.documents {
        let path = dir.join(format!("{stem}.json"));
        write_json(&path, doc)?;
        fields.push(path);
    }
    let summary = dir.join("summary.json");
    write_json(
        &summary,
        &Summary {
            command: command.to_string(),
            status: outcome.status,
            note: "evidence from sampled fields, not proof",
            config,
            error,
            result: &outcome.result,
        },
    )?;
    Ok(Written { csv, summary, fields })
}
