//! Loading, validating and writing datasets.
//!
//! Two formats are supported. JSON mirrors [`QraDataset`] field for field.
//! CSV holds one measurement per row with the reserved columns `object`,
//! `measurand`, `value`, `source` (and optionally `timestamp`), plus one
//! `cond.<name>` column per condition of measurement; an empty condition cell
//! means the value is unknown. Declarations go in records whose first field
//! is a directive:
//!
//! ```text
//! #condition,<name>,<category>
//! #object,<id>,<display_name>,<description>
//! #measurand,<id>,<display_name>,<unit>,<scale_min>,<scale_max>,<value_kind>
//! ```
//!
//! When a file has no `#object` (or `#measurand`) records, objects (or
//! measurands) are declared implicitly from the rows, with measurand scales
//! starting at 0.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    default_condition_schema, ConditionCategory, ConditionDef, ConditionSchema, ConditionValue,
    Measurand, Measurement, ObjectRef, QraDataset, ValueKind,
};

pub const COND_PREFIX: &str = "cond.";
const RESERVED: [&str; 5] = ["object", "measurand", "value", "source", "timestamp"];
const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Schema,
    Object(String),
    Measurand(String),
    Measurement { index: usize, line: Option<u64> },
    Group { object: String, measurand: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Schema => f.write_str("schema"),
            Location::Object(id) => write!(f, "object `{id}`"),
            Location::Measurand(id) => write!(f, "measurand `{id}`"),
            Location::Measurement {
                index,
                line: Some(line),
            } => write!(f, "row {} (line {line})", index + 1),
            Location::Measurement { index, line: None } => write!(f, "row {}", index + 1),
            Location::Group { object, measurand } => write!(f, "group {object}/{measurand}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl ValidationIssue {
    fn error(location: Location, message: impl Into<String>) -> Self {
        ValidationIssue {
            severity: Severity::Error,
            location,
            message: message.into(),
        }
    }

    fn warning(location: Location, message: impl Into<String>) -> Self {
        ValidationIssue {
            severity: Severity::Warning,
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.location, self.message)
    }
}

pub fn has_errors(issues: &[ValidationIssue]) -> bool {
    issues.iter().any(|i| i.severity == Severity::Error)
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: u64,
        column: Option<u64>,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dataset has {} validation error(s); first: {}", count_errors(.0), first_error(.0))]
    Validation(Vec<ValidationIssue>),
    #[error("cannot infer dataset format from `{0}` (expected .csv or .json)")]
    UnknownFormat(String),
}

fn count_errors(issues: &[ValidationIssue]) -> usize {
    issues
        .iter()
        .filter(|i| i.severity == Severity::Error)
        .count()
}

fn first_error(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .find(|i| i.severity == Severity::Error)
        .map(ToString::to_string)
        .unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, DatasetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Auto,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "auto" => Ok(Format::Auto),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl Format {
    /// Resolves `Auto` from the file extension.
    pub fn resolve(self, path: &Path) -> Result<Format> {
        match self {
            Format::Auto => match path
                .extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase)
            {
                Some(ext) if ext == "csv" => Ok(Format::Csv),
                Some(ext) if ext == "json" => Ok(Format::Json),
                _ => Err(DatasetError::UnknownFormat(path.display().to_string())),
            },
            f => Ok(f),
        }
    }
}

/// Reads, parses and validates a dataset file.
pub fn load_dataset(path: impl AsRef<Path>, format: Format) -> Result<QraDataset> {
    let path = path.as_ref();
    let format = format.resolve(path)?;
    let bytes = std::fs::read(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| DatasetError::Parse {
        line: 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count() as u64,
        column: None,
        message: "file is not valid UTF-8".to_string(),
    })?;
    match format {
        Format::Csv => from_csv_str(&text),
        Format::Json => from_json_str(&text),
        Format::Auto => unreachable!("resolved above"),
    }
}

/// Writes a dataset in the given format (`Auto` picks by extension).
pub fn save_dataset(dataset: &QraDataset, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let text = match format.resolve(path)? {
        Format::Csv => to_csv_string(dataset)?,
        _ => to_json_string(dataset),
    };
    std::fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check(dataset: QraDataset, lines: Option<&[u64]>) -> Result<QraDataset> {
    let mut issues = validate_dataset(&dataset);
    if !has_errors(&issues) {
        return Ok(dataset);
    }
    if let Some(lines) = lines {
        for issue in &mut issues {
            if let Location::Measurement { index, line } = &mut issue.location {
                *line = lines.get(*index).copied();
            }
        }
    }
    Err(DatasetError::Validation(issues))
}

pub fn from_json_str(text: &str) -> Result<QraDataset> {
    if text.trim().is_empty() {
        return Err(DatasetError::Parse {
            line: 1,
            column: None,
            message: "empty file".to_string(),
        });
    }
    let dataset: QraDataset = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => DatasetError::Schema(e.to_string()),
        _ => DatasetError::Parse {
            line: e.line() as u64,
            column: Some(e.column() as u64),
            message: e.to_string(),
        },
    })?;
    check(dataset, None)
}

pub fn to_json_string(dataset: &QraDataset) -> String {
    let mut s = serde_json::to_string_pretty(dataset).expect("dataset serializes");
    s.push('\n');
    s
}

fn parse_error(line: u64, column: Option<u64>, message: impl Into<String>) -> DatasetError {
    DatasetError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn field(record: &csv::StringRecord, i: usize) -> &str {
    record.get(i).map(str::trim).unwrap_or("")
}

fn parse_real(text: &str, line: u64, column: u64, what: &str) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(
            line,
            Some(column),
            format!("{what} `{text}` is not a finite decimal number"),
        )),
    }
}

struct Header {
    object: usize,
    measurand: usize,
    value: usize,
    source: Option<usize>,
    timestamp: Option<usize>,
    conditions: Vec<(String, usize)>,
    width: usize,
}

fn parse_header(record: &csv::StringRecord) -> Result<Header> {
    let mut positions: HashMap<&str, usize> = HashMap::new();
    let mut conditions = Vec::new();
    let mut seen = HashSet::new();
    for (i, name) in record.iter().map(str::trim).enumerate() {
        if !seen.insert(name.to_string()) {
            return Err(DatasetError::Schema(format!("duplicate column `{name}`")));
        }
        if let Some(cond) = name.strip_prefix(COND_PREFIX) {
            if cond.is_empty() {
                return Err(DatasetError::Schema(
                    "empty condition column name `cond.`".to_string(),
                ));
            }
            conditions.push((cond.to_string(), i));
        } else if RESERVED.contains(&name) {
            positions.insert(RESERVED.iter().find(|r| **r == name).copied().unwrap(), i);
        } else {
            return Err(DatasetError::Schema(format!("unexpected column `{name}`")));
        }
    }
    let required = |name: &str| {
        positions
            .get(name)
            .copied()
            .ok_or_else(|| DatasetError::Schema(format!("missing required column `{name}`")))
    };
    Ok(Header {
        object: required("object")?,
        measurand: required("measurand")?,
        value: required("value")?,
        source: positions.get("source").copied(),
        timestamp: positions.get("timestamp").copied(),
        conditions,
        width: record.len(),
    })
}

/// Parses and validates the CSV layout described in the module docs.
pub fn from_csv_str(text: &str) -> Result<QraDataset> {
    if text.trim().is_empty() {
        return Err(parse_error(1, None, "empty file"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut header: Option<Header> = None;
    let mut categories: Vec<(String, ConditionCategory, u64)> = Vec::new();
    let mut objects: Vec<ObjectRef> = Vec::new();
    let mut measurands: Vec<Measurand> = Vec::new();
    let mut measurements = Vec::new();
    let mut lines = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_error(line, None, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let head = field(&record, 0);

        if let Some(directive) = head.strip_prefix('#') {
            match directive {
                "condition" => {
                    let category = ConditionCategory::from_str(field(&record, 2))
                        .map_err(|m| parse_error(line, Some(3), m))?;
                    categories.push((field(&record, 1).to_string(), category, line));
                }
                "object" => {
                    let id = field(&record, 1).to_string();
                    let display = field(&record, 2);
                    let description = field(&record, 3);
                    objects.push(ObjectRef {
                        display_name: if display.is_empty() {
                            id.clone()
                        } else {
                            display.to_string()
                        },
                        id,
                        description: (!description.is_empty()).then(|| description.to_string()),
                    });
                }
                "measurand" => {
                    let id = field(&record, 1).to_string();
                    let display = field(&record, 2);
                    let scale_min = match field(&record, 4) {
                        "" => 0.0,
                        t => parse_real(t, line, 5, "scale_min")?,
                    };
                    let scale_max = match field(&record, 5) {
                        "" => None,
                        t => Some(parse_real(t, line, 6, "scale_max")?),
                    };
                    let value_kind = match field(&record, 6) {
                        "" => ValueKind::Continuous,
                        t => ValueKind::from_str(t).map_err(|m| parse_error(line, Some(7), m))?,
                    };
                    measurands.push(Measurand {
                        display_name: if display.is_empty() {
                            id.clone()
                        } else {
                            display.to_string()
                        },
                        id,
                        unit: field(&record, 3).to_string(),
                        scale_min,
                        scale_max,
                        value_kind,
                    });
                }
                // Any other `#` record is a comment.
                _ => {}
            }
            continue;
        }

        let Some(h) = header.as_ref() else {
            header = Some(parse_header(&record)?);
            continue;
        };
        if record.len() != h.width {
            return Err(parse_error(
                line,
                None,
                format!("expected {} fields, found {}", h.width, record.len()),
            ));
        }
        let value = parse_real(field(&record, h.value), line, h.value as u64 + 1, "value")?;
        let timestamp = match h.timestamp.map(|i| (i, field(&record, i))) {
            None | Some((_, "")) => None,
            Some((i, t)) => Some(NaiveDate::parse_from_str(t, DATE_FORMAT).map_err(|e| {
                parse_error(line, Some(i as u64 + 1), format!("timestamp `{t}`: {e}"))
            })?),
        };
        let conditions: BTreeMap<String, ConditionValue> = h
            .conditions
            .iter()
            .map(|(name, i)| {
                let raw = record.get(*i).unwrap_or("");
                (
                    name.clone(),
                    ConditionValue::from(Some(raw.trim().to_string())),
                )
            })
            .collect();
        measurements.push(Measurement {
            object: field(&record, h.object).to_string(),
            measurand: field(&record, h.measurand).to_string(),
            value,
            conditions,
            source: h
                .source
                .map(|i| field(&record, i).to_string())
                .unwrap_or_default(),
            timestamp,
        });
        lines.push(line);
    }

    let header = header.ok_or_else(|| DatasetError::Schema("no header row".to_string()))?;

    let defaults = default_condition_schema();
    let mut schema = ConditionSchema {
        conditions: Vec::new(),
    };
    for (name, _) in &header.conditions {
        let category = categories
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, c, _)| *c)
            .or_else(|| defaults.get(name).map(|d| d.category))
            .ok_or_else(|| {
                DatasetError::Schema(format!(
                    "condition `{name}` has no category; add a `#condition` record"
                ))
            })?;
        schema.conditions.push(ConditionDef {
            name: name.clone(),
            category,
        });
    }
    if let Some((name, _, line)) = categories.iter().find(|(n, _, _)| !schema.contains(n)) {
        return Err(DatasetError::Schema(format!(
            "condition `{name}` declared at line {line} has no `{COND_PREFIX}{name}` column"
        )));
    }

    if objects.is_empty() {
        for m in &measurements {
            if !objects.iter().any(|o| o.id == m.object) {
                objects.push(ObjectRef::new(m.object.clone()));
            }
        }
    }
    if measurands.is_empty() {
        for m in &measurements {
            if !measurands.iter().any(|q| q.id == m.measurand) {
                measurands.push(Measurand::new(m.measurand.clone()));
            }
        }
    }

    let dataset = QraDataset {
        schema,
        objects,
        measurands,
        measurements,
    };
    check(dataset, Some(&lines))
}

fn fmt_real(v: f64) -> String {
    format!("{v}")
}

/// Serializes to the CSV layout. Values are written in shortest round-trip
/// form, so reloading yields bit-identical numbers.
pub fn to_csv_string(dataset: &QraDataset) -> Result<String> {
    if let Some(m) = dataset
        .measurements
        .iter()
        .find(|m| m.object.starts_with('#'))
    {
        return Err(DatasetError::Schema(format!(
            "object id `{}` cannot start with `#` in CSV",
            m.object
        )));
    }
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    let io = |e: csv::Error| DatasetError::Schema(e.to_string());

    for c in &dataset.schema.conditions {
        w.write_record(["#condition", &c.name, c.category.as_str()])
            .map_err(io)?;
    }
    for o in &dataset.objects {
        w.write_record([
            "#object",
            &o.id,
            &o.display_name,
            o.description.as_deref().unwrap_or(""),
        ])
        .map_err(io)?;
    }
    for q in &dataset.measurands {
        w.write_record([
            "#measurand",
            &q.id,
            &q.display_name,
            &q.unit,
            &fmt_real(q.scale_min),
            &q.scale_max.map(fmt_real).unwrap_or_default(),
            q.value_kind.as_str(),
        ])
        .map_err(io)?;
    }

    let with_timestamp = dataset.measurements.iter().any(|m| m.timestamp.is_some());
    let mut header: Vec<String> = ["object", "measurand", "value", "source"]
        .map(String::from)
        .to_vec();
    if with_timestamp {
        header.push("timestamp".to_string());
    }
    header.extend(dataset.schema.names().map(|n| format!("{COND_PREFIX}{n}")));
    w.write_record(&header).map_err(io)?;

    for m in &dataset.measurements {
        let mut row = vec![
            m.object.clone(),
            m.measurand.clone(),
            fmt_real(m.value),
            m.source.clone(),
        ];
        if with_timestamp {
            row.push(
                m.timestamp
                    .map(|t| t.format(DATE_FORMAT).to_string())
                    .unwrap_or_default(),
            );
        }
        row.extend(
            dataset
                .schema
                .names()
                .map(|n| m.condition(n).label().unwrap_or("").to_string()),
        );
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| DatasetError::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Checks referential integrity, scale bounds and condition coverage.
/// Groups of size one produce warnings; everything else is an error.
pub fn validate_dataset(dataset: &QraDataset) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();

    let mut names = HashSet::new();
    for c in &dataset.schema.conditions {
        if c.name.is_empty() {
            issues.push(ValidationIssue::error(
                Location::Schema,
                "empty condition name",
            ));
        } else if !names.insert(c.name.as_str()) {
            issues.push(ValidationIssue::error(
                Location::Schema,
                format!("duplicate condition `{}`", c.name),
            ));
        }
    }

    let mut ids = HashSet::new();
    for o in &dataset.objects {
        if o.id.is_empty() {
            issues.push(ValidationIssue::error(
                Location::Object(String::new()),
                "empty object id",
            ));
        } else if !ids.insert(o.id.as_str()) {
            issues.push(ValidationIssue::error(
                Location::Object(o.id.clone()),
                "duplicate object id",
            ));
        }
    }

    let mut ids = HashSet::new();
    for q in &dataset.measurands {
        let loc = || Location::Measurand(q.id.clone());
        if q.id.is_empty() {
            issues.push(ValidationIssue::error(loc(), "empty measurand id"));
        } else if !ids.insert(q.id.as_str()) {
            issues.push(ValidationIssue::error(loc(), "duplicate measurand id"));
        }
        if !q.scale_min.is_finite() {
            issues.push(ValidationIssue::error(loc(), "scale_min must be finite"));
        }
        if let Some(max) = q.scale_max {
            if max.partial_cmp(&q.scale_min) != Some(std::cmp::Ordering::Greater) {
                issues.push(ValidationIssue::error(
                    loc(),
                    format!(
                        "scale_max {max} must be greater than scale_min {}",
                        q.scale_min
                    ),
                ));
            }
        }
    }

    for (index, m) in dataset.measurements.iter().enumerate() {
        let loc = || Location::Measurement { index, line: None };
        if dataset.object(&m.object).is_none() {
            issues.push(ValidationIssue::error(
                loc(),
                format!("undeclared object `{}`", m.object),
            ));
        }
        match dataset.measurand(&m.measurand) {
            None => issues.push(ValidationIssue::error(
                loc(),
                format!("undeclared measurand `{}`", m.measurand),
            )),
            Some(q) => {
                if !m.value.is_finite() {
                    issues.push(ValidationIssue::error(loc(), "value is not finite"));
                } else if m.value < q.scale_min {
                    issues.push(ValidationIssue::error(
                        loc(),
                        format!(
                            "value {} is below scale_min {} of `{}`",
                            m.value, q.scale_min, q.id
                        ),
                    ));
                } else if q.scale_max.is_some_and(|max| m.value > max) {
                    issues.push(ValidationIssue::error(
                        loc(),
                        format!(
                            "value {} is above scale_max {} of `{}`",
                            m.value,
                            q.scale_max.unwrap(),
                            q.id
                        ),
                    ));
                }
            }
        }
        for name in dataset.schema.names() {
            match m.conditions.get(name) {
                None => issues.push(ValidationIssue::error(
                    loc(),
                    format!("missing condition `{name}`"),
                )),
                Some(ConditionValue::Known(l)) if l.is_empty() => issues.push(
                    ValidationIssue::error(loc(), format!("empty label for condition `{name}`")),
                ),
                Some(_) => {}
            }
        }
        for name in m.conditions.keys() {
            if !dataset.schema.contains(name) {
                issues.push(ValidationIssue::error(
                    loc(),
                    format!("condition `{name}` is not in the schema"),
                ));
            }
        }
    }

    for (object, measurand, n) in dataset.pairs() {
        if n == 1 {
            issues.push(ValidationIssue::warning(
                Location::Group { object, measurand },
                "only one measurement; a QRA test needs at least 2",
            ));
        }
    }
    issues
}
