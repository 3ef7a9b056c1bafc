// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use super::config::{Mode, OutputFormat};
use super::run::SweepRow;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 14] = [
    "sweep_value",
    "E_aa_raw",
    "E_ab_raw",
    "E_ba_raw",
    "E_bb_raw",
    "E_aa_cal",
    "E_ab_cal",
    "E_ba_cal",
    "E_bb_cal",
    "C",
    "sem",
    "sigmas",
    "n_shots",
    "mode",
];

/// Twelve significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

/// The value `x` takes after a trip through the report format.
pub fn round_trip_value(x: f64) -> f64 {
    parse_number(&format_number(x)).expect("formatted numbers parse")
}

impl SweepRow {
    /// This row with every real rounded to report precision.
    pub fn rounded(&self) -> SweepRow {
        SweepRow {
            sweep_value: round_trip_value(self.sweep_value),
            raw: self.raw.map(round_trip_value),
            cal: self.cal.map(round_trip_value),
            c: round_trip_value(self.c),
            sem: round_trip_value(self.sem),
            sigmas: self.sigmas.map(round_trip_value),
            n_shots: self.n_shots,
            mode: self.mode,
        }
    }

    fn fields(&self) -> [String; 14] {
        let n = format_number;
        [
            n(self.sweep_value),
            n(self.raw[0]),
            n(self.raw[1]),
            n(self.raw[2]),
            n(self.raw[3]),
            n(self.cal[0]),
            n(self.cal[1]),
            n(self.cal[2]),
            n(self.cal[3]),
            n(self.c),
            n(self.sem),
            self.sigmas.map(n).unwrap_or_default(),
            self.n_shots.to_string(),
            self.mode.name().to_string(),
        ]
    }

    fn from_fields(fields: &[&str]) -> Result<SweepRow> {
        if fields.len() != COLUMNS.len() {
            return Err(Error::Parse(format!(
                "expected {} fields, got {}",
                COLUMNS.len(),
                fields.len()
            )));
        }
        let f = |i: usize| parse_number(fields[i]);
        Ok(SweepRow {
            sweep_value: f(0)?,
            raw: [f(1)?, f(2)?, f(3)?, f(4)?],
            cal: [f(5)?, f(6)?, f(7)?, f(8)?],
            c: f(9)?,
            sem: f(10)?,
            sigmas: if fields[11].is_empty() {
                None
            } else {
                Some(f(11)?)
            },
            n_shots: fields[12]
                .parse()
                .map_err(|_| Error::Parse(format!("bad shot count {:?}", fields[12])))?,
            mode: fields[13]
                .parse::<Mode>()
                .map_err(|_| Error::Parse(format!("bad mode {:?}", fields[13])))?,
        })
    }
}

fn check_rows(rows: &[SweepRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no rows to report".into()));
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn to_csv(rows: &[SweepRow]) -> Result<String> {
    check_rows(rows)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_error)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(COLUMNS) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            SweepRow::from_fields(&rec.iter().collect::<Vec<_>>())
        })
        .collect()
}

fn json_number(x: f64) -> Value {
    let x = round_trip_value(x);
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(format_number(x)),
    }
}

fn json_real(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("{key}: bad number"))),
        Value::String(s) => parse_number(s),
        _ => Err(Error::Parse(format!("{key}: expected a number"))),
    }
}

/// `{"columns": [...], "rows": [{column: value, ...}, ...]}` with the CSV
/// column names as keys; `sigmas` is `null` in exact rows and non-finite
/// reals are strings.
pub fn to_json(rows: &[SweepRow]) -> Result<String> {
    check_rows(rows)?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let reals = [
                r.sweep_value,
                r.raw[0],
                r.raw[1],
                r.raw[2],
                r.raw[3],
                r.cal[0],
                r.cal[1],
                r.cal[2],
                r.cal[3],
                r.c,
                r.sem,
            ];
            let mut obj = Map::new();
            for (k, x) in COLUMNS.iter().zip(reals) {
                obj.insert((*k).into(), json_number(x));
            }
            obj.insert(
                "sigmas".into(),
                r.sigmas.map(json_number).unwrap_or(Value::Null),
            );
            obj.insert("n_shots".into(), Value::from(r.n_shots));
            obj.insert("mode".into(), Value::from(r.mode.name()));
            Value::Object(obj)
        })
        .collect();
    let doc = serde_json::json!({ "columns": COLUMNS, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn parse_json(text: &str) -> Result<Vec<SweepRow>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let columns = doc
        .get("columns")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing columns".into()))?;
    if columns
        .iter()
        .map(Value::as_str)
        .ne(COLUMNS.iter().map(|c| Some(*c)))
    {
        return Err(Error::Parse("unexpected columns".into()));
    }
    let rows = doc
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing rows".into()))?;
    rows.iter()
        .map(|r| {
            let obj = r
                .as_object()
                .ok_or_else(|| Error::Parse("row is not an object".into()))?;
            if obj.len() != COLUMNS.len() || COLUMNS.iter().any(|c| !obj.contains_key(*c)) {
                return Err(Error::Parse("row keys do not match columns".into()));
            }
            let g = |k: &str| json_real(&obj[k], k);
            Ok(SweepRow {
                sweep_value: g("sweep_value")?,
                raw: [
                    g("E_aa_raw")?,
                    g("E_ab_raw")?,
                    g("E_ba_raw")?,
                    g("E_bb_raw")?,
                ],
                cal: [
                    g("E_aa_cal")?,
                    g("E_ab_cal")?,
                    g("E_ba_cal")?,
                    g("E_bb_cal")?,
                ],
                c: g("C")?,
                sem: g("sem")?,
                sigmas: match &obj["sigmas"] {
                    Value::Null => None,
                    v => Some(json_real(v, "sigmas")?),
                },
                n_shots: obj["n_shots"]
                    .as_u64()
                    .ok_or_else(|| Error::Parse("n_shots: expected an integer".into()))?,
                mode: obj["mode"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("mode: expected a string".into()))?
                    .parse()
                    .map_err(|_| Error::Parse("bad mode".into()))?,
            })
        })
        .collect()
}

pub fn render(rows: &[SweepRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    }
}

pub fn parse_report(text: &str, format: OutputFormat) -> Result<Vec<SweepRow>> {
    match format {
        OutputFormat::Csv => parse_csv(text),
        OutputFormat::Json => parse_json(text),
    }
}

/// Writes the report through a temporary file in the target directory and
/// renames it into place.
pub fn emit_report(rows: &[SweepRow], format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(rows, format)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
