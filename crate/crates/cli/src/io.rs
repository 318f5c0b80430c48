//! Panel CSV conventions and output writers.
//!
//! Panels are written rows = spatial points, columns = time samples, '.'
//! decimal, ',' delimiter, LF line endings, UTF-8. An optional first header
//! row (timestamps) and an optional first label column are auto-detected by
//! non-numeric content on read.

use anyhow::{anyhow, Context};
use freespec::DataMatrix;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Marker for inputs that exist but cannot be parsed; maps to exit code 2.
#[derive(Debug)]
pub struct UnreadableInput(pub anyhow::Error);

impl std::fmt::Display for UnreadableInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unreadable input: {}", self.0)
    }
}

impl std::error::Error for UnreadableInput {}

pub fn read_panel(path: &Path) -> anyhow::Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record
            .map_err(|e| UnreadableInput(anyhow!("cannot parse {}: {e}", path.display())))?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(UnreadableInput(anyhow!("{} is empty", path.display())).into());
    }

    let is_num = |s: &str| s.trim().parse::<f64>().is_ok();
    // Header row: any non-numeric cell past the first column.
    let header = rows[0].iter().skip(1).any(|cell| !is_num(cell));
    let data_rows = if header { &rows[1..] } else { &rows[..] };
    if data_rows.is_empty() {
        return Err(UnreadableInput(anyhow!("{} has no data rows", path.display())).into());
    }
    // Label column: any non-numeric first cell among the data rows.
    let labeled = data_rows.iter().any(|r| !r.is_empty() && !is_num(&r[0]));

    let mut labels = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for (i, row) in data_rows.iter().enumerate() {
        let start = usize::from(labeled);
        if labeled {
            labels.push(row.first().cloned().unwrap_or_default());
        }
        let parsed: Result<Vec<f64>, _> = row[start..]
            .iter()
            .map(|cell| cell.trim().parse::<f64>())
            .collect();
        values.push(parsed.map_err(|e| {
            UnreadableInput(anyhow!(
                "{}: row {} has a non-numeric value: {e}",
                path.display(),
                i + 1
            ))
        })?);
    }

    let panel = DataMatrix::from_rows(&values)?;
    Ok(if labeled {
        panel.with_row_labels(labels)?
    } else {
        panel
    })
}

pub fn write_panel(path: &Path, panel: &DataMatrix) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    let values = panel.values();
    for i in 0..panel.n() {
        let mut fields: Vec<String> = Vec::with_capacity(panel.t() + 1);
        if let Some(labels) = panel.row_labels() {
            fields.push(labels[i].clone());
        }
        for j in 0..panel.t() {
            fields.push(format_float(values[(i, j)]));
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Shortest round-trippable decimal form, stable across runs.
pub fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// CSV with a header row; every row must have `columns.len()` fields.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let fields: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
