//! CSV datasets for the least-squares objective: one row per sample, the
//! 0/1 label first, then the features. A header row is optional.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

use super::nlls::NllsProblem;

pub fn parse_dataset<R: Read>(reader: R) -> Result<NllsProblem> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Dataset(e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
        if idx == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Dataset(format!("line {line}: expected a label and at least one feature")));
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(Error::Dataset(format!("line {line}: {} fields, expected {w}", rec.len())));
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(rec.len());
        for field in rec.iter() {
            let v: f64 =
                field.parse().map_err(|_| Error::Dataset(format!("line {line}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Dataset(format!("line {line}: non-finite value")));
            }
            values.push(v);
        }
        if values[0] != 0.0 && values[0] != 1.0 {
            return Err(Error::Dataset(format!("line {line}: label {} is not 0 or 1", values[0])));
        }
        labels.push(values[0]);
        features.push(values.split_off(1));
    }
    if labels.is_empty() {
        return Err(Error::Dataset("dataset has no samples".into()));
    }
    NllsProblem::new(features, labels)
}

pub fn read_dataset(path: &Path) -> Result<NllsProblem> {
    let file = std::fs::File::open(path)?;
    parse_dataset(file).map_err(|e| match e {
        Error::Dataset(msg) => Error::Dataset(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_dataset(path: &Path, problem: &NllsProblem) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Dataset(e.to_string()))?;
    let mut header = vec!["label".to_string()];
    header.extend((1..=problem.d()).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(|e| Error::Dataset(e.to_string()))?;
    for i in 0..problem.n() {
        let mut row = vec![format!("{}", problem.label(i))];
        row.extend(problem.feature(i).iter().map(|v| format!("{v}")));
        w.write_record(&row).map_err(|e| Error::Dataset(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
