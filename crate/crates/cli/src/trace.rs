//! Per-seed trace files.
//!
//! CSV with the header `epoch,iter,loss,grad_norm_sq,queries`, one row per
//! logged iteration: the 1-based epoch, the 1-based global iteration, the
//! loss after that iteration's update, `‖∇f‖²` at the same point (empty when
//! the objective has no gradient), and the cumulative query count (gradient
//! calls for first-order algorithms). Floats use the shortest decimal form
//! that parses back to the same `f64`.

use std::path::Path;

use zokit_core::TraceRecord;

use crate::config::Cadence;
use crate::error::{CliError, Result};

pub const TRACE_HEADER: [&str; 5] = ["epoch", "iter", "loss", "grad_norm_sq", "queries"];

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub epoch: usize,
    pub iter: usize,
    pub loss: f64,
    pub grad_norm_sq: Option<f64>,
    pub queries: u64,
}

impl From<&TraceRecord> for TraceRow {
    fn from(r: &TraceRecord) -> Self {
        TraceRow { epoch: r.epoch, iter: r.iteration, loss: r.loss, grad_norm_sq: r.grad_norm_sq, queries: r.queries }
    }
}

/// Rows kept at the given cadence. Epoch cadence keeps the last record of
/// every epoch, so the final record is always present.
pub fn select_rows(records: &[TraceRecord], cadence: Cadence) -> Vec<TraceRow> {
    records
        .iter()
        .enumerate()
        .filter(|(i, r)| match cadence {
            Cadence::Iteration => true,
            Cadence::Epoch => records.get(i + 1).is_none_or(|next| next.epoch != r.epoch),
        })
        .map(|(_, r)| TraceRow::from(r))
        .collect()
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let io = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(TRACE_HEADER).map_err(io)?;
    for r in rows {
        let grad = r.grad_norm_sq.map_or_else(String::new, |g| g.to_string());
        w.write_record([r.epoch.to_string(), r.iter.to_string(), r.loss.to_string(), grad, r.queries.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let bad = |message: String| CliError::Trace { path: path.to_path_buf(), message };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(bad(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("");
        let parse_err = |i: usize| bad(format!("line {line}: cannot parse {} `{}`", TRACE_HEADER[i], field(i)));
        rows.push(TraceRow {
            epoch: field(0).parse().map_err(|_| parse_err(0))?,
            iter: field(1).parse().map_err(|_| parse_err(1))?,
            loss: field(2).parse().map_err(|_| parse_err(2))?,
            grad_norm_sq: match field(3) {
                "" => None,
                g => Some(g.parse().map_err(|_| parse_err(3))?),
            },
            queries: field(4).parse().map_err(|_| parse_err(4))?,
        });
    }
    Ok(rows)
}
