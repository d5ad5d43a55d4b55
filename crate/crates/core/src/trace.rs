//! Per-iteration records of the iterative solvers, with CSV export.

use std::io::Write;

use serde::Serialize;

use crate::error::{GaugeError, Result};

/// One row of a descent-method trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    /// Accepted step size (zero on the initial row).
    pub step: f64,
    /// Norm of the gradient mapping `‖y_{k+1} − y_k‖ / step`, or of the
    /// gradient on the initial row.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.objective)
    }

    /// True when the objective never increases by more than `slack`.
    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective + slack)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(&self.records, out)
    }
}

/// Serializes rows with a header line taken from the field names.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| GaugeError::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush()
        .map_err(|e| GaugeError::InvalidInput(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let mut trace = IterationTrace::default();
        trace.push(IterationRecord { iter: 0, objective: 2.0, step: 0.0, grad_norm: 1.5 });
        trace.push(IterationRecord { iter: 1, objective: 1.0, step: 0.5, grad_norm: 0.25 });
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iter,objective,step,grad_norm\n0,2.0,0.0,1.5\n1,1.0,0.5,0.25\n");
        assert!(trace.is_nonincreasing(0.0));
    }
}
