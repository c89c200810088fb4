//! Per-iteration run logs.

use crate::linalg;
use crate::problems::Problem;

/// One row of a run log. Columns that do not apply to a method hold NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub n: usize,
    pub loss_gap: f64,
    pub dist_to_min: f64,
    pub grad_norm: f64,
    pub lr: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Run log with one record per iteration, including the initial point.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new() -> Self {
        Trace { records: Vec::new() }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    /// Evaluate `w` against the problem's known optimum and append a record.
    pub fn observe(&mut self, p: &Problem, w: &[f64], lr: f64, beta: f64, gamma: f64) {
        let n = self.records.len();
        let (value, gradient) = p.eval(w).expect("trace dimensions fixed at start");
        let info = p.info();
        let minimizer = p.minimizer();
        self.push(TraceRecord {
            n,
            loss_gap: value - info.min_value,
            dist_to_min: linalg::dist(w, &minimizer),
            grad_norm: linalg::norm(&gradient),
            lr,
            beta,
            gamma,
        });
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of iterations performed (records minus the initial point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn dist_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.dist_to_min).collect()
    }

    pub fn loss_gap_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss_gap).collect()
    }

    pub fn gamma_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma).collect()
    }
}
