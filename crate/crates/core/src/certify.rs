use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A numerical certificate that did not hold, with the offending location.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{check} failed (vertex {vertex:?}, s {s:?}, t {time:?}): deviation {deviation:e} exceeds {tolerance:e}")]
pub struct CertificateFailure {
    pub check: String,
    pub vertex: Option<usize>,
    pub s: Option<i64>,
    pub time: Option<f64>,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CertificateFailure {
    pub fn new(check: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            vertex: None,
            s: None,
            time: None,
            deviation,
            tolerance,
        }
    }

    pub fn at_vertex(mut self, vertex: usize) -> Self {
        self.vertex = Some(vertex);
        self
    }

    pub fn at_distance(mut self, s: i64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }
}
