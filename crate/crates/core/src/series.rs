//! The observed sample: an ordered n x p array of observations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// An ordered sample of n observations in R^p with an optional time index.
///
/// Values are stored row-major (time runs over rows). All entries must be
/// finite; the index, when present, must be strictly increasing and match
/// the number of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    n: usize,
    p: usize,
    index: Option<Vec<i64>>,
    name: String,
}

impl TimeSeries {
    /// Builds a series from row-major values.
    pub fn new(name: &str, n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput("series needs n >= 1 and p >= 1".to_string()));
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch("values length != n * p".to_string()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("series contains non-finite entries".to_string()));
        }
        Ok(TimeSeries {
            values,
            n,
            p,
            index: None,
            name: name.to_string(),
        })
    }

    /// Scalar (p = 1) series.
    pub fn scalar(name: &str, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        TimeSeries::new(name, n, 1, values)
    }

    /// Attaches a strictly increasing time index (e.g. epoch days).
    pub fn with_index(mut self, index: Vec<i64>) -> Result<Self> {
        if index.len() != self.n {
            return Err(Error::DimensionMismatch("index length != n".to_string()));
        }
        if index.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("time index must be strictly increasing".to_string()));
        }
        self.index = Some(index);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> Option<&[i64]> {
        self.index.as_deref()
    }

    /// Observation at time t (0-based), a slice of length p.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.p..(t + 1) * self.p]
    }

    /// Column c as an owned vector.
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n).map(|t| self.values[t * self.p + c]).collect()
    }

    /// Scalar view; errors when p > 1.
    pub fn as_scalar(&self) -> Result<Vec<f64>> {
        if self.p != 1 {
            return Err(Error::DimensionMismatch("expected a scalar series".to_string()));
        }
        Ok(self.values.clone())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
