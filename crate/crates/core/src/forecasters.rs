//! Fixed-memory baseline predictors fit by least squares: global mean,
//! scalar autoregressions, and vector autoregressions.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{lu_solve, Mat};
use crate::risk::Forecaster;
use crate::series::TimeSeries;
use crate::{Error, Result};

/// A fitted linear predictor: intercept plus d lag matrices.
///
/// Forecasts depend only on the most recent d observations. `lag_coeffs[0]`
/// multiplies the most recent observation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    k: usize,
    d: usize,
    has_intercept: bool,
    intercept: Vec<f64>,
    lag_coeffs: Vec<Mat>,
    /// Per-equation mean squared residual on the fitting sample.
    resid_var: Vec<f64>,
    n_obs: usize,
}

impl LinearFit {
    /// Hand-built scalar autoregression, useful as a data-generating
    /// process or a fixed reference predictor. `coeffs[0]` multiplies the
    /// most recent observation; `noise_var` is the innovation variance.
    pub fn ar(coeffs: Vec<f64>, intercept: f64, noise_var: f64) -> Result<Self> {
        if noise_var < 0.0 {
            return Err(Error::InvalidInput("noise variance must be nonnegative".to_string()));
        }
        let d = coeffs.len();
        Ok(LinearFit {
            k: 1,
            d,
            has_intercept: true,
            intercept: vec![intercept],
            lag_coeffs: coeffs.into_iter().map(Mat::scalar).collect(),
            resid_var: vec![noise_var],
            n_obs: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn lags(&self) -> usize {
        self.d
    }

    pub fn intercept(&self) -> &[f64] {
        &self.intercept
    }

    pub fn lag_coeff(&self, lag: usize) -> &Mat {
        &self.lag_coeffs[lag]
    }

    /// Scalar coefficients in lag order (most recent first).
    pub fn scalar_coeffs(&self) -> Result<Vec<f64>> {
        if self.k != 1 {
            return Err(Error::DimensionMismatch("scalar coefficients of a vector fit".to_string()));
        }
        Ok(self.lag_coeffs.iter().map(|m| m[(0, 0)]).collect())
    }

    pub fn resid_var(&self) -> &[f64] {
        &self.resid_var
    }

    /// Predicts the next observation from the most recent rows, oldest
    /// first; `recent.len()` must be at least d.
    pub fn predict_next(&self, recent: &[&[f64]]) -> Result<Vec<f64>> {
        if recent.len() < self.d {
            return Err(Error::InvalidInput("history shorter than the predictor memory".to_string()));
        }
        let mut out = self.intercept.clone();
        for (lag, coeff) in self.lag_coeffs.iter().enumerate() {
            let row = recent[recent.len() - 1 - lag];
            if row.len() != self.k {
                return Err(Error::DimensionMismatch("history dimension != fit dimension".to_string()));
            }
            let contrib = coeff.mul_vec(row);
            for (o, c) in out.iter_mut().zip(contrib.iter()) {
                *o += c;
            }
        }
        Ok(out)
    }
}

impl Forecaster for LinearFit {
    fn memory(&self) -> usize {
        self.d
    }

    fn dim(&self) -> usize {
        self.k
    }

    fn forecast_at(&self, series: &TimeSeries, t: usize) -> Result<Vec<f64>> {
        if t < self.d {
            return Err(Error::InvalidInput("history shorter than the predictor memory".to_string()));
        }
        let recent: Vec<&[f64]> = (t - self.d..t).map(|i| series.row(i)).collect();
        self.predict_next(&recent)
    }
}

/// Global-mean predictor: intercept = per-column sample mean, no lags.
pub fn fit_mean(series: &TimeSeries) -> LinearFit {
    let n = series.len();
    let k = series.dim();
    let mut mean = vec![0.0; k];
    for t in 0..n {
        for (m, v) in mean.iter_mut().zip(series.row(t).iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut var = vec![0.0; k];
    for t in 0..n {
        for (c, (v, m)) in series.row(t).iter().zip(mean.iter()).enumerate() {
            var[c] += (v - m) * (v - m);
        }
    }
    for v in var.iter_mut() {
        *v /= n as f64;
    }
    LinearFit {
        k,
        d: 0,
        has_intercept: true,
        intercept: mean,
        lag_coeffs: Vec::new(),
        resid_var: var,
        n_obs: n,
    }
}

/// Ordinary least squares of each observation on the d previous ones
/// (scalar series).
pub fn fit_ar(series: &TimeSeries, d: usize, intercept: bool) -> Result<LinearFit> {
    if series.dim() != 1 {
        return Err(Error::DimensionMismatch("fit_ar expects a scalar series; use fit_var".to_string()));
    }
    fit_var(series, d, intercept)
}

/// Per-equation least squares for a vector autoregression with d lags.
///
/// The design at target t is (1?, y_{t-1}, ..., y_{t-d}) flattened; one
/// normal-equation solve per output coordinate. Rank deficiency in the
/// design (e.g. a constant series regressed with an intercept) is an error.
pub fn fit_var(series: &TimeSeries, d: usize, intercept: bool) -> Result<LinearFit> {
    let n = series.len();
    let k = series.dim();
    if d == 0 {
        return Err(Error::InvalidInput("use fit_mean for a zero-lag predictor".to_string()));
    }
    if n < d + 2 {
        return Err(Error::InvalidInput("fitting needs n > d + 1".to_string()));
    }
    let rows = n - d;
    let int_cols = usize::from(intercept);
    let cols = int_cols + k * d;

    // Normal equations X'X b = X'y, shared across equations.
    let mut xtx = Mat::zeros(cols, cols);
    let mut xty = vec![vec![0.0; cols]; k];
    let mut x_row = vec![0.0; cols];
    for t in d..n {
        if intercept {
            x_row[0] = 1.0;
        }
        for lag in 0..d {
            let y_lag = series.row(t - 1 - lag);
            x_row[int_cols + lag * k..int_cols + (lag + 1) * k].copy_from_slice(y_lag);
        }
        for i in 0..cols {
            for j in 0..cols {
                xtx[(i, j)] += x_row[i] * x_row[j];
            }
        }
        let y = series.row(t);
        for eq in 0..k {
            for (acc, x) in xty[eq].iter_mut().zip(x_row.iter()) {
                *acc += y[eq] * x;
            }
        }
    }

    let mut beta = Vec::with_capacity(k);
    for eq in 0..k {
        let b = lu_solve(&xtx, &xty[eq]).map_err(|_| Error::Singular("rank deficient regression design".to_string()))?;
        beta.push(b);
    }

    let mut intercept_vec = vec![0.0; k];
    let mut lag_coeffs = vec![Mat::zeros(k, k); d];
    for eq in 0..k {
        if intercept {
            intercept_vec[eq] = beta[eq][0];
        }
        for lag in 0..d {
            for j in 0..k {
                lag_coeffs[lag][(eq, j)] = beta[eq][int_cols + lag * k + j];
            }
        }
    }

    let fit = LinearFit {
        k,
        d,
        has_intercept: intercept,
        intercept: intercept_vec,
        lag_coeffs,
        resid_var: vec![0.0; k],
        n_obs: rows,
    };

    // In-sample residual variances (divisor = number of fitted rows).
    let mut resid_var = vec![0.0; k];
    for t in d..n {
        let recent: Vec<&[f64]> = (t - d..t).map(|i| series.row(i)).collect();
        let yhat = fit.predict_next(&recent)?;
        for eq in 0..k {
            let r = series.row(t)[eq] - yhat[eq];
            resid_var[eq] += r * r;
        }
    }
    for v in resid_var.iter_mut() {
        *v /= rows as f64;
    }
    Ok(LinearFit { resid_var, ..fit })
}
