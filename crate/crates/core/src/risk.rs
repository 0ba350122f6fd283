//! One-step forecasters and the in-sample training error.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::loss::{residual, LossSpec};
use crate::series::TimeSeries;
use crate::{Error, Result};

/// A causal one-step-ahead forecaster.
///
/// `forecast_at(series, t)` predicts the observation at time `t` from rows
/// `0..t` only; fitted parameters may come from anywhere (including the full
/// sample), but evaluation is always causal per time step.
pub trait Forecaster {
    /// Fixed memory length d; growing-memory predictors report the
    /// truncation depth used for bounding.
    fn memory(&self) -> usize;

    /// Dimension of the forecasts.
    fn dim(&self) -> usize;

    /// One-step forecast of the observation at time `t` (0-based) from the
    /// first `t` rows.
    fn forecast_at(&self, series: &TimeSeries, t: usize) -> Result<Vec<f64>>;

    /// One-step forecasts for every `t` in `from..n`. Override when a single
    /// pass is cheaper than repeated prefix evaluation.
    fn forecasts(&self, series: &TimeSeries, from: usize) -> Result<Vec<Vec<f64>>> {
        (from..series.len()).map(|t| self.forecast_at(series, t)).collect()
    }
}

/// Divisor convention for the training error.
///
/// The sum always runs over the n - d forecastable steps; the printed
/// definition divides by n - d - 1, and that form is the default because it
/// is what the reference computations reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainingDivisor {
    /// Divide the n - d summands by n - d - 1 (the printed definition).
    #[default]
    NMinusDMinusOne,
    /// Divide by the actual number of summands n - d.
    NMinusD,
}

/// Average one-step in-sample loss of a causal forecaster.
///
/// Computes `div^-1 * sum_{t=d}^{n-1} l(y_t - f(y_0..y_{t-1}))` in 0-based
/// indexing, with the divisor given by `divisor`.
pub fn training_error_with(
    series: &TimeSeries,
    forecaster: &dyn Forecaster,
    d: usize,
    loss: &LossSpec,
    divisor: TrainingDivisor,
) -> Result<f64> {
    let n = series.len();
    if n < d + 2 {
        return Err(Error::InvalidInput("training error needs n - d - 1 >= 1".to_string()));
    }
    if forecaster.dim() != series.dim() {
        return Err(Error::DimensionMismatch("forecaster dimension != series dimension".to_string()));
    }
    let forecasts = forecaster.forecasts(series, d)?;
    let mut sum = 0.0;
    for (offset, yhat) in forecasts.iter().enumerate() {
        let t = d + offset;
        let r = residual(series.row(t), yhat);
        sum += loss.eval_checked(&r, series.dim())?;
    }
    let denom = match divisor {
        TrainingDivisor::NMinusDMinusOne => (n - d - 1) as f64,
        TrainingDivisor::NMinusD => (n - d) as f64,
    };
    Ok(sum / denom)
}

/// Training error with the default printed divisor n - d - 1.
pub fn training_error(
    series: &TimeSeries,
    forecaster: &dyn Forecaster,
    d: usize,
    loss: &LossSpec,
) -> Result<f64> {
    training_error_with(series, forecaster, d, loss, TrainingDivisor::NMinusDMinusOne)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    /// Predicts the previous observation (random-walk forecast).
    struct LastValue;

    impl Forecaster for LastValue {
        fn memory(&self) -> usize {
            1
        }
        fn dim(&self) -> usize {
            1
        }
        fn forecast_at(&self, series: &TimeSeries, t: usize) -> Result<Vec<f64>> {
            if t == 0 {
                return Err(Error::InvalidInput("no history".to_string()));
            }
            Ok(series.row(t - 1).to_vec())
        }
    }

    struct Constant(f64);

    impl Forecaster for Constant {
        fn memory(&self) -> usize {
            0
        }
        fn dim(&self) -> usize {
            1
        }
        fn forecast_at(&self, _series: &TimeSeries, _t: usize) -> Result<Vec<f64>> {
            Ok(vec![self.0])
        }
    }

    #[test]
    fn constant_predictor_on_constant_series_is_zero() {
        let s = TimeSeries::scalar("c", vec![2.5; 6]).unwrap();
        let err = training_error(&s, &Constant(2.5), 0, &LossSpec::squared()).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn hand_evaluated_random_walk_example() {
        // (1,2,3,4) with yhat_{t+1} = y_t, d = 1, squared loss:
        // residuals 1,1,1 over divisor n-d-1 = 2.
        let s = TimeSeries::scalar("x", vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let err = training_error(&s, &LastValue, 1, &LossSpec::squared()).unwrap();
        assert_abs_diff_eq!(err, 1.5, epsilon = 1e-15);
        let per_term =
            training_error_with(&s, &LastValue, 1, &LossSpec::squared(), TrainingDivisor::NMinusD)
                .unwrap();
        assert_abs_diff_eq!(per_term, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_too_short_sample() {
        let s = TimeSeries::scalar("x", vec![1.0, 2.0]).unwrap();
        assert!(training_error(&s, &LastValue, 1, &LossSpec::squared()).is_err());
    }

    #[test]
    fn index_relabeling_is_irrelevant() {
        let raw = vec![0.3, -1.2, 0.8, 0.1, 2.0];
        let a = TimeSeries::scalar("a", raw.clone()).unwrap();
        let b = TimeSeries::scalar("b", raw)
            .unwrap()
            .with_index(vec![100, 205, 330, 470, 9000])
            .unwrap();
        let ea = training_error(&a, &LastValue, 1, &LossSpec::squared()).unwrap();
        let eb = training_error(&b, &LastValue, 1, &LossSpec::squared()).unwrap();
        assert_eq!(ea, eb);
    }

    #[test]
    fn scaling_behavior_of_losses() {
        let raw = vec![0.3, -1.2, 0.8, 0.1, 2.0];
        let c = 3.7;
        let scaled: Vec<f64> = raw.iter().map(|v| c * v).collect();
        let s = TimeSeries::scalar("s", raw).unwrap();
        let sc = TimeSeries::scalar("sc", scaled).unwrap();
        // LastValue is linear, so its forecasts scale with the series.
        let sq = training_error(&s, &LastValue, 1, &LossSpec::squared()).unwrap();
        let sq_c = training_error(&sc, &LastValue, 1, &LossSpec::squared()).unwrap();
        assert_abs_diff_eq!(sq_c, c * c * sq, epsilon = 1e-12);
        let ab = training_error(&s, &LastValue, 1, &LossSpec::absolute()).unwrap();
        let ab_c = training_error(&sc, &LastValue, 1, &LossSpec::absolute()).unwrap();
        assert_abs_diff_eq!(ab_c, c.abs() * ab, epsilon = 1e-12);
    }
}
