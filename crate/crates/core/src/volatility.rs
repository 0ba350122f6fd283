//! Stochastic volatility: log-squared-return linearization, state-space
//! mapping, and quasi maximum likelihood through the Kalman filter.
//!
//! The latent log-variance follows an AR(1); taking logs of squared
//! returns yields a linear observation equation with level kappa,
//! coefficient 1/2 on the state, and noise variance pi^2/2. The noise is
//! not Gaussian, so the filter delivers the best linear estimate and the
//! minimized likelihood is a quasi likelihood.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::econ::{penalized_mle, ParamSpec, PenalizedFit, PriorSpec};
use crate::optim::OptimConfig;
use crate::series::TimeSeries;
use crate::statespace::StateSpaceModel;
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use core::f64::consts::PI;

/// Box constraints on the fitted parameters.
pub const PHI_MAX: f64 = 1.0 - 1e-6;
pub const SIGMA_W2_MIN: f64 = 1e-12;
const KAPPA_BOUND: f64 = 1e3;
const SIGMA_W2_MAX: f64 = 1e3;

/// Volatility model parameters: level kappa, persistence phi, and state
/// innovation variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvParams {
    pub kappa: f64,
    pub phi: f64,
    pub sigma_w2: f64,
}

impl SvParams {
    pub fn new(kappa: f64, phi: f64, sigma_w2: f64) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(Error::InvalidInput("|phi| must be < 1".to_string()));
        }
        if !(sigma_w2 > 0.0) {
            return Err(Error::InvalidInput("sigma_w2 must be positive".to_string()));
        }
        Ok(SvParams { kappa, phi, sigma_w2 })
    }
}

/// Drops exact zeros and maps the remaining returns to log y^2.
///
/// Returns the transformed series and the number of dropped observations.
pub fn linearize_returns(returns: &TimeSeries) -> Result<(TimeSeries, usize)> {
    let values = returns.as_scalar()?;
    let kept: Vec<f64> = values
        .iter()
        .filter(|&&y| y != 0.0)
        .map(|&y| (y * y).ln())
        .collect();
    let dropped = values.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::InvalidInput("every return is zero".to_string()));
    }
    let out = TimeSeries::scalar(returns.name(), kept)?;
    Ok((out, dropped))
}

/// Maps parameters to the filtering model: scalar state rho_t with
/// T = phi, Q = sigma_w2, observation Z = 1/2, H = pi^2/2, and the
/// stationary initial state (a1 = 0, P1 = sigma_w2 / (1 - phi^2)).
///
/// kappa is an observation intercept handled outside the matrices
/// (subtracted from the data before filtering).
pub fn sv_to_statespace(p: &SvParams) -> Result<StateSpaceModel> {
    if !(p.phi.abs() < 1.0) {
        return Err(Error::InvalidInput("|phi| must be < 1".to_string()));
    }
    let p1 = p.sigma_w2 / (1.0 - p.phi * p.phi);
    StateSpaceModel::scalar(0.5, p.phi, PI * PI / 2.0, p.sigma_w2, 0.0, p1)
}

/// The volatility family as a generic penalized-likelihood builder:
/// theta = (kappa, phi, sigma_w2), observation intercept kappa.
pub fn sv_family(theta: &[f64]) -> Result<(StateSpaceModel, Vec<f64>)> {
    let params = SvParams::new(theta[0], theta[1], theta[2])?;
    Ok((sv_to_statespace(&params)?, vec![params.kappa]))
}

fn sv_boxes() -> PriorSpec {
    PriorSpec::new(vec![
        ParamSpec::box_only("kappa", -KAPPA_BOUND, KAPPA_BOUND),
        ParamSpec::box_only("phi", -PHI_MAX, PHI_MAX),
        ParamSpec::box_only("sigma_w2", SIGMA_W2_MIN, SIGMA_W2_MAX),
    ])
    .expect("static boxes are valid")
}

/// A fitted volatility model.
#[derive(Debug, Clone)]
pub struct SvFit {
    pub params: SvParams,
    pub neg_loglik: f64,
    pub converged: bool,
    pub iters: usize,
}

impl SvFit {
    /// The filtering model for the fitted parameters.
    pub fn model(&self) -> Result<StateSpaceModel> {
        sv_to_statespace(&self.params)
    }

    /// The observation intercept to pair with the model.
    pub fn intercept(&self) -> Vec<f64> {
        vec![self.params.kappa]
    }
}

/// Quasi-MLE over (kappa, phi, sigma_w2) by box-constrained simplex
/// search on the filter likelihood of the linearized series.
///
/// Deterministic given the initial point and config; non-convergence is
/// reported in the flag with the best point found so far.
pub fn fit_sv(transformed: &TimeSeries, init: &SvParams, cfg: &OptimConfig) -> Result<SvFit> {
    if transformed.dim() != 1 {
        return Err(Error::DimensionMismatch("volatility fitting expects a scalar series".to_string()));
    }
    let fit: PenalizedFit = penalized_mle(
        &sv_family,
        transformed,
        &sv_boxes(),
        &[init.kappa, init.phi, init.sigma_w2],
        cfg,
    )?;
    let params = SvParams::new(fit.params[0], fit.params[1], fit.params[2])?;
    Ok(SvFit {
        params,
        neg_loglik: fit.neg_loglik,
        converged: fit.converged,
        iters: fit.iters,
    })
}

/// Simulates the nonlinear volatility process y_t = sigma z_t exp(rho_t/2)
/// where kappa = log sigma^2 + E[log z^2]; useful for self-recovery tests
/// and synthetic experiments.
pub fn simulate_sv(params: &SvParams, n: usize, seed: u64) -> Result<TimeSeries> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    // E[log z^2] for standard normal z.
    const E_LOG_CHI2: f64 = -1.2703628454614782;
    let sigma = ((params.kappa - E_LOG_CHI2) / 2.0).exp();
    let p1 = params.sigma_w2 / (1.0 - params.phi * params.phi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho: f64 = p1.sqrt() * rng.sample::<f64, _>(StandardNormal);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        values.push(sigma * z * (rho / 2.0).exp());
        let w: f64 = rng.sample(StandardNormal);
        rho = params.phi * rho + params.sigma_w2.sqrt() * w;
    }
    TimeSeries::scalar("sv-sim", values)
}

/// Overall mean of a scalar series, the natural kappa initializer.
pub fn series_mean(series: &TimeSeries) -> Result<f64> {
    let v = series.as_scalar()?;
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::kalman_filter;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linearization_drops_zeros() {
        let r = TimeSeries::scalar("r", vec![1.0, core::f64::consts::E, 0.0]).unwrap();
        let (x, dropped) = linearize_returns(&r).unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(x.len(), 2);
        assert_abs_diff_eq!(x.row(0)[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.row(1)[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn linearization_preserves_length_without_zeros() {
        let r = TimeSeries::scalar("r", vec![0.5, -0.25, 1.5]).unwrap();
        let (x, dropped) = linearize_returns(&r).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(x.len(), 3);
        assert!(x.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn all_zero_series_is_an_error() {
        let r = TimeSeries::scalar("r", vec![0.0, 0.0]).unwrap();
        assert!(linearize_returns(&r).is_err());
    }

    #[test]
    fn statespace_mapping_values() {
        let p = SvParams::new(-9.0, 0.0, 0.25).unwrap();
        let m = sv_to_statespace(&p).unwrap();
        // phi = 0: stationary variance equals sigma_w2
        assert_abs_diff_eq!(m.p1()[(0, 0)], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.h()[(0, 0)], PI * PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.z()[(0, 0)], 0.5, epsilon = 1e-15);
        assert!(SvParams::new(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn filtered_likelihood_finite_on_any_series() {
        let p = SvParams::new(-5.0, 0.9, 0.1).unwrap();
        let m = sv_to_statespace(&p).unwrap();
        let x = TimeSeries::scalar("x", vec![-4.0, -6.0, -5.5, -3.0, -7.0]).unwrap();
        let out = kalman_filter(&m, &x).unwrap();
        assert!(out.neg_loglik.is_finite());
    }

    #[test]
    fn boundary_init_is_projected_and_search_proceeds() {
        let (x, _) = linearize_returns(
            &simulate_sv(&SvParams::new(-9.0, 0.95, 0.05).unwrap(), 400, 8).unwrap(),
        )
        .unwrap();
        let init = SvParams {
            kappa: series_mean(&x).unwrap(),
            phi: 0.9,
            sigma_w2: 0.0, // at (below) the boundary
        };
        let fit = fit_sv(&x, &init, &OptimConfig::default()).unwrap();
        assert!(fit.params.sigma_w2 >= SIGMA_W2_MIN);
        assert!(fit.params.phi.abs() <= PHI_MAX);
        assert!(fit.neg_loglik.is_finite());
    }

    #[test]
    fn objective_never_increases_from_init() {
        let (x, _) = linearize_returns(
            &simulate_sv(&SvParams::new(-9.0, 0.97, 0.02).unwrap(), 800, 12).unwrap(),
        )
        .unwrap();
        let init = SvParams::new(series_mean(&x).unwrap(), 0.5, 0.5).unwrap();
        let fit = fit_sv(&x, &init, &OptimConfig::default()).unwrap();
        // likelihood at the init point
        let model = sv_to_statespace(&init).unwrap();
        let centered = TimeSeries::scalar(
            "c",
            x.values().iter().map(|v| v - init.kappa).collect(),
        )
        .unwrap();
        let at_init = kalman_filter(&model, &centered).unwrap().neg_loglik;
        assert!(fit.neg_loglik <= at_init + 1e-9);
    }

    #[test]
    fn recovers_persistence_from_synthetic_data() {
        let truth = SvParams::new(-9.0, 0.99, 0.004).unwrap();
        let y = simulate_sv(&truth, 20_000, 4242).unwrap();
        let (x, dropped) = linearize_returns(&y).unwrap();
        assert_eq!(dropped, 0); // continuous draws are never exactly zero
        let init = SvParams::new(series_mean(&x).unwrap(), 0.9, 0.01).unwrap();
        let fit = fit_sv(&x, &init, &OptimConfig { max_iters: 6000, ..OptimConfig::default() })
            .unwrap();
        assert!(
            (fit.params.phi - truth.phi).abs() < 0.01,
            "phi = {} vs {}",
            fit.params.phi,
            truth.phi
        );
    }
}
