//! Macroeconomic data preparation and penalized likelihood estimation:
//! the five-series population-scaled transform, the trend filter with its
//! banded solver, log detrending, and box-constrained penalized MLE over
//! any state-space family.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::optim::{nelder_mead_box, OptimConfig};
use crate::series::TimeSeries;
use crate::statespace::{kalman_filter, StateSpaceModel};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// The four model inputs produced from the five raw series.
#[derive(Debug, Clone)]
pub struct FredSeries {
    pub consumption: TimeSeries,
    pub investment: TimeSeries,
    pub output: TimeSeries,
    pub hours: TimeSeries,
}

/// Population-scaled national accounts:
///
/// `c' = 2.5e5 (PCESVC96 + PCNDGC96) / CNP16OV`
/// `i' = 2.5e5 GDPIC1 / CNP16OV`
/// `y' = c' + i'`
/// `h' = 6000 HOANBS / CNP16OV`
pub fn fred_transform(
    pcesvc: &TimeSeries,
    pcndgc: &TimeSeries,
    gdpic: &TimeSeries,
    hoanbs: &TimeSeries,
    cnp16ov: &TimeSeries,
) -> Result<FredSeries> {
    let n = pcesvc.len();
    for s in [pcndgc, gdpic, hoanbs, cnp16ov] {
        if s.len() != n {
            return Err(Error::DimensionMismatch("input series lengths differ".to_string()));
        }
    }
    for s in [pcesvc, pcndgc, gdpic, hoanbs, cnp16ov] {
        if s.dim() != 1 {
            return Err(Error::DimensionMismatch("inputs must be scalar series".to_string()));
        }
    }
    let pop = cnp16ov.as_scalar()?;
    if pop.iter().any(|&p| p == 0.0) {
        return Err(Error::InvalidInput("population series contains zeros".to_string()));
    }
    let sv = pcesvc.as_scalar()?;
    let nd = pcndgc.as_scalar()?;
    let inv = gdpic.as_scalar()?;
    let hrs = hoanbs.as_scalar()?;

    let mut c = Vec::with_capacity(n);
    let mut i = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for t in 0..n {
        let ct = 2.5e5 * (sv[t] + nd[t]) / pop[t];
        let it = 2.5e5 * inv[t] / pop[t];
        c.push(ct);
        i.push(it);
        y.push(ct + it);
        h.push(6000.0 * hrs[t] / pop[t]);
    }
    Ok(FredSeries {
        consumption: TimeSeries::scalar("c", c)?,
        investment: TimeSeries::scalar("i", i)?,
        output: TimeSeries::scalar("y", y)?,
        hours: TimeSeries::scalar("h", h)?,
    })
}

/// Trend component minimizing
/// `sum (x_t - z_t)^2 + lambda sum ((z_{t+1}-z_t) - (z_t-z_{t-1}))^2`,
/// by an exact banded Cholesky solve of the pentadiagonal normal
/// equations (I + lambda D''D'')z = x in O(n).
pub fn hp_filter(series: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidInput("trend filtering needs n >= 3".to_string()));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidInput("lambda must be nonnegative".to_string()));
    }

    // Bands of A = I + lambda D'D where D has rows (1, -2, 1).
    let mut d0 = vec![1.0; n];
    let mut d1 = vec![0.0; n - 1];
    let mut d2 = vec![0.0; n - 2];
    let stencil = [1.0, -2.0, 1.0];
    for r in 0..n - 2 {
        for (oi, &ci) in stencil.iter().enumerate() {
            for (oj, &cj) in stencil.iter().enumerate() {
                let (i, j) = (r + oi, r + oj);
                if j == i {
                    d0[i] += lambda * ci * cj;
                } else if j == i + 1 {
                    d1[i] += lambda * ci * cj;
                } else if j == i + 2 {
                    d2[i] += lambda * ci * cj;
                }
            }
        }
    }

    // Banded Cholesky A = L L' with L[i][i]=alpha, L[i][i-1]=beta, L[i][i-2]=gamma.
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut gamma = vec![0.0; n];
    for i in 0..n {
        let g = if i >= 2 { d2[i - 2] / alpha[i - 2] } else { 0.0 };
        let b = if i >= 1 {
            (d1[i - 1] - if i >= 2 { beta[i - 1] * g } else { 0.0 }) / alpha[i - 1]
        } else {
            0.0
        };
        let diag = d0[i] - b * b - g * g;
        if diag <= 0.0 {
            return Err(Error::Singular("trend filter system lost positive definiteness".to_string()));
        }
        alpha[i] = diag.sqrt();
        beta[i] = b;
        gamma[i] = g;
    }

    let solve = |rhs: &[f64]| -> Vec<f64> {
        // L y = rhs, then L' z = y.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = rhs[i];
            if i >= 1 {
                s -= beta[i] * y[i - 1];
            }
            if i >= 2 {
                s -= gamma[i] * y[i - 2];
            }
            y[i] = s / alpha[i];
        }
        let mut z = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= beta[i + 1] * z[i + 1];
            }
            if i + 2 < n {
                s -= gamma[i + 2] * z[i + 2];
            }
            z[i] = s / alpha[i];
        }
        z
    };
    let apply = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut s = d0[i] * z[i];
                if i >= 1 {
                    s += d1[i - 1] * z[i - 1];
                }
                if i >= 2 {
                    s += d2[i - 2] * z[i - 2];
                }
                if i + 1 < n {
                    s += d1[i] * z[i + 1];
                }
                if i + 2 < n {
                    s += d2[i] * z[i + 2];
                }
                s
            })
            .collect()
    };

    // One step of iterative refinement keeps the trend accurate even for
    // very large lambda, where the system conditioning is ~16 lambda.
    let mut z = solve(series);
    let az = apply(&z);
    let resid: Vec<f64> = series.iter().zip(az.iter()).map(|(x, a)| x - a).collect();
    let correction = solve(&resid);
    for (zi, ci) in z.iter_mut().zip(correction.iter()) {
        *zi += ci;
    }
    Ok(z)
}

/// Trend and cycle of a scalar series.
pub fn hp_trend_cycle(series: &TimeSeries, lambda: f64) -> Result<(TimeSeries, TimeSeries)> {
    let x = series.as_scalar()?;
    let trend = hp_filter(&x, lambda)?;
    let cycle: Vec<f64> = x.iter().zip(trend.iter()).map(|(a, b)| a - b).collect();
    Ok((
        TimeSeries::scalar("trend", trend)?,
        TimeSeries::scalar("cycle", cycle)?,
    ))
}

/// Elementwise log deviation x_t = log raw_t - log trend_t.
pub fn detrend(raw: &TimeSeries, trend: &TimeSeries) -> Result<TimeSeries> {
    let r = raw.as_scalar()?;
    let t = trend.as_scalar()?;
    if r.len() != t.len() {
        return Err(Error::DimensionMismatch("raw and trend lengths differ".to_string()));
    }
    if r.iter().chain(t.iter()).any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput("log detrending needs positive values".to_string()));
    }
    let out: Vec<f64> = r.iter().zip(t.iter()).map(|(a, b)| a.ln() - b.ln()).collect();
    TimeSeries::scalar(raw.name(), out)
}

/// One parameter of a penalized fit: an optional Gaussian penalty and a
/// hard box.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    /// (mean, variance) of the Gaussian penalty; None for box-only
    /// parameters.
    pub prior: Option<(f64, f64)>,
    pub lower: f64,
    pub upper: f64,
}

impl ParamSpec {
    pub fn with_prior(name: &str, mean: f64, variance: f64, lower: f64, upper: f64) -> Self {
        ParamSpec {
            name: name.to_string(),
            prior: Some((mean, variance)),
            lower,
            upper,
        }
    }

    pub fn box_only(name: &str, lower: f64, upper: f64) -> Self {
        ParamSpec {
            name: name.to_string(),
            prior: None,
            lower,
            upper,
        }
    }
}

/// Validated collection of parameter specs.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    params: Vec<ParamSpec>,
}

impl PriorSpec {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        for p in &params {
            if !(p.lower < p.upper) {
                return Err(Error::InvalidInput(alloc::format!(
                    "parameter {}: lower bound must be below upper",
                    p.name
                )));
            }
            if let Some((_, v)) = p.prior {
                if !(v > 0.0) {
                    return Err(Error::InvalidInput(alloc::format!(
                        "parameter {}: prior variance must be positive",
                        p.name
                    )));
                }
            }
        }
        Ok(PriorSpec { params })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    fn penalty(&self, theta: &[f64]) -> f64 {
        self.params
            .iter()
            .zip(theta.iter())
            .filter_map(|(p, &x)| p.prior.map(|(m, v)| (x - m) * (x - m) / (2.0 * v)))
            .sum()
    }
}

/// A state-space family: parameters to a model plus an observation
/// intercept subtracted from the data before filtering.
pub type SsFamily = dyn Fn(&[f64]) -> Result<(StateSpaceModel, Vec<f64>)>;

/// Result of a penalized fit.
#[derive(Debug, Clone)]
pub struct PenalizedFit {
    pub params: Vec<f64>,
    /// Filter negative log likelihood at the optimum (no penalty).
    pub neg_loglik: f64,
    /// Penalized objective at the optimum.
    pub neg_penalized: f64,
    pub converged: bool,
    pub iters: usize,
}

/// Minimizes the Kalman negative log likelihood plus Gaussian penalties
/// over box-constrained parameters by simplex search.
///
/// Parameter points the builder rejects (dimension errors, nonstationary
/// transitions) are penalized with +infinity, so the search simply backs
/// away from them. Deterministic given init and config.
pub fn penalized_mle(
    family: &SsFamily,
    data: &TimeSeries,
    priors: &PriorSpec,
    init: &[f64],
    cfg: &OptimConfig,
) -> Result<PenalizedFit> {
    if init.len() != priors.len() {
        return Err(Error::DimensionMismatch("init length != number of parameters".to_string()));
    }
    let lower: Vec<f64> = priors.params().iter().map(|p| p.lower).collect();
    let upper: Vec<f64> = priors.params().iter().map(|p| p.upper).collect();

    let objective = |theta: &[f64]| -> f64 {
        match family(theta) {
            Ok((model, intercept)) => {
                if intercept.len() != data.dim() {
                    return f64::INFINITY;
                }
                let centered = center(data, &intercept);
                match centered.and_then(|c| kalman_filter(&model, &c)) {
                    Ok(out) => out.neg_loglik + priors.penalty(theta),
                    Err(_) => f64::INFINITY,
                }
            }
            Err(_) => f64::INFINITY,
        }
    };

    let result = nelder_mead_box(objective, init, &lower, &upper, cfg)?;

    // Recompute the unpenalized likelihood at the optimum.
    let neg_loglik = match family(&result.x) {
        Ok((model, intercept)) => center(data, &intercept)
            .and_then(|c| kalman_filter(&model, &c))
            .map(|o| o.neg_loglik)
            .unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };

    Ok(PenalizedFit {
        params: result.x,
        neg_loglik,
        neg_penalized: result.fval,
        converged: result.converged,
        iters: result.iters,
    })
}

fn center(data: &TimeSeries, intercept: &[f64]) -> Result<TimeSeries> {
    if intercept.iter().all(|&c| c == 0.0) {
        return Ok(data.clone());
    }
    let p = data.dim();
    let mut values = Vec::with_capacity(data.len() * p);
    for t in 0..data.len() {
        values.extend(data.row(t).iter().zip(intercept.iter()).map(|(y, c)| y - c));
    }
    TimeSeries::new(data.name(), data.len(), p, values)
}

/// A VAR(1)-as-state-space family over k series: theta holds the k x k
/// transition row-major followed by k state innovation variances. The
/// state is observed exactly (Z = I, H = 0) and P1 solves the stationary
/// variance equation.
pub fn var1_family(k: usize) -> impl Fn(&[f64]) -> Result<(StateSpaceModel, Vec<f64>)> {
    move |theta: &[f64]| {
        if theta.len() != k * k + k {
            return Err(Error::DimensionMismatch("var1 family expects k^2 + k parameters".to_string()));
        }
        let t = Mat::from_vec(k, k, theta[..k * k].to_vec())?;
        let mut q = Mat::zeros(k, k);
        for i in 0..k {
            if !(theta[k * k + i] > 0.0) {
                return Err(Error::InvalidInput("state noise variances must be positive".to_string()));
            }
            q[(i, i)] = theta[k * k + i];
        }
        let p1 = stationary_state_cov(&t, &q)?;
        let model = StateSpaceModel::new(
            Mat::identity(k),
            t,
            Mat::zeros(k, k),
            q,
            vec![0.0; k],
            p1,
        )?;
        Ok((model, vec![0.0; k]))
    }
}

/// Boxes for [`var1_family`]: transition entries in (-bound, bound), state
/// variances positive.
pub fn var1_boxes(k: usize, coeff_bound: f64) -> Result<PriorSpec> {
    let mut params = Vec::with_capacity(k * k + k);
    for i in 0..k {
        for j in 0..k {
            params.push(ParamSpec::box_only(
                &alloc::format!("t{i}{j}"),
                -coeff_bound,
                coeff_bound,
            ));
        }
    }
    for i in 0..k {
        params.push(ParamSpec::box_only(&alloc::format!("q{i}"), 1e-8, 1e2));
    }
    PriorSpec::new(params)
}

/// Solves V = T V T' + Q by doubling; requires a stable T.
fn stationary_state_cov(t: &Mat, q: &Mat) -> Result<Mat> {
    if crate::linalg::spectral_radius(t) >= 1.0 - 1e-10 {
        return Err(Error::NonStationary {
            rho: crate::linalg::spectral_radius(t),
        });
    }
    let mut v = q.clone();
    let mut b = t.clone();
    for _ in 0..64 {
        let add = b.matmul(&v).matmul(&b.transpose());
        let next = v.add(&add).symmetrize();
        let diff = next.sub(&v).frobenius_norm();
        v = next;
        b = b.matmul(&b);
        if diff <= 1e-14 * (1.0 + v.frobenius_norm()) {
            break;
        }
    }
    Ok(v)
}
