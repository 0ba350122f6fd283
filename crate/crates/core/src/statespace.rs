//! Linear-Gaussian state-space models: Kalman filtering, one-step
//! prediction weights, the memory-truncation penalty, and simulation.
//!
//! The model is
//!
//! ```text
//! y_t     = Z a_t + e_t,      e_t ~ N(0, H)
//! a_{t+1} = T a_t + w_{t+1},  w_t ~ N(0, Q),   a_1 ~ N(a1, P1)
//! ```
//!
//! with the eigenvalues of T strictly inside the unit circle. Filtering
//! follows the innovation recursions; `f` stores the inverse innovation
//! covariance so the gain recursion K_t = T P_t Z' F_t reads off directly,
//! while the likelihood uses the standard innovation form
//! `0.5 * sum(log det S_t + v_t' S_t^{-1} v_t)` (additive constants
//! dropped).

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{cholesky_psd, spd_inverse, spd_log_det, Mat};
use crate::loss::{residual, LossSpec};
use crate::risk::Forecaster;
use crate::series::TimeSeries;
use crate::{Error, Result};

/// Stationarity threshold on the spectral radius of T.
const RHO_MAX: f64 = 1.0 - 1e-10;

/// Symmetry/PSD validation tolerance relative to the matrix scale.
const PSD_TOL: f64 = 1e-10;

/// A linear-Gaussian state-space model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    z: Mat,
    t: Mat,
    h: Mat,
    q: Mat,
    a1: Vec<f64>,
    p1: Mat,
}

fn validate_covariance(name: &str, m: &Mat) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(alloc::format!("{name} must be square")));
    }
    let scale = m.frobenius_norm().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > PSD_TOL * scale {
                return Err(Error::InvalidInput(alloc::format!("{name} is not symmetric")));
            }
        }
    }
    let min_eig = crate::linalg::sym_min_eigenvalue(m);
    if min_eig < -PSD_TOL * scale {
        return Err(Error::InvalidInput(alloc::format!(
            "{name} is not positive semidefinite (min eigenvalue {min_eig})"
        )));
    }
    Ok(())
}

impl StateSpaceModel {
    /// Validates dimensions, covariance symmetry/PSD, and stationarity of T.
    pub fn new(z: Mat, t: Mat, h: Mat, q: Mat, a1: Vec<f64>, p1: Mat) -> Result<Self> {
        let m = t.nrows();
        let p = z.nrows();
        if !t.is_square() {
            return Err(Error::DimensionMismatch("transition T must be square".to_string()));
        }
        if z.ncols() != m {
            return Err(Error::DimensionMismatch("Z columns must match state dimension".to_string()));
        }
        if h.nrows() != p || q.nrows() != m || p1.nrows() != m || a1.len() != m {
            return Err(Error::DimensionMismatch("observation/state matrix sizes disagree".to_string()));
        }
        validate_covariance("H", &h)?;
        validate_covariance("Q", &q)?;
        validate_covariance("P1", &p1)?;
        let rho = crate::linalg::spectral_radius(&t);
        if rho >= RHO_MAX {
            return Err(Error::NonStationary { rho });
        }
        Ok(StateSpaceModel { z, t, h, q, a1, p1 })
    }

    /// Scalar-state, scalar-observation convenience constructor.
    pub fn scalar(z: f64, t: f64, h: f64, q: f64, a1: f64, p1: f64) -> Result<Self> {
        StateSpaceModel::new(
            Mat::scalar(z),
            Mat::scalar(t),
            Mat::scalar(h),
            Mat::scalar(q),
            vec![a1],
            Mat::scalar(p1),
        )
    }

    pub fn state_dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn obs_dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn z(&self) -> &Mat {
        &self.z
    }

    pub fn t(&self) -> &Mat {
        &self.t
    }

    pub fn h(&self) -> &Mat {
        &self.h
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn a1(&self) -> &[f64] {
        &self.a1
    }

    pub fn p1(&self) -> &Mat {
        &self.p1
    }
}

/// Full filter pass output.
///
/// Index t is 0-based over the sample; `a[t]` and `p[t]` are the predicted
/// state mean/covariance *before* seeing row t, so they have length n + 1
/// and their last entries carry the out-of-sample forecast state.
#[derive(Debug, Clone)]
pub struct KalmanOutput {
    /// Predicted state means a_t, length n + 1.
    pub a: Vec<Vec<f64>>,
    /// Predicted state covariances P_t, length n + 1.
    pub p: Vec<Mat>,
    /// One-step forecasts yhat_t = Z a_t.
    pub yhat: Vec<Vec<f64>>,
    /// Innovations v_t = y_t - yhat_t.
    pub v: Vec<Vec<f64>>,
    /// Innovation covariances S_t = Z P_t Z' + H.
    pub s: Vec<Mat>,
    /// Inverse innovation covariances F_t = S_t^{-1}.
    pub f: Vec<Mat>,
    /// Gains K_t = T P_t Z' F_t.
    pub k: Vec<Mat>,
    /// L_t = T - K_t Z.
    pub l: Vec<Mat>,
    /// 0.5 * sum(log det S_t + v_t' S_t^{-1} v_t), constants dropped.
    pub neg_loglik: f64,
}

/// Runs the filter over the whole series.
pub fn kalman_filter(model: &StateSpaceModel, series: &TimeSeries) -> Result<KalmanOutput> {
    let p_dim = model.obs_dim();
    if series.dim() != p_dim {
        return Err(Error::DimensionMismatch("series dimension != observation dimension".to_string()));
    }
    let n = series.len();
    let m_dim = model.state_dim();

    let mut a = Vec::with_capacity(n + 1);
    let mut p_cov = Vec::with_capacity(n + 1);
    let mut yhat = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut s_all = Vec::with_capacity(n);
    let mut f_all = Vec::with_capacity(n);
    let mut k_all = Vec::with_capacity(n);
    let mut l_all = Vec::with_capacity(n);
    let mut neg_loglik = 0.0;

    let mut a_t = model.a1.clone();
    let mut p_t = model.p1.clone();
    let zt = model.z.transpose();

    for t in 0..n {
        a.push(a_t.clone());
        p_cov.push(p_t.clone());

        let yhat_t = model.z.mul_vec(&a_t);
        let v_t = residual(series.row(t), &yhat_t);
        let s_t = model.z.matmul(&p_t).matmul(&zt).add(&model.h).symmetrize();
        let f_t = spd_inverse(&s_t)?;
        let log_det = spd_log_det(&s_t)?;

        let fv = f_t.mul_vec(&v_t);
        let quad: f64 = v_t.iter().zip(fv.iter()).map(|(a, b)| a * b).sum();
        neg_loglik += 0.5 * (log_det + quad);

        let k_t = model.t.matmul(&p_t).matmul(&zt).matmul(&f_t);
        let l_t = model.t.sub(&k_t.matmul(&model.z));

        // a_{t+1} = T a_t + K_t v_t ; P_{t+1} = T P_t L_t' + Q
        let ta = model.t.mul_vec(&a_t);
        let kv = k_t.mul_vec(&v_t);
        a_t = ta.iter().zip(kv.iter()).map(|(x, y)| x + y).collect();
        p_t = model
            .t
            .matmul(&p_t)
            .matmul(&l_t.transpose())
            .add(&model.q)
            .symmetrize();

        if !(m_dim == 0) {
            debug_assert_eq!(p_t.nrows(), m_dim);
        }

        yhat.push(yhat_t);
        v.push(v_t);
        s_all.push(s_t);
        f_all.push(f_t);
        k_all.push(k_t);
        l_all.push(l_t);
    }
    a.push(a_t);
    p_cov.push(p_t);

    Ok(KalmanOutput {
        a,
        p: p_cov,
        yhat,
        v,
        s: s_all,
        f: f_all,
        k: k_all,
        l: l_all,
        neg_loglik,
    })
}

/// Runs the state-covariance recursion without data until it converges and
/// returns the stationary innovation covariance Z P Z' + H.
pub fn stationary_innovation_cov(model: &StateSpaceModel) -> Result<Mat> {
    let zt = model.z.transpose();
    let mut p_t = model.p1.clone();
    for _ in 0..200_000 {
        let s_t = model.z.matmul(&p_t).matmul(&zt).add(&model.h).symmetrize();
        let f_t = spd_inverse(&s_t)?;
        let k_t = model.t.matmul(&p_t).matmul(&zt).matmul(&f_t);
        let l_t = model.t.sub(&k_t.matmul(&model.z));
        let next = model
            .t
            .matmul(&p_t)
            .matmul(&l_t.transpose())
            .add(&model.q)
            .symmetrize();
        let diff = next.sub(&p_t).frobenius_norm();
        let scale = 1.0 + p_t.frobenius_norm();
        p_t = next;
        if diff <= 1e-13 * scale {
            break;
        }
    }
    Ok(model.z.matmul(&p_t).matmul(&zt).add(&model.h).symmetrize())
}

/// One row of the growing-memory weight matrix: the forecast of
/// observation t+1 (paper indexing, 1-based) as a linear map of the first
/// t observations plus an initial-state term.
#[derive(Debug, Clone)]
pub struct WeightRow {
    /// Row label t: this row forecasts observation t + 1 from rows 1..=t.
    pub t: usize,
    /// Coefficients b_{t,j} (p x p each) for j = 1..=t, stored 0-based.
    pub coeffs: Vec<Mat>,
    /// The initial-state contribution Z (prod_{i=1..t} L_i) a1.
    pub init: Vec<f64>,
}

impl WeightRow {
    /// Applies the row to the sample: sum_j b_{t,j} y_j + init.
    pub fn apply(&self, series: &TimeSeries) -> Vec<f64> {
        let p = series.dim();
        let mut out = self.init.clone();
        debug_assert_eq!(out.len(), p);
        for (j0, b) in self.coeffs.iter().enumerate() {
            let contrib = b.mul_vec(series.row(j0));
            for (o, c) in out.iter_mut().zip(contrib.iter()) {
                *o += c;
            }
        }
        out
    }
}

/// Lower-triangular weight structure for a linear growing-memory predictor,
/// rows t = d..=n.
#[derive(Debug, Clone)]
pub struct PredictionWeights {
    pub d: usize,
    pub n: usize,
    pub obs_dim: usize,
    rows: Vec<WeightRow>,
}

impl PredictionWeights {
    /// Validates the band structure: row t carries exactly t coefficient
    /// blocks (entries above the diagonal would violate causality).
    pub fn from_rows(d: usize, n: usize, obs_dim: usize, rows: Vec<WeightRow>) -> Result<Self> {
        for row in &rows {
            if row.coeffs.len() != row.t {
                return Err(Error::InvalidInput(alloc::format!(
                    "weight row {} must have exactly {} coefficient blocks",
                    row.t,
                    row.t
                )));
            }
            if row.init.len() != obs_dim
                || row
                    .coeffs
                    .iter()
                    .any(|b| b.nrows() != obs_dim || b.ncols() != obs_dim)
            {
                return Err(Error::DimensionMismatch("weight block size != observation dimension".to_string()));
            }
        }
        Ok(PredictionWeights { d, n, obs_dim, rows })
    }

    pub fn row(&self, t: usize) -> Option<&WeightRow> {
        self.rows.iter().find(|r| r.t == t)
    }

    pub fn rows(&self) -> &[WeightRow] {
        &self.rows
    }
}

/// Materializes the forecast weights b_{t,j} = Z (prod_{i=j+1..t} L_i) K_j
/// and the initial-state terms from filter output, rows t = d..=n.
pub fn prediction_weights(
    model: &StateSpaceModel,
    d: usize,
    filter_out: &KalmanOutput,
) -> Result<PredictionWeights> {
    let n = filter_out.k.len();
    if n == 0 || d > n {
        return Err(Error::InvalidInput("prediction weights need filter output for rows 1..=n and d <= n".to_string()));
    }
    let m_dim = model.state_dim();
    let mut state_weights: Vec<Mat> = Vec::with_capacity(n); // (prod L) K_j, m x p
    let mut init_prod = Mat::identity(m_dim); // prod_{i=1..t} L_i
    let mut rows = Vec::new();

    for t in 1..=n {
        let l_t = &filter_out.l[t - 1];
        for w in state_weights.iter_mut() {
            *w = l_t.matmul(w);
        }
        state_weights.push(filter_out.k[t - 1].clone());
        init_prod = l_t.matmul(&init_prod);

        if t >= d {
            let coeffs: Vec<Mat> = state_weights.iter().map(|w| model.z.matmul(w)).collect();
            let init = model.z.mul_vec(&init_prod.mul_vec(&model.a1));
            rows.push(WeightRow { t, coeffs, init });
        }
    }
    PredictionWeights::from_rows(d, n, model.obs_dim(), rows)
}

/// The two-term truncation penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaD {
    /// Delta^2 E[l(Y_1)] sum_j ||prod L K_j|| over the truncated columns of
    /// the last row.
    pub first: f64,
    /// The in-sample average loss of the truncated forecast tails.
    pub second: f64,
    pub total: f64,
}

/// Truncation penalty straight from filter output:
///
/// `first  = Delta^2 EY1 sum_{j=1}^{n-d}   || prod_{i=j+1}^{n} L_i K_j ||`
/// `second = Delta/(n-d-1) sum_{t=d+1}^{n-1} l( sum_{j=1}^{t-d} prod_{i=j+1}^{t} L_i K_j y_j )`
///
/// Matrix factors are measured in the operator 2-norm; the vector tails go
/// through the loss itself.
pub fn delta_d_statespace(
    model: &StateSpaceModel,
    series: &TimeSeries,
    d: usize,
    loss: &LossSpec,
    ey1: f64,
) -> Result<DeltaD> {
    let n = series.len();
    if d < 1 || d >= n {
        return Err(Error::InvalidInput("delta_d needs 1 <= d < n".to_string()));
    }
    let out = kalman_filter(model, series)?;
    delta_d_from_filter(model, series, d, loss, ey1, &out)
}

/// Same computation reusing an existing filter pass.
pub fn delta_d_from_filter(
    model: &StateSpaceModel,
    series: &TimeSeries,
    d: usize,
    loss: &LossSpec,
    ey1: f64,
    out: &KalmanOutput,
) -> Result<DeltaD> {
    let n = series.len();
    if d < 1 || d >= n {
        return Err(Error::InvalidInput("delta_d needs 1 <= d < n".to_string()));
    }
    let m_dim = model.state_dim();
    let delta = loss.delta();

    // First term: tail weights of the last row, accumulated right to left.
    let mut g = Mat::identity(m_dim);
    let mut sum1 = 0.0;
    for j in (1..=n).rev() {
        if j < n {
            g = g.matmul(&out.l[j]); // append L_{j+1}
        }
        if j + d <= n {
            sum1 += g.matmul(&out.k[j - 1]).op_norm2();
        }
    }
    let first = delta * delta * ey1 * sum1;

    // Second term: per-row truncated tails u_t = c_t - r_t where c_t carries
    // all lags and r_t the most recent d of them.
    let mut c = vec![0.0; m_dim];
    let mut sum2 = 0.0;
    for t in 1..n {
        let ky: Vec<f64> = out.k[t - 1].mul_vec(series.row(t - 1));
        let lc = out.l[t - 1].mul_vec(&c);
        c = lc.iter().zip(ky.iter()).map(|(a, b)| a + b).collect();

        if t >= d + 1 {
            let mut r = vec![0.0; m_dim];
            let mut prod = Mat::identity(m_dim);
            for j in ((t - d + 1)..=t).rev() {
                if j < t {
                    prod = prod.matmul(&out.l[j]);
                }
                let term = prod.matmul(&out.k[j - 1]).mul_vec(series.row(j - 1));
                for (ri, ti) in r.iter_mut().zip(term.iter()) {
                    *ri += ti;
                }
            }
            let u: Vec<f64> = c.iter().zip(r.iter()).map(|(a, b)| a - b).collect();
            sum2 += loss.eval(&u);
        }
    }
    let second = delta / (n - d - 1) as f64 * sum2;

    Ok(DeltaD {
        first,
        second,
        total: first + second,
    })
}

/// Truncation penalty for an arbitrary linear growing-memory predictor
/// given its weight rows (which include the observation map):
///
/// `Delta^2 EY1 sum_{j=1}^{n-d-1} l(b_{n,j})
///  + Delta/(n-d-1) sum_{i=d+1}^{n-1} l( sum_{j=1}^{i-d} b_{i,j} y_j )`.
pub fn delta_d_linear(
    weights: &PredictionWeights,
    series: &TimeSeries,
    d: usize,
    loss: &LossSpec,
    ey1: f64,
) -> Result<f64> {
    let n = series.len();
    if d < 1 || d >= n {
        return Err(Error::InvalidInput("delta_d needs 1 <= d < n".to_string()));
    }
    if weights.n != n || weights.obs_dim != series.dim() {
        return Err(Error::DimensionMismatch("weights do not match the series".to_string()));
    }
    let delta = loss.delta();

    let last = weights
        .row(n)
        .ok_or_else(|| Error::InvalidInput("weights must include row n".to_string()))?;
    let mut first = 0.0;
    for j in 1..=(n - d - 1) {
        first += loss.eval_matrix(&last.coeffs[j - 1]);
    }
    first *= delta * delta * ey1;

    let mut second = 0.0;
    for i in (d + 1)..n {
        let row = weights
            .row(i)
            .ok_or_else(|| Error::InvalidInput(alloc::format!("weights must include row {i}")))?;
        let mut tail = vec![0.0; weights.obs_dim];
        for j in 1..=(i - d) {
            let contrib = row.coeffs[j - 1].mul_vec(series.row(j - 1));
            for (t, c) in tail.iter_mut().zip(contrib.iter()) {
                *t += c;
            }
        }
        second += loss.eval(&tail);
    }
    second *= delta / (n - d - 1) as f64;

    Ok(first + second)
}

/// Draws a sample path of length n; deterministic in the seed (state-init
/// draws first, then per step the observation noise before the state
/// innovation).
pub fn simulate_statespace(model: &StateSpaceModel, n: usize, seed: u64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidInput("simulation needs n >= 1".to_string()));
    }
    let m_dim = model.state_dim();
    let p_dim = model.obs_dim();
    let chol_p1 = cholesky_psd(model.p1())?;
    let chol_h = cholesky_psd(model.h())?;
    let chol_q = cholesky_psd(model.q())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k: usize, chol: &Mat| -> Vec<f64> {
        let z: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        chol.mul_vec(&z)
    };

    let mut alpha: Vec<f64> = {
        let noise = draw(m_dim, &chol_p1);
        model.a1.iter().zip(noise.iter()).map(|(a, b)| a + b).collect()
    };

    let mut values = Vec::with_capacity(n * p_dim);
    for _ in 0..n {
        let obs_noise = draw(p_dim, &chol_h);
        let y = model.z.mul_vec(&alpha);
        values.extend(y.iter().zip(obs_noise.iter()).map(|(a, b)| a + b));
        let state_noise = draw(m_dim, &chol_q);
        let ta = model.t.mul_vec(&alpha);
        alpha = ta.iter().zip(state_noise.iter()).map(|(a, b)| a + b).collect();
    }
    TimeSeries::new("simulated", n, p_dim, values)
}

/// A fitted state-space model used as a causal one-step forecaster.
///
/// An optional observation intercept is subtracted before filtering and
/// added back to every forecast; `memory` is the truncation depth the risk
/// bound will use, not a property of the filter.
pub struct StateSpaceForecaster<'a> {
    model: &'a StateSpaceModel,
    memory: usize,
    intercept: Vec<f64>,
}

impl<'a> StateSpaceForecaster<'a> {
    pub fn new(model: &'a StateSpaceModel, memory: usize) -> Self {
        let p = model.obs_dim();
        StateSpaceForecaster {
            model,
            memory,
            intercept: vec![0.0; p],
        }
    }

    pub fn with_intercept(mut self, intercept: Vec<f64>) -> Result<Self> {
        if intercept.len() != self.model.obs_dim() {
            return Err(Error::DimensionMismatch("intercept dimension != observation dimension".to_string()));
        }
        self.intercept = intercept;
        Ok(self)
    }

    fn centered(&self, series: &TimeSeries, upto: usize) -> Result<TimeSeries> {
        let p = series.dim();
        let mut values = Vec::with_capacity(upto * p);
        for t in 0..upto {
            values.extend(series.row(t).iter().zip(self.intercept.iter()).map(|(y, c)| y - c));
        }
        TimeSeries::new(series.name(), upto, p, values)
    }
}

impl Forecaster for StateSpaceForecaster<'_> {
    fn memory(&self) -> usize {
        self.memory
    }

    fn dim(&self) -> usize {
        self.model.obs_dim()
    }

    fn forecast_at(&self, series: &TimeSeries, t: usize) -> Result<Vec<f64>> {
        if t == 0 {
            // No data yet: the prior forecast Z a1 plus the intercept.
            let y = self.model.z.mul_vec(&self.model.a1);
            return Ok(y.iter().zip(self.intercept.iter()).map(|(a, b)| a + b).collect());
        }
        let prefix = self.centered(series, t)?;
        let out = kalman_filter(self.model, &prefix)?;
        let y = self.model.z.mul_vec(&out.a[t]);
        Ok(y.iter().zip(self.intercept.iter()).map(|(a, b)| a + b).collect())
    }

    fn forecasts(&self, series: &TimeSeries, from: usize) -> Result<Vec<Vec<f64>>> {
        let centered = self.centered(series, series.len())?;
        let out = kalman_filter(self.model, &centered)?;
        Ok((from..series.len())
            .map(|t| {
                out.yhat[t]
                    .iter()
                    .zip(self.intercept.iter())
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect())
    }
}
