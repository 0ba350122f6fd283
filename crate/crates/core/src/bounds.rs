//! Closed-form risk-bound computations.
//!
//! The central objects are the blocked uniform-deviation probability bound
//! (with its exact Lambert-W exponent and the slightly looser closed-form
//! exponent), the confidence penalty obtained by inverting it, IID
//! baselines, the bounded-loss variant, oracle rates under exponential
//! mixing, and the confidence/effective-data tradeoff surface.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::lambert::lambert_w_minus1;
use crate::mixing::{effective_eta, BlockingPlan};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use core::f64::consts::E;

/// e^3, the largest exponent value the Lambert-W inversion can produce.
fn e_cubed() -> f64 {
    E * E * E
}

/// Largest meaningful epsilon: sqrt(e^3 / 2). Beyond this the penalty
/// inversion leaves the W-branch domain and saturates.
pub fn eps_saturation() -> f64 {
    (e_cubed() / 2.0).sqrt()
}

/// The exact exponent exp(W_-1(-2 eps^2 / e^4) + 4) from the deviation
/// bound; defined for eps in (0, sqrt(e^3/2)].
pub fn exact_exponent(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::OutOfDomain("eps must be positive".to_string()));
    }
    let x = -2.0 * eps * eps / (e_cubed() * E);
    let w = lambert_w_minus1(x)?;
    Ok((w + 4.0).exp())
}

/// The closed-form replacement exponent eps^(8/3) / 4^(2/3).
///
/// It never exceeds the exact exponent on (0, 1], which is what makes the
/// resulting probability bound a valid (slightly looser) relaxation.
pub fn simplified_exponent(eps: f64) -> f64 {
    eps.powf(8.0 / 3.0) / 4.0f64.powf(2.0 / 3.0)
}

fn prob_bound_from_exponent(exponent: f64, mu: usize, vcd: u32, beta_gap: f64) -> f64 {
    let mu_f = mu as f64;
    // log-space to survive large (2 mu + 1)^vcd
    let log_poly = 8.0f64.ln() + vcd as f64 * (2.0 * mu_f + 1.0).ln();
    (log_poly - mu_f * exponent / 4.0).exp() + 2.0 * mu_f * beta_gap
}

/// Probability that the normalized risk/training-error gap exceeds `eps`,
/// uniformly over a class of capacity `vcd`, using `mu` block pairs with
/// dependence cost `beta_gap`:
/// `8 (2 mu + 1)^vcd exp(-mu X / 4) + 2 mu beta`, with the exact exponent X.
///
/// Values at or above 1 are trivially true statements; callers treat them
/// as the trivial regime.
pub fn deviation_prob_bound(eps: f64, mu: usize, vcd: u32, beta_gap: f64) -> Result<f64> {
    if mu < 1 {
        return Err(Error::InvalidInput("mu must be >= 1".to_string()));
    }
    if eps > eps_saturation() {
        return Err(Error::OutOfDomain(format!(
            "eps {eps} beyond the invertible range sqrt(e^3/2)"
        )));
    }
    Ok(prob_bound_from_exponent(exact_exponent(eps)?, mu, vcd, beta_gap))
}

/// Same probability bound with the closed-form exponent; strictly, but only
/// slightly, looser than [`deviation_prob_bound`] on eps in (0, 1].
pub fn deviation_prob_bound_simplified(eps: f64, mu: usize, vcd: u32, beta_gap: f64) -> Result<f64> {
    if mu < 1 {
        return Err(Error::InvalidInput("mu must be >= 1".to_string()));
    }
    if !(eps > 0.0) {
        return Err(Error::OutOfDomain("eps must be positive".to_string()));
    }
    Ok(prob_bound_from_exponent(simplified_exponent(eps), mu, vcd, beta_gap))
}

/// Which algebraic form of the penalty intermediate E to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyVariant {
    /// E = (4 vcd log(2 mu + 1) + log(8/eta')) / mu, the printed corollary;
    /// reproduces the reference computations.
    #[default]
    AsPrinted,
    /// E = (4 vcd log(2 mu + 1) + 4 log(8/eta')) / mu, the exact algebraic
    /// inverse of the deviation bound.
    ExactInversion,
}

/// Confidence penalty eps = M sqrt(E (4 - log E) / 2) with its intermediate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    pub eps: f64,
    /// The intermediate E before inversion.
    pub e_value: f64,
    /// True when E > e^3 and eps saturates at M sqrt(e^3/2); the resulting
    /// probability statement is vacuous but the value still ranks candidates.
    pub trivial: bool,
}

/// Inverts the deviation bound at confidence eta for the given plan.
pub fn risk_penalty(
    plan: &BlockingPlan,
    vcd: u32,
    eta: f64,
    m: f64,
    variant: PenaltyVariant,
) -> Result<Penalty> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput("moment bound M must be positive".to_string()));
    }
    let eta_prime = effective_eta(eta, plan.mu, plan.beta_gap)?;
    let mu = plan.mu as f64;
    let log_poly = (2.0 * mu + 1.0).ln();
    let log_conf = (8.0 / eta_prime).ln();
    let e_value = match variant {
        PenaltyVariant::AsPrinted => (4.0 * vcd as f64 * log_poly + log_conf) / mu,
        PenaltyVariant::ExactInversion => (4.0 * vcd as f64 * log_poly + 4.0 * log_conf) / mu,
    };
    if e_value > e_cubed() {
        return Ok(Penalty {
            eps: m * eps_saturation(),
            e_value,
            trivial: true,
        });
    }
    let eps = m * (e_value * (4.0 - e_value.ln()) / 2.0).sqrt();
    Ok(Penalty {
        eps,
        e_value,
        trivial: false,
    })
}

/// Everything needed to assemble a total risk bound for one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub plan: BlockingPlan,
    pub vcd: u32,
    /// Requested miss probability, in (0, 1).
    pub eta: f64,
    /// Moment bound M on sqrt(E[l^2]).
    pub m: f64,
    pub train_err: f64,
    /// Truncation penalty delta_d; zero for fixed-memory classes.
    pub delta_d: f64,
}

/// The assembled bound with all intermediates recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub train_err: f64,
    pub delta_d: f64,
    pub penalty_eps: f64,
    pub total_bound: f64,
    pub eta: f64,
    pub eta_prime: f64,
    pub plan: BlockingPlan,
    pub vcd: u32,
    pub e_value: f64,
    /// Saturated penalty: the probability guarantee is vacuous.
    pub trivial: bool,
}

/// Total bound = training error + truncation penalty + confidence penalty.
pub fn risk_bound(inputs: &BoundInputs, variant: PenaltyVariant) -> Result<BoundReport> {
    if inputs.train_err < 0.0 || inputs.delta_d < 0.0 {
        return Err(Error::InvalidInput("training error and delta_d must be nonnegative".to_string()));
    }
    let penalty = risk_penalty(&inputs.plan, inputs.vcd, inputs.eta, inputs.m, variant)?;
    let eta_prime = effective_eta(inputs.eta, inputs.plan.mu, inputs.plan.beta_gap)?;
    Ok(BoundReport {
        train_err: inputs.train_err,
        delta_d: inputs.delta_d,
        penalty_eps: penalty.eps,
        total_bound: inputs.train_err + inputs.delta_d + penalty.eps,
        eta: inputs.eta,
        eta_prime,
        plan: inputs.plan,
        vcd: inputs.vcd,
        e_value: penalty.e_value,
        trivial: penalty.trivial,
    })
}

/// Two-sided concentration for one fixed predictor under bounded loss:
/// `2 exp(-2 n eps^2 / K^2)`.
pub fn hoeffding_bound(n: usize, eps: f64, k: f64) -> f64 {
    let n = n as f64;
    2.0 * (-2.0 * n * eps * eps / (k * k)).exp()
}

/// IID uniform deviation radius at confidence eta:
/// `K1 sqrt((vcd log(2n+1) + log(4/eta)) / n)`.
///
/// The constant K1 is caller-supplied (the underlying result leaves it
/// unspecified); the loss bound K is the conventional stand-in.
pub fn iid_vc_bound(n: usize, vcd: u32, eta: f64, k1: f64) -> f64 {
    let n = n as f64;
    k1 * ((vcd as f64 * (2.0 * n + 1.0).ln() + (4.0 / eta).ln()) / n).sqrt()
}

/// Blocked uniform deviation probability under a uniform loss bound:
/// `8 (2 mu + 1)^vcd exp(-mu eps^2 / K1^2) + 2 mu beta`.
pub fn bounded_loss_prob_bound(eps: f64, mu: usize, vcd: u32, k1: f64, beta_gap: f64) -> f64 {
    let mu_f = mu as f64;
    let log_poly = 8.0f64.ln() + vcd as f64 * (2.0 * mu_f + 1.0).ln();
    (log_poly - mu_f * eps * eps / (k1 * k1)).exp() + 2.0 * mu_f * beta_gap
}

/// Oracle-loss rates for empirical risk minimization under exponential
/// mixing with exponent kappa, plus the blocking schedule achieving the
/// upper rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRates {
    /// c sqrt(vcd / n); no method beats this even with IID data.
    pub lower: f64,
    /// C sqrt(vcd log n / n^(kappa/(1+kappa))).
    pub upper: f64,
    /// Block length schedule a_n = n^(1/(1+kappa)).
    pub block_len: f64,
    /// Block pair schedule mu_n = n^(kappa/(1+kappa)).
    pub block_pairs: f64,
}

pub fn oracle_rates(n: usize, vcd: u32, kappa: f64, c_lower: f64, c_upper: f64) -> Result<OracleRates> {
    if n < 2 {
        return Err(Error::InvalidInput("oracle rates need n >= 2".to_string()));
    }
    if !(kappa > 0.0 && c_lower > 0.0 && c_upper > 0.0) {
        return Err(Error::InvalidInput("kappa and constants must be positive".to_string()));
    }
    let n_f = n as f64;
    let vcd_f = vcd as f64;
    let rate_exp = kappa / (1.0 + kappa);
    Ok(OracleRates {
        lower: c_lower * (vcd_f / n_f).sqrt(),
        upper: c_upper * (vcd_f * n_f.ln() / n_f.powf(rate_exp)).sqrt(),
        block_len: n_f.powf(1.0 / (1.0 + kappa)),
        block_pairs: n_f.powf(rate_exp),
    })
}

/// The confidence/effective-data tradeoff surface.
///
/// `log_prob[i * eps.len() + j]` holds log(min(bound, 1)) at
/// (mu\[i\], eps\[j\]); `boundary[i]` is the smallest eps at which the
/// bound stops being trivial for mu\[i\], when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffGrid {
    pub mu: Vec<usize>,
    pub eps: Vec<f64>,
    pub log_prob: Vec<f64>,
    pub boundary: Vec<Option<f64>>,
}

impl TradeoffGrid {
    pub fn log_prob_at(&self, mu_idx: usize, eps_idx: usize) -> f64 {
        self.log_prob[mu_idx * self.eps.len() + eps_idx]
    }
}

/// Evaluates the deviation bound over a (mu, eps) grid and traces the
/// trivial-boundary curve.
pub fn tradeoff_grid(
    mu_values: &[usize],
    eps_values: &[f64],
    vcd: u32,
    beta_gap: f64,
) -> Result<TradeoffGrid> {
    if mu_values.is_empty() || eps_values.is_empty() {
        return Err(Error::InvalidInput("tradeoff grid ranges must be nonempty".to_string()));
    }
    let mut log_prob = Vec::with_capacity(mu_values.len() * eps_values.len());
    for &mu in mu_values {
        for &eps in eps_values {
            let p = deviation_prob_bound(eps, mu, vcd, beta_gap)?;
            log_prob.push(p.min(1.0).ln());
        }
    }
    let boundary = mu_values
        .iter()
        .map(|&mu| trivial_boundary(mu, vcd, beta_gap))
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffGrid {
        mu: mu_values.to_vec(),
        eps: eps_values.to_vec(),
        log_prob,
        boundary,
    })
}

/// Smallest eps with bound <= 1 at this mu, by bisection over the
/// invertible eps range; None when even the largest eps stays trivial.
fn trivial_boundary(mu: usize, vcd: u32, beta_gap: f64) -> Result<Option<f64>> {
    let hi0 = eps_saturation();
    if deviation_prob_bound(hi0, mu, vcd, beta_gap)? > 1.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1e-12, hi0);
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if deviation_prob_bound(mid, mu, vcd, beta_gap)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
