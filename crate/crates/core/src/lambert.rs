//! Lambert W function, branch -1.
//!
//! The branch solving w * exp(w) = x with w <= -1, defined for
//! x in [-1/e, 0). Near the branch point the Puiseux series in
//! p = -sqrt(2(1 + e x)) seeds the iteration; elsewhere the asymptotic
//! seed log(-x) - log(-log(-x)) is used. Halley steps then polish the
//! root to machine residual.

use alloc::format;

use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use core::f64::consts::E;

/// Largest representable argument, -1/e.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Lambert W on branch -1.
///
/// Returns w <= -1 with w * exp(w) = x to near machine residual.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    if !(x < 0.0) || x < BRANCH_POINT {
        return Err(Error::OutOfDomain(format!(
            "lambert_w_minus1 needs x in [-1/e, 0), got {x}"
        )));
    }

    // p^2 = 2(1 + e x), clamped against rounding at the branch point.
    let p2 = (2.0 * (E * x + 1.0)).max(0.0);
    if p2 < 1e-30 {
        return Ok(-1.0);
    }

    let mut w = if p2 < 0.5 {
        // Branch-point series with p < 0 selecting the lower branch.
        let p = -p2.sqrt();
        -1.0 + p - p2 / 3.0 + (11.0 / 72.0) * p2 * p - (43.0 / 540.0) * p2 * p2
    } else {
        // Asymptotic seed; valid since log(-x) < -1 on this branch.
        let l1 = (-x).ln();
        l1 - (-l1).ln()
    };

    // Halley iteration on f(w) = w e^w - x.
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-15 * x.abs() {
            break;
        }
        let fp = ew * (w + 1.0);
        let fpp = ew * (w + 2.0);
        let denom = fp - f * fpp / (2.0 * fp);
        let step = if denom.is_finite() && denom != 0.0 {
            f / denom
        } else {
            f / fp
        };
        let mut next = w - step;
        if !(next < -1.0) {
            // Keep iterates on the lower branch.
            next = 0.5 * (w - 1.0);
        }
        if next == w {
            break;
        }
        w = next;
    }
    Ok(w)
}
