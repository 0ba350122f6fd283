//! Temporal-dependence decay and the independent-block decomposition.
//!
//! A mixing profile gives the beta coefficient as a function of the gap
//! between past and future. Blocking splits the sample into 2*mu
//! alternating blocks of length a; the odd blocks behave like mu nearly
//! independent draws at a confidence cost of 2*mu*beta_(a-d).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bounds::{risk_penalty, PenaltyVariant};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Beta-mixing decay as a function of the gap `a`.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingProfile {
    /// beta_a = c1 * exp(-c2 * a^kappa), the exponential (geometric) form.
    Exponential { c1: f64, c2: f64, kappa: f64 },
    /// beta_a = c1 * a^-r.
    Algebraic { c1: f64, r: f64 },
    /// Tabulated gap -> beta pairs, nonincreasing in the gap.
    Table(BTreeMap<u32, f64>),
}

impl MixingProfile {
    pub fn exponential(c1: f64, c2: f64, kappa: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && kappa > 0.0) {
            return Err(Error::InvalidInput("exponential profile needs positive constants".to_string()));
        }
        Ok(MixingProfile::Exponential { c1, c2, kappa })
    }

    pub fn algebraic(c1: f64, r: f64) -> Result<Self> {
        if !(c1 > 0.0 && r > 0.0) {
            return Err(Error::InvalidInput("algebraic profile needs positive constants".to_string()));
        }
        Ok(MixingProfile::Algebraic { c1, r })
    }

    /// Independent observations: beta identically zero at every gap.
    pub fn independent() -> Self {
        let mut t = BTreeMap::new();
        t.insert(0, 0.0);
        MixingProfile::Table(t)
    }

    /// Builds a tabulated profile, validating entries in [0, 1] and
    /// nonincreasing in the gap.
    pub fn table(entries: &[(u32, f64)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("mixing table is empty".to_string()));
        }
        let mut map = BTreeMap::new();
        for &(gap, beta) in entries {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::InvalidInput(format!("beta {beta} outside [0, 1]")));
            }
            if map.insert(gap, beta).is_some() {
                return Err(Error::InvalidInput(format!("duplicate gap {gap} in mixing table")));
            }
        }
        let mut prev = f64::INFINITY;
        for (_, &b) in map.iter() {
            if b > prev {
                return Err(Error::InvalidInput("mixing table must be nonincreasing in the gap".to_string()));
            }
            prev = b;
        }
        Ok(MixingProfile::Table(map))
    }

    /// beta at gap `a`, clamped to [0, 1].
    ///
    /// Tabulated profiles extend conservatively: queries beyond the last
    /// entry return the last tabulated value, queries below the first
    /// entry return 1.
    pub fn beta_at(&self, a: u32) -> f64 {
        let raw = match self {
            MixingProfile::Exponential { c1, c2, kappa } => {
                c1 * (-c2 * (a as f64).powf(*kappa)).exp()
            }
            MixingProfile::Algebraic { c1, r } => {
                if a == 0 {
                    f64::INFINITY
                } else {
                    c1 * (a as f64).powf(-r)
                }
            }
            MixingProfile::Table(map) => match map.range(..=a).next_back() {
                Some((_, &beta)) => beta,
                None => 1.0,
            },
        };
        raw.clamp(0.0, 1.0)
    }
}

/// A blocking plan: mu pairs of alternating blocks of length a over a
/// sample of length n with memory d, together with beta at the gap a - d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockingPlan {
    pub mu: usize,
    pub a: usize,
    pub d: usize,
    pub n: usize,
    pub beta_gap: f64,
}

impl BlockingPlan {
    /// Validates 2*mu*a + d <= n with mu, a >= 1.
    pub fn new(n: usize, d: usize, a: usize, mu: usize, beta_gap: f64) -> Result<Self> {
        if mu < 1 || a < 1 {
            return Err(Error::InvalidInput("blocking needs mu >= 1 and a >= 1".to_string()));
        }
        if 2 * mu * a + d > n {
            return Err(Error::InfeasiblePlan(format!("2*{mu}*{a} + {d} > {n}")));
        }
        if !(0.0..=1.0).contains(&beta_gap) {
            return Err(Error::InvalidInput("beta_gap outside [0, 1]".to_string()));
        }
        Ok(BlockingPlan { mu, a, d, n, beta_gap })
    }

    /// Builds a plan reading beta at gap a - d from a profile.
    pub fn from_profile(n: usize, d: usize, a: usize, mu: usize, profile: &MixingProfile) -> Result<Self> {
        let gap = a.saturating_sub(d) as u32;
        BlockingPlan::new(n, d, a, mu, profile.beta_at(gap))
    }
}

/// Splits 0-based indices into mu odd blocks U_j and mu even blocks V_j of
/// length a each; trailing remainder indices stay unassigned.
pub fn block_partition(
    n: usize,
    d: usize,
    a: usize,
    mu: usize,
) -> Result<(Vec<Range<usize>>, Vec<Range<usize>>)> {
    if mu < 1 || a < 1 {
        return Err(Error::InvalidInput("blocking needs mu >= 1 and a >= 1".to_string()));
    }
    if 2 * mu * a + d > n {
        return Err(Error::InfeasiblePlan(format!("2*{mu}*{a} + {d} > {n}")));
    }
    let mut odd = Vec::with_capacity(mu);
    let mut even = Vec::with_capacity(mu);
    for j in 0..mu {
        odd.push(2 * j * a..(2 * j + 1) * a);
        even.push((2 * j + 1) * a..(2 * j + 2) * a);
    }
    Ok((odd, even))
}

/// eta' = eta - 2*mu*beta, the confidence left after paying for dependence.
pub fn effective_eta(eta: f64, mu: usize, beta_gap: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidInput("eta must lie in (0, 1)".to_string()));
    }
    let eta_prime = eta - 2.0 * mu as f64 * beta_gap;
    if eta_prime <= 0.0 {
        return Err(Error::ConfidenceExhausted { eta_prime });
    }
    Ok(eta_prime)
}

/// Grid-searches block length a and returns the feasible plan minimizing
/// the confidence penalty.
///
/// For each a in d+1 ..= (n-d)/2 the candidate uses mu = (n-d)/(2a)
/// blocks; plans whose eta' is exhausted are dropped and the survivor with
/// the smallest penalty wins, ties resolved toward smaller a.
pub fn choose_blocks(
    n: usize,
    d: usize,
    profile: &MixingProfile,
    eta: f64,
    vcd: u32,
    m: f64,
) -> Result<BlockingPlan> {
    if n <= d + 2 {
        return Err(Error::InfeasiblePlan("sample too short for any block plan".to_string()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidInput("eta must lie in (0, 1)".to_string()));
    }
    let mut best: Option<(f64, BlockingPlan)> = None;
    let a_max = (n - d) / 2;
    for a in (d + 1)..=a_max {
        let mu = (n - d) / (2 * a);
        if mu < 1 {
            break;
        }
        let plan = match BlockingPlan::from_profile(n, d, a, mu, profile) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let penalty = match risk_penalty(&plan, vcd, eta, m, PenaltyVariant::AsPrinted) {
            Ok(p) => p,
            Err(_) => continue, // eta' exhausted at this block length
        };
        let better = match &best {
            None => true,
            Some((eps, _)) => penalty.eps < *eps,
        };
        if better {
            best = Some((penalty.eps, plan));
        }
    }
    best.map(|(_, plan)| plan).ok_or_else(|| {
        Error::InfeasiblePlan("no block plan attains eta' > 0".to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sv_table() -> MixingProfile {
        // gap 8 estimated at 0.017, zero beyond.
        MixingProfile::table(&[(8, 0.017), (9, 0.0)]).unwrap()
    }

    #[test]
    fn exponential_at_zero_clamps_to_one() {
        let p = MixingProfile::exponential(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.beta_at(0), 1.0);
        assert_abs_diff_eq!(p.beta_at(1), (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn table_lookup_and_extension() {
        let p = sv_table();
        assert_eq!(p.beta_at(8), 0.017);
        assert_eq!(p.beta_at(9), 0.0);
        assert_eq!(p.beta_at(30), 0.0); // beyond last entry: last value
        assert_eq!(p.beta_at(3), 1.0); // below first entry: conservative
    }

    #[test]
    fn table_must_be_monotone() {
        assert!(MixingProfile::table(&[(1, 0.1), (2, 0.5)]).is_err());
        assert!(MixingProfile::table(&[(1, 1.5)]).is_err());
        assert!(MixingProfile::table(&[]).is_err());
    }

    #[test]
    fn partition_matches_index_formulas() {
        let (u, v) = block_partition(8, 0, 2, 2).unwrap();
        assert_eq!(u, vec![0..2, 4..6]);
        assert_eq!(v, vec![2..4, 6..8]);
    }

    #[test]
    fn partition_ignores_remainder() {
        let (u, v) = block_partition(9, 1, 2, 2).unwrap();
        assert_eq!(u, vec![0..2, 4..6]);
        assert_eq!(v, vec![2..4, 6..8]);
        // index 8 (paper's 9th observation) is unassigned
        assert!(u.iter().chain(v.iter()).all(|r| r.end <= 8));
    }

    #[test]
    fn partition_rejects_infeasible() {
        assert!(matches!(block_partition(5, 0, 3, 1), Err(Error::InfeasiblePlan(_))));
    }

    #[test]
    fn effective_eta_cases() {
        assert_eq!(effective_eta(0.15, 538, 0.0).unwrap(), 0.15);
        assert_abs_diff_eq!(effective_eta(0.2, 10, 0.005).unwrap(), 0.1, epsilon = 1e-15);
        assert!(matches!(
            effective_eta(0.1, 100, 0.001),
            Err(Error::ConfidenceExhausted { .. })
        ));
        assert!(effective_eta(0.0, 1, 0.0).is_err());
        assert!(effective_eta(1.0, 1, 0.0).is_err());
    }

    #[test]
    fn effective_eta_decreases_in_mu_and_beta() {
        let base = effective_eta(0.5, 10, 0.01).unwrap();
        assert!(effective_eta(0.5, 11, 0.01).unwrap() < base);
        assert!(effective_eta(0.5, 10, 0.02).unwrap() < base);
    }

    #[test]
    fn choose_blocks_recovers_hand_picked_volatility_plan() {
        // Optimum over the grid is exactly the hand-picked mu=538, a=11.
        let plan = choose_blocks(11853, 2, &sv_table(), 0.15, 3, core::f64::consts::SQRT_2).unwrap();
        assert_eq!((plan.a, plan.mu), (11, 538));
        assert_eq!(plan.beta_gap, 0.0);
        let pen = risk_penalty(&plan, 3, 0.15, core::f64::consts::SQRT_2, PenaltyVariant::AsPrinted)
            .unwrap();
        assert!(pen.eps <= 0.974);
    }

    #[test]
    fn independent_data_prefers_unit_blocks() {
        let plan = choose_blocks(100, 0, &MixingProfile::independent(), 0.15, 1, 1.0).unwrap();
        assert_eq!((plan.a, plan.mu), (1, 50));
    }

    #[test]
    fn no_plan_when_beta_is_one() {
        let profile = MixingProfile::table(&[(0, 1.0)]).unwrap();
        assert!(matches!(
            choose_blocks(100, 0, &profile, 0.15, 1, 1.0),
            Err(Error::InfeasiblePlan(_))
        ));
    }

    #[test]
    fn chosen_penalty_nonincreasing_in_n_when_independent() {
        let profile = MixingProfile::independent();
        let mut last = f64::INFINITY;
        for n in [20usize, 50, 100, 200, 400, 1000, 2000] {
            let plan = choose_blocks(n, 0, &profile, 0.15, 2, 1.0).unwrap();
            let pen = risk_penalty(&plan, 2, 0.15, 1.0, PenaltyVariant::AsPrinted).unwrap();
            assert!(pen.eps <= last + 1e-12, "penalty increased at n = {n}");
            last = pen.eps;
        }
    }

    proptest! {
        #[test]
        fn partition_blocks_disjoint_and_sized(
            n in 4usize..400,
            d in 0usize..5,
            a in 1usize..20,
            mu in 1usize..20,
        ) {
            prop_assume!(2 * mu * a + d <= n);
            let (u, v) = block_partition(n, d, a, mu).unwrap();
            prop_assert_eq!(u.len(), mu);
            prop_assert_eq!(v.len(), mu);
            let mut seen = vec![false; n];
            for r in u.iter().chain(v.iter()) {
                prop_assert_eq!(r.len(), a);
                prop_assert!(r.end <= 2 * mu * a);
                for i in r.clone() {
                    prop_assert!(!seen[i], "index {} assigned twice", i);
                    seen[i] = true;
                }
            }
        }

        #[test]
        fn chosen_plans_are_always_feasible(
            n in 10usize..600,
            d in 0usize..4,
            c2 in 0.05f64..2.0,
        ) {
            prop_assume!(n > d + 2);
            let profile = MixingProfile::exponential(1.0, c2, 1.0).unwrap();
            if let Ok(plan) = choose_blocks(n, d, &profile, 0.15, 2, 1.0) {
                prop_assert!(2 * plan.mu * plan.a + plan.d <= plan.n);
                prop_assert!(effective_eta(0.15, plan.mu, plan.beta_gap).is_ok());
            }
        }
    }
}
