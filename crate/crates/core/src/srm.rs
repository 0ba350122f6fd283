//! Bound-based model selection: rank heterogeneous candidates by their
//! total risk bound and pick the smallest.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bounds::{risk_bound, BoundInputs, BoundReport, PenaltyVariant};
use crate::mixing::BlockingPlan;
use crate::{Error, Result};

/// One candidate model: its in-sample numbers, capacity, and blocking plan.
///
/// Each candidate carries its own plan because the memory d differs across
/// candidates and with it the feasible (mu, a).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub train_err: f64,
    pub delta_d: f64,
    pub vcd: u32,
    pub plan: BlockingPlan,
    /// Optional likelihood information for the AIC comparison column.
    pub neg_loglik: Option<f64>,
    pub n_params: Option<u32>,
}

/// A ranked candidate with its refreshed bound report.
#[derive(Debug, Clone)]
pub struct RankedCandidate {
    pub candidate: Candidate,
    pub report: BoundReport,
    /// AIC difference against the named baseline, when both sides carry
    /// likelihood information.
    pub aic_delta: Option<f64>,
    pub selected: bool,
}

/// Selection output: rows sorted ascending by total bound.
#[derive(Debug, Clone)]
pub struct SrmTable {
    pub rows: Vec<RankedCandidate>,
    /// True when every candidate's penalty saturated; the winner is still
    /// the smallest total but its guarantee is vacuous.
    pub all_trivial: bool,
}

impl SrmTable {
    pub fn winner(&self) -> &RankedCandidate {
        &self.rows[0]
    }
}

/// Akaike information criterion, 2 * neg_loglik + 2 * n_params.
pub fn aic(neg_loglik: f64, n_params: u32) -> f64 {
    2.0 * neg_loglik + 2.0 * n_params as f64
}

/// Ranks candidates by total risk bound (ascending), deterministic
/// tie-break by smaller capacity then name, and marks the winner.
pub fn srm_select(
    candidates: &[Candidate],
    eta: f64,
    m: f64,
    variant: PenaltyVariant,
    aic_baseline: Option<&str>,
) -> Result<SrmTable> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("selection needs at least one candidate".to_string()));
    }

    let baseline_aic = aic_baseline.and_then(|base| {
        candidates
            .iter()
            .find(|c| c.name == base)
            .and_then(|c| Some(aic(c.neg_loglik?, c.n_params?)))
    });

    let mut rows: Vec<RankedCandidate> = candidates
        .iter()
        .map(|c| {
            let inputs = BoundInputs {
                plan: c.plan,
                vcd: c.vcd,
                eta,
                m,
                train_err: c.train_err,
                delta_d: c.delta_d,
            };
            let report = risk_bound(&inputs, variant)?;
            let aic_delta = match (baseline_aic, c.neg_loglik, c.n_params) {
                (Some(base), Some(nll), Some(k)) => Some(aic(nll, k) - base),
                _ => None,
            };
            Ok(RankedCandidate {
                candidate: c.clone(),
                report,
                aic_delta,
                selected: false,
            })
        })
        .collect::<Result<_>>()?;

    rows.sort_by(|a, b| {
        a.report
            .total_bound
            .partial_cmp(&b.report.total_bound)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.candidate.vcd.cmp(&b.candidate.vcd))
            .then(a.candidate.name.cmp(&b.candidate.name))
    });
    rows[0].selected = true;
    let all_trivial = rows.iter().all(|r| r.report.trivial);
    Ok(SrmTable { rows, all_trivial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn table_one_candidates() -> Vec<Candidate> {
        let plan_d2 = BlockingPlan::new(11853, 2, 11, 538, 0.0).unwrap();
        let plan_d0 = BlockingPlan::new(11853, 0, 9, 658, 0.0).unwrap();
        vec![
            Candidate {
                name: "SV".to_string(),
                train_err: 3.333,
                delta_d: 2.73,
                vcd: 3,
                plan: plan_d2,
                neg_loglik: Some(-1500.0),
                n_params: Some(3),
            },
            Candidate {
                name: "AR(2)".to_string(),
                train_err: 3.54,
                delta_d: 0.0,
                vcd: 3,
                plan: plan_d2,
                neg_loglik: Some(-200.0),
                n_params: Some(3),
            },
            Candidate {
                name: "Mean".to_string(),
                train_err: 3.65,
                delta_d: 0.0,
                vcd: 1,
                plan: plan_d0,
                neg_loglik: Some(-30.0),
                n_params: Some(1),
            },
        ]
    }

    #[test]
    fn mean_wins_the_volatility_comparison() {
        let m = core::f64::consts::SQRT_2;
        let table =
            srm_select(&table_one_candidates(), 0.15, m, PenaltyVariant::AsPrinted, Some("Mean"))
                .unwrap();
        assert_eq!(table.winner().candidate.name, "Mean");
        assert_abs_diff_eq!(table.winner().report.total_bound, 4.24, epsilon = 0.01);
        assert_eq!(table.rows[1].candidate.name, "AR(2)");
        assert_eq!(table.rows[2].candidate.name, "SV");
        assert!(!table.all_trivial);
        // AIC deltas are relative to the Mean row: zero for itself,
        // negative for the better-likelihood models.
        assert_eq!(table.rows[0].aic_delta, Some(0.0));
        assert!(table.rows[2].aic_delta.unwrap() < 0.0);
    }

    #[test]
    fn ranking_invariant_to_input_order() {
        let m = core::f64::consts::SQRT_2;
        let mut rev = table_one_candidates();
        rev.reverse();
        let a = srm_select(&table_one_candidates(), 0.15, m, PenaltyVariant::AsPrinted, None)
            .unwrap();
        let b = srm_select(&rev, 0.15, m, PenaltyVariant::AsPrinted, None).unwrap();
        let names_a: Vec<_> = a.rows.iter().map(|r| r.candidate.name.clone()).collect();
        let names_b: Vec<_> = b.rows.iter().map(|r| r.candidate.name.clone()).collect();
        assert_eq!(names_a, names_b);
    }

    #[test]
    fn winner_minimizes_total_bound_and_rerun_is_fixed_point() {
        let m = core::f64::consts::SQRT_2;
        let table = srm_select(&table_one_candidates(), 0.15, m, PenaltyVariant::AsPrinted, None)
            .unwrap();
        let best = table.winner().report.total_bound;
        for row in &table.rows {
            assert!(best <= row.report.total_bound);
        }
        let again_input: Vec<Candidate> =
            table.rows.iter().map(|r| r.candidate.clone()).collect();
        let again = srm_select(&again_input, 0.15, m, PenaltyVariant::AsPrinted, None).unwrap();
        for (x, y) in table.rows.iter().zip(again.rows.iter()) {
            assert_eq!(x.candidate.name, y.candidate.name);
            assert_eq!(x.report.total_bound, y.report.total_bound);
        }
    }

    #[test]
    fn single_candidate_selects_itself() {
        let c = table_one_candidates().remove(2);
        let t = srm_select(&[c.clone()], 0.15, 1.0, PenaltyVariant::AsPrinted, None).unwrap();
        assert_eq!(t.winner().candidate.name, c.name);
        assert!(t.winner().selected);
    }

    #[test]
    fn smaller_capacity_wins_between_twins() {
        let plan = BlockingPlan::new(1000, 0, 1, 500, 0.0).unwrap();
        let mk = |name: &str, vcd: u32| Candidate {
            name: name.to_string(),
            train_err: 1.0,
            delta_d: 0.0,
            vcd,
            plan,
            neg_loglik: None,
            n_params: None,
        };
        let t = srm_select(
            &[mk("big", 5), mk("small", 2)],
            0.15,
            1.0,
            PenaltyVariant::AsPrinted,
            None,
        )
        .unwrap();
        assert_eq!(t.winner().candidate.name, "small");
    }

    #[test]
    fn all_trivial_candidates_still_produce_a_winner() {
        let plan = BlockingPlan::new(12, 0, 1, 2, 0.0).unwrap();
        let c = Candidate {
            name: "tiny".to_string(),
            train_err: 0.5,
            delta_d: 0.0,
            vcd: 8,
            plan,
            neg_loglik: None,
            n_params: None,
        };
        let t = srm_select(&[c], 0.15, 1.0, PenaltyVariant::AsPrinted, None).unwrap();
        assert!(t.all_trivial);
        assert!(t.winner().report.trivial);
    }

    #[test]
    fn aic_arithmetic() {
        assert_eq!(aic(10.0, 3), 26.0);
        // equal likelihood, one extra parameter: +2
        assert_eq!(aic(10.0, 4) - aic(10.0, 3), 2.0);
    }
}
