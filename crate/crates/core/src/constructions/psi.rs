//! Unit-mass bumps with small Sobolev quasi-norm.
//!
//! `ψ` is a plateau of height `H` on `[0, 1/H]`, so `∫ψ = 1` exactly while
//! `‖ψ‖_p^p ≈ H^{p-1}` is small. For `k ≥ 2` both jumps are smoothed by
//! order-`k−1` transitions on a dyadic ladder whose widths are solved from
//! the closed-form transition costs.

use serde::Serialize;

use crate::constructions::ladder::{pow2_floor, smoothed_staircase, ScaleLadder};
use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::{sobolev_quasinorm, NormResult, QuasiNormParams};

const MASS_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;
/// Candidate fractions of the budget spent on the function itself; the rest
/// is shared equally between the derivative orders.
const VALUE_SHARES: [f64; 4] = [0.5, 0.75, 0.9, 0.97];

#[derive(Debug, Clone, Serialize)]
pub struct PsiBump {
    #[serde(skip)]
    pub bump: PiecewisePoly,
    pub k: usize,
    pub p: f64,
    pub budget: f64,
    pub height: f64,
    pub ladder: Option<ScaleLadder>,
    pub integral: f64,
    /// Order-(k−1) Sobolev quasi-norm, measured after construction.
    pub measured: NormResult,
}

/// `ψ_j` with `∫ψ_j = 1` and order-`(k−1)` `p`-power at most `2^{-j}`.
pub fn psi_bump(j: usize, k: usize, params: &QuasiNormParams) -> Result<PsiBump> {
    if j == 0 || k == 0 {
        return Err(Error::InvalidParams(
            "psi_bump needs j ≥ 1 and k ≥ 1".into(),
        ));
    }
    psi_with_budget(0.5f64.powi(j as i32), k, params)
}

/// A `C^{k-2}` (piecewise continuous for `k = 1`) unit-mass bump whose
/// `W^{k-1,p}` `p`-power is at most `budget`.
pub fn psi_with_budget(budget: f64, k: usize, params: &QuasiNormParams) -> Result<PsiBump> {
    params.validate()?;
    if k == 0 || !(budget > 0.0) {
        return Err(Error::InvalidParams(
            "psi needs k ≥ 1 and a positive budget".into(),
        ));
    }
    let p = params.p;
    let m = k - 1;
    let norm_params = params.with_k(m);

    let (height, ladder) = if m == 0 {
        (height_for(budget, 1.0, p)?, None)
    } else {
        let mut best: Option<(f64, ScaleLadder)> = None;
        let mut last_err = None;
        for share in VALUE_SHARES {
            match design(budget, share, m, p) {
                Ok((h, l)) => {
                    let better = best
                        .as_ref()
                        .is_none_or(|(bh, bl)| l.innermost() * h > bl.innermost() * bh);
                    if better {
                        best = Some((h, l));
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
        match best {
            Some((h, l)) => (h, Some(l)),
            None => return Err(last_err.expect("at least one share tried")),
        }
    };

    let length = 1.0 / height;
    let mut ladder = ladder;
    for _ in 0..MAX_HALVINGS {
        let bump = match &ladder {
            None => PiecewisePoly::boxcar(0.0, length, height),
            Some(l) => {
                l.check_floor(length + l.widths()[0])?;
                smoothed_staircase(&[0.0, length], &[height], l.widths())?
            }
        };
        let integral = bump.total_integral();
        if (integral - 1.0).abs() > MASS_TOL {
            return Err(Error::BudgetUnreachable {
                budget,
                reason: format!("mass {integral} lost to rounding"),
            });
        }
        let measured = sobolev_quasinorm(&bump, &norm_params)?;
        if measured.p_power <= budget {
            return Ok(PsiBump {
                bump,
                k,
                p,
                budget,
                height,
                ladder,
                integral,
                measured,
            });
        }
        match ladder {
            Some(l) => ladder = Some(l.halved()),
            None => {
                return Err(Error::BudgetUnreachable {
                    budget,
                    reason: format!("box of height {height:e} measures {:e}", measured.p_power),
                })
            }
        }
    }
    Err(Error::BudgetUnreachable {
        budget,
        reason: "verification kept failing after halving the ladder".into(),
    })
}

/// Smallest power-of-two height with `slack · H^{p-1} ≤ share·budget`.
fn height_for(budget: f64, slack: f64, p: f64) -> Result<f64> {
    let h = (budget / slack).powf(-1.0 / (1.0 - p));
    let mut h2 = 1.0 / pow2_floor(1.0 / h);
    if !h2.is_finite() || h2 == 0.0 || !(1.0 / h2).is_normal() {
        return Err(Error::BudgetUnreachable {
            budget,
            reason: format!("height {h:e} is not representable"),
        });
    }
    while slack * h2.powf(p - 1.0) > budget {
        h2 *= 2.0;
    }
    Ok(h2)
}

fn design(budget: f64, share: f64, m: usize, p: f64) -> Result<(f64, ScaleLadder)> {
    // the transitions widen the support by at most 1/(4H): value cost ≤ 1.25 H^{p-1}
    let height = height_for(share * budget, 1.25, p)?;
    let length = 1.0 / height;
    let per_order = vec![(1.0 - share) * budget / m as f64; m];
    let jump_mass = 2.0 * height.powf(p);
    let ladder = ScaleLadder::design(m, jump_mass, &per_order, 0.25 * length, p)?;
    ladder.check_floor(length + ladder.widths()[0])?;
    Ok((height, ladder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise_poly::SmoothnessOrder;

    #[test]
    fn unsmoothed_spike_for_k1() {
        let params = QuasiNormParams::new(0.5, 0).unwrap();
        for j in 1..=6 {
            let psi = psi_bump(j, 1, &params).unwrap();
            assert!(psi.ladder.is_none());
            assert_eq!(psi.integral, 1.0);
            assert!(psi.measured.p_power <= 0.5f64.powi(j as i32));
            // p_power = H^{p-1} for a box of height H and width 1/H
            assert!((psi.measured.p_power - psi.height.powf(-0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothed_bumps_have_the_right_class() {
        for k in 2..=3 {
            let params = QuasiNormParams::new(0.3, 0).unwrap();
            let psi = psi_bump(4, k, &params).unwrap();
            assert!(psi.bump.smoothness_order(1e-6) >= SmoothnessOrder(k as i32 - 2));
            assert!((psi.integral - 1.0).abs() <= 1e-10);
            assert!(psi.measured.p_power <= 1.0 / 16.0);
        }
    }

    #[test]
    fn impossible_budget_is_reported() {
        let params = QuasiNormParams::new(0.7, 0).unwrap();
        assert!(matches!(
            psi_bump(30, 3, &params),
            Err(Error::BudgetUnreachable { .. })
        ));
    }
}
