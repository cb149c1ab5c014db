//! The retraction `β : L^p → W^{k,p}` with `α∘β = id` and `δ∘β = 0`.
//!
//! Term `n` of `β(u)` is the step function of cell averages of `u` on `2^n`
//! equal cells of its support, with every jump replaced by an order-`k`
//! transition on a ladder fine enough that
//! `Σ_{r=1}^{k} ‖v_n^{(r)}‖_p^p ≤ 1/n`. Each derivative only sees the jumps
//! through `Σ|Δ_i|^p` times the cost of one unit transition, and that cost
//! tends to 0 with the widths because `p < 1`.

use serde::Serialize;

use crate::constructions::ladder::{smoothed_staircase, unit_profile, ScaleLadder};
use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::poly;
use crate::quasinorm::{lp_quasinorm, NormResult, QuasiNormParams};
use crate::sequences::FundamentalSeq;

/// Fraction of the `1/n` derivative budget handed to the ladder design.
const DESIGN_SHARE: f64 = 0.5;
const MAX_HALVINGS: usize = 20;
/// Largest supported grid depth (`2^n` cells).
pub const MAX_DEPTH: usize = 24;

#[derive(Debug, Clone, Serialize)]
pub struct BetaTerm {
    #[serde(skip)]
    pub v: PiecewisePoly,
    pub n: usize,
    pub k: usize,
    pub ladder: Option<ScaleLadder>,
    /// `Σ |Δ_i|^p` over the jumps of the step function.
    pub jump_mass: f64,
    /// Analytic bound on `‖v_n − u‖_p^p`.
    pub step_error_bound: f64,
    /// `Σ_{r=1}^{k} ‖v_n^{(r)}‖_p^p`, measured as the jump mass times the
    /// quadrature of each unit-transition derivative.
    pub derivative_cost: NormResult,
}

/// Cell averages and deviation bounds `sup_cell |u − average|`.
fn cell_statistics(u: &PiecewisePoly, nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let bps = u.breakpoints();
    let cells = nodes.len() - 1;
    let mut levels = Vec::with_capacity(cells);
    let mut devs = Vec::with_capacity(cells);
    let mut first = 0;
    for c in 0..cells {
        let (lo, hi) = (nodes[c], nodes[c + 1]);
        while first + 1 < bps.len() - 1 && bps[first + 1] <= lo {
            first += 1;
        }
        let mut parts: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut mass = 0.0;
        let mut i = first;
        while i < u.num_pieces() && bps[i] < hi {
            let a = bps[i].max(lo);
            let b = bps[i + 1].min(hi);
            if b > a {
                let local = poly::shift(&u.pieces()[i], a - bps[i]);
                mass += poly::integral(&local, b - a);
                parts.push((local, b - a));
            }
            i += 1;
        }
        let level = mass / (hi - lo);
        let mut dev: f64 = if parts.iter().map(|p| p.1).sum::<f64>() < hi - lo {
            level.abs()
        } else {
            0.0
        };
        for (mut c, w) in parts {
            c[0] -= level;
            dev = dev.max(poly::abs_bound(&c, 0.0, w));
        }
        levels.push(level);
        devs.push(dev);
    }
    (levels, devs)
}

fn jumps(levels: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels.len() + 1);
    let mut prev = 0.0;
    for &l in levels {
        out.push(l - prev);
        prev = l;
    }
    out.push(-prev);
    out
}

/// `Σ_{r=1}^{k} ∫|T^{(r)}|^p` for the unit transition on `widths`, one entry per order.
fn unit_costs(widths: &[f64], params: &QuasiNormParams) -> Result<Vec<NormResult>> {
    let profile = unit_profile(widths);
    let t = PiecewisePoly::new(profile.offsets, profile.pieces)?;
    let mut d = t;
    let mut out = Vec::with_capacity(widths.len());
    for _ in 0..widths.len() {
        d = d.differentiate();
        out.push(lp_quasinorm(&d, &params.with_k(0))?);
    }
    Ok(out)
}

pub fn beta_term(
    u: &PiecewisePoly,
    n: usize,
    k: usize,
    params: &QuasiNormParams,
) -> Result<BetaTerm> {
    beta_term_with_budget(u, n, k, params, 1.0 / n as f64)
}

/// Term `n` with `Σ_{r=1}^{k} ‖v^{(r)}‖_p^p ≤ budget`.
pub fn beta_term_with_budget(
    u: &PiecewisePoly,
    n: usize,
    k: usize,
    params: &QuasiNormParams,
    budget: f64,
) -> Result<BetaTerm> {
    params.validate()?;
    if n == 0 || n > MAX_DEPTH {
        return Err(Error::InvalidParams(format!(
            "grid depth {n} outside 1..={MAX_DEPTH}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParams("β needs k ≥ 1".into()));
    }
    if !(budget > 0.0) {
        return Err(Error::InvalidParams(
            "derivative budget must be positive".into(),
        ));
    }
    let p = params.p;
    if u.is_zero() {
        return Ok(BetaTerm {
            v: PiecewisePoly::zero(),
            n,
            k,
            ladder: None,
            jump_mass: 0.0,
            step_error_bound: 0.0,
            derivative_cost: NormResult::zero(),
        });
    }
    let (a, b) = u.support();
    let cells = 1usize << n;
    let h = (b - a) / cells as f64;
    let nodes: Vec<f64> = (0..=cells)
        .map(|i| a + (b - a) * (i as f64 / cells as f64))
        .collect();
    let (levels, devs) = cell_statistics(u, &nodes);
    let deltas = jumps(&levels);
    let jump_mass: f64 = deltas.iter().map(|d| d.abs().powf(p)).sum();
    let magnitude = a.abs().max(b.abs()) + h;

    let limit = budget;
    let budgets = vec![DESIGN_SHARE * limit / k as f64; k];
    let mut ladder =
        ScaleLadder::design(k, jump_mass.max(f64::MIN_POSITIVE), &budgets, 0.25 * h, p)?;
    for _ in 0..MAX_HALVINGS {
        ladder.check_floor(magnitude)?;
        let costs = unit_costs(ladder.widths(), params)?;
        let power: f64 = costs.iter().map(|c| c.p_power).sum::<f64>() * jump_mass;
        let err: f64 = costs.iter().map(|c| c.err_bound).sum::<f64>() * jump_mass;
        if power + err <= limit {
            let v = smoothed_staircase(&nodes, &levels, ladder.widths())?;
            let zone = ladder.widths()[0] + ladder.innermost();
            let mut step_error_bound: f64 = devs.iter().map(|d| d.powf(p) * h).sum();
            for (i, d) in deltas.iter().enumerate() {
                let left = if i > 0 { devs[i - 1] } else { 0.0 };
                let right = devs.get(i).copied().unwrap_or(0.0);
                step_error_bound += (d.abs() + left.max(right)).powf(p) * zone;
            }
            return Ok(BetaTerm {
                v,
                n,
                k,
                ladder: Some(ladder),
                jump_mass,
                step_error_bound,
                derivative_cost: NormResult::from_power(power, err, p),
            });
        }
        ladder = ladder.halved();
    }
    Err(Error::BudgetUnreachable {
        budget: limit,
        reason: "derivative cost stayed above budget after halving the ladder".into(),
    })
}

/// `β(u)` as an order-`k` fundamental sequence indexed by the grid depth.
pub fn beta_retraction(
    u: &PiecewisePoly,
    k: usize,
    params: &QuasiNormParams,
) -> Result<FundamentalSeq> {
    params.validate()?;
    if k == 0 {
        return Err(Error::InvalidParams("β needs k ≥ 1".into()));
    }
    let u = u.clone();
    let p = *params;
    Ok(FundamentalSeq::new("β(u)", k, *params, move |n| {
        Ok(beta_term(&u, n, k, &p)?.v)
    }))
}
