//! The section `γ : W^{k-1,p} → W^{k,p}` of the termwise derivative.
//!
//! Term `j`: remove the mass of `g_j` with a unit bump, integrate, and
//! subtract a β-approximation of the primitive that is `1/j`-close in `L^p`
//! with `1/j`-small derivatives. What remains has derivative close to `g_j`
//! and is itself small in `L^p`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::constructions::beta::{beta_term_with_budget, BetaTerm, MAX_DEPTH};
use crate::constructions::psi::psi_with_budget;
use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::{lp_quasinorm, NormResult, QuasiNormParams};
use crate::sequences::{cauchy_report, CauchyProbe, FundamentalSeq};

/// Budget for the `W^{k-1,p}` `p`-power of the mass-removing bump at term `j`.
pub fn mean_zero_budget(j: usize) -> f64 {
    (j as f64).powi(-3)
}

/// Tolerance on `∫ g̃_j`, relative to `max(1, |∫ g_j|)`.
const MEAN_TOL: f64 = 1e-10;

/// `g̃_j = g_j − (∫g_j) ψ_j`: same limit, every term of mean zero.
pub fn mean_zero_correct(g: &FundamentalSeq) -> FundamentalSeq {
    let k = g.space_order() + 1;
    let params = *g.params();
    g.map(
        format!("mz({})", g.label()),
        g.space_order(),
        move |j, gj| {
            let mass = gj.total_integral();
            if mass == 0.0 {
                return Ok(gj.clone());
            }
            let psi = psi_with_budget(mean_zero_budget(j), k, &params)?;
            gj.linear_combination(1.0, &psi.bump, -mass)
        },
    )
}

/// Fit tolerance `j^{-exponent}` of the section's term `j`. The exponent
/// `1` is the classical choice.
pub fn fit_tolerance(j: usize, exponent: f64) -> f64 {
    (j as f64).powf(-exponent)
}

pub const CLASSICAL_FIT_EXPONENT: f64 = 1.0;

/// Smallest grid depth `n` at which term `n` of `β(u)` is within `tol` of
/// `u` in `L^p` and has `‖v'‖_{W^{k-1,p}} < tol` (both as quasi-norms, not
/// `p`-powers).
pub fn beta_fit(
    u: &PiecewisePoly,
    tol: f64,
    k: usize,
    params: &QuasiNormParams,
) -> Result<(BetaTerm, NormResult)> {
    let p = params.p;
    let limit = tol.powf(p);
    let l0 = params.with_k(0);
    let mut last_err = None;
    for n in 1..=MAX_DEPTH {
        let budget = (1.0 / n as f64).min(0.5 * limit);
        let term = match beta_term_with_budget(u, n, k, params, budget) {
            Ok(t) => t,
            Err(e @ Error::BudgetUnreachable { .. }) => {
                last_err = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let cost = term.derivative_cost;
        if cost.p_power + cost.err_bound >= limit {
            continue;
        }
        let dist = lp_quasinorm(&term.v.sub(u)?, &l0)?;
        if dist.p_power + dist.err_bound < limit {
            return Ok((term, dist));
        }
    }
    Err(last_err.unwrap_or(Error::BudgetUnreachable {
        budget: limit,
        reason: format!("no grid depth up to {MAX_DEPTH} met tolerance {tol:e}"),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionTerm {
    pub j: usize,
    /// Grid depth chosen for the β-approximation.
    pub n: usize,
    pub mass_removed: f64,
    /// `‖u_j − ũ_j‖_p = ‖f_j‖_p`.
    pub residual: NormResult,
    /// `‖ũ_j'‖_{W^{k-1,p}}` as a `p`-power.
    pub derivative_cost: NormResult,
    /// Slack between the certified bound and the quasi-norm:
    /// `(p_power + err_bound)^{1/p} − value`.
    pub tail: f64,
    #[serde(skip)]
    pub f: PiecewisePoly,
}

#[derive(Debug, Clone)]
pub struct DeltaSection {
    pub seq: FundamentalSeq,
    terms: Arc<Mutex<BTreeMap<usize, Arc<SectionTerm>>>>,
}

impl DeltaSection {
    /// Construction record of term `j` (forcing it if needed).
    pub fn record(&self, j: usize) -> Result<Arc<SectionTerm>> {
        self.seq.term(j)?;
        Ok(self.terms.lock().expect("record lock")[&j].clone())
    }
}

pub fn section_term(
    g_tilde_j: &PiecewisePoly,
    mass: f64,
    j: usize,
    k: usize,
    exponent: f64,
    params: &QuasiNormParams,
) -> Result<SectionTerm> {
    let tol_mean = MEAN_TOL * mass.abs().max(1.0);
    let u = g_tilde_j.antiderivative_with_tol(tol_mean)?;
    let (beta, residual) = beta_fit(&u, fit_tolerance(j, exponent), k, params)?;
    let f = u.sub(&beta.v)?;
    let tail = (residual.p_power + residual.err_bound).powf(1.0 / params.p) - residual.value;
    Ok(SectionTerm {
        j,
        n: beta.n,
        mass_removed: mass,
        residual,
        derivative_cost: beta.derivative_cost,
        tail,
        f,
    })
}

/// `γ(g)` for an order-`(k−1)` sequence `g`, after checking that `g` looks
/// Cauchy under `probe`.
pub fn delta_section(g: &FundamentalSeq, k: usize, probe: &CauchyProbe) -> Result<DeltaSection> {
    delta_section_with_tolerance(g, k, probe, CLASSICAL_FIT_EXPONENT)
}

/// `γ(g)` with term `j` fitted to `j^{-exponent}` instead of `1/j`.
pub fn delta_section_with_tolerance(
    g: &FundamentalSeq,
    k: usize,
    probe: &CauchyProbe,
    exponent: f64,
) -> Result<DeltaSection> {
    if k == 0 || g.space_order() + 1 != k {
        return Err(Error::InvalidParams(format!(
            "γ maps order {} to order {}, not {k}",
            g.space_order(),
            g.space_order() + 1
        )));
    }
    let report = cauchy_report(g, k - 1, probe)?;
    if !report.verdict {
        return Err(Error::NotCauchy {
            label: g.label().to_string(),
            order: k - 1,
        });
    }
    Ok(delta_section_unchecked(g, k, exponent))
}

/// `γ(g)` without the Cauchy diagnosis.
pub fn delta_section_unchecked(g: &FundamentalSeq, k: usize, exponent: f64) -> DeltaSection {
    let params = *g.params();
    let terms: Arc<Mutex<BTreeMap<usize, Arc<SectionTerm>>>> = Arc::default();
    let store = terms.clone();
    let src = g.clone();
    let corrected = mean_zero_correct(g);
    let seq = FundamentalSeq::new(format!("γ({})", g.label()), k, params, move |j| {
        let mass = src.term(j)?.total_integral();
        let g_tilde = corrected.term(j)?;
        let term = section_term(&g_tilde, mass, j, k, exponent, &params)?;
        let f = term.f.clone();
        store.lock().expect("record lock").insert(j, Arc::new(term));
        Ok(f)
    });
    DeltaSection { seq, terms }
}
