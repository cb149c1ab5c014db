//! The isomorphism `W^{k,p} ≅ L^p ⊕ W^{k-1,p}`, `f ↦ (αf, δf)`, and its
//! inverse `(g, h) ↦ f₀ − β(αf₀ − g)` with `f₀ = γ(h)`.
//!
//! Compositions are assembled termwise at matched depths: term `j` of the
//! result only uses term `j` of each constituent, and β enters through the
//! grid depth `n(j)` that brings the approximation within `j^{-2}`. With the
//! classical `1/j` the composed sequences converge like `2^{1/p}/j`, too
//! slowly to be told apart from non-convergent ones at moderate depth.

use crate::constructions::section::{beta_fit, delta_section_with_tolerance, fit_tolerance};
use crate::error::{Error, Result};
use crate::sequences::{cauchy_report, delta_map, CauchyProbe, FundamentalSeq};

pub const ISO_FIT_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct IsoPair {
    /// Order-0 component, a representative sequence of `αf`.
    pub g_part: FundamentalSeq,
    /// Order-`(k−1)` component `δf`.
    pub h_part: FundamentalSeq,
}

impl IsoPair {
    pub fn new(g_part: FundamentalSeq, h_part: FundamentalSeq) -> Result<Self> {
        if g_part.space_order() != 0 {
            return Err(Error::InvalidParams("g_part must have order 0".into()));
        }
        Ok(IsoPair { g_part, h_part })
    }

    /// `k` such that the pair lives in `L^p ⊕ W^{k-1,p}`.
    pub fn order(&self) -> usize {
        self.h_part.space_order() + 1
    }
}

fn ensure_cauchy(f: &FundamentalSeq, order: usize, probe: &CauchyProbe) -> Result<()> {
    if cauchy_report(f, order, probe)?.verdict {
        Ok(())
    } else {
        Err(Error::NotCauchy {
            label: f.label().to_string(),
            order,
        })
    }
}

/// `f ↦ (αf, δf)`.
pub fn iso_forward(f: &FundamentalSeq, probe: &CauchyProbe) -> Result<IsoPair> {
    if f.space_order() == 0 {
        return Err(Error::OrderZero);
    }
    ensure_cauchy(f, f.space_order(), probe)?;
    let g_part = f.with_order(0).relabel(format!("α({})", f.label()));
    let h_part = delta_map(f)?;
    IsoPair::new(g_part, h_part)
}

/// `(g, h) ↦ γ(h) − β(αγ(h) − g)`, an order-`k` sequence.
pub fn iso_inverse(pair: &IsoPair, k: usize, probe: &CauchyProbe) -> Result<FundamentalSeq> {
    if k != pair.order() {
        return Err(Error::InvalidParams(format!(
            "pair has h_part of order {}, expected {}",
            pair.h_part.space_order(),
            k.saturating_sub(1)
        )));
    }
    ensure_cauchy(&pair.g_part, 0, probe)?;
    let f0 = delta_section_with_tolerance(&pair.h_part, k, probe, ISO_FIT_EXPONENT)?.seq;
    let g = pair.g_part.clone();
    let params = *f0.params();
    let label = format!("iso⁻¹({}, {})", pair.g_part.label(), pair.h_part.label());
    Ok(FundamentalSeq::new(label, k, params, move |j| {
        let f0j = f0.term(j)?;
        let x = f0j.sub(&*g.term(j)?)?;
        let (beta, _) = beta_fit(&x, fit_tolerance(j, ISO_FIT_EXPONENT), k, &params)?;
        f0j.sub(&beta.v)
    }))
}
