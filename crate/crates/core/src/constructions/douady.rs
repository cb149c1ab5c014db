//! Douady's sawtooth: a `W^{1,p}` element whose `L^p` limit is 0 while its
//! derivative converges to the indicator of `[0, 1]`.
//!
//! `f_j` has `j` teeth on `[0, 1]`. Each rises with slope 1 and falls back to
//! 0 across a return zone of width `ε_j = j^{-a}`. With height `1/j − ε_j`,
//! `|f_j' − 1| = 1/(j ε_j)` on the return zones, of total length `j ε_j`, so
//!
//! ```text
//! ‖f_j' − 1_{[0,1]}‖_p^p = (j ε_j)^{1-p},      ‖f_j‖_p^p ≤ j^{-p}.
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::QuasiNormParams;
use crate::sequences::FundamentalSeq;

/// Slack on the closed form covering the quadrature error bound.
const CLOSED_FORM_SLACK: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Douady {
    #[serde(skip)]
    pub seq: FundamentalSeq,
    pub p: f64,
    pub teeth_width_exponent: f64,
}

impl Douady {
    pub fn return_width(&self, j: usize) -> f64 {
        return_width(j, self.teeth_width_exponent)
    }

    /// Bound on `‖f_j‖_p^p`.
    pub fn alpha_bound(&self, j: usize) -> f64 {
        (j as f64).powf(-self.p)
    }

    /// Closed form for `‖f_j' − 1_{[0,1]}‖_p^p`.
    pub fn delta_bound(&self, j: usize) -> f64 {
        CLOSED_FORM_SLACK * (j as f64 * self.return_width(j)).powf(1.0 - self.p)
    }

    /// The claimed derivative limit, as a constant order-0 sequence.
    pub fn plateau(&self) -> FundamentalSeq {
        FundamentalSeq::constant("1_[0,1]", plateau(), 0, *self.seq.params())
    }
}

pub fn plateau() -> PiecewisePoly {
    PiecewisePoly::boxcar(0.0, 1.0, 1.0)
}

fn return_width(j: usize, a: f64) -> f64 {
    let j = j as f64;
    j.powf(-a).min(0.5 / j)
}

pub fn douady_term(j: usize, a: f64) -> Result<PiecewisePoly> {
    if j == 0 {
        return Err(Error::InvalidParams(
            "sequences are indexed from j = 1".into(),
        ));
    }
    let eps = return_width(j, a);
    let jf = j as f64;
    let mut breakpoints = Vec::with_capacity(2 * j + 1);
    let mut pieces = Vec::with_capacity(2 * j);
    for i in 0..j {
        let start = i as f64 / jf;
        let end = (i + 1) as f64 / jf;
        let top = end - eps;
        breakpoints.push(start);
        breakpoints.push(top);
        pieces.push(vec![0.0, 1.0]);
        let height = top - start;
        pieces.push(vec![height, -height / (end - top)]);
    }
    breakpoints.push(1.0);
    PiecewisePoly::new(breakpoints, pieces)
}

pub fn douady_sequence(p: f64, teeth_width_exponent: f64) -> Result<Douady> {
    let params = QuasiNormParams::new(p, 1)?;
    if !(teeth_width_exponent > 1.0) {
        return Err(Error::InvalidParams(
            "teeth width exponent must exceed 1".into(),
        ));
    }
    let a = teeth_width_exponent;
    let seq = FundamentalSeq::new(format!("douady(a={a})"), 1, params, move |j| {
        douady_term(j, a)
    });
    Ok(Douady {
        seq,
        p,
        teeth_width_exponent,
    })
}
