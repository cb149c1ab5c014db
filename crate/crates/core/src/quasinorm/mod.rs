//! L^p and Sobolev quasi-norms for `0 < p < 1` on piecewise polynomials.
//!
//! `|q(t)|^p` is only Hölder continuous at zeros of `q`, so every piece is
//! split at its real roots and each root-adjacent end is integrated after a
//! power substitution that flattens the zero. Linear and constant pieces use
//! closed forms.

mod gauss;
mod roots;

pub use roots::isolate_roots;

use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise_poly::{PiecewisePoly, SmoothnessOrder, SMOOTHNESS_TOL};
use crate::poly;

pub const DEFAULT_TOL_REL: f64 = 1e-10;
pub const DEFAULT_MAX_SUBDIV: usize = 60;
/// Bisections allowed per integration segment.
const MAX_SPLITS: usize = 4096;
const P_POWER_FLOOR: f64 = 1e-300;
/// Endpoint values below this fraction of the segment bound are treated as
/// roots and integrated after substitution.
const NEAR_ROOT_REL: f64 = 1e-3;
const SUBSTITUTION_POWER: f64 = 4.0;
const PARALLEL_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormParams {
    pub p: f64,
    pub k: usize,
    pub tol_rel: f64,
    pub max_subdiv: usize,
}

impl QuasiNormParams {
    pub fn new(p: f64, k: usize) -> Result<Self> {
        let params = QuasiNormParams {
            p,
            k,
            tol_rel: DEFAULT_TOL_REL,
            max_subdiv: DEFAULT_MAX_SUBDIV,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParams(format!(
                "p = {} must lie in (0, 1)",
                self.p
            )));
        }
        if !(self.tol_rel > 0.0) {
            return Err(Error::InvalidParams("tol_rel must be positive".into()));
        }
        if self.max_subdiv == 0 {
            return Err(Error::InvalidParams("max_subdiv must be positive".into()));
        }
        Ok(())
    }

    pub fn with_k(&self, k: usize) -> Self {
        QuasiNormParams { k, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub p_power: f64,
    pub err_bound: f64,
}

impl NormResult {
    pub fn from_power(p_power: f64, err_bound: f64, p: f64) -> Self {
        NormResult {
            value: p_power.powf(1.0 / p),
            p_power,
            err_bound,
        }
    }

    pub fn zero() -> Self {
        NormResult {
            value: 0.0,
            p_power: 0.0,
            err_bound: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite values always serialize")
    }
}

/// `∫ |f|^p` with a certified error estimate.
pub fn lp_quasinorm(f: &PiecewisePoly, params: &QuasiNormParams) -> Result<NormResult> {
    params.validate()?;
    let p = params.p;
    if f.is_zero() {
        return Ok(NormResult::zero());
    }
    let n = f.num_pieces();
    let first_pass = |i: usize| first_estimate(&f.pieces()[i], f.width(i), p);
    let estimates: Vec<f64> = if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(first_pass).collect()
    } else {
        (0..n).map(first_pass).collect()
    };
    let estimate: f64 = estimates.iter().sum();

    let mut target = params.tol_rel * estimate.max(P_POWER_FLOOR);
    for _ in 0..4 {
        let run = |i: usize| {
            let share =
                0.5 * target * estimates[i] / estimate.max(P_POWER_FLOOR) + 0.5 * target / n as f64;
            piece_power(&f.pieces()[i], f.width(i), p, share, params.max_subdiv)
        };
        let parts: Vec<(f64, f64)> = if n >= PARALLEL_THRESHOLD {
            (0..n).into_par_iter().map(run).collect()
        } else {
            (0..n).map(run).collect()
        };
        // summation order fixed by piece index
        let (mut value, mut err) = (0.0, 0.0);
        for (v, e) in parts {
            value += v;
            err += e;
        }
        let allowed = params.tol_rel * value.max(P_POWER_FLOOR);
        if err <= allowed {
            return Ok(NormResult::from_power(value, err, p));
        }
        if target <= allowed * 1e-3 {
            return Err(Error::ToleranceNotMet {
                err_bound: err,
                target: allowed,
            });
        }
        target = target.min(allowed) / 16.0;
    }
    let value_guess = estimate.max(P_POWER_FLOOR);
    Err(Error::ToleranceNotMet {
        err_bound: target,
        target: params.tol_rel * value_guess,
    })
}

/// Sobolev quasi-norm: sum of the `p`-powers of `f, f', ..., f^(k)`.
pub fn sobolev_quasinorm(f: &PiecewisePoly, params: &QuasiNormParams) -> Result<NormResult> {
    params.validate()?;
    require_smoothness(f, params.k)?;
    sobolev_unchecked(f, params)
}

fn require_smoothness(f: &PiecewisePoly, k: usize) -> Result<()> {
    if k >= 1 {
        let required = k as i32 - 1;
        let SmoothnessOrder(found) = f.smoothness_order(SMOOTHNESS_TOL);
        if found < required {
            return Err(Error::InsufficientSmoothness { found, required });
        }
    }
    Ok(())
}

fn sobolev_unchecked(f: &PiecewisePoly, params: &QuasiNormParams) -> Result<NormResult> {
    let (mut power, mut err) = (0.0, 0.0);
    let mut g = f.clone();
    for r in 0..=params.k {
        if r > 0 {
            g = g.differentiate();
        }
        let part = lp_quasinorm(&g, params)?;
        power += part.p_power;
        err += part.err_bound;
    }
    Ok(NormResult::from_power(power, err, params.p))
}

/// Sobolev quasi-distance `‖f − g‖_{W^{k,p}}`. Smoothness is required of
/// `f` and `g`; their difference inherits it.
pub fn quasi_distance(
    f: &PiecewisePoly,
    g: &PiecewisePoly,
    params: &QuasiNormParams,
) -> Result<NormResult> {
    params.validate()?;
    require_smoothness(f, params.k)?;
    require_smoothness(g, params.k)?;
    sobolev_unchecked(&f.sub(g)?, params)
}

fn first_estimate(c: &[f64], w: f64, p: f64) -> f64 {
    match poly::degree(c) {
        None => 0.0,
        Some(0) => c[0].abs().powf(p) * w,
        Some(1) => linear_power(c[0], c[1], w, p),
        Some(_) => gauss::integrate(&|t| poly::eval_compensated(c, t).abs().powf(p), 0.0, w),
    }
}

/// Exact `∫_0^w |c0 + c1 t|^p dt`.
fn linear_power(c0: f64, c1: f64, w: f64, p: f64) -> f64 {
    if c1 == 0.0 {
        return c0.abs().powf(p) * w;
    }
    let q = p + 1.0;
    let r = -c0 / c1;
    if r > 0.0 && r < w {
        return c1.abs().powf(p) * (r.powf(q) + (w - r).powf(q)) / q;
    }
    if c0 == 0.0 {
        return c1.abs().powf(p) * w.powf(q) / q;
    }
    // no sign change on [0, w]: |c0|^p ∫ (1 + x t / w)^p with x = c1 w / c0
    let x = (c1 * w / c0).max(-1.0);
    let g = if x == 0.0 {
        1.0
    } else {
        (q * x.ln_1p()).exp_m1() / (q * x)
    };
    c0.abs().powf(p) * w * g
}

/// `(value, error estimate)` of `∫_0^w |q|^p`.
fn piece_power(c: &[f64], w: f64, p: f64, budget: f64, max_subdiv: usize) -> (f64, f64) {
    match poly::degree(c) {
        None => (0.0, 0.0),
        Some(0) => {
            let v = c[0].abs().powf(p) * w;
            (v, 4.0 * f64::EPSILON * v)
        }
        Some(1) => {
            let v = linear_power(c[0], c[1], w, p);
            (v, 16.0 * f64::EPSILON * v)
        }
        Some(_) => {
            let mut points = vec![0.0];
            points.extend(
                isolate_roots(c, 0.0, w)
                    .into_iter()
                    .filter(|&r| r > 0.0 && r < w),
            );
            points.push(w);
            let share = budget / (points.len() - 1) as f64;
            let integrand = Integrand { c, p, max_subdiv };
            let (mut value, mut err) = (0.0, 0.0);
            for seg in points.windows(2) {
                let (v, e) = integrand.segment(seg[0], seg[1], share);
                value += v;
                err += e;
            }
            (value, err)
        }
    }
}

struct Integrand<'a> {
    c: &'a [f64],
    p: f64,
    max_subdiv: usize,
}

impl Integrand<'_> {
    fn at(&self, t: f64) -> f64 {
        poly::eval_compensated(self.c, t).abs().powf(self.p)
    }

    fn gl(&self, a: f64, b: f64) -> f64 {
        gauss::integrate(&|t| self.at(t), a, b)
    }

    fn segment(&self, a: f64, b: f64, budget: f64) -> (f64, f64) {
        let bound = poly::abs_bound(self.c, a, b);
        let near_a = poly::eval_compensated(self.c, a).abs() <= NEAR_ROOT_REL * bound;
        let near_b = poly::eval_compensated(self.c, b).abs() <= NEAR_ROOT_REL * bound;
        match (near_a, near_b) {
            (false, false) => self.adaptive(a, b, self.gl(a, b), budget, 0),
            (true, false) => self.graded(a, b, budget),
            (false, true) => self.graded(b, a, budget),
            (true, true) => {
                let m = 0.5 * (a + b);
                let (v1, e1) = self.graded(a, m, 0.5 * budget);
                let (v2, e2) = self.graded(b, m, 0.5 * budget);
                (v1 + v2, e1 + e2)
            }
        }
    }

    /// Integral over the interval between `root` and `other` (either order)
    /// after the substitution `x = root + (other − root)·s^m`, which turns
    /// the algebraic zero `|x − root|^{jp}` into the smooth weight
    /// `s^{m(jp+1)−1}` on `s ∈ [0, 1]`.
    fn graded(&self, root: f64, other: f64, budget: f64) -> (f64, f64) {
        let len = other - root;
        let m = SUBSTITUTION_POWER;
        let g = |s: f64| {
            let sm1 = s.powi(m as i32 - 1);
            m * sm1 * len.abs() * self.at(root + len * sm1 * s)
        };
        let whole = gauss::integrate(&g, 0.0, 1.0);
        adaptive(
            &g,
            0.0,
            1.0,
            whole,
            budget,
            0,
            self.max_subdiv,
            &Cell::new(MAX_SPLITS),
        )
    }

    fn adaptive(&self, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> (f64, f64) {
        adaptive(
            &|t| self.at(t),
            a,
            b,
            whole,
            tol,
            depth,
            self.max_subdiv,
            &Cell::new(MAX_SPLITS),
        )
    }
}

/// Adaptive Gauss–Legendre with the two-half-panel error estimate, at most
/// `splits_left` bisections in total.
#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    max_depth: usize,
    splits_left: &Cell<usize>,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let left = gauss::integrate(f, a, m);
    let right = gauss::integrate(f, m, b);
    let refined = left + right;
    let diff = (refined - whole).abs();
    let tol = tol.max(8.0 * f64::EPSILON * refined.abs());
    if diff <= tol || depth >= max_depth || m <= a || m >= b || splits_left.get() == 0 {
        return (refined, diff);
    }
    splits_left.set(splits_left.get() - 1);
    let (v1, e1) = adaptive(f, a, m, left, 0.5 * tol, depth + 1, max_depth, splits_left);
    let (v2, e2) = adaptive(f, m, b, right, 0.5 * tol, depth + 1, max_depth, splits_left);
    (v1 + v2, e1 + e2)
}
