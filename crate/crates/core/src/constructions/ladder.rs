//! Steep polynomial transitions on nested dyadic scales.
//!
//! A transition of order `m` rises monotonically from 0 to 1 over `[0, ε]`
//! and is `C^{m-1}` with all derivatives of order `1..m` vanishing at both
//! ends. It is built recursively: its derivative is a plateau bump whose two
//! flanks are order-`m−1` transitions on the next, smaller width. The `r`-th
//! derivative therefore lives on `2^{r-1}` zones of width `widths[r-1]` and
//! is bounded by `Π_{q<r} 1/(widths[q] − widths[q+1])`, which gives the cost
//!
//! ```text
//! ∫ |T^{(r)}|^p  ≤  2^{r-1} · widths[r-1] · Π_{q<r} (widths[q] − widths[q+1])^{-p}
//! ```
//!
//! for a unit jump; a jump `Δ` multiplies it by `|Δ|^p`. Each order picks up
//! a fresh factor `widths[r-1]^{1-p}`, which tends to 0 with the width since
//! `p < 1`.
//!
//! Widths are powers of two and transition anchors are multiples of the
//! innermost width, so every breakpoint is exact in binary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::poly;

/// Innermost width relative to the largest breakpoint magnitude. Below this
/// the dyadic breakpoints stop being exactly representable with margin.
pub const WIDTH_REL_FLOOR: f64 = 1e-13;
const WIDTH_ABS_FLOOR: f64 = 1e-280;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleLadder {
    widths: Vec<f64>,
    /// Per-derivative-order `p`-power budget the widths were designed for.
    target: Vec<f64>,
}

impl ScaleLadder {
    pub fn new(widths: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        if widths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParams(
                "ladder widths must be positive".into(),
            ));
        }
        if widths.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParams(
                "ladder widths must be strictly decreasing".into(),
            ));
        }
        Ok(ScaleLadder { widths, target })
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn innermost(&self) -> f64 {
        *self.widths.last().unwrap_or(&f64::INFINITY)
    }

    /// Halve every width.
    pub fn halved(&self) -> ScaleLadder {
        ScaleLadder {
            widths: self.widths.iter().map(|w| 0.5 * w).collect(),
            target: self.target.clone(),
        }
    }

    /// Design `m` dyadic widths so that transitions with `Σ|Δ_i|^p = jump_mass`
    /// meet `budgets[r-1]` at derivative order `r = 1..m`, with the outer width
    /// at most `max_width`. Widths are fixed outermost first; each successive
    /// order's width is solved from its closed-form cost given the earlier ones.
    pub fn design(
        m: usize,
        jump_mass: f64,
        budgets: &[f64],
        max_width: f64,
        p: f64,
    ) -> Result<Self> {
        assert!(m >= 1 && budgets.len() >= m);
        let mut widths: Vec<f64> = Vec::with_capacity(m);
        for r in 1..=m {
            // every width already fixed enters as (w/2)^-p; the new one enters
            // as (w/2)^-p unless it is the innermost
            let mut prefactor = jump_mass * 2f64.powi(r as i32 - 1);
            for w in &widths {
                prefactor *= (0.5 * w).powf(-p);
            }
            if r < m {
                prefactor *= 2f64.powf(p);
            }
            let mut w = (budgets[r - 1] / prefactor).powf(1.0 / (1.0 - p));
            let cap = widths.last().map_or(max_width, |prev| 0.5 * prev);
            if !(w <= cap) {
                w = cap;
            }
            let w = pow2_floor(w);
            if !(w >= WIDTH_ABS_FLOOR) {
                return Err(Error::BudgetUnreachable {
                    budget: budgets[r - 1],
                    reason: format!("order-{r} width underflows"),
                });
            }
            widths.push(w);
        }
        ScaleLadder::new(widths, budgets[..m].to_vec())
    }

    /// Closed-form bound on `∫|T^{(r)}|^p` for a unit jump, `r = 1..=len`.
    pub fn unit_cost_bound(&self, r: usize, p: f64) -> f64 {
        let m = self.widths.len();
        assert!(r >= 1 && r <= m);
        let mut cost = 2f64.powi(r as i32 - 1) * self.widths[r - 1];
        for q in 0..r {
            let next = if q + 1 < m { self.widths[q + 1] } else { 0.0 };
            cost *= (self.widths[q] - next).powf(-p);
        }
        cost
    }

    /// Errors unless the innermost width resolves positions of size `magnitude`.
    pub fn check_floor(&self, magnitude: f64) -> Result<()> {
        let w = self.innermost();
        if w < WIDTH_REL_FLOOR * magnitude || w < WIDTH_ABS_FLOOR {
            return Err(Error::BudgetUnreachable {
                budget: self.target.iter().cloned().fold(f64::INFINITY, f64::min),
                reason: format!("innermost width {w:e} below the floor at |x| ~ {magnitude:e}"),
            });
        }
        Ok(())
    }
}

pub fn pow2_floor(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let e = x.log2().floor();
    let mut w = 2f64.powf(e);
    if w > x {
        w *= 0.5;
    }
    w
}

/// Unit transition pieces: `offsets[i]..offsets[i+1]` carries `pieces[i]` in
/// local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Profile {
    pub offsets: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

impl Profile {
    pub fn width(&self) -> f64 {
        *self.offsets.last().unwrap()
    }
}

/// Unit transition of order `widths.len()` over `[0, widths[0]]`.
pub(crate) fn unit_profile(widths: &[f64]) -> Profile {
    let outer = widths[0];
    if widths.len() == 1 {
        return Profile {
            offsets: vec![0.0, outer],
            pieces: vec![vec![0.0, 1.0 / outer]],
        };
    }
    let inner = unit_profile(&widths[1..]);
    let flank = inner.width();
    // plateau bump: rise, hold at 1, mirrored fall (1 − rise)
    let mut offsets = inner.offsets.clone();
    let mut bump = inner.pieces.clone();
    if outer - 2.0 * flank > 0.0 {
        offsets.push(outer - flank);
        bump.push(vec![1.0]);
    }
    let fall_start = outer - flank;
    for (i, c) in inner.pieces.iter().enumerate() {
        offsets.push(fall_start + inner.offsets[i + 1]);
        let mut d: Vec<f64> = c.iter().map(|a| -a).collect();
        d[0] += 1.0;
        bump.push(d);
    }
    let slope = 1.0 / (outer - flank);
    let mut value = 0.0;
    let mut pieces = Vec::with_capacity(bump.len());
    for (i, c) in bump.iter().enumerate() {
        let scaled: Vec<f64> = c.iter().map(|a| a * slope).collect();
        let prim = poly::antiderivative(&scaled, value);
        value = poly::eval(&prim, offsets[i + 1] - offsets[i]);
        pieces.push(prim);
    }
    Profile { offsets, pieces }
}

/// Monotone `C^{m-1}` rise from 0 to `height` across `[x0, x0 + width]`,
/// using the first `m − 1` ladder widths below `width` that nest by at least
/// a factor 2. The result is the restriction to the transition interval; it
/// is zero (not `height`) to the right of `x0 + width`.
pub fn smoothstep(
    order: usize,
    width: f64,
    height: f64,
    x0: f64,
    ladder: &ScaleLadder,
) -> Result<PiecewisePoly> {
    assert!(order >= 1);
    let mut widths = vec![width];
    for &w in ladder.widths() {
        if widths.len() == order {
            break;
        }
        if 2.0 * w <= *widths.last().unwrap() {
            widths.push(w);
        }
    }
    if widths.len() < order {
        return Err(Error::LadderTooShallow {
            width,
            available: widths.len() - 1,
            needed: order - 1,
        });
    }
    let profile = unit_profile(&widths);
    let breakpoints = profile.offsets.iter().map(|o| x0 + o).collect();
    let pieces = profile
        .pieces
        .iter()
        .map(|c| c.iter().map(|a| a * height).collect())
        .collect();
    PiecewisePoly::new(breakpoints, pieces)
}

/// Step function with values `levels[i]` on `[nodes[i], nodes[i+1]]` (zero
/// outside), every jump replaced by a transition of order `widths.len()`
/// centred at its node. Nodes are snapped to multiples of the innermost width.
pub(crate) fn smoothed_staircase(
    nodes: &[f64],
    levels: &[f64],
    widths: &[f64],
) -> Result<PiecewisePoly> {
    assert_eq!(nodes.len(), levels.len() + 1);
    let profile = unit_profile(widths);
    let eps = profile.width();
    let quantum = *widths.last().unwrap();
    let anchors: Vec<f64> = nodes
        .iter()
        .map(|x| ((x - 0.5 * eps) / quantum + 0.5).floor() * quantum)
        .collect();
    if anchors.windows(2).any(|w| w[1] - w[0] < eps) {
        return Err(Error::InvalidParams(
            "transitions overlap; width exceeds the cell size".into(),
        ));
    }
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut pieces: Vec<Vec<f64>> = Vec::new();
    let mut current = 0.0;
    for (i, &a) in anchors.iter().enumerate() {
        let next = levels.get(i).copied().unwrap_or(0.0);
        let jump = next - current;
        if jump != 0.0 {
            if breakpoints.is_empty() {
                breakpoints.push(a);
            } else {
                // hold the previous level up to this transition
                breakpoints.push(a);
                pieces.push(vec![current]);
            }
            for (o, c) in profile.offsets[1..].iter().zip(&profile.pieces) {
                breakpoints.push(a + o);
                let mut c: Vec<f64> = c.iter().map(|v| v * jump).collect();
                c[0] += current;
                pieces.push(c);
            }
        }
        current = next;
    }
    if breakpoints.len() < 2 {
        return Ok(PiecewisePoly::zero());
    }
    PiecewisePoly::new(breakpoints, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise_poly::SmoothnessOrder;

    fn ladder(ws: &[f64]) -> ScaleLadder {
        ScaleLadder::new(ws.to_vec(), vec![]).unwrap()
    }

    #[test]
    fn order_one_is_a_linear_ramp() {
        let s = smoothstep(1, 0.5, 2.0, 1.0, &ladder(&[])).unwrap();
        assert_eq!(s.pieces(), &[vec![0.0, 4.0]]);
        assert_eq!(s.breakpoints(), &[1.0, 1.5]);
    }

    #[test]
    fn order_two_has_flat_ends() {
        let s = smoothstep(2, 0.1, 1.0, 0.0, &ladder(&[0.02])).unwrap();
        let d = s.differentiate();
        assert!(d.eval(0.0).abs() < 1e-12);
        let last = d.pieces().last().unwrap();
        assert!(crate::poly::eval(last, d.width(d.num_pieces() - 1)).abs() < 1e-9);
        let top = s.pieces().last().unwrap();
        assert!((crate::poly::eval(top, s.width(s.num_pieces() - 1)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_are_smooth_and_antisymmetric() {
        for ws in [
            &[0.5][..],
            &[0.5, 0.125],
            &[0.5, 0.125, 1.0 / 64.0],
            &[0.25, 0.125, 0.0625],
        ] {
            let m = ws.len();
            let s = smoothstep(m, ws[0], 1.0, 0.0, &ladder(&ws[1..])).unwrap();
            // join to the constant 1 on the right and fall back for a compact test function
            let plateau = PiecewisePoly::boxcar(ws[0], 2.0, 1.0);
            let fall = smoothstep(m, ws[0], -1.0, 2.0, &ladder(&ws[1..]))
                .unwrap()
                .add(&PiecewisePoly::boxcar(2.0, 2.0 + ws[0], 1.0))
                .unwrap();
            let f = s.add(&plateau).unwrap().add(&fall).unwrap();
            assert!(
                f.smoothness_order(1e-9) >= SmoothnessOrder(m as i32 - 1),
                "m = {m}"
            );
            for i in 0..=20 {
                let t = ws[0] * i as f64 / 20.0;
                let a = if t < ws[0] { s.eval(t) } else { 1.0 };
                let b = if ws[0] - t < ws[0] {
                    s.eval(ws[0] - t)
                } else {
                    1.0
                };
                assert!((a + b - 1.0).abs() < 1e-12, "antisymmetry at {t}");
            }
        }
    }

    #[test]
    fn plateau_integral_is_width_minus_eps() {
        // rise on [0, ε], hold, fall on [1 − ε, 1]: integral = 1 − ε
        let eps = 0.125;
        let rise = smoothstep(3, eps, 1.0, 0.0, &ladder(&[1.0 / 32.0, 1.0 / 256.0])).unwrap();
        let hold = PiecewisePoly::boxcar(eps, 1.0 - eps, 1.0);
        let fall = smoothstep(3, eps, -1.0, 1.0 - eps, &ladder(&[1.0 / 32.0, 1.0 / 256.0]))
            .unwrap()
            .add(&PiecewisePoly::boxcar(1.0 - eps, 1.0, 1.0))
            .unwrap();
        let f = rise.add(&hold).unwrap().add(&fall).unwrap();
        assert!((f.total_integral() - (1.0 - eps)).abs() < 1e-14);
    }

    #[test]
    fn shallow_ladder_is_rejected() {
        let err = smoothstep(3, 0.1, 1.0, 0.0, &ladder(&[0.09, 0.01])).unwrap_err();
        assert!(matches!(
            err,
            Error::LadderTooShallow {
                available: 1,
                needed: 2,
                ..
            }
        ));
    }

    #[test]
    fn cost_bound_dominates_measured_cost() {
        use crate::quasinorm::{lp_quasinorm, QuasiNormParams};
        let l = ladder(&[0.25, 1.0 / 32.0, 1.0 / 1024.0]);
        let s = smoothstep(
            3,
            0.25,
            1.0,
            0.0,
            &ScaleLadder::new(l.widths()[1..].to_vec(), vec![]).unwrap(),
        )
        .unwrap();
        for p in [0.3, 0.5, 0.7] {
            let params = QuasiNormParams::new(p, 0).unwrap();
            for r in 1..=3 {
                let m = lp_quasinorm(&s.derivative_n(r), &params).unwrap();
                let measured = m.p_power;
                let bound = l.unit_cost_bound(r, p);
                assert!(
                    measured - m.err_bound <= bound,
                    "p={p} r={r}: {measured} > {bound}"
                );
                assert!(
                    measured > 0.2 * bound,
                    "bound is loose: {measured} vs {bound}"
                );
            }
        }
    }

    #[test]
    fn design_meets_budgets() {
        for p in [0.3, 0.5, 0.7] {
            for m in 1..=3 {
                let budgets = vec![1e-3; m];
                let l = ScaleLadder::design(m, 5.0, &budgets, 0.01, p).unwrap();
                for r in 1..=m {
                    assert!(5.0 * l.unit_cost_bound(r, p) <= 1e-3 * (1.0 + 1e-12));
                }
                assert!(l.widths().iter().all(|w| pow2_floor(*w) == *w));
            }
        }
    }

    #[test]
    fn staircase_matches_levels_away_from_nodes() {
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
        let levels = [1.0, 3.0, 3.0, -2.0];
        let f = smoothed_staircase(&nodes, &levels, &[1.0 / 64.0, 1.0 / 512.0]).unwrap();
        assert_eq!(f.eval(0.125), 1.0);
        assert_eq!(f.eval(0.5), 3.0);
        assert_eq!(f.eval(0.875), -2.0);
        assert_eq!(f.eval(-0.5), 0.0);
        assert!(f.smoothness_order(1e-9) >= SmoothnessOrder(1));
        // symmetric transitions preserve the step integral
        assert!((f.total_integral() - (1.0 + 3.0 + 3.0 - 2.0) / 4.0).abs() < 1e-14);
    }
}
