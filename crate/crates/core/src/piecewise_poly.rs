//! Compactly supported piecewise polynomials on the real line.
//!
//! A [`PiecewisePoly`] is identically zero outside `[first breakpoint, last
//! breakpoint]`. Each piece stores its coefficients in the local coordinate
//! `t = x - left`, which keeps very thin pieces well conditioned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

pub const DEFAULT_DEGREE_CAP: usize = 8;
pub const DEFAULT_TOL_MEAN: f64 = 1e-10;
/// Relative spacing below which merged breakpoints are treated as equal.
pub const MERGE_REL_TOL: f64 = 1e-15;
/// Relative tolerance used when a smoothness precondition is checked.
pub const SMOOTHNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewisePoly", into = "RawPiecewisePoly")]
pub struct PiecewisePoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    degree_cap: usize,
}

#[derive(Serialize, Deserialize)]
struct RawPiecewisePoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl TryFrom<RawPiecewisePoly> for PiecewisePoly {
    type Error = Error;

    fn try_from(raw: RawPiecewisePoly) -> Result<Self> {
        PiecewisePoly::new(raw.breakpoints, raw.pieces)
    }
}

impl From<PiecewisePoly> for RawPiecewisePoly {
    fn from(f: PiecewisePoly) -> Self {
        RawPiecewisePoly {
            breakpoints: f.breakpoints,
            pieces: f.pieces,
        }
    }
}

/// Largest `m` such that derivatives `0..=m` are continuous on the whole line;
/// `-1` means discontinuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SmoothnessOrder(pub i32);

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_degree_cap(breakpoints, pieces, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
        degree_cap: usize,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPoly("need at least two breakpoints".into()));
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidPoly(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoly("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPoly(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let mut trimmed = Vec::with_capacity(pieces.len());
        for c in pieces {
            if c.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidPoly("non-finite coefficient".into()));
            }
            let c = poly::trim(c);
            let degree = poly::degree(&c).unwrap_or(0);
            if degree > degree_cap {
                return Err(Error::DegreeCapExceeded {
                    degree,
                    cap: degree_cap,
                });
            }
            trimmed.push(c);
        }
        Ok(PiecewisePoly {
            breakpoints,
            pieces: trimmed,
            degree_cap,
        })
    }

    /// The zero function, carried on `[0, 1]`.
    pub fn zero() -> Self {
        PiecewisePoly {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![vec![0.0]],
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    /// Linear interpolation through `(x, y)` nodes, zero outside the first
    /// and last node.
    pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Result<Self> {
        let breakpoints: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let pieces = nodes
            .windows(2)
            .map(|w| {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                vec![y0, (y1 - y0) / (x1 - x0)]
            })
            .collect();
        Self::new(breakpoints, pieces)
    }

    /// Hat on `[a, b]` peaking with `height` at the midpoint.
    pub fn hat(a: f64, b: f64, height: f64) -> Self {
        let m = 0.5 * (a + b);
        Self::piecewise_linear(&[(a, 0.0), (m, height), (b, 0.0)])
            .expect("hat nodes are increasing")
    }

    /// Constant `height` on `[a, b]`.
    pub fn boxcar(a: f64, b: f64, height: f64) -> Self {
        Self::new(vec![a, b], vec![vec![height]]).expect("box interval is valid")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn width(&self, i: usize) -> f64 {
        self.breakpoints[i + 1] - self.breakpoints[i]
    }

    pub fn max_degree(&self) -> usize {
        self.pieces
            .iter()
            .filter_map(|c| poly::degree(c))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|c| poly::is_zero(c))
    }

    /// Index of the piece containing `x` (right piece at breakpoints).
    fn locate(&self, x: f64) -> Option<usize> {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        if idx == 0 || idx == self.breakpoints.len() {
            None
        } else {
            Some(idx - 1)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some(i) => poly::eval(&self.pieces[i], x - self.breakpoints[i]),
            None => 0.0,
        }
    }

    pub fn differentiate(&self) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|c| poly::derivative(c)).collect(),
            degree_cap: self.degree_cap,
        }
    }

    pub fn derivative_n(&self, r: usize) -> PiecewisePoly {
        (0..r).fold(self.clone(), |f, _| f.differentiate())
    }

    pub fn total_integral(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, c)| poly::integral(c, self.width(i)))
            .sum()
    }

    pub fn antiderivative(&self) -> Result<PiecewisePoly> {
        self.antiderivative_with_tol(DEFAULT_TOL_MEAN)
    }

    /// Primitive vanishing left of the support. Requires a mean-zero input so
    /// that the primitive is again compactly supported.
    pub fn antiderivative_with_tol(&self, tol_mean: f64) -> Result<PiecewisePoly> {
        let integral = self.total_integral();
        if integral.abs() > tol_mean {
            return Err(Error::MeanNotZero {
                integral,
                tol: tol_mean,
            });
        }
        let degree = self.max_degree() + 1;
        if degree > self.degree_cap && !self.is_zero() {
            return Err(Error::DegreeCapExceeded {
                degree,
                cap: self.degree_cap,
            });
        }
        let mut value = 0.0;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, c) in self.pieces.iter().enumerate() {
            let prim = poly::trim(poly::antiderivative(c, value));
            value = poly::eval(&prim, self.width(i));
            pieces.push(prim);
        }
        Ok(PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces,
            degree_cap: self.degree_cap,
        })
    }

    pub fn scale(&self, c: f64) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| poly::trim(p.iter().map(|a| a * c).collect()))
                .collect(),
            degree_cap: self.degree_cap,
        }
    }

    pub fn add(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.linear_combination(1.0, other, -1.0)
    }

    /// `a * self + b * other` on the merged breakpoint grid.
    pub fn linear_combination(
        &self,
        a: f64,
        other: &PiecewisePoly,
        b: f64,
    ) -> Result<PiecewisePoly> {
        let cap = self.degree_cap.max(other.degree_cap);
        let grid = merge_grids(&self.breakpoints, &other.breakpoints);
        let mut pieces = Vec::with_capacity(grid.len() - 1);
        for w in grid.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut acc = vec![0.0];
            for (f, s) in [(self, a), (other, b)] {
                if s == 0.0 {
                    continue;
                }
                if let Some(i) = f.locate(mid) {
                    let local = poly::shift(&f.pieces[i], w[0] - f.breakpoints[i]);
                    poly::add_into(&mut acc, &local, s);
                }
            }
            let acc = poly::trim(acc);
            let degree = poly::degree(&acc).unwrap_or(0);
            if degree > cap {
                return Err(Error::DegreeCapExceeded { degree, cap });
            }
            pieces.push(acc);
        }
        Ok(PiecewisePoly {
            breakpoints: grid,
            pieces,
            degree_cap: cap,
        })
    }

    /// `x -> f(x - dx)`.
    pub fn translate(&self, dx: f64) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.iter().map(|x| x + dx).collect(),
            pieces: self.pieces.clone(),
            degree_cap: self.degree_cap,
        }
    }

    /// `x -> f(x / s)` for `s > 0`.
    pub fn dilate(&self, s: f64) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.iter().map(|x| x * s).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|c| {
                    c.iter()
                        .enumerate()
                        .map(|(i, a)| a / s.powi(i as i32))
                        .collect()
                })
                .collect(),
            degree_cap: self.degree_cap,
        }
    }

    /// Largest `m` with derivatives through order `m` matching at every
    /// breakpoint, the support ends included (the function continues as zero).
    /// Mismatches are measured relative to a bound on the derivative over the
    /// two adjacent pieces.
    pub fn smoothness_order(&self, tol: f64) -> SmoothnessOrder {
        let n = self.breakpoints.len();
        let mut derivs: Vec<Vec<f64>> = self.pieces.clone();
        for r in 0..=self.degree_cap {
            if r > 0 {
                derivs.iter_mut().for_each(|c| *c = poly::derivative(c));
            }
            for b in 0..n {
                let left = (b > 0).then(|| (&derivs[b - 1], self.width(b - 1)));
                let right = (b < n - 1).then(|| (&derivs[b], self.width(b)));
                let l_end = left.map_or(0.0, |(c, w)| poly::eval(c, w));
                let r_start = right.map_or(0.0, |(c, _)| poly::eval(c, 0.0));
                let scale = [left, right]
                    .iter()
                    .flatten()
                    .fold(0.0f64, |m, (c, w)| m.max(poly::abs_bound(c, 0.0, *w)));
                if (l_end - r_start).abs() > tol * scale {
                    return SmoothnessOrder(r as i32 - 1);
                }
            }
        }
        SmoothnessOrder(self.degree_cap as i32)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite values always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidPoly(e.to_string()))
    }
}

/// Sorted union of two breakpoint lists, deduplicating near-coincident points.
fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        match out.last() {
            Some(&last) if x - last <= MERGE_REL_TOL * last.abs().max(x.abs()) => {}
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PiecewisePoly {
        PiecewisePoly::new(vec![0.0, 1.0], vec![vec![0.0, 0.0, 1.0]]).unwrap()
    }

    fn step() -> PiecewisePoly {
        PiecewisePoly::new(vec![0.0, 1.0, 2.0], vec![vec![1.0], vec![-1.0]]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let hat = PiecewisePoly::hat(0.0, 2.0, 1.0);
        assert_eq!(hat.eval(0.5), 0.5);
        assert_eq!(hat.eval(-3.0), 0.0);
        assert_eq!(hat.eval(2.0), 0.0);
        assert_eq!(hat.eval(7.0), 0.0);
        assert_eq!(square().eval(0.5), 0.25);
        // right piece at a breakpoint
        assert_eq!(step().eval(1.0), -1.0);
    }

    #[test]
    fn differentiate_examples() {
        let d = PiecewisePoly::hat(0.0, 2.0, 1.0).differentiate();
        assert_eq!(d.pieces(), &[vec![1.0], vec![-1.0]]);
        assert!(PiecewisePoly::zero().differentiate().is_zero());
        assert_eq!(square().differentiate().pieces(), &[vec![0.0, 2.0]]);
    }

    #[test]
    fn antiderivative_examples() {
        let hat = step().antiderivative().unwrap();
        assert_eq!(hat.eval(1.0), 1.0);
        assert_eq!(hat.eval(0.5), 0.5);
        assert_eq!(hat.eval(2.0), 0.0);
        assert!(PiecewisePoly::zero().antiderivative().unwrap().is_zero());
        let err = PiecewisePoly::boxcar(0.0, 1.0, 1.0)
            .antiderivative()
            .unwrap_err();
        assert!(matches!(err, Error::MeanNotZero { .. }));
    }

    #[test]
    fn add_and_scale_examples() {
        let hat = PiecewisePoly::hat(0.0, 2.0, 1.0);
        assert!(hat.add(&hat.scale(-1.0)).unwrap().is_zero());
        assert_eq!(hat.scale(1.0), hat);
        let far = PiecewisePoly::hat(5.0, 6.0, 2.0);
        let sum = hat.add(&far).unwrap();
        assert_eq!(sum.support(), (0.0, 6.0));
        assert_eq!(sum.eval(1.0), 1.0);
        assert_eq!(sum.eval(5.5), 2.0);
        assert_eq!(sum.eval(3.0), 0.0);
    }

    #[test]
    fn add_rejects_degree_overflow() {
        let high = PiecewisePoly::with_degree_cap(vec![0.0, 1.0], vec![vec![0.0, 0.0, 1.0]], 1);
        assert!(matches!(
            high,
            Err(Error::DegreeCapExceeded { degree: 2, cap: 1 })
        ));
    }

    #[test]
    fn total_integral_examples() {
        assert_eq!(PiecewisePoly::hat(0.0, 2.0, 1.0).total_integral(), 1.0);
        let saw = PiecewisePoly::piecewise_linear(&[
            (-1.0, 0.0),
            (-0.5, -1.0),
            (0.0, 0.0),
            (0.5, 1.0),
            (1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(saw.total_integral(), 0.0);
        assert!((square().total_integral() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn smoothness_examples() {
        assert_eq!(
            PiecewisePoly::hat(0.0, 2.0, 1.0).smoothness_order(1e-9),
            SmoothnessOrder(0)
        );
        assert_eq!(step().smoothness_order(1e-9), SmoothnessOrder(-1));
        // 3t^2 - 2t^3 up, plateau, mirrored descent
        let up = vec![0.0, 0.0, 3.0, -2.0];
        let down = vec![1.0, 0.0, -3.0, 2.0];
        let f = PiecewisePoly::new(vec![0.0, 1.0, 2.0, 3.0], vec![up, vec![1.0], down]).unwrap();
        assert_eq!(f.smoothness_order(1e-9), SmoothnessOrder(1));
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewisePoly::new(vec![0.0], vec![]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 0.0], vec![vec![1.0]]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(PiecewisePoly::from_json(r#"{"breakpoints":[1,0],"pieces":[[1]]}"#).is_err());
    }

    #[test]
    fn json_layout() {
        let f = PiecewisePoly::hat(0.0, 2.0, 1.0);
        assert_eq!(
            f.to_json(),
            r#"{"breakpoints":[0.0,1.0,2.0],"pieces":[[0.0,1.0],[1.0,-1.0]]}"#
        );
    }

    #[test]
    fn merge_dedupes_near_coincident_points() {
        let g = merge_grids(&[0.0, 1.0], &[1.0 + f64::EPSILON, 2.0]);
        assert_eq!(g, vec![0.0, 1.0, 2.0]);
    }
}
