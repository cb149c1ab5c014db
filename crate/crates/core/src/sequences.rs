//! Fundamental sequences, the limit map α, the termwise derivative δ and
//! finite-depth Cauchy diagnostics.
//!
//! Limits are never taken. A claim such as "f_j → 0" is checked as a
//! monotone decrease over a fixed set of probe depths together with a final
//! threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::{quasi_distance, NormResult, QuasiNormParams};

pub const DEFAULT_DEPTHS: [usize; 4] = [4, 8, 16, 32];
pub const DEFAULT_THRESHOLD: f64 = 0.05;

type Generator = dyn Fn(usize) -> Result<PiecewisePoly> + Send + Sync;

/// A deterministic generator `j ↦ f_j` (`j ≥ 1`) standing for an element of
/// `W^{k,p}`. Terms are memoized; the generator must be pure.
#[derive(Clone)]
pub struct FundamentalSeq {
    label: String,
    space_order: usize,
    params: QuasiNormParams,
    gen: Arc<Generator>,
    cache: Arc<Mutex<BTreeMap<usize, Arc<PiecewisePoly>>>>,
}

impl fmt::Debug for FundamentalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FundamentalSeq")
            .field("label", &self.label)
            .field("space_order", &self.space_order)
            .field("params", &self.params)
            .finish()
    }
}

impl FundamentalSeq {
    pub fn new<F>(
        label: impl Into<String>,
        space_order: usize,
        params: QuasiNormParams,
        gen: F,
    ) -> Self
    where
        F: Fn(usize) -> Result<PiecewisePoly> + Send + Sync + 'static,
    {
        FundamentalSeq {
            label: label.into(),
            space_order,
            params: params.with_k(space_order),
            gen: Arc::new(gen),
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn constant(
        label: impl Into<String>,
        f: PiecewisePoly,
        space_order: usize,
        params: QuasiNormParams,
    ) -> Self {
        Self::new(label, space_order, params, move |_| Ok(f.clone()))
    }

    pub fn zero(space_order: usize, params: QuasiNormParams) -> Self {
        Self::constant("0", PiecewisePoly::zero(), space_order, params)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space_order(&self) -> usize {
        self.space_order
    }

    pub fn params(&self) -> &QuasiNormParams {
        &self.params
    }

    pub fn term(&self, j: usize) -> Result<Arc<PiecewisePoly>> {
        if j == 0 {
            return Err(Error::InvalidParams(
                "sequences are indexed from j = 1".into(),
            ));
        }
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&j) {
            return Ok(hit.clone());
        }
        let term = Arc::new((self.gen)(j)?);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(j)
            .or_insert(term.clone());
        Ok(term)
    }

    /// Same terms, viewed in a different space order.
    pub fn with_order(&self, space_order: usize) -> Self {
        let src = self.clone();
        Self::new(self.label.clone(), space_order, self.params, move |j| {
            Ok((*src.term(j)?).clone())
        })
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Termwise map.
    pub fn map<F>(&self, label: impl Into<String>, space_order: usize, f: F) -> Self
    where
        F: Fn(usize, &PiecewisePoly) -> Result<PiecewisePoly> + Send + Sync + 'static,
    {
        let src = self.clone();
        Self::new(label, space_order, self.params, move |j| {
            f(j, &*src.term(j)?)
        })
    }

    /// Termwise `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &FundamentalSeq, b: f64) -> Self {
        let (f, g) = (self.clone(), other.clone());
        let label = format!("{a}·{} + {b}·{}", self.label, other.label);
        Self::new(label, self.space_order, self.params, move |j| {
            f.term(j)?.linear_combination(a, &*g.term(j)?, b)
        })
    }
}

/// Depths to probe and the final-distance threshold a verdict must beat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyProbe {
    pub depths: Vec<usize>,
    pub threshold: f64,
}

impl Default for CauchyProbe {
    fn default() -> Self {
        CauchyProbe {
            depths: DEFAULT_DEPTHS.to_vec(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl CauchyProbe {
    pub fn new(depths: Vec<usize>, threshold: f64) -> Result<Self> {
        if depths.is_empty() {
            return Err(Error::InvalidParams("empty depth list".into()));
        }
        if depths[0] == 0 || depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "depths must be positive and increasing".into(),
            ));
        }
        Ok(CauchyProbe { depths, threshold })
    }

    /// Dyadic ladder `J/8, J/4, J/2, J` (entries below 1 dropped).
    pub fn ending_at(depth: usize, threshold: f64) -> Self {
        let mut depths: Vec<usize> = [depth / 8, depth / 4, depth / 2, depth]
            .into_iter()
            .filter(|&d| d >= 1)
            .collect();
        depths.dedup();
        CauchyProbe { depths, threshold }
    }

    pub fn final_depth(&self) -> usize {
        *self.depths.last().expect("probe has depths")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub label: String,
    pub order: usize,
    pub depths: Vec<usize>,
    /// `‖f_{d_i} − f_{d_{i+1}}‖` for consecutive probed depths.
    pub consecutive_dists: Vec<NormResult>,
    /// Least-squares slope of `ln(distance)` against `ln(depth)`.
    pub fitted_rate: Option<f64>,
    pub threshold: f64,
    pub verdict: bool,
}

impl CauchyReport {
    /// Rows `(depth, distance, p_power, err_bound)`, one per consecutive pair,
    /// keyed by the smaller depth.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("depth,distance,p_power,err_bound\n");
        for (d, r) in self.depths.iter().zip(&self.consecutive_dists) {
            out.push_str(&format!(
                "{d},{:e},{:e},{:e}\n",
                r.value, r.p_power, r.err_bound
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// True when the second half of `dists` is non-increasing, allowing for the
/// quadrature error bounds.
pub fn eventually_decreasing(dists: &[NormResult]) -> bool {
    if dists.len() < 2 {
        return true;
    }
    let start = (dists.len() - 1) / 2;
    dists[start..]
        .windows(2)
        .all(|w| w[1].p_power <= w[0].p_power + w[0].err_bound + w[1].err_bound)
}

/// Slope of the least-squares line through `(ln x, ln y)`, skipping zeros.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

pub fn cauchy_report(
    f: &FundamentalSeq,
    order: usize,
    probe: &CauchyProbe,
) -> Result<CauchyReport> {
    if order > f.space_order {
        return Err(Error::InvalidParams(format!(
            "order {order} exceeds the space order {}",
            f.space_order
        )));
    }
    let params = f.params.with_k(order);
    let mut dists = Vec::with_capacity(probe.depths.len().saturating_sub(1));
    for w in probe.depths.windows(2) {
        dists.push(quasi_distance(&*f.term(w[0])?, &*f.term(w[1])?, &params)?);
    }
    let xs: Vec<f64> = probe.depths.iter().map(|&d| d as f64).collect();
    let ys: Vec<f64> = dists.iter().map(|r| r.value).collect();
    let fitted_rate = loglog_slope(&xs[..ys.len()], &ys);
    let last = dists.last().map_or(0.0, |r| r.value);
    let verdict = eventually_decreasing(&dists) && last < probe.threshold;
    Ok(CauchyReport {
        label: f.label.clone(),
        order,
        depths: probe.depths.clone(),
        consecutive_dists: dists,
        fitted_rate,
        threshold: probe.threshold,
        verdict,
    })
}

/// Finite-depth stand-in for `αf = lim f_j` in `L^p`.
#[derive(Debug, Clone)]
pub struct AlphaLimit {
    pub representative: Arc<PiecewisePoly>,
    pub report: CauchyReport,
    /// Estimated `‖f_J − f_{J'}‖_p` for `J' > J`, extrapolating the last
    /// observed contraction of the `p`-powers geometrically.
    pub tail_estimate: f64,
}

pub fn alpha_limit(f: &FundamentalSeq, depth: usize, threshold: f64) -> Result<AlphaLimit> {
    let probe = CauchyProbe::ending_at(depth, threshold);
    let report = cauchy_report(f, 0, &probe)?;
    if !report.verdict {
        return Err(Error::NotCauchy {
            label: f.label.clone(),
            order: 0,
        });
    }
    let p = f.params.p;
    let tail_estimate = match report.consecutive_dists.as_slice() {
        [] => 0.0,
        [.., last] if last.p_power == 0.0 => 0.0,
        [.., prev, last] if last.p_power < prev.p_power => {
            let ratio = last.p_power / prev.p_power;
            (last.p_power * ratio / (1.0 - ratio) + last.err_bound).powf(1.0 / p)
        }
        [.., last] => last.value,
    };
    Ok(AlphaLimit {
        representative: f.term(depth)?,
        report,
        tail_estimate,
    })
}

/// δf = {f_j'}.
pub fn delta_map(f: &FundamentalSeq) -> Result<FundamentalSeq> {
    if f.space_order == 0 {
        return Err(Error::OrderZero);
    }
    Ok(f.map(format!("δ({})", f.label), f.space_order - 1, |_, t| {
        Ok(t.differentiate())
    }))
}

/// `‖f_j − g_j‖_{W^{order,p}}` at each depth.
pub fn termwise_distances(
    f: &FundamentalSeq,
    g: &FundamentalSeq,
    order: usize,
    depths: &[usize],
) -> Result<Vec<NormResult>> {
    let params = f.params.with_k(order);
    depths
        .iter()
        .map(|&j| quasi_distance(&*f.term(j)?, &*g.term(j)?, &params))
        .collect()
}

/// Equality in the completion, at finite depth: termwise distances decrease
/// (eventually) and end below the probe threshold.
pub fn seq_equal(
    f: &FundamentalSeq,
    g: &FundamentalSeq,
    order: usize,
    probe: &CauchyProbe,
) -> Result<bool> {
    if f.space_order != g.space_order {
        return Err(Error::InvalidParams(format!(
            "space orders differ: {} vs {}",
            f.space_order, g.space_order
        )));
    }
    let dists = termwise_distances(f, g, order, &probe.depths)?;
    let last = dists.last().map_or(0.0, |r| r.value);
    Ok(eventually_decreasing(&dists) && last < probe.threshold)
}
