//! Pathology runs: each construction probed over a list of depths, with the
//! measured quasi-distances, the bounds it promises, and a verdict.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::constructions::{
    beta_term, delta_section, douady_sequence, fit_tolerance, iso_forward, iso_inverse,
    mean_zero_budget, plateau, psi_bump, IsoPair, ISO_FIT_EXPONENT,
};
use crate::error::{Error, Result};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::{
    lp_quasinorm, quasi_distance, sobolev_quasinorm, NormResult, QuasiNormParams,
};
use crate::report::{loglog_svg, ConvergenceRow, Series};
use crate::sequences::{delta_map, eventually_decreasing, CauchyProbe, FundamentalSeq};

const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathologyRun {
    pub name: String,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
}

impl PathologyRun {
    fn new(name: impl Into<String>, series: Vec<Series>) -> Self {
        let mut run = PathologyRun {
            name: name.into(),
            series,
            checks: Vec::new(),
        };
        let bounds = run.series.iter().all(Series::bounds_hold);
        run.check("distances within analytic bounds", bounds);
        run
    }

    fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            pass,
        });
    }

    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn verdict_line(&self) -> String {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        if failed.is_empty() {
            format!("verdict: PASS {}", self.name)
        } else {
            format!("verdict: FAIL {} ({})", self.name, failed.join("; "))
        }
    }

    /// Writes `<stem>_<series>.csv` per series and `<stem>.svg` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut files = Vec::new();
        for s in &self.series {
            let path = dir.join(format!("{stem}_{}.csv", s.name));
            write_file(&path, &s.to_csv())?;
            files.push(path);
        }
        let path = dir.join(format!("{stem}.svg"));
        write_file(&path, &loglog_svg(&self.name, &self.series))?;
        files.push(path);
        Ok(files)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn root(p_power: f64, p: f64) -> f64 {
    p_power.powf(1.0 / p)
}

fn rows(
    depths: &[usize],
    dists: &[NormResult],
    bounds: impl Fn(usize) -> f64,
) -> Vec<ConvergenceRow> {
    depths
        .iter()
        .zip(dists)
        .map(|(&d, r)| ConvergenceRow::new(d, *r, bounds(d)))
        .collect()
}

/// Sawtooth with return zones `j^{-a}`: `α` distances `‖f_j‖_p` and `δ`
/// distances `‖f_j' − 1_{[0,1]}‖_p`.
pub fn douady_run(p: f64, a: f64, depths: &[usize], threshold: f64) -> Result<PathologyRun> {
    let d = douady_sequence(p, a)?;
    let l = QuasiNormParams::new(p, 0)?;
    let mut alpha = Vec::new();
    let mut delta = Vec::new();
    for &j in depths {
        let f = d.seq.term(j)?;
        alpha.push(lp_quasinorm(&f, &l)?);
        delta.push(lp_quasinorm(&f.differentiate().sub(&plateau())?, &l)?);
    }
    let alpha = Series::new("alpha", rows(depths, &alpha, |j| root(d.alpha_bound(j), p)));
    let delta = Series::new("delta", rows(depths, &delta, |j| root(d.delta_bound(j), p)));
    let (a_dec, d_dec, a_last) = (
        alpha.decreasing(),
        delta.decreasing(),
        alpha.last_distance(),
    );
    let mut run = PathologyRun::new(format!("douady p={p} a={a}"), vec![alpha, delta]);
    run.check("alpha distances decreasing", a_dec);
    run.check("delta distances decreasing", d_dec);
    run.check("alpha distance below threshold", a_last < threshold);
    Ok(run)
}

/// `ψ_j` for each `j` in `indices`: order-`(k−1)` quasi-norm against `2^{-j/p}`.
pub fn psi_run(p: f64, k: usize, indices: &[usize]) -> Result<PathologyRun> {
    let params = QuasiNormParams::new(p, k - 1)?;
    let mut dists = Vec::new();
    let mut unit_mass = true;
    for &j in indices {
        let psi = psi_bump(j, k, &params)?;
        unit_mass &= (psi.bump.total_integral() - 1.0).abs() <= MASS_TOL;
        dists.push(sobolev_quasinorm(&psi.bump, &params)?);
    }
    let series = Series::new(
        "psi",
        rows(indices, &dists, |j| root(0.5f64.powi(j as i32), p)),
    );
    let mut run = PathologyRun::new(format!("psi p={p} k={k}"), vec![series]);
    run.check("unit mass", unit_mass);
    Ok(run)
}

/// Terms `n` of `β(u)`: `‖v_n − u‖_p` against the emitted step-error bound
/// and `‖v_n'‖_{W^{k-1,p}}` against `(1/n)^{1/p}`.
pub fn beta_run(
    u: &PiecewisePoly,
    label: &str,
    p: f64,
    k: usize,
    depths: &[usize],
    threshold: f64,
) -> Result<PathologyRun> {
    let l = QuasiNormParams::new(p, 0)?;
    let mut alpha = Vec::new();
    let mut delta = Vec::new();
    for &n in depths {
        let t = beta_term(u, n, k, &l)?;
        alpha.push(ConvergenceRow::new(
            n,
            lp_quasinorm(&t.v.sub(u)?, &l)?,
            root(t.step_error_bound, p),
        ));
        let cost = sobolev_quasinorm(&t.v.differentiate(), &l.with_k(k - 1))?;
        delta.push(ConvergenceRow::new(n, cost, root(1.0 / n as f64, p)));
    }
    let alpha = Series::new("alpha", alpha);
    let delta = Series::new("delta", delta);
    let (dec, last) = (alpha.decreasing(), alpha.last_distance());
    let mut run = PathologyRun::new(format!("beta {label} p={p} k={k}"), vec![alpha, delta]);
    run.check("approximation error decreasing", dec);
    run.check("approximation error below threshold", last < threshold);
    Ok(run)
}

/// `γ(g)`: `‖(γg)_j' − g_j‖_{W^{k-1,p}}` and `‖(γg)_j‖_p` per depth.
pub fn section_run(g: &FundamentalSeq, k: usize, probe: &CauchyProbe) -> Result<PathologyRun> {
    let p = g.params().p;
    let s = delta_section(g, k, probe)?;
    let d = delta_map(&s.seq)?;
    let order = g.params().with_k(k - 1);
    let mut delta = Vec::new();
    let mut delta_rows = Vec::new();
    let mut alpha_rows = Vec::new();
    for &j in &probe.depths {
        let rec = s.record(j)?;
        let dist = quasi_distance(&*d.term(j)?, &*g.term(j)?, &order)?;
        // g_j − f_j' = m ψ_j + ũ_j', with ‖ψ_j‖^p ≤ j^{-3} and ‖ũ_j'‖^p < j^{-p}
        let bound =
            rec.mass_removed.abs().powf(p) * mean_zero_budget(j) + fit_tolerance(j, 1.0).powf(p);
        delta_rows.push(ConvergenceRow::new(j, dist, root(bound, p)));
        delta.push(dist);
        let norm = lp_quasinorm(&*s.seq.term(j)?, &order.with_k(0))?;
        alpha_rows.push(ConvergenceRow::new(j, norm, 1.0 / j as f64 + rec.tail));
    }
    let alpha = Series::new("alpha", alpha_rows);
    let last_alpha = alpha.last_distance();
    let mut run = PathologyRun::new(
        format!("delta-section {} p={p} k={k}", g.label()),
        vec![alpha, Series::new("delta", delta_rows)],
    );
    let last = delta.last().map_or(0.0, |r| r.value);
    run.check(
        "derivative reproduces g",
        eventually_decreasing(&delta) && last < probe.threshold,
    );
    run.check("alpha tends to zero", last_alpha < probe.threshold);
    Ok(run)
}

/// `iso_forward(iso_inverse(g, h))` against `(g, h)`.
pub fn iso_run(
    g: &FundamentalSeq,
    h: &FundamentalSeq,
    k: usize,
    probe: &CauchyProbe,
) -> Result<PathologyRun> {
    let p = g.params().p;
    let pair = IsoPair::new(g.clone(), h.clone())?;
    let f = iso_inverse(&pair, k, probe)?;
    let back = iso_forward(&f, probe)?;
    let l0 = g.params().with_k(0);
    let lh = g.params().with_k(k - 1);
    let (mut alpha, mut delta) = (Vec::new(), Vec::new());
    let (mut alpha_rows, mut delta_rows) = (Vec::new(), Vec::new());
    for &j in &probe.depths {
        let tol = fit_tolerance(j, ISO_FIT_EXPONENT);
        let a = quasi_distance(&*back.g_part.term(j)?, &*g.term(j)?, &l0)?;
        alpha_rows.push(ConvergenceRow::new(j, a, tol));
        alpha.push(a);
        let hj = h.term(j)?;
        let d = quasi_distance(&*back.h_part.term(j)?, &hj, &lh)?;
        // section defect plus the derivative of the β correction
        let bound = hj.total_integral().abs().powf(p) * mean_zero_budget(j) + 2.0 * tol.powf(p);
        delta_rows.push(ConvergenceRow::new(j, d, root(bound, p)));
        delta.push(d);
    }
    let mut run = PathologyRun::new(
        format!("iso-roundtrip ({}, {}) p={p} k={k}", g.label(), h.label()),
        vec![
            Series::new("alpha", alpha_rows),
            Series::new("delta", delta_rows),
        ],
    );
    let ok = |v: &[NormResult]| {
        eventually_decreasing(v) && v.last().map_or(0.0, |r| r.value) < probe.threshold
    };
    run.check("alpha reproduces g", ok(&alpha));
    run.check("delta reproduces h", ok(&delta));
    Ok(run)
}

/// `iso_inverse(iso_forward(f))` against `f`, at order `k`.
pub fn iso_reverse_run(f: &FundamentalSeq, probe: &CauchyProbe) -> Result<PathologyRun> {
    let p = f.params().p;
    let k = f.space_order();
    let pair = iso_forward(f, probe)?;
    let back = iso_inverse(&pair, k, probe)?;
    let lk = f.params().with_k(k);
    let mut dists = Vec::new();
    let mut rows = Vec::new();
    for &j in &probe.depths {
        let tol = fit_tolerance(j, ISO_FIT_EXPONENT);
        let d = quasi_distance(&*back.term(j)?, &*f.term(j)?, &lk)?;
        let mass = pair.h_part.term(j)?.total_integral();
        // fit error of x = γ_j − f_j, its derivative, and the β correction's derivative
        let bound = mass.abs().powf(p) * mean_zero_budget(j) + 3.0 * tol.powf(p);
        rows.push(ConvergenceRow::new(j, d, root(bound, p)));
        dists.push(d);
    }
    let mut run = PathologyRun::new(
        format!("iso-reverse {} p={p} k={k}", f.label()),
        vec![Series::new("sobolev", rows)],
    );
    let last = dists.last().map_or(0.0, |r| r.value);
    run.check(
        "reproduces f",
        eventually_decreasing(&dists) && last < probe.threshold,
    );
    Ok(run)
}
