//! Experiment configuration and the full verification matrix
//! (`p` × `k` × construction).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{corpus, corpus_pairs, sequence_corpus};
use crate::error::{Error, Result};
use crate::experiments::{
    beta_run, douady_run, iso_reverse_run, iso_run, psi_run, section_run, PathologyRun,
};
use crate::piecewise_poly::PiecewisePoly;
use crate::quasinorm::{lp_quasinorm, sobolev_quasinorm, QuasiNormParams};
use crate::sequences::{CauchyProbe, FundamentalSeq, DEFAULT_DEPTHS};

pub const BETA_DEPTHS: [usize; 4] = [2, 4, 8, 16];
pub const PSI_INDICES: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const DOUADY_EXPONENT: f64 = 2.0;
pub const MAX_K: usize = 4;
const LAW_PAIRS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub p_values: Vec<f64>,
    pub k_values: Vec<usize>,
    /// Probed depths; each command has its own default when absent.
    pub depths: Option<Vec<usize>>,
    pub threshold: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: "suite".into(),
            p_values: vec![0.3, 0.5, 0.7],
            k_values: vec![1, 2, 3],
            depths: None,
            threshold: 0.05,
            out_dir: PathBuf::from("out"),
            seed: 7,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() || self.k_values.is_empty() {
            return Err(Error::InvalidParams(
                "p and k lists must be non-empty".into(),
            ));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::InvalidParams(format!("p = {p} outside (0, 1)")));
        }
        if let Some(k) = self.k_values.iter().find(|k| !(1..=MAX_K).contains(*k)) {
            return Err(Error::InvalidParams(format!("k = {k} outside 1..={MAX_K}")));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::InvalidParams("threshold must be positive".into()));
        }
        if let Some(depths) = &self.depths {
            CauchyProbe::new(depths.clone(), self.threshold)?;
        }
        Ok(())
    }

    pub fn depths_or(&self, default: &[usize]) -> Vec<usize> {
        self.depths.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Probe over the configured depths (default `4, 8, 16, 32`).
    pub fn probe(&self) -> Result<CauchyProbe> {
        CauchyProbe::new(self.depths_or(&DEFAULT_DEPTHS), self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub rows: Vec<SuiteRow>,
    /// Every file written, in a fixed order.
    pub files: Vec<PathBuf>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.name.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            let pad = width - r.name.chars().count();
            writeln!(
                out,
                "{}{}  {}  {}",
                r.name,
                " ".repeat(pad),
                if r.pass { "PASS" } else { "FAIL" },
                r.detail
            )
            .expect("write to string");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,pass,detail\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},\"{}\"",
                r.name,
                r.pass,
                r.detail.replace('"', "'")
            )
            .expect("write to string");
        }
        out
    }
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    rows: Vec<SuiteRow>,
    files: Vec<PathBuf>,
}

impl Runner<'_> {
    fn push(&mut self, name: String, pass: bool, detail: String) {
        self.rows.push(SuiteRow { name, pass, detail });
    }

    fn pathology(
        &mut self,
        name: String,
        dir: &str,
        stem: String,
        run: Result<PathologyRun>,
    ) -> Result<()> {
        match run {
            Ok(run) => {
                let files = run.write(&self.config.out_dir.join(dir), &stem)?;
                self.files.extend(files);
                let last: Vec<String> = run
                    .series
                    .iter()
                    .map(|s| format!("{} {:.3e}", s.name, s.last_distance()))
                    .collect();
                let failed: Vec<&str> = run
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                let detail = if failed.is_empty() {
                    format!("final {}", last.join(", "))
                } else {
                    format!("final {}; failed: {}", last.join(", "), failed.join("; "))
                };
                self.push(name, run.verdict(), detail);
            }
            Err(e @ Error::Io(_)) => return Err(e),
            Err(e) => self.push(name, false, e.to_string()),
        }
        Ok(())
    }
}

fn quadrature_row(p: f64) -> Result<(bool, String)> {
    let l = QuasiNormParams::new(p, 0)?;
    let x = PiecewisePoly::new(vec![0.0, 1.0], vec![vec![0.0, 1.0]])?;
    let a = lp_quasinorm(&x, &l)?.p_power;
    let b = lp_quasinorm(&PiecewisePoly::hat(0.0, 2.0, 1.0), &l)?.p_power;
    let (ea, eb) = (1.0 / (p + 1.0), 2.0 / (p + 1.0));
    let err = (a - ea).abs().max((b - eb).abs());
    Ok((err <= 1e-8, format!("max error {err:.2e}")))
}

fn laws_row(p: f64, seed: u64) -> Result<(bool, String)> {
    let l = QuasiNormParams::new(p, 0)?;
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for (f, g, lambda) in corpus_pairs(seed, LAW_PAIRS) {
        let nf = lp_quasinorm(&f, &l)?;
        let scaled = lp_quasinorm(&f.scale(lambda), &l)?;
        let expected = lambda.abs().powf(p) * nf.p_power;
        worst = worst.max((scaled.p_power - expected).abs() / expected.max(f64::MIN_POSITIVE));
        let ng = lp_quasinorm(&g, &l)?;
        let sum = lp_quasinorm(&f.add(&g)?, &l)?;
        if sum.p_power > nf.p_power + ng.p_power + sum.err_bound + nf.err_bound + ng.err_bound {
            violations += 1;
        }
    }
    Ok((
        worst <= 1e-9 && violations == 0,
        format!("homogeneity rel err {worst:.2e}, subadditivity violations {violations}"),
    ))
}

fn identity_row(p: f64, k: usize) -> Result<(bool, String)> {
    let (mut held, mut rejected, mut failed) = (0, 0, Vec::new());
    for entry in corpus() {
        let whole = sobolev_quasinorm(&entry.f, &QuasiNormParams::new(p, k)?);
        let base = lp_quasinorm(&entry.f, &QuasiNormParams::new(p, 0)?)?;
        let tail = sobolev_quasinorm(&entry.f.differentiate(), &QuasiNormParams::new(p, k - 1)?);
        match (whole, tail) {
            (Ok(w), Ok(t)) => {
                let slack =
                    w.err_bound + base.err_bound + t.err_bound + 4.0 * f64::EPSILON * w.p_power;
                if (w.p_power - base.p_power - t.p_power).abs() <= slack {
                    held += 1;
                } else {
                    failed.push(entry.name);
                }
            }
            (
                Err(Error::InsufficientSmoothness { .. }),
                Err(Error::InsufficientSmoothness { .. }),
            ) => rejected += 1,
            _ => failed.push(entry.name),
        }
    }
    Ok((
        failed.is_empty(),
        format!("{held} hold, {rejected} rejected as too rough, failing {failed:?}"),
    ))
}

/// Pairs `(g, h)` of order-0 sequences for the round trip.
pub fn iso_pairs(params: QuasiNormParams) -> Vec<(FundamentalSeq, FundamentalSeq)> {
    let s = sequence_corpus(0, params);
    vec![
        (
            FundamentalSeq::constant("hat", PiecewisePoly::hat(0.0, 2.0, 1.0), 0, params),
            FundamentalSeq::zero(0, params),
        ),
        (
            FundamentalSeq::zero(0, params),
            FundamentalSeq::constant("box", PiecewisePoly::boxcar(0.0, 1.0, 1.0), 0, params),
        ),
        (s[0].clone(), s[1].clone()),
        (s[2].clone(), s[3].clone()),
        (s[4].clone(), FundamentalSeq::zero(0, params)),
    ]
}

fn p_tag(p: f64) -> String {
    format!("p{p}")
}

/// Runs every check, writes the per-construction CSV and SVG files and
/// `suite.csv` under `out_dir`.
///
/// Retraction and round-trip rows run at `k = 1` and section rows at
/// `k ≤ 2`, the orders their depths admit in double precision; bump rows
/// cover every configured `k` at `j = 1..=10`.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteSummary> {
    config.validate()?;
    let probe = config.probe()?;
    let mut r = Runner {
        config,
        rows: Vec::new(),
        files: Vec::new(),
    };
    for &p in &config.p_values {
        let (ok, detail) = quadrature_row(p)?;
        r.push(format!("quadrature p={p}"), ok, detail);
        let (ok, detail) = laws_row(p, config.seed)?;
        r.push(format!("laws p={p}"), ok, detail);
        for &k in &config.k_values {
            let (ok, detail) = identity_row(p, k)?;
            r.push(format!("identity p={p} k={k}"), ok, detail);
        }
        r.pathology(
            format!("douady p={p}"),
            "douady",
            p_tag(p),
            douady_run(p, DOUADY_EXPONENT, &probe.depths, config.threshold),
        )?;
        for &k in &config.k_values {
            r.pathology(
                format!("psi p={p} k={k}"),
                "psi",
                format!("{}_k{k}", p_tag(p)),
                psi_run(p, k, &PSI_INDICES),
            )?;
        }
        let l0 = QuasiNormParams::new(p, 0)?;
        for entry in corpus() {
            r.pathology(
                format!("beta p={p} k=1 {}", entry.name),
                "beta",
                format!("{}_k1_{}", p_tag(p), entry.name),
                beta_run(&entry.f, entry.name, p, 1, &BETA_DEPTHS, config.threshold),
            )?;
        }
        for &k in config.k_values.iter().filter(|&&k| k <= 2) {
            for (i, g) in sequence_corpus(k - 1, QuasiNormParams::new(p, k - 1)?)
                .iter()
                .enumerate()
            {
                r.pathology(
                    format!("delta-section p={p} k={k} {}", g.label()),
                    "delta-section",
                    format!("{}_k{k}_seq{i}", p_tag(p)),
                    section_run(g, k, &probe),
                )?;
            }
        }
        if config.k_values.contains(&1) {
            for (i, (g, h)) in iso_pairs(l0).iter().enumerate() {
                r.pathology(
                    format!("iso-roundtrip p={p} ({}, {})", g.label(), h.label()),
                    "iso",
                    format!("{}_pair{i}", p_tag(p)),
                    iso_run(g, h, 1, &probe),
                )?;
            }
            for (i, f) in sequence_corpus(1, QuasiNormParams::new(p, 1)?)
                .iter()
                .enumerate()
            {
                r.pathology(
                    format!("iso-reverse p={p} {}", f.label()),
                    "iso",
                    format!("{}_seq{i}", p_tag(p)),
                    iso_reverse_run(f, &probe),
                )?;
            }
        }
    }
    let summary_path = config.out_dir.join("suite.csv");
    let mut summary = SuiteSummary {
        rows: r.rows,
        files: r.files,
    };
    write(&summary_path, &summary.to_csv())?;
    summary.files.push(summary_path);
    Ok(summary)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
