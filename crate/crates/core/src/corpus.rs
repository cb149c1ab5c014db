//! Fixed, versioned test functions and sequences.
//!
//! Changing any entry changes downstream numbers, so bump [`CORPUS_VERSION`].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::piecewise_poly::PiecewisePoly;
use crate::poly;
use crate::quasinorm::QuasiNormParams;
use crate::sequences::FundamentalSeq;

pub const CORPUS_VERSION: u32 = 2;
pub const CORPUS_SIZE: usize = 20;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub f: PiecewisePoly,
}

/// Polynomial in `s` for the B-spline on `knots` restricted to span `m`,
/// with `x = knots[m] + s`.
fn bspline_span(knots: &[f64], i: usize, d: usize, m: usize) -> Vec<f64> {
    if d == 0 {
        return vec![if i == m { 1.0 } else { 0.0 }];
    }
    let origin = knots[m];
    let mut out = vec![0.0; d + 1];
    let left_den = knots[i + d] - knots[i];
    if left_den > 0.0 {
        // (x − t_i) / (t_{i+d} − t_i)
        let factor = [(origin - knots[i]) / left_den, 1.0 / left_den];
        mul_add(&mut out, &factor, &bspline_span(knots, i, d - 1, m));
    }
    let right_den = knots[i + d + 1] - knots[i + 1];
    if right_den > 0.0 {
        let factor = [(knots[i + d + 1] - origin) / right_den, -1.0 / right_den];
        mul_add(&mut out, &factor, &bspline_span(knots, i + 1, d - 1, m));
    }
    out
}

fn mul_add(acc: &mut [f64], lin: &[f64; 2], c: &[f64]) {
    for (k, &a) in c.iter().enumerate() {
        acc[k] += lin[0] * a;
        if k + 1 < acc.len() {
            acc[k + 1] += lin[1] * a;
        }
    }
}

/// B-spline of degree `knots.len() − 2` on strictly increasing knots, times `height`.
pub fn bspline(knots: &[f64], height: f64) -> Result<PiecewisePoly> {
    let d = knots.len() - 2;
    let pieces = (0..=d)
        .map(|m| {
            poly::trim(
                bspline_span(knots, 0, d, m)
                    .into_iter()
                    .map(|a| a * height)
                    .collect(),
            )
        })
        .collect();
    PiecewisePoly::new(knots.to_vec(), pieces)
}

/// `scale · Π (x − r)^mult` on `[a, b]`, cut at distance `(b − a)/64` from
/// every multiple root, each piece expanded from the root factors in its own
/// local coordinate.
fn polynomial(a: f64, b: f64, roots: &[(f64, usize)], scale: f64) -> Result<PiecewisePoly> {
    let h = (b - a) / 64.0;
    let mut cuts = vec![a, b];
    for &(r, _) in roots.iter().filter(|r| r.1 >= 2) {
        cuts.extend([r - h, r + h].into_iter().filter(|&x| x > a && x < b));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts
        .windows(2)
        .map(|w| {
            let mut c = vec![scale];
            for &(r, mult) in roots {
                for _ in 0..mult {
                    // multiply by (s + x0 − r) in the local variable s = x − x0
                    let mut next = vec![0.0; c.len() + 1];
                    for (k, &v) in c.iter().enumerate() {
                        next[k] += (w[0] - r) * v;
                        next[k + 1] += v;
                    }
                    c = next;
                }
            }
            poly::trim(c)
        })
        .collect();
    PiecewisePoly::new(cuts, pieces)
}

/// The 20 fixed test functions, roughly ordered by smoothness class.
pub fn corpus() -> Vec<CorpusEntry> {
    let e = |name, f: Result<PiecewisePoly>| CorpusEntry {
        name,
        f: f.expect("corpus entries are valid"),
    };
    vec![
        e("hat_unit", Ok(PiecewisePoly::hat(0.0, 1.0, 1.0))),
        e("hat_02", Ok(PiecewisePoly::hat(0.0, 2.0, 1.0))),
        e("hat_tall", Ok(PiecewisePoly::hat(-1.0, 1.0, 3.0))),
        e(
            "hat_skew",
            PiecewisePoly::piecewise_linear(&[(0.0, 0.0), (0.3, 2.0), (1.0, 0.0)]),
        ),
        e("hat_wide_low", Ok(PiecewisePoly::hat(-5.0, 5.0, 0.1))),
        e(
            "trapezoid",
            PiecewisePoly::piecewise_linear(&[(0.0, 0.0), (0.2, 1.0), (0.8, 1.0), (1.0, 0.0)]),
        ),
        e(
            "hat_pair_diff",
            Ok(PiecewisePoly::hat(0.0, 1.0, 1.0)
                .sub(&PiecewisePoly::hat(1.0, 2.0, 1.0))
                .unwrap()),
        ),
        e("spike_thin", Ok(PiecewisePoly::hat(0.5, 0.501, 1000.0))),
        e("quad_bump", bspline(&[0.0, 1.0, 2.0, 3.0], 1.0)),
        e("quad_bump_small", bspline(&[-1.0, -0.5, 0.0, 0.5], 2.0)),
        e("quad_bump_irregular", bspline(&[0.0, 0.1, 0.5, 1.2], 1.0)),
        e(
            "quad_pair_diff",
            bspline(&[0.0, 1.0, 2.0, 3.0], 1.0)
                .and_then(|a| a.sub(&bspline(&[2.0, 3.0, 4.0, 5.0], 1.0)?)),
        ),
        e(
            "wiggle_deg5",
            polynomial(0.0, 1.0, &[(0.0, 2), (1.0, 2), (0.4, 1)], 10.0),
        ),
        e("cubic_bump", bspline(&[0.0, 1.0, 2.0, 3.0, 4.0], 1.0)),
        e(
            "cubic_bump_neg",
            bspline(&[-2.0, -1.5, -1.0, -0.5, 0.0], -1.5),
        ),
        e(
            "cubic_bump_irregular",
            bspline(&[0.0, 0.2, 0.3, 0.7, 1.0], 1.0),
        ),
        e(
            "cubic_pair_diff",
            bspline(&[0.0, 1.0, 2.0, 3.0, 4.0], 1.0).and_then(|a| {
                a.linear_combination(1.0, &bspline(&[1.0, 2.0, 3.0, 4.0, 5.0], 1.0)?, -0.5)
            }),
        ),
        e(
            "spike_cubic",
            bspline(&[0.5, 0.5025, 0.505, 0.5075, 0.51], 50.0),
        ),
        e(
            "smooth_bump6",
            polynomial(0.0, 1.0, &[(0.0, 3), (1.0, 3)], 64.0),
        ),
        e(
            "smooth_wiggle8",
            polynomial(0.0, 1.0, &[(0.0, 3), (1.0, 3), (0.3, 1), (0.7, 1)], 400.0),
        ),
    ]
}

/// Random compactly supported spline: a hat, quadratic or cubic B-spline on
/// random knots with a random height.
pub fn random_spline<R: Rng>(rng: &mut R) -> PiecewisePoly {
    let degree = rng.gen_range(1..=3);
    let mut knots = Vec::with_capacity(degree + 2);
    let mut x = rng.gen_range(-2.0..2.0);
    knots.push(x);
    for _ in 0..=degree {
        x += rng.gen_range(0.05..1.0);
        knots.push(x);
    }
    let height = rng.gen_range(-3.0..3.0);
    bspline(&knots, height).expect("increasing knots")
}

/// Deterministic stream of random splines for a seed.
pub fn random_splines(seed: u64, count: usize) -> Vec<PiecewisePoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spline(&mut rng)).collect()
}

/// Pairs `(f, g)` drawn from the fixed corpus, `g` shifted by a random offset
/// so that supports overlap partially. Also returns a random scale factor.
pub fn corpus_pairs(seed: u64, count: usize) -> Vec<(PiecewisePoly, PiecewisePoly, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = corpus();
    (0..count)
        .map(|_| {
            let f = c[rng.gen_range(0..c.len())].f.clone();
            let g = c[rng.gen_range(0..c.len())]
                .f
                .translate(rng.gen_range(-1.0..1.0));
            let lambda = rng.gen_range(-4.0..4.0);
            (f, g, lambda)
        })
        .collect()
}

/// Five Cauchy sequences of continuous splines converging at rate `j^{-3}`,
/// viewed at `space_order` (0 or 1).
pub fn sequence_corpus(space_order: usize, params: QuasiNormParams) -> Vec<FundamentalSeq> {
    let hat = PiecewisePoly::hat(0.0, 2.0, 1.0);
    let quad = bspline(&[0.0, 1.0, 2.0, 3.0], 1.0).expect("valid knots");
    let cubic = bspline(&[0.0, 1.0, 2.0, 3.0, 4.0], 1.0).expect("valid knots");
    let pair = PiecewisePoly::hat(0.0, 1.0, 1.0)
        .sub(&PiecewisePoly::hat(1.0, 2.0, 1.0))
        .expect("valid");
    let bump = polynomial(0.0, 1.0, &[(0.0, 3), (1.0, 3)], 64.0).expect("valid");
    let small_hat = PiecewisePoly::hat(0.5, 1.5, 1.0);
    let t = |j: usize| (j as f64).powi(-3);
    vec![
        {
            let hat = hat.clone();
            FundamentalSeq::new("hat·(1+j⁻³)", space_order, params, move |j| {
                Ok(hat.scale(1.0 + t(j)))
            })
        },
        FundamentalSeq::new("quad+hat/j³", space_order, params, move |j| {
            quad.linear_combination(1.0, &small_hat, t(j))
        }),
        FundamentalSeq::new("cubic(x−j⁻³)", space_order, params, move |j| {
            Ok(cubic.translate(t(j)))
        }),
        FundamentalSeq::new("pair·(1−j⁻³)", space_order, params, move |j| {
            Ok(pair.scale(1.0 - t(j)))
        }),
        FundamentalSeq::new("bump(x/(1+j⁻³))", space_order, params, move |j| {
            Ok(bump.dilate(1.0 + t(j)))
        }),
    ]
}
