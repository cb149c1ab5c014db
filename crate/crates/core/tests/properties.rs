use proptest::prelude::*;
use quasisobolev::corpus::{bspline, random_splines};
use quasisobolev::sequences::{seq_equal, CauchyProbe, FundamentalSeq};
use quasisobolev::{
    lp_quasinorm, quasi_distance, sobolev_quasinorm, PiecewisePoly, QuasiNormParams,
    SmoothnessOrder,
};

fn close(a: f64, b: f64, slack: f64) -> bool {
    (a - b).abs() <= slack + 1e-9 * a.abs().max(b.abs())
}

fn arb_poly() -> impl Strategy<Value = PiecewisePoly> {
    (1usize..5, -2.0f64..2.0)
        .prop_flat_map(|(n, x0)| {
            (
                Just(x0),
                prop::collection::vec(0.05f64..1.0, n),
                prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 1..5), n),
            )
        })
        .prop_map(|(x0, widths, pieces)| {
            let mut bps = vec![x0];
            for w in widths {
                bps.push(bps.last().unwrap() + w);
            }
            PiecewisePoly::new(bps, pieces).unwrap()
        })
}

fn arb_spline() -> impl Strategy<Value = PiecewisePoly> {
    any::<u64>().prop_map(|seed| random_splines(seed, 1).remove(0))
}

fn arb_p() -> impl Strategy<Value = f64> {
    0.1f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_exact(f in arb_poly()) {
        let back = PiecewisePoly::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn p_power_is_homogeneous(f in arb_poly(), c in -4.0f64..4.0, p in arb_p()) {
        let params = QuasiNormParams::new(p, 0).unwrap();
        let a = lp_quasinorm(&f.scale(c), &params).unwrap();
        let b = lp_quasinorm(&f, &params).unwrap();
        let scale = c.abs().powf(p);
        prop_assert!(close(a.p_power, scale * b.p_power, a.err_bound + scale * b.err_bound));
    }

    #[test]
    fn p_power_is_subadditive(f in arb_poly(), g in arb_poly(), p in arb_p()) {
        let params = QuasiNormParams::new(p, 0).unwrap();
        let s = lp_quasinorm(&f.add(&g).unwrap(), &params).unwrap();
        let (a, b) = (lp_quasinorm(&f, &params).unwrap(), lp_quasinorm(&g, &params).unwrap());
        prop_assert!(s.p_power <= a.p_power + b.p_power + s.err_bound + a.err_bound + b.err_bound + 1e-12);
    }

    #[test]
    fn translation_invariance_and_dilation_scaling(f in arb_poly(), dx in -3.0f64..3.0, s in 0.25f64..4.0, p in arb_p()) {
        let params = QuasiNormParams::new(p, 0).unwrap();
        let base = lp_quasinorm(&f, &params).unwrap();
        let moved = lp_quasinorm(&f.translate(dx), &params).unwrap();
        prop_assert!(close(moved.p_power, base.p_power, moved.err_bound + base.err_bound));
        let wide = lp_quasinorm(&f.dilate(s), &params).unwrap();
        prop_assert!(close(wide.p_power, s * base.p_power, wide.err_bound + s * base.err_bound));
    }

    #[test]
    fn evaluation_is_linear(f in arb_poly(), g in arb_poly(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..1.0) {
        let h = f.linear_combination(a, &g, b).unwrap();
        let (lo, hi) = (f.support().0.min(g.support().0), f.support().1.max(g.support().1));
        let x = lo + t * (hi - lo);
        prop_assert!(close(h.eval(x), a * f.eval(x) + b * g.eval(x), 1e-9));
    }

    #[test]
    fn antiderivative_inverts_differentiation(f in arb_spline(), t in 0.0f64..1.0) {
        let back = f.differentiate().antiderivative().unwrap();
        let (lo, hi) = f.support();
        let x = lo + t * (hi - lo);
        prop_assert!(close(back.eval(x), f.eval(x), 1e-9));
        prop_assert!(close(back.differentiate().eval(x), f.differentiate().eval(x), 1e-9));
    }

    #[test]
    fn bspline_smoothness_is_degree_minus_one(
        degree in 1usize..=4,
        gaps in prop::collection::vec(0.05f64..1.0, 5),
        x0 in -2.0f64..2.0,
        height in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
    ) {
        let mut knots = vec![x0];
        for g in &gaps[..=degree] {
            knots.push(knots.last().unwrap() + g);
        }
        let f = bspline(&knots, height).unwrap();
        prop_assert_eq!(f.smoothness_order(1e-9), SmoothnessOrder(degree as i32 - 1));
    }

    #[test]
    fn sobolev_norm_dominates_its_lp_part(f in arb_spline(), p in arb_p()) {
        let k = (f.smoothness_order(1e-9).0 + 1) as usize;
        let params = QuasiNormParams::new(p, k).unwrap();
        let full = sobolev_quasinorm(&f, &params).unwrap();
        let lp = lp_quasinorm(&f, &params).unwrap();
        prop_assert!(full.p_power + full.err_bound + lp.err_bound >= lp.p_power);
    }

    #[test]
    fn quasi_distance_is_a_symmetric_p_metric(f in arb_spline(), g in arb_spline(), h in arb_spline(), p in arb_p()) {
        let params = QuasiNormParams::new(p, 1).unwrap();
        let d = |a: &PiecewisePoly, b: &PiecewisePoly| quasi_distance(a, b, &params).unwrap();
        prop_assert_eq!(d(&f, &f).p_power, 0.0);
        let (fg, gf) = (d(&f, &g), d(&g, &f));
        prop_assert!(close(fg.p_power, gf.p_power, fg.err_bound + gf.err_bound));
        let (gh, fh) = (d(&g, &h), d(&f, &h));
        prop_assert!(fh.p_power <= fg.p_power + gh.p_power + fg.err_bound + gh.err_bound + fh.err_bound + 1e-12);
    }

    #[test]
    fn sequence_operations_agree_termwise(f in arb_spline(), g in arb_spline(), a in -2.0f64..2.0) {
        let params = QuasiNormParams::new(0.5, 1).unwrap();
        let probe = CauchyProbe::new(vec![2, 4], 0.05).unwrap();
        let sf = FundamentalSeq::constant("f", f.clone(), 1, params);
        let sg = FundamentalSeq::constant("g", g.clone(), 1, params);
        let combo = sf.linear_combination(a, &sg, 1.0);
        let direct = FundamentalSeq::constant("direct", f.linear_combination(a, &g, 1.0).unwrap(), 1, params);
        prop_assert!(seq_equal(&combo, &direct, 1, &probe).unwrap());
        prop_assert!(seq_equal(&sf, &sf, 1, &probe).unwrap());
    }
}
