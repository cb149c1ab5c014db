//! Real root isolation by recursive monotone subdivision.

use crate::poly;

const MAX_BISECTIONS: usize = 1100;
/// Critical values this small relative to the local coefficient bound count
/// as touching roots.
const TOUCH_REL_TOL: f64 = 1e-14;

/// All real roots of `c` in `[lo, hi]`, ascending.
///
/// Roots of the derivative split the interval into monotone pieces, each of
/// which holds at most one root, found by bisection to full precision.
pub fn isolate_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = poly::trim(c.to_vec());
    match poly::degree(&c) {
        None | Some(0) => Vec::new(),
        Some(1) => {
            let r = -c[0] / c[1];
            if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            }
        }
        Some(_) => {
            let scale = poly::abs_bound(&c, lo, hi);
            let critical = isolate_roots(&poly::derivative(&c), lo, hi);
            let mut points = Vec::with_capacity(critical.len() + 2);
            points.push(lo);
            points.extend(critical.iter().copied().filter(|&x| x > lo && x < hi));
            points.push(hi);
            let mut roots: Vec<f64> = Vec::new();
            let push = |r: f64, roots: &mut Vec<f64>| {
                if roots.last().is_none_or(|&last| r > last) {
                    roots.push(r);
                }
            };
            let snap = |v: f64| {
                if v.abs() <= TOUCH_REL_TOL * scale {
                    0.0
                } else {
                    v
                }
            };
            for w in points.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (fa, fb) = (
                    snap(poly::eval_compensated(&c, a)),
                    snap(poly::eval_compensated(&c, b)),
                );
                if fa == 0.0 {
                    push(a, &mut roots);
                }
                if fa * fb < 0.0 {
                    push(bisect(&c, a, b, fa), &mut roots);
                }
            }
            if snap(poly::eval_compensated(&c, hi)) == 0.0 {
                push(hi, &mut roots);
            }
            roots
        }
    }
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = poly::eval_compensated(c, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = isolate_roots(&[-0.25, 0.0, 1.0], 0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-13);
        assert!(isolate_roots(&[1.0, 0.0, 1.0], -1.0, 1.0).is_empty());
    }

    #[test]
    fn two_roots_match_brute_force_scan() {
        // (x - 0.3)(x - 0.7) = x^2 - x + 0.21
        let c = [0.21, -1.0, 1.0];
        let mut scanned = Vec::new();
        let step = 1e-6;
        let mut prev = poly::eval(&c, 0.0);
        for i in 1..=1_000_000 {
            let x = i as f64 * step;
            let v = poly::eval(&c, x);
            if prev.signum() != v.signum() {
                scanned.push(x - 0.5 * step);
            }
            prev = v;
        }
        assert_eq!(scanned.len(), 2);
        let r = isolate_roots(&c, 0.0, 1.0);
        assert_eq!(r.len(), 2);
        for (a, b) in r.iter().zip(&scanned) {
            assert!((a - b).abs() < step);
        }
        assert!((r[0] - 0.3).abs() < 1e-13 && (r[1] - 0.7).abs() < 1e-13);
    }

    #[test]
    fn touching_root_is_reported() {
        // (x - 0.4)^2
        let r = isolate_roots(&[0.16, -0.8, 1.0], 0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.4).abs() < 1e-7);
    }

    #[test]
    fn quintic_with_clustered_roots() {
        // (x-0.1)(x-0.2)(x-0.5)(x-0.51)(x-0.9)
        let roots = [0.1, 0.2, 0.5, 0.51, 0.9];
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        let found = isolate_roots(&c, 0.0, 1.0);
        assert_eq!(found.len(), 5);
        for (a, b) in found.iter().zip(roots) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
