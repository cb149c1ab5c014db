//! Dense single-variable polynomials stored as coefficient slices in
//! ascending order, `c[0] + c[1] t + c[2] t^2 + ...`.

pub fn eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// Compensated Horner evaluation: as accurate as Horner in twice the
/// working precision, so values near multiple roots are not rounding noise.
pub fn eval_compensated(c: &[f64], t: f64) -> f64 {
    let Some((&last, rest)) = c.split_last() else {
        return 0.0;
    };
    let (mut s, mut r) = (last, 0.0f64);
    for &a in rest.iter().rev() {
        let prod = s * t;
        let prod_err = s.mul_add(t, -prod);
        let sum = prod + a;
        let back = sum - prod;
        let sum_err = (prod - (sum - back)) + (a - back);
        s = sum;
        r = r.mul_add(t, prod_err + sum_err);
    }
    s + r
}

/// Degree after trimming trailing zeros; `None` for the zero polynomial.
pub fn degree(c: &[f64]) -> Option<usize> {
    c.iter().rposition(|&a| a != 0.0)
}

pub fn is_zero(c: &[f64]) -> bool {
    c.iter().all(|&a| a == 0.0)
}

pub fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    if c.is_empty() {
        c.push(0.0);
    }
    c
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// r-th derivative evaluated at `t`.
pub fn eval_derivative(c: &[f64], r: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    for i in (r..c.len()).rev() {
        let falling: f64 = (i - r + 1..=i).map(|m| m as f64).product();
        acc = acc * t + c[i] * falling;
    }
    acc
}

/// Primitive vanishing at `t = 0`, plus `constant`.
pub fn antiderivative(c: &[f64], constant: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(constant);
    out.extend(c.iter().enumerate().map(|(i, &a)| a / (i + 1) as f64));
    out
}

pub fn integral(c: &[f64], width: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &a)| acc * width + a / (i + 1) as f64)
        * width
}

/// Coefficients of `q(t + s)` (Taylor shift by repeated synthetic division).
pub fn shift(c: &[f64], s: f64) -> Vec<f64> {
    let mut out = c.to_vec();
    if s == 0.0 {
        return out;
    }
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            out[j] += s * out[j + 1];
        }
    }
    out
}

/// Upper bound on `|q|` over `[a, b]`.
pub fn abs_bound(c: &[f64], a: f64, b: f64) -> f64 {
    let shifted = shift(c, a);
    let w = b - a;
    shifted.iter().rev().fold(0.0, |acc, &d| acc * w + d.abs())
}

pub fn add_into(acc: &mut Vec<f64>, c: &[f64], scale: f64) {
    if acc.len() < c.len() {
        acc.resize(c.len(), 0.0);
    }
    for (a, &b) in acc.iter_mut().zip(c) {
        *a += scale * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_evaluation_near_a_triple_root() {
        // (1 - t)^3 expanded; plain Horner returns rounding noise near t = 1
        let c = [1.0, -3.0, 3.0, -1.0];
        for &t in &[1.0 - 1e-4, 1.0 - 1e-5, 1.0 + 1e-5] {
            let exact = (1.0 - t) * (1.0 - t) * (1.0 - t);
            assert!(
                (eval_compensated(&c, t) - exact).abs() <= 1e-12 * exact.abs() + 1e-30,
                "t={t}"
            );
        }
        assert_eq!(eval_compensated(&[], 2.0), 0.0);
        assert_eq!(eval_compensated(&[1.5, 2.0], 2.0), 5.5);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let c = [1.0, -2.0, 0.5, 3.0];
        let s = 0.37;
        let shifted = shift(&c, s);
        for &t in &[0.0, 0.1, -0.4, 1.3] {
            assert!((eval(&shifted, t) - eval(&c, t + s)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_evaluation_agrees_with_repeated_differentiation() {
        let c = [0.3, 1.0, -4.0, 2.0, 0.25];
        let d2 = derivative(&derivative(&c));
        assert!((eval_derivative(&c, 2, 0.7) - eval(&d2, 0.7)).abs() < 1e-12);
        assert_eq!(eval_derivative(&c, 5, 0.7), 0.0);
    }

    #[test]
    fn integral_of_square() {
        assert!((integral(&[0.0, 0.0, 1.0], 1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn abs_bound_dominates_samples() {
        let c = [0.2, -3.0, 1.0, 4.0];
        let b = abs_bound(&c, -1.0, 0.5);
        for i in 0..=100 {
            let t = -1.0 + 1.5 * i as f64 / 100.0;
            assert!(eval(&c, t).abs() <= b);
        }
    }
}
