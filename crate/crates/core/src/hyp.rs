//! Generalized hypergeometric series ₁F₂[a; b, c; x].

use crate::error::{Error, Result};

/// Series cap; arguments in the supported range converge in far fewer terms.
const MAX_TERMS: usize = 10_000;

/// Default bound on |x|; beyond it the alternating series loses too much
/// precision in f64 to honor the accuracy contract.
pub const DEFAULT_X_LIMIT: f64 = 1.0e4;

/// ₁F₂[a; b, c; x] = Σ_k (a)_k / ((b)_k (c)_k) · xᵏ/k!, evaluated by term
/// recursion with compensated summation and convergence detection.
pub fn hyp1f2(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp1f2_with_limit(a, b, c, x, DEFAULT_X_LIMIT)
}

/// [`hyp1f2`] with an explicit bound on |x|.
pub fn hyp1f2_with_limit(a: f64, b: f64, c: f64, x: f64, x_limit: f64) -> Result<f64> {
    for (label, v) in [("a", a), ("b", b), ("c", c), ("x", x)] {
        if !v.is_finite() {
            return Err(Error::domain("hyp1f2", format!("{label} must be finite")));
        }
    }
    for (label, v) in [("b", b), ("c", c)] {
        if v <= 0.0 && v.fract() == 0.0 {
            return Err(Error::domain(
                "hyp1f2",
                format!("{label} = {v} is a non-positive integer (Pochhammer pole)"),
            ));
        }
    }
    if x.abs() > x_limit {
        return Err(Error::domain(
            "hyp1f2",
            format!("|x| = {} exceeds the series limit {x_limit}", x.abs()),
        ));
    }

    // Kahan-compensated sum; term ratio t_{k+1}/t_k = (a+k)x / ((b+k)(c+k)(k+1))
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut small_streak = 0u32;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * x / ((b + kf) * (c + kf) * (kf + 1.0));
        if !term.is_finite() {
            return Err(Error::NonConvergence {
                context: "hyp1f2",
                message: format!("term overflowed at k = {}", k + 1),
            });
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        if term.abs() <= f64::EPSILON * sum.abs().max(1e-300) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonConvergence {
        context: "hyp1f2",
        message: format!("no term decay within {MAX_TERMS} terms (a={a}, b={b}, c={c}, x={x})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sum_is_one() {
        for (a, b, c) in [(0.5, 0.5, 1.5), (25.0, 0.5, 26.0), (-3.0, 2.0, 7.0)] {
            assert_eq!(hyp1f2(a, b, c, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn unit_parameters_reduce_to_squared_factorial_series() {
        // (1)_k / ((1)_k (1)_k) · xᵏ/k! = xᵏ/(k!)², i.e. I₀(2√x)
        let x = 0.5;
        let mut expected = 0.0f64;
        let mut term = 1.0f64;
        for k in 0..60 {
            expected += term;
            let kf = (k + 1) as f64;
            term *= x / (kf * kf);
        }
        let got = hyp1f2(1.0, 1.0, 1.0, x).unwrap();
        assert!((got - expected).abs() / expected < 1e-14, "got {got}, expected {expected}");
    }

    #[test]
    fn a_equals_b_collapses_to_0f1() {
        // ₁F₂[a; a, 1/2; -θ²] = ₀F₁(; 1/2; -θ²) = cos(2θ)
        let theta: f64 = 0.7;
        let got = hyp1f2(7.0, 7.0, 0.5, -theta * theta).unwrap();
        let expected = (2.0 * theta).cos();
        assert!((got - expected).abs() < 1e-14, "got {got}, expected {expected}");
    }

    #[test]
    fn matches_compensated_reference_sum() {
        // independent route: for a = g/2, b = 1/2, c = 1 + g/2 the k-th term
        // reduces exactly to (g/2)/(g/2+k) · (4x)ᵏ/(2k)!, summed directly
        // with compensation
        let (g, theta) = (50.0f64, std::f64::consts::FRAC_PI_2);
        let (a, b, c, x) = (g / 2.0, 0.5, 1.0 + g / 2.0, -theta * theta);
        let mut reference = 0.0f64;
        let mut comp = 0.0f64;
        let mut pow4x = 1.0f64;
        let mut fact2k = 1.0f64;
        for k in 0..60u32 {
            let kf = k as f64;
            if k > 0 {
                pow4x *= 4.0 * x;
                fact2k *= (2.0 * kf - 1.0) * (2.0 * kf);
            }
            let term = a / (a + kf) * pow4x / fact2k;
            let y = term - comp;
            let t = reference + y;
            comp = (t - reference) - y;
            reference = t;
        }
        let got = hyp1f2(a, b, c, x).unwrap();
        assert!(
            (got - reference).abs() / reference.abs() < 1e-12,
            "got {got}, reference {reference}"
        );
    }

    #[test]
    fn pochhammer_pole_rejected() {
        assert!(hyp1f2(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(hyp1f2(1.0, 0.5, -2.0, 0.5).is_err());
        // non-integer negatives are fine
        assert!(hyp1f2(1.0, -0.5, 1.5, 0.5).is_ok());
    }

    #[test]
    fn x_limit_enforced() {
        assert!(hyp1f2(1.0, 0.5, 2.0, -1e8).is_err());
        assert!(hyp1f2_with_limit(1.0, 0.5, 2.0, -1e3, 1e2).is_err());
    }
}
