//! Gamma and Beta functions.
//!
//! The incomplete Beta function here is the unnormalized integral
//!
//! ```text
//! B(x; a, b) = ∫₀ˣ t^{a-1} (1-t)^{b-1} dt
//! ```
//!
//! and is defined for `b ≤ 0` as long as `x < 1`.

use crate::{Error, Result};

const MAX_ITER: usize = 500;

/// Γ(x) for real `x` away from the poles at non-positive integers.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if (20.0..170.0).contains(&x) {
        gamma(x).ln()
    } else {
        libm::lgamma(x)
    }
}

/// Complete Beta function 𝓑(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_complete(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("beta_complete requires a, b > 0, got ({a}, {b})")));
    }
    Ok(beta_pos(a, b))
}

fn beta_pos(a: f64, b: f64) -> f64 {
    if a + b < 170.0 {
        gamma(a) * gamma(b) / gamma(a + b)
    } else {
        (ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b)).exp()
    }
}

fn check_params(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("incomplete Beta requires a > 0 and finite b, got ({a}, {b})")));
    }
    Ok(())
}

/// Unnormalized incomplete Beta function B(x; a, b).
///
/// For `b > 0` the value at `x = 1` is 𝓑(a, b). For `b ≤ 0` the integral
/// diverges at `x = 1` and that point is rejected.
pub fn beta_incomplete(x: f64, a: f64, b: f64) -> Result<f64> {
    check_params(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("incomplete Beta requires x in [0, 1], got {x}")));
    }
    if x == 1.0 && b <= 0.0 {
        return Err(Error::NonConvergence(format!("B(1; a, b) diverges for b = {b} ≤ 0")));
    }
    Ok(beta_inc_xz(x, 1.0 - x, a, b))
}

/// B(1 - z; a, b) evaluated from the complement `z` without cancellation.
pub(crate) fn beta_incomplete_upper(z: f64, a: f64, b: f64) -> f64 {
    beta_inc_xz(1.0 - z, z, a, b)
}

/// Core evaluation with `x + z = 1`, where whichever of the two is small is
/// trusted to full relative precision.
fn beta_inc_xz(x: f64, z: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if b > 0.0 {
        if z <= 0.0 {
            return beta_pos(a, b);
        }
        if x < (a + 1.0) / (a + b + 2.0) {
            x.powf(a) * z.powf(b) * beta_cf(a, b, x) / a
        } else {
            beta_pos(a, b) - z.powf(b) * x.powf(a) * beta_cf(b, a, z) / b
        }
    } else if x <= 0.5 {
        lower_series(x, a, b)
    } else {
        lower_series(0.5, a, b) + upper_piece(z, a, b)
    }
}

/// Continued fraction for the incomplete Beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// x^a Σ (1-b)_n/n! x^n/(a+n), used for x ≤ 1/2 and b ≤ 0 (all terms positive).
fn lower_series(x: f64, a: f64, b: f64) -> f64 {
    let mut coef = 1.0;
    let mut sum = 1.0 / a;
    for n in 1..MAX_ITER {
        let nf = n as f64;
        coef *= (nf - b) / nf * x;
        let term = coef / (a + nf);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    x.powf(a) * sum
}

/// ∫_z^{1/2} (1-s)^{a-1} s^{b-1} ds by expanding (1-s)^{a-1} in powers of s.
fn upper_piece(z: f64, a: f64, b: f64) -> f64 {
    if z >= 0.5 {
        return 0.0;
    }
    let log_ratio = (0.5f64).ln() - z.ln();
    let mut coef = 1.0;
    let mut sum = 0.0;
    for k in 0..MAX_ITER {
        if k > 0 {
            let kf = k as f64;
            coef *= (kf - a) / kf;
        }
        let c = k as f64 + b;
        let piece = power_difference(z, c, log_ratio);
        let term = coef * piece;
        sum += term;
        if k > 2 && term.abs() <= 1e-17 * sum.abs() && c > 0.0 {
            break;
        }
        if coef == 0.0 && c > 0.0 {
            break;
        }
    }
    sum
}

/// ((1/2)^c - z^c)/c with the c → 0 limit ln(1/(2z)).
fn power_difference(z: f64, c: f64, log_ratio: f64) -> f64 {
    let y = c * log_ratio;
    if y == 0.0 {
        log_ratio
    } else if y.abs() < 1.0 {
        (c * z.ln()).exp() * log_ratio * y.exp_m1() / y
    } else {
        ((0.5f64).powf(c) - z.powf(c)) / c
    }
}

/// Inverse of the unnormalized incomplete Beta function in its first argument.
///
/// For `b > 0` the admissible range is `[0, 𝓑(a, b)]`; for `b ≤ 0` any
/// `y ≥ 0` is accepted.
pub fn beta_incomplete_inverse(y: f64, a: f64, b: f64) -> Result<f64> {
    Ok(beta_inverse_xz(y, a, b)?.0)
}

/// Inverse returning both `x` and `1 - x`, each to full relative precision.
pub(crate) fn beta_inverse_xz(y: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    check_params(a, b)?;
    if !(y >= 0.0) || y.is_infinite() {
        return Err(Error::Domain(format!("incomplete Beta inverse requires y ≥ 0, got {y}")));
    }
    if y == 0.0 {
        return Ok((0.0, 1.0));
    }
    if b > 0.0 {
        let total = beta_pos(a, b);
        if y > total * (1.0 + 1e-14) {
            return Err(Error::Domain(format!("y = {y} exceeds the complete Beta value {total}")));
        }
        if y >= total {
            return Ok((1.0, 0.0));
        }
    }
    let y_half = beta_inc_xz(0.5, 0.5, a, b);
    let deriv = |x: f64, z: f64| (a - 1.0) * x.ln() + (b - 1.0) * z.ln();
    if y <= y_half {
        let guess = (a * y).powf(1.0 / a).min(0.5);
        let x =
            safeguarded_solve(|x| beta_inc_xz(x, 1.0 - x, a, b) - y, |x| deriv(x, 1.0 - x).exp(), 0.0, 0.5, guess, y);
        Ok((x, 1.0 - x))
    } else {
        let z =
            safeguarded_solve(|z| y - beta_inc_xz(1.0 - z, z, a, b), |z| deriv(1.0 - z, z).exp(), 0.0, 0.5, 0.25, y);
        Ok((1.0 - z, z))
    }
}

/// Root of an increasing function on `[lo, hi]` by Newton steps that fall back
/// to bisection (geometric when the bracket spans decades).
fn safeguarded_solve<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, guess: f64, scale: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= 1e-16 * scale {
            return x;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            return 0.5 * (lo + hi);
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d.is_finite() && d > 0.0 && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else if lo == 0.0 && hi > 1e-290 {
            hi * 1e-3
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_at_integers_and_halves() {
        let mut fact = 1.0;
        for n in 1..20 {
            let rel = (gamma(n as f64) - fact).abs() / fact;
            assert!(rel < 1e-14, "n = {n}: {rel:e}");
            fact *= n as f64;
        }
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn incomplete_beta_uniform_integrand() {
        for &x in &[0.0, 0.1, 0.5, 0.77, 1.0] {
            assert!((beta_incomplete(x, 1.0, 1.0).unwrap() - x).abs() < 1e-15);
        }
    }

    #[test]
    fn b_nonpositive_rejects_x_one() {
        assert!(matches!(beta_incomplete(1.0, 0.5, -0.5), Err(Error::NonConvergence(_))));
        assert!(matches!(beta_incomplete(1.0, 0.5, 0.0), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn log_divergent_case_b_zero() {
        // B(x; 1, 0) = -ln(1 - x)
        for &x in &[0.2, 0.6, 0.99, 1.0 - 1e-9] {
            let v = beta_incomplete(x, 1.0, 0.0).unwrap();
            assert!((v + (1.0 - x).ln()).abs() < 1e-13 * v.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn upper_form_matches_direct() {
        let (a, b) = (0.7, -0.3);
        for &z in &[0.4, 0.1, 1e-3] {
            let direct = beta_incomplete(1.0 - z, a, b).unwrap();
            let upper = beta_incomplete_upper(z, a, b);
            assert!((direct - upper).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn inverse_endpoints() {
        assert_eq!(beta_incomplete_inverse(0.0, 0.3, 0.8).unwrap(), 0.0);
        let total = beta_complete(0.3, 0.8).unwrap();
        assert_eq!(beta_incomplete_inverse(total, 0.3, 0.8).unwrap(), 1.0);
        assert!(beta_incomplete_inverse(total * 1.01, 0.3, 0.8).is_err());
    }

    #[test]
    fn inverse_tiny_complement() {
        let (a, b) = (0.5, -0.25);
        let z = 1e-40;
        let y = beta_incomplete_upper(z, a, b);
        let (_, z2) = beta_inverse_xz(y, a, b).unwrap();
        assert!((z2 - z).abs() / z < 1e-10);
    }
}
