//! Kumaraswamy CDF and quantile on the closed unit interval.

use super::fastmath::fast_powf;
use super::MathMode;
use crate::error::{NvqError, Result};

#[inline]
pub(crate) fn pow(x: f64, c: f64, mode: MathMode) -> f64 {
    match mode {
        MathMode::Fast => fast_powf(x as f32, c as f32) as f64,
        MathMode::Exact => x.powf(c),
    }
}

/// `1 - (1 - t^a)^b`, with `t` already clamped to `[0, 1]`.
#[inline]
pub(crate) fn cdf(t: f64, a: f64, b: f64, mode: MathMode) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let inner = (1.0 - pow(t, a, mode)).max(0.0);
    (1.0 - pow(inner, b, mode)).clamp(0.0, 1.0)
}

/// `(1 - (1 - u)^(1/b))^(1/a)`, taking the reciprocals of the shape parameters.
#[inline]
pub(crate) fn icdf(u: f64, inv_a: f64, inv_b: f64, mode: MathMode) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let inner = (1.0 - pow(1.0 - u, inv_b, mode)).max(0.0);
    pow(inner, inv_a, mode).clamp(0.0, 1.0)
}

fn check_shape(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(NvqError::Constraint(format!(
            "Kumaraswamy shapes must be positive, got a={a}, b={b}"
        )));
    }
    Ok(())
}

/// Kumaraswamy CDF `F(t; a, b) = 1 - (1 - t^a)^b` on `[0, 1]`.
///
/// ```
/// # use nvq::nonlinearity::kumaraswamy_cdf;
/// assert_eq!(kumaraswamy_cdf(0.5, 2.0, 2.0).unwrap(), 0.4375);
/// ```
pub fn kumaraswamy_cdf(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(NvqError::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    check_shape(a, b)?;
    Ok(cdf(t, a, b, MathMode::Exact))
}

/// Kumaraswamy quantile `F^-1(u; a, b) = (1 - (1 - u)^(1/b))^(1/a)`.
pub fn kumaraswamy_icdf(u: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(NvqError::Domain(format!("u must lie in [0, 1], got {u}")));
    }
    check_shape(a, b)?;
    Ok(icdf(u, 1.0 / a, 1.0 / b, MathMode::Exact))
}
