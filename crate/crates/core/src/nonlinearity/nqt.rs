//! Not-quite-transcendental (NQT) logistic/logit pair.
//!
//! A positive float `z = m * 2^p` with `m` in `[0.5, 1)` has the piecewise
//! linear base-2 logarithm surrogate `2(m - 1) + p`, exact at every power of
//! two. Reading `m` and `p` straight out of the IEEE-754 fields makes the logit
//! and its exact inverse, the NQT logistic, transcendental-free.
//!
//! The bit layouts use the IEEE mantissa in `[1, 2)` with the exponent shifted
//! by one, which is algebraically the same decomposition.

use crate::error::{NvqError, Result};

const F64_FRAC_MASK: u64 = 0x000f_ffff_ffff_ffff;
const F64_ONE_BITS: u64 = 0x3ff0_0000_0000_0000;
/// Clamp on `alpha * (x - x0)` keeping `m * 2^p` a normal double.
const F64_ARG_LIMIT: f64 = 1000.0;

/// Piecewise-linear `log2` read from the bit pattern. `z` must be positive and
/// finite.
#[inline]
pub(crate) fn log2_bits(z: f64) -> f64 {
    let (z, shift) = if z < f64::MIN_POSITIVE {
        (z * 18_446_744_073_709_551_616.0, 64.0)
    } else {
        (z, 0.0)
    };
    let bits = z.to_bits();
    let p = ((bits >> 52) & 0x7ff) as i64 - 1024;
    let m = f64::from_bits((bits & F64_FRAC_MASK) | F64_ONE_BITS);
    m + p as f64 - shift
}

/// Piecewise-linear interpolation of `log2(z)`, exact at powers of two.
pub fn nqt_log2(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(NvqError::Domain(format!(
            "nqt_log2 requires a positive finite argument, got {z}"
        )));
    }
    Ok(log2_bits(z))
}

#[inline]
pub(crate) fn logit_unchecked(u: f64, inv_alpha: f64, x0: f64) -> f64 {
    log2_bits(u / (1.0 - u)).mul_add(inv_alpha, x0)
}

/// NQT logit: `alpha^-1 * nqt_log2(u / (1 - u)) + x0` for `u` in `(0, 1)`.
pub fn nqt_logit(u: f64, alpha: f64, x0: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(NvqError::Domain(format!(
            "nqt_logit requires u in (0, 1), got {u}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(NvqError::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(logit_unchecked(u, 1.0 / alpha, x0))
}

/// NQT logistic, the exact inverse of [`nqt_logit`].
///
/// With `t = alpha (x - x0)`, `p = floor(t + 1)` and `m = (t - p) / 2 + 1`,
/// returns `m 2^p / (m 2^p + 1)`.
#[inline]
pub fn nqt_logistic(x: f64, alpha: f64, x0: f64) -> f64 {
    let t = (alpha * (x - x0)).clamp(-F64_ARG_LIMIT, F64_ARG_LIMIT);
    let p = (t + 1.0).floor();
    let m = (t - p).mul_add(0.5, 1.0);
    let z = f64::from_bits(m.to_bits().wrapping_add((p as i64 as u64) << 52));
    z / (z + 1.0)
}

/// Single-precision NQT logistic, bit for bit the reference kernel.
#[inline]
pub fn nqt_logistic_f32(x: f32, alpha: f32, x0: f32) -> f32 {
    let t = x.mul_add(alpha, -alpha * x0).clamp(-126.0, 126.0);
    let p = (t + 0.5).round() as i32;
    let m = ((t - p as f32).mul_add(0.5, 1.0)).to_bits() as i32;
    let z = f32::from_bits(m.wrapping_add(p << 23) as u32);
    z / (z + 1.0)
}

/// Single-precision NQT logit taking the precomputed `1 / alpha`.
#[inline]
pub fn nqt_logit_f32(u: f32, inv_alpha: f32, x0: f32) -> f32 {
    let z = u / (1.0 - u);
    let bits = z.to_bits() as i32;
    let e = bits & 0x7f80_0000;
    let p = ((e >> 23) - 128) as f32;
    let m = f32::from_bits(((bits & 0x007f_ffff) + 0x3f80_0000) as u32);
    (m + p).mul_add(inv_alpha, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_exact_at_powers_of_two() {
        assert_eq!(nqt_log2(1.0).unwrap(), 0.0);
        assert_eq!(nqt_log2(8.0).unwrap(), 3.0);
        assert_eq!(nqt_log2(0.25).unwrap(), -2.0);
        assert_eq!(nqt_log2(1.5).unwrap(), 0.5);
        for p in -1070..1000 {
            let z = if p < -1022 {
                f64::from_bits(1u64 << (p + 1074))
            } else {
                2f64.powi(p)
            };
            assert_eq!(nqt_log2(z).unwrap(), p as f64, "2^{p}");
        }
    }

    #[test]
    fn log2_domain() {
        assert!(nqt_log2(0.0).is_err());
        assert!(nqt_log2(-2.0).is_err());
        assert!(nqt_log2(f64::NAN).is_err());
        assert!(nqt_log2(f64::INFINITY).is_err());
    }

    #[test]
    fn logit_examples() {
        assert_eq!(nqt_logit(0.5, 3.0, 0.1).unwrap(), 0.1);
        assert!((nqt_logit(2.0 / 3.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((nqt_logit(0.6, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(nqt_logit(0.0, 1.0, 0.0).is_err());
        assert!(nqt_logit(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(nqt_logistic(0.3, 7.0, 0.3), 0.5);
        assert_eq!(nqt_logistic(1.0, 1.0, 0.0), 2.0 / 3.0);
        assert!(nqt_logistic(-1e9, 5.0, 0.0) < 1e-300);
        assert_eq!(nqt_logistic(1e9, 5.0, 0.0), 1.0);
    }

    #[test]
    fn f32_kernels_match_f64() {
        // Away from saturation, where single precision still resolves 1 - u.
        for i in -200..=200 {
            let x = i as f32 * 0.01;
            let want = nqt_logistic(x as f64, 4.0, 0.25);
            let got = nqt_logistic_f32(x, 4.0, 0.25) as f64;
            assert!((got - want).abs() < 1e-6, "x={x}: {got} vs {want}");
            let back = nqt_logit_f32(got as f32, 0.25, 0.25) as f64;
            assert!((back - x as f64).abs() < 1e-4, "x={x}: back {back}");
        }
    }
}
