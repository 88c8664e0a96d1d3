//! Single-precision minimax kernels for `exp` and `ln`.
//!
//! Both kernels work directly on the IEEE-754 bit pattern: `fast_log` splits
//! off the exponent with an integer subtraction and evaluates a polynomial in
//! `m - 1`, `fast_exp` reduces to `2^i * 2^f` with `|f| <= 1/2`, evaluates a
//! degree-4 polynomial for `2^f` and injects `i` into the exponent field.
//! Powers are built from the identity `x^c = exp(c ln x)`.

#![allow(clippy::excessive_precision)]

use std::f32::consts::LOG2_E;

use crate::error::{NvqError, Result};

/// `1.5 * 2^23`: adding and subtracting it rounds to the nearest integer.
const ROUND_CVT: f32 = 12_582_912.0;
/// Below this the result is zero or subnormal in single precision.
const EXP_MIN: f32 = -87.336_54;
const EXP_MAX: f32 = 88.722_84;

/// Approximates `e^x` with relative error around `2e-6` on `[-87, 87]`.
///
/// Arguments below the single-precision range underflow to `0`, arguments
/// above it overflow to `+inf`.
#[inline]
pub fn fast_exp(x: f32) -> f32 {
    if x.is_nan() {
        return x;
    }
    if x < EXP_MIN {
        return 0.0;
    }
    if x > EXP_MAX {
        return f32::INFINITY;
    }
    let t = x * LOG2_E;
    let r = (t + ROUND_CVT) - ROUND_CVT;
    let f = t - r;
    let i = r as i32;
    let mut p = f.mul_add(0.009_651_907_610_706_037, 0.055_934_796_319_978_87);
    p = p.mul_add(f, 0.240_230_155_143_767_4);
    p = p.mul_add(f, 0.693_118_623_201_287_7);
    p = p.mul_add(f, 0.999_999_388_768_210_4);
    f32::from_bits((p.to_bits() as i32).wrapping_add(i << 23) as u32)
}

/// Approximates `ln x` for positive, normal `x`.
///
/// The input is not checked; see [`checked_fast_log`].
#[inline]
pub fn fast_log(x: f32) -> f32 {
    let bits = x.to_bits() as i32;
    let e = bits.wrapping_sub(0x3f2a_aaab) & (0xff80_0000_u32 as i32);
    let m = f32::from_bits(bits.wrapping_sub(e) as u32);
    let i = e as f32 * 1.192_092_90e-7;
    let f = m - 1.0;
    let s = f * f;
    let mut r = 0.230_836_749_f32.mul_add(f, -0.279_208_571);
    let t = 0.331_826_031_f32.mul_add(f, -0.498_910_338);
    r = r.mul_add(s, t);
    r = r.mul_add(s, f);
    i.mul_add(0.693_147_182, r)
}

/// [`fast_log`] with its domain enforced.
pub fn checked_fast_log(x: f32) -> Result<f32> {
    if !(x > 0.0) || !x.is_finite() || !x.is_normal() {
        return Err(NvqError::Domain(format!(
            "fast_log requires a positive normal finite argument, got {x}"
        )));
    }
    Ok(fast_log(x))
}

/// `x^c` for `x >= 0` and `c > 0`, computed as `fast_exp(c * fast_log(x))`.
#[inline]
pub fn fast_powf(x: f32, c: f32) -> f32 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln = if x < f32::MIN_POSITIVE {
        fast_log(x * 16_777_216.0) - 16.635_532
    } else {
        fast_log(x)
    };
    fast_exp(c * ln)
}
