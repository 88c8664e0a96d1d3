//! β-bit quantizer `Q(x) = floor((2^β - 1) h(x) + 1/2)`, its lossy inverse
//! `Q^-1(y) = h^-1(y / (2^β - 1))`, reconstruction losses and code packing.

use std::fmt;

use crate::error::{NvqError, Result};
use crate::nonlinearity::{
    Interval, MathMode, Nonlinearity, NonlinearityFamily, NonlinearityParams,
};

/// Bits per code. Only the 4- and 8-bit regimes are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(u8);

impl Bits {
    pub const FOUR: Bits = Bits(4);
    pub const EIGHT: Bits = Bits(8);

    pub fn new(bits: u8) -> Result<Self> {
        match bits {
            4 | 8 => Ok(Bits(bits)),
            _ => Err(NvqError::Config(format!("bits must be 4 or 8, got {bits}"))),
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Largest code, `2^β - 1`.
    pub fn max_code(self) -> u16 {
        (1u16 << self.0) - 1
    }

    /// Bytes needed for `count` packed codes.
    pub fn packed_len(self, count: usize) -> usize {
        (count * self.0 as usize).div_ceil(8)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerConfig {
    pub beta: Bits,
    pub family: NonlinearityFamily,
}

/// A quantizer bound to one (sub)vector's parameters and interval.
///
/// A degenerate interval (constant subvector) quantizes everything to code 0
/// and dequantizes to `x_min`.
#[derive(Debug, Clone, Copy)]
pub struct Quantizer {
    h: Option<Nonlinearity>,
    interval: Interval,
    beta: Bits,
    scale: f64,
}

impl Quantizer {
    pub fn new(params: NonlinearityParams, iv: Interval, beta: Bits) -> Result<Self> {
        Self::with_math(params, iv, beta, MathMode::default())
    }

    pub fn with_math(
        params: NonlinearityParams,
        iv: Interval,
        beta: Bits,
        mode: MathMode,
    ) -> Result<Self> {
        let h = if iv.is_degenerate() {
            None
        } else {
            Some(Nonlinearity::with_math(params, iv, mode)?)
        };
        Ok(Quantizer {
            h,
            interval: iv,
            beta,
            scale: beta.max_code() as f64,
        })
    }

    pub fn beta(&self) -> Bits {
        self.beta
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    #[inline]
    pub fn quantize(&self, x: f64) -> u16 {
        match &self.h {
            None => 0,
            Some(h) => {
                let y = self.scale.mul_add(h.forward(x), 0.5).floor();
                (y as u16).min(self.beta.max_code())
            }
        }
    }

    /// Dequantizes a code that is known to be in range.
    #[inline]
    pub fn dequantize(&self, code: u16) -> f64 {
        match &self.h {
            None => self.interval.x_min,
            Some(h) => h.inverse(code as f64 / self.scale),
        }
    }

    pub fn checked_dequantize(&self, code: u16) -> Result<f64> {
        if code > self.beta.max_code() {
            return Err(NvqError::Domain(format!(
                "code {code} exceeds {} for {}-bit quantization",
                self.beta.max_code(),
                self.beta
            )));
        }
        Ok(self.dequantize(code))
    }

    /// Reconstruction of every code, indexed by code.
    pub fn dequantize_table(&self) -> Vec<f64> {
        (0..=self.beta.max_code())
            .map(|c| self.dequantize(c))
            .collect()
    }

    /// `Σ (x_i - Q^-1(Q(x_i)))^2`, accumulated in double precision.
    pub fn loss(&self, values: &[f64]) -> f64 {
        if values.len() > self.beta.max_code() as usize + 1 {
            let table = self.dequantize_table();
            values
                .iter()
                .map(|&x| {
                    let e = x - table[self.quantize(x) as usize];
                    e * e
                })
                .sum()
        } else {
            values
                .iter()
                .map(|&x| {
                    let e = x - self.dequantize(self.quantize(x));
                    e * e
                })
                .sum()
        }
    }
}

/// `Q(x; h, θ, β)`.
pub fn quantize(x: f64, params: NonlinearityParams, iv: Interval, beta: Bits) -> Result<u16> {
    Ok(Quantizer::new(params, iv, beta)?.quantize(x))
}

/// `Q^-1(y; h, θ, β)`.
pub fn dequantize(code: u16, params: NonlinearityParams, iv: Interval, beta: Bits) -> Result<f64> {
    Quantizer::new(params, iv, beta)?.checked_dequantize(code)
}

/// Reconstruction error of the parameterless uniform quantizer over `iv`.
pub fn uniform_loss(values: &[f64], iv: Interval, beta: Bits) -> f64 {
    Quantizer::new(NonlinearityParams::uniform(), iv, beta)
        .expect("uniform parameters are always feasible")
        .loss(values)
}

/// Reconstruction error `ℓ_h(θ)` of the nonlinear quantizer.
pub fn nvq_loss(
    values: &[f64],
    params: NonlinearityParams,
    iv: Interval,
    beta: Bits,
) -> Result<f64> {
    Ok(Quantizer::new(params, iv, beta)?.loss(values))
}

/// Improvement of `params` over uniform quantization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveRatio {
    /// `ℓ_unif / ℓ_h`; above 1 is an improvement.
    pub value: f64,
    /// The uniform quantizer was already lossless, so the ratio is pinned to 1.
    pub uniform_exact: bool,
}

/// `ℓ_unif(∅) / ℓ_h(θ)`, defined as 1 when the uniform loss is zero.
pub fn objective_ratio(
    values: &[f64],
    params: NonlinearityParams,
    iv: Interval,
    beta: Bits,
) -> Result<ObjectiveRatio> {
    let unif = uniform_loss(values, iv, beta);
    if unif == 0.0 {
        return Ok(ObjectiveRatio {
            value: 1.0,
            uniform_exact: true,
        });
    }
    let loss = nvq_loss(values, params, iv, beta)?;
    Ok(ObjectiveRatio {
        value: unif / loss,
        uniform_exact: false,
    })
}

/// Packed β-bit codes. With 4 bits the earlier element sits in the low nibble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlock {
    beta: Bits,
    count: usize,
    bytes: Vec<u8>,
}

impl CodeBlock {
    /// Wraps packed bytes, validating length and nibble padding.
    pub fn from_bytes(beta: Bits, count: usize, bytes: Vec<u8>) -> Result<Self> {
        if bytes.len() != beta.packed_len(count) {
            return Err(NvqError::Domain(format!(
                "{} packed bytes for {count} {beta}-bit codes",
                bytes.len()
            )));
        }
        if beta.get() == 4 && count % 2 == 1 && bytes[count / 2] >> 4 != 0 {
            return Err(NvqError::Domain("non-zero padding nibble".into()));
        }
        Ok(CodeBlock { beta, count, bytes })
    }

    pub fn beta(&self) -> Bits {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> u16 {
        debug_assert!(i < self.count);
        match self.beta.get() {
            8 => self.bytes[i] as u16,
            _ => ((self.bytes[i / 2] >> ((i % 2) * 4)) & 0x0f) as u16,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }
}

/// Packs codes, rejecting any code above `2^β - 1`.
pub fn pack_codes(codes: &[u16], beta: Bits) -> Result<CodeBlock> {
    let max = beta.max_code();
    if let Some((i, &c)) = codes.iter().enumerate().find(|(_, &c)| c > max) {
        return Err(NvqError::Domain(format!(
            "code {c} at position {i} does not fit in {beta} bits"
        )));
    }
    let bytes = match beta.get() {
        8 => codes.iter().map(|&c| c as u8).collect(),
        _ => codes
            .chunks(2)
            .map(|pair| pair[0] as u8 | (pair.get(1).copied().unwrap_or(0) as u8) << 4)
            .collect(),
    };
    Ok(CodeBlock {
        beta,
        count: codes.len(),
        bytes,
    })
}

pub fn unpack_codes(block: &CodeBlock) -> Vec<u16> {
    block.iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn bits_validation() {
        assert!(Bits::new(4).is_ok());
        assert!(Bits::new(8).is_ok());
        assert!(Bits::new(2).is_err());
        assert!(Bits::new(16).is_err());
        assert_eq!(Bits::EIGHT.max_code(), 255);
        assert_eq!(Bits::FOUR.packed_len(5), 3);
    }

    #[test]
    fn quantize_examples() {
        let u = NonlinearityParams::uniform();
        assert_eq!(quantize(0.5, u, unit(), Bits::EIGHT).unwrap(), 128);
        let iv = Interval::new(-0.3, 0.7).unwrap();
        for p in [
            u,
            NonlinearityParams::kumaraswamy(2.0, 3.0),
            NonlinearityParams::loglog(9.0, 0.0),
            NonlinearityParams::nqt(9.0, 0.1),
        ] {
            for beta in [Bits::FOUR, Bits::EIGHT] {
                assert_eq!(quantize(-0.3, p, iv, beta).unwrap(), 0);
                assert_eq!(quantize(0.7, p, iv, beta).unwrap(), beta.max_code());
            }
        }
    }

    #[test]
    fn infeasible_params_rejected() {
        let p = NonlinearityParams::kumaraswamy(-1.0, 1.0);
        assert!(matches!(
            quantize(0.5, p, unit(), Bits::EIGHT),
            Err(NvqError::Constraint(_))
        ));
    }

    #[test]
    fn dequantize_examples() {
        let u = NonlinearityParams::uniform();
        let iv = Interval::new(-2.0, 5.0).unwrap();
        assert_eq!(dequantize(0, u, iv, Bits::EIGHT).unwrap(), -2.0);
        assert_eq!(dequantize(255, u, iv, Bits::EIGHT).unwrap(), 5.0);
        let x = dequantize(128, u, unit(), Bits::EIGHT).unwrap();
        assert!((x - 128.0 / 255.0).abs() < 1e-15);
        assert!(dequantize(16, u, unit(), Bits::FOUR).is_err());
    }

    #[test]
    fn degenerate_interval_quantizes_to_zero() {
        let iv = Interval::new(0.25, 0.25).unwrap();
        let q = Quantizer::new(NonlinearityParams::loglog(5.0, 0.0), iv, Bits::EIGHT).unwrap();
        assert_eq!(q.quantize(0.25), 0);
        assert_eq!(q.dequantize(0), 0.25);
        assert_eq!(uniform_loss(&[0.25; 7], iv, Bits::EIGHT), 0.0);
    }

    #[test]
    fn uniform_loss_of_grid_points_is_zero() {
        let iv = Interval::new(-1.0, 2.0).unwrap();
        let v: Vec<f64> = (0..=15).map(|k| -1.0 + 3.0 * k as f64 / 15.0).collect();
        assert!(uniform_loss(&v, iv, Bits::FOUR) < 1e-28);
    }

    /// Independent scalar rounding: nearest grid point of an evenly spaced grid.
    fn brute_force_uniform(v: &[f64], beta: u32) -> f64 {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let levels = (1u32 << beta) - 1;
        let step = (hi - lo) / levels as f64;
        v.iter()
            .map(|&x| {
                (0..=levels)
                    .map(|k| lo + k as f64 * step)
                    .map(|g| (x - g) * (x - g))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    #[test]
    fn uniform_loss_matches_scalar_rounding_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..768)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let iv = Interval::of(&v).unwrap();
        for (beta, b) in [(Bits::FOUR, 4), (Bits::EIGHT, 8)] {
            let got = uniform_loss(&v, iv, beta);
            let want = brute_force_uniform(&v, b);
            assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn nvq_loss_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        let iv = Interval::of(&v).unwrap();
        let ident = NonlinearityParams::kumaraswamy(1.0, 1.0);
        let a = Quantizer::with_math(ident, iv, Bits::EIGHT, MathMode::Exact)
            .unwrap()
            .loss(&v);
        let b = uniform_loss(&v, iv, Bits::EIGHT);
        assert!(((a - b) / b).abs() < 1e-9);
        let single = [iv.x_min];
        assert_eq!(
            nvq_loss(
                &single,
                NonlinearityParams::loglog(3.0, 0.0),
                Interval::new(iv.x_min, iv.x_max).unwrap(),
                Bits::FOUR
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn finer_grid_never_loses() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let v: Vec<f64> = (0..512)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let iv = Interval::of(&v).unwrap();
            let (lo, hi) = iv.scaled_bounds();
            let p =
                NonlinearityParams::loglog(rng.random_range(1.0..20.0), rng.random_range(lo..hi));
            let l8 = nvq_loss(&v, p, iv, Bits::EIGHT).unwrap();
            let l4 = nvq_loss(&v, p, iv, Bits::FOUR).unwrap();
            assert!(l8 <= l4);
        }
    }

    #[test]
    fn ratio_composes_losses() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v: Vec<f64> = (0..768)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let iv = Interval::of(&v).unwrap();
        let p = NonlinearityParams::nqt(6.0, 0.0);
        let r = objective_ratio(&v, p, iv, Bits::EIGHT).unwrap();
        let want = uniform_loss(&v, iv, Bits::EIGHT) / nvq_loss(&v, p, iv, Bits::EIGHT).unwrap();
        assert!((r.value - want).abs() <= 1e-12 * want);
        assert!(!r.uniform_exact);

        let ident = objective_ratio(&v, NonlinearityParams::uniform(), iv, Bits::EIGHT).unwrap();
        assert_eq!(ident.value, 1.0);

        let grid = [0.0, 0.2, 1.0];
        let r = objective_ratio(&grid, p, unit(), Bits::EIGHT).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.uniform_exact);
    }

    #[test]
    fn pack_examples() {
        let b = pack_codes(&[3, 10], Bits::FOUR).unwrap();
        assert_eq!(b.as_bytes(), &[0xA3]);
        let b = pack_codes(&[1, 200, 255], Bits::EIGHT).unwrap();
        assert_eq!(b.as_bytes(), &[1, 200, 255]);
        let b = pack_codes(&[1, 2, 15], Bits::FOUR).unwrap();
        assert_eq!(b.as_bytes(), &[0x21, 0x0f]);
        assert!(pack_codes(&[16], Bits::FOUR).is_err());
        assert!(pack_codes(&[256], Bits::EIGHT).is_err());
        assert!(CodeBlock::from_bytes(Bits::FOUR, 3, vec![0]).is_err());
    }

    proptest! {
        #[test]
        fn pack_round_trip(bits in prop_oneof![Just(4u8), Just(8u8)], raw in proptest::collection::vec(0u16..256, 0..99)) {
            let beta = Bits::new(bits).unwrap();
            let codes: Vec<u16> = raw.iter().map(|c| c & beta.max_code()).collect();
            let block = pack_codes(&codes, beta).unwrap();
            prop_assert_eq!(block.as_bytes().len(), beta.packed_len(codes.len()));
            prop_assert_eq!(unpack_codes(&block), codes);
        }

        #[test]
        fn uniform_error_bound(lo in -5.0f64..5.0, w in 1e-3f64..10.0, t in 0.0f64..1.0, bits in prop_oneof![Just(4u8), Just(8u8)]) {
            let beta = Bits::new(bits).unwrap();
            let iv = Interval::new(lo, lo + w).unwrap();
            let x = lo + t * w;
            let q = Quantizer::new(NonlinearityParams::uniform(), iv, beta).unwrap();
            let err = (x - q.dequantize(q.quantize(x))).abs();
            prop_assert!(err <= w / (2.0 * beta.max_code() as f64) * (1.0 + 1e-9));
        }
    }
}
