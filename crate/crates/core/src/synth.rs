//! Synthetic bell-shaped embedding vectors.
//!
//! Entries of vector `i` are sinh-arcsinh transformed standard normals
//!
//! ```text
//! x_ij = offset_j + s_i · sinh((asinh(z_ij) + ε_i) / τ_i)
//! ```
//!
//! with a per-vector scale `s_i`, skew `ε_i` and tail weight `τ_i`, so every
//! vector is bell-shaped but no two share the same distribution. A shared
//! per-coordinate offset gives the dataset a non-zero mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;

use crate::codec::Dataset;
use crate::error::{NvqError, Result};

/// Shape ranges of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    /// Per-vector scale range, in units of `1/sqrt(d)`.
    pub scale: (f64, f64),
    pub skew: (f64, f64),
    /// Tail weight range; values below 1 give heavier than Gaussian tails.
    pub tail: (f64, f64),
    /// Standard deviation of the shared offset, in units of `1/sqrt(d)`.
    pub offset: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            scale: (0.7, 1.3),
            skew: (-0.15, 0.15),
            tail: (0.7, 1.0),
            offset: 0.3,
        }
    }
}

fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// `n` vectors of dimension `d` with the default shape ranges.
pub fn bell_shaped(n: usize, d: usize, seed: u64) -> Result<Dataset> {
    bell_shaped_with(n, d, seed, &SynthParams::default())
}

pub fn bell_shaped_with(n: usize, d: usize, seed: u64, p: &SynthParams) -> Result<Dataset> {
    if d == 0 {
        return Err(NvqError::Config("dimension must be positive".into()));
    }
    if !(p.tail.0 > 0.0 && p.tail.0 <= p.tail.1 && p.scale.0 > 0.0 && p.scale.0 <= p.scale.1)
        || p.skew.0 > p.skew.1
        || !(p.offset >= 0.0)
    {
        return Err(NvqError::Config(format!("invalid generator ranges {p:?}")));
    }
    let unit = 1.0 / (d as f64).sqrt();
    let mut base = ChaCha8Rng::seed_from_u64(seed);
    base.set_stream(u64::MAX);
    let offset_dist = Normal::new(0.0, p.offset * unit).expect("finite deviation");
    let offset: Vec<f64> = (0..d).map(|_| offset_dist.sample(&mut base)).collect();

    let rows: Vec<Vec<f32>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let s = draw(&mut rng, p.scale) * unit;
            let eps = draw(&mut rng, p.skew);
            let tau = draw(&mut rng, p.tail);
            offset
                .iter()
                .map(|&o| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (o + s * ((z.asinh() + eps) / tau).sinh()) as f32
                })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return Dataset::new(d, Vec::new());
    }
    Dataset::from_rows(&rows)
}

/// Sample excess kurtosis of one vector.
pub fn excess_kurtosis(x: &[f32]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().map(|&v| v as f64).sum::<f64>() / n;
    let (m2, m4) = x.iter().fold((0.0, 0.0), |(a, b), &v| {
        let c = v as f64 - mean;
        (a + c * c, b + c * c * c * c)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    m4 / (m2 * m2) - 3.0
}
