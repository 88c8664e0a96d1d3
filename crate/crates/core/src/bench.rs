//! Scalar encode/decode throughput of each nonlinearity.
//!
//! Every family is timed on the same workload: a pool of fitted quantizers,
//! each applied to a fixed block of pseudo-random inputs. Decoding goes
//! through [`Quantizer::dequantize`] directly, without the per-vector lookup
//! table, so the cost of the inverse nonlinearity is what gets measured.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NvqError, Result};
use crate::nonlinearity::{Interval, NonlinearityFamily, NonlinearityParams};
use crate::quantizer::{Bits, Quantizer};

const POOL: usize = 16;
const BLOCK: usize = 4096;

/// Arithmetic cost of one scalar `h` or `h^-1` evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub exp: u32,
    pub log: u32,
    pub fma: u32,
    pub mul: u32,
    pub div: u32,
}

/// Nominal `(encode, decode)` operation counts of a family.
pub fn op_counts(family: NonlinearityFamily) -> (OpCounts, OpCounts) {
    let c = |exp, log, fma, mul, div| OpCounts {
        exp,
        log,
        fma,
        mul,
        div,
    };
    match family {
        NonlinearityFamily::Uniform => (c(0, 0, 1, 0, 0), c(0, 0, 1, 0, 0)),
        NonlinearityFamily::Kumaraswamy => (c(2, 2, 18, 8, 0), c(2, 2, 18, 8, 0)),
        NonlinearityFamily::LogLog => (c(1, 0, 6, 2, 1), c(0, 1, 7, 2, 1)),
        NonlinearityFamily::Nqt => (c(0, 0, 2, 0, 1), c(0, 0, 2, 0, 1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Encode,
    Decode,
}

/// One timed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub family: NonlinearityFamily,
    pub direction: Direction,
    /// Scalar operations timed, warm-up excluded.
    pub ops: u64,
    pub elapsed: Duration,
}

impl Throughput {
    pub fn per_second(&self) -> f64 {
        self.ops as f64 / self.elapsed.as_secs_f64().max(1e-12)
    }
}

fn typical_params(
    family: NonlinearityFamily,
    rng: &mut ChaCha8Rng,
    iv: Interval,
) -> NonlinearityParams {
    let (lo, hi) = iv.scaled_bounds();
    let mid = 0.5 * (lo + hi);
    match family {
        NonlinearityFamily::Uniform => NonlinearityParams::uniform(),
        NonlinearityFamily::Kumaraswamy => {
            NonlinearityParams::kumaraswamy(rng.random_range(0.8..1.6), rng.random_range(0.8..1.6))
        }
        NonlinearityFamily::LogLog => NonlinearityParams::loglog(
            rng.random_range(5.0..15.0),
            mid + rng.random_range(-0.1..0.1),
        ),
        NonlinearityFamily::Nqt => NonlinearityParams::nqt(
            rng.random_range(5.0..15.0),
            mid + rng.random_range(-0.1..0.1),
        ),
    }
}

struct Workload {
    quantizers: Vec<Quantizer>,
    codes: Vec<u16>,
    values: Vec<f64>,
}

fn workload(family: NonlinearityFamily, beta: Bits, seed: u64) -> Result<Workload> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quantizers = (0..POOL)
        .map(|_| {
            let lo = rng.random_range(-0.2..-0.05);
            let hi = rng.random_range(0.05..0.2);
            let iv = Interval::new(lo, hi)?;
            Quantizer::new(typical_params(family, &mut rng, iv), iv, beta)
        })
        .collect::<Result<Vec<_>>>()?;
    let codes = (0..BLOCK)
        .map(|_| rng.random_range(0..=beta.max_code()))
        .collect();
    let values = (0..BLOCK).map(|_| rng.random_range(-0.05..0.05)).collect();
    Ok(Workload {
        quantizers,
        codes,
        values,
    })
}

fn run(w: &Workload, direction: Direction, ops: u64) -> f64 {
    let per_round = (POOL * BLOCK) as u64;
    let rounds = ops.div_ceil(per_round);
    let mut acc = 0.0;
    for _ in 0..rounds {
        for q in &w.quantizers {
            let q = black_box(q);
            match direction {
                Direction::Decode => {
                    for &c in &w.codes {
                        acc += q.dequantize(c);
                    }
                }
                Direction::Encode => {
                    for &x in &w.values {
                        acc += q.quantize(x) as f64;
                    }
                }
            }
        }
    }
    acc
}

/// Times at least `ops` scalar operations after a warm-up of about 5% of them.
pub fn measure(
    family: NonlinearityFamily,
    direction: Direction,
    beta: Bits,
    ops: u64,
    seed: u64,
) -> Result<Throughput> {
    if ops == 0 {
        return Err(NvqError::Config("nothing to measure".into()));
    }
    let w = workload(family, beta, seed)?;
    black_box(run(&w, direction, ops / 20));
    let per_round = (POOL * BLOCK) as u64;
    let timed = ops.div_ceil(per_round) * per_round;
    let start = Instant::now();
    black_box(run(&w, direction, timed));
    Ok(Throughput {
        family,
        direction,
        ops: timed,
        elapsed: start.elapsed(),
    })
}
