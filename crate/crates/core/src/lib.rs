//! Per-vector learned non-uniform scalar quantization of embedding vectors.
//!
//! Every vector (or each of its `m` random subvectors) gets its own
//! two-parameter nonlinearity `h`. Values are mapped through `h`, rounded to
//! `β` bits, and mapped back with `h^-1`:
//!
//! ```text
//! Q(x)    = floor((2^β - 1) · h(x) + 1/2)
//! Q^-1(y) = h^-1(y / (2^β - 1))
//! ```
//!
//! The parameters maximize the ratio of the uniform quantizer's squared error
//! to the learned one's, found with a separable natural evolution strategy.
//!
//! ```
//! use nvq::codec::{decode_vector, encode_dataset, Dataset, EncodeOptions};
//! use nvq::nonlinearity::NonlinearityFamily;
//! use nvq::quantizer::Bits;
//!
//! let data = nvq::synth::bell_shaped(4, 64, 1)?;
//! let enc = encode_dataset(&data, 2, Bits::EIGHT, NonlinearityFamily::LogLog, &EncodeOptions::new(7))?;
//! let x = data.row(0);
//! let y = decode_vector(&enc.vectors[0], &enc.meta)?;
//! let err: f64 = x.iter().zip(&y).map(|(&a, b)| (a as f64 - b).powi(2)).sum();
//! assert!(err < 1e-3);
//! # Ok::<(), nvq::NvqError>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod codec;
pub mod error;
pub mod eval;
pub mod nonlinearity;
pub mod optimizer;
pub mod quantizer;
pub mod synth;

pub use error::{NvqError, Result};
pub use nonlinearity::{Interval, MathMode, Nonlinearity, NonlinearityFamily, NonlinearityParams};
pub use quantizer::{Bits, CodeBlock, Quantizer};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/nonlinearities.md")]
    pub mod nonlinearities {}
    #[doc = include_str!("../../../book/src/quantizer.md")]
    pub mod quantizer {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    pub mod fitting {}
    #[doc = include_str!("../../../book/src/container.md")]
    pub mod container {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
