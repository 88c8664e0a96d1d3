//! Logistic/logit pairs rescaled to map `[x_min, x_max]` onto `[0, 1]`.
//!
//! Inputs are divided by `delta = x_max - x_min` before entering the sigmoid,
//! so `alpha` and `x0` live in units that do not depend on the width of each
//! vector's range. `Delta` is computed from the same scaled endpoints, which
//! makes the scaled logistic hit exactly `0` and `1` at the interval ends and
//! the scaled logit its exact inverse.

use super::nqt;

/// A sigmoid with an exact inverse, parametrized by slope and center.
pub(crate) trait Sigmoid {
    fn logistic(z: f64, alpha: f64, x0: f64) -> f64;
    fn logit(v: f64, inv_alpha: f64, x0: f64) -> f64;
}

/// Natural-base logistic `1 / (1 + e^(-alpha (z - x0)))`.
pub(crate) struct Natural;

impl Sigmoid for Natural {
    #[inline]
    fn logistic(z: f64, alpha: f64, x0: f64) -> f64 {
        1.0 / (1.0 + (-alpha * (z - x0)).exp())
    }

    #[inline]
    fn logit(v: f64, inv_alpha: f64, x0: f64) -> f64 {
        (v / (1.0 - v)).ln().mul_add(inv_alpha, x0)
    }
}

/// Base-2 logistic through the mantissa/exponent surrogate.
pub(crate) struct NotQuiteTranscendental;

impl Sigmoid for NotQuiteTranscendental {
    #[inline]
    fn logistic(z: f64, alpha: f64, x0: f64) -> f64 {
        nqt::nqt_logistic(z, alpha, x0)
    }

    #[inline]
    fn logit(v: f64, inv_alpha: f64, x0: f64) -> f64 {
        nqt::logit_unchecked(v, inv_alpha, x0)
    }
}

/// Precomputed constants of one scaled sigmoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub alpha: f64,
    pub inv_alpha: f64,
    pub x0: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub delta: f64,
    /// `logistic(x_min / delta)`.
    pub low: f64,
    /// `logistic(x_max / delta) - low`.
    pub span: f64,
    pub inv_span: f64,
}

impl Scaled {
    pub fn new<S: Sigmoid>(alpha: f64, x0: f64, x_min: f64, x_max: f64) -> Self {
        let delta = x_max - x_min;
        let low = S::logistic(x_min / delta, alpha, x0);
        let high = S::logistic(x_max / delta, alpha, x0);
        let span = high - low;
        Scaled {
            alpha,
            inv_alpha: 1.0 / alpha,
            x0,
            x_min,
            x_max,
            delta,
            low,
            span,
            inv_span: 1.0 / span,
        }
    }

    #[inline]
    pub fn forward<S: Sigmoid>(&self, x: f64) -> f64 {
        if x <= self.x_min {
            return 0.0;
        }
        if x >= self.x_max {
            return 1.0;
        }
        let l = S::logistic(x / self.delta, self.alpha, self.x0);
        ((l - self.low) * self.inv_span).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn inverse<S: Sigmoid>(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.x_min;
        }
        if u >= 1.0 {
            return self.x_max;
        }
        let v = self.span.mul_add(u, self.low);
        (self.delta * S::logit(v, self.inv_alpha, self.x0)).clamp(self.x_min, self.x_max)
    }
}
