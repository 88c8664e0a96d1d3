//! Invertible nonlinearities `h: [x_min, x_max] -> [0, 1]`.
//!
//! Each family carries two scalar parameters:
//!
//! | family        | `p1` | `p2` | `h`                                        |
//! |---------------|------|------|--------------------------------------------|
//! | `Uniform`     | -    | -    | `(x - x_min) / delta`                      |
//! | `Kumaraswamy` | `a`  | `b`  | Kumaraswamy CDF of the normalized value    |
//! | `LogLog`      | `α`  | `x0` | scaled natural logistic                    |
//! | `Nqt`         | `α`  | `x0` | scaled not-quite-transcendental logistic   |
//!
//! For the two sigmoid families `x0` is expressed in `x / delta` units and its
//! feasible box is `[x_min / delta, x_max / delta]`.
//!
//! The free functions validate their arguments on every call. Hot loops should
//! build a [`Nonlinearity`] once per (sub)vector instead.

pub mod fastmath;
mod kumaraswamy;
mod logistic;
pub mod nqt;

use std::fmt;
use std::str::FromStr;

use crate::error::{NvqError, Result};

pub use kumaraswamy::{kumaraswamy_cdf, kumaraswamy_icdf};
use logistic::{Natural, NotQuiteTranscendental, Scaled};

/// Smallest admissible Kumaraswamy shape. The CDF is constant at `a = 0` or
/// `b = 0`, so the feasible set stops short of zero.
pub const KUMARASWAMY_FLOOR: f64 = 1e-6;
/// Smallest admissible sigmoid slope.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Relative slack accepted on stored (single-precision) parameters.
const FEASIBILITY_SLACK: f64 = 1e-6;

/// The nonlinearity family shared by every (sub)vector of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NonlinearityFamily {
    Uniform,
    Kumaraswamy,
    LogLog,
    Nqt,
}

impl NonlinearityFamily {
    pub const ALL: [NonlinearityFamily; 4] = [
        NonlinearityFamily::Uniform,
        NonlinearityFamily::Kumaraswamy,
        NonlinearityFamily::LogLog,
        NonlinearityFamily::Nqt,
    ];

    /// The families that are fitted per vector.
    pub const LEARNED: [NonlinearityFamily; 3] = [
        NonlinearityFamily::Kumaraswamy,
        NonlinearityFamily::LogLog,
        NonlinearityFamily::Nqt,
    ];

    /// Number of learned parameters.
    pub fn param_count(self) -> usize {
        match self {
            NonlinearityFamily::Uniform => 0,
            _ => 2,
        }
    }

    /// Stable on-disk tag.
    pub fn tag(self) -> u8 {
        match self {
            NonlinearityFamily::Uniform => 0,
            NonlinearityFamily::Kumaraswamy => 1,
            NonlinearityFamily::LogLog => 2,
            NonlinearityFamily::Nqt => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            NonlinearityFamily::Uniform => "uniform",
            NonlinearityFamily::Kumaraswamy => "kumaraswamy",
            NonlinearityFamily::LogLog => "loglog",
            NonlinearityFamily::Nqt => "nqt",
        }
    }
}

impl fmt::Display for NonlinearityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NonlinearityFamily {
    type Err = NvqError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                NvqError::Config(format!(
                    "unknown family {s:?} (expected kumaraswamy, loglog, nqt or uniform)"
                ))
            })
    }
}

/// Learned parameters of one (sub)vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityParams {
    pub family: NonlinearityFamily,
    /// Kumaraswamy `a`, or the sigmoid slope `α`.
    pub p1: f64,
    /// Kumaraswamy `b`, or the sigmoid center `x0` in scaled units.
    pub p2: f64,
}

impl NonlinearityParams {
    pub fn uniform() -> Self {
        NonlinearityParams {
            family: NonlinearityFamily::Uniform,
            p1: 0.0,
            p2: 0.0,
        }
    }

    pub fn kumaraswamy(a: f64, b: f64) -> Self {
        NonlinearityParams {
            family: NonlinearityFamily::Kumaraswamy,
            p1: a,
            p2: b,
        }
    }

    pub fn loglog(alpha: f64, x0: f64) -> Self {
        NonlinearityParams {
            family: NonlinearityFamily::LogLog,
            p1: alpha,
            p2: x0,
        }
    }

    pub fn nqt(alpha: f64, x0: f64) -> Self {
        NonlinearityParams {
            family: NonlinearityFamily::Nqt,
            p1: alpha,
            p2: x0,
        }
    }

    /// Builds parameters of `family` from an optimizer point.
    pub fn from_point(family: NonlinearityFamily, point: &[f64]) -> Self {
        match family {
            NonlinearityFamily::Uniform => Self::uniform(),
            _ => NonlinearityParams {
                family,
                p1: point[0],
                p2: point[1],
            },
        }
    }

    pub fn point(&self) -> [f64; 2] {
        [self.p1, self.p2]
    }

    /// The parameters as they are stored on disk.
    pub fn to_f32_precision(self) -> Self {
        let mut out = NonlinearityParams {
            family: self.family,
            p1: self.p1 as f32 as f64,
            p2: self.p2 as f32 as f64,
        };
        if out.family != NonlinearityFamily::Uniform {
            // Never round a floor value below the floor.
            let floor = match out.family {
                NonlinearityFamily::Kumaraswamy => KUMARASWAMY_FLOOR,
                _ => ALPHA_FLOOR,
            };
            if out.p1 < floor {
                out.p1 = (floor as f32).next_up() as f64;
            }
            if out.family == NonlinearityFamily::Kumaraswamy && out.p2 < floor {
                out.p2 = (floor as f32).next_up() as f64;
            }
        }
        out
    }
}

/// Normalization range of one (sub)vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub x_min: f64,
    pub x_max: f64,
}

impl Interval {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min <= x_max) {
            return Err(NvqError::Domain(format!(
                "invalid interval [{x_min}, {x_max}]"
            )));
        }
        Ok(Interval { x_min, x_max })
    }

    /// `[min v, max v]`, or `None` for an empty or non-finite slice.
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut it = values.iter().copied();
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Interval::new(lo, hi).ok()
    }

    /// The smallest interval with single-precision endpoints containing `self`.
    pub fn widen_to_f32(self) -> Self {
        let mut lo = self.x_min as f32;
        let mut hi = self.x_max as f32;
        if (lo as f64) > self.x_min {
            lo = lo.next_down();
        }
        if (hi as f64) < self.x_max {
            hi = hi.next_up();
        }
        Interval {
            x_min: lo as f64,
            x_max: hi as f64,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn is_degenerate(&self) -> bool {
        self.x_min == self.x_max
    }

    /// Feasible box of `x0` for the sigmoid families.
    pub fn scaled_bounds(&self) -> (f64, f64) {
        let d = self.width();
        (self.x_min / d, self.x_max / d)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x_min <= x && x <= self.x_max
    }
}

/// Which transcendental implementations the Kumaraswamy family uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MathMode {
    /// Single-precision minimax `exp`/`ln` kernels.
    #[default]
    Fast,
    /// Double-precision library `powf`, for accuracy testing.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Uniform {
        x_min: f64,
        delta: f64,
    },
    Kumaraswamy {
        x_min: f64,
        delta: f64,
        a: f64,
        b: f64,
        inv_a: f64,
        inv_b: f64,
        mode: MathMode,
    },
    LogLog(Scaled),
    Nqt(Scaled),
}

/// A nonlinearity bound to its parameters and interval, with every per-vector
/// constant precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    kind: Kind,
    interval: Interval,
}

impl Nonlinearity {
    pub fn new(params: NonlinearityParams, iv: Interval) -> Result<Self> {
        Self::with_math(params, iv, MathMode::default())
    }

    pub fn with_math(params: NonlinearityParams, iv: Interval, mode: MathMode) -> Result<Self> {
        if iv.is_degenerate() {
            return Err(NvqError::DegenerateInterval(iv.x_min));
        }
        check_feasible(&params, &iv)?;
        let delta = iv.width();
        let kind = match params.family {
            NonlinearityFamily::Uniform => Kind::Uniform {
                x_min: iv.x_min,
                delta,
            },
            NonlinearityFamily::Kumaraswamy => Kind::Kumaraswamy {
                x_min: iv.x_min,
                delta,
                a: params.p1,
                b: params.p2,
                inv_a: 1.0 / params.p1,
                inv_b: 1.0 / params.p2,
                mode,
            },
            NonlinearityFamily::LogLog => Kind::LogLog(Scaled::new::<Natural>(
                params.p1, params.p2, iv.x_min, iv.x_max,
            )),
            NonlinearityFamily::Nqt => Kind::Nqt(Scaled::new::<NotQuiteTranscendental>(
                params.p1, params.p2, iv.x_min, iv.x_max,
            )),
        };
        Ok(Nonlinearity { kind, interval: iv })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// `h(x)`; values outside the interval are clamped to it.
    #[inline]
    pub fn forward(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Uniform { x_min, delta } => ((x - x_min) / delta).clamp(0.0, 1.0),
            Kind::Kumaraswamy {
                x_min,
                delta,
                a,
                b,
                mode,
                ..
            } => kumaraswamy::cdf((x - x_min) / delta, *a, *b, *mode),
            Kind::LogLog(s) => s.forward::<Natural>(x),
            Kind::Nqt(s) => s.forward::<NotQuiteTranscendental>(x),
        }
    }

    /// `h^-1(u)`; `u` outside `[0, 1]` is clamped.
    #[inline]
    pub fn inverse(&self, u: f64) -> f64 {
        let iv = &self.interval;
        match &self.kind {
            Kind::Uniform { x_min, delta } => {
                if u >= 1.0 {
                    iv.x_max
                } else {
                    u.max(0.0).mul_add(*delta, *x_min).min(iv.x_max)
                }
            }
            Kind::Kumaraswamy {
                x_min,
                delta,
                inv_a,
                inv_b,
                mode,
                ..
            } => {
                if u >= 1.0 {
                    return iv.x_max;
                }
                let t = kumaraswamy::icdf(u, *inv_a, *inv_b, *mode);
                t.mul_add(*delta, *x_min).clamp(iv.x_min, iv.x_max)
            }
            Kind::LogLog(s) => s.inverse::<Natural>(u),
            Kind::Nqt(s) => s.inverse::<NotQuiteTranscendental>(u),
        }
    }
}

fn check_feasible(params: &NonlinearityParams, iv: &Interval) -> Result<()> {
    match params.family {
        NonlinearityFamily::Uniform => Ok(()),
        NonlinearityFamily::Kumaraswamy => {
            let floor = KUMARASWAMY_FLOOR * (1.0 - FEASIBILITY_SLACK);
            if params.p1 >= floor
                && params.p2 >= floor
                && params.p1.is_finite()
                && params.p2.is_finite()
            {
                Ok(())
            } else {
                Err(NvqError::Constraint(format!(
                    "Kumaraswamy needs a, b >= {KUMARASWAMY_FLOOR}, got a={}, b={}",
                    params.p1, params.p2
                )))
            }
        }
        NonlinearityFamily::LogLog | NonlinearityFamily::Nqt => {
            if !(params.p1 >= ALPHA_FLOOR * (1.0 - FEASIBILITY_SLACK) && params.p1.is_finite()) {
                return Err(NvqError::Constraint(format!(
                    "alpha must be >= {ALPHA_FLOOR}, got {}",
                    params.p1
                )));
            }
            let (lo, hi) = iv.scaled_bounds();
            let slack = FEASIBILITY_SLACK * (hi - lo) + f64::EPSILON * lo.abs().max(hi.abs());
            if params.p2 >= lo - slack && params.p2 <= hi + slack {
                Ok(())
            } else {
                Err(NvqError::Constraint(format!(
                    "x0 = {} outside [{lo}, {hi}]",
                    params.p2
                )))
            }
        }
    }
}

fn floor_at(v: f64, floor: f64) -> f64 {
    if v >= floor {
        v
    } else {
        floor
    }
}

/// Projects arbitrary parameters onto the feasible set of their family.
///
/// Kumaraswamy shapes and sigmoid slopes are floored at `1e-6`; the sigmoid
/// center is clamped into `[x_min / delta, x_max / delta]`. Idempotent.
pub fn project_params(params: NonlinearityParams, iv: Interval) -> NonlinearityParams {
    let mut out = params;
    match params.family {
        NonlinearityFamily::Uniform => {}
        NonlinearityFamily::Kumaraswamy => {
            out.p1 = floor_at(params.p1, KUMARASWAMY_FLOOR);
            out.p2 = floor_at(params.p2, KUMARASWAMY_FLOOR);
        }
        NonlinearityFamily::LogLog | NonlinearityFamily::Nqt => {
            out.p1 = floor_at(params.p1, ALPHA_FLOOR);
            if iv.is_degenerate() {
                out.p2 = if params.p2.is_finite() {
                    params.p2
                } else {
                    0.0
                };
            } else {
                let (lo, hi) = iv.scaled_bounds();
                out.p2 = if params.p2.is_nan() {
                    lo
                } else {
                    params.p2.clamp(lo, hi)
                };
            }
        }
    }
    out
}

/// `(mu_init, sigma_init)` of the evolution strategy for `family`.
pub fn initial_snes_state(family: NonlinearityFamily) -> Result<([f64; 2], [f64; 2])> {
    match family {
        NonlinearityFamily::Uniform => Err(NvqError::NoFitNeeded),
        NonlinearityFamily::Kumaraswamy => Ok(([1.0, 1.0], [1.0, 1.0])),
        NonlinearityFamily::LogLog | NonlinearityFamily::Nqt => Ok(([10.0, 0.0], [2.0, 0.5])),
    }
}

fn sigmoid_params(params: &NonlinearityParams, expected: NonlinearityFamily) -> Result<()> {
    if params.family != expected {
        return Err(NvqError::Constraint(format!(
            "expected {expected} parameters, got {}",
            params.family
        )));
    }
    Ok(())
}

fn check_in(x: f64, iv: &Interval) -> Result<()> {
    if !iv.contains(x) {
        return Err(NvqError::Domain(format!(
            "{x} outside [{}, {}]",
            iv.x_min, iv.x_max
        )));
    }
    Ok(())
}

fn check_unit(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(NvqError::Domain(format!("{u} outside [0, 1]")));
    }
    Ok(())
}

/// Scaled natural logistic: `[x_min, x_max] -> [0, 1]`.
pub fn logistic_scaled(x: f64, params: NonlinearityParams, iv: Interval) -> Result<f64> {
    sigmoid_params(&params, NonlinearityFamily::LogLog)?;
    forward(params, iv, x)
}

/// Scaled natural logit, the inverse of [`logistic_scaled`].
pub fn logit_scaled(u: f64, params: NonlinearityParams, iv: Interval) -> Result<f64> {
    sigmoid_params(&params, NonlinearityFamily::LogLog)?;
    inverse(params, iv, u)
}

/// Scaled NQT logistic.
pub fn nqt_logistic_scaled(x: f64, params: NonlinearityParams, iv: Interval) -> Result<f64> {
    sigmoid_params(&params, NonlinearityFamily::Nqt)?;
    forward(params, iv, x)
}

/// Scaled NQT logit, the inverse of [`nqt_logistic_scaled`].
pub fn nqt_logit_scaled(u: f64, params: NonlinearityParams, iv: Interval) -> Result<f64> {
    sigmoid_params(&params, NonlinearityFamily::Nqt)?;
    inverse(params, iv, u)
}

/// `h(x; θ)` for any family.
pub fn forward(params: NonlinearityParams, iv: Interval, x: f64) -> Result<f64> {
    let h = Nonlinearity::new(params, iv)?;
    check_in(x, &iv)?;
    Ok(h.forward(x))
}

/// `h^-1(u; θ)` for any family.
pub fn inverse(params: NonlinearityParams, iv: Interval, u: f64) -> Result<f64> {
    let h = Nonlinearity::new(params, iv)?;
    check_unit(u)?;
    Ok(h.inverse(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn forward_examples() {
        let u = forward(NonlinearityParams::uniform(), iv(-1.0, 1.0), 0.0).unwrap();
        assert_eq!(u, 0.5);
        // The default fast kernels carry about 1.5e-5 of logarithm error.
        let k = forward(NonlinearityParams::kumaraswamy(1.0, 1.0), iv(0.0, 1.0), 0.3).unwrap();
        assert!((k - 0.3).abs() < 3e-5);
        let l = forward(NonlinearityParams::loglog(8.0, 0.1), iv(-0.4, 0.6), 0.6).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn inverse_examples() {
        let p = NonlinearityParams::uniform();
        let x = inverse(p, iv(-1.0, 1.0), forward(p, iv(-1.0, 1.0), 0.25).unwrap()).unwrap();
        assert!((x - 0.25).abs() < 1e-12);
        let p = NonlinearityParams::kumaraswamy(1.0, 1.0);
        let x = inverse(p, iv(0.0, 1.0), forward(p, iv(0.0, 1.0), 0.3).unwrap()).unwrap();
        assert!((x - 0.3).abs() < 3e-5);
        let p = NonlinearityParams::loglog(8.0, 0.1);
        let x = inverse(p, iv(-0.4, 0.6), 1.0).unwrap();
        assert_eq!(x, 0.6);
    }

    #[test]
    fn loglog_small_alpha_is_affine() {
        let i = iv(-0.2, 0.3);
        let p = NonlinearityParams::loglog(1e-6, 0.0);
        let mid = 0.05;
        let got = logistic_scaled(mid, p, i).unwrap();
        assert!((got - 0.5).abs() < 1e-3);
    }

    #[test]
    fn scaled_wrappers_reject_wrong_family() {
        let i = iv(0.0, 1.0);
        assert!(logistic_scaled(0.5, NonlinearityParams::nqt(2.0, 0.5), i).is_err());
        assert!(nqt_logit_scaled(0.5, NonlinearityParams::loglog(2.0, 0.5), i).is_err());
        assert_eq!(
            nqt_logistic_scaled(0.0, NonlinearityParams::nqt(2.0, 0.5), i).unwrap(),
            0.0
        );
        assert_eq!(
            nqt_logit_scaled(1.0, NonlinearityParams::nqt(2.0, 0.5), i).unwrap(),
            1.0
        );
    }

    #[test]
    fn degenerate_interval_is_signalled() {
        let i = iv(0.5, 0.5);
        assert!(matches!(
            forward(NonlinearityParams::uniform(), i, 0.5),
            Err(NvqError::DegenerateInterval(_))
        ));
        assert!(matches!(
            inverse(NonlinearityParams::loglog(5.0, 0.0), i, 0.5),
            Err(NvqError::DegenerateInterval(_))
        ));
    }

    #[test]
    fn out_of_domain_inputs() {
        let p = NonlinearityParams::uniform();
        assert!(forward(p, iv(0.0, 1.0), 1.5).is_err());
        assert!(inverse(p, iv(0.0, 1.0), -0.5).is_err());
    }

    #[test]
    fn projection_examples() {
        let i = iv(-0.5, 1.5);
        let p = project_params(NonlinearityParams::kumaraswamy(-0.5, 2.0), i);
        assert_eq!(p, NonlinearityParams::kumaraswamy(1e-6, 2.0));
        let p = project_params(NonlinearityParams::loglog(5.0, 10.0), i);
        assert_eq!(p, NonlinearityParams::loglog(5.0, 0.75));
        let p = project_params(NonlinearityParams::nqt(-1.0, -10.0), i);
        assert_eq!(p, NonlinearityParams::nqt(1e-6, -0.25));
        let feasible = NonlinearityParams::loglog(7.0, 0.1);
        assert_eq!(project_params(feasible, i), feasible);
    }

    #[test]
    fn initial_states() {
        assert_eq!(
            initial_snes_state(NonlinearityFamily::Kumaraswamy).unwrap(),
            ([1.0, 1.0], [1.0, 1.0])
        );
        assert_eq!(
            initial_snes_state(NonlinearityFamily::LogLog).unwrap(),
            ([10.0, 0.0], [2.0, 0.5])
        );
        assert_eq!(
            initial_snes_state(NonlinearityFamily::Nqt).unwrap(),
            ([10.0, 0.0], [2.0, 0.5])
        );
        assert!(matches!(
            initial_snes_state(NonlinearityFamily::Uniform),
            Err(NvqError::NoFitNeeded)
        ));
    }

    #[test]
    fn family_names_round_trip() {
        for f in NonlinearityFamily::ALL {
            assert_eq!(f.name().parse::<NonlinearityFamily>().unwrap(), f);
            assert_eq!(NonlinearityFamily::from_tag(f.tag()), Some(f));
        }
        assert!("gaussian".parse::<NonlinearityFamily>().is_err());
    }

    #[test]
    fn widen_to_f32_contains_original() {
        let i = iv(-0.123_456_789_012, 0.987_654_321_098).widen_to_f32();
        assert!(i.x_min <= -0.123_456_789_012 && i.x_max >= 0.987_654_321_098);
        assert_eq!(i.x_min as f32 as f64, i.x_min);
    }

    fn family_strategy() -> impl Strategy<Value = NonlinearityFamily> {
        prop_oneof![
            Just(NonlinearityFamily::Uniform),
            Just(NonlinearityFamily::Kumaraswamy),
            Just(NonlinearityFamily::LogLog),
            Just(NonlinearityFamily::Nqt),
        ]
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(
            family in family_strategy(),
            p1 in -100.0f64..100.0,
            p2 in -100.0f64..100.0,
            lo in -10.0f64..10.0,
            w in 1e-3f64..10.0,
        ) {
            let i = iv(lo, lo + w);
            let once = project_params(NonlinearityParams { family, p1, p2 }, i);
            prop_assert!(Nonlinearity::new(once, i).is_ok());
            prop_assert_eq!(project_params(once, i), once);
        }

        #[test]
        fn forward_monotone_with_exact_endpoints(
            family in family_strategy(),
            p1 in 0.3f64..20.0,
            p2 in 0.0f64..1.0,
            lo in -2.0f64..1.0,
            w in 1e-2f64..3.0,
        ) {
            let i = iv(lo, lo + w);
            let (a, b) = i.scaled_bounds();
            let p = match family {
                NonlinearityFamily::Kumaraswamy => NonlinearityParams::kumaraswamy(p1.min(5.0), 0.3 + 4.0 * p2),
                NonlinearityFamily::Uniform => NonlinearityParams::uniform(),
                f => NonlinearityParams { family: f, p1, p2: a + (b - a) * p2 },
            };
            let h = Nonlinearity::new(p, i).unwrap();
            prop_assert_eq!(h.forward(i.x_min), 0.0);
            prop_assert_eq!(h.forward(i.x_max), 1.0);
            let mut prev = 0.0;
            for k in 0..=200 {
                let x = i.x_min + w * k as f64 / 200.0;
                let u = h.forward(x.min(i.x_max));
                prop_assert!(u >= prev, "not monotone at {}", x);
                prev = u;
            }
        }
    }
}
