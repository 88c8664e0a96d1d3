//! Separable natural evolution strategy with a projection onto the feasible
//! set, used to fit the nonlinearity parameters of each (sub)vector.
//!
//! Every iteration draws `T` standard-normal perturbations `s_k`, evaluates the
//! fitness at `z_k = project(μ + σ ⊙ s_k)`, ranks the samples and forms the
//! natural gradients
//!
//! ```text
//! ∇μ = Σ u_k s_k          ∇σ = Σ u_k (s_k² - 1)
//! μ ← max(μ + ημ σ ⊙ ∇μ, 0)
//! σ ← σ ⊙ exp(ησ / 2 · ∇σ)
//! ```
//!
//! with rank-shaped utilities `u_k` (see [`snes_utilities`]).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{NvqError, Result};
use crate::nonlinearity::{
    initial_snes_state, project_params, Interval, NonlinearityFamily, NonlinearityParams,
};
use crate::quantizer::{uniform_loss, Bits, Quantizer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnesHyperparams {
    /// Samples per iteration, `T`.
    pub samples: usize,
    pub eta_mu: f64,
    pub eta_sigma: f64,
    /// Stop once `‖μ(t) - μ(t-1)‖∞` falls below this.
    pub tol: f64,
    pub min_iters: usize,
    pub max_iters: usize,
}

impl SnesHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(NvqError::Config(format!(
                "need at least 2 samples per iteration, got {}",
                self.samples
            )));
        }
        if !(self.tol > 0.0) {
            return Err(NvqError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.min_iters > self.max_iters {
            return Err(NvqError::Config(format!(
                "min_iters {} exceeds max_iters {}",
                self.min_iters, self.max_iters
            )));
        }
        if !(self.eta_mu > 0.0 && self.eta_sigma > 0.0) {
            return Err(NvqError::Config("learning rates must be positive".into()));
        }
        Ok(())
    }
}

/// Hyperparameters for a `d = param_dim` dimensional search:
/// `T = 2(4 + ⌊3 ln d⌋)`, `ημ = 1`, `ησ = (9 + 3 ln d) / (5 d √d)`.
///
/// For `d = 2` the step-size rate is about 0.783, which shrinks `σ` fast
/// enough for most fits to meet the `1e-4` tolerance well within 100
/// iterations.
pub fn default_hyperparams(param_dim: usize) -> Result<SnesHyperparams> {
    if param_dim < 1 {
        return Err(NvqError::Domain(
            "parameter dimension must be at least 1".into(),
        ));
    }
    let d = param_dim as f64;
    Ok(SnesHyperparams {
        samples: 2 * (4 + (3.0 * d.ln()).floor() as usize),
        eta_mu: 1.0,
        eta_sigma: (9.0 + 3.0 * d.ln()) / (5.0 * d * d.sqrt()),
        tol: 1e-4,
        min_iters: 10,
        max_iters: 100,
    })
}

/// Rank-based utilities, best sample first:
/// `u_k = max(0, ln(T/2 + 1) - ln k) / Σ_j max(0, ln(T/2 + 1) - ln j) - 1/T`.
pub fn snes_utilities(samples: usize) -> Vec<f64> {
    let t = samples as f64;
    let pivot = (t / 2.0 + 1.0).ln();
    let raw: Vec<f64> = (1..=samples)
        .map(|k| (pivot - (k as f64).ln()).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total - 1.0 / t).collect()
}

/// Search distribution of one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SnesState {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub iteration: usize,
}

impl SnesState {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if mu.len() != sigma.len() {
            return Err(NvqError::DimensionMismatch {
                expected: mu.len(),
                found: sigma.len(),
            });
        }
        if sigma.iter().any(|&s| !(s > 0.0)) {
            return Err(NvqError::Domain("step sizes must be positive".into()));
        }
        Ok(SnesState {
            mu,
            sigma,
            iteration: 0,
        })
    }
}

/// A projected sample and its fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSample {
    pub point: Vec<f64>,
    pub fitness: f64,
}

fn finite_or_abort(value: f64, point: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(NvqError::NonFiniteObjective {
            value,
            params: point.to_vec(),
        })
    }
}

/// Runs one SNES iteration, returning the updated state and every sample
/// that was evaluated. Fitness is maximized.
pub fn snes_step<F, P, R>(
    state: &SnesState,
    mut objective: F,
    project: P,
    hp: &SnesHyperparams,
    rng: &mut R,
) -> Result<(SnesState, Vec<EvaluatedSample>)>
where
    F: FnMut(&[f64]) -> Result<f64>,
    P: Fn(&[f64]) -> Vec<f64>,
    R: Rng + ?Sized,
{
    let dim = state.mu.len();
    let mut noise = Vec::with_capacity(hp.samples);
    let mut evaluated = Vec::with_capacity(hp.samples);
    for _ in 0..hp.samples {
        let s: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let candidate: Vec<f64> = (0..dim)
            .map(|i| state.sigma[i].mul_add(s[i], state.mu[i]))
            .collect();
        let point = project(&candidate);
        let fitness = finite_or_abort(objective(&point)?, &point)?;
        noise.push(s);
        evaluated.push(EvaluatedSample { point, fitness });
    }

    let fitness: Vec<f64> = evaluated.iter().map(|e| e.fitness).collect();
    let utilities = ranked_utilities(&fitness);

    let mut grad_mu = vec![0.0; dim];
    let mut grad_sigma = vec![0.0; dim];
    for (s, &u) in noise.iter().zip(&utilities) {
        for i in 0..dim {
            grad_mu[i] += u * s[i];
            grad_sigma[i] += u * (s[i] * s[i] - 1.0);
        }
    }
    Ok((
        natural_gradient_update(state, &grad_mu, &grad_sigma, hp),
        evaluated,
    ))
}

/// Utility of each sample given its fitness. Ranks come from a stable sort
/// (ties keep sample order); a run of tied samples shares the mean utility of
/// the ranks it occupies, so constant fitness yields a zero gradient.
pub fn ranked_utilities(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    let shaped = snes_utilities(n);
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && fitness[order[end]] == fitness[order[start]] {
            end += 1;
        }
        let share = shaped[start..end].iter().sum::<f64>() / (end - start) as f64;
        for &k in &order[start..end] {
            out[k] = share;
        }
        start = end;
    }
    out
}

/// `μ ← max(μ + ημ σ ⊙ ∇μ, 0)`, `σ ← σ ⊙ exp(ησ/2 ∇σ)`.
pub fn natural_gradient_update(
    state: &SnesState,
    grad_mu: &[f64],
    grad_sigma: &[f64],
    hp: &SnesHyperparams,
) -> SnesState {
    let mu = state
        .mu
        .iter()
        .zip(&state.sigma)
        .zip(grad_mu)
        .map(|((&m, &s), &g)| (hp.eta_mu * s).mul_add(g, m).max(0.0))
        .collect();
    let sigma = state
        .sigma
        .iter()
        .zip(grad_sigma)
        .map(|(&s, &g)| s * (hp.eta_sigma / 2.0 * g).exp())
        .collect();
    SnesState {
        mu,
        sigma,
        iteration: state.iteration + 1,
    }
}

/// Outcome of fitting one (sub)vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub params: NonlinearityParams,
    /// Best objective ratio seen; at least 1 thanks to the uniform fallback.
    pub objective: f64,
    pub iterations: usize,
    /// The stopping tolerance was met before `max_iters`.
    pub converged: bool,
    pub fell_back_to_uniform: bool,
}

impl FitResult {
    fn fallback(iterations: usize, converged: bool) -> Self {
        FitResult {
            params: NonlinearityParams::uniform(),
            objective: 1.0,
            iterations,
            converged,
            fell_back_to_uniform: true,
        }
    }
}

/// Maximizes `ℓ_unif / ℓ_h(θ)` over the feasible parameters of `family`.
///
/// The best projected point seen (samples and means alike) is returned; if
/// nothing beats the uniform quantizer the result falls back to it.
pub fn fit_subvector<R: Rng + ?Sized>(
    values: &[f64],
    family: NonlinearityFamily,
    beta: Bits,
    hp: &SnesHyperparams,
    rng: &mut R,
) -> Result<FitResult> {
    let iv = Interval::of(values).ok_or(NvqError::EmptyDataset)?;
    fit_in_interval(values, iv, family, beta, hp, rng)
}

/// [`fit_subvector`] against a caller-chosen interval enclosing `values`.
///
/// The encoder uses this with the single-precision interval it stores, so the
/// fitted objective is the one the decoder will reproduce.
pub fn fit_in_interval<R: Rng + ?Sized>(
    values: &[f64],
    iv: Interval,
    family: NonlinearityFamily,
    beta: Bits,
    hp: &SnesHyperparams,
    rng: &mut R,
) -> Result<FitResult> {
    hp.validate()?;
    let (mu0, sigma0) = initial_snes_state(family)?;
    if values.is_empty() {
        return Err(NvqError::EmptyDataset);
    }
    if let Some(x) = values.iter().find(|x| !iv.contains(**x)) {
        return Err(NvqError::Domain(format!(
            "{x} lies outside [{}, {}]",
            iv.x_min, iv.x_max
        )));
    }
    if iv.is_degenerate() {
        return Err(NvqError::ConstantVector);
    }
    let unif = uniform_loss(values, iv, beta);
    if unif == 0.0 {
        return Ok(FitResult::fallback(0, true));
    }

    let project = |p: &[f64]| {
        project_params(NonlinearityParams::from_point(family, p), iv)
            .point()
            .to_vec()
    };
    let objective = |p: &[f64]| -> Result<f64> {
        let params = NonlinearityParams::from_point(family, p);
        let loss = Quantizer::new(params, iv, beta)?.loss(values);
        Ok(unif / loss)
    };

    let mut best_point = project(&mu0);
    let mut best = finite_or_abort(objective(&best_point)?, &best_point)?;
    let mut state = SnesState::new(mu0.to_vec(), sigma0.to_vec())?;
    let mut converged = false;

    while state.iteration < hp.max_iters {
        let (next, samples) = snes_step(&state, objective, project, hp, rng)?;
        for s in samples {
            if s.fitness > best {
                best = s.fitness;
                best_point = s.point;
            }
        }
        let at_mean = project(&next.mu);
        let f_mean = finite_or_abort(objective(&at_mean)?, &at_mean)?;
        if f_mean > best {
            best = f_mean;
            best_point = at_mean;
        }
        let shift = next
            .mu
            .iter()
            .zip(&state.mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        state = next;
        if state.iteration >= hp.min_iters && shift < hp.tol {
            converged = true;
            break;
        }
    }

    if best < 1.0 {
        return Ok(FitResult::fallback(state.iteration, converged));
    }
    Ok(FitResult {
        params: NonlinearityParams::from_point(family, &best_point),
        objective: best,
        iterations: state.iteration,
        converged,
        fell_back_to_uniform: false,
    })
}
