use rayon::prelude::*;

use super::{FutureTrials, PriorChoice};
use crate::discrete_priors::{limit_posterior, posterior_r_eq_n, DiscreteMethod, DiscretePriorSpec};
use crate::error::{config, Error, Result};
use crate::numerics::QuadratureSpec;
use crate::propensity::{
    averaged_posterior_density, averaged_predictive, omega_posterior_density, omega_posterior_params,
    predictive_all_success, update_all_success, OmegaPosteriorParams, PredictiveMethod, PropensityPrior,
};

/// Future-trial count used for `N = limit` when no closed-form limit exists.
pub const LARGE_N_PROXY: u64 = 1_000_000;

pub const DEFAULT_N_MAX: u64 = 10_000_000;

pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GenericSum,
    ClosedForm,
    LogGamma,
    Quadrature,
    LimitClosedForm,
    LargeNProxy,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GenericSum => "generic-sum",
            Self::ClosedForm => "closed-form",
            Self::LogGamma => "log-gamma",
            Self::Quadrature => "quadrature",
            Self::LimitClosedForm => "limit-closed-form",
            Self::LargeNProxy => "large-N-proxy",
        }
    }
}

/// One posterior or predictive value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Value before clamping to `[0, 1]`.
    pub raw_value: f64,
    pub method: Method,
    pub clamped: bool,
    pub diverged: bool,
    pub err_estimate: Option<f64>,
}

impl Evaluation {
    fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            raw_value: value,
            method,
            clamped: false,
            diverged: false,
            err_estimate: None,
        }
    }
}

fn resolve_omega(params: Option<OmegaPosteriorParams>, n: u64) -> Result<OmegaPosteriorParams> {
    match params {
        Some(p) => Ok(p),
        None => omega_posterior_params(n),
    }
}

fn discrete_at(spec: &DiscretePriorSpec, n: u64, population: u64) -> Result<Evaluation> {
    let post = posterior_r_eq_n(spec, population, n)?;
    let method = match post.method {
        DiscreteMethod::ClosedForm => Method::ClosedForm,
        DiscreteMethod::GenericSum => Method::GenericSum,
    };
    Ok(Evaluation::exact(post.prob_r_eq_n, method))
}

fn propensity_at(prior: &PropensityPrior, n: u64, future: u64) -> Result<Evaluation> {
    let r = predictive_all_success(prior, n, future)?;
    let method = match r.method {
        PredictiveMethod::ClosedForm => Method::ClosedForm,
        PredictiveMethod::LogGamma => Method::LogGamma,
        PredictiveMethod::Quadrature => Method::Quadrature,
    };
    Ok(Evaluation {
        value: r.value,
        raw_value: r.raw_value,
        method,
        clamped: r.clamped,
        diverged: r.diverged,
        err_estimate: r.err_estimate,
    })
}

fn averaged_at(
    beta: f64,
    params: Option<OmegaPosteriorParams>,
    n: u64,
    future: u64,
    quad: &QuadratureSpec,
) -> Result<Evaluation> {
    let params = resolve_omega(params, n)?;
    let r = averaged_predictive(n, future, beta, &params, quad)?;
    Ok(Evaluation {
        value: r.value,
        raw_value: r.raw_value,
        method: Method::Quadrature,
        clamped: r.clamped,
        diverged: r.diverged,
        err_estimate: r.err_estimate,
    })
}

fn proxy(mut e: Evaluation) -> Evaluation {
    e.method = Method::LargeNProxy;
    e
}

/// Posterior `P(R = N | n of n)` for discrete priors, or the predictive
/// probability that `N` further trials succeed for propensity priors.
pub fn evaluate(prior: &PriorChoice, n: u64, future: FutureTrials, quad: &QuadratureSpec) -> Result<Evaluation> {
    match (prior, future) {
        (PriorChoice::Discrete(spec), FutureTrials::Count(big_n)) => discrete_at(spec, n, big_n),
        (PriorChoice::Discrete(spec), FutureTrials::Limit) => {
            spec.validate()?;
            match limit_posterior(spec, n) {
                Some(v) => Ok(Evaluation::exact(v, Method::LimitClosedForm)),
                None => discrete_at(spec, n, LARGE_N_PROXY).map(proxy),
            }
        }
        (PriorChoice::Propensity(p), FutureTrials::Count(big_n)) => propensity_at(p, n, big_n),
        (PriorChoice::Propensity(p), FutureTrials::Limit) => match p {
            // E[p^N] → P(p = 1) = 0 for a prior with a density.
            PropensityPrior::Beta { .. } | PropensityPrior::LShaped { .. } | PropensityPrior::JShaped { .. } => {
                p.validate()?;
                Ok(Evaluation::exact(0.0, Method::LimitClosedForm))
            }
            PropensityPrior::ReflectedScaled { .. } | PropensityPrior::LeftTruncated { .. } => {
                propensity_at(p, n, LARGE_N_PROXY).map(proxy)
            }
        },
        (PriorChoice::OmegaAveraged { beta, params }, FutureTrials::Count(big_n)) => {
            averaged_at(*beta, *params, n, big_n, quad)
        }
        (PriorChoice::OmegaAveraged { beta, params }, FutureTrials::Limit) => {
            averaged_at(*beta, *params, n, LARGE_N_PROXY, quad).map(proxy)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanOutcome {
    /// Smallest `n` reaching the target; `below` is the value at `n - 1`.
    Found { n: u64, value: f64, below: Option<f64> },
    /// Even `n_max`, the largest `n` searched, stays below the target.
    Unattainable { n_max: u64, value: f64 },
}

/// Smallest `n ≥ 1` whose value reaches `target`, by doubling then bisection.
pub fn plan(
    prior: &PriorChoice,
    future: FutureTrials,
    target: f64,
    n_max: u64,
    quad: &QuadratureSpec,
) -> Result<PlanOutcome> {
    if !(target > 0.0 && target < 1.0) {
        return Err(config(format!("target must lie in (0, 1), got {target}")));
    }
    if n_max < 1 {
        return Err(config("n_max must be at least 1"));
    }
    let cap = match (prior, future) {
        (PriorChoice::Discrete(_), FutureTrials::Count(big_n)) => n_max.min(big_n),
        (PriorChoice::Discrete(spec), FutureTrials::Limit) if limit_posterior(spec, 0).is_none() => {
            n_max.min(LARGE_N_PROXY)
        }
        _ => n_max,
    };
    if cap < 1 {
        return Err(config("no sample size n ≥ 1 fits within N"));
    }
    let value = |n: u64| evaluate(prior, n, future, quad).map(|e| e.value);

    let first = value(1)?;
    if first >= target {
        return Ok(PlanOutcome::Found {
            n: 1,
            value: first,
            below: None,
        });
    }
    let (mut lo, mut lo_value) = (1u64, first);
    let mut hi = 2u64;
    let hi_value = loop {
        if hi >= cap {
            hi = cap;
            let v = value(cap)?;
            if v < target {
                return Ok(PlanOutcome::Unattainable { n_max: cap, value: v });
            }
            break v;
        }
        let v = value(hi)?;
        if v >= target {
            break v;
        }
        (lo, lo_value) = (hi, v);
        hi = hi.saturating_mul(2);
    };
    let mut hi_value = hi_value;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let v = value(mid)?;
        if v >= target {
            (hi, hi_value) = (mid, v);
        } else {
            (lo, lo_value) = (mid, v);
        }
    }
    Ok(PlanOutcome::Found {
        n: hi,
        value: hi_value,
        below: Some(lo_value),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Observed successes `n`.
    Sample,
    /// Future trials `N`.
    Future,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sample => "n",
            Self::Future => "N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: u64,
    pub evaluation: Evaluation,
}

/// Evaluates every axis point, in parallel; rows come back in axis order and
/// the first failing point (in axis order) is reported.
pub fn sweep(
    prior: &PriorChoice,
    axis: SweepAxis,
    values: &[u64],
    n: u64,
    future: FutureTrials,
    quad: &QuadratureSpec,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(config("empty axis"));
    }
    let results: Vec<Result<SweepRow>> = values
        .par_iter()
        .map(|&v| {
            let evaluation = match axis {
                SweepAxis::Sample => evaluate(prior, v, future, quad)?,
                SweepAxis::Future => evaluate(prior, n, FutureTrials::Count(v), quad)?,
            };
            Ok(SweepRow { axis_value: v, evaluation })
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub p: f64,
    pub prior_density: f64,
    pub posterior_density: f64,
}

fn density_only(what: &str) -> Error {
    Error::Unsupported(format!("density is defined for propensity priors, not {what}"))
}

/// Evenly spaced points over the support, ends included.
pub fn default_grid(prior: &PriorChoice, n: u64) -> Result<Vec<f64>> {
    let lo = match prior {
        PriorChoice::Discrete(spec) => return Err(density_only(&spec.describe())),
        PriorChoice::Propensity(p) => {
            p.validate()?;
            p.support().0
        }
        PriorChoice::OmegaAveraged { params, .. } => {
            let params = resolve_omega(*params, n)?;
            params.validate()?;
            params.law().lo
        }
    };
    let last = (DEFAULT_GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..DEFAULT_GRID_POINTS)
        .map(|i| lo + (1.0 - lo) * i as f64 / last)
        .collect();
    grid[DEFAULT_GRID_POINTS - 1] = 1.0;
    Ok(grid)
}

fn averaged_density_at(
    p: f64,
    n: u64,
    beta: f64,
    params: &OmegaPosteriorParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if p <= 0.0 {
        return Ok(0.0);
    }
    let p = if p >= 1.0 {
        if beta < 1.0 {
            return Ok(f64::INFINITY);
        }
        1.0 - f64::EPSILON / 2.0
    } else {
        p
    };
    let r = averaged_posterior_density(p, n, beta, params, quad)?;
    if !r.converged {
        return Err(Error::NonConvergence {
            operation: "averaged_posterior_density",
            value: r.value,
            err_estimate: r.err_estimate,
        });
    }
    Ok(r.value)
}

/// Prior and posterior densities over `grid` after `n` of `n`.
///
/// For the threshold-averaged prior the prior column holds the threshold
/// density evaluated at the grid point.
pub fn density_rows(prior: &PriorChoice, n: u64, grid: &[f64], quad: &QuadratureSpec) -> Result<Vec<DensityRow>> {
    if grid.is_empty() {
        return Err(config("empty grid"));
    }
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(config("density grid must lie within [0, 1]"));
    }
    match prior {
        PriorChoice::Discrete(spec) => Err(density_only(&spec.describe())),
        PriorChoice::Propensity(p) => {
            p.validate()?;
            let prior_law = p.law();
            let post_law = if n == 0 { prior_law } else { update_all_success(p, n)?.law };
            Ok(grid
                .iter()
                .map(|&x| DensityRow {
                    p: x,
                    prior_density: prior_law.density(x),
                    posterior_density: post_law.density(x),
                })
                .collect())
        }
        PriorChoice::OmegaAveraged { beta, params } => {
            let params = resolve_omega(*params, n)?;
            let results: Vec<Result<DensityRow>> = grid
                .par_iter()
                .map(|&x| {
                    Ok(DensityRow {
                        p: x,
                        prior_density: omega_posterior_density(x, &params),
                        posterior_density: averaged_density_at(x, n, *beta, &params, quad)?,
                    })
                })
                .collect();
            results.into_iter().collect()
        }
    }
}
