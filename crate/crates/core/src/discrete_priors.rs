//! Priors on the number of successes `R` among `N` trials.
//!
//! After a random sample of `n` trials all succeed, the likelihood of `R = r`
//! is hypergeometric, `C(r, n) / C(N, n)` for `r ≥ n`, and
//!
//! ```text
//! P(R = N | T = n) = P(R = N) / Σ_{r=n}^{N} [C(r, n) / C(N, n)] P(R = r)
//! ```
//!
//! The sum runs in log space over unnormalized masses, so populations far
//! beyond factorial range are fine.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::log_gamma_diff_unchecked;

/// Largest population the streaming sum accepts.
pub const MAX_POPULATION: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum DiscretePriorSpec {
    /// Uniform over `0..=N`.
    BayesLaplace,
    /// Extra mass `k` at both `R = 0` and `R = N`.
    Jeffreys { mass_k: f64 },
    /// Mass `k` at `R = N`, the rest spread uniformly over `0..N`.
    Bernardo { mass_k: f64 },
    /// Point masses `lambda` at both ends with squared-exponential decay from
    /// `R = 0` and revival toward `R = N`:
    /// `u(r) = q^(decay_k r²) + q^(decay_k (N-r)²)` for `0 < r < N`.
    ///
    /// This is a reconstruction of the shape only; the canonical form of
    /// this prior has not been published in closed form.
    Portmanteau { q: f64, decay_k: f64, lambda: f64 },
    /// Arbitrary nonnegative masses for `R = 0..=N`, normalized on use.
    Custom { masses: Vec<f64> },
}

impl DiscretePriorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::BayesLaplace => Ok(()),
            Self::Jeffreys { mass_k } => {
                // k = 0 is allowed: it is exactly the Bayes-Laplace prior.
                if !(0.0..=0.5).contains(mass_k) {
                    return Err(invalid(format!("jeffreys k must lie in [0, 1/2], got {mass_k}")));
                }
                Ok(())
            }
            Self::Bernardo { mass_k } => {
                if !(*mass_k > 0.0 && *mass_k < 1.0) {
                    return Err(invalid(format!("bernardo k must lie in (0, 1), got {mass_k}")));
                }
                Ok(())
            }
            Self::Portmanteau { q, decay_k, lambda } => {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(invalid(format!("portmanteau q must lie in (0, 1), got {q}")));
                }
                if !(*decay_k > 0.0) || !decay_k.is_finite() {
                    return Err(invalid(format!("portmanteau decay_k must be positive, got {decay_k}")));
                }
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(invalid(format!("portmanteau lambda must be positive, got {lambda}")));
                }
                Ok(())
            }
            Self::Custom { masses } => {
                if masses.len() < 2 {
                    return Err(invalid("custom prior needs at least two masses"));
                }
                if masses.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
                    return Err(invalid("custom masses must be finite and nonnegative"));
                }
                if !(masses.iter().sum::<f64>() > 0.0) {
                    return Err(invalid("custom masses must not all be zero"));
                }
                Ok(())
            }
        }
    }

    fn check_population(&self, population: u64) -> Result<()> {
        if population < 1 {
            return Err(invalid("population N must be at least 1"));
        }
        if population > MAX_POPULATION {
            return Err(invalid(format!("population N above {MAX_POPULATION} is not supported")));
        }
        if let Self::Custom { masses } = self {
            if masses.len() as u64 != population + 1 {
                return Err(invalid(format!(
                    "custom prior has {} masses but N + 1 = {}",
                    masses.len(),
                    population + 1
                )));
            }
        }
        Ok(())
    }

    /// Log of the mass at `R = r`, up to a factor common to all `r`.
    fn log_unnormalized(&self, population: u64, r: u64) -> f64 {
        let big_n = population as f64;
        match self {
            Self::BayesLaplace => 0.0,
            Self::Jeffreys { mass_k } => {
                let base = (1.0 - 2.0 * mass_k) / (big_n + 1.0);
                if r == 0 || r == population {
                    (base + mass_k).ln()
                } else {
                    base.ln()
                }
            }
            Self::Bernardo { mass_k } => {
                if r == population {
                    mass_k.ln()
                } else {
                    ((1.0 - mass_k) / big_n).ln()
                }
            }
            Self::Portmanteau { q, decay_k, lambda } => {
                if r == 0 || r == population {
                    lambda.ln()
                } else {
                    let ln_q = q.ln();
                    let left = r as f64;
                    let right = (population - r) as f64;
                    log_add(decay_k * left * left * ln_q, decay_k * right * right * ln_q)
                }
            }
            Self::Custom { masses } => masses[r as usize].ln(),
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteMethod {
    GenericSum,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretePosterior {
    pub prob_r_eq_n: f64,
    pub population: u64,
    pub sample: u64,
    pub method: DiscreteMethod,
}

/// `P(R = 0), …, P(R = N)`.
pub fn prior_masses(spec: &DiscretePriorSpec, population: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.check_population(population)?;
    let big_n = population as f64;
    let masses = match spec {
        DiscretePriorSpec::BayesLaplace => vec![1.0 / (big_n + 1.0); population as usize + 1],
        DiscretePriorSpec::Jeffreys { mass_k } => {
            let base = (1.0 - 2.0 * mass_k) / (big_n + 1.0);
            let mut m = vec![base; population as usize + 1];
            m[0] += mass_k;
            m[population as usize] += mass_k;
            m
        }
        DiscretePriorSpec::Bernardo { mass_k } => {
            let mut m = vec![(1.0 - mass_k) / big_n; population as usize + 1];
            m[population as usize] = *mass_k;
            m
        }
        DiscretePriorSpec::Portmanteau { .. } => {
            let logs: Vec<f64> = (0..=population).map(|r| spec.log_unnormalized(population, r)).collect();
            let norm = log_sum_exp(&logs);
            logs.into_iter().map(|l| (l - norm).exp()).collect()
        }
        DiscretePriorSpec::Custom { masses } => {
            let total: f64 = masses.iter().sum();
            masses.iter().map(|m| m / total).collect()
        }
    };
    Ok(masses)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSum::default();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Streaming log-sum-exp.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSum {
    fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.scaled += (v - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

fn check_sample(population: u64, sample: u64) -> Result<()> {
    if sample > population {
        return Err(invalid(format!("sample n = {sample} exceeds population N = {population}")));
    }
    Ok(())
}

/// `P(R = N | T = n)`, in closed form where one exists.
///
/// `n = 0` is accepted and returns the prior mass at `R = N`.
pub fn posterior_r_eq_n(spec: &DiscretePriorSpec, population: u64, sample: u64) -> Result<DiscretePosterior> {
    spec.validate()?;
    spec.check_population(population)?;
    check_sample(population, sample)?;
    match spec {
        DiscretePriorSpec::BayesLaplace => Ok(DiscretePosterior {
            prob_r_eq_n: (sample as f64 + 1.0) / (population as f64 + 1.0),
            population,
            sample,
            method: DiscreteMethod::ClosedForm,
        }),
        _ => generic_posterior_r_eq_n(spec, population, sample),
    }
}

/// `P(R = N | T = n)` by the log-space hypergeometric sum, for every variant.
pub fn generic_posterior_r_eq_n(spec: &DiscretePriorSpec, population: u64, sample: u64) -> Result<DiscretePosterior> {
    spec.validate()?;
    spec.check_population(population)?;
    check_sample(population, sample)?;
    let n = sample as f64;
    // ln[C(r, n) / C(N, n)] = ln[Γ(r+1)/Γ(r-n+1)] - ln[Γ(N+1)/Γ(N-n+1)]
    let log_top = log_gamma_diff_unchecked((population - sample) as f64 + 1.0, n);
    let mut denominator = LogSum::default();
    for r in sample..=population {
        let log_lik = log_gamma_diff_unchecked((r - sample) as f64 + 1.0, n) - log_top;
        denominator.add(log_lik + spec.log_unnormalized(population, r));
    }
    let log_top_mass = spec.log_unnormalized(population, population);
    let prob = if log_top_mass == f64::NEG_INFINITY {
        0.0
    } else {
        (log_top_mass - denominator.value()).exp().min(1.0)
    };
    Ok(DiscretePosterior {
        prob_r_eq_n: prob,
        population,
        sample,
        method: DiscreteMethod::GenericSum,
    })
}

/// `lim_{N→∞} P(R = N | T = n)` where a closed form exists.
pub fn limit_posterior(spec: &DiscretePriorSpec, sample: u64) -> Option<f64> {
    let m = sample as f64 + 1.0;
    match spec {
        DiscretePriorSpec::BayesLaplace => Some(0.0),
        DiscretePriorSpec::Jeffreys { mass_k } => {
            let k = *mass_k;
            Some(m * k / (m * k + 1.0 - 2.0 * k))
        }
        DiscretePriorSpec::Bernardo { mass_k } => {
            let k = *mass_k;
            Some(m * k / (m * k + 1.0 - k))
        }
        DiscretePriorSpec::Portmanteau { .. } | DiscretePriorSpec::Custom { .. } => None,
    }
}

impl DiscretePriorSpec {
    /// Short text label, e.g. `jeffreys(k=0.25)`.
    pub fn describe(&self) -> String {
        match self {
            Self::BayesLaplace => "bayes-laplace".to_string(),
            Self::Jeffreys { mass_k } => format!("jeffreys(k={mass_k})"),
            Self::Bernardo { mass_k } => format!("bernardo(k={mass_k})"),
            Self::Portmanteau { q, decay_k, lambda } => {
                format!("portmanteau(q={q};decay_k={decay_k};lambda={lambda})")
            }
            Self::Custom { masses } => format!("custom(len={})", masses.len()),
        }
    }
}
