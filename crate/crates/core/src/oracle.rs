//! Independent checks for the main engines.
//!
//! Nothing here calls into the log-space sums or the log-gamma predictive
//! paths it is used to verify:
//!
//! - [`exact_discrete_posterior`] evaluates the hypergeometric posterior in
//!   exact rational arithmetic with integer binomial coefficients.
//! - [`product_form_predictive`] and [`chain_product_predictive`] multiply
//!   out the all-success predictive factor by factor.
//! - The Monte-Carlo estimators draw from explicit posteriors with a seeded
//!   ChaCha stream, so a seed always reproduces the same estimate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::discrete_priors::DiscretePriorSpec;
use crate::error::{invalid, Error, Result};
use crate::numerics::log_inv_beta;
use crate::propensity::{update_all_success, OmegaPosteriorParams, PropensityPrior};

/// Largest population the rational oracle accepts.
pub const RATIONAL_MAX_POPULATION: u64 = 500;

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        Self(BigRational::new(BigInt::from(numerator), BigInt::from(denominator)))
    }

    /// The exact value of a finite float.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self)
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| invalid(format!("{v} has no exact rational value")))
}

fn rational_masses(spec: &DiscretePriorSpec, population: u64) -> Result<Vec<BigRational>> {
    spec.validate()?;
    let big_n = BigRational::from_integer(BigInt::from(population));
    let len = population as usize + 1;
    let masses = match spec {
        DiscretePriorSpec::BayesLaplace => vec![BigRational::one() / (&big_n + BigRational::one()); len],
        DiscretePriorSpec::Jeffreys { mass_k } => {
            let k = exact(*mass_k)?;
            let two = BigRational::from_integer(BigInt::from(2));
            let base = (BigRational::one() - &two * &k) / (&big_n + BigRational::one());
            let mut m = vec![base; len];
            m[0] += &k;
            m[len - 1] += &k;
            m
        }
        DiscretePriorSpec::Bernardo { mass_k } => {
            let k = exact(*mass_k)?;
            let mut m = vec![(BigRational::one() - &k) / &big_n; len];
            m[len - 1] = k;
            m
        }
        DiscretePriorSpec::Portmanteau { .. } => {
            return Err(Error::Unsupported("portmanteau masses are not rational".into()));
        }
        DiscretePriorSpec::Custom { masses } => {
            if masses.len() != len {
                return Err(invalid("custom prior length must be N + 1"));
            }
            let raw = masses.iter().map(|m| exact(*m)).collect::<Result<Vec<_>>>()?;
            let total = raw.iter().fold(BigRational::zero(), |acc, m| acc + m);
            raw.into_iter().map(|m| m / &total).collect()
        }
    };
    Ok(masses)
}

/// `P(R = N | T = n)` in exact arithmetic, for populations up to
/// [`RATIONAL_MAX_POPULATION`] and priors with rational masses.
pub fn exact_discrete_posterior(spec: &DiscretePriorSpec, population: u64, sample: u64) -> Result<Rational> {
    if !(1..=RATIONAL_MAX_POPULATION).contains(&population) {
        return Err(invalid(format!(
            "rational oracle needs 1 ≤ N ≤ {RATIONAL_MAX_POPULATION}, got {population}"
        )));
    }
    if sample > population {
        return Err(invalid("sample exceeds population"));
    }
    let masses = rational_masses(spec, population)?;
    // Σ_r C(r, n) P(r), with C(r+1, n) = C(r, n)(r+1)/(r+1-n).
    let mut binom = BigInt::one();
    let mut weighted = BigRational::zero();
    for (r, mass) in masses.iter().enumerate().skip(sample as usize) {
        let r = r as u64;
        if r > sample {
            binom = binom * BigInt::from(r) / BigInt::from(r - sample);
        }
        weighted += mass * BigRational::from_integer(binom.clone());
    }
    if weighted.is_zero() {
        return Err(invalid("prior puts no mass on outcomes consistent with the sample"));
    }
    let top = &masses[population as usize] * BigRational::from_integer(binom);
    Ok(Rational(top / weighted))
}

/// `∏_{j=1}^{N} (n+j) / (n+j+β)`, accumulated as a sum of logs.
pub fn product_form_predictive(n: u64, future: u64, beta: f64) -> f64 {
    let nf = n as f64;
    let log: f64 = (1..=future).map(|j| -(beta / (nf + j as f64)).ln_1p()).sum();
    log.exp()
}

/// `∏_{j=0}^{N-1} (α+n+j) / (α+β+n+j)`, the all-success predictive under
/// Beta(α, β) after `n` of `n`.
pub fn chain_product_predictive(alpha: f64, beta: f64, n: u64, future: u64) -> f64 {
    let a = alpha + n as f64;
    let log: f64 = (0..future).map(|j| -(beta / (a + j as f64)).ln_1p()).sum();
    log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

pub const MIN_MC_SAMPLES: u64 = 1000;

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_MC_SAMPLES {
        return Err(invalid(format!("Monte Carlo needs at least {MIN_MC_SAMPLES} samples")));
    }
    Ok(())
}

fn beta_sampler(a: f64, b: f64) -> Result<Beta<f64>> {
    Beta::new(a, b).map_err(|e| invalid(format!("beta sampler: {e}")))
}

fn summarize(values: impl Iterator<Item = f64>) -> McEstimate {
    // Welford
    let mut count = 0u64;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        count += 1;
        let delta = v - mean;
        mean += delta / count as f64;
        m2 += delta * (v - mean);
    }
    let var = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
    McEstimate {
        mean,
        std_error: (var / count as f64).sqrt(),
        samples: count,
    }
}

/// Monte-Carlo estimate of `E[p^N]` under the all-success posterior of
/// `prior` (the prior itself when `n = 0`).
pub fn mc_predictive(prior: &PropensityPrior, n: u64, future: u64, samples: u64, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let law = if n == 0 {
        prior.validate()?;
        prior.law()
    } else {
        update_all_success(prior, n)?.law
    };
    // 1 - p = width · q with q ~ Beta(β, α); sampling the complement keeps
    // resolution when the posterior piles up against p = 1.
    let complement = beta_sampler(law.beta, law.alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_n = future as f64;
    let draws = (0..samples).map(|_| {
        let q: f64 = complement.sample(&mut rng);
        (big_n * (-(law.width * q)).ln_1p()).exp()
    });
    Ok(summarize(draws))
}

/// Monte-Carlo estimate of the threshold-averaged predictive, before clamping.
pub fn mc_averaged_predictive(
    n: u64,
    future: u64,
    beta: f64,
    params: &OmegaPosteriorParams,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    params.validate()?;
    let conditional_factor = product_form_predictive(n, future, beta);
    // 1 - ω = c · y with y ~ Beta(a, b)
    let sampler = beta_sampler(params.a, params.b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exponent = n as f64 + beta;
    let draws = (0..samples).map(|_| {
        let y: f64 = sampler.sample(&mut rng);
        conditional_factor * (-exponent * (params.c * y).ln()).exp()
    });
    Ok(summarize(draws))
}

/// Monte-Carlo estimate of the threshold-averaged posterior density at `p`.
pub fn mc_averaged_posterior_density(
    p: f64,
    n: u64,
    beta: f64,
    params: &OmegaPosteriorParams,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    params.validate()?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid("p must lie in (0, 1)"));
    }
    let nf = n as f64;
    let log_k = log_inv_beta(nf + 1.0, beta)?;
    let sampler = beta_sampler(params.a, params.b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..samples).map(|_| {
        let y: f64 = sampler.sample(&mut rng);
        let one_minus_omega = params.c * y;
        let gap = p - (1.0 - one_minus_omega);
        if gap <= 0.0 {
            0.0
        } else {
            (log_k + nf * gap.ln() + (beta - 1.0) * (1.0 - p).ln() - (nf + beta) * one_minus_omega.ln()).exp()
        }
    });
    Ok(summarize(draws))
}

/// Outcome of one cross-check in [`audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn check(name: &'static str, result: Result<(bool, String)>) -> AuditCheck {
    match result {
        Ok((passed, detail)) => AuditCheck { name, passed, detail },
        Err(e) => AuditCheck {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn within_se(est: &McEstimate, want: f64, k: f64) -> (bool, String) {
    let z = (est.mean - want) / est.std_error;
    (z.abs() <= k, format!("mc {} ± {} vs {want} (z = {z:.2})", est.mean, est.std_error))
}

/// Cross-checks the main engines against the oracles. Monte-Carlo checks use
/// streams derived from `seed` and pass within 4 standard errors.
pub fn audit(seed: u64) -> Vec<AuditCheck> {
    use crate::discrete_priors::generic_posterior_r_eq_n;
    use crate::numerics::QuadratureSpec;
    use crate::propensity::{averaged_posterior_density, averaged_predictive, predictive_all_success};

    let quad = QuadratureSpec::default();
    let mut checks = Vec::new();

    checks.push(check(
        "discrete log-space sum vs exact rationals",
        (|| {
            let specs = [
                DiscretePriorSpec::BayesLaplace,
                DiscretePriorSpec::Jeffreys { mass_k: 0.1 },
                DiscretePriorSpec::Jeffreys { mass_k: 0.25 },
                DiscretePriorSpec::Bernardo { mass_k: 0.5 },
                DiscretePriorSpec::Bernardo { mass_k: 0.9 },
            ];
            let mut worst = 0.0f64;
            for spec in &specs {
                for big_n in [1u64, 2, 7, 50, 200] {
                    for n in [1u64, 2, 5, 20, 100, 200].into_iter().filter(|&n| n <= big_n) {
                        let want = exact_discrete_posterior(spec, big_n, n)?.to_f64();
                        let got = generic_posterior_r_eq_n(spec, big_n, n)?.prob_r_eq_n;
                        worst = worst.max(rel_err(got, want));
                    }
                }
            }
            Ok((worst <= 1e-12, format!("max relative error {worst:e}")))
        })(),
    ));

    checks.push(check(
        "j-shaped log-gamma predictive vs product form",
        (|| {
            let mut worst = 0.0f64;
            for beta in [0.1, 0.5, 0.9] {
                for n in [0u64, 1, 10, 100, 10_000] {
                    for big_n in [1u64, 10, 1000, 10_000] {
                        let got = predictive_all_success(&PropensityPrior::JShaped { beta }, n, big_n)?.value;
                        worst = worst.max(rel_err(got, product_form_predictive(n, big_n, beta)));
                    }
                }
            }
            Ok((worst <= 1e-10, format!("max relative error {worst:e}")))
        })(),
    ));

    checks.push(check(
        "beta log-gamma predictive vs chain product",
        (|| {
            let mut worst = 0.0f64;
            for (alpha, beta) in [(0.5, 0.5), (1.0, 2.0), (3.0, 0.7), (20.0, 5.0)] {
                for n in [0u64, 3, 100] {
                    for big_n in [1u64, 17, 5000] {
                        let got = predictive_all_success(&PropensityPrior::Beta { alpha, beta }, n, big_n)?.value;
                        worst = worst.max(rel_err(got, chain_product_predictive(alpha, beta, n, big_n)));
                    }
                }
            }
            Ok((worst <= 1e-10, format!("max relative error {worst:e}")))
        })(),
    ));

    checks.push(check(
        "j-shaped predictive vs Monte Carlo",
        (|| {
            let prior = PropensityPrior::JShaped { beta: 0.1 };
            let want = predictive_all_success(&prior, 100, 10_000)?.value;
            Ok(within_se(&mc_predictive(&prior, 100, 10_000, 200_000, seed)?, want, 4.0))
        })(),
    ));

    checks.push(check(
        "beta predictive vs Monte Carlo",
        (|| {
            let prior = PropensityPrior::Beta { alpha: 2.0, beta: 3.0 };
            let want = predictive_all_success(&prior, 5, 20)?.value;
            Ok(within_se(&mc_predictive(&prior, 5, 20, 200_000, seed.wrapping_add(1))?, want, 4.0))
        })(),
    ));

    checks.push(check(
        "averaged predictive vs Monte Carlo",
        (|| {
            let params = OmegaPosteriorParams::new(4.0, 5.0, 0.5)?;
            let r = averaged_predictive(1, 10, 0.5, &params, &quad)?;
            let est = mc_averaged_predictive(1, 10, 0.5, &params, 200_000, seed.wrapping_add(2))?;
            Ok(within_se(&est, r.raw_value, 4.0))
        })(),
    ));

    checks.push(check(
        "averaged posterior density vs Monte Carlo",
        (|| {
            let params = OmegaPosteriorParams::new(1.0, 1.0, 1.0)?;
            let r = averaged_posterior_density(0.5, 1, 0.5, &params, &quad)?;
            let est = mc_averaged_posterior_density(0.5, 1, 0.5, &params, 200_000, seed.wrapping_add(3))?;
            Ok(within_se(&est, r.value, 4.0))
        })(),
    ));

    checks
}
