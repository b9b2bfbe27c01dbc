//! Beta-derived priors on the propensity `p` and all-success predictives.
//!
//! Every prior and posterior here is a beta law stretched over `[lo, 1]`,
//! represented by [`ShiftedBeta`]. Predictive probabilities use the
//! reciprocal beta convention `B(a, b) = Γ(a+b) / (Γ(a) Γ(b))`, so the
//! probability that `N` further trials succeed after `n` of `n` is
//! `B(α+n, β) / B(α+n+N, β)`.
//!
//! The truncated and reflected families follow the shifted posterior forms
//! `(p - ω)^n (1 - p)^(β-1)` rather than exact Bayes conditioning on
//! `p^n`; [`exact_posterior_density`] measures the difference.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{
    integrate, integrate_with, log_gamma_diff_unchecked, log_inv_beta_unchecked, Abscissa, Endpoint, QuadratureResult,
    QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropensityPrior {
    Beta { alpha: f64, beta: f64 },
    /// Beta(α, 1) with α < 1.
    LShaped { alpha: f64 },
    /// Beta(1, β) with β < 1.
    JShaped { beta: f64 },
    /// `p = 1 - e^(-η) z` with `z ~ Beta(α, β)`; support `[1 - c, 1]`, `c = e^(-η)`.
    ReflectedScaled { alpha: f64, beta: f64, eta: f64 },
    /// Beta(1, β) shifted onto `[ω, 1]`.
    LeftTruncated { beta: f64, omega: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl PropensityPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Beta { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            Self::LShaped { alpha } => unit_open("alpha", alpha),
            Self::JShaped { beta } => unit_open("beta", beta),
            Self::ReflectedScaled { alpha, beta, eta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
                if eta >= 0.0 && eta.is_finite() {
                    Ok(())
                } else {
                    Err(invalid(format!("eta must be finite and nonnegative, got {eta}")))
                }
            }
            Self::LeftTruncated { beta, omega } => {
                unit_open("beta", beta)?;
                if (0.0..1.0).contains(&omega) {
                    Ok(())
                } else {
                    Err(invalid(format!("omega must lie in [0, 1), got {omega}")))
                }
            }
        }
    }

    /// The prior as a beta law on its support.
    pub fn law(&self) -> ShiftedBeta {
        match *self {
            Self::Beta { alpha, beta } => ShiftedBeta::standard(alpha, beta),
            Self::LShaped { alpha } => ShiftedBeta::standard(alpha, 1.0),
            Self::JShaped { beta } => ShiftedBeta::standard(1.0, beta),
            // (1-p)^(α-1) (p-(1-c))^(β-1): the shape roles swap under reflection.
            Self::ReflectedScaled { alpha, beta, eta } => ShiftedBeta::with_width(beta, alpha, (-eta).exp()),
            Self::LeftTruncated { beta, omega } => ShiftedBeta::new(1.0, beta, omega),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.law().lo, 1.0)
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Beta { alpha, beta } => format!("beta(alpha={alpha};beta={beta})"),
            Self::LShaped { alpha } => format!("l-shaped(alpha={alpha})"),
            Self::JShaped { beta } => format!("j-shaped(beta={beta})"),
            Self::ReflectedScaled { alpha, beta, eta } => {
                format!("reflected(alpha={alpha};beta={beta};eta={eta})")
            }
            Self::LeftTruncated { beta, omega } => format!("left-truncated(beta={beta};omega={omega})"),
        }
    }
}

/// Beta(α, β) stretched over `[lo, 1]`:
/// density `∝ (x - lo)^(α-1) (1 - x)^(β-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedBeta {
    pub alpha: f64,
    pub beta: f64,
    pub lo: f64,
    /// `1 - lo`, kept separately so `c = e^(-η)` is exact.
    pub width: f64,
}

fn power_term(exponent: f64, base: f64) -> f64 {
    if exponent == 0.0 {
        0.0
    } else {
        exponent * base.ln()
    }
}

impl ShiftedBeta {
    pub fn standard(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            lo: 0.0,
            width: 1.0,
        }
    }

    pub fn new(alpha: f64, beta: f64, lo: f64) -> Self {
        Self {
            alpha,
            beta,
            lo,
            width: 1.0 - lo,
        }
    }

    pub fn with_width(alpha: f64, beta: f64, width: f64) -> Self {
        Self {
            alpha,
            beta,
            lo: 1.0 - width,
            width,
        }
    }

    fn log_norm(&self) -> f64 {
        log_inv_beta_unchecked(self.alpha, self.beta) - (self.alpha + self.beta - 1.0) * self.width.ln()
    }

    /// Density at `x`; zero outside `[lo, 1]`, `+∞` at an unbounded endpoint.
    pub fn density(&self, x: f64) -> f64 {
        if !(x >= self.lo && x <= 1.0) {
            return 0.0;
        }
        self.density_offsets(x - self.lo, 1.0 - x)
    }

    /// Density from the distances to the two support ends.
    pub fn density_offsets(&self, from_lo: f64, to_hi: f64) -> f64 {
        (self.log_norm() + power_term(self.alpha - 1.0, from_lo) + power_term(self.beta - 1.0, to_hi)).exp()
    }

    pub(crate) fn singular_at_lo(&self) -> bool {
        self.alpha < 1.0
    }

    pub(crate) fn singular_at_hi(&self) -> bool {
        self.beta < 1.0
    }
}

/// Prior density at `p`.
pub fn density(prior: &PropensityPrior, p: f64) -> f64 {
    prior.law().density(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateNote {
    /// Standard conjugate update of a beta prior.
    ExactConjugate,
    /// Shifted posterior form for the truncated and reflected families.
    PaperShifted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorUpdate {
    pub law: ShiftedBeta,
    pub n_observed: u64,
    pub note: UpdateNote,
}

/// Posterior after `n ≥ 1` trials, all successful.
pub fn update_all_success(prior: &PropensityPrior, n: u64) -> Result<PosteriorUpdate> {
    prior.validate()?;
    if n < 1 {
        return Err(invalid("update needs at least one observed success"));
    }
    let nf = n as f64;
    let (law, note) = match *prior {
        PropensityPrior::Beta { alpha, beta } => (ShiftedBeta::standard(alpha + nf, beta), UpdateNote::ExactConjugate),
        PropensityPrior::LShaped { alpha } => (ShiftedBeta::standard(alpha + nf, 1.0), UpdateNote::ExactConjugate),
        PropensityPrior::JShaped { beta } => (ShiftedBeta::standard(nf + 1.0, beta), UpdateNote::ExactConjugate),
        PropensityPrior::LeftTruncated { beta, omega } => (ShiftedBeta::new(nf + 1.0, beta, omega), UpdateNote::PaperShifted),
        PropensityPrior::ReflectedScaled { alpha, beta, eta } => {
            if alpha != 1.0 {
                return Err(Error::Unsupported(
                    "all-success update of the reflected family is defined only for alpha = 1".into(),
                ));
            }
            (ShiftedBeta::with_width(nf + 1.0, beta, (-eta).exp()), UpdateNote::PaperShifted)
        }
    };
    Ok(PosteriorUpdate {
        law,
        n_observed: n,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictiveMethod {
    ClosedForm,
    LogGamma,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveResult {
    pub value: f64,
    pub raw_value: f64,
    pub clamped: bool,
    pub method: PredictiveMethod,
    pub err_estimate: Option<f64>,
    /// Set only by [`averaged_predictive`] when its integral diverges.
    pub diverged: bool,
}

impl PredictiveResult {
    fn new(raw_value: f64, method: PredictiveMethod, err_estimate: Option<f64>, diverged: bool) -> Self {
        let value = if raw_value.is_nan() { raw_value } else { raw_value.clamp(0.0, 1.0) };
        Self {
            value,
            raw_value,
            clamped: value != raw_value,
            method,
            err_estimate,
            diverged,
        }
    }
}

/// `ln[B(a, β) / B(a+N, β)]`, the log of `E[p^N]` under Beta(a, β).
pub(crate) fn log_all_success_ratio(a: f64, beta: f64, future: u64) -> f64 {
    // The ln Γ(β) terms cancel.
    log_gamma_diff_unchecked(a, beta) - log_gamma_diff_unchecked(a + future as f64, beta)
}

/// Probability that `N` future trials all succeed after `n` of `n`.
pub fn predictive_all_success(prior: &PropensityPrior, n: u64, future: u64) -> Result<PredictiveResult> {
    prior.validate()?;
    if future < 1 {
        return Err(invalid("number of future trials N must be at least 1"));
    }
    let nf = n as f64;
    let result = match *prior {
        PropensityPrior::Beta { alpha, beta } => {
            PredictiveResult::new(log_all_success_ratio(alpha + nf, beta, future).exp(), PredictiveMethod::LogGamma, None, false)
        }
        PropensityPrior::LShaped { alpha } => {
            let a = alpha + nf;
            PredictiveResult::new(a / (a + future as f64), PredictiveMethod::ClosedForm, None, false)
        }
        PropensityPrior::JShaped { beta } => {
            PredictiveResult::new(log_all_success_ratio(nf + 1.0, beta, future).exp(), PredictiveMethod::LogGamma, None, false)
        }
        PropensityPrior::LeftTruncated { beta, omega } => {
            let log_raw = log_all_success_ratio(nf + 1.0, beta, future) - (nf + beta) * (-omega).ln_1p();
            PredictiveResult::new(log_raw.exp(), PredictiveMethod::LogGamma, None, false)
        }
        PropensityPrior::ReflectedScaled { alpha, beta, eta } => {
            if alpha != 1.0 {
                return Err(Error::Unsupported(
                    "predictive of the reflected family is defined only for alpha = 1".into(),
                ));
            }
            // Same shifted posterior as the left-truncated family with ω = 1 - c.
            let log_raw = log_all_success_ratio(nf + 1.0, beta, future) + (nf + beta) * eta;
            PredictiveResult::new(log_raw.exp(), PredictiveMethod::LogGamma, None, false)
        }
    };
    Ok(result)
}

/// `Γ(n+1+β) / (Γ(n+1) Γ(β)) · c^(β-1)` for the reflected family with α = 1.
///
/// This is the stated expression for the posterior weight at `p = 1`, reported
/// as is; it is not normalized and can exceed one.
pub fn posterior_mass_at_one(prior: &PropensityPrior, n: u64) -> Result<f64> {
    prior.validate()?;
    match *prior {
        PropensityPrior::ReflectedScaled { alpha: 1.0, beta, eta } => {
            if n < 1 {
                return Err(invalid("n must be at least 1"));
            }
            // ln c = -η
            Ok((log_inv_beta_unchecked(n as f64 + 1.0, beta) - (beta - 1.0) * eta).exp())
        }
        _ => Err(Error::Unsupported(
            "mass at one is defined for the reflected family with alpha = 1".into(),
        )),
    }
}

/// Parameters of the shifted beta law of the threshold ω on `[1 - c, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPosteriorParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl OmegaPosteriorParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        positive("b", self.b)?;
        if self.c > 0.0 && self.c <= 1.0 {
            Ok(())
        } else {
            Err(invalid(format!("c must lie in (0, 1], got {}", self.c)))
        }
    }

    /// Density `∝ (1 - ω)^(a-1) (ω - (1-c))^(b-1)` as a [`ShiftedBeta`].
    pub fn law(&self) -> ShiftedBeta {
        ShiftedBeta::with_width(self.b, self.a, self.c)
    }
}

/// Tabulated threshold posteriors, keyed by the number of successes.
pub const OMEGA_TABLE: [(u64, OmegaPosteriorParams); 9] = [
    (1, OmegaPosteriorParams { a: 1.0, b: 1.0, c: 1.0 }),
    (2, OmegaPosteriorParams { a: 2.0, b: 2.0, c: 1.0 }),
    (5, OmegaPosteriorParams { a: 2.0, b: 3.0, c: 1.0 }),
    (10, OmegaPosteriorParams { a: 3.0, b: 4.0, c: 0.95 }),
    (25, OmegaPosteriorParams { a: 3.0, b: 4.0, c: 0.9 }),
    (50, OmegaPosteriorParams { a: 3.0, b: 4.0, c: 0.75 }),
    (75, OmegaPosteriorParams { a: 4.0, b: 5.0, c: 0.5 }),
    (100, OmegaPosteriorParams { a: 4.0, b: 5.0, c: 0.25 }),
    (1000, OmegaPosteriorParams { a: 4.0, b: 5.0, c: 0.05 }),
];

/// Row of [`OMEGA_TABLE`] with the largest tabulated `n` not above the input.
pub fn omega_posterior_params(n: u64) -> Result<OmegaPosteriorParams> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let row = OMEGA_TABLE
        .iter()
        .rev()
        .find(|(key, _)| *key <= n)
        .map(|(_, p)| *p)
        .expect("table starts at n = 1");
    Ok(row)
}

pub fn omega_posterior_density(omega: f64, params: &OmegaPosteriorParams) -> f64 {
    params.law().density(omega)
}

fn check_averaging_inputs(n: u64, beta: f64, params: &OmegaPosteriorParams, spec: &QuadratureSpec) -> Result<()> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    unit_open("beta", beta)?;
    params.validate()?;
    spec.validate()
}

/// Posterior density of `p` averaged over the threshold posterior.
///
/// The ω integral runs over `[1 - c, min(p, 1)]`, where the conditional
/// posterior `(p - ω)^n (1 - p)^(β-1) / (1 - ω)^(n+β)` is a valid density.
pub fn averaged_posterior_density(
    p: f64,
    n: u64,
    beta: f64,
    params: &OmegaPosteriorParams,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_averaging_inputs(n, beta, params, spec)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    let omega_law = params.law();
    let lo = omega_law.lo;
    if p <= lo {
        return Ok(QuadratureResult {
            value: 0.0,
            err_estimate: 0.0,
            converged: true,
            truncated_endpoint: false,
        });
    }
    let nf = n as f64;
    let log_k = log_inv_beta_unchecked(nf + 1.0, beta);
    let one_minus_p = 1.0 - p;
    let integrand = |a: Abscissa| {
        // a.from_lo = ω - (1-c), a.to_hi = p - ω
        let one_minus_omega = one_minus_p + a.to_hi;
        let log_cond = log_k + nf * a.to_hi.ln() - (nf + beta) * one_minus_omega.ln();
        let log_prior = omega_law.log_norm()
            + power_term(omega_law.alpha - 1.0, a.from_lo)
            + power_term(omega_law.beta - 1.0, one_minus_omega);
        (log_cond + log_prior).exp()
    };
    let raw = integrate(integrand, lo, p, spec, omega_law.singular_at_lo(), false)?;
    let scale = one_minus_p.powf(beta - 1.0);
    Ok(QuadratureResult {
        value: raw.value * scale,
        err_estimate: raw.err_estimate * scale,
        ..raw
    })
}

/// Predictive probability of `N` future successes averaged over the threshold
/// posterior.
///
/// The ω integral `∫ (ω - (1-c))^(b-1) / (1 - ω)^(n+β+1-a) dω` diverges at
/// ω = 1 when `n + β + 1 - a ≥ 1`; the result is then the value truncated at
/// `1 - endpoint_eps`, flagged `diverged` and clamped.
pub fn averaged_predictive(
    n: u64,
    future: u64,
    beta: f64,
    params: &OmegaPosteriorParams,
    spec: &QuadratureSpec,
) -> Result<PredictiveResult> {
    check_averaging_inputs(n, beta, params, spec)?;
    if future < 1 {
        return Err(invalid("number of future trials N must be at least 1"));
    }
    let nf = n as f64;
    let exponent = nf + beta + 1.0 - params.a;
    let diverged = exponent >= 1.0;
    let omega_law = params.law();
    let log_coef = log_all_success_ratio(nf + 1.0, beta, future) + omega_law.log_norm();
    let b_minus_1 = params.b - 1.0;
    let integrand = |a: Abscissa| (log_coef + power_term(b_minus_1, a.from_lo) - power_term(exponent, a.to_hi)).exp();
    let lo_policy = if params.b < 1.0 { Endpoint::Singular } else { Endpoint::Regular };
    let hi_policy = if diverged {
        Endpoint::Truncate
    } else if exponent > 0.0 {
        Endpoint::Singular
    } else {
        Endpoint::Regular
    };
    let r = integrate_with(integrand, omega_law.lo, 1.0, spec, lo_policy, hi_policy)?;
    if diverged {
        let raw = if r.value.is_nan() { f64::INFINITY } else { r.value };
        let err = r.err_estimate.is_finite().then_some(r.err_estimate);
        return Ok(PredictiveResult::new(raw, PredictiveMethod::Quadrature, err, true));
    }
    if !r.converged {
        return Err(Error::NonConvergence {
            operation: "averaged_predictive",
            value: r.value,
            err_estimate: r.err_estimate,
        });
    }
    Ok(PredictiveResult::new(r.value, PredictiveMethod::Quadrature, Some(r.err_estimate), false))
}

/// Exact Bayes posterior density `∝ p^n π(p)`, normalized by quadrature.
pub fn exact_posterior_density(prior: &PropensityPrior, n: u64, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    prior.validate()?;
    let law = prior.law();
    if !(p >= law.lo && p <= 1.0) {
        return Ok(0.0);
    }
    let nf = n as f64;
    let kernel = |x: f64, from_lo: f64, to_hi: f64| (nf * x.ln()).exp() * law.density_offsets(from_lo, to_hi);
    // p^n removes a singularity at 0 once n ≥ 1.
    let singular_lo = law.singular_at_lo() && !(law.lo == 0.0 && nf + law.alpha >= 1.0);
    let z = integrate(
        |a| kernel(a.x, a.from_lo, a.to_hi),
        law.lo,
        1.0,
        spec,
        singular_lo,
        law.singular_at_hi(),
    )?;
    if !z.converged || z.truncated_endpoint {
        return Err(Error::NonConvergence {
            operation: "exact_posterior_density",
            value: z.value,
            err_estimate: z.err_estimate,
        });
    }
    Ok(kernel(p, p - law.lo, 1.0 - p) / z.value)
}
