//! Scenario files, prior construction, and the evaluations behind the
//! command-line verbs.
//!
//! A scenario file is a JSON object:
//!
//! ```json
//! {"prior": {"family": "jeffreys", "k": 0.25}, "n": 7, "N": "limit", "target": 0.99}
//! ```
//!
//! Records written by `eval --format json` carry the same keys and can be
//! read back as scenario files.

mod axis;
mod eval;
mod format;

use std::fmt;

use serde::de::{self, IgnoredAny, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::discrete_priors::DiscretePriorSpec;
use crate::error::{config, Result};
use crate::numerics::QuadratureSpec;
use crate::propensity::{OmegaPosteriorParams, PropensityPrior};

pub use axis::{
    is_axis, parse_axis, parse_count, parse_count_axis, parse_future, DEFAULT_LOG_POINTS, MAX_AXIS_POINTS, MAX_COUNT,
};
pub use eval::{
    default_grid, density_rows, evaluate, plan, sweep, DensityRow, Evaluation, Method, PlanOutcome, SweepAxis,
    SweepRow, DEFAULT_GRID_POINTS, DEFAULT_N_MAX, LARGE_N_PROXY,
};
pub use format::{
    density_output, eval_output, format_sig, plan_output, sweep_output, EvalRecord, Format, PlanRecord, CSV_DIGITS,
    JSON_DIGITS,
};

/// Prior family names accepted in `prior.family` and `--prior`.
pub const FAMILIES: [&str; 11] = [
    "bayes-laplace",
    "jeffreys",
    "bernardo",
    "portmanteau",
    "custom",
    "beta",
    "l-shaped",
    "j-shaped",
    "reflected",
    "left-truncated",
    "omega-averaged",
];

/// Number of future trials, or the `N → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FutureTrials {
    Count(u64),
    Limit,
}

impl fmt::Display for FutureTrials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Count(n) => write!(f, "{n}"),
            Self::Limit => f.write_str("limit"),
        }
    }
}

impl<'de> Deserialize<'de> for FutureTrials {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct FutureVisitor;

        impl Visitor<'_> for FutureVisitor {
            type Value = FutureTrials;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"limit\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<FutureTrials, E> {
                if v > MAX_COUNT {
                    return Err(E::custom(format!("N = {v} out of range")));
                }
                Ok(FutureTrials::Count(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<FutureTrials, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom("N must be nonnegative"))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<FutureTrials, E> {
                if v >= 0.0 && v.fract() == 0.0 && v <= MAX_COUNT as f64 {
                    Ok(FutureTrials::Count(v as u64))
                } else {
                    Err(E::custom(format!("N = {v} is not a nonnegative integer")))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<FutureTrials, E> {
                if v == "limit" {
                    Ok(FutureTrials::Limit)
                } else {
                    Err(E::custom(format!("N must be an integer or \"limit\", got {v:?}")))
                }
            }
        }

        deserializer.deserialize_any(FutureVisitor)
    }
}

/// Prior family and its parameters, as written in a scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorParams {
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub decay_k: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub masses: Option<Vec<f64>>,
}

impl PriorParams {
    pub fn family(name: &str) -> Self {
        Self {
            family: Some(name.to_string()),
            ..Self::default()
        }
    }

    /// Names of the scalar parameters that are set, in declaration order.
    fn set_scalars(&self) -> Vec<(&'static str, f64)> {
        [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("k", self.k),
            ("q", self.q),
            ("decay_k", self.decay_k),
            ("lambda", self.lambda),
            ("eta", self.eta),
            ("omega", self.omega),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
        .collect()
    }

    /// Copies every parameter set in `other` over this one. A different family
    /// in `other` discards this one's parameters first.
    pub fn overlay(&mut self, other: &PriorParams) {
        if other.family.is_some() && other.family != self.family {
            *self = PriorParams {
                family: other.family.clone(),
                ..PriorParams::default()
            };
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field.clone(); })*
            };
        }
        take!(alpha, beta, k, q, decay_k, lambda, eta, omega, a, b, c, masses);
    }
}

/// Optional quadrature overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureParams {
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub max_depth: Option<u32>,
    #[serde(default)]
    pub endpoint_eps: Option<f64>,
}

impl QuadratureParams {
    pub fn overlay(&mut self, other: &QuadratureParams) {
        self.abs_tol = other.abs_tol.or(self.abs_tol);
        self.rel_tol = other.rel_tol.or(self.rel_tol);
        self.max_depth = other.max_depth.or(self.max_depth);
        self.endpoint_eps = other.endpoint_eps.or(self.endpoint_eps);
    }

    pub fn resolve(&self) -> Result<QuadratureSpec> {
        let d = QuadratureSpec::default();
        let spec = QuadratureSpec {
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            endpoint_eps: self.endpoint_eps.unwrap_or(d.endpoint_eps),
        };
        spec.validate().map_err(|e| config(e.to_string()))?;
        Ok(spec)
    }
}

/// Contents of a scenario file, or the same fields collected from flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub prior: Option<PriorParams>,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default, rename = "N")]
    pub future: Option<FutureTrials>,
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub n_max: Option<u64>,
    #[serde(default)]
    pub quadrature: Option<QuadratureParams>,
    // Output fields of an eval record, accepted and ignored on input.
    #[serde(default, rename = "description")]
    _description: Option<IgnoredAny>,
    #[serde(default, rename = "value")]
    _value: Option<IgnoredAny>,
    #[serde(default, rename = "raw_value")]
    _raw_value: Option<IgnoredAny>,
    #[serde(default, rename = "method")]
    _method: Option<IgnoredAny>,
    #[serde(default, rename = "clamped")]
    _clamped: Option<IgnoredAny>,
    #[serde(default, rename = "diverged")]
    _diverged: Option<IgnoredAny>,
}

impl ScenarioFile {
    /// Applies `flags` on top of this file; set flags win.
    pub fn overlay(&mut self, flags: &ScenarioFile) {
        match (&mut self.prior, &flags.prior) {
            (Some(mine), Some(theirs)) => mine.overlay(theirs),
            (None, Some(theirs)) => self.prior = Some(theirs.clone()),
            _ => {}
        }
        match (&mut self.quadrature, &flags.quadrature) {
            (Some(mine), Some(theirs)) => mine.overlay(theirs),
            (None, Some(theirs)) => self.quadrature = Some(*theirs),
            _ => {}
        }
        self.n = flags.n.or(self.n);
        self.future = flags.future.or(self.future);
        self.target = flags.target.or(self.target);
        self.n_max = flags.n_max.or(self.n_max);
    }

    pub fn prior_choice(&self) -> Result<PriorChoice> {
        let params = self.prior.as_ref().ok_or_else(|| config("no prior given"))?;
        PriorChoice::from_params(params)
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        self.quadrature.unwrap_or_default().resolve()
    }

    pub fn require_n(&self) -> Result<u64> {
        self.n.ok_or_else(|| config("n is required"))
    }

    pub fn require_future(&self) -> Result<FutureTrials> {
        self.future.ok_or_else(|| config("N is required"))
    }
}

/// Parses a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| config(format!("scenario: {e}")))?;
    if !value.is_object() {
        return Err(config("scenario must be a JSON object"));
    }
    ScenarioFile::deserialize(value).map_err(|e| config(format!("scenario: {e}")))
}

/// A fully specified prior of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorChoice {
    Discrete(DiscretePriorSpec),
    Propensity(PropensityPrior),
    /// Left-truncated J-shaped prior averaged over a threshold posterior;
    /// without explicit parameters the tabulated row for `n` is used.
    OmegaAveraged {
        beta: f64,
        params: Option<OmegaPosteriorParams>,
    },
}

impl PriorChoice {
    pub fn from_params(p: &PriorParams) -> Result<Self> {
        let family = p.family.as_deref().ok_or_else(|| config("prior family is missing"))?;
        let allowed: &[&str] = match family {
            "bayes-laplace" | "custom" => &[],
            "jeffreys" | "bernardo" => &["k"],
            "portmanteau" => &["q", "decay_k", "lambda"],
            "beta" => &["alpha", "beta"],
            "l-shaped" => &["alpha"],
            "j-shaped" => &["beta"],
            "reflected" => &["alpha", "beta", "eta"],
            "left-truncated" => &["beta", "omega"],
            "omega-averaged" => &["beta", "a", "b", "c"],
            other => {
                return Err(config(format!(
                    "unknown prior family {other:?}; expected one of {}",
                    FAMILIES.join(", ")
                )))
            }
        };
        if let Some((name, _)) = p.set_scalars().into_iter().find(|(name, _)| !allowed.contains(name)) {
            return Err(config(format!("parameter {name} does not apply to family {family}")));
        }
        if p.masses.is_some() && family != "custom" {
            return Err(config(format!("masses do not apply to family {family}")));
        }
        let need = |name: &str, v: Option<f64>| v.ok_or_else(|| config(format!("family {family} needs {name}")));
        let choice = match family {
            "bayes-laplace" => Self::Discrete(DiscretePriorSpec::BayesLaplace),
            "jeffreys" => Self::Discrete(DiscretePriorSpec::Jeffreys { mass_k: need("k", p.k)? }),
            "bernardo" => Self::Discrete(DiscretePriorSpec::Bernardo { mass_k: need("k", p.k)? }),
            "portmanteau" => Self::Discrete(DiscretePriorSpec::Portmanteau {
                q: need("q", p.q)?,
                decay_k: need("decay_k", p.decay_k)?,
                lambda: need("lambda", p.lambda)?,
            }),
            "custom" => Self::Discrete(DiscretePriorSpec::Custom {
                masses: p.masses.clone().ok_or_else(|| config("family custom needs masses"))?,
            }),
            "beta" => Self::Propensity(PropensityPrior::Beta {
                alpha: need("alpha", p.alpha)?,
                beta: need("beta", p.beta)?,
            }),
            "l-shaped" => Self::Propensity(PropensityPrior::LShaped {
                alpha: need("alpha", p.alpha)?,
            }),
            "j-shaped" => Self::Propensity(PropensityPrior::JShaped { beta: need("beta", p.beta)? }),
            "reflected" => Self::Propensity(PropensityPrior::ReflectedScaled {
                alpha: need("alpha", p.alpha)?,
                beta: need("beta", p.beta)?,
                eta: need("eta", p.eta)?,
            }),
            "left-truncated" => Self::Propensity(PropensityPrior::LeftTruncated {
                beta: need("beta", p.beta)?,
                omega: need("omega", p.omega)?,
            }),
            _ => {
                let params = match (p.a, p.b, p.c) {
                    (None, None, None) => None,
                    (Some(a), Some(b), Some(c)) => Some(OmegaPosteriorParams { a, b, c }),
                    _ => return Err(config("omega-averaged takes all of a, b, c or none")),
                };
                Self::OmegaAveraged {
                    beta: need("beta", p.beta)?,
                    params,
                }
            }
        };
        choice.validate()?;
        Ok(choice)
    }

    pub fn validate(&self) -> Result<()> {
        let r = match self {
            Self::Discrete(spec) => spec.validate(),
            Self::Propensity(prior) => prior.validate(),
            Self::OmegaAveraged { beta, params } => {
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(config(format!("beta must lie in (0, 1), got {beta}")));
                }
                params.map_or(Ok(()), |p| p.validate())
            }
        };
        r.map_err(|e| config(e.to_string()))
    }

    /// Canonical parameters, suitable for writing back into a scenario file.
    pub fn to_params(&self) -> PriorParams {
        match self {
            Self::Discrete(spec) => match spec {
                DiscretePriorSpec::BayesLaplace => PriorParams::family("bayes-laplace"),
                DiscretePriorSpec::Jeffreys { mass_k } => PriorParams {
                    k: Some(*mass_k),
                    ..PriorParams::family("jeffreys")
                },
                DiscretePriorSpec::Bernardo { mass_k } => PriorParams {
                    k: Some(*mass_k),
                    ..PriorParams::family("bernardo")
                },
                DiscretePriorSpec::Portmanteau { q, decay_k, lambda } => PriorParams {
                    q: Some(*q),
                    decay_k: Some(*decay_k),
                    lambda: Some(*lambda),
                    ..PriorParams::family("portmanteau")
                },
                DiscretePriorSpec::Custom { masses } => PriorParams {
                    masses: Some(masses.clone()),
                    ..PriorParams::family("custom")
                },
            },
            Self::Propensity(prior) => match *prior {
                PropensityPrior::Beta { alpha, beta } => PriorParams {
                    alpha: Some(alpha),
                    beta: Some(beta),
                    ..PriorParams::family("beta")
                },
                PropensityPrior::LShaped { alpha } => PriorParams {
                    alpha: Some(alpha),
                    ..PriorParams::family("l-shaped")
                },
                PropensityPrior::JShaped { beta } => PriorParams {
                    beta: Some(beta),
                    ..PriorParams::family("j-shaped")
                },
                PropensityPrior::ReflectedScaled { alpha, beta, eta } => PriorParams {
                    alpha: Some(alpha),
                    beta: Some(beta),
                    eta: Some(eta),
                    ..PriorParams::family("reflected")
                },
                PropensityPrior::LeftTruncated { beta, omega } => PriorParams {
                    beta: Some(beta),
                    omega: Some(omega),
                    ..PriorParams::family("left-truncated")
                },
            },
            Self::OmegaAveraged { beta, params } => PriorParams {
                beta: Some(*beta),
                a: params.map(|p| p.a),
                b: params.map(|p| p.b),
                c: params.map(|p| p.c),
                ..PriorParams::family("omega-averaged")
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Discrete(spec) => spec.describe(),
            Self::Propensity(prior) => prior.describe(),
            Self::OmegaAveraged { beta, params: None } => format!("omega-averaged(beta={beta};table)"),
            Self::OmegaAveraged {
                beta,
                params: Some(p),
            } => format!("omega-averaged(beta={beta};a={};b={};c={})", p.a, p.b, p.c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let f = parse_scenario(r#"{"prior": {"family": "jeffreys", "k": 0.25}, "n": 7, "N": "limit"}"#).unwrap();
        assert_eq!(f.n, Some(7));
        assert_eq!(f.future, Some(FutureTrials::Limit));
        assert_eq!(
            f.prior_choice().unwrap(),
            PriorChoice::Discrete(DiscretePriorSpec::Jeffreys { mass_k: 0.25 })
        );
        let f = parse_scenario(r#"{"prior": {"family": "bayes-laplace"}, "n": 1, "N": 1e6}"#).unwrap();
        assert_eq!(f.future, Some(FutureTrials::Count(1_000_000)));
    }

    #[test]
    fn rejects_bad_files() {
        for bad in [
            "",
            "[]",
            "{",
            r#"{"prior": {"family": "beta", "alpha": 1, "beta": 1}, "N": -1}"#,
            r#"{"prior": {"family": "beta", "alpha": 1, "beta": 1}, "N": "many"}"#,
            r#"{"prior": {"family": "beta", "gamma": 1}}"#,
            r#"{"priors": {}}"#,
            r#"{"n": 1.5}"#,
        ] {
            assert!(parse_scenario(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn prior_parameter_checks() {
        let params = |s: &str| serde_json::from_str::<PriorParams>(s).unwrap();
        assert!(PriorChoice::from_params(&params(r#"{"family": "beta", "alpha": 1}"#)).is_err());
        assert!(PriorChoice::from_params(&params(r#"{"family": "beta", "alpha": 1, "beta": 1, "k": 1}"#)).is_err());
        assert!(PriorChoice::from_params(&params(r#"{"family": "gamma"}"#)).is_err());
        assert!(PriorChoice::from_params(&params(r#"{"family": "jeffreys", "k": 0.7}"#)).is_err());
        assert!(PriorChoice::from_params(&params(r#"{"family": "omega-averaged", "beta": 0.5, "a": 1}"#)).is_err());
        assert!(PriorChoice::from_params(&params(r#"{"family": "custom", "masses": [1, 2, 3]}"#)).is_ok());
    }

    #[test]
    fn canonical_params_rebuild_the_same_prior() {
        for json in [
            r#"{"family": "bayes-laplace"}"#,
            r#"{"family": "bernardo", "k": 0.5}"#,
            r#"{"family": "portmanteau", "q": 0.5, "decay_k": 0.01, "lambda": 2}"#,
            r#"{"family": "custom", "masses": [0.25, 0.75]}"#,
            r#"{"family": "reflected", "alpha": 3, "beta": 2, "eta": 0.5}"#,
            r#"{"family": "left-truncated", "beta": 0.1, "omega": 0.3}"#,
            r#"{"family": "omega-averaged", "beta": 0.5}"#,
            r#"{"family": "omega-averaged", "beta": 0.5, "a": 4, "b": 5, "c": 0.5}"#,
        ] {
            let choice = PriorChoice::from_params(&serde_json::from_str(json).unwrap()).unwrap();
            assert_eq!(PriorChoice::from_params(&choice.to_params()).unwrap(), choice);
        }
    }

    #[test]
    fn flags_override_file() {
        let mut file = parse_scenario(r#"{"prior": {"family": "jeffreys", "k": 0.25}, "n": 7, "N": 100}"#).unwrap();
        let flags = ScenarioFile {
            prior: Some(PriorParams {
                k: Some(0.1),
                ..PriorParams::default()
            }),
            future: Some(FutureTrials::Limit),
            ..ScenarioFile::default()
        };
        file.overlay(&flags);
        assert_eq!(file.n, Some(7));
        assert_eq!(file.future, Some(FutureTrials::Limit));
        assert_eq!(file.prior.as_ref().unwrap().k, Some(0.1));

        let flags = ScenarioFile {
            prior: Some(PriorParams {
                beta: Some(0.5),
                ..PriorParams::family("j-shaped")
            }),
            ..ScenarioFile::default()
        };
        file.overlay(&flags);
        let prior = file.prior.clone().unwrap();
        assert_eq!(prior.k, None);
        assert_eq!(file.prior_choice().unwrap(), PriorChoice::Propensity(PropensityPrior::JShaped { beta: 0.5 }));
    }

    #[test]
    fn quadrature_overrides() {
        let f = parse_scenario(r#"{"quadrature": {"endpoint_eps": 1e-9}}"#).unwrap();
        let spec = f.quadrature_spec().unwrap();
        assert_eq!(spec.endpoint_eps, 1e-9);
        assert_eq!(spec.rel_tol, QuadratureSpec::default().rel_tol);
        let f = parse_scenario(r#"{"quadrature": {"rel_tol": -1}}"#).unwrap();
        assert!(f.quadrature_spec().is_err());
    }
}
