//! Certification calculus for Bernoulli testing with all observed trials
//! successful.
//!
//! Two routes to the probability that future trials all succeed:
//!
//! - [`discrete_priors`]: a prior on the number of successes `R` among `N`
//!   trials, updated by a hypergeometric sample of `n` successes.
//! - [`propensity`]: a beta-derived prior on the propensity `p`, with
//!   beta-binomial predictive probabilities.
//!
//! [`oracle`] holds independent checks (exact rationals, product forms,
//! seeded Monte Carlo) and [`scenario`] the configuration and record formats
//! used by the command-line front end.

pub mod discrete_priors;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod propensity;
pub mod scenario;

pub use error::{Error, Result};
