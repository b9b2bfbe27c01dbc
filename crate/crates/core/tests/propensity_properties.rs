use certcalc::numerics::{integrate, log_gamma, QuadratureSpec};
use certcalc::propensity::{
    posterior_mass_at_one, predictive_all_success, update_all_success, PropensityPrior,
};

fn variants(beta: f64) -> Vec<PropensityPrior> {
    vec![
        PropensityPrior::Beta { alpha: 2.0, beta: beta + 1.0 },
        PropensityPrior::LShaped { alpha: beta },
        PropensityPrior::JShaped { beta },
        PropensityPrior::LeftTruncated { beta, omega: 0.3 },
        PropensityPrior::ReflectedScaled { alpha: 1.0, beta, eta: 0.2 },
    ]
}

#[test]
fn predictive_increases_in_n_and_decreases_in_future() {
    for beta in [0.1, 0.5, 0.9] {
        for prior in variants(beta) {
            for big_n in [1, 10, 1000] {
                let mut prev = -1.0;
                for n in [0, 1, 2, 5, 10, 50, 200] {
                    let r = predictive_all_success(&prior, n, big_n).unwrap();
                    if r.clamped {
                        break;
                    }
                    assert!(r.value > prev, "{prior:?} N={big_n} n={n}");
                    prev = r.value;
                }
            }
            for n in [0, 3, 100] {
                let mut prev = 2.0;
                for big_n in [1, 2, 10, 100, 10_000] {
                    let r = predictive_all_success(&prior, n, big_n).unwrap();
                    if r.clamped {
                        continue;
                    }
                    assert!(r.value < prev, "{prior:?} n={n} N={big_n}");
                    prev = r.value;
                }
            }
        }
    }
}

#[test]
fn j_shaped_curve_shape() {
    let j = PropensityPrior::JShaped { beta: 0.1 };
    let at = |n| predictive_all_success(&j, n, 10_000).unwrap().value;
    for n in 0..=9 {
        assert!(at(n) < 0.5, "n={n}");
    }
    // n = 10 already crosses one half: 0.50384...
    assert!(at(10) > 0.5 && at(10) < 0.51);
    assert!(at(10_000) > 0.9);
    assert!((at(100) - 0.63067248265939428).abs() < 1e-12);
}

#[test]
fn truncation_never_lowers_predictive() {
    for beta in [0.1, 0.5, 0.9] {
        for omega in [0.01, 0.3, 0.9] {
            for n in [0, 1, 10, 100] {
                for big_n in [1, 10, 10_000] {
                    let j = predictive_all_success(&PropensityPrior::JShaped { beta }, n, big_n).unwrap().value;
                    let t = predictive_all_success(&PropensityPrior::LeftTruncated { beta, omega }, n, big_n).unwrap();
                    assert!(t.value >= j, "β={beta} ω={omega} n={n} N={big_n}");
                    assert!(t.value > j || t.clamped);
                }
            }
        }
    }
}

#[test]
fn truncated_posterior_leaves_the_threshold() {
    let quad = QuadratureSpec::default();
    let omega = 0.2;
    let mut prev = f64::INFINITY;
    for n in [1, 2, 5, 10, 20, 50] {
        let law = update_all_success(&PropensityPrior::LeftTruncated { beta: 0.5, omega }, n).unwrap().law;
        let cdf = integrate(|a| law.density(a.x), omega, omega + 0.01, &quad, false, false).unwrap().value;
        assert!(cdf < prev, "n={n}");
        prev = cdf;
    }
}

// The weight at one exceeds β/c exactly when
// Γ(n+1+β) / (Γ(n+1) Γ(1+β)) > c^(-β).
#[test]
fn mass_at_one_against_prior_level() {
    let mut failures = 0;
    for beta in [0.1, 0.5, 0.9] {
        for eta in [0.0f64, 0.1, 0.7, 2.0, 4.6] {
            for n in [1, 2, 10, 100, 1000] {
                let c = (-eta).exp();
                let prior = PropensityPrior::ReflectedScaled { alpha: 1.0, beta, eta };
                let mass = posterior_mass_at_one(&prior, n).unwrap();
                let nf = n as f64;
                let g = (log_gamma(nf + 1.0 + beta).unwrap() - log_gamma(nf + 1.0).unwrap()
                    - log_gamma(1.0 + beta).unwrap())
                .exp();
                let exceeds = mass > beta / c;
                assert_eq!(exceeds, g > c.powf(-beta), "β={beta} c={c} n={n}");
                if eta == 0.0 {
                    assert!(exceeds);
                }
                failures += usize::from(!exceeds);
            }
        }
    }
    // small c with small n falls below β/c
    assert!(failures > 0);
}
