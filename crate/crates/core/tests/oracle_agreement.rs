use certcalc::discrete_priors::{generic_posterior_r_eq_n, posterior_r_eq_n, DiscretePriorSpec};
use certcalc::oracle::{
    chain_product_predictive, exact_discrete_posterior, mc_averaged_posterior_density, mc_averaged_predictive,
    mc_predictive, product_form_predictive,
};
use certcalc::numerics::QuadratureSpec;
use certcalc::propensity::{
    averaged_posterior_density, averaged_predictive, predictive_all_success, OmegaPosteriorParams, PropensityPrior,
};

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn rational_priors() -> Vec<DiscretePriorSpec> {
    let mut specs = vec![DiscretePriorSpec::BayesLaplace];
    for k in [0.1, 0.25, 0.5] {
        specs.push(DiscretePriorSpec::Jeffreys { mass_k: k });
    }
    for k in [0.1, 0.5, 0.9] {
        specs.push(DiscretePriorSpec::Bernardo { mass_k: k });
    }
    specs
}

#[test]
fn log_space_sum_matches_exact_rationals() {
    let populations: Vec<u64> = (1..=30).chain([50, 99, 150, 200]).collect();
    for spec in rational_priors() {
        for &big_n in &populations {
            for n in 1..=big_n {
                let want = exact_discrete_posterior(&spec, big_n, n).unwrap().to_f64();
                let got = generic_posterior_r_eq_n(&spec, big_n, n).unwrap().prob_r_eq_n;
                assert!(rel(got, want) <= 1e-12, "{spec:?} N={big_n} n={n}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn custom_masses_match_exact_rationals() {
    let masses: Vec<f64> = (0..=40).map(|r| 1.0 + (r % 7) as f64 * 0.125).collect();
    let spec = DiscretePriorSpec::Custom { masses };
    for n in 0..=40 {
        let want = exact_discrete_posterior(&spec, 40, n).unwrap().to_f64();
        let got = posterior_r_eq_n(&spec, 40, n).unwrap().prob_r_eq_n;
        assert!(rel(got, want) <= 1e-12, "n={n}: {got} vs {want}");
    }
}

#[test]
fn product_form_matches_log_gamma_grid() {
    for beta in [0.1, 0.5, 0.9] {
        for n in [0, 1, 10, 100, 10_000] {
            for big_n in [1, 10, 1000, 10_000] {
                let lg = predictive_all_success(&PropensityPrior::JShaped { beta }, n, big_n).unwrap().value;
                let pf = product_form_predictive(n, big_n, beta);
                assert!(rel(lg, pf) <= 1e-10, "β={beta} n={n} N={big_n}: {lg} vs {pf}");
            }
        }
    }
}

#[test]
fn chain_product_matches_beta_predictive() {
    for (alpha, beta) in [(0.3, 0.3), (1.0, 1.0), (2.0, 3.0), (7.5, 0.5), (1.0, 20.0)] {
        for n in [0, 1, 50, 10_000] {
            for big_n in [1, 9, 1000, 10_000] {
                let lg = predictive_all_success(&PropensityPrior::Beta { alpha, beta }, n, big_n).unwrap().value;
                let cp = chain_product_predictive(alpha, beta, n, big_n);
                assert!(rel(lg, cp) <= 1e-10, "({alpha},{beta}) n={n} N={big_n}: {lg} vs {cp}");
            }
        }
    }
}

#[test]
fn j_shaped_monte_carlo_agrees() {
    let prior = PropensityPrior::JShaped { beta: 0.1 };
    let want = predictive_all_success(&prior, 100, 10_000).unwrap().value;
    let est = mc_predictive(&prior, 100, 10_000, 100_000, 5).unwrap();
    assert!((est.mean - want).abs() <= 3.0 * est.std_error, "{est:?} vs {want}");
}

#[test]
fn monte_carlo_battery_within_four_standard_errors() {
    let prior = PropensityPrior::JShaped { beta: 0.1 };
    let want = predictive_all_success(&prior, 100, 10_000).unwrap().value;
    let inside = (0..100u64)
        .filter(|&seed| {
            let est = mc_predictive(&prior, 100, 10_000, 20_000, seed).unwrap();
            (est.mean - want).abs() <= 4.0 * est.std_error
        })
        .count();
    assert!(inside >= 99, "{inside} of 100 seeds within 4 standard errors");
}

#[test]
fn averaged_predictive_monte_carlo_agrees() {
    let quad = QuadratureSpec::default();
    // a > 2(n+β) keeps the Monte-Carlo variance finite
    for (n, beta, a, b, c, big_n) in [(1, 0.5, 4.0, 5.0, 0.5, 10), (2, 0.3, 6.0, 2.0, 0.8, 100), (1, 0.9, 5.0, 1.0, 1.0, 3)] {
        let params = OmegaPosteriorParams::new(a, b, c).unwrap();
        let r = averaged_predictive(n, big_n, beta, &params, &quad).unwrap();
        assert!(!r.diverged);
        let est = mc_averaged_predictive(n, big_n, beta, &params, 200_000, 17).unwrap();
        assert!((est.mean - r.raw_value).abs() <= 3.0 * est.std_error, "{est:?} vs {}", r.raw_value);
    }
}

#[test]
fn averaged_density_monte_carlo_agrees() {
    let quad = QuadratureSpec::default();
    for (p, n, beta, a, b, c) in [(0.5, 1, 0.5, 1.0, 1.0, 1.0), (0.9, 10, 0.5, 3.0, 4.0, 0.95), (0.97, 3, 0.2, 2.0, 3.0, 1.0)] {
        let params = OmegaPosteriorParams::new(a, b, c).unwrap();
        let r = averaged_posterior_density(p, n, beta, &params, &quad).unwrap();
        let est = mc_averaged_posterior_density(p, n, beta, &params, 200_000, 3).unwrap();
        assert!((est.mean - r.value).abs() <= 3.0 * est.std_error, "p={p}: {est:?} vs {}", r.value);
    }
}

#[test]
fn seeded_estimates_are_reproducible() {
    let params = OmegaPosteriorParams::new(4.0, 5.0, 0.5).unwrap();
    let a = mc_averaged_predictive(1, 10, 0.5, &params, 5000, 99).unwrap();
    let b = mc_averaged_predictive(1, 10, 0.5, &params, 5000, 99).unwrap();
    assert_eq!(a, b);
}
