//! Distributional checks of the samplers against statrs, and the orderings
//! between the three uncertainty levels.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};
use tomostat::estimators::{
    expectation_via_cf, qm_variance, unbalanced_moments, Comparison, Estimate, Method, Moments,
};
use tomostat::observables::{fock_coefficients, operator_cf, FilterSpec};
use tomostat::pattern::{build_table, pattern_value};
use tomostat::phasespace::GaussianState;
use tomostat::simulate::{
    photon_number_distribution, photon_number_variance, sample_photon_counts, sample_quadratures, ExperimentConfig,
};
use tomostat::Complex64;

fn filter() -> Arc<FilterSpec> {
    static F: OnceLock<Arc<FilterSpec>> = OnceLock::new();
    F.get_or_init(|| Arc::new(FilterSpec::new(1.8).unwrap())).clone()
}

fn squeezed() -> GaussianState {
    GaussianState::squeezed(0.5, 2.0).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn standardized_quadratures_pass_kolmogorov_smirnov() {
    let st = GaussianState::new(c(0.4, -0.3), 0.6, 2.1, 0.25).unwrap();
    let n = 50_000;
    let set = sample_quadratures(&ExperimentConfig::balanced(st, n, 11)).unwrap();
    let mut z: Vec<f64> = set
        .samples
        .iter()
        .map(|s| (s.x - st.quadrature_mean(s.phi)) / st.quadrature_variance(s.phi).sqrt())
        .collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = normal.cdf(v);
            (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
        })
        .fold(0.0, f64::max);
    // asymptotic critical value at the 0.1% level
    assert!(d < 1.949 / (n as f64).sqrt(), "KS statistic {d}");

    // phases are uniform on [0, π): chi-square over 20 bins
    let mut bins = [0usize; 20];
    for s in &set.samples {
        bins[(s.phi / PI * 20.0) as usize] += 1;
    }
    let expected = n as f64 / 20.0;
    let chi2: f64 = bins.iter().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(19.0).unwrap().cdf(chi2);
    assert!(p > 1e-3, "phase histogram chi2 {chi2}, p {p}");
}

#[test]
fn coherent_photon_statistics_are_poisson() {
    let amp = c(-0.9, 1.3);
    let dist = photon_number_distribution(&GaussianState::coherent(amp), c(0.0, 0.0), 40).unwrap();
    let poisson = Poisson::new(amp.norm_sqr()).unwrap();
    for (n, p) in dist.p.iter().enumerate() {
        assert!((p - poisson.pmf(n as u64)).abs() < 1e-12, "n={n}: {p}");
    }
    // displacing back to the origin leaves the vacuum
    let back = photon_number_distribution(&GaussianState::coherent(amp), -amp, 10).unwrap();
    assert!((back.p[0] - 1.0).abs() < 1e-12);
}

#[test]
fn squeezed_vacuum_matches_closed_form() {
    // V_x = e^{−2r}
    let r = 0.5 * 2f64.ln();
    let dist = photon_number_distribution(&squeezed(), c(0.0, 0.0), 30).unwrap();
    let mut even = 1.0 / r.cosh();
    for m in 0..=15 {
        let n = 2 * m;
        assert!((dist.p[n] - even).abs() < 1e-12, "n={n}: {} vs {even}", dist.p[n]);
        if n + 1 <= 30 {
            assert!(dist.p[n + 1].abs() < 1e-12);
        }
        // p_{2m+2}/p_{2m} = tanh²r (2m+1)(2m+2) / (4 (m+1)²)
        even *= r.tanh().powi(2) * ((n + 1) * (n + 2)) as f64 / (4.0 * ((m + 1) * (m + 1)) as f64);
    }
}

#[test]
fn photon_count_histogram_fits_distribution() {
    let dist = photon_number_distribution(&squeezed(), c(0.6, 0.0), 20).unwrap();
    let n = 200_000;
    let counts = sample_photon_counts(&dist, n, 5);
    let mut hist = vec![0usize; dist.n_max + 2];
    for k in counts {
        hist[k] += 1;
    }
    // pool the sparse tail into one cell
    let mut chi2 = 0.0;
    let mut cells = 0;
    let (mut tail_obs, mut tail_exp) = (0.0, 0.0);
    for (k, &obs) in hist.iter().enumerate() {
        let e = n as f64 * if k <= dist.n_max { dist.p[k] } else { dist.truncation_mass.max(0.0) };
        if e >= 5.0 {
            chi2 += (obs as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            tail_obs += obs as f64;
            tail_exp += e;
        }
    }
    if tail_exp > 0.0 {
        chi2 += (tail_obs - tail_exp).powi(2) / tail_exp;
        cells += 1;
    }
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 1e-3, "chi2 {chi2} over {cells} cells, p {p}");
}

#[test]
fn fourfold_integral_agrees_with_fock_route() {
    let st = squeezed();
    let alpha = c(0.6, 0.0);
    let direct = qm_variance(&st, &operator_cf(&filter(), alpha)).unwrap();
    let coeffs = fock_coefficients(filter().as_ref(), 60).unwrap();
    let fock = unbalanced_moments(&coeffs, &photon_number_distribution(&st, -alpha, 60).unwrap()).unwrap();
    assert!((direct.second_moment - fock.second_moment).abs() / fock.second_moment < 1e-4, "{direct:?} vs {fock:?}");
    assert!((direct.mean - fock.mean).abs() < 1e-8);
}

#[test]
fn uncertainty_levels_are_ordered() {
    let st = squeezed();
    let cmp = Comparison::new(filter(), 20, 60).unwrap();
    for a in [0.0, 0.6, 1.5] {
        let alpha = c(a, 0.0);
        let r = cmp.report(&st, alpha, 100_000).unwrap();
        assert!(r.sigma_bhd > r.sigma_qm, "alpha {a}: {r:?}");
        // n_max = 20 already holds the displaced state to high accuracy
        assert!((r.sigma_unbalanced - r.sigma_qm).abs() / r.sigma_qm < 1e-3, "alpha {a}: {r:?}");
        let bal = cmp.balanced(&st, alpha).unwrap();
        let unb = cmp.unbalanced(&st, alpha).unwrap();
        assert!((bal.mean - r.p).abs() < 1e-8 && (unb.mean - r.p).abs() < 1e-6, "alpha {a}");
    }
}

#[test]
fn estimate_arithmetic() {
    let m = Moments::new(-0.3, 4.09);
    assert!((m.variance - 4.0).abs() < 1e-12);
    let e: Estimate = m.estimate(400, Method::TheoryBhd);
    assert!((e.std_error - 0.1).abs() < 1e-12);
    assert!((e.significance() - 3.0).abs() < 1e-9);
}

fn table() -> &'static tomostat::pattern::PatternTable {
    static T: OnceLock<tomostat::pattern::PatternTable> = OnceLock::new();
    T.get_or_init(|| build_table(&operator_cf(&filter(), c(0.3, -0.2)), (-6.0, 6.0), 0.01).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn table_tracks_direct_pattern(x in -6.0f64..6.0, phi in 0.0f64..PI) {
        let op = operator_cf(&filter(), c(0.3, -0.2));
        let direct = pattern_value(&op, x, phi).unwrap();
        prop_assert!((table().eval(x, phi).unwrap() - direct).abs() < 1e-6);
    }

    #[test]
    fn unbalanced_variance_is_nonnegative(vx in 0.3f64..3.0, excess in 0.0f64..1.0, ar in -2.0f64..2.0, ai in -2.0f64..2.0) {
        let st = GaussianState::new(c(0.0, 0.0), vx, (1.0 + excess) / vx, 0.0).unwrap();
        let dist = photon_number_distribution(&st, c(-ar, -ai), 25).unwrap();
        prop_assert!(photon_number_variance(&dist) >= 0.0);
        let coeffs = fock_coefficients(filter().as_ref(), 25).unwrap();
        prop_assert!(unbalanced_moments(&coeffs, &dist).unwrap().variance >= 0.0);
    }

    #[test]
    fn quasiprobability_has_parity_of_centred_states(vx in 0.3f64..3.0, cxp in -0.5f64..0.5, ar in -2.0f64..2.0, ai in -2.0f64..2.0) {
        let st = GaussianState::new(c(0.0, 0.0), vx, (1.0 + cxp * cxp) / vx, cxp).unwrap();
        let plus = expectation_via_cf(&st, &operator_cf(&filter(), c(ar, ai))).unwrap();
        let minus = expectation_via_cf(&st, &operator_cf(&filter(), c(-ar, -ai))).unwrap();
        prop_assert!(plus.is_finite());
        prop_assert!((plus - minus).abs() < 1e-9 * (1.0 + plus.abs()));
    }
}
