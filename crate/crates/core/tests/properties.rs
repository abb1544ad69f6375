//! Property tests for solver and metric invariants.

use proptest::prelude::*;
use rand::Rng;

use csmimo::linalg::{CMatrix, CVector, C64};
use csmimo::metrics::{empirical_sjr, EmpiricalSjrConfig};
use csmimo::rng::{complex_gaussian, rng_from_seed};
use csmimo::scene::{rad, Jammer, RadarParams, Target};
use csmimo::sensing::MeasurementKind;
use csmimo::solver::{dantzig_residual, solve_dantzig_raw, DantzigConfig};
use csmimo::waveform::NormalizationMode;

fn instance(seed: u64) -> (CMatrix, CVector) {
    let mut rng = rng_from_seed(seed);
    let (m, n) = (rng.random_range(5..=10), rng.random_range(10..=18));
    let theta = CMatrix::from_fn(m, n, |_, _| complex_gaussian(&mut rng, 1.0 / m as f64));
    let mut s = CVector::zeros(n);
    s[rng.random_range(0..n)] = C64::new(1.0, 0.5);
    s[rng.random_range(0..n)] = C64::new(-0.3, 0.8);
    let mut r = &theta * &s;
    for v in r.iter_mut() {
        *v += complex_gaussian(&mut rng, 1e-3);
    }
    (theta, r)
}

fn max_corr(theta: &CMatrix, r: &CVector) -> f64 {
    theta.ad_mul(r).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_r_and_mu_scales_the_solution(seed in 0u64..10_000, lambda in 0.1f64..10.0, frac in 0.05f64..0.5) {
        let (theta, r) = instance(seed);
        let mu = frac * max_corr(&theta, &r);
        let cfg = DantzigConfig::default();
        let base = solve_dantzig_raw(&theta, &r, mu, &cfg).unwrap();
        let scaled = solve_dantzig_raw(&theta, &(&r * C64::new(lambda, 0.0)), lambda * mu, &cfg).unwrap();
        prop_assert!((scaled.objective - lambda * base.objective).abs() <= 1e-5 * lambda * base.objective);
    }

    #[test]
    fn larger_mu_never_grows_the_l1_norm(seed in 0u64..10_000, f1 in 0.02f64..0.9, f2 in 0.02f64..0.9) {
        let (theta, r) = instance(seed);
        let c = max_corr(&theta, &r);
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let cfg = DantzigConfig::default();
        let a = solve_dantzig_raw(&theta, &r, lo * c, &cfg).unwrap();
        let b = solve_dantzig_raw(&theta, &r, hi * c, &cfg).unwrap();
        prop_assert!(b.objective <= a.objective * (1.0 + 1e-6) + 1e-12);
        for res in [&a, &b] {
            prop_assert!(dantzig_residual(&theta, &r, &res.estimate) <= res.mu * (1.0 + cfg.feasibility_tol));
        }
    }
}

#[test]
fn slow_movers_keep_the_stationary_sjr() {
    let run = |speed: f64| {
        empirical_sjr(&EmpiricalSjrConfig {
            params: RadarParams::standard().with_pulses(5),
            num_transmit: 30,
            num_receive: 1,
            measurements: 30,
            kind: MeasurementKind::Gaussian,
            waveform_mode: NormalizationMode::ColumnOrthonormal,
            targets: vec![
                Target::new(rad(-0.2), speed, 10_000.0, C64::new(1.0, 0.0)),
                Target::new(rad(0.2), speed, 10_000.0, C64::new(1.0, 0.0)),
            ],
            jammer: Some(Jammer::from_power(rad(7.0), 10_000.0, 400.0).unwrap()),
            trials: 200,
            seed: 3,
        })
        .unwrap()
        .sjr
    };
    let (still, moving) = (run(0.0), run(80.0));
    assert!((moving / still - 1.0).abs() < 0.1, "{moving} vs {still}");
}
