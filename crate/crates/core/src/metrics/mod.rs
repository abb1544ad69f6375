//! Evaluation quantities: peak-to-ripple and peak-to-jammer ratios, thresholded
//! MSE and false-alarm rate, empirical CDFs and signal-to-jammer analysis.
//!
//! Ratios with a zero denominator are reported as `f64::INFINITY`.

mod bessel;
mod sjr;

pub use bessel::{j1, jinc};
pub use sjr::{
    analytic_sjr, bessel_expectation_check, empirical_sjr, phi, sjr_from_powers, varsigma,
    EmpiricalSjr, EmpiricalSjrConfig, SjrInputs, SjrReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::CVector;

fn check_indices(n: usize, targets: &[usize], jammer: Option<usize>) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(invalid(format!(
                "target index {t} outside estimate of length {n}"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(invalid(format!("duplicate target index {t}")));
        }
    }
    if let Some(j) = jammer {
        if j >= n {
            return Err(invalid(format!(
                "jammer index {j} outside estimate of length {n}"
            )));
        }
        if targets.contains(&j) {
            return Err(invalid("jammer index coincides with a target index"));
        }
    }
    Ok(())
}

/// Peak-to-ripple ratio of each target: `|s_k|^2` over the energy of every entry
/// that is neither a target nor the jammer.
pub fn prr(estimate: &CVector, targets: &[usize], jammer: Option<usize>) -> Result<Vec<f64>> {
    check_indices(estimate.len(), targets, jammer)?;
    let ripple: f64 = (0..estimate.len())
        .filter(|i| !targets.contains(i) && Some(*i) != jammer)
        .map(|i| estimate[i].norm_sqr())
        .sum();
    Ok(targets
        .iter()
        .map(|&k| {
            if ripple > 0.0 {
                estimate[k].norm_sqr() / ripple
            } else {
                f64::INFINITY
            }
        })
        .collect())
}

/// Mean target peak power over the jammer-cell power.
pub fn pjr(estimate: &CVector, targets: &[usize], jammer: usize) -> Result<f64> {
    check_indices(estimate.len(), targets, Some(jammer))?;
    if targets.is_empty() {
        return Err(invalid("PJR needs at least one target"));
    }
    let peak = targets.iter().map(|&k| estimate[k].norm_sqr()).sum::<f64>() / targets.len() as f64;
    let j = estimate[jammer].norm_sqr();
    Ok(if j > 0.0 { peak / j } else { f64::INFINITY })
}

/// Binarizes `|s_n| >= tau * max |s|` and compares with the true support.
/// Returns `(mse, pfa)`.
pub fn mse_pfa(estimate: &CVector, truth_support: &[usize], tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(invalid("threshold tau must be positive"));
    }
    check_indices(estimate.len(), truth_support, None)?;
    let n = estimate.len();
    let peak = estimate.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut errors = 0usize;
    let mut false_alarms = 0usize;
    for i in 0..n {
        let detected = peak > 0.0 && estimate[i].norm() >= tau * peak;
        let truth = truth_support.contains(&i);
        if detected != truth {
            errors += 1;
        }
        if detected && !truth {
            false_alarms += 1;
        }
    }
    let negatives = n - truth_support.len();
    let pfa = if negatives == 0 {
        0.0
    } else {
        false_alarms as f64 / negatives as f64
    };
    Ok((errors as f64 / n as f64, pfa))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub prr_per_target: Vec<f64>,
    pub pjr: Option<f64>,
    pub mse: f64,
    pub pfa: f64,
    pub detected_support: Vec<usize>,
}

/// Right-continuous empirical CDF; infinite samples sort above every finite one.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(invalid("empirical CDF samples must not be NaN"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `P(X <= x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `(value, cumulative probability)` at every distinct sample value.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let p = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = p,
                _ => out.push((v, p)),
            }
        }
        out
    }

    pub fn median(&self) -> f64 {
        self.sorted[(self.sorted.len() - 1) / 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use proptest::prelude::*;

    fn vec_of(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)))
    }

    #[test]
    fn prr_examples() {
        let clean = vec_of(&[0.0, 1.0, 0.0]);
        assert_eq!(prr(&clean, &[1], None).unwrap(), vec![f64::INFINITY]);
        let n = 81;
        let uniform = vec_of(&vec![1.0; n]);
        let p = prr(&uniform, &[3], None).unwrap();
        assert!((p[0] - 1.0 / (n as f64 - 1.0)).abs() < 1e-15);
        assert!(prr(&uniform, &[3], Some(3)).is_err());
        assert!(prr(&uniform, &[81], None).is_err());
    }

    #[test]
    fn pjr_examples() {
        assert_eq!(
            pjr(&vec_of(&[1.0, 0.0, 0.2]), &[0], 1).unwrap(),
            f64::INFINITY
        );
        assert!((pjr(&vec_of(&[0.5, 0.5, 0.2]), &[0], 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mse_pfa_examples() {
        let mut s = vec![0.0; 81];
        s[10] = 1.0;
        s[20] = -0.8;
        for tau in [0.1, 0.5, 0.79] {
            assert_eq!(mse_pfa(&vec_of(&s), &[10, 20], tau).unwrap(), (0.0, 0.0));
        }
        let ones = vec_of(&vec![1.0; 81]);
        let (mse, pfa) = mse_pfa(&ones, &[10, 20], 0.5).unwrap();
        assert!((mse - 79.0 / 81.0).abs() < 1e-15);
        assert_eq!(pfa, 1.0);
        assert!(mse_pfa(&ones, &[1], 0.0).is_err());
    }

    #[test]
    fn cdf_basics() {
        let c = EmpiricalCdf::new(&[2.0]).unwrap();
        assert_eq!(c.eval(1.9), 0.0);
        assert_eq!(c.eval(2.0), 1.0);
        let c = EmpiricalCdf::new(&[3.0, f64::INFINITY, 1.0, 3.0]).unwrap();
        assert_eq!(
            c.steps(),
            vec![(1.0, 0.25), (3.0, 0.75), (f64::INFINITY, 1.0)]
        );
        assert_eq!(c.eval(3.0), 0.75);
        assert!(EmpiricalCdf::new(&[]).is_err());
    }

    proptest! {
        #[test]
        fn ratios_are_scale_invariant(
            re in prop::collection::vec(-3.0f64..3.0, 12),
            im in prop::collection::vec(-3.0f64..3.0, 12),
            scale_re in 0.1f64..5.0,
            scale_im in -5.0f64..5.0,
        ) {
            let s = CVector::from_iterator(12, re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)));
            let k = C64::new(scale_re, scale_im);
            let scaled = &s * k;
            let p0 = prr(&s, &[1, 4], Some(7)).unwrap();
            let p1 = prr(&scaled, &[1, 4], Some(7)).unwrap();
            for (a, b) in p0.iter().zip(&p1) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0) || (a.is_infinite() && b.is_infinite()));
            }
            let j0 = pjr(&s, &[1, 4], 7).unwrap();
            let j1 = pjr(&scaled, &[1, 4], 7).unwrap();
            prop_assert!((j0 - j1).abs() <= 1e-9 * j0.abs().max(1.0) || (j0.is_infinite() && j1.is_infinite()));
        }

        #[test]
        fn cdf_is_monotone(samples in prop::collection::vec(prop_oneof![-1e3f64..1e3, Just(f64::INFINITY)], 1..60)) {
            let c = EmpiricalCdf::new(&samples).unwrap();
            let steps = c.steps();
            prop_assert!(steps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
            prop_assert_eq!(steps.last().unwrap().1, 1.0);
            let pfa = mse_pfa(&CVector::from_iterator(samples.len(), samples.iter().map(|&v| C64::new(v.min(1e3), 0.0))), &[], 0.5).unwrap().1;
            prop_assert!((0.0..=1.0).contains(&pfa));
        }
    }
}
