//! Complex Dantzig selector: `min |s|_1` subject to `|Theta^H (r - Theta s)|_inf <= mu`.

mod socp;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_unstack, real_embedding, real_stack, CMatrix, CVector};
use crate::sensing::{AngleDopplerGrid, GridPoint, SensingProblem};

/// How `mu` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum MuPolicy {
    Explicit {
        mu: f64,
    },
    /// `(1 + 1/t) sqrt(2 ln N sigma~^2) sigma_max`.
    LowerBoundScaled {
        effective_noise_variance: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DantzigConfig {
    pub mu_policy: MuPolicy,
    pub t_scalar: f64,
    pub feasibility_tol: f64,
    pub duality_gap_tol: f64,
    pub max_iterations: usize,
}

impl DantzigConfig {
    pub fn explicit(mu: f64) -> Self {
        Self {
            mu_policy: MuPolicy::Explicit { mu },
            ..Self::default()
        }
    }

    pub fn lower_bound_scaled(effective_noise_variance: f64) -> Self {
        Self {
            mu_policy: MuPolicy::LowerBoundScaled {
                effective_noise_variance,
            },
            ..Self::default()
        }
    }

    /// The `mu` this configuration yields for `problem`.
    pub fn resolve_mu(&self, problem: &SensingProblem) -> Result<f64> {
        let mu = match self.mu_policy {
            MuPolicy::Explicit { mu } => mu,
            MuPolicy::LowerBoundScaled {
                effective_noise_variance,
            } => {
                if !(self.t_scalar > 0.0) {
                    return Err(invalid("t_scalar must be positive"));
                }
                let (lower, _) = mu_bounds(problem, effective_noise_variance)?;
                (1.0 + 1.0 / self.t_scalar) * lower
            }
        };
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(invalid(format!("mu must be positive and finite, got {mu}")));
        }
        Ok(mu)
    }
}

impl Default for DantzigConfig {
    fn default() -> Self {
        Self {
            mu_policy: MuPolicy::LowerBoundScaled {
                effective_noise_variance: 0.0,
            },
            t_scalar: 3.0,
            feasibility_tol: 1e-7,
            duality_gap_tol: 1e-7,
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub estimate: CVector,
    /// `sum_n |s_n|`.
    pub objective: f64,
    /// `|Theta^H (r - Theta s)|_inf`.
    pub residual_inf_norm: f64,
    pub mu: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Effective noise variance of the compressed observations: `sigma^2` scaled
/// by the mean row energy of the measurement matrices.
pub fn effective_noise_variance(problem: &SensingProblem, noise_variance: f64) -> f64 {
    noise_variance * problem.measurements.mean_row_energy()
}

/// `(sqrt(2 ln N sigma~^2) sigma_max, |Theta^H r|_inf)`. The lower value may exceed
/// the upper one at extreme noise.
pub fn mu_bounds(problem: &SensingProblem, effective_noise_variance: f64) -> Result<(f64, f64)> {
    if !(effective_noise_variance >= 0.0) {
        return Err(invalid("effective noise variance must be nonnegative"));
    }
    let n = problem.grid.len() as f64;
    let lower = (2.0 * n.ln() * effective_noise_variance).sqrt() * problem.sigma_max;
    let upper = inf_norm(&problem.correlated_observations());
    Ok((lower, upper))
}

fn inf_norm(v: &CVector) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `|Theta^H (r - Theta s)|_inf`.
pub fn dantzig_residual(theta: &CMatrix, r: &CVector, s: &CVector) -> f64 {
    inf_norm(&theta.ad_mul(&(r - theta * s)))
}

pub fn solve_dantzig(problem: &SensingProblem, config: &DantzigConfig) -> Result<RecoveryResult> {
    let mu = config.resolve_mu(problem)?;
    solve_dantzig_raw(&problem.theta, &problem.observations, mu, config)
}

/// Dantzig selector on an arbitrary `Theta` and `r`; `config.mu_policy` is ignored.
pub fn solve_dantzig_raw(
    theta: &CMatrix,
    r: &CVector,
    mu: f64,
    config: &DantzigConfig,
) -> Result<RecoveryResult> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(invalid(format!("mu must be positive and finite, got {mu}")));
    }
    if theta.ncols() == 0 || theta.nrows() == 0 {
        return Err(invalid("sensing matrix is empty"));
    }
    if theta.nrows() != r.len() {
        return Err(Error::DimensionMismatch {
            context: "theta rows vs observations",
            expected: theta.nrows(),
            found: r.len(),
        });
    }
    let n = theta.ncols();
    let corr = theta.ad_mul(r);
    if mu >= inf_norm(&corr) {
        return Ok(RecoveryResult {
            estimate: CVector::zeros(n),
            objective: 0.0,
            residual_inf_norm: inf_norm(&corr),
            mu,
            iterations: 0,
            status: SolveStatus::Optimal,
        });
    }

    let gram = theta.ad_mul(theta);
    let gr = real_embedding(&gram);
    let scale = (0..2 * n).map(|i| gr[(i, i)]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(invalid("sensing matrix has only zero columns"));
    }
    let gr_s = &gr / scale;
    let theta_r_s: DMatrix<f64> = real_embedding(theta) / scale.sqrt();
    let c_s: DVector<f64> = real_stack(&corr) / scale;
    let mu_s = mu / scale;
    let limit = mu * (1.0 + config.feasibility_tol);
    let certificate = |w: &DVector<f64>| dantzig_residual(theta, r, &complex_unstack(w)) <= limit;
    let opts = socp::IpmOptions {
        feasibility_tol: config.feasibility_tol,
        gap_tol: config.duality_gap_tol,
        max_iterations: config.max_iterations,
    };
    let out = socp::solve(&gr_s, Some(&theta_r_s), &c_s, mu_s, &opts, certificate);
    let estimate = complex_unstack(&out.w);
    let status = match out.status {
        socp::IpmStatus::Optimal => SolveStatus::Optimal,
        socp::IpmStatus::MaxIterations => SolveStatus::MaxIter,
        socp::IpmStatus::Breakdown => SolveStatus::Infeasible,
    };
    Ok(RecoveryResult {
        objective: estimate.iter().map(|v| v.norm()).sum(),
        residual_inf_norm: dantzig_residual(theta, r, &estimate),
        estimate,
        mu,
        iterations: out.iterations,
        status,
    })
}

/// Indices with `|s_n| >= tau * max |s|`; empty for an all-zero estimate.
pub fn detect_support(estimate: &CVector, tau: f64) -> Vec<usize> {
    let peak = inf_norm(estimate);
    if peak == 0.0 {
        return Vec::new();
    }
    (0..estimate.len())
        .filter(|&i| estimate[i].norm() >= tau * peak)
        .collect()
}

/// Indices of the `k` largest `|s_n|`, largest first (ties by index).
pub fn top_k(estimate: &CVector, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..estimate.len()).collect();
    idx.sort_by(|&a, &b| {
        estimate[b]
            .norm()
            .total_cmp(&estimate[a].norm())
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    /// Integer subdivision of the coarse step.
    pub factor: usize,
    pub angle_window_rad: f64,
    pub doppler_window_hz: f64,
    /// Coarse points with `|s_n| > fraction * max |s|` are refined.
    pub fraction: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            factor: 4,
            angle_window_rad: 0.0,
            doppler_window_hz: 0.0,
            fraction: 0.1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefinedRecovery {
    pub grid: AngleDopplerGrid,
    pub problem: SensingProblem,
    pub result: RecoveryResult,
}

/// Builds a finer grid around the significant points of a coarse estimate.
pub fn refined_grid(
    initial: &AngleDopplerGrid,
    estimate: &CVector,
    opts: &RefineOptions,
) -> Result<AngleDopplerGrid> {
    if opts.factor < 2 {
        return Err(invalid("refinement factor must be at least 2"));
    }
    if estimate.len() != initial.len() {
        return Err(Error::DimensionMismatch {
            context: "estimate vs grid",
            expected: initial.len(),
            found: estimate.len(),
        });
    }
    let peak = inf_norm(estimate);
    if peak == 0.0 {
        return Err(Error::NoDetection);
    }
    let origin = initial.points()[0];
    let da = initial.angle_step().map(|s| s / opts.factor as f64);
    let db = initial.doppler_step().map(|s| s / opts.factor as f64);
    let span =
        |window: f64, step: Option<f64>| step.map_or(0, |s| (window / s + 1e-9).floor() as i64);
    let (wa, wb) = (
        span(opts.angle_window_rad, da),
        span(opts.doppler_window_hz, db),
    );
    let key =
        |x: f64, x0: f64, step: Option<f64>| step.map_or(0, |s| ((x - x0) / s).round() as i64);
    let mut keys = BTreeSet::new();
    for (i, p) in initial.points().iter().enumerate() {
        if estimate[i].norm() <= opts.fraction * peak {
            continue;
        }
        let (ka, kb) = (
            key(p.azimuth_rad, origin.azimuth_rad, da),
            key(p.doppler_hz, origin.doppler_hz, db),
        );
        for ib in -wb..=wb {
            for ia in -wa..=wa {
                keys.insert((kb + ib, ka + ia));
            }
        }
    }
    let points = keys
        .into_iter()
        .map(|(kb, ka)| {
            GridPoint::new(
                da.map_or(origin.azimuth_rad, |s| origin.azimuth_rad + ka as f64 * s),
                db.map_or(origin.doppler_hz, |s| origin.doppler_hz + kb as f64 * s),
            )
        })
        .collect();
    AngleDopplerGrid::from_points(points)
}

/// Coarse-to-fine recovery: refine around the coarse detections, rebuild the
/// problem through `build` and solve again.
pub fn refine_grid<F>(
    build: F,
    initial: &AngleDopplerGrid,
    estimate: &CVector,
    opts: &RefineOptions,
    config: &DantzigConfig,
) -> Result<RefinedRecovery>
where
    F: Fn(&AngleDopplerGrid) -> Result<SensingProblem>,
{
    let grid = refined_grid(initial, estimate, opts)?;
    let problem = build(&grid)?;
    let result = solve_dantzig(&problem, config)?;
    Ok(RefinedRecovery {
        grid,
        problem,
        result,
    })
}
