//! Primal-dual interior-point method for the complex Dantzig selector written as
//! a second-order cone program over real variables.
//!
//! Variables are `x = (t, w)` with `t` in `R^N` and `w = [Re s; Im s]`. The cones
//! are `|(w_n, w_{N+n})| <= t_n` and `|(c - G w)_{n, N+n}| <= mu` for each `n`,
//! where `G` is the real form of `Theta^H Theta` and `c` that of `Theta^H r`. The
//! iteration uses Nesterov-Todd scaling and Mehrotra predictor-corrector steps;
//! the Newton system is reduced to a `2N x 2N` positive-definite solve.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Tuning for [`solve`].
#[derive(Clone, Copy, Debug)]
pub(crate) struct IpmOptions {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
}

pub(crate) enum IpmStatus {
    Optimal,
    MaxIterations,
    Breakdown,
}

pub(crate) struct IpmOutcome {
    pub w: DVector<f64>,
    pub iterations: usize,
    pub status: IpmStatus,
}

/// Steps shorter than this count as no progress.
const STALL_STEP: f64 = 1e-6;
/// Consecutive short steps after which the iteration stops.
const STALL_COUNT: usize = 3;
/// A stalled run is still optimal when its best certified relative gap is
/// within this factor of the gap tolerance.
const STALL_GAP_FACTOR: f64 = 100.0;

type V3 = Vector3<f64>;
type M3 = Matrix3<f64>;

const J: [f64; 3] = [1.0, -1.0, -1.0];

fn jdot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// `u0^2 - |u1|^2` evaluated as `(u0 - |u1|)(u0 + |u1|)` to limit cancellation.
fn jnorm2(a: &V3) -> f64 {
    let tail = a[1].hypot(a[2]);
    (a[0] - tail) * (a[0] + tail)
}

fn jmul(a: &V3) -> V3 {
    V3::new(a[0], -a[1], -a[2])
}

/// Nesterov-Todd scaling of one 3-dimensional cone: `W z = W^{-1} s = lambda`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NtScaling {
    pub w: M3,
    pub w_inv: M3,
    pub lambda: V3,
}

impl NtScaling {
    pub fn new(s: &V3, z: &V3) -> Self {
        let sn = jnorm2(s).max(f64::MIN_POSITIVE).sqrt();
        let zn = jnorm2(z).max(f64::MIN_POSITIVE).sqrt();
        let sb = s / sn;
        let zb = z / zn;
        let gamma = ((1.0 + sb.dot(&zb)) / 2.0).sqrt();
        let wb = (sb + jmul(&zb)) / (2.0 * gamma);
        let beta = (sn / zn).sqrt();
        let v = (wb + V3::new(1.0, 0.0, 0.0)) / (2.0 * (wb[0] + 1.0)).sqrt();
        let jm = M3::from_diagonal(&V3::new(J[0], J[1], J[2]));
        let w = (2.0 * v * v.transpose() - jm) * beta;
        let jv = jmul(&v);
        let w_inv = (2.0 * jv * jv.transpose() - jm) / beta;
        let lambda = w * z;
        Self { w, w_inv, lambda }
    }
}

/// Arrow product `u o v`.
fn arrow(u: &V3, v: &V3) -> V3 {
    V3::new(
        u.dot(v),
        u[0] * v[1] + v[0] * u[1],
        u[0] * v[2] + v[0] * u[2],
    )
}

/// Solves `u o x = r` for `x`.
fn arrow_solve(u: &V3, r: &V3) -> V3 {
    let u1r1 = u[1] * r[1] + u[2] * r[2];
    let det = jnorm2(u);
    let x0 = (u[0] * r[0] - u1r1) / det;
    V3::new(x0, (r[1] - x0 * u[1]) / u[0], (r[2] - x0 * u[2]) / u[0])
}

/// Largest `alpha >= 0` with `u + alpha d` in the cone (`inf` when unbounded).
fn max_step(u: &V3, d: &V3) -> f64 {
    let a = jdot(d, d);
    let b = 2.0 * jdot(u, d);
    let c = jnorm2(u).max(0.0);
    let mut best = f64::INFINITY;
    let mut consider = |r: f64| {
        if r > 0.0 && r < best {
            best = r;
        }
    };
    if a.abs() <= 1e-300 {
        if b < 0.0 {
            consider(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                consider(q / a);
                consider(c / q);
            } else {
                consider((-c / a).max(0.0).sqrt());
            }
        }
    }
    // The head must stay nonnegative as well; a root can be missed through rounding.
    if d[0] < 0.0 {
        consider(-u[0] / d[0]);
    }
    best
}

fn step_all(u: &[V3], d: &[V3]) -> f64 {
    u.iter()
        .zip(d)
        .map(|(a, b)| max_step(a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Problem data after scaling.
struct Data<'a> {
    n: usize,
    gr: &'a DMatrix<f64>,
    theta_r: Option<&'a DMatrix<f64>>,
    c: &'a DVector<f64>,
    mu: f64,
}

impl Data<'_> {
    /// `A x` split per cone (cone A first, then cone B).
    fn apply_a(&self, t: &DVector<f64>, w: &DVector<f64>, out: &mut [V3]) {
        let n = self.n;
        let gw = self.gr * w;
        for k in 0..n {
            out[k] = V3::new(-t[k], -w[k], -w[n + k]);
            out[n + k] = V3::new(0.0, gw[k], gw[n + k]);
        }
    }

    /// `A^T u` split into `(t, w)` parts.
    fn apply_at(&self, u: &[V3]) -> (DVector<f64>, DVector<f64>) {
        let n = self.n;
        let mut t = DVector::zeros(n);
        let mut w = DVector::zeros(2 * n);
        let mut y = DVector::zeros(2 * n);
        for k in 0..n {
            t[k] = -u[k][0];
            w[k] = -u[k][1];
            w[n + k] = -u[k][2];
            y[k] = u[n + k][1];
            y[n + k] = u[n + k][2];
        }
        w += self.gr * y;
        (t, w)
    }

    fn h(&self, k: usize) -> V3 {
        if k < self.n {
            V3::zeros()
        } else {
            let i = k - self.n;
            V3::new(self.mu, self.c[i], self.c[self.n + i])
        }
    }

    /// `G H G` for block-diagonal `H` with 2x2 blocks on `(n, N+n)`.
    fn sandwich(&self, hb: &[[f64; 4]]) -> DMatrix<f64> {
        let n = self.n;
        let mix_rows = |m: &DMatrix<f64>| -> DMatrix<f64> {
            let mut out = m.clone();
            for k in 0..n {
                let [a, b, c, d] = hb[k];
                for j in 0..m.ncols() {
                    let (x, y) = (m[(k, j)], m[(n + k, j)]);
                    out[(k, j)] = a * x + b * y;
                    out[(n + k, j)] = c * x + d * y;
                }
            }
            out
        };
        match self.theta_r {
            Some(tr) if 2 * tr.nrows() * tr.nrows() + 2 * n * tr.nrows() < 4 * n * n => {
                // G H G = T^T (T H T^T) T with T the real sensing matrix.
                let ht = mix_rows(&tr.transpose());
                let k = tr * ht;
                let y = k * tr;
                tr.tr_mul(&y)
            }
            _ => self.gr * mix_rows(self.gr),
        }
    }
}

/// Cholesky factor of `m`, adding a growing diagonal shift when `m` is not
/// numerically positive definite.
fn factor(m: &DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let dim = m.nrows();
    let scale = (0..dim)
        .map(|i| m[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch);
    }
    (0..8).find_map(|attempt| {
        let mut shifted = m.clone();
        let reg = scale * 1e-14 * 100f64.powi(attempt);
        for i in 0..dim {
            shifted[(i, i)] += reg;
        }
        shifted.cholesky()
    })
}

/// Solves the scaled Dantzig SOCP. `gr` must be symmetric; `theta_r`, when given,
/// satisfies `theta_r^T theta_r = gr` and is used to form the normal matrix faster.
pub(crate) fn solve(
    gr: &DMatrix<f64>,
    theta_r: Option<&DMatrix<f64>>,
    c: &DVector<f64>,
    mu: f64,
    opts: &IpmOptions,
    certificate: impl Fn(&DVector<f64>) -> bool,
) -> IpmOutcome {
    let n = c.len() / 2;
    let data = Data {
        n,
        gr,
        theta_r,
        c,
        mu,
    };
    let cones = 2 * n;

    let mut t = DVector::<f64>::zeros(n);
    let mut w = DVector::<f64>::zeros(2 * n);
    let mut s: Vec<V3> = (0..cones).map(|k| data.h(k)).collect();
    for sk in &mut s {
        let margin = sk[0] - (sk[1] * sk[1] + sk[2] * sk[2]).sqrt();
        if margin < 1.0 {
            sk[0] += 1.0 - margin;
        }
    }
    let mut z: Vec<V3> = vec![V3::new(1.0, 0.0, 0.0); cones];

    let hnorm = (mu * mu * n as f64 + c.norm_squared()).sqrt().max(1.0);
    let qnorm = (n as f64).sqrt().max(1.0);
    let mut ax = vec![V3::zeros(); cones];
    // Certified iterate with the smallest relative gap seen so far.
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut last = 0;
    let mut short_steps = 0;
    let mut since_best = 0;
    let mut exhausted = true;

    for iter in 0..opts.max_iterations {
        data.apply_a(&t, &w, &mut ax);
        let rp: Vec<V3> = (0..cones).map(|k| s[k] + ax[k] - data.h(k)).collect();
        let (at_t, at_w) = data.apply_at(&z);
        let rd_t = at_t.add_scalar(1.0);
        let rd_w = at_w;
        let gap: f64 = s.iter().zip(&z).map(|(a, b)| a.dot(b)).sum();
        let pcost = t.sum();
        let pres = rp.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt() / hnorm;
        let dres = (rd_t.norm_squared() + rd_w.norm_squared()).sqrt() / qnorm;
        if !gap.is_finite() || !pres.is_finite() || !dres.is_finite() {
            break;
        }
        let rel_gap = gap / pcost.abs().max(1.0);
        if pres <= opts.feasibility_tol
            && dres <= opts.feasibility_tol
            && best.as_ref().is_none_or(|b| rel_gap < b.0)
            && certificate(&w)
        {
            if rel_gap <= opts.gap_tol {
                return IpmOutcome {
                    w,
                    iterations: iter,
                    status: IpmStatus::Optimal,
                };
            }
            best = Some((rel_gap, w.clone()));
            since_best = 0;
        } else if best.is_some() {
            since_best += 1;
            if since_best >= STALL_COUNT * 3 {
                exhausted = false;
                break;
            }
        }
        last = iter;

        let scal: Vec<NtScaling> = s
            .iter()
            .zip(&z)
            .map(|(a, b)| NtScaling::new(a, b))
            .collect();
        let winv2: Vec<M3> = scal.iter().map(|sc| sc.w_inv * sc.w_inv).collect();

        // Reduced normal matrix in w after eliminating t.
        let mut tdiag = DVector::zeros(n);
        let mut coupling = vec![[0.0; 2]; n];
        let mut hb = vec![[0.0; 4]; n];
        let mut schur = vec![[0.0; 4]; n];
        for k in 0..n {
            // W^{-2} = R^T R from a QR factorization of W^{-1}; the Schur complement
            // of the t entry is then R22^T R22, free of cancellation.
            let r = scal[k].w_inv.qr().r();
            tdiag[k] = r[(0, 0)] * r[(0, 0)];
            coupling[k] = [r[(0, 0)] * r[(0, 1)], r[(0, 0)] * r[(0, 2)]];
            let (a, b, d) = (r[(1, 1)], r[(1, 2)], r[(2, 2)]);
            schur[k] = [a * a, a * b, a * b, b * b + d * d];
            let q = &winv2[n + k];
            hb[k] = [q[(1, 1)], q[(1, 2)], q[(2, 1)], q[(2, 2)]];
        }
        let mut normal = data.sandwich(&hb);
        for k in 0..n {
            let [a, b, c, d] = schur[k];
            normal[(k, k)] += a;
            normal[(k, n + k)] += b;
            normal[(n + k, k)] += c;
            normal[(n + k, n + k)] += d;
        }
        let normal = (&normal + normal.transpose()) * 0.5;

        let Some(chol) = factor(&normal) else {
            exhausted = false;
            break;
        };
        // Solves the normal equations for right-hand side (bt, bw) in (t, w).
        let reduced = |bt: &DVector<f64>, bw: &DVector<f64>| -> (DVector<f64>, DVector<f64>) {
            let mut rhs = bw.clone();
            for k in 0..n {
                let f = bt[k] / tdiag[k];
                rhs[k] -= coupling[k][0] * f;
                rhs[n + k] -= coupling[k][1] * f;
            }
            let mut dw = chol.solve(&rhs);
            let res = &rhs - &normal * &dw;
            dw += chol.solve(&res);
            let dt = DVector::from_fn(n, |k, _| {
                (bt[k] - coupling[k][0] * dw[k] - coupling[k][1] * dw[n + k]) / tdiag[k]
            });
            (dt, dw)
        };
        // Solves A^T dz = bx, ds + A dx = bp, W^{-1} ds + W dz = bc.
        let kkt = |bx: &(DVector<f64>, DVector<f64>), bp: &[V3], bc: &[V3]| {
            let u: Vec<V3> = (0..cones)
                .map(|k| scal[k].w_inv * bc[k] - winv2[k] * bp[k])
                .collect();
            let (ut, uw) = data.apply_at(&u);
            let (dt, dw) = reduced(&(&bx.0 - ut), &(&bx.1 - uw));
            let mut adx = vec![V3::zeros(); cones];
            data.apply_a(&dt, &dw, &mut adx);
            let dz: Vec<V3> = (0..cones)
                .map(|k| winv2[k] * (adx[k] + scal[k].w * bc[k] - bp[k]))
                .collect();
            let ds: Vec<V3> = (0..cones).map(|k| bp[k] - adx[k]).collect();
            (dt, dw, ds, dz)
        };
        let newton = |rc: &[V3]| -> (DVector<f64>, DVector<f64>, Vec<V3>, Vec<V3>) {
            let d: Vec<V3> = scal
                .iter()
                .zip(rc)
                .map(|(sc, r)| arrow_solve(&sc.lambda, r))
                .collect();
            let bx = (-&rd_t, -&rd_w);
            let bp: Vec<V3> = rp.iter().map(|v| -v).collect();
            let (mut dt, mut dw, mut ds, mut dz) = kkt(&bx, &bp, &d);
            // Refine against the dual equation, keeping the primal and
            // complementarity equations satisfied by construction.
            for _ in 0..2 {
                let (zt, zw) = data.apply_at(&dz);
                let ex = (&bx.0 - zt, &bx.1 - zw);
                let zero = vec![V3::zeros(); cones];
                let (ct, cw, cs, cz) = kkt(&ex, &zero, &zero);
                dt += ct;
                dw += cw;
                for k in 0..cones {
                    ds[k] += cs[k];
                    dz[k] += cz[k];
                }
            }
            (dt, dw, ds, dz)
        };

        // Predictor.
        let rc_aff: Vec<V3> = scal
            .iter()
            .map(|sc| -arrow(&sc.lambda, &sc.lambda))
            .collect();
        let (_, _, ds_a, dz_a) = newton(&rc_aff);
        let alpha_a = step_all(&s, &ds_a).min(step_all(&z, &dz_a)).min(1.0);
        let gap_a: f64 = (0..cones)
            .map(|k| (s[k] + alpha_a * ds_a[k]).dot(&(z[k] + alpha_a * dz_a[k])))
            .sum();
        let sigma = (gap_a / gap).clamp(0.0, 1.0).powi(3);
        let mu_g = gap / cones as f64;

        // Corrector.
        let rc: Vec<V3> = (0..cones)
            .map(|k| {
                let sc = &scal[k];
                let dsa = sc.w_inv * ds_a[k];
                let dza = sc.w * dz_a[k];
                V3::new(sigma * mu_g, 0.0, 0.0) - arrow(&sc.lambda, &sc.lambda) - arrow(&dsa, &dza)
            })
            .collect();
        let (dt, dw, ds, dz) = newton(&rc);
        let alpha = (0.99 * step_all(&s, &ds).min(step_all(&z, &dz))).min(1.0);
        if !alpha.is_finite() || dw.iter().any(|v| !v.is_finite()) {
            exhausted = false;
            break;
        }
        short_steps = if alpha < STALL_STEP {
            short_steps + 1
        } else {
            0
        };
        if short_steps >= STALL_COUNT {
            exhausted = false;
            break;
        }
        t.axpy(alpha, &dt, 1.0);
        w.axpy(alpha, &dw, 1.0);
        for k in 0..cones {
            s[k] += alpha * ds[k];
            z[k] += alpha * dz[k];
        }
    }
    let iterations = if exhausted { opts.max_iterations } else { last };
    match best {
        Some((g, w)) if g <= STALL_GAP_FACTOR * opts.gap_tol => IpmOutcome {
            w,
            iterations,
            status: IpmStatus::Optimal,
        },
        Some((_, w)) => IpmOutcome {
            w,
            iterations,
            status: if exhausted {
                IpmStatus::MaxIterations
            } else {
                IpmStatus::Breakdown
            },
        },
        None => IpmOutcome {
            w: if w.iter().all(|v| v.is_finite()) {
                w
            } else {
                DVector::zeros(2 * n)
            },
            iterations,
            status: if exhausted {
                IpmStatus::MaxIterations
            } else {
                IpmStatus::Breakdown
            },
        },
    }
}
