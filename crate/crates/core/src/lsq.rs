//! Box-constrained Levenberg–Marquardt for small dense problems.

use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when the relative cost decrease of an accepted step is below this.
    pub ftol: f64,
    /// Stop when the relative step length is below this.
    pub xtol: f64,
    /// Stop when the scaled gradient is below this.
    pub gtol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 500,
            ftol: 1e-15,
            xtol: 1e-13,
            gtol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Row-major `n x p` Jacobian at `params`.
    pub jacobian: Vec<f64>,
    /// Half the sum of squared residuals.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Parameters pinned to a bound at the solution.
    pub at_bound: Vec<bool>,
}

impl LmResult {
    pub fn ssr(&self) -> f64 {
        2.0 * self.cost
    }

    /// Linearized covariance `s^2 (J^T J)^{-1}`, `s^2 = SSR / (n - p)`.
    pub fn covariance(&self) -> Option<Vec<f64>> {
        let p = self.params.len();
        let n = self.residuals.len();
        if n <= p {
            return None;
        }
        let jtj = normal_matrix(&self.jacobian, n, p);
        let inv = invert(&jtj, p)?;
        let s2 = self.ssr() / (n - p) as f64;
        Some(inv.into_iter().map(|v| v * s2).collect())
    }

    pub fn stderr(&self) -> Option<Vec<f64>> {
        let p = self.params.len();
        self.covariance()
            .map(|c| (0..p).map(|i| c[i * p + i].max(0.0).sqrt()).collect())
    }
}

fn cost_of(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn normal_matrix(j: &[f64], n: usize, p: usize) -> Vec<f64> {
    let mut m = vec![0.0; p * p];
    for row in 0..n {
        let jr = &j[row * p..(row + 1) * p];
        for a in 0..p {
            for b in a..p {
                m[a * p + b] += jr[a] * jr[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            m[a * p + b] = m[b * p + a];
        }
    }
    m
}

/// Gauss–Jordan inverse with partial pivoting.
fn invert(m: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        inv[i * p + i] = 1.0;
    }
    for col in 0..p {
        let pivot = (col..p).max_by(|&x, &y| a[x * p + col].abs().total_cmp(&a[y * p + col].abs()))?;
        if a[pivot * p + col].abs() < 1e-300 {
            return None;
        }
        for k in 0..p {
            a.swap(col * p + k, pivot * p + k);
            inv.swap(col * p + k, pivot * p + k);
        }
        let d = a[col * p + col];
        for k in 0..p {
            a[col * p + k] /= d;
            inv[col * p + k] /= d;
        }
        for row in 0..p {
            if row != col {
                let f = a[row * p + col];
                if f != 0.0 {
                    for k in 0..p {
                        a[row * p + k] -= f * a[col * p + k];
                        inv[row * p + k] -= f * inv[col * p + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn solve(m: &[f64], rhs: &[f64], p: usize) -> Option<Vec<f64>> {
    let inv = invert(m, p)?;
    Some((0..p).map(|i| (0..p).map(|k| inv[i * p + k] * rhs[k]).sum()).collect())
}

/// Finite-difference Jacobian, central where the box allows it.
fn jacobian<F>(f: &F, x: &[f64], r0: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let p = x.len();
    let n = r0.len();
    let mut j = vec![0.0; n * p];
    for c in 0..p {
        let h = 1e-6 * x[c].abs().max(1e-3);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        let (rp, rm, span) = if x[c] + h <= upper[c] && x[c] - h >= lower[c] {
            xp[c] += h;
            xm[c] -= h;
            (f(&xp), f(&xm), 2.0 * h)
        } else if x[c] + h <= upper[c] {
            xp[c] += h;
            (f(&xp), r0.to_vec(), h)
        } else {
            xm[c] -= h;
            (r0.to_vec(), f(&xm), h)
        };
        for row in 0..n {
            j[row * p + c] = (rp[row] - rm[row]) / span;
        }
    }
    j
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Minimize `0.5 |f(x)|^2` subject to `lower <= x <= upper`.
///
/// Non-finite residuals at a trial point reject that step. The returned
/// result has `converged = false` when `max_iter` is exhausted.
pub fn levenberg_marquardt<F>(f: &F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &LmOptions) -> LmResult
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let p = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut r = f(&x);
    let n = r.len();
    let mut cost = cost_of(&r);
    let mut j = jacobian(f, &x, &r, lower, upper);
    let mut mu = -1.0;
    let mut nu = 2.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let jtj = normal_matrix(&j, n, p);
        let g: Vec<f64> = (0..p).map(|c| (0..n).map(|row| j[row * p + c] * r[row]).sum()).collect();
        let gmax = g
            .iter()
            .enumerate()
            .map(|(c, gc)| {
                // a gradient pushing against an active bound does not count
                let blocked = (x[c] <= lower[c] && *gc > 0.0) || (x[c] >= upper[c] && *gc < 0.0);
                if blocked { 0.0 } else { gc.abs() }
            })
            .fold(0.0, f64::max);
        if gmax <= opts.gtol * (cost.max(f64::MIN_POSITIVE)).sqrt().max(opts.gtol) {
            converged = true;
            break;
        }
        if mu < 0.0 {
            mu = 1e-3 * (0..p).map(|c| jtj[c * p + c]).fold(0.0, f64::max).max(1e-12);
        }
        let mut damped = jtj.clone();
        for c in 0..p {
            damped[c * p + c] += mu * jtj[c * p + c].max(1e-12);
        }
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let Some(step) = solve(&damped, &neg_g, p) else {
            mu *= nu;
            nu *= 2.0;
            continue;
        };
        let mut trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
        project(&mut trial, lower, upper);
        let actual: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let step_norm = actual.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if step_norm <= opts.xtol * (x_norm + opts.xtol) {
            converged = true;
            break;
        }
        let r_trial = f(&trial);
        let cost_trial = if r_trial.iter().all(|v| v.is_finite()) {
            cost_of(&r_trial)
        } else {
            f64::INFINITY
        };
        // predicted reduction of the linear model for the projected step
        let jd: Vec<f64> = (0..n)
            .map(|row| (0..p).map(|c| j[row * p + c] * actual[c]).sum::<f64>())
            .collect();
        let model = cost_of(&r.iter().zip(&jd).map(|(a, b)| a + b).collect::<Vec<_>>());
        let predicted = cost - model;
        let rho = if predicted > 0.0 { (cost - cost_trial) / predicted } else { -1.0 };
        if cost_trial < cost && rho > 0.0 {
            let rel = (cost - cost_trial) / cost.max(f64::MIN_POSITIVE);
            x = trial;
            r = r_trial;
            cost = cost_trial;
            j = jacobian(f, &x, &r, lower, upper);
            mu *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
            if rel <= opts.ftol || cost == 0.0 {
                converged = true;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if !mu.is_finite() || mu > 1e300 {
                // no descent direction left at machine precision
                converged = true;
                break;
            }
        }
    }

    let at_bound = (0..p).map(|c| x[c] <= lower[c] || x[c] >= upper[c]).collect();
    LmResult {
        params: x,
        residuals: r,
        jacobian: j,
        cost,
        iterations,
        converged,
        at_bound,
    }
}

/// Run [`levenberg_marquardt`] from every start (in parallel) and keep the
/// lowest-cost result; ties go to the earliest start.
pub fn multi_start<F>(f: &F, starts: &[Vec<f64>], lower: &[f64], upper: &[f64], opts: &LmOptions) -> Option<LmResult>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let results: Vec<LmResult> = starts
        .par_iter()
        .map(|x0| levenberg_marquardt(f, x0, lower, upper, opts))
        .collect();
    results
        .into_iter()
        .filter(|r| r.cost.is_finite())
        .reduce(|best, r| if r.cost < best.cost { r } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-1.3 * t).exp()).collect();
        let f = |x: &[f64]| t.iter().zip(&y).map(|(t, y)| x[0] * (-x[1] * t).exp() - y).collect::<Vec<_>>();
        let r = levenberg_marquardt(&f, &[1.0, 0.5], &[0.0, 0.0], &[10.0, 10.0], &LmOptions::default());
        assert!(r.converged);
        assert!((r.params[0] - 2.5).abs() < 1e-9);
        assert!((r.params[1] - 1.3).abs() < 1e-9);
    }

    #[test]
    fn respects_bounds() {
        // unconstrained optimum at x = 3, box caps at 2
        let f = |x: &[f64]| vec![x[0] - 3.0, 0.1 * (x[0] - 3.0)];
        let r = levenberg_marquardt(&f, &[0.0], &[0.0], &[2.0], &LmOptions::default());
        assert_eq!(r.params[0], 2.0);
        assert!(r.at_bound[0]);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]];
        let r = levenberg_marquardt(&f, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &LmOptions::default());
        assert!((r.params[0] - 1.0).abs() < 1e-8 && (r.params[1] - 1.0).abs() < 1e-8, "{:?}", r.params);
    }

    #[test]
    fn covariance_of_linear_model() {
        // y = a + b x with noise-free data except one point: compare with OLS formula
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.1, 1.0, 2.1, 2.9, 4.05];
        let f = |p: &[f64]| x.iter().zip(&y).map(|(x, y)| p[0] + p[1] * x - y).collect::<Vec<_>>();
        let r = levenberg_marquardt(&f, &[0.0, 0.0], &[-10.0, -10.0], &[10.0, 10.0], &LmOptions::default());
        let line = crate::stats::ols(&x, &y).unwrap();
        let se = r.stderr().unwrap();
        assert!((r.params[1] - line.slope).abs() < 1e-8, "{} {} {:?}", r.params[1], line.slope, r.iterations);
        assert!((se[1] - line.slope_stderr).abs() < 1e-8);
    }

    #[test]
    fn multi_start_is_order_stable() {
        let f = |x: &[f64]| vec![(x[0] * x[0] - 4.0)];
        let starts = vec![vec![1.0], vec![-1.0], vec![3.0]];
        let a = multi_start(&f, &starts, &[-10.0], &[10.0], &LmOptions::default()).unwrap();
        let b = multi_start(&f, &starts, &[-10.0], &[10.0], &LmOptions::default()).unwrap();
        assert_eq!(a.params, b.params);
        assert!((a.params[0].abs() - 2.0).abs() < 1e-9);
    }
}
