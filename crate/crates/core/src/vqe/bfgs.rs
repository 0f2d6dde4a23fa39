//! BFGS on forward-difference gradients with Armijo backtracking.

use super::objective::{finite_difference_gradient, Halt, Objective};
use super::{OptimizeError, OptimizeResult, StopReason};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiNewtonOptions {
    /// Base finite-difference step; component `i` uses `h * max(1, |x_i|)`.
    pub fd_step: f64,
    /// Stop when `max_i |g_i|` drops to this.
    pub gtol: f64,
    /// Stop when an accepted step improves `f` by less than `rtol * max(1, |f|)`.
    pub rtol: f64,
    /// Cap on the largest parameter change of a trial step, in radians.
    pub max_step: f64,
    pub armijo_c1: f64,
    pub max_backtracks: usize,
}

impl Default for QuasiNewtonOptions {
    fn default() -> Self {
        QuasiNewtonOptions {
            fd_step: 1.49e-8,
            gtol: 1e-6,
            rtol: 1e-10,
            max_step: 1.0,
            armijo_c1: 1e-4,
            max_backtracks: 30,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Dense inverse-Hessian approximation.
struct InverseHessian {
    n: usize,
    m: Vec<f64>,
    fresh: bool,
}

impl InverseHessian {
    fn identity(n: usize) -> Self {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        InverseHessian { n, m, fresh: true }
    }

    fn direction(&self, g: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| -dot(&self.m[i * self.n..(i + 1) * self.n], g))
            .collect()
    }

    /// `H <- (I - r s y^T) H (I - r y s^T) + r s s^T`, `r = 1 / (y^T s)`.
    fn update(&mut self, s: &[f64], y: &[f64]) -> bool {
        let sy = dot(s, y);
        let yy = dot(y, y);
        if !(sy > 1e-12 * dot(s, s).sqrt() * yy.sqrt()) {
            return false;
        }
        let n = self.n;
        if self.fresh {
            let scale = sy / yy;
            self.m.iter_mut().for_each(|v| *v *= scale);
            self.fresh = false;
        }
        let r = 1.0 / sy;
        let hy: Vec<f64> = (0..n).map(|i| dot(&self.m[i * n..(i + 1) * n], y)).collect();
        let yhy = dot(y, &hy);
        for i in 0..n {
            for j in 0..n {
                self.m[i * n + j] += -r * (hy[i] * s[j] + s[i] * hy[j]) + (r * r * yhy + r) * s[i] * s[j];
            }
        }
        true
    }
}

/// Minimizes with BFGS; returns the best point the objective ever saw.
pub fn minimize_quasi_newton<O: Objective + ?Sized>(
    objective: &mut O,
    x0: &[f64],
    opts: &QuasiNewtonOptions,
) -> Result<OptimizeResult, OptimizeError> {
    let mut best = (x0.to_vec(), f64::INFINITY);
    let mut iterations = 0;
    let stop = run(objective, x0, opts, &mut best, &mut iterations);
    let stop = match stop {
        Ok(s) => s,
        Err(Halt::Budget) => StopReason::Budget,
        Err(Halt::WallClock) => StopReason::WallClock,
        Err(Halt::NonFinite { eval, value }) => return Err(OptimizeError::NonFinite { eval, value }),
    };
    if let Some((x, f)) = objective.best() {
        if f < best.1 {
            best = (x.to_vec(), f);
        }
    }
    Ok(OptimizeResult {
        x: best.0,
        f: best.1,
        stop,
        iterations,
    })
}

fn run<O: Objective + ?Sized>(
    objective: &mut O,
    x0: &[f64],
    opts: &QuasiNewtonOptions,
    best: &mut (Vec<f64>, f64),
    iterations: &mut usize,
) -> Result<StopReason, Halt> {
    let n = x0.len();
    let note = |x: &[f64], f: f64, best: &mut (Vec<f64>, f64)| {
        if f < best.1 {
            *best = (x.to_vec(), f);
        }
    };
    let mut x = x0.to_vec();
    let (mut f, mut g) = finite_difference_gradient(objective, &x, opts.fd_step)?;
    note(&x, f, best);
    objective.on_accept(&x, f);
    let mut hinv = InverseHessian::identity(n);

    loop {
        if inf_norm(&g) <= opts.gtol {
            return Ok(StopReason::GradientTolerance);
        }
        let mut d = hinv.direction(&g);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hinv = InverseHessian::identity(n);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut alpha = (opts.max_step / inf_norm(&d)).min(1.0);
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let ft = objective.evaluate(&trial)?;
            note(&trial, ft, best);
            if ft <= f + opts.armijo_c1 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if hinv.fresh {
                return Ok(StopReason::LineSearch);
            }
            hinv = InverseHessian::identity(n);
            continue;
        };
        *iterations += 1;
        objective.on_accept(&x_new, f_new);
        let improvement = f - f_new;
        if improvement <= opts.rtol * f.abs().max(f_new.abs()).max(1.0) {
            return Ok(StopReason::RelativeImprovement);
        }

        let (f_base, g_new) = finite_difference_gradient(objective, &x_new, opts.fd_step)?;
        note(&x_new, f_base, best);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        hinv.update(&s, &y);
        x = x_new;
        f = f_base;
        g = g_new;
    }
}
