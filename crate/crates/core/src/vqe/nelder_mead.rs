//! Nelder-Mead with dimension-adaptive coefficients.

use super::objective::{Halt, Objective};
use super::{OptimizeError, OptimizeResult, StopReason};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientFreeOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_edge: f64,
    /// Stop when `f_max - f_min` over the simplex drops to `flat_tol * max(1, |f_min|)`.
    pub flat_tol: f64,
}

impl Default for GradientFreeOptions {
    fn default() -> Self {
        GradientFreeOptions {
            initial_edge: 0.1,
            flat_tol: 1e-12,
        }
    }
}

pub fn minimize_gradient_free<O: Objective + ?Sized>(
    objective: &mut O,
    x0: &[f64],
    opts: &GradientFreeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    let mut best = (x0.to_vec(), f64::INFINITY);
    let mut iterations = 0;
    let stop = match run(objective, x0, opts, &mut best, &mut iterations) {
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
    opts: &GradientFreeOptions,
    best: &mut (Vec<f64>, f64),
    iterations: &mut usize,
) -> Result<StopReason, Halt> {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let (rho, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf.max(2.0));

    let eval = |objective: &mut O, x: Vec<f64>, best: &mut (Vec<f64>, f64)| -> Result<(Vec<f64>, f64), Halt> {
        let f = objective.evaluate(&x)?;
        if f < best.1 {
            *best = (x.clone(), f);
        }
        Ok((x, f))
    };

    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(eval(objective, x0.to_vec(), best)?);
    objective.on_accept(x0, simplex[0].1);
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_edge;
        simplex.push(eval(objective, v, best)?);
    }

    let mut best_reported = simplex[0].1;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_reported {
            best_reported = simplex[0].1;
            objective.on_accept(&simplex[0].0, simplex[0].1);
        }
        let (f_lo, f_hi) = (simplex[0].1, simplex[n].1);
        if f_hi - f_lo <= opts.flat_tol * f_lo.abs().max(1.0) {
            return Ok(StopReason::Flat);
        }
        *iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = eval(objective, along(alpha), best)?;
        if reflected.1 < simplex[0].1 {
            let expanded = eval(objective, along(alpha * gamma), best)?;
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.1 < simplex[n].1 {
            let c = eval(objective, along(alpha * rho), best)?;
            (c.1 <= reflected.1).then_some(c)
        } else {
            let c = eval(objective, along(-rho), best)?;
            (c.1 < simplex[n].1).then_some(c)
        };
        if let Some(c) = contracted {
            simplex[n] = c;
            continue;
        }
        let anchor = simplex[0].0.clone();
        for k in 1..=n {
            let v: Vec<f64> = anchor
                .iter()
                .zip(&simplex[k].0)
                .map(|(a, x)| a + sigma * (x - a))
                .collect();
            simplex[k] = eval(objective, v, best)?;
        }
    }
}
