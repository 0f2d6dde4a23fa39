//! In-place stride kernels for the fixed gate set.

use std::f64::consts::FRAC_1_SQRT_2 as H;

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::circuit::Gate;

/// Registers at least this large split gate kernels across rayon workers.
const PAR_MIN_LEN: usize = 1 << 14;

/// Calls `f(index_of_a, a, b)` for every amplitude pair differing only in bit `q`.
fn for_pairs<F>(amps: &mut [C], q: usize, f: F)
where
    F: Fn(usize, &mut C, &mut C) + Sync,
{
    let stride = 1usize << q;
    let block = stride << 1;
    let run = |(bi, chunk): (usize, &mut [C])| {
        let base = bi * block;
        let (lo, hi) = chunk.split_at_mut(stride);
        for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(base + k, a, b);
        }
    };
    if amps.len() < PAR_MIN_LEN || rayon::current_num_threads() == 1 {
        amps.chunks_mut(block).enumerate().for_each(run);
    } else if amps.len() / block >= 64 {
        amps.par_chunks_mut(block).enumerate().for_each(run);
    } else {
        for (bi, chunk) in amps.chunks_mut(block).enumerate() {
            let base = bi * block;
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .enumerate()
                .for_each(|(k, (a, b))| f(base + k, a, b));
        }
    }
}

pub(super) fn apply_gate(amps: &mut [C], gate: &Gate, params: &[f64]) {
    let i = C::new(0.0, 1.0);
    match *gate {
        Gate::X(q) => for_pairs(amps, q, |_, a, b| std::mem::swap(a, b)),
        Gate::RxPlus(q) => for_pairs(amps, q, |_, a, b| {
            let (x, y) = (*a, *b);
            *a = (x - i * y) * H;
            *b = (y - i * x) * H;
        }),
        Gate::RxMinus(q) => for_pairs(amps, q, |_, a, b| {
            let (x, y) = (*a, *b);
            *a = (x + i * y) * H;
            *b = (y + i * x) * H;
        }),
        Gate::RyPlus(q) => for_pairs(amps, q, |_, a, b| {
            let (x, y) = (*a, *b);
            *a = (x - y) * H;
            *b = (x + y) * H;
        }),
        Gate::RyMinus(q) => for_pairs(amps, q, |_, a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * H;
            *b = (y - x) * H;
        }),
        Gate::Rz(q, angle) => {
            let phi = angle.resolve(params);
            let lo = C::from_polar(1.0, -phi / 2.0);
            let hi = lo.conj();
            for_pairs(amps, q, |_, a, b| {
                *a *= lo;
                *b *= hi;
            })
        }
        Gate::Cnot { control, target } => cnot(amps, control, target),
    }
}

/// Swaps the target pair wherever the control bit is set, one contiguous run at a time.
fn cnot(amps: &mut [C], control: usize, target: usize) {
    let (cbit, tbit) = (1usize << control, 1usize << target);
    let serial = amps.len() < PAR_MIN_LEN || rayon::current_num_threads() == 1;
    if target < control {
        let run = |block: &mut [C]| {
            for pair in block[cbit..].chunks_mut(tbit << 1) {
                let (lo, hi) = pair.split_at_mut(tbit);
                lo.swap_with_slice(hi);
            }
        };
        if serial {
            amps.chunks_mut(cbit << 1).for_each(run);
        } else {
            amps.par_chunks_mut(cbit << 1).for_each(run);
        }
    } else {
        let run = |block: &mut [C]| {
            let (lo, hi) = block.split_at_mut(tbit);
            for (a, b) in lo.chunks_mut(cbit << 1).zip(hi.chunks_mut(cbit << 1)) {
                a[cbit..].swap_with_slice(&mut b[cbit..]);
            }
        };
        if serial {
            amps.chunks_mut(tbit << 1).for_each(run);
        } else {
            amps.par_chunks_mut(tbit << 1).for_each(run);
        }
    }
}
