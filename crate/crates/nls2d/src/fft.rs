//! Thin 2D FFT layer over `rustfft`.
//!
//! Plans are cached per thread, so concurrent trajectories never contend on
//! shared planner state.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

thread_local! {
    static PLAN_CACHE: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn with_plans<R>(n: usize, f: impl FnOnce(&mut Plans) -> R) -> R {
    PLAN_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let plans = cache.entry(n).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(n);
            let inverse = planner.plan_fft_inverse(n);
            let scratch_len = forward
                .get_inplace_scratch_len()
                .max(inverse.get_inplace_scratch_len());
            Plans {
                forward,
                inverse,
                scratch: vec![Complex64::ZERO; scratch_len],
            }
        });
        f(plans)
    })
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for iy in 0..n {
        for ix in (iy + 1)..n {
            data.swap(iy * n + ix, ix * n + iy);
        }
    }
}

fn dft2(data: &mut [Complex64], n: usize, forward: bool) {
    debug_assert_eq!(data.len(), n * n);
    with_plans(n, |plans| {
        let fft = if forward {
            plans.forward.clone()
        } else {
            plans.inverse.clone()
        };
        fft.process_with_scratch(data, &mut plans.scratch);
        transpose_square(data, n);
        fft.process_with_scratch(data, &mut plans.scratch);
        transpose_square(data, n);
    });
}

/// Unnormalized 2D DFT: `X_m = sum_j x_j exp(-2 pi i m.j / n)`.
pub(crate) fn dft2_forward(data: &mut [Complex64], n: usize) {
    dft2(data, n, true);
}

/// Unnormalized 2D inverse DFT: `x_j = sum_m X_m exp(+2 pi i m.j / n)`.
pub(crate) fn dft2_inverse(data: &mut [Complex64], n: usize) {
    dft2(data, n, false);
}
