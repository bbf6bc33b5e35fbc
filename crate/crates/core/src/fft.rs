//! Thin wrapper over `rustfft` for one- and two-dimensional grid transforms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}

/// Unnormalized DFT over the grid (`e^{-2 pi i jk/n}` forward); the inverse
/// divides by the sample count.
pub(crate) fn transform(data: &mut Vec<Complex64>, spec: &GridSpec, inverse: bool) {
    let n = spec.points_per_axis();
    let fft = plan(n, inverse);
    fft.process(data);
    if spec.dim() == 2 {
        let mut t = transpose(data, n);
        fft.process(&mut t);
        *data = transpose(&t, n);
    }
    if inverse {
        let scale = 1.0 / spec.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Signed integer frequency of DFT index `k` (`-n/2 <= k' < n/2`).
pub(crate) fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}
