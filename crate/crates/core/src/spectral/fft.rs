//! Three-dimensional complex FFT on `N^3` row-major arrays.
//!
//! Each pass transforms the contiguous (last) axis line by line and then
//! rotates the axes cyclically; three passes cover every axis and restore
//! the original layout. Lines are independent, so the result does not
//! depend on how rayon schedules them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

fn plans(n: usize) -> (Plan, Plan) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Plan, Plan)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized in-place 3D transform.
pub(crate) fn fft3(data: &mut Vec<Complex64>, n: usize, direction: Direction) {
    assert_eq!(data.len(), n * n * n, "fft3: buffer length is not n^3");
    let (fwd, inv) = plans(n);
    let plan = match direction {
        Direction::Forward => fwd,
        Direction::Inverse => inv,
    };
    let mut rotated = vec![Complex64::new(0.0, 0.0); data.len()];
    for _ in 0..3 {
        transform_last_axis(data, n, &plan);
        rotate(data, &mut rotated, n);
        std::mem::swap(data, &mut rotated);
    }
}

fn transform_last_axis(data: &mut [Complex64], n: usize, plan: &Plan) {
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(n * n).for_each(|plane| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        for line in plane.chunks_exact_mut(n) {
            plan.process_with_scratch(line, &mut scratch);
        }
    });
}

/// `out[c][a][b] = input[a][b][c]`: the last axis becomes the first.
fn rotate(input: &[Complex64], out: &mut [Complex64], n: usize) {
    out.par_chunks_mut(n * n).enumerate().for_each(|(c, plane)| {
        for a in 0..n {
            let row = &mut plane[a * n..(a + 1) * n];
            let base = a * n * n + c;
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = input[base + b * n];
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(input: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * n];
        let w = -2.0 * std::f64::consts::PI / n as f64;
        for k0 in 0..n {
            for k1 in 0..n {
                for k2 in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j0 in 0..n {
                        for j1 in 0..n {
                            for j2 in 0..n {
                                let phase = w * ((k0 * j0 + k1 * j1 + k2 * j2) % n) as f64;
                                acc += input[(j0 * n + j1) * n + j2] * Complex64::from_polar(1.0, phase);
                            }
                        }
                    }
                    out[(k0 * n + k1) * n + k2] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 4;
        let input: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let expected = naive_dft(&input, n);
        let mut data = input.clone();
        fft3(&mut data, n, Direction::Forward);
        for (a, b) in data.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
        fft3(&mut data, n, Direction::Inverse);
        let scale = (n * n * n) as f64;
        for (a, b) in data.iter().zip(&input) {
            assert!((a / scale - b).norm() < 1e-14);
        }
    }
}
