//! Adaptive Gauss-Kronrod (7, 15) quadrature on finite intervals.

use crate::error::{LabError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (estimate, error estimate).
fn panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol |I|)`.
///
/// Panels are refined worst-first until the summed error estimate meets
/// the tolerance or `max_panels` is reached.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate_with_breaks(&mut f, &[a, b], abs_tol, rel_tol)
}

/// Like [`integrate`] with the initial panels cut at `points` (sorted).
pub fn integrate_with_breaks(
    f: &mut impl FnMut(f64) -> f64,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_PANELS: usize = 4000;
    let mut panels: Vec<(f64, f64, f64, f64)> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = panel(f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(LabError::Quadrature("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(LabError::Quadrature(format!(
                "no convergence: estimate {total:e}, error {err:e}"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let (a, b, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = panel(f, a, m);
        let (v2, e2) = panel(f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-12);
        let e = integrate(f64::exp, 0.0, 5.0, 1e-13, 1e-13).unwrap();
        assert!((e - (5f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} = 2
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9, 1e-9).unwrap();
        assert!((v - 2.0).abs() < 1e-7);
    }
}
