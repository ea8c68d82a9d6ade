//! The Bessel kernel `G = F^{-1}[(nu|xi|^2 + alpha)^{-1}]` on R^3.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::spectral::{forward_scalar, inverse_scalar, GridSpec};

/// `G(r) = exp(-r sqrt(alpha/nu)) / (4 pi nu r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesselKernel {
    pub nu: f64,
    pub alpha: f64,
}

impl BesselKernel {
    pub fn new(nu: f64, alpha: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(LabError::Param(format!("viscosity must be positive, got {nu}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::Param(format!("kernel needs alpha > 0, got {alpha}")));
        }
        Ok(Self { nu, alpha })
    }

    /// Inverse decay length `sqrt(alpha/nu)`.
    pub fn decay_rate(&self) -> f64 {
        (self.alpha / self.nu).sqrt()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.value(r))
    }

    fn value(&self, r: f64) -> f64 {
        (-self.decay_rate() * r).exp() / (4.0 * std::f64::consts::PI * self.nu * r)
    }

    /// `G_{nu,alpha}(r) = G_{1, alpha/nu}(r) / nu`.
    pub fn unit_viscosity(&self) -> Self {
        Self {
            nu: 1.0,
            alpha: self.alpha / self.nu,
        }
    }

    /// `G(r)` from the inverse Fourier transform of the symbol,
    /// `(1 / (2 pi^2 r)) int_0^inf rho sin(rho r) / (nu rho^2 + alpha) d rho`.
    ///
    /// The integral is taken along `Im rho = c` with `c` just below the pole
    /// at `i sqrt(alpha/nu)`, which turns the slowly decaying oscillatory
    /// integrand into one decaying like `t^{-3}` and scales out `exp(-c r)`.
    /// The tail past the cutoff is summed by two integrations by parts.
    pub fn radial_quadrature(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let (nu, alpha) = (self.nu, self.alpha);
        let a = self.decay_rate();
        let eta = (0.5 * a).min(1.0 / r);
        let c = a - eta;
        let h = |t: f64| -> Complex64 {
            let z = Complex64::new(t, c);
            -alpha / (nu * z * (nu * z * z + alpha))
        };
        let dh = |t: f64| -> Complex64 {
            let z = Complex64::new(t, c);
            let d = z * (nu * z * z + alpha);
            alpha * (3.0 * nu * z * z + alpha) / (nu * d * d)
        };
        let t_end = (1.2e11 * alpha / (nu * r.powi(3)))
            .powf(0.2)
            .max(20.0 * a)
            .max(20.0 / r);

        let period = 2.0 * std::f64::consts::PI / r;
        let mut points = vec![0.0];
        let mut t = eta / 8.0;
        while t < t_end.min(period) {
            points.push(t);
            t *= 2.0;
        }
        let mut t = period;
        while t < t_end {
            points.push(t);
            t += period;
        }
        points.push(t_end);
        points.sort_by(f64::total_cmp);
        points.dedup();

        let scale = std::f64::consts::PI / nu;
        let mut integrand = |t: f64| (h(t) * Complex64::new(0.0, t * r).exp()).im;
        let body = integrate_with_breaks(&mut integrand, &points, 1e-14 * scale, 1e-12)?;
        let ir = Complex64::new(0.0, r);
        let tail = Complex64::new(0.0, t_end * r).exp() * (-h(t_end) / ir + dh(t_end) / (ir * ir));
        let j = body + tail.im;
        Ok((-c * r).exp() * j / (2.0 * std::f64::consts::PI.powi(2) * r))
    }

    /// `4 pi int_0^inf r^2 G(r) dr`, which equals `1/alpha`.
    pub fn mass(&self) -> Result<f64> {
        let a = self.decay_rate();
        let breaks: Vec<f64> = (0..=60).map(|k| k as f64 / a).collect();
        let mut f = |r: f64| {
            if r == 0.0 {
                0.0
            } else {
                4.0 * std::f64::consts::PI * r * r * self.value(r)
            }
        };
        let v = integrate_with_breaks(&mut f, &breaks, 1e-15 / self.alpha, 1e-13)?;
        Ok(v)
    }

    /// Constants of the two-regime bound
    /// `G(r) <= c_near / r` for `r <= 2 sqrt(nu/alpha)` and
    /// `G(r) <= c_far exp(-sqrt(alpha/nu) r / 2)` beyond, computed as maxima
    /// over a fine radial grid.
    pub fn piecewise_bound(&self) -> PiecewiseBound {
        let a = self.decay_rate();
        let split = 2.0 / a;
        let samples = 20_000;
        let mut near = 0.0f64;
        for k in 1..=samples {
            let r = split * k as f64 / samples as f64;
            near = near.max(self.value(r) * r);
        }
        let mut far = 0.0f64;
        for k in 0..=samples {
            let r = split + 40.0 / a * k as f64 / samples as f64;
            far = far.max(self.value(r) * (0.5 * a * r).exp());
        }
        PiecewiseBound {
            split_radius: split,
            near_constant: near,
            far_constant: far,
        }
    }

    /// Radial convolution `(G * g)(r)` for a radial profile `g`,
    /// `(1 / (2 nu a r)) int_0^inf s g(s) [e^{-a|r-s|} - e^{-a(r+s)}] ds`.
    pub fn convolve_radial(&self, g: &impl Fn(f64) -> f64, r: f64) -> Result<f64> {
        check_radius(r)?;
        let a = self.decay_rate();
        let mut inner = |s: f64| s * g(s) * (-a * (r - s)).exp() * (-(-2.0 * a * s).exp_m1());
        let lo = (r - 40.0 / a).max(0.0);
        let mut pts = vec![lo];
        let mut p = lo;
        while p + 1.0 / a < r {
            p += 1.0 / a;
            pts.push(p);
        }
        pts.push(r);
        let left = integrate_with_breaks(&mut inner, &pts, 0.0, 1e-11)?;
        // Mass below `lo` is weighted by at most e^{-40}.
        let below = if lo > 0.0 {
            integrate(
                |s| s * g(s) * (-a * (r - s)).exp() * (-(-2.0 * a * s).exp_m1()),
                0.0,
                lo,
                0.0,
                1e-9,
            )?
        } else {
            0.0
        };
        let mut outer = |s: f64| s * g(s) * (-a * (s - r)).exp() * (-(-2.0 * a * r).exp_m1());
        let pts: Vec<f64> = (0..=40).map(|k| r + k as f64 / a).collect();
        let right = integrate_with_breaks(&mut outer, &pts, 0.0, 1e-11)?;
        Ok((below + left + right) / (2.0 * self.nu * a * r))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(LabError::Param(format!("kernel radius must be positive, got {r}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiecewiseBound {
    pub split_radius: f64,
    pub near_constant: f64,
    pub far_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferPoint {
    pub r: f64,
    pub value: f64,
    /// `value * r^exponent`.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub alpha: f64,
    pub exponent: f64,
    pub points: Vec<TransferPoint>,
    /// `max / min` of the weighted values.
    pub spread: f64,
    /// Mean of the weighted values.
    pub plateau: f64,
}

/// Checks that `G * g` inherits the algebraic decay `r^{-exponent}` of `g`
/// by tabulating `r^exponent (G * g)(r)` over `radii`.
pub fn decay_transfer_check(
    kernel: &BesselKernel,
    g: &impl Fn(f64) -> f64,
    exponent: f64,
    radii: &[f64],
) -> Result<TransferReport> {
    if radii.is_empty() {
        return Err(LabError::InsufficientData("no radii to tabulate".into()));
    }
    let points = radii
        .iter()
        .map(|&r| {
            let value = kernel.convolve_radial(g, r)?;
            Ok(TransferPoint {
                r,
                value,
                weighted: value * r.powf(exponent),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = points.iter().map(|p| p.weighted).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p.weighted).fold(f64::INFINITY, f64::min);
    Ok(TransferReport {
        alpha: kernel.alpha,
        exponent,
        spread: max / min,
        plateau: points.iter().map(|p| p.weighted).sum::<f64>() / points.len() as f64,
        points,
    })
}

/// Applies the torus symbol `(nu|xi|^2 + alpha)^{-1}` (zero mode included)
/// to a Gaussian of width `sigma` centered at the origin and returns the
/// largest deviation from the free-space `G * g` along the first axis,
/// relative to the peak of `G * g`.
pub fn torus_consistency(kernel: &BesselKernel, grid: &GridSpec, sigma: f64) -> Result<f64> {
    grid.validate()?;
    if !(sigma > 0.0) {
        return Err(LabError::Param(format!("bump width must be positive, got {sigma}")));
    }
    let gauss = |r: f64| (-0.5 * (r / sigma).powi(2)).exp();
    let samples: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let x = grid.position(idx);
            gauss((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
        })
        .collect();
    let mut coeffs = forward_scalar(grid, &samples);
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c /= kernel.nu * grid.xi_norm_sq(idx) + kernel.alpha;
    }
    let out = inverse_scalar(grid, &coeffs);
    let n = grid.n();
    let h = grid.spacing();
    let mut peak = 0.0f64;
    let mut worst = 0.0f64;
    for i in (n / 2 + 1)..n {
        let idx = grid.flat([i, n / 2, n / 2]);
        let r = (i - n / 2) as f64 * h;
        let exact = kernel.convolve_radial(&gauss, r)?;
        peak = peak.max(exact.abs());
        worst = worst.max((out[idx] - exact).abs());
    }
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_radii() {
        let k = BesselKernel::new(1.0, 1.0).unwrap();
        assert!(k.eval(0.0).is_err());
        assert!(k.eval(-1.0).is_err());
        assert!(BesselKernel::new(1.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (nu, alpha) in [(1.0, 1.0), (0.3, 2.0), (2.0, 0.1)] {
            let k = BesselKernel::new(nu, alpha).unwrap();
            for r in [0.01, 0.1, 1.0, 7.0, 40.0] {
                let q = k.radial_quadrature(r).unwrap();
                let e = k.eval(r).unwrap();
                assert!(((q - e) / e).abs() < 1e-6, "nu={nu} alpha={alpha} r={r}: {q} vs {e}");
            }
        }
    }

    #[test]
    fn mass_is_inverse_damping() {
        for alpha in [0.1, 1.0, 5.0] {
            let k = BesselKernel::new(0.7, alpha).unwrap();
            assert!((k.mass().unwrap() - 1.0 / alpha).abs() < 1e-9 / alpha);
        }
    }
}
