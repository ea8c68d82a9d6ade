use serde::{Deserialize, Serialize};

use super::field::{mode_norm, SpectralField, VectorSamples};
use super::ops::physical_components;
use crate::error::{LabError, Result};

/// Norms available on [`SpectralField`]s.
///
/// Homogeneous Sobolev norms skip the zero mode; torus norms stand in for
/// their whole-space counterparts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    /// `(sum |xi|^{2s} |u_hat|^2)^{1/2}` times `|box|^{1/2}`.
    Hdot(f64),
    /// Inhomogeneous `(sum (1 + |xi|^2)^s |u_hat|^2)^{1/2}` times `|box|^{1/2}`.
    H(f64),
    /// `L^p` by collocation quadrature; `p = f64::INFINITY` is the sup norm.
    Lp(f64),
    /// `L^{-1/2} ||.||_{L^2} + ell0 L^{-1/2} ||.||_{Hdot^1} + ||.||_{L^3}`.
    Energy {
        length: f64,
        ell0: f64,
    },
    /// Plain `||.||_{L^2} + ||.||_{Hdot^1} + ||.||_{L^3}`.
    Composite,
    /// `||exp(beta sqrt(-Delta)) u||_{Hdot^s}`.
    Gevrey {
        beta: f64,
        s: f64,
    },
}

fn weighted_sum(u: &SpectralField, weight: impl Fn(f64) -> f64, skip_zero: bool) -> f64 {
    let g = u.grid;
    let mut acc = 0.0;
    for idx in 0..g.len() {
        if skip_zero && idx == 0 {
            continue;
        }
        let c = u.coeff(idx);
        let m = mode_norm(&c).powi(2);
        if m == 0.0 {
            continue;
        }
        acc += weight(g.xi_norm(idx)) * m;
    }
    acc * g.volume()
}

fn check_mean_free(u: &SpectralField) -> Result<()> {
    let mean = mode_norm(&u.mean());
    if mean > 0.0 {
        Err(LabError::NonzeroMean(mean))
    } else {
        Ok(())
    }
}

/// `L^p` norm of sampled data, rectangle rule on the collocation grid.
pub fn lp_norm_samples(samples: &VectorSamples, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(LabError::UnsupportedNorm(format!("L^{p}")));
    }
    let mag = samples.magnitude();
    if p.is_infinite() {
        return Ok(mag.into_iter().fold(0.0, f64::max));
    }
    let h3 = samples.grid.spacing().powi(3);
    let sum: f64 = mag.iter().map(|m| m.powf(p)).sum();
    Ok((h3 * sum).powf(1.0 / p))
}

fn lp_norm(u: &SpectralField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(LabError::UnsupportedNorm(format!("L^{p}")));
    }
    let comps = physical_components(u);
    lp_norm_samples(&VectorSamples { grid: u.grid, comps }, p)
}

/// Norm of `u` of the requested kind.
pub fn norm(u: &SpectralField, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::L2 => Ok(weighted_sum(u, |_| 1.0, false).sqrt()),
        NormKind::Hdot(s) => {
            if s < 0.0 {
                check_mean_free(u)?;
            }
            Ok(weighted_sum(u, |r| r.powf(2.0 * s), true).sqrt())
        }
        NormKind::H(s) => Ok(weighted_sum(u, |r| (1.0 + r * r).powf(s), false).sqrt()),
        NormKind::Lp(p) => lp_norm(u, p),
        NormKind::Energy { length, ell0 } => {
            if !(length > 0.0 && ell0 > 0.0) {
                return Err(LabError::Param("energy norm needs L > 0 and ell0 > 0".into()));
            }
            let l2 = norm(u, NormKind::L2)?;
            let h1 = norm(u, NormKind::Hdot(1.0))?;
            let l3 = lp_norm(u, 3.0)?;
            Ok(l2 / length.sqrt() + ell0 * h1 / length.sqrt() + l3)
        }
        NormKind::Composite => {
            let l2 = norm(u, NormKind::L2)?;
            let h1 = norm(u, NormKind::Hdot(1.0))?;
            let l3 = lp_norm(u, 3.0)?;
            Ok(l2 + h1 + l3)
        }
        NormKind::Gevrey { beta, s } => {
            if s < 0.0 {
                check_mean_free(u)?;
            }
            Ok(weighted_sum(u, |r| (2.0 * beta * r).exp() * r.powf(2.0 * s), true).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn shear() -> SpectralField {
        let g = GridSpec::new(PI, 16).unwrap();
        SpectralField::forward(&VectorSamples::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]))
    }

    #[test]
    fn shear_norms() {
        let u = shear();
        let l2 = norm(&u, NormKind::L2).unwrap();
        assert!((l2 * l2 - (2.0 * PI).powi(3) / 2.0).abs() < 1e-10);
        let h1 = norm(&u, NormKind::Hdot(1.0)).unwrap();
        assert!((h1 - l2).abs() < 1e-12);
        let beta = 0.7;
        let gev = norm(&u, NormKind::Gevrey { beta, s: 1.0 }).unwrap();
        assert!((gev - beta.exp() * h1).abs() < 1e-12 * gev);
        // Physical quadrature of |sin|^2 agrees with Parseval.
        let l2q = norm(&u, NormKind::Lp(2.0)).unwrap();
        assert!((l2q - l2).abs() < 1e-12 * l2);
        let linf = norm(&u, NormKind::Lp(f64::INFINITY)).unwrap();
        assert!((linf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unsupported_p() {
        let u = shear();
        assert!(matches!(norm(&u, NormKind::Lp(0.5)), Err(LabError::UnsupportedNorm(_))));
    }

    #[test]
    fn negative_sobolev_needs_mean_free() {
        let g = GridSpec::new(1.0, 8).unwrap();
        let u = SpectralField::forward(&VectorSamples::from_fn(g, |_| [1.0, 0.0, 0.0]));
        assert!(norm(&u, NormKind::Hdot(-1.0)).is_err());
        assert!(norm(&u, NormKind::Hdot(1.0)).is_ok());
    }
}
