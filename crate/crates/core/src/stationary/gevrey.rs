use serde::Serialize;

use crate::error::{LabError, Result};
use crate::spectral::{norm, NormKind, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GevreyPoint {
    pub beta: f64,
    /// `||exp(beta sqrt(-Delta)) U||_{Hdot^{1/2}}`
    pub norm: f64,
}

/// Gevrey norms of `u` at each `beta`.
pub fn gevrey_picard_check(u: &SpectralField, betas: &[f64]) -> Result<Vec<GevreyPoint>> {
    betas
        .iter()
        .map(|&beta| {
            if !(beta >= 0.0) {
                return Err(LabError::Param(format!(
                    "Gevrey radius must be nonnegative, got {beta}"
                )));
            }
            Ok(GevreyPoint {
                beta,
                norm: norm(u, NormKind::Gevrey { beta, s: 0.5 })?,
            })
        })
        .collect()
}

/// True when `ln ||.||` is nondecreasing with nonnegative second
/// differences on a uniform `beta` grid, up to relative round-off `tol`.
pub fn log_convex_increasing(curve: &[GevreyPoint], tol: f64) -> bool {
    let logs: Vec<f64> = curve.iter().map(|p| p.norm.ln()).collect();
    let scale = logs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let increasing = logs.windows(2).all(|w| w[1] >= w[0] - tol * scale);
    let convex = logs.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -tol * scale);
    increasing && convex
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, VectorSamples};

    #[test]
    fn single_unit_mode_scales_by_exp_beta() {
        let g = GridSpec::new(std::f64::consts::PI, 16).unwrap();
        let u = SpectralField::forward(&VectorSamples::from_fn(g, |x| [x[2].cos(), 0.0, 0.0]));
        let curve = gevrey_picard_check(&u, &[0.0, 0.5, 1.5]).unwrap();
        let base = norm(&u, NormKind::Hdot(0.5)).unwrap();
        assert_eq!(curve[0].norm, base);
        for p in &curve {
            assert!((p.norm - p.beta.exp() * base).abs() < 1e-13 * p.norm);
        }
        assert!(log_convex_increasing(&curve[..2], 1e-12));
    }
}
