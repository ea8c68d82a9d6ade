use num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{LabError, Result};

/// Radial Fourier multiplier `m(|xi|)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    /// `(-Delta)^s`, symbol `|xi|^(2s)`.
    FractionalLaplacian(f64),
    /// `exp(beta sqrt(-Delta))`, symbol `exp(beta |xi|)`.
    Gevrey(f64),
    /// `(-nu Delta + alpha)^(-1)`, symbol `1 / (nu |xi|^2 + alpha)`.
    Resolvent { nu: f64, alpha: f64 },
    /// `-nu Delta + alpha`, symbol `nu |xi|^2 + alpha`.
    Damping { nu: f64, alpha: f64 },
    /// Indicator of the closed annulus `lo <= |xi| <= hi`.
    Band { lo: f64, hi: f64 },
    /// Pointwise product of two symbols.
    Product(Box<Multiplier>, Box<Multiplier>),
}

impl Multiplier {
    pub fn product(a: Multiplier, b: Multiplier) -> Self {
        Multiplier::Product(Box::new(a), Box::new(b))
    }

    /// Symbol value at `|xi| = r`.
    pub fn symbol(&self, r: f64) -> f64 {
        match self {
            Multiplier::FractionalLaplacian(s) => {
                if r == 0.0 {
                    if *s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    r.powf(2.0 * s)
                }
            }
            Multiplier::Gevrey(beta) => (beta * r).exp(),
            Multiplier::Resolvent { nu, alpha } => {
                let d = nu * r * r + alpha;
                if d == 0.0 {
                    0.0
                } else {
                    1.0 / d
                }
            }
            Multiplier::Damping { nu, alpha } => nu * r * r + alpha,
            Multiplier::Band { lo, hi } => {
                if r >= *lo && r <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::Product(a, b) => a.symbol(r) * b.symbol(r),
        }
    }

    /// True when the symbol blows up at `xi = 0`; such multipliers need
    /// mean-free input and never touch the zero mode.
    pub fn singular_at_origin(&self) -> bool {
        match self {
            Multiplier::FractionalLaplacian(s) => *s < 0.0,
            Multiplier::Resolvent { alpha, .. } => *alpha == 0.0,
            Multiplier::Product(a, b) => a.singular_at_origin() || b.singular_at_origin(),
            _ => false,
        }
    }

    /// `coeff_out(xi) = m(|xi|) coeff_in(xi)`.
    pub fn apply(&self, v: &SpectralField) -> Result<SpectralField> {
        let g = v.grid;
        if self.singular_at_origin() {
            let mean = super::field::mode_norm(&v.mean());
            if mean > 0.0 {
                return Err(LabError::NonzeroMean(mean));
            }
        }
        let singular = self.singular_at_origin();
        let zero = Complex64::new(0.0, 0.0);
        let out = v.map_modes(|idx, c| {
            if idx == 0 && singular {
                return [zero; 3];
            }
            let m = self.symbol(g.xi_norm(idx));
            [c[0] * m, c[1] * m, c[2] * m]
        });
        out.check_finite("multiplier produced a non-finite coefficient")?;
        Ok(out)
    }
}
