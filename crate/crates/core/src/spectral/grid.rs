use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Periodic cube `[-L_box, L_box)^3` sampled on an `N^3` collocation grid.
///
/// Modes are stored in FFT order: index `i` along an axis carries the
/// integer wavenumber `i` for `i < N/2` and `i - N` otherwise. The physical
/// wavevector of lattice mode `k` is `xi = delta_kappa * k` with
/// `delta_kappa = pi / L_box`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub box_half_side: f64,
    pub resolution: usize,
    #[serde(default = "GridSpec::default_dealias")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    fn default_dealias() -> f64 {
        Self::DEFAULT_DEALIAS
    }

    pub fn new(box_half_side: f64, resolution: usize) -> Result<Self> {
        Self::with_dealias(box_half_side, resolution, Self::DEFAULT_DEALIAS)
    }

    pub fn with_dealias(box_half_side: f64, resolution: usize, dealias_fraction: f64) -> Result<Self> {
        let grid = Self {
            box_half_side,
            resolution,
            dealias_fraction,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 8 || !self.resolution.is_multiple_of(2) {
            return Err(LabError::Grid(format!(
                "resolution must be even and >= 8, got {}",
                self.resolution
            )));
        }
        if !(self.box_half_side.is_finite() && self.box_half_side > 0.0) {
            return Err(LabError::Grid(format!(
                "box half-side must be positive, got {}",
                self.box_half_side
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction < 1.0) {
            return Err(LabError::Grid(format!(
                "dealias fraction must lie in (0, 1), got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.resolution
    }

    /// Number of lattice modes, `N^3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.resolution * self.resolution * self.resolution
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    /// Fundamental wavenumber `pi / L_box`.
    #[inline]
    pub fn delta_kappa(&self) -> f64 {
        PI / self.box_half_side
    }

    /// Dealiasing cutoff: modes with `|xi| >= kappa_max` are discarded.
    #[inline]
    pub fn kappa_max(&self) -> f64 {
        self.dealias_fraction * (self.resolution as f64 / 2.0) * self.delta_kappa()
    }

    /// Volume of the periodic box, `(2 L_box)^3`.
    #[inline]
    pub fn volume(&self) -> f64 {
        (2.0 * self.box_half_side).powi(3)
    }

    /// Collocation spacing `2 L_box / N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_side / self.resolution as f64
    }

    /// Signed integer wavenumber carried by FFT index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.resolution;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT index of signed wavenumber `k`, if representable.
    #[inline]
    pub fn fft_index(&self, k: i64) -> Option<usize> {
        let n = self.resolution as i64;
        if k < -n / 2 || k >= n / 2 {
            None
        } else {
            Some(k.rem_euclid(n) as usize)
        }
    }

    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let n = self.resolution;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn flat(&self, i: [usize; 3]) -> usize {
        let n = self.resolution;
        (i[0] * n + i[1]) * n + i[2]
    }

    /// Integer lattice triple of flat mode index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.split(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Flat index of lattice triple `k`, if it lies on the grid.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        Some(self.flat([self.fft_index(k[0])?, self.fft_index(k[1])?, self.fft_index(k[2])?]))
    }

    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let dk = self.delta_kappa();
        let k = self.mode(idx);
        [dk * k[0] as f64, dk * k[1] as f64, dk * k[2] as f64]
    }

    #[inline]
    pub fn xi_norm_sq(&self, idx: usize) -> f64 {
        let k = self.mode(idx);
        let dk = self.delta_kappa();
        dk * dk * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    #[inline]
    pub fn xi_norm(&self, idx: usize) -> f64 {
        self.xi_norm_sq(idx).sqrt()
    }

    /// True when the mode survives the dealiasing mask.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        self.xi_norm(idx) < self.kappa_max()
    }

    /// Physical coordinates of collocation point `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let j = self.split(idx);
        [
            -self.box_half_side + h * j[0] as f64,
            -self.box_half_side + h * j[1] as f64,
            -self.box_half_side + h * j[2] as f64,
        ]
    }

    /// Wavevector magnitudes of every mode, in storage order.
    pub fn xi_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.xi_norm(i)).collect()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.resolution != other.resolution {
            return Err(LabError::ResolutionMismatch {
                field: other.resolution,
                expected: self.resolution,
            });
        }
        if self.box_half_side != other.box_half_side {
            return Err(LabError::Grid(format!(
                "box half-side mismatch: {} vs {}",
                self.box_half_side, other.box_half_side
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_resolution() {
        assert!(GridSpec::new(1.0, 7).is_err());
        assert!(GridSpec::new(1.0, 6).is_err());
        assert!(GridSpec::new(1.0, 10).is_ok());
        assert!(GridSpec::new(-1.0, 16).is_err());
        assert!(GridSpec::with_dealias(1.0, 16, 1.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(2.0, 8).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.index_of(g.mode(idx)), Some(idx));
        }
        assert_eq!(g.index_of([4, 0, 0]), None);
        assert_eq!(g.mode(g.index_of([-4, 1, -1]).unwrap()), [-4, 1, -1]);
    }

    #[test]
    fn cutoff_below_nyquist() {
        let g = GridSpec::new(std::f64::consts::PI, 32).unwrap();
        assert_eq!(g.delta_kappa(), 1.0);
        assert!(g.kappa_max() < 16.0);
        // Nyquist planes are always discarded.
        let nyq = g.index_of([-16, 0, 0]).unwrap();
        assert!(!g.is_retained(nyq));
    }
}
