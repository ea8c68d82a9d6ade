use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{fft3, Direction};
use super::grid::GridSpec;
use crate::error::{LabError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real vector field sampled on the collocation grid, one array per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSamples {
    pub grid: GridSpec,
    pub comps: [Vec<f64>; 3],
}

impl VectorSamples {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    /// Samples `f(x)` at every collocation point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.position(idx));
            for (comp, x) in out.comps.iter_mut().zip(v) {
                comp[idx] = x;
            }
        }
        out
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| {
                let (a, b, c) = (self.comps[0][i], self.comps[1][i], self.comps[2][i]);
                (a * a + b * b + c * c).sqrt()
            })
            .collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }
}

/// Band-limited periodic vector field stored as Fourier coefficients.
///
/// Coefficients follow the mean-normalized convention
/// `u_hat(xi) = mean_x[u(x) exp(-i xi.x)]`, so that
/// `||u||_{L^2}^2 = |box| * sum |u_hat|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub comps: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            comps: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    /// Builds a field from per-mode coefficients.
    pub fn from_modes(grid: GridSpec, f: impl Fn(usize) -> [Complex64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(idx);
            for (comp, x) in out.comps.iter_mut().zip(v) {
                comp[idx] = x;
            }
        }
        out
    }

    #[inline]
    pub fn coeff(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set_coeff(&mut self, idx: usize, v: [Complex64; 3]) {
        for (comp, x) in self.comps.iter_mut().zip(v) {
            comp[idx] = x;
        }
    }

    /// Coefficient of the lattice mode `k`, zero when off the grid.
    pub fn coeff_at(&self, k: [i64; 3]) -> [Complex64; 3] {
        match self.grid.index_of(k) {
            Some(idx) => self.coeff(idx),
            None => [ZERO; 3],
        }
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.coeff(0)
    }

    /// Largest coefficient magnitude `max_xi |u_hat(xi)|`.
    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| mode_norm(&self.coeff(i)))
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|z| *z == ZERO))
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        grid.check_same(&self.grid)
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        let ok = self
            .comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if ok {
            Ok(())
        } else {
            Err(LabError::NonFinite(what.to_string()))
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, v| [v[0] * s, v[1] * s, v[2] * s])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b * s)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Self {
        assert_eq!(self.grid.len(), other.grid.len(), "zip_with: grid mismatch");
        let comps = std::array::from_fn(|c| {
            self.comps[c]
                .iter()
                .zip(&other.comps[c])
                .map(|(a, b)| f(*a, *b))
                .collect()
        });
        Self { grid: self.grid, comps }
    }

    pub fn map_modes(&self, f: impl Fn(usize, [Complex64; 3]) -> [Complex64; 3]) -> Self {
        Self::from_modes(self.grid, |idx| f(idx, self.coeff(idx)))
    }

    /// Zeroes every mode outside the dealiasing sphere.
    pub fn dealiased(&self) -> Self {
        let grid = self.grid;
        self.map_modes(|idx, v| if grid.is_retained(idx) { v } else { [ZERO; 3] })
    }

    /// Largest Hermitian-symmetry defect `|u_hat(-k) - conj(u_hat(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for idx in 0..g.len() {
            let k = g.mode(idx);
            if let Some(j) = g.index_of([-k[0], -k[1], -k[2]]) {
                for c in 0..3 {
                    worst = worst.max((self.comps[c][j] - self.comps[c][idx].conj()).norm());
                }
            }
        }
        worst
    }

    /// Largest `|xi . u_hat(xi)|` over all modes.
    pub fn max_divergence(&self) -> f64 {
        let g = self.grid;
        (0..g.len())
            .map(|idx| {
                let xi = g.xi(idx);
                let v = self.coeff(idx);
                (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Mode indices carrying a coefficient above `threshold` in magnitude.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&i| mode_norm(&self.coeff(i)) > threshold)
            .collect()
    }

    /// Forward transform of real samples.
    pub fn forward(samples: &VectorSamples) -> Self {
        let grid = samples.grid;
        let comps = std::array::from_fn(|c| forward_scalar(&grid, &samples.comps[c]));
        Self { grid, comps }
    }

    /// Forward transform with an explicit resolution check.
    pub fn forward_on(grid: &GridSpec, samples: &VectorSamples) -> Result<Self> {
        grid.check_same(&samples.grid)?;
        Ok(Self::forward(samples))
    }

    /// Inverse transform to real samples (imaginary round-off dropped).
    pub fn inverse(&self) -> VectorSamples {
        let comps = std::array::from_fn(|c| inverse_scalar(&self.grid, &self.comps[c]));
        VectorSamples { grid: self.grid, comps }
    }
}

#[inline]
pub(crate) fn mode_norm(v: &[Complex64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// `(-1)^(i0+i1+i2)`: phase shift from the box origin sitting at `-L_box`.
#[inline]
fn origin_sign(grid: &GridSpec, idx: usize) -> f64 {
    let [a, b, c] = grid.split(idx);
    if (a + b + c) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn forward_scalar(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft3(&mut data, grid.n(), Direction::Forward);
    let inv_len = 1.0 / grid.len() as f64;
    data.par_iter_mut()
        .enumerate()
        .for_each(|(idx, z)| *z *= inv_len * origin_sign(grid, idx));
    data
}

pub(crate) fn forward_complex(grid: &GridSpec, samples: Vec<Complex64>) -> Vec<Complex64> {
    let mut data = samples;
    fft3(&mut data, grid.n(), Direction::Forward);
    let inv_len = 1.0 / grid.len() as f64;
    data.par_iter_mut()
        .enumerate()
        .for_each(|(idx, z)| *z *= inv_len * origin_sign(grid, idx));
    data
}

pub(crate) fn inverse_complex(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = coeffs
        .par_iter()
        .enumerate()
        .map(|(idx, z)| z * origin_sign(grid, idx))
        .collect();
    fft3(&mut data, grid.n(), Direction::Inverse);
    data
}

pub(crate) fn inverse_scalar(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<f64> {
    inverse_complex(grid, coeffs).into_iter().map(|z| z.re).collect()
}

/// Scalar periodic field in Fourier coefficients (pressure).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Gradient `i xi p_hat`.
    pub fn gradient(&self) -> SpectralField {
        let g = self.grid;
        SpectralField::from_modes(g, |idx| {
            let xi = g.xi(idx);
            let p = self.coeffs[idx] * Complex64::i();
            [p * xi[0], p * xi[1], p * xi[2]]
        })
    }

    pub fn inverse(&self) -> Vec<f64> {
        inverse_scalar(&self.grid, &self.coeffs)
    }
}
