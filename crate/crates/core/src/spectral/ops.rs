//! Projectors and the quadratic term.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{forward_complex, inverse_complex, mode_norm, SpectralField};
use super::grid::GridSpec;
use crate::error::{LabError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Leray projector `Id - xi xi^T / |xi|^2`; the zero mode is cleared.
pub fn leray_project(v: &SpectralField) -> SpectralField {
    let g = v.grid;
    v.map_modes(|idx, c| {
        if idx == 0 {
            return [ZERO; 3];
        }
        let xi = g.xi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let dot = (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]) / k2;
        [c[0] - dot * xi[0], c[1] - dot * xi[1], c[2] - dot * xi[2]]
    })
}

/// Gradient part `xi xi^T / |xi|^2 v`, the complement of [`leray_project`].
pub fn gradient_part(v: &SpectralField) -> SpectralField {
    let g = v.grid;
    v.map_modes(|idx, c| {
        if idx == 0 {
            return [ZERO; 3];
        }
        let xi = g.xi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let dot = (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]) / k2;
        [dot * xi[0], dot * xi[1], dot * xi[2]]
    })
}

/// Closed annulus `rho1/ell0 <= |xi| <= rho2/ell0` on the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(ell0: f64, rho1: f64, rho2: f64) -> Result<Self> {
        if !(ell0 > 0.0) {
            return Err(LabError::Param(format!("ell0 must be positive, got {ell0}")));
        }
        if !(rho1 > 0.0 && rho1 < rho2) {
            return Err(LabError::Param(format!(
                "annulus bounds need 0 < rho1 < rho2, got rho1 = {rho1}, rho2 = {rho2}"
            )));
        }
        Ok(Self {
            lo: rho1 / ell0,
            hi: rho2 / ell0,
        })
    }

    #[inline]
    pub fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }

    /// Lattice modes inside the annulus.
    pub fn modes(&self, grid: &GridSpec) -> Vec<usize> {
        (0..grid.len()).filter(|&i| self.contains(grid.xi_norm(i))).collect()
    }

    pub fn check_populated(&self, grid: &GridSpec) -> Result<()> {
        if self.modes(grid).is_empty() {
            Err(LabError::EmptyBand {
                lo: self.lo,
                hi: self.hi,
            })
        } else {
            Ok(())
        }
    }
}

/// Keeps the modes inside the annulus, zeroes the rest.
pub fn band_project(v: &SpectralField, ell0: f64, rho1: f64, rho2: f64) -> Result<SpectralField> {
    let band = Band::new(ell0, rho1, rho2)?;
    band.check_populated(&v.grid)?;
    Ok(apply_band(v, &band))
}

pub(crate) fn apply_band(v: &SpectralField, band: &Band) -> SpectralField {
    let g = v.grid;
    v.map_modes(|idx, c| if band.contains(g.xi_norm(idx)) { c } else { [ZERO; 3] })
}

/// Index of the mode `-k` for every flat index.
fn negated_index(grid: &GridSpec, idx: usize) -> usize {
    let n = grid.n();
    let [a, b, c] = grid.split(idx);
    grid.flat([(n - a) % n, (n - b) % n, (n - c) % n])
}

/// Real physical samples of each component, two components per complex FFT.
pub(crate) fn physical_components(u: &SpectralField) -> [Vec<f64>; 3] {
    let g = u.grid;
    let packed: Vec<Complex64> = u.comps[0]
        .iter()
        .zip(&u.comps[1])
        .map(|(a, b)| a + Complex64::i() * b)
        .collect();
    let xy = inverse_complex(&g, &packed);
    let z = inverse_complex(&g, &u.comps[2]);
    [
        xy.iter().map(|w| w.re).collect(),
        xy.iter().map(|w| w.im).collect(),
        z.iter().map(|w| w.re).collect(),
    ]
}

/// Forward transforms of real arrays, packed two per complex FFT.
pub(crate) fn spectral_of_real(grid: &GridSpec, arrays: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let n = grid.len();
    let mut out = Vec::with_capacity(arrays.len());
    let mut iter = arrays.chunks(2);
    for pair in &mut iter {
        if pair.len() == 2 {
            let packed: Vec<Complex64> = pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            let z = forward_complex(grid, packed);
            let (a, b): (Vec<Complex64>, Vec<Complex64>) = (0..n)
                .into_par_iter()
                .map(|idx| {
                    let zk = z[idx];
                    let zm = z[negated_index(grid, idx)].conj();
                    ((zk + zm) * 0.5, (zk - zm) * Complex64::new(0.0, -0.5))
                })
                .unzip();
            out.push(a);
            out.push(b);
        } else {
            let packed: Vec<Complex64> = pair[0].iter().map(|&a| Complex64::new(a, 0.0)).collect();
            out.push(forward_complex(grid, packed));
        }
    }
    out
}

/// Fraction of the squared coefficient mass lying outside the dealiasing sphere.
pub(crate) fn unresolved_fraction(u: &SpectralField) -> f64 {
    let g = u.grid;
    let mut outside = 0.0;
    let mut total = 0.0;
    for idx in 0..g.len() {
        let m = mode_norm(&u.coeff(idx)).powi(2);
        total += m;
        if !g.is_retained(idx) {
            outside += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

fn warn_if_unresolved(u: &SpectralField, name: &str) {
    let frac = unresolved_fraction(u);
    if frac > 1e-24 {
        log::warn!(
            "quadratic term: input {name} carries {frac:.3e} of its mass beyond the dealiasing cutoff; the product will alias"
        );
    }
}

/// Dealiased `div(u (x) v)` with components `sum_j d_j (u_j v_i)`.
pub fn tensor_divergence(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let g = u.grid;
    warn_if_unresolved(u, "u");
    warn_if_unresolved(v, "v");
    let pu = physical_components(u);
    let same = std::ptr::eq(u, v) || u == v;
    // products[i][j] = u_j v_i
    let tensor: Vec<Vec<Complex64>> = if same {
        let mut prods = Vec::with_capacity(6);
        for i in 0..3 {
            for j in i..3 {
                prods.push(pu[i].iter().zip(&pu[j]).map(|(a, b)| a * b).collect::<Vec<f64>>());
            }
        }
        let spec = spectral_of_real(&g, &prods);
        let mut full = vec![Vec::new(); 9];
        let mut k = 0;
        for i in 0..3 {
            for j in i..3 {
                full[i * 3 + j] = spec[k].clone();
                full[j * 3 + i] = spec[k].clone();
                k += 1;
            }
        }
        full
    } else {
        let pv = physical_components(v);
        let mut prods = Vec::with_capacity(9);
        for vi in &pv {
            for uj in &pu {
                prods.push(uj.iter().zip(vi).map(|(a, b)| a * b).collect::<Vec<f64>>());
            }
        }
        spectral_of_real(&g, &prods)
    };
    divergence_of_tensor(&g, |i, j, idx| tensor[i * 3 + j][idx])
}

fn divergence_of_tensor(g: &GridSpec, t: impl Fn(usize, usize, usize) -> Complex64) -> SpectralField {
    SpectralField::from_modes(*g, |idx| {
        if !g.is_retained(idx) {
            return [ZERO; 3];
        }
        let xi = g.xi(idx);
        std::array::from_fn(|i| Complex64::i() * (t(i, 0, idx) * xi[0] + t(i, 1, idx) * xi[1] + t(i, 2, idx) * xi[2]))
    })
}

/// Projected quadratic term `P div(u (x) u)`.
pub fn nonlinear_term(u: &SpectralField) -> SpectralField {
    leray_project(&tensor_divergence(u, u))
}

fn inverse_laplacian_project(w: &SpectralField, nu: f64) -> SpectralField {
    let g = w.grid;
    let projected = leray_project(w);
    projected.map_modes(|idx, c| {
        if idx == 0 {
            return [ZERO; 3];
        }
        let s = -1.0 / (nu * g.xi_norm_sq(idx));
        [c[0] * s, c[1] * s, c[2] * s]
    })
}

/// Bilinear form `B(u, v) = (1/nu) P Delta^{-1} div(u (x) v)`, pseudo-spectral.
pub fn bilinear_b(u: &SpectralField, v: &SpectralField, nu: f64) -> SpectralField {
    inverse_laplacian_project(&tensor_divergence(u, v), nu)
}

/// Same form as [`bilinear_b`], evaluated by direct convolution over the
/// nonzero coefficients. Supports stay exact: no round-off leaks into
/// modes outside `supp(u_hat) + supp(v_hat)`. Output is restricted to the
/// dealiasing sphere.
pub fn bilinear_b_exact(u: &SpectralField, v: &SpectralField, nu: f64) -> SpectralField {
    inverse_laplacian_project(&tensor_divergence_exact(u, v), nu)
}

/// Direct-convolution version of [`tensor_divergence`].
pub fn tensor_divergence_exact(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let g = u.grid;
    let su: Vec<(usize, [i64; 3])> = u.support(0.0).into_iter().map(|i| (i, g.mode(i))).collect();
    let sv: Vec<(usize, [i64; 3])> = v.support(0.0).into_iter().map(|i| (i, g.mode(i))).collect();
    // t[idx][i][j] = sum over eta of u_j(eta) v_i(xi - eta)
    let mut t: Vec<[[Complex64; 3]; 3]> = vec![[[ZERO; 3]; 3]; g.len()];
    for &(iu, ku) in &su {
        let cu = u.coeff(iu);
        for &(iv, kv) in &sv {
            let k = [ku[0] + kv[0], ku[1] + kv[1], ku[2] + kv[2]];
            let Some(idx) = g.index_of(k) else { continue };
            if !g.is_retained(idx) {
                continue;
            }
            let cv = v.coeff(iv);
            let slot = &mut t[idx];
            for i in 0..3 {
                for j in 0..3 {
                    slot[i][j] += cu[j] * cv[i];
                }
            }
        }
    }
    divergence_of_tensor(&g, |i, j, idx| t[idx][i][j])
}

/// `<u, v>_{L^2} = |box| sum Re(u_hat . conj(v_hat))`.
pub fn inner_product(u: &SpectralField, v: &SpectralField) -> f64 {
    let g = u.grid;
    let mut acc = 0.0;
    for c in 0..3 {
        for (a, b) in u.comps[c].iter().zip(&v.comps[c]) {
            acc += (a * b.conj()).re;
        }
    }
    acc * g.volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::VectorSamples;

    fn grid() -> GridSpec {
        GridSpec::new(std::f64::consts::PI, 16).unwrap()
    }

    #[test]
    fn gradient_is_annihilated() {
        let g = grid();
        // grad(sin x1) = (cos x1, 0, 0)
        let s = VectorSamples::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]);
        let p = leray_project(&SpectralField::forward(&s));
        assert!(p.max_abs() < 1e-15);
    }

    #[test]
    fn shear_is_fixed() {
        let g = grid();
        let u = SpectralField::forward(&VectorSamples::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]));
        let p = leray_project(&u);
        assert!(p.sub(&u).max_abs() < 1e-15);
    }

    #[test]
    fn shear_self_interaction_vanishes() {
        let g = grid();
        let u = SpectralField::forward(&VectorSamples::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]));
        assert!(bilinear_b(&u, &u, 1.0).max_abs() < 1e-15);
        let zero = SpectralField::zeros(g);
        assert!(bilinear_b(&zero, &u, 1.0).is_zero());
    }

    #[test]
    fn empty_band_is_signalled() {
        let g = GridSpec::new(1.0, 8).unwrap();
        let u = SpectralField::zeros(g);
        // delta_kappa = pi, nothing between 0.1 and 0.2
        assert!(matches!(
            band_project(&u, 1.0, 0.1, 0.2),
            Err(LabError::EmptyBand { .. })
        ));
        assert!(band_project(&u, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn packed_forward_matches_plain() {
        let g = GridSpec::new(1.3, 8).unwrap();
        let a: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.3).sin()).collect();
        let b: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.7).cos()).collect();
        let packed = spectral_of_real(&g, &[a.clone(), b.clone()]);
        let plain_a = super::super::field::forward_scalar(&g, &a);
        let plain_b = super::super::field::forward_scalar(&g, &b);
        for idx in 0..g.len() {
            assert!((packed[0][idx] - plain_a[idx]).norm() < 1e-15);
            assert!((packed[1][idx] - plain_b[idx]).norm() < 1e-15);
        }
    }
}
