//! Frequency-localized, divergence-free external forces built from lattice
//! translates of a band-limited vector profile.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature;
use crate::spectral::{norm, Band, GridSpec, Multiplier, NormKind, SpectralField};

fn default_rho1() -> f64 {
    1.0
}

fn default_rho2() -> f64 {
    2.0
}

/// Physical parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Damping rate; zero selects the classical equations.
    pub alpha: f64,
    /// Injection scale.
    pub ell0: f64,
    /// Characteristic length, at least `ell0`.
    pub length: f64,
    /// Force amplitude.
    pub force: f64,
    #[serde(default = "default_rho1")]
    pub rho1: f64,
    #[serde(default = "default_rho2")]
    pub rho2: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, msg: &str| {
            if c {
                Ok(())
            } else {
                Err(LabError::Param(msg.to_string()))
            }
        };
        ok(self.nu > 0.0 && self.nu.is_finite(), "nu must be positive")?;
        ok(self.alpha >= 0.0 && self.alpha.is_finite(), "alpha must be nonnegative")?;
        ok(self.ell0 > 0.0 && self.ell0.is_finite(), "ell0 must be positive")?;
        ok(
            self.length >= self.ell0 && self.length.is_finite(),
            "characteristic length L must satisfy L >= ell0",
        )?;
        ok(
            self.force >= 0.0 && self.force.is_finite(),
            "force amplitude must be nonnegative",
        )?;
        ok(
            self.rho1 > 0.0 && self.rho1 < self.rho2 && self.rho2.is_finite(),
            "annulus bounds need 0 < rho1 < rho2",
        )
    }

    pub fn band(&self) -> Result<Band> {
        Band::new(self.ell0, self.rho1, self.rho2)
    }
}

/// Direction pattern of the profile before projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `P(xi) e` for a fixed vector `e`.
    Uniform([f64; 3]),
    /// `i xi x e / |xi|`, divergence-free before projection.
    Swirl([f64; 3]),
}

impl Default for Orientation {
    fn default() -> Self {
        Orientation::Uniform([1.0, 0.0, 0.0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceSpec {
    pub params: PhysicalParams,
    #[serde(default)]
    pub orientation: Orientation,
}

impl ForceSpec {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            orientation: Orientation::default(),
        }
    }
}

/// Smooth bump `exp(-1 / (1 - t^2))` rescaled onto `[rho1, rho2]`.
pub fn bump_profile(r: f64, rho1: f64, rho2: f64) -> f64 {
    if r <= rho1 || r >= rho2 {
        return 0.0;
    }
    let t = (2.0 * r - rho1 - rho2) / (rho2 - rho1);
    (-1.0 / (1.0 - t * t)).exp()
}

/// `4 pi int r^2 chi(r) dr`, the integral of the radial profile over R^3.
fn profile_mass(rho1: f64, rho2: f64) -> Result<f64> {
    quadrature::integrate(
        |r| 4.0 * std::f64::consts::PI * r * r * bump_profile(r, rho1, rho2),
        rho1,
        rho2,
        1e-15,
        1e-13,
    )
}

/// Integer translates `k` with `|ell0 k| <= L`.
pub fn lattice_points(params: &PhysicalParams) -> Result<Vec<[i64; 3]>> {
    params.validate()?;
    let rmax = params.length / params.ell0;
    let tol = 1e-12 * rmax;
    let m = rmax.floor() as i64 + 1;
    let mut pts = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let r = ((a * a + b * b + c * c) as f64).sqrt();
                if r <= rmax + tol {
                    pts.push([a, b, c]);
                }
            }
        }
    }
    Ok(pts)
}

fn check_lattice(params: &PhysicalParams, grid: &GridSpec) -> Result<()> {
    let ratio = grid.box_half_side / params.ell0;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
        return Err(LabError::Lattice(format!(
            "box half-side {} is not an integer multiple of ell0 = {}",
            grid.box_half_side, params.ell0
        )));
    }
    if params.length >= grid.box_half_side {
        return Err(LabError::Lattice(format!(
            "translates up to L = {} do not fit in the box of half-side {}",
            params.length, grid.box_half_side
        )));
    }
    Ok(())
}

/// Builds the force `F sum_k phi(x/ell0 - k)` on the grid.
///
/// Coefficients are `F (ell0 dk)^3 / Z * chi(ell0 |xi|) * d(xi) * S(xi)`
/// where `Z` normalizes the profile so that its physical peak scale is
/// one, `d` is the projected orientation and `S = sum_k cos(ell0 xi . k)`
/// is the lattice phase sum.
pub fn build_force(spec: &ForceSpec, grid: &GridSpec) -> Result<SpectralField> {
    let p = &spec.params;
    p.validate()?;
    grid.validate()?;
    check_lattice(p, grid)?;
    let band = p.band()?;
    let lattice = lattice_points(p)?;
    let z = profile_mass(p.rho1, p.rho2)?;
    let scale = p.force * (p.ell0 * grid.delta_kappa()).powi(3) / z;

    let mut populated = false;
    let mut f = SpectralField::zeros(*grid);
    for idx in 0..grid.len() {
        let r = grid.xi_norm(idx);
        if !band.contains(r) {
            continue;
        }
        let chi = bump_profile(p.ell0 * r, p.rho1, p.rho2);
        if chi == 0.0 {
            continue;
        }
        if !grid.is_retained(idx) {
            return Err(LabError::Grid(format!(
                "force annulus reaches |xi| = {r:.4}, beyond the dealiasing cutoff {:.4}",
                grid.kappa_max()
            )));
        }
        populated = true;
        let xi = grid.xi(idx);
        let dir: [Complex64; 3] = match spec.orientation {
            Orientation::Uniform(e) => {
                let dot = (e[0] * xi[0] + e[1] * xi[1] + e[2] * xi[2]) / (r * r);
                std::array::from_fn(|i| Complex64::new(e[i] - dot * xi[i], 0.0))
            }
            Orientation::Swirl(e) => {
                let c = [
                    xi[1] * e[2] - xi[2] * e[1],
                    xi[2] * e[0] - xi[0] * e[2],
                    xi[0] * e[1] - xi[1] * e[0],
                ];
                std::array::from_fn(|i| Complex64::new(0.0, c[i] / r))
            }
        };
        let k = grid.mode(idx);
        let phase: f64 = lattice
            .iter()
            .map(|m| {
                let dot = (k[0] * m[0] + k[1] * m[1] + k[2] * m[2]) as f64;
                (p.ell0 * grid.delta_kappa() * dot).cos()
            })
            .sum();
        let amp = scale * chi * phase;
        f.set_coeff(idx, [dir[0] * amp, dir[1] * amp, dir[2] * amp]);
    }
    if !populated {
        return Err(LabError::EmptyBand {
            lo: band.lo,
            hi: band.hi,
        });
    }
    // Lattice modes on the annulus edge or along the orientation vector
    // carry nothing; a force that vanishes for F > 0 is still empty.
    if p.force > 0.0 && f.is_zero() {
        return Err(LabError::EmptyBand {
            lo: band.lo,
            hi: band.hi,
        });
    }
    Ok(f)
}

/// One row of the norm-equivalence audit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRatio {
    pub s: f64,
    pub p: f64,
    /// `||(-Delta)^s f||_{L^p} / (F L^{3/p} ell0^{-2s})`.
    pub ratio: f64,
}

/// Ratios of `||(-Delta)^s f||_{L^p}` to `F L^{3/p} ell0^{-2s}`.
pub fn audit_norm_equivalence(
    spec: &ForceSpec,
    grid: &GridSpec,
    s_values: &[f64],
    p_values: &[f64],
) -> Result<Vec<NormRatio>> {
    let f = build_force(spec, grid)?;
    let p = &spec.params;
    let mut rows = Vec::with_capacity(s_values.len() * p_values.len());
    for &s in s_values {
        let fs = Multiplier::FractionalLaplacian(s).apply(&f)?;
        for &pp in p_values {
            let n = norm(&fs, NormKind::Lp(pp))?;
            let scale = p.force * p.length.powf(3.0 / pp) * p.ell0.powf(-2.0 * s);
            rows.push(NormRatio {
                s,
                p: pp,
                ratio: n / scale,
            });
        }
    }
    Ok(rows)
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=3.0).contains(&theta) {
        Ok(())
    } else {
        Err(LabError::Param(format!(
            "Grashof exponent theta = {theta} outside [0, 3]"
        )))
    }
}

/// `G_theta = F L^theta ell0^{3 - theta} / nu^2`.
pub fn grashof(params: &PhysicalParams, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(params.force * params.length.powf(theta) * params.ell0.powf(3.0 - theta) / params.nu.powi(2))
}

/// `||(-Delta)^s f||_{L^p} / nu^2` with `3/p = theta` and `-2s = 3 - theta`.
pub fn grashof_from_force(f: &SpectralField, params: &PhysicalParams, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let s = (theta - 3.0) / 2.0;
    let p = if theta == 0.0 { f64::INFINITY } else { 3.0 / theta };
    let fs = Multiplier::FractionalLaplacian(s).apply(f)?;
    Ok(norm(&fs, NormKind::Lp(p))? / params.nu.powi(2))
}

/// `L^2` norm of `f` restricted to the complement of `[-mu L, mu L]^3`,
/// one value per `mu`.
pub fn spatial_concentration(f: &SpectralField, grid: &GridSpec, length: f64, mus: &[f64]) -> Result<Vec<f64>> {
    f.check_grid(grid)?;
    for &mu in mus {
        if !(mu >= 1.0) {
            return Err(LabError::Param(format!("concentration radius mu = {mu} below 1")));
        }
        if mu * length > grid.box_half_side * (1.0 + 1e-12) {
            return Err(LabError::Param(format!(
                "mu L = {} exceeds the box half-side {}",
                mu * length,
                grid.box_half_side
            )));
        }
    }
    let samples = f.inverse();
    let mag = samples.magnitude();
    let h3 = grid.spacing().powi(3);
    let sup_norms: Vec<f64> = (0..grid.len())
        .map(|i| grid.position(i).iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .collect();
    Ok(mus
        .iter()
        .map(|&mu| {
            let cut = mu * length;
            let mass: f64 = mag
                .iter()
                .zip(&sup_norms)
                .filter(|(_, &r)| r > cut)
                .fold(0.0, |acc, (m, _)| acc + m * m);
            (mass * h3).sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysicalParams {
        PhysicalParams {
            nu: 1.0,
            alpha: 1.0,
            ell0: 1.0,
            length: 1.0,
            force: 1.0,
            rho1: 1.0,
            rho2: 2.0,
        }
    }

    #[test]
    fn lattice_of_unit_ratio_has_seven_points() {
        assert_eq!(lattice_points(&params()).unwrap().len(), 7);
        let mut p = params();
        p.length = 0.5;
        assert!(lattice_points(&p).is_err());
    }

    #[test]
    fn zero_amplitude_gives_zero_field() {
        let mut p = params();
        p.force = 0.0;
        let g = GridSpec::new(2.0, 16).unwrap();
        assert!(build_force(&ForceSpec::new(p), &g).unwrap().is_zero());
    }

    #[test]
    fn box_must_hold_the_lattice() {
        let g = GridSpec::new(2.5, 16).unwrap();
        assert!(matches!(
            build_force(&ForceSpec::new(params()), &g),
            Err(LabError::Lattice(_))
        ));
        let mut p = params();
        p.length = 2.0;
        let g = GridSpec::new(2.0, 16).unwrap();
        assert!(matches!(build_force(&ForceSpec::new(p), &g), Err(LabError::Lattice(_))));
    }

    #[test]
    fn empty_annulus_is_an_error() {
        let mut p = params();
        // Between the first two shells |xi| = pi/2 and pi/sqrt(2).
        p.rho1 = 1.6;
        p.rho2 = 2.2;
        let g = GridSpec::new(2.0, 16).unwrap();
        assert!(matches!(
            build_force(&ForceSpec::new(p), &g),
            Err(LabError::EmptyBand { .. })
        ));
    }

    #[test]
    fn force_is_real_solenoidal_and_banded() {
        let g = GridSpec::new(4.0, 16).unwrap();
        let mut p = params();
        p.length = 2.0;
        for orientation in [
            Orientation::Uniform([1.0, 0.3, -0.2]),
            Orientation::Swirl([0.0, 0.0, 1.0]),
        ] {
            let f = build_force(&ForceSpec { params: p, orientation }, &g).unwrap();
            assert!(!f.is_zero());
            assert!(f.hermitian_defect() < 1e-15 * f.max_abs());
            assert!(f.max_divergence() <= 1e-12 * f.max_abs());
            for idx in f.support(0.0) {
                let r = g.xi_norm(idx);
                assert!((1.0..=2.0).contains(&r));
            }
        }
    }

    #[test]
    fn grashof_examples() {
        let p = params();
        for th in [0.0, 0.5, 1.5, 3.0] {
            assert_eq!(grashof(&p, th).unwrap(), 1.0);
        }
        let mut q = p;
        q.length = 2.0;
        assert_eq!(grashof(&q, 0.0).unwrap(), 1.0);
        assert_eq!(grashof(&q, 3.0).unwrap(), 8.0);
        assert!((grashof(&q, 1.5).unwrap() - 2f64.powf(1.5)).abs() < 1e-15);
        assert!(grashof(&q, 3.5).is_err());
    }

    #[test]
    fn concentration_vanishes_on_whole_box() {
        let g = GridSpec::new(2.0, 16).unwrap();
        let f = build_force(&ForceSpec::new(params()), &g).unwrap();
        let v = spatial_concentration(&f, &g, 1.0, &[1.0, 2.0]).unwrap();
        assert_eq!(v[1], 0.0);
        assert!(v[0] <= norm(&f, NormKind::L2).unwrap());
        assert!(spatial_concentration(&f, &g, 1.0, &[2.5]).is_err());
    }
}
