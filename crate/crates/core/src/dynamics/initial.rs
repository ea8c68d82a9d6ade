use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::{leray_project, norm, GridSpec, NormKind, SpectralField};

fn default_slope() -> f64 {
    -2.0
}

/// Random divergence-free initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Target `||u0||^2`.
    pub energy: f64,
    /// Shell energy grows like `|xi|^slope`.
    #[serde(default = "default_slope")]
    pub slope: f64,
    /// Highest excited `|xi|`, as a multiple of `delta_kappa`.
    pub max_shell: f64,
}

/// Gaussian coefficients on `0 < |xi| <= max_shell delta_kappa` with shell
/// energy `~ |xi|^slope`, Hermitian-symmetrized, projected and rescaled to
/// the target energy. The same seed always yields the same field.
pub fn random_initial(grid: &GridSpec, spec: &InitialSpec, seed: u64) -> Result<SpectralField> {
    grid.validate()?;
    if !(spec.energy >= 0.0 && spec.energy.is_finite()) {
        return Err(LabError::Param("initial energy must be nonnegative".into()));
    }
    if !(spec.max_shell >= 1.0) {
        return Err(LabError::Param("initial data needs max_shell >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dk = grid.delta_kappa();
    let kmax = spec.max_shell * dk;
    let mut raw = SpectralField::zeros(*grid);
    for idx in 1..grid.len() {
        let r = grid.xi_norm(idx);
        let active = r <= kmax * (1.0 + 1e-12) && grid.is_retained(idx);
        let mut c = [Complex64::new(0.0, 0.0); 3];
        for z in c.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z = Complex64::new(re, im);
        }
        if active {
            // Shell area grows like r^2, so per-mode amplitude ~ r^{(slope-2)/2}.
            let amp = (r / dk).powf(0.5 * (spec.slope - 2.0));
            raw.set_coeff(idx, [c[0] * amp, c[1] * amp, c[2] * amp]);
        }
    }
    let sym = SpectralField::from_modes(*grid, |idx| {
        let k = grid.mode(idx);
        let a = raw.coeff(idx);
        match grid.index_of([-k[0], -k[1], -k[2]]) {
            Some(j) => {
                let b = raw.coeff(j);
                std::array::from_fn(|c| 0.5 * (a[c] + b[c].conj()))
            }
            None => [Complex64::new(0.0, 0.0); 3],
        }
    });
    let u = leray_project(&sym);
    let e = norm(&u, NormKind::L2)?.powi(2);
    if spec.energy == 0.0 {
        return Ok(SpectralField::zeros(*grid));
    }
    if e == 0.0 {
        return Err(LabError::Param("no lattice mode available for the initial data".into()));
    }
    Ok(u.scale((spec.energy / e).sqrt()))
}
