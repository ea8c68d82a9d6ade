use serde::Serialize;

use super::evolver::{evolve_observed, EvolverConfig};
use super::initial::{random_initial, InitialSpec};
use crate::error::{LabError, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::spectral::{norm, NormKind, SpectralField};
use crate::stationary::stationary_residual;

/// Decay of one perturbed trajectory toward the stationary state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRun {
    pub seed: u64,
    pub initial_distance_sq: f64,
    /// Minus the slope of `ln ||u(t) - U*||^2` over the second half of the run.
    pub rate: f64,
    pub fit: LinearFit,
    /// `max_t ||v(t)||^2 - ||v(0)||^2 exp(-2 alpha t)`.
    pub envelope_margin: f64,
    pub final_distance_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stationary_residual: f64,
    pub u_star_l3: f64,
    pub nu: f64,
    /// `||U*||_{L^3} < nu`.
    pub hypothesis_holds: bool,
    pub runs: Vec<StabilityRun>,
}

/// Relative floor below which squared distances are round-off.
const DISTANCE_FLOOR: f64 = 1e-26;

/// Evolves `U* + v0` for random perturbations `v0` and fits the decay of
/// the squared distance to `U*`.
///
/// `u_star` must satisfy the stationary equations to `residual_tol`
/// (relative, `Hdot^-1`), otherwise it is rejected.
pub fn stability_experiment(
    u_star: &SpectralField,
    f: &SpectralField,
    seeds: &[u64],
    perturbation: &InitialSpec,
    cfg: &EvolverConfig,
    residual_tol: f64,
) -> Result<StabilityReport> {
    let p = cfg.params;
    let residual = stationary_residual(u_star, f, p.nu, p.alpha)?;
    if !(residual <= residual_tol) {
        return Err(LabError::Param(format!(
            "stationary state not converged: residual {residual:e} above {residual_tol:e}"
        )));
    }
    let l3 = norm(u_star, NormKind::Lp(3.0))?;
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let v0 = random_initial(&cfg.grid, perturbation, seed)?;
        let u0 = u_star.add(&v0);
        let mut times = Vec::new();
        let mut dist = Vec::new();
        evolve_observed(&u0, f, cfg, |t, u| {
            times.push(t);
            dist.push(norm(&u.sub(u_star), NormKind::L2).map(|d| d * d).unwrap_or(f64::NAN));
        })?;
        let d0 = dist[0];
        let envelope_margin = times
            .iter()
            .zip(&dist)
            .map(|(t, d)| d - d0 * (-2.0 * p.alpha * t).exp())
            .fold(f64::NEG_INFINITY, f64::max);
        let t_half = 0.5 * times.last().copied().unwrap_or(0.0);
        let (xs, ys): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(&dist)
            .filter(|(t, d)| **t >= t_half && **d > DISTANCE_FLOOR * d0)
            .map(|(t, d)| (*t, d.ln()))
            .unzip();
        if xs.len() < 3 {
            return Err(LabError::InsufficientData(format!(
                "seed {seed}: only {} samples above the round-off floor in the second half",
                xs.len()
            )));
        }
        let fit = linear_fit(&xs, &ys)?;
        runs.push(StabilityRun {
            seed,
            initial_distance_sq: d0,
            rate: -fit.slope,
            fit,
            envelope_margin,
            final_distance_sq: *dist.last().expect("nonempty"),
        });
    }
    Ok(StabilityReport {
        stationary_residual: residual,
        u_star_l3: l3,
        nu: p.nu,
        hypothesis_holds: l3 < p.nu,
        runs,
    })
}
