use serde::{Deserialize, Serialize};

use super::diagnostics::{DiagnosticsRecord, StepSample};
use crate::error::{LabError, Result};
use crate::forcing::PhysicalParams;
use crate::spectral::{nonlinear_term, norm, GridSpec, NormKind, SpectralField};

/// Explicit part of the integrating-factor scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Lawson-Heun, second order.
    Rk2,
    /// Classical Lawson Runge-Kutta, fourth order.
    Rk4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Rk2 => 2,
            Scheme::Rk4 => 4,
        }
    }
}

fn default_window_start() -> f64 {
    0.5
}

fn default_adaptive() -> bool {
    true
}

/// Largest admissible `dt max|u| (N/2) delta_kappa`.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverConfig {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Keep a snapshot every this many steps; `None` keeps none.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    /// Start of the averaging range as a fraction of `t_end`.
    #[serde(default = "default_window_start")]
    pub window_start_fraction: f64,
    /// Halve `dt` on CFL violation; when false the violation is an error.
    #[serde(default = "default_adaptive")]
    pub adaptive: bool,
}

impl EvolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LabError::Param(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(LabError::Param(format!(
                "final time must be nonnegative, got {}",
                self.t_end
            )));
        }
        if !(0.0..1.0).contains(&self.window_start_fraction) {
            return Err(LabError::Param("window start fraction must lie in [0, 1)".into()));
        }
        if self.snapshot_every == Some(0) {
            return Err(LabError::Param("snapshot cadence must be at least one step".into()));
        }
        Ok(())
    }
}

/// `exp(-(nu |xi|^2 + alpha) h)` for every mode.
fn decay_factors(grid: &GridSpec, params: &PhysicalParams, h: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| (-(params.nu * grid.xi_norm_sq(idx) + params.alpha) * h).exp())
        .collect()
}

fn apply_factors(u: &SpectralField, e: &[f64]) -> SpectralField {
    u.map_modes(|idx, c| [c[0] * e[idx], c[1] * e[idx], c[2] * e[idx]])
}

/// `-P div(u (x) u) + f`.
fn rhs(u: &SpectralField, f: &SpectralField) -> SpectralField {
    f.axpy(-1.0, &nonlinear_term(u))
}

/// Courant number `dt max|u| (N/2) delta_kappa`.
pub fn courant(u: &SpectralField, dt: f64) -> f64 {
    let g = u.grid;
    let umax = u.inverse().max_magnitude();
    dt * umax * (g.n() / 2) as f64 * g.delta_kappa()
}

/// One integrating-factor step of size `h`, without CFL control.
pub fn step_raw(
    u: &SpectralField,
    f: &SpectralField,
    params: &PhysicalParams,
    scheme: Scheme,
    h: f64,
) -> Result<SpectralField> {
    let g = u.grid;
    let e1 = decay_factors(&g, params, h);
    let out = match scheme {
        Scheme::Rk2 => {
            let k1 = rhs(u, f);
            let pred = apply_factors(&u.axpy(h, &k1), &e1);
            let k2 = rhs(&pred, f);
            apply_factors(&u.axpy(0.5 * h, &k1), &e1).axpy(0.5 * h, &k2)
        }
        Scheme::Rk4 => {
            let eh = decay_factors(&g, params, 0.5 * h);
            let k1 = rhs(u, f);
            let a = apply_factors(&u.axpy(0.5 * h, &k1), &eh);
            let k2 = rhs(&a, f);
            let ue = apply_factors(u, &eh);
            let b = ue.axpy(0.5 * h, &k2);
            let k3 = rhs(&b, f);
            let c = apply_factors(&ue.axpy(h, &k3), &eh);
            let k4 = rhs(&c, f);
            // E(h) u + h/6 (E(h) k1 + 2 E(h/2)(k2 + k3) + k4)
            let mid = apply_factors(&k2.add(&k3), &eh);
            let head = apply_factors(&u.axpy(h / 6.0, &k1), &e1);
            head.axpy(h / 3.0, &mid).axpy(h / 6.0, &k4)
        }
    };
    out.check_finite("time step produced a non-finite coefficient")?;
    Ok(out)
}

/// One step with the configured scheme; rejects steps above the CFL limit.
pub fn step(u: &SpectralField, f: &SpectralField, cfg: &EvolverConfig) -> Result<SpectralField> {
    u.check_grid(&cfg.grid)?;
    f.check_grid(&cfg.grid)?;
    let c = courant(u, cfg.dt);
    if c > CFL_LIMIT {
        return Err(LabError::Cfl { dt: cfg.dt, courant: c });
    }
    step_raw(u, f, &cfg.params, cfg.scheme, cfg.dt)
}

/// Result of [`evolve`].
#[derive(Clone, Debug)]
pub struct Evolution {
    pub final_state: SpectralField,
    pub record: DiagnosticsRecord,
    pub snapshots: Vec<(f64, SpectralField)>,
    /// Step size in force at the end of the run.
    pub final_dt: f64,
}

fn sample(u: &SpectralField, f: &SpectralField, params: &PhysicalParams) -> Result<StepSample> {
    let g = u.grid;
    let band = params.band()?;
    let (mut energy, mut enstrophy, mut injection, mut band_energy) = (0.0, 0.0, 0.0, 0.0);
    for idx in 0..g.len() {
        let c = u.coeff(idx);
        let m = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
        if m == 0.0 {
            continue;
        }
        let r2 = g.xi_norm_sq(idx);
        energy += m;
        enstrophy += r2 * m;
        if band.contains(r2.sqrt()) {
            band_energy += m;
        }
        let d = f.coeff(idx);
        injection += (c[0] * d[0].conj() + c[1] * d[1].conj() + c[2] * d[2].conj()).re;
    }
    let v = g.volume();
    Ok(StepSample {
        energy: energy * v,
        enstrophy: enstrophy * v,
        injection: injection * v,
        band_energy: band_energy * v,
    })
}

/// Integrates from `u0` to `cfg.t_end`, recording diagnostics every step.
///
/// With `cfg.adaptive` the step is halved until the Courant number is
/// admissible (each halving is logged and counted); otherwise a CFL
/// violation aborts the run.
pub fn evolve(u0: &SpectralField, f: &SpectralField, cfg: &EvolverConfig) -> Result<Evolution> {
    evolve_observed(u0, f, cfg, |_, _| {})
}

/// [`evolve`] calling `observer(t, u)` on the initial state and after every step.
pub fn evolve_observed(
    u0: &SpectralField,
    f: &SpectralField,
    cfg: &EvolverConfig,
    mut observer: impl FnMut(f64, &SpectralField),
) -> Result<Evolution> {
    cfg.validate()?;
    u0.check_grid(&cfg.grid)?;
    f.check_grid(&cfg.grid)?;
    u0.check_finite("initial data")?;
    let params = cfg.params;
    let f_hm1_sq = if f.is_zero() {
        0.0
    } else {
        norm(f, NormKind::Hdot(-1.0))?.powi(2)
    };
    let mut record = DiagnosticsRecord::new(params, f_hm1_sq);
    record.push(0.0, sample(u0, f, &params)?);
    observer(0.0, u0);

    let mut u = u0.clone();
    let mut snapshots = Vec::new();
    if cfg.snapshot_every.is_some() {
        snapshots.push((0.0, u.clone()));
    }
    let mut dt = cfg.dt;
    let mut t = 0.0;
    let mut steps = 0usize;
    let eps = 1e-12 * cfg.t_end.max(1.0);
    while t < cfg.t_end - eps {
        let mut h = dt.min(cfg.t_end - t);
        let mut c = courant(&u, h);
        while c > CFL_LIMIT {
            if !cfg.adaptive {
                return Err(LabError::Cfl { dt: h, courant: c });
            }
            dt *= 0.5;
            h = dt.min(cfg.t_end - t);
            record.halvings += 1;
            log::info!("t = {t:.6}: Courant number {c:.3} above {CFL_LIMIT}, halving dt to {dt:e}");
            if dt < 1e-14 * cfg.dt.max(1.0) {
                return Err(LabError::Cfl { dt, courant: c });
            }
            c = courant(&u, h);
        }
        u = step_raw(&u, f, &params, cfg.scheme, h)?;
        // A final step shortened to hit t_end exactly lands on t_end.
        t = if cfg.t_end - (t + h) <= eps { cfg.t_end } else { t + h };
        steps += 1;
        record.push(t, sample(&u, f, &params)?);
        observer(t, &u);
        if let Some(every) = cfg.snapshot_every {
            if steps.is_multiple_of(every) {
                snapshots.push((t, u.clone()));
            }
        }
    }
    Ok(Evolution {
        final_state: u,
        record,
        snapshots,
        final_dt: dt,
    })
}
