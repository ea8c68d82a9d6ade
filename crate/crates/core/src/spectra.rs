//! Shell spectra, dissipation scales and exponential decay fits.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::Averages;
use crate::error::{LabError, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::forcing::PhysicalParams;
use crate::spectral::SpectralField;
use crate::stationary::{gevrey_picard_check, GevreyPoint};

/// Amplitudes at or below this are treated as round-off and left out of fits.
pub const AMPLITUDE_FLOOR: f64 = 1e-30;

/// Fits need at least this many shells.
pub const MIN_FIT_SHELLS: usize = 5;

/// Shell `j` collects the modes with `|xi|` in `[(j - 1/2) dk, (j + 1/2) dk)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellSpectrum {
    pub delta_kappa: f64,
    /// Shell centers `j dk`.
    pub kappa: Vec<f64>,
    /// `sum |box| |u_hat|^2 / dk` over the shell.
    pub energy: Vec<f64>,
    /// `max |u_hat|` over the shell.
    pub max_amplitude: Vec<f64>,
    /// `|xi|` of the mode attaining the maximum (shell center when empty).
    pub argmax_radius: Vec<f64>,
    pub mode_count: Vec<usize>,
}

impl ShellSpectrum {
    /// `sum_j E_j dk`, equal to `||u||^2`.
    pub fn total_energy(&self) -> f64 {
        self.energy.iter().sum::<f64>() * self.delta_kappa
    }

    /// CSV with columns `kappa, energy, max_amplitude`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,energy,max_amplitude\n");
        for j in 0..self.kappa.len() {
            writeln!(out, "{},{},{}", self.kappa[j], self.energy[j], self.max_amplitude[j])
                .expect("writing to a String cannot fail");
        }
        out
    }
}

pub fn shell_spectrum(u: &SpectralField) -> ShellSpectrum {
    let g = u.grid;
    let dk = g.delta_kappa();
    let shells = (0..g.len())
        .map(|i| (g.xi_norm(i) / dk + 0.5).floor() as usize)
        .max()
        .unwrap_or(0)
        + 1;
    let mut energy = vec![0.0; shells];
    let mut max_amplitude = vec![0.0f64; shells];
    let mut argmax_radius: Vec<f64> = (0..shells).map(|j| j as f64 * dk).collect();
    let mut mode_count = vec![0usize; shells];
    let vol = g.volume();
    for idx in 0..g.len() {
        let r = g.xi_norm(idx);
        let j = (r / dk + 0.5).floor() as usize;
        let c = u.coeff(idx);
        let m2 = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
        energy[j] += vol * m2 / dk;
        mode_count[j] += 1;
        let m = m2.sqrt();
        if m > max_amplitude[j] || (m == max_amplitude[j] && m > 0.0 && r < argmax_radius[j]) {
            max_amplitude[j] = m;
            argmax_radius[j] = r;
        }
    }
    ShellSpectrum {
        delta_kappa: dk,
        kappa: (0..shells).map(|j| j as f64 * dk).collect(),
        energy,
        max_amplitude,
        argmax_radius,
        mode_count,
    }
}

/// Which shell curve a fit regresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// `ln M` against the radius of the maximizing mode.
    MaxAmplitude,
    /// `ln E` against the shell center.
    Energy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub curve: Curve,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `-slope`.
    pub rate: f64,
    pub shells_used: usize,
    /// Shell centers in the window dropped for sitting at the floor.
    pub excluded: Vec<f64>,
    /// `rate >= target` when a target was given.
    pub meets_target: Option<bool>,
}

/// Fits `ln(curve) ~ -rate * kappa + c` over shells with centers in
/// `[kappa_lo, kappa_hi]`.
pub fn decay_fit_spectrum(
    spec: &ShellSpectrum,
    curve: Curve,
    kappa_lo: f64,
    kappa_hi: f64,
    target: Option<f64>,
) -> Result<DecayFit> {
    if !(kappa_lo < kappa_hi) {
        return Err(LabError::Param(format!("empty fit window [{kappa_lo}, {kappa_hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    let tol = 1e-12 * spec.delta_kappa;
    for j in 0..spec.kappa.len() {
        let k = spec.kappa[j];
        if k < kappa_lo - tol || k > kappa_hi + tol || spec.mode_count[j] == 0 {
            continue;
        }
        let (x, y) = match curve {
            Curve::MaxAmplitude => (spec.argmax_radius[j], spec.max_amplitude[j]),
            Curve::Energy => (k, spec.energy[j]),
        };
        if y <= AMPLITUDE_FLOOR {
            excluded.push(k);
            continue;
        }
        xs.push(x);
        ys.push(y.ln());
    }
    if !excluded.is_empty() {
        log::info!(
            "decay fit: {} shells at the round-off floor excluded: {:?}",
            excluded.len(),
            excluded
        );
    }
    if xs.len() < MIN_FIT_SHELLS {
        return Err(LabError::InsufficientData(format!(
            "{} usable shells in [{kappa_lo}, {kappa_hi}], at least {MIN_FIT_SHELLS} needed",
            xs.len()
        )));
    }
    let LinearFit {
        slope,
        intercept,
        r_squared,
        points,
    } = linear_fit(&xs, &ys)?;
    Ok(DecayFit {
        curve,
        kappa_lo,
        kappa_hi,
        slope,
        intercept,
        r_squared,
        rate: -slope,
        shells_used: points,
        excluded,
        meets_target: target.map(|t| -slope >= t),
    })
}

/// Max-shell exponential decay fit of `u` over `[kappa_lo, kappa_hi]`.
/// The window may not reach past the dealiasing cutoff.
pub fn exponential_decay_fit(u: &SpectralField, kappa_lo: f64, kappa_hi: f64, target: Option<f64>) -> Result<DecayFit> {
    let kmax = u.grid.kappa_max();
    if kappa_hi > kmax {
        return Err(LabError::Param(format!(
            "fit window upper edge {kappa_hi} beyond the dealiasing cutoff {kmax}"
        )));
    }
    decay_fit_spectrum(&shell_spectrum(u), Curve::MaxAmplitude, kappa_lo, kappa_hi, target)
}

/// Log-log slope of `E` against `kappa` over shells in the window.
pub fn five_thirds_probe(spec: &ShellSpectrum, kappa_lo: f64, kappa_hi: f64) -> Result<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = spec
        .kappa
        .iter()
        .zip(&spec.energy)
        .filter(|(k, e)| **k >= kappa_lo && **k <= kappa_hi && **k > 0.0 && **e > AMPLITUDE_FLOOR)
        .map(|(k, e)| (k.ln(), e.ln()))
        .unzip();
    if xs.len() < MIN_FIT_SHELLS {
        return Err(LabError::InsufficientData(format!(
            "{} usable shells for the log-log fit, at least {MIN_FIT_SHELLS} needed",
            xs.len()
        )));
    }
    linear_fit(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GevreyRadius {
    /// Decay rate of the max-shell curve.
    pub beta_star: f64,
    pub fit: DecayFit,
    pub curve: Vec<GevreyPoint>,
    /// Grid `beta` where `d ln ||exp(beta |xi|) u||_{Hdot^s} / d beta` first
    /// reaches the middle of the fit window: below the decay rate the norm
    /// is carried by low shells, above it by the top of the window.
    pub crossover_beta: Option<f64>,
}

/// Gevrey radius estimate from the max-shell decay rate, with the norm
/// growth curve over `betas` as a cross-check.
pub fn gevrey_radius(u: &SpectralField, s: f64, betas: &[f64], kappa_lo: f64, kappa_hi: f64) -> Result<GevreyRadius> {
    let fit = exponential_decay_fit(u, kappa_lo, kappa_hi, None)?;
    let curve: Vec<GevreyPoint> = if s == 0.5 {
        gevrey_picard_check(u, betas)?
    } else {
        betas
            .iter()
            .map(|&beta| {
                Ok(GevreyPoint {
                    beta,
                    norm: crate::spectral::norm(u, crate::spectral::NormKind::Gevrey { beta, s })?,
                })
            })
            .collect::<Result<_>>()?
    };
    let mid = 0.5 * (kappa_lo + kappa_hi);
    let mut crossover_beta = None;
    for w in curve.windows(2) {
        let db = w[1].beta - w[0].beta;
        if db <= 0.0 || w[0].norm <= 0.0 {
            continue;
        }
        let growth = (w[1].norm.ln() - w[0].norm.ln()) / db;
        if growth >= mid {
            crossover_beta = Some(0.5 * (w[0].beta + w[1].beta));
            break;
        }
    }
    Ok(GevreyRadius {
        beta_star: fit.rate,
        fit,
        curve,
        crossover_beta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DissipationScales {
    /// `1 / ell0`.
    pub kappa0: f64,
    /// `(eps / nu^3)^{1/4}`.
    pub kappa_d: f64,
    /// Reynolds number used in the comparisons.
    pub reynolds: f64,
    /// `kappa_D / (Re^{3/4} kappa0)`.
    pub turbulent_ratio: f64,
    /// `kappa_D / (Re^{1/2} kappa0)`.
    pub laminar_ratio: f64,
}

/// Dissipation wavenumber from `eps` and its comparison with `Re`.
pub fn dissipation_scales_from(epsilon: f64, reynolds: f64, params: &PhysicalParams) -> Result<DissipationScales> {
    if !(epsilon > 0.0) {
        return Err(LabError::Undefined(format!(
            "dissipation rate {epsilon} is not positive"
        )));
    }
    if !(reynolds > 0.0) {
        return Err(LabError::Undefined(format!(
            "Reynolds number {reynolds} is not positive"
        )));
    }
    let kappa0 = 1.0 / params.ell0;
    let kappa_d = (epsilon / params.nu.powi(3)).powf(0.25);
    Ok(DissipationScales {
        kappa0,
        kappa_d,
        reynolds,
        turbulent_ratio: kappa_d / (reynolds.powf(0.75) * kappa0),
        laminar_ratio: kappa_d / (reynolds.sqrt() * kappa0),
    })
}

/// [`dissipation_scales_from`] with `eps = e/L^3` and `Re = U ell0 / nu`.
pub fn dissipation_scales(avg: &Averages, params: &PhysicalParams) -> Result<DissipationScales> {
    dissipation_scales_from(avg.epsilon, avg.reynolds_classical, params)
}
