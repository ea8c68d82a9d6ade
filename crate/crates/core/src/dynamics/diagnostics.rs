use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::forcing::PhysicalParams;
use crate::spectral::{lp_norm_samples, norm, NormKind, SpectralField, VectorSamples};

/// Quadratic quantities of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSample {
    /// `||u||^2`
    pub energy: f64,
    /// `||grad u||^2`
    pub enstrophy: f64,
    /// `<f, u>`
    pub injection: f64,
    /// `||band(u)||^2`
    pub band_energy: f64,
}

/// Per-step energy ledger of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub params: PhysicalParams,
    /// `||f||_{Hdot^-1}^2`
    pub force_hm1_sq: f64,
    pub time: Vec<f64>,
    pub energy: Vec<f64>,
    pub enstrophy: Vec<f64>,
    pub injection: Vec<f64>,
    pub band_energy: Vec<f64>,
    /// `E(t) - E(0) + int_0^t (2 nu Z + 2 alpha E - 2 <f,u>)`, trapezoid rule.
    pub balance_residual: Vec<f64>,
    /// `E(t)` minus the Gronwall envelope; `None` when `alpha = 0`.
    pub gronwall_margin: Vec<Option<f64>>,
    /// Number of CFL-driven step halvings.
    pub halvings: usize,
    #[serde(skip)]
    budget: f64,
}

/// `e^{-2 alpha t} E0 + ||f||^2_{Hdot^-1} / (2 alpha nu) (1 - e^{-2 alpha t})`.
pub fn gronwall_bound(params: &PhysicalParams, e0: f64, force_hm1_sq: f64, t: f64) -> Result<f64> {
    if params.alpha <= 0.0 {
        return Err(LabError::Undefined("Gronwall envelope needs alpha > 0".into()));
    }
    let decay = (-2.0 * params.alpha * t).exp();
    Ok(decay * e0 + force_hm1_sq / (2.0 * params.alpha * params.nu) * (1.0 - decay))
}

impl DiagnosticsRecord {
    pub fn new(params: PhysicalParams, force_hm1_sq: f64) -> Self {
        Self {
            params,
            force_hm1_sq,
            time: Vec::new(),
            energy: Vec::new(),
            enstrophy: Vec::new(),
            injection: Vec::new(),
            band_energy: Vec::new(),
            balance_residual: Vec::new(),
            gronwall_margin: Vec::new(),
            halvings: 0,
            budget: 0.0,
        }
    }

    fn rate(&self, s: &StepSample) -> f64 {
        2.0 * self.params.nu * s.enstrophy + 2.0 * self.params.alpha * s.energy - 2.0 * s.injection
    }

    pub fn push(&mut self, t: f64, s: StepSample) {
        if let Some(&t_prev) = self.time.last() {
            let n = self.time.len() - 1;
            let prev = StepSample {
                energy: self.energy[n],
                enstrophy: self.enstrophy[n],
                injection: self.injection[n],
                band_energy: self.band_energy[n],
            };
            self.budget += 0.5 * (t - t_prev) * (self.rate(&prev) + self.rate(&s));
        }
        let e0 = self.energy.first().copied().unwrap_or(s.energy);
        self.time.push(t);
        self.energy.push(s.energy);
        self.enstrophy.push(s.enstrophy);
        self.injection.push(s.injection);
        self.band_energy.push(s.band_energy);
        self.balance_residual.push(s.energy - e0 + self.budget);
        self.gronwall_margin.push(
            gronwall_bound(&self.params, e0, self.force_hm1_sq, t)
                .ok()
                .map(|b| s.energy - b),
        );
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        self.time.last().copied().unwrap_or(0.0)
    }

    /// CSV with columns `t, energy, enstrophy, injection, balance_residual,
    /// gronwall_margin`; the last column is empty when undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,energy,enstrophy,injection,balance_residual,gronwall_margin\n");
        for i in 0..self.len() {
            let g = self.gronwall_margin[i].map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.time[i], self.energy[i], self.enstrophy[i], self.injection[i], self.balance_residual[i], g
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Largest `||u(t)||^2` minus the Gronwall envelope over the record.
pub fn gronwall_margin(record: &DiagnosticsRecord) -> Result<f64> {
    if record.params.alpha <= 0.0 {
        return Err(LabError::Undefined("Gronwall envelope needs alpha > 0".into()));
    }
    Ok(record
        .gronwall_margin
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Energy-balance residual at the final time with the dissipation integral
/// taken by composite Simpson; needs a uniform step and an even step count.
pub fn balance_residual_simpson(record: &DiagnosticsRecord) -> Result<f64> {
    let n = record.len();
    if n < 3 || !(n - 1).is_multiple_of(2) {
        return Err(LabError::InsufficientData(format!(
            "Simpson rule needs an even number of steps, got {}",
            n.saturating_sub(1)
        )));
    }
    let h = record.time[1] - record.time[0];
    for w in record.time.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(LabError::InsufficientData("Simpson rule needs a uniform step".into()));
        }
    }
    let p = &record.params;
    let g = |i: usize| 2.0 * p.nu * record.enstrophy[i] + 2.0 * p.alpha * record.energy[i] - 2.0 * record.injection[i];
    let mut acc = g(0) + g(n - 1);
    for i in 1..n - 1 {
        acc += if i % 2 == 1 { 4.0 * g(i) } else { 2.0 * g(i) };
    }
    Ok(record.energy[n - 1] - record.energy[0] + acc * h / 3.0)
}

/// Long-time means of `||u||^2`, `nu ||grad u||^2` and `||band(u)||^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Means {
    pub u_sq: f64,
    pub e: f64,
    pub u_ell0_sq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Averages {
    /// `(1/T) int_0^T`.
    pub plain: Means,
    /// Supremum of trailing-window means with windows inside the averaging range.
    pub windowed: Means,
    pub window: f64,
    /// `u = sqrt(u^2)` from the windowed means.
    pub u: f64,
    pub u_ell0: f64,
    pub e: f64,
    /// `U = u / L^{3/2}`.
    pub big_u: f64,
    /// `eps = e / L^3`.
    pub epsilon: f64,
    /// `Re = u ell0 / nu`.
    pub reynolds: f64,
    /// `U ell0 / nu`.
    pub reynolds_classical: f64,
}

fn cumulative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    c.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        c.push(acc);
    }
    c
}

/// Cumulative integral at an arbitrary time by linear interpolation of `y`.
fn cumulative_at(t: &[f64], y: &[f64], c: &[f64], a: f64) -> f64 {
    let i = match t.partition_point(|&s| s <= a) {
        0 => return 0.0,
        i => i - 1,
    };
    if i + 1 >= t.len() {
        return c[t.len() - 1];
    }
    let frac = (a - t[i]) / (t[i + 1] - t[i]);
    let ya = y[i] + frac * (y[i + 1] - y[i]);
    c[i] + 0.5 * (a - t[i]) * (y[i] + ya)
}

/// Means are taken of `y - y[0]` and shifted back, so a constant signal
/// averages to itself without round-off.
fn windowed_sup(t: &[f64], y: &[f64], start: f64, window: f64) -> f64 {
    let y0 = y[0];
    let y: Vec<f64> = y.iter().map(|v| v - y0).collect();
    let y = &y[..];
    let c = cumulative(t, y);
    let mut best = f64::NEG_INFINITY;
    for j in 0..t.len() {
        let a = t[j] - window;
        if a < start - 1e-12 * window {
            continue;
        }
        let mean = (c[j] - cumulative_at(t, y, &c, a.max(0.0))) / window;
        best = best.max(mean);
    }
    y0 + best
}

/// Plain and windowed long-time averages.
///
/// Windows of length `window` slide over `[start_fraction T, T]`; the
/// window must span at least 10 steps.
pub fn long_time_averages(record: &DiagnosticsRecord, window: f64, start_fraction: f64) -> Result<Averages> {
    let t = &record.time;
    if record.len() < 2 {
        return Err(LabError::InsufficientData("record holds fewer than two samples".into()));
    }
    let t_end = record.final_time();
    let start = start_fraction * t_end;
    if !(window > 0.0) || window > t_end - start + 1e-12 * t_end {
        return Err(LabError::InsufficientData(format!(
            "window {window} does not fit in the averaging range [{start}, {t_end}]"
        )));
    }
    let steps_in_window = t.iter().filter(|&&s| s >= t_end - window - 1e-12 * t_end).count() - 1;
    if steps_in_window < 10 {
        return Err(LabError::InsufficientData(format!(
            "window spans {steps_in_window} steps, at least 10 needed"
        )));
    }
    let nu = record.params.nu;
    let plain_of = |y: &[f64]| {
        let y0 = y[0];
        let shifted: Vec<f64> = y.iter().map(|v| v - y0).collect();
        y0 + cumulative(t, &shifted)[t.len() - 1] / t_end
    };
    let plain = Means {
        u_sq: plain_of(&record.energy),
        e: nu * plain_of(&record.enstrophy),
        u_ell0_sq: plain_of(&record.band_energy),
    };
    let windowed = Means {
        u_sq: windowed_sup(t, &record.energy, start, window),
        e: nu * windowed_sup(t, &record.enstrophy, start, window),
        u_ell0_sq: windowed_sup(t, &record.band_energy, start, window),
    };
    let p = &record.params;
    let u = windowed.u_sq.max(0.0).sqrt();
    let big_u = u / p.length.powf(1.5);
    Ok(Averages {
        plain,
        windowed,
        window,
        u,
        u_ell0: windowed.u_ell0_sq.max(0.0).sqrt(),
        e: windowed.e,
        big_u,
        epsilon: windowed.e / p.length.powi(3),
        reynolds: u * p.ell0 / p.nu,
        reynolds_classical: big_u * p.ell0 / p.nu,
    })
}

/// Norms of the force entering the dissipation-law inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForceNorms {
    pub l2: f64,
    pub linf: f64,
    /// `sup_x |grad (x) f|` with the Frobenius norm of the gradient matrix.
    pub grad_linf: f64,
    pub laplacian_l2: f64,
}

pub fn force_norms(f: &SpectralField) -> Result<ForceNorms> {
    let g = f.grid;
    let mut frob = vec![0.0; g.len()];
    for j in 0..3 {
        let d = f.map_modes(|idx, c| {
            let xi = g.xi(idx)[j];
            let m = num_complex::Complex64::new(0.0, xi);
            [c[0] * m, c[1] * m, c[2] * m]
        });
        let s: VectorSamples = d.inverse();
        for c in 0..3 {
            for (acc, v) in frob.iter_mut().zip(&s.comps[c]) {
                *acc += v * v;
            }
        }
    }
    let grad_linf = frob.into_iter().fold(0.0f64, f64::max).sqrt();
    Ok(ForceNorms {
        l2: norm(f, NormKind::L2)?,
        linf: lp_norm_samples(&f.inverse(), f64::INFINITY)?,
        grad_linf,
        laplacian_l2: norm(f, NormKind::Hdot(2.0))?,
    })
}

/// Signed margins (inequality holds when negative) and dimensionless ratios
/// of the dissipation-law estimates; `None` marks an undefined quotient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KolmogorovReport {
    pub force: ForceNorms,
    /// `||f||^2 - (u^2 ||grad f||_inf + nu u ||Delta f|| + alpha u ||f||)`.
    pub lemma_margin: f64,
    /// `||f|| - (u^2/ell0)(||f||_inf/||f|| + 1/Re)`; the estimate carries an
    /// unspecified constant, so this is reported, not asserted.
    pub prop1_margin: Option<f64>,
    /// `e - u_ell0 ||f||` from the windowed averages.
    pub prop2_margin: f64,
    /// Same with the plain means.
    pub prop2_margin_plain: f64,
    /// `e ell0 / (u_ell0 u^2 ||f||_inf / ||f||)`.
    pub energy_ratio: Option<f64>,
    /// `eps ell0 / U^3`.
    pub dissipation_ratio: Option<f64>,
}

fn quotient(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 && den.is_finite() && num.is_finite() {
        Some(num / den)
    } else {
        None
    }
}

pub fn kolmogorov_diagnostics(avg: &Averages, f: &SpectralField, params: &PhysicalParams) -> Result<KolmogorovReport> {
    let fnorm = force_norms(f)?;
    let u = avg.u;
    let lemma_margin =
        fnorm.l2.powi(2) - (u * u * fnorm.grad_linf + params.nu * u * fnorm.laplacian_l2 + params.alpha * u * fnorm.l2);
    let prop1_margin = match (quotient(fnorm.linf, fnorm.l2), quotient(1.0, avg.reynolds)) {
        (Some(shape), Some(inv_re)) => Some(fnorm.l2 - u * u / params.ell0 * (shape + inv_re)),
        _ => None,
    };
    let u_plain = avg.plain.u_ell0_sq.max(0.0).sqrt();
    let energy_den = quotient(fnorm.linf, fnorm.l2).map(|s| avg.u_ell0 * u * u * s);
    Ok(KolmogorovReport {
        force: fnorm,
        lemma_margin,
        prop1_margin,
        prop2_margin: avg.e - avg.u_ell0 * fnorm.l2,
        prop2_margin_plain: avg.plain.e - u_plain * fnorm.l2,
        energy_ratio: energy_den.and_then(|d| quotient(avg.e * params.ell0, d)),
        dissipation_ratio: quotient(avg.epsilon * params.ell0, avg.big_u.powi(3)),
    })
}
