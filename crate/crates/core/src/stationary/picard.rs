use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{random_initial, InitialSpec};
use crate::error::{LabError, Result};
use crate::forcing::PhysicalParams;
use crate::spectral::{gradient_part, nonlinear_term, norm, tensor_divergence, NormKind, ScalarField, SpectralField};

/// Which stationary system is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `-nu Delta U + P div(U (x) U) + alpha U = f`.
    Damped,
    /// Same without the damping term.
    Classical,
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    200
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    pub variant: Variant,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl PicardConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            tolerance: default_tolerance(),
            max_iters: default_max_iters(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(LabError::Param("Picard tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Damping rate actually used by the variant.
pub fn effective_alpha(variant: Variant, params: &PhysicalParams) -> f64 {
    match variant {
        Variant::Damped => params.alpha,
        Variant::Classical => 0.0,
    }
}

/// Norm in which the variant's iteration is measured.
pub fn working_norm(variant: Variant, params: &PhysicalParams) -> NormKind {
    match variant {
        Variant::Damped => NormKind::Energy {
            length: params.length,
            ell0: params.ell0,
        },
        Variant::Classical => NormKind::Composite,
    }
}

/// `(nu |xi|^2 + alpha)^{-1} w`, zero mode cleared.
pub fn resolvent(w: &SpectralField, nu: f64, alpha: f64) -> SpectralField {
    let g = w.grid;
    w.map_modes(|idx, c| {
        let d = nu * g.xi_norm_sq(idx) + alpha;
        if idx == 0 || d == 0.0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        [c[0] / d, c[1] / d, c[2] / d]
    })
}

/// Quadratic part of the fixed-point map, `-(nu|xi|^2+alpha)^{-1} P div(v (x) w)`.
pub fn variant_bilinear(v: &SpectralField, w: &SpectralField, nu: f64, alpha: f64) -> SpectralField {
    let t = crate::spectral::leray_project(&tensor_divergence(v, w));
    resolvent(&t, nu, alpha).scale(-1.0)
}

/// `U -> (nu|xi|^2 + alpha)^{-1} (f - P div(U (x) U))`.
pub fn fixed_point_map(u: &SpectralField, f: &SpectralField, nu: f64, alpha: f64) -> SpectralField {
    resolvent(&f.sub(&nonlinear_term(u)), nu, alpha)
}

/// Relative stationarity residual
/// `||(nu|xi|^2+alpha) U + P div(U (x) U) - f||_{Hdot^-1} / ||f||_{Hdot^-1}`
/// (absolute when `f = 0`).
pub fn stationary_residual(u: &SpectralField, f: &SpectralField, nu: f64, alpha: f64) -> Result<f64> {
    let g = u.grid;
    let lin = u.map_modes(|idx, c| {
        let d = nu * g.xi_norm_sq(idx) + alpha;
        [c[0] * d, c[1] * d, c[2] * d]
    });
    let r = lin.add(&nonlinear_term(u)).sub(f);
    let rn = norm(&r, NormKind::Hdot(-1.0))?;
    let fnorm = norm(f, NormKind::Hdot(-1.0))?;
    Ok(if fnorm > 0.0 { rn / fnorm } else { rn })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Converged {
        iterations: usize,
    },
    /// The iteration left every plausible ball or ran out of iterations.
    Diverged {
        iterations: usize,
        reason: String,
    },
}

impl Verdict {
    pub fn converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }
}

/// A-priori energy bounds; a bound holds when its margin is nonpositive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AprioriMargins {
    /// `min(nu, alpha) ||U||_{H^1} - ||f||_{H^-1}`, damped variant with `alpha > 0`.
    pub damped: Option<f64>,
    pub f_h_minus1: f64,
    /// `nu ||U||_{Hdot^1} - ||f||_{Hdot^-1}`.
    pub homogeneous: f64,
    pub f_hdot_minus1: f64,
}

pub fn apriori_margins(u: &SpectralField, f: &SpectralField, nu: f64, alpha: f64) -> Result<AprioriMargins> {
    let f_h = norm(f, NormKind::H(-1.0))?;
    let f_hdot = norm(f, NormKind::Hdot(-1.0))?;
    let damped = if alpha > 0.0 {
        Some(nu.min(alpha) * norm(u, NormKind::H(1.0))? - f_h)
    } else {
        None
    };
    Ok(AprioriMargins {
        damped,
        f_h_minus1: f_h,
        homogeneous: nu * norm(u, NormKind::Hdot(1.0))? - f_hdot,
        f_hdot_minus1: f_hdot,
    })
}

#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub solution: SpectralField,
    pub verdict: Verdict,
    /// `||U^{k+1} - U^k|| / ||U^{k+1}||` per iteration, working norm.
    pub residuals: Vec<f64>,
    /// Working norm of the starting iterate `resolvent(f)`.
    pub first_term_norm: f64,
    pub pde_residual: f64,
    pub apriori: AprioriMargins,
}

impl PicardOutcome {
    /// Ratios of successive residuals.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.residuals
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Picard iteration from `U^0 = resolvent(f)`.
///
/// Non-convergence is reported through [`Verdict::Diverged`]; only a
/// non-finite iterate is an error.
pub fn picard_solve(f: &SpectralField, params: &PhysicalParams, cfg: &PicardConfig) -> Result<PicardOutcome> {
    cfg.validate()?;
    params.validate()?;
    f.check_finite("force")?;
    let nu = params.nu;
    let alpha = effective_alpha(cfg.variant, params);
    let kind = working_norm(cfg.variant, params);
    let mut u = resolvent(f, nu, alpha);
    let first = norm(&u, kind)?;
    let mut residuals = Vec::new();
    let mut verdict = None;
    for it in 1..=cfg.max_iters {
        let next = fixed_point_map(&u, f, nu, alpha);
        next.check_finite("Picard iterate")?;
        let size = norm(&next, kind)?;
        let diff = norm(&next.sub(&u), kind)?;
        let r = if size > 0.0 { diff / size } else { diff };
        residuals.push(r);
        u = next;
        if r <= cfg.tolerance {
            verdict = Some(Verdict::Converged { iterations: it });
            break;
        }
        if size > 1e8 * first.max(f64::MIN_POSITIVE) {
            verdict = Some(Verdict::Diverged {
                iterations: it,
                reason: format!("iterate norm {size:e} left the ball of the first term {first:e}"),
            });
            break;
        }
    }
    let verdict = verdict.unwrap_or_else(|| Verdict::Diverged {
        iterations: cfg.max_iters,
        reason: format!(
            "no contraction within {} iterations (last residual {:e})",
            cfg.max_iters,
            residuals.last().copied().unwrap_or(f64::NAN)
        ),
    });
    Ok(PicardOutcome {
        pde_residual: stationary_residual(&u, f, nu, alpha)?,
        apriori: apriori_margins(&u, f, nu, alpha)?,
        solution: u,
        verdict,
        residuals,
        first_term_norm: first,
    })
}

/// Empirical operator bound `C` with `||Q(v, w)|| <= (C/nu) ||v|| ||w||` for
/// the variant's quadratic map `Q`, maximized over the given probe pairs
/// and `random_probes` seeded random pairs on the force's shells.
pub fn empirical_bilinear_constant(
    f: &SpectralField,
    params: &PhysicalParams,
    variant: Variant,
    extra_pairs: &[(SpectralField, SpectralField)],
    random_probes: usize,
    seed: u64,
) -> Result<f64> {
    let nu = params.nu;
    let alpha = effective_alpha(variant, params);
    let kind = working_norm(variant, params);
    let g = f.grid;
    let mut pairs: Vec<(SpectralField, SpectralField)> = extra_pairs.to_vec();
    let shells = (params.rho2 / params.ell0 / g.delta_kappa()).max(1.0);
    let spec = InitialSpec {
        energy: 1.0,
        slope: 0.0,
        max_shell: shells,
    };
    for i in 0..random_probes {
        let s = seed.wrapping_add(2 * i as u64);
        pairs.push((random_initial(&g, &spec, s)?, random_initial(&g, &spec, s + 1)?));
    }
    let mut best = 0.0f64;
    for (v, w) in &pairs {
        let nv = norm(v, kind)?;
        let nw = norm(w, kind)?;
        if nv == 0.0 || nw == 0.0 {
            continue;
        }
        let q = norm(&variant_bilinear(v, w, nu, alpha), kind)?;
        best = best.max(nu * q / (nv * nw));
    }
    Ok(best)
}

/// Pressure `P = (-Delta)^{-1} div div (U (x) U)`.
pub fn pressure_recover(u: &SpectralField) -> ScalarField {
    let g = u.grid;
    let w = tensor_divergence(u, u);
    let mut p = ScalarField::zeros(g);
    for idx in 1..g.len() {
        let xi = g.xi(idx);
        let c = w.coeff(idx);
        let dot = c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2];
        p.coeffs[idx] = Complex64::i() * dot / g.xi_norm_sq(idx);
    }
    p
}

/// `grad P + (Id - P) div(U (x) U)`, zero for the recovered pressure.
pub fn pressure_defect(u: &SpectralField, p: &ScalarField) -> f64 {
    p.gradient().add(&gradient_part(&tensor_divergence(u, u))).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, VectorSamples};

    fn params() -> PhysicalParams {
        PhysicalParams {
            nu: 1.0,
            alpha: 0.5,
            ell0: 1.0,
            length: 1.0,
            force: 1.0,
            rho1: 1.0,
            rho2: 2.0,
        }
    }

    #[test]
    fn zero_force_gives_zero_solution() {
        let g = GridSpec::new(2.0, 16).unwrap();
        let f = SpectralField::zeros(g);
        for variant in [Variant::Damped, Variant::Classical] {
            let out = picard_solve(&f, &params(), &PicardConfig::new(variant)).unwrap();
            assert!(out.solution.is_zero());
            match out.verdict {
                Verdict::Converged { iterations } => assert!(iterations <= 2),
                v => panic!("{v:?}"),
            }
        }
    }

    #[test]
    fn shear_has_no_pressure() {
        let g = GridSpec::new(2.0, 16).unwrap();
        let dk = g.delta_kappa();
        let u = SpectralField::forward(&VectorSamples::from_fn(g, |x| [(dk * x[1]).sin(), 0.0, 0.0]));
        assert!(pressure_recover(&u).max_abs() < 1e-15);
        assert!(pressure_recover(&SpectralField::zeros(g)).max_abs() == 0.0);
    }
}
