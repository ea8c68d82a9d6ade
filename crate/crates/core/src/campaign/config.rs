use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{EvolverConfig, InitialSpec, Scheme};
use crate::error::{LabError, Result};
use crate::forcing::{build_force, ForceSpec, Orientation, PhysicalParams};
use crate::spectral::GridSpec;
use crate::stationary::{PicardConfig, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Evolve,
    StationaryPicard,
    Oseen,
    Stability,
    SpectraAudit,
    ForceAudit,
    KernelAudit,
    Sweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default = "default_window_start")]
    pub window_start_fraction: f64,
    #[serde(default = "default_true")]
    pub adaptive: bool,
    /// Averaging window; half the averaging range when absent.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OseenSection {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Random pairs probed when calibrating the bilinear constant.
    #[serde(default = "default_probes")]
    pub random_probes: usize,
    /// Compare partial sums with the classical Picard solution.
    #[serde(default = "default_true")]
    pub compare_picard: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Seeds of the perturbations; three seeds from the run seed when absent.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub perturbation: Option<InitialSpec>,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraSection {
    #[serde(default)]
    pub kappa_lo: Option<f64>,
    #[serde(default)]
    pub kappa_hi: Option<f64>,
    /// Decay rate the fit is compared with; `ell0 / rho2` when absent.
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
    #[serde(default = "default_gevrey_s")]
    pub sobolev_index: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceAuditSection {
    #[serde(default = "default_s_values")]
    pub s_values: Vec<f64>,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "default_mus")]
    pub mus: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_tail_exponent")]
    pub tail_exponent: f64,
    #[serde(default = "default_tail_radii")]
    pub tail_radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Nu,
    Alpha,
    Force,
    Length,
    Ell0,
    Seed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Experiment run at every point.
    pub kind: ExperimentKind,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// One experiment, as read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; not part of the manifest.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    pub params: PhysicalParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub orientation: Option<Orientation>,
    #[serde(default)]
    pub evolve: Option<EvolveSection>,
    #[serde(default)]
    pub picard: Option<PicardConfig>,
    #[serde(default)]
    pub oseen: Option<OseenSection>,
    #[serde(default)]
    pub stability: Option<StabilitySection>,
    #[serde(default)]
    pub spectra: Option<SpectraSection>,
    #[serde(default)]
    pub force_audit: Option<ForceAuditSection>,
    #[serde(default)]
    pub kernel: Option<KernelSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn default_scheme() -> Scheme {
    Scheme::Rk4
}
fn default_window_start() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_n_max() -> usize {
    6
}
fn default_probes() -> usize {
    8
}
fn default_residual_tol() -> f64 {
    1e-8
}
fn default_gevrey_s() -> f64 {
    0.5
}
fn default_s_values() -> Vec<f64> {
    vec![-1.0, -0.5, 0.0, 0.5, 1.0]
}
fn default_p_values() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 6.0]
}
fn default_thetas() -> Vec<f64> {
    vec![0.0, 1.0, 1.5, 2.0, 3.0]
}
fn default_mus() -> Vec<f64> {
    vec![1.0]
}
fn default_radii() -> Vec<f64> {
    (0..=24).map(|k| 0.01 * 4000f64.powf(k as f64 / 24.0)).collect()
}
fn default_tail_exponent() -> f64 {
    4.0
}
fn default_tail_radii() -> Vec<f64> {
    (0..=6).map(|k| 10.0 + 5.0 * k as f64).collect()
}

fn default_initial() -> InitialSpec {
    InitialSpec {
        energy: 1.0,
        slope: -2.0,
        max_shell: 4.0,
    }
}

fn default_perturbation() -> InitialSpec {
    InitialSpec {
        energy: 1e-4,
        slope: -2.0,
        max_shell: 3.0,
    }
}

fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fills every defaulted field and validates the configuration.
    ///
    /// The force is built once here so lattice and band violations surface
    /// before any experiment starts.
    pub fn resolve(mut self) -> Result<Self> {
        self.params.validate()?;
        self.grid.validate()?;
        self.orientation.get_or_insert_with(Orientation::default);
        build_force(&self.force_spec(), &self.grid)?;
        let kind = self.kind;
        if kind == ExperimentKind::Sweep {
            let sweep = self
                .sweep
                .as_ref()
                .ok_or_else(|| config_err("sweep experiments need a [sweep] section"))?;
            if sweep.kind == ExperimentKind::Sweep {
                return Err(config_err("a sweep cannot sweep sweeps"));
            }
            if sweep.values.is_empty() {
                return Err(config_err("sweep.values is empty"));
            }
            // Points that break an invariant are reported in their row.
            let inner = sweep.kind;
            self.kind = inner;
            self.resolve_sections()?;
            self.kind = ExperimentKind::Sweep;
        } else {
            if self.sweep.is_some() {
                return Err(config_err("[sweep] section given for a non-sweep experiment"));
            }
            self.resolve_sections()?;
        }
        Ok(self)
    }

    fn resolve_sections(&mut self) -> Result<()> {
        use ExperimentKind::*;
        let seed = self.seed;
        let kmax = self.grid.kappa_max();
        let dk = self.grid.delta_kappa();
        match self.kind {
            Evolve => {
                let ev = self
                    .evolve
                    .as_mut()
                    .ok_or_else(|| config_err("evolve experiments need an [evolve] section"))?;
                ev.initial.get_or_insert_with(default_initial);
                let range = (1.0 - ev.window_start_fraction) * ev.t_end;
                ev.window.get_or_insert(0.5 * range);
                self.evolver_config()?.validate()?;
            }
            StationaryPicard | Oseen | Stability | SpectraAudit => {
                let variant = match self.kind {
                    Oseen => Variant::Classical,
                    Stability => Variant::Damped,
                    _ => self.picard.map(|p| p.variant).unwrap_or(Variant::Damped),
                };
                let picard = self.picard.get_or_insert_with(|| PicardConfig::new(variant));
                if picard.variant != variant {
                    return Err(config_err(format!(
                        "{:?} experiments use the {:?} variant, config asks for {:?}",
                        self.kind, variant, picard.variant
                    )));
                }
                if !(picard.tolerance > 0.0) {
                    return Err(config_err("picard.tolerance must be positive"));
                }
            }
            _ => {}
        }
        match self.kind {
            Oseen => {
                let o = self.oseen.get_or_insert(OseenSection {
                    n_max: default_n_max(),
                    random_probes: default_probes(),
                    compare_picard: true,
                });
                if o.n_max == 0 {
                    return Err(config_err("oseen.n_max must be at least 1"));
                }
            }
            Stability => {
                if self.params.alpha <= 0.0 {
                    return Err(config_err("stability experiments need alpha > 0"));
                }
                let st = self
                    .stability
                    .as_mut()
                    .ok_or_else(|| config_err("stability experiments need a [stability] section"))?;
                st.seeds.get_or_insert_with(|| vec![seed, seed + 1, seed + 2]);
                st.perturbation.get_or_insert_with(default_perturbation);
                if !(st.dt > 0.0 && st.t_end > 0.0) {
                    return Err(config_err("stability.dt and stability.t_end must be positive"));
                }
            }
            SpectraAudit => {
                let ell0 = self.params.ell0;
                let rho2 = self.params.rho2;
                let sp = self.spectra.get_or_insert(SpectraSection {
                    kappa_lo: None,
                    kappa_hi: None,
                    target: None,
                    betas: None,
                    sobolev_index: default_gevrey_s(),
                });
                let lo = *sp.kappa_lo.get_or_insert(dk);
                let hi = *sp.kappa_hi.get_or_insert((kmax / dk - 0.5).floor() * dk);
                sp.target.get_or_insert(ell0 / rho2);
                sp.betas
                    .get_or_insert_with(|| (0..=10).map(|k| 0.1 * k as f64 * ell0 / rho2 * 2.0).collect());
                if !(lo < hi && hi <= kmax) {
                    return Err(config_err(format!(
                        "spectra window [{lo}, {hi}] must be nonempty and end below the cutoff {kmax}"
                    )));
                }
            }
            ForceAudit => {
                let fa = self.force_audit.get_or_insert(ForceAuditSection {
                    s_values: default_s_values(),
                    p_values: default_p_values(),
                    thetas: default_thetas(),
                    mus: default_mus(),
                });
                if fa.thetas.iter().any(|t| !(0.0..=3.0).contains(t)) {
                    return Err(config_err("force_audit.thetas must lie in [0, 3]"));
                }
                if fa.p_values.iter().any(|p| !(*p >= 1.0)) {
                    return Err(config_err("force_audit.p_values must be at least 1"));
                }
                let max_mu = self.grid.box_half_side / self.params.length;
                if fa.mus.iter().any(|m| !(*m >= 1.0 && *m <= max_mu)) {
                    return Err(config_err(format!("force_audit.mus must lie in [1, {max_mu}]")));
                }
            }
            KernelAudit => {
                if self.params.alpha <= 0.0 {
                    return Err(config_err("kernel audits need alpha > 0"));
                }
                let k = self.kernel.get_or_insert(KernelSection {
                    radii: default_radii(),
                    tail_exponent: default_tail_exponent(),
                    tail_radii: default_tail_radii(),
                });
                if k.radii.iter().chain(&k.tail_radii).any(|r| !(*r > 0.0)) {
                    return Err(config_err("kernel radii must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Sets one swept parameter.
    pub fn apply(&mut self, parameter: SweepParameter, value: f64) -> Result<()> {
        match parameter {
            SweepParameter::Nu => self.params.nu = value,
            SweepParameter::Alpha => self.params.alpha = value,
            SweepParameter::Force => self.params.force = value,
            SweepParameter::Length => self.params.length = value,
            SweepParameter::Ell0 => self.params.ell0 = value,
            SweepParameter::Seed => {
                if !(value >= 0.0 && value.fract() == 0.0 && value < u64::MAX as f64) {
                    return Err(config_err(format!(
                        "seed sweep value {value} is not a nonnegative integer"
                    )));
                }
                self.seed = value as u64;
            }
        }
        self.params.validate()?;
        build_force(&self.force_spec(), &self.grid)?;
        Ok(())
    }

    pub fn force_spec(&self) -> ForceSpec {
        ForceSpec {
            params: self.params,
            orientation: self.orientation.unwrap_or_default(),
        }
    }

    pub fn evolver_config(&self) -> Result<EvolverConfig> {
        let ev = self
            .evolve
            .as_ref()
            .ok_or_else(|| config_err("missing [evolve] section"))?;
        Ok(EvolverConfig {
            params: self.params,
            grid: self.grid,
            dt: ev.dt,
            t_end: ev.t_end,
            scheme: ev.scheme,
            snapshot_every: ev.snapshot_every,
            window_start_fraction: ev.window_start_fraction,
            adaptive: ev.adaptive,
        })
    }
}
