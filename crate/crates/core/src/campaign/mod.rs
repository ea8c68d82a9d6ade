//! Configured experiments, sweeps and the artifacts they leave on disk.
//!
//! A run writes its CSV/JSON tables and binary snapshots into one
//! directory and finishes with `manifest.json`, which echoes the resolved
//! configuration and the SHA-256 of every file. Nothing time- or
//! path-dependent is written, so the same configuration and seed always
//! produce the same bytes.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{
    EvolveSection, ExperimentConfig, ExperimentKind, ForceAuditSection, KernelSection, OseenSection, SpectraSection,
    StabilitySection, SweepParameter, SweepSection,
};

use crate::dynamics::{
    evolve, force_norms, gronwall_margin, kolmogorov_diagnostics, long_time_averages, random_initial,
    stability_experiment, Averages, KolmogorovReport,
};
use crate::error::{LabError, Result};
use crate::forcing::{
    audit_norm_equivalence, build_force, grashof, grashof_from_force, lattice_points, spatial_concentration,
    PhysicalParams,
};
use crate::kernels::{decay_transfer_check, BesselKernel};
use crate::spectra::{dissipation_scales, exponential_decay_fit, gevrey_radius, shell_spectrum, DissipationScales};
use crate::spectral::snapshot::save_snapshot;
use crate::spectral::{norm, SpectralField};
use crate::stationary::{
    empirical_bilinear_constant, oseen_expand, picard_solve, pressure_defect, pressure_recover, resolvent,
    working_norm, PicardConfig, PicardOutcome, Variant,
};

/// Grashof exponents reported with every run.
const THETAS: [f64; 5] = [0.0, 1.0, 1.5, 2.0, 3.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    /// A solver reported non-convergence; artifacts are still written.
    Diverged,
    /// Only used for sweep points that raised an error.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Completed => 0,
            Status::Failed => 3,
            Status::Diverged => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub status: Status,
    pub config: ExperimentConfig,
    pub files: Vec<FileEntry>,
}

/// Scalar summary of one run; one row of a sweep table.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SummaryRow {
    pub index: usize,
    pub value: Option<f64>,
    pub status: String,
    pub message: String,
    pub g_0: Option<f64>,
    pub g_1: Option<f64>,
    pub g_3_2: Option<f64>,
    pub g_2: Option<f64>,
    pub g_3: Option<f64>,
    pub u: Option<f64>,
    pub e: Option<f64>,
    pub big_u: Option<f64>,
    pub epsilon: Option<f64>,
    pub reynolds: Option<f64>,
    pub reynolds_classical: Option<f64>,
    pub lemma_margin: Option<f64>,
    pub prop2_margin: Option<f64>,
    pub energy_ratio: Option<f64>,
    pub dissipation_ratio: Option<f64>,
    pub kappa_d: Option<f64>,
    pub turbulent_ratio: Option<f64>,
    pub laminar_ratio: Option<f64>,
    pub fit_rate: Option<f64>,
    pub fit_r_squared: Option<f64>,
    pub picard_iterations: Option<usize>,
    pub pde_residual: Option<f64>,
}

impl SummaryRow {
    fn with_params(params: &PhysicalParams) -> Self {
        let g = |theta| grashof(params, theta).ok();
        Self {
            g_0: g(THETAS[0]),
            g_1: g(THETAS[1]),
            g_3_2: g(THETAS[2]),
            g_2: g(THETAS[3]),
            g_3: g(THETAS[4]),
            ..Default::default()
        }
    }

    fn fill_averages(&mut self, avg: &Averages, k: Option<&KolmogorovReport>, d: Option<&DissipationScales>) {
        self.u = Some(avg.u);
        self.e = Some(avg.e);
        self.big_u = Some(avg.big_u);
        self.epsilon = Some(avg.epsilon);
        self.reynolds = Some(avg.reynolds);
        self.reynolds_classical = Some(avg.reynolds_classical);
        if let Some(k) = k {
            self.lemma_margin = Some(k.lemma_margin);
            self.prop2_margin = Some(k.prop2_margin);
            self.energy_ratio = k.energy_ratio;
            self.dissipation_ratio = k.dissipation_ratio;
        }
        if let Some(d) = d {
            self.kappa_d = Some(d.kappa_d);
            self.turbulent_ratio = Some(d.turbulent_ratio);
            self.laminar_ratio = Some(d.laminar_ratio);
        }
    }

    fn fill_picard(&mut self, out: &PicardOutcome) {
        self.picard_iterations = Some(out.residuals.len());
        self.pde_residual = Some(out.pde_residual);
    }
}

/// What a finished run reports back.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: Status,
    pub out_dir: PathBuf,
    pub files: Vec<FileEntry>,
    pub row: SummaryRow,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

struct Artifacts {
    dir: PathBuf,
    names: Vec<String>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            names: Vec::new(),
        })
    }

    fn text(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, content)?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| LabError::Config(e.to_string()))?;
        s.push('\n');
        self.text(name, &s)
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| LabError::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Config(e.to_string()))?;
        self.text(name, &String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn snapshot(&mut self, name: &str, field: &SpectralField, ell0: f64) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        save_snapshot(&path, field, ell0)?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, config: &ExperimentConfig, status: Status) -> Result<Vec<FileEntry>> {
        self.names.sort();
        self.names.dedup();
        let mut files = Vec::with_capacity(self.names.len());
        for name in &self.names {
            let bytes = fs::read(self.dir.join(name))?;
            files.push(FileEntry {
                path: name.clone(),
                bytes: bytes.len() as u64,
                sha256: hex_digest(&bytes),
            });
        }
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            status,
            config: config.clone(),
            files: files.clone(),
        };
        let mut s = serde_json::to_string_pretty(&manifest).map_err(|e| LabError::Config(e.to_string()))?;
        s.push('\n');
        fs::write(self.dir.join("manifest.json"), s)?;
        Ok(files)
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file, as recorded in manifests.
pub fn file_checksum(path: &Path) -> Result<String> {
    Ok(hex_digest(&fs::read(path)?))
}

/// Runs a resolved configuration, writing artifacts into `out_dir`.
///
/// A solver's non-convergence is a [`Status::Diverged`] outcome, not an
/// error; errors are numerical failures or I/O problems.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    if config.kind == ExperimentKind::Sweep {
        return run_sweep(config, out_dir);
    }
    let mut art = Artifacts::new(out_dir)?;
    let mut row = SummaryRow::with_params(&config.params);
    let status = match config.kind {
        ExperimentKind::Evolve => run_evolve(config, &mut art, &mut row)?,
        ExperimentKind::StationaryPicard => run_picard(config, &mut art, &mut row)?,
        ExperimentKind::Oseen => run_oseen(config, &mut art, &mut row)?,
        ExperimentKind::Stability => run_stability(config, &mut art, &mut row)?,
        ExperimentKind::SpectraAudit => run_spectra(config, &mut art, &mut row)?,
        ExperimentKind::ForceAudit => run_force_audit(config, &mut art)?,
        ExperimentKind::KernelAudit => run_kernel_audit(config, &mut art)?,
        ExperimentKind::Sweep => unreachable!("handled above"),
    };
    row.status = status_label(status).into();
    let files = art.finish(config, status)?;
    Ok(RunOutcome {
        status,
        out_dir: out_dir.to_path_buf(),
        files,
        row,
    })
}

fn status_label(s: Status) -> &'static str {
    match s {
        Status::Completed => "completed",
        Status::Diverged => "diverged",
        Status::Failed => "failed",
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref()
        .ok_or_else(|| LabError::Config(format!("configuration was not resolved: missing [{name}]")))
}

#[derive(Serialize)]
struct GrashofEntry {
    theta: f64,
    formula: f64,
    from_force: f64,
}

fn grashof_table(f: &SpectralField, params: &PhysicalParams) -> Result<Vec<GrashofEntry>> {
    THETAS
        .iter()
        .map(|&theta| {
            Ok(GrashofEntry {
                theta,
                formula: grashof(params, theta)?,
                from_force: if f.is_zero() {
                    0.0
                } else {
                    grashof_from_force(f, params, theta)?
                },
            })
        })
        .collect()
}

fn note<T>(r: Result<T>, notes: &mut Vec<String>, what: &str) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    }
}

#[derive(Serialize)]
struct EvolveSummary {
    steps: usize,
    final_time: f64,
    final_dt: f64,
    halvings: usize,
    initial_energy: f64,
    final_energy: f64,
    max_gronwall_margin: Option<f64>,
    max_abs_balance_residual: f64,
    grashof: Vec<GrashofEntry>,
    averages: Option<Averages>,
    kolmogorov: Option<KolmogorovReport>,
    dissipation: Option<DissipationScales>,
    final_decay_rate: Option<f64>,
    notes: Vec<String>,
}

fn run_evolve(config: &ExperimentConfig, art: &mut Artifacts, row: &mut SummaryRow) -> Result<Status> {
    let ev = section(&config.evolve, "evolve")?;
    let cfg = config.evolver_config()?;
    let initial = section(&ev.initial, "evolve.initial")?;
    let f = build_force(&config.force_spec(), &config.grid)?;
    let u0 = random_initial(&config.grid, initial, config.seed)?;
    let out = evolve(&u0, &f, &cfg)?;
    let rec = &out.record;
    let mut notes = Vec::new();
    let window = ev.window.unwrap_or(0.5 * (1.0 - ev.window_start_fraction) * ev.t_end);
    let averages = note(
        long_time_averages(rec, window, ev.window_start_fraction),
        &mut notes,
        "averages",
    );
    let kolmogorov = match &averages {
        Some(a) => note(kolmogorov_diagnostics(a, &f, &config.params), &mut notes, "kolmogorov"),
        None => None,
    };
    let dissipation = match &averages {
        Some(a) => note(dissipation_scales(a, &config.params), &mut notes, "dissipation scales"),
        None => None,
    };
    let g = config.grid;
    let final_fit = note(
        exponential_decay_fit(
            &out.final_state,
            g.delta_kappa(),
            (g.kappa_max() / g.delta_kappa() - 0.5).floor() * g.delta_kappa(),
            None,
        ),
        &mut notes,
        "final spectrum fit",
    );
    if let Some(a) = &averages {
        row.fill_averages(a, kolmogorov.as_ref(), dissipation.as_ref());
    }
    if let Some(fit) = &final_fit {
        row.fit_rate = Some(fit.rate);
        row.fit_r_squared = Some(fit.r_squared);
    }
    let summary = EvolveSummary {
        steps: rec.len() - 1,
        final_time: rec.final_time(),
        final_dt: out.final_dt,
        halvings: rec.halvings,
        initial_energy: rec.energy[0],
        final_energy: *rec.energy.last().expect("record is never empty"),
        max_gronwall_margin: if config.params.alpha > 0.0 {
            Some(gronwall_margin(rec)?)
        } else {
            None
        },
        max_abs_balance_residual: rec.balance_residual.iter().fold(0.0, |m, r| m.max(r.abs())),
        grashof: grashof_table(&f, &config.params)?,
        averages,
        kolmogorov,
        dissipation,
        final_decay_rate: final_fit.map(|f| f.rate),
        notes,
    };
    art.text("diagnostics.csv", &rec.to_csv())?;
    art.text("spectrum.csv", &shell_spectrum(&out.final_state).to_csv())?;
    art.json("summary.json", &summary)?;
    art.snapshot("final.nsk", &out.final_state, config.params.ell0)?;
    for (k, (_, u)) in out.snapshots.iter().enumerate() {
        art.snapshot(&format!("snapshots/{k:06}.nsk"), u, config.params.ell0)?;
    }
    Ok(Status::Completed)
}

#[derive(Serialize)]
struct PicardSummary<'a> {
    variant: Variant,
    verdict: &'a crate::stationary::Verdict,
    residuals: &'a [f64],
    contraction_ratios: Vec<f64>,
    first_term_norm: f64,
    solution_norm: f64,
    pde_residual: f64,
    apriori: crate::stationary::AprioriMargins,
    pressure_defect: f64,
    grashof: Vec<GrashofEntry>,
}

fn picard_summary<'a>(
    out: &'a PicardOutcome,
    cfg: &PicardConfig,
    f: &SpectralField,
    params: &PhysicalParams,
) -> Result<PicardSummary<'a>> {
    let p = pressure_recover(&out.solution);
    Ok(PicardSummary {
        variant: cfg.variant,
        verdict: &out.verdict,
        residuals: &out.residuals,
        contraction_ratios: out.contraction_ratios(),
        first_term_norm: out.first_term_norm,
        solution_norm: norm(&out.solution, working_norm(cfg.variant, params))?,
        pde_residual: out.pde_residual,
        apriori: out.apriori,
        pressure_defect: pressure_defect(&out.solution, &p),
        grashof: grashof_table(f, params)?,
    })
}

fn verdict_status(out: &PicardOutcome) -> Status {
    if out.verdict.converged() {
        Status::Completed
    } else {
        Status::Diverged
    }
}

fn run_picard(config: &ExperimentConfig, art: &mut Artifacts, row: &mut SummaryRow) -> Result<Status> {
    let pc = section(&config.picard, "picard")?;
    let f = build_force(&config.force_spec(), &config.grid)?;
    let out = picard_solve(&f, &config.params, pc)?;
    row.fill_picard(&out);
    art.json("summary.json", &picard_summary(&out, pc, &f, &config.params)?)?;
    art.text("spectrum.csv", &shell_spectrum(&out.solution).to_csv())?;
    art.snapshot("solution.nsk", &out.solution, config.params.ell0)?;
    Ok(verdict_status(&out))
}

#[derive(Serialize)]
struct OseenRow {
    n: usize,
    norm: f64,
    catalan_bound: f64,
    support_radius: f64,
    support_limit: f64,
    partial_residual: Option<f64>,
}

#[derive(Serialize)]
struct OseenSummary<'a> {
    ledger: &'a crate::stationary::OseenLedger,
    picard: Option<PicardSummary<'a>>,
}

fn run_oseen(config: &ExperimentConfig, art: &mut Artifacts, row: &mut SummaryRow) -> Result<Status> {
    let os = section(&config.oseen, "oseen")?;
    let pc = section(&config.picard, "picard")?;
    let params = &config.params;
    let f = build_force(&config.force_spec(), &config.grid)?;
    let u1 = resolvent(&f, params.nu, 0.0);
    let c_emp = empirical_bilinear_constant(
        &f,
        params,
        Variant::Classical,
        &[(u1.clone(), u1)],
        os.random_probes,
        config.seed,
    )?;
    let reference = if os.compare_picard {
        Some(picard_solve(&f, params, pc)?)
    } else {
        None
    };
    let usable = reference
        .as_ref()
        .filter(|r| r.verdict.converged())
        .map(|r| &r.solution);
    let exp = oseen_expand(&f, params, os.n_max, c_emp, usable)?;
    let rows: Vec<OseenRow> = exp
        .ledger
        .terms
        .iter()
        .map(|t| OseenRow {
            n: t.n,
            norm: t.norm,
            catalan_bound: t.catalan_bound,
            support_radius: t.support_radius,
            support_limit: t.support_limit,
            partial_residual: t.partial_residual,
        })
        .collect();
    if let Some(r) = &reference {
        row.fill_picard(r);
    }
    let status = reference.as_ref().map(verdict_status).unwrap_or(Status::Completed);
    art.csv("oseen.csv", &rows)?;
    art.json(
        "oseen.json",
        &OseenSummary {
            ledger: &exp.ledger,
            picard: match &reference {
                Some(r) => Some(picard_summary(r, pc, &f, params)?),
                None => None,
            },
        },
    )?;
    art.snapshot("partial_sum.nsk", &exp.partial_sum, params.ell0)?;
    Ok(status)
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    picard: PicardSummary<'a>,
    report: Option<crate::dynamics::StabilityReport>,
}

fn run_stability(config: &ExperimentConfig, art: &mut Artifacts, row: &mut SummaryRow) -> Result<Status> {
    let st = section(&config.stability, "stability")?;
    let pc = section(&config.picard, "picard")?;
    let f = build_force(&config.force_spec(), &config.grid)?;
    let star = picard_solve(&f, &config.params, pc)?;
    row.fill_picard(&star);
    let status = verdict_status(&star);
    let report = if status == Status::Completed {
        let cfg = crate::dynamics::EvolverConfig {
            params: config.params,
            grid: config.grid,
            dt: st.dt,
            t_end: st.t_end,
            scheme: st.scheme,
            snapshot_every: None,
            window_start_fraction: 0.5,
            adaptive: true,
        };
        let seeds = section(&st.seeds, "stability.seeds")?;
        let pert = section(&st.perturbation, "stability.perturbation")?;
        Some(stability_experiment(
            &star.solution,
            &f,
            seeds,
            pert,
            &cfg,
            st.residual_tol,
        )?)
    } else {
        None
    };
    if let Some(r) = &report {
        row.fit_rate = r.runs.iter().map(|x| x.rate).reduce(f64::min);
        row.fit_r_squared = r.runs.iter().map(|x| x.fit.r_squared).reduce(f64::min);
    }
    art.json(
        "stability.json",
        &StabilitySummary {
            picard: picard_summary(&star, pc, &f, &config.params)?,
            report,
        },
    )?;
    art.snapshot("stationary.nsk", &star.solution, config.params.ell0)?;
    Ok(status)
}

#[derive(Serialize)]
struct SpectraSummary<'a> {
    picard: PicardSummary<'a>,
    decay_fit: Option<crate::spectra::DecayFit>,
    gevrey: Option<crate::spectra::GevreyRadius>,
    notes: Vec<String>,
}

fn run_spectra(config: &ExperimentConfig, art: &mut Artifacts, row: &mut SummaryRow) -> Result<Status> {
    let sp = section(&config.spectra, "spectra")?;
    let pc = section(&config.picard, "picard")?;
    let f = build_force(&config.force_spec(), &config.grid)?;
    let out = picard_solve(&f, &config.params, pc)?;
    row.fill_picard(&out);
    let lo = *section(&sp.kappa_lo, "spectra.kappa_lo")?;
    let hi = *section(&sp.kappa_hi, "spectra.kappa_hi")?;
    let betas = section(&sp.betas, "spectra.betas")?;
    let mut notes = Vec::new();
    let fit = note(
        exponential_decay_fit(&out.solution, lo, hi, sp.target),
        &mut notes,
        "decay fit",
    );
    let gev = note(
        gevrey_radius(&out.solution, sp.sobolev_index, betas, lo, hi),
        &mut notes,
        "gevrey radius",
    );
    if let Some(fit) = &fit {
        row.fit_rate = Some(fit.rate);
        row.fit_r_squared = Some(fit.r_squared);
    }
    art.text("spectrum.csv", &shell_spectrum(&out.solution).to_csv())?;
    art.json(
        "spectra.json",
        &SpectraSummary {
            picard: picard_summary(&out, pc, &f, &config.params)?,
            decay_fit: fit,
            gevrey: gev,
            notes,
        },
    )?;
    Ok(verdict_status(&out))
}

#[derive(Serialize)]
struct ConcentrationEntry {
    mu: f64,
    outside_l2: f64,
}

#[derive(Serialize)]
struct ForceAudit {
    lattice_points: usize,
    norms: crate::dynamics::ForceNorms,
    norm_ratios: Vec<crate::forcing::NormRatio>,
    grashof: Vec<GrashofEntry>,
    concentration: Vec<ConcentrationEntry>,
}

fn run_force_audit(config: &ExperimentConfig, art: &mut Artifacts) -> Result<Status> {
    let fa = section(&config.force_audit, "force_audit")?;
    let spec = config.force_spec();
    let f = build_force(&spec, &config.grid)?;
    let conc = spatial_concentration(&f, &config.grid, config.params.length, &fa.mus)?;
    let audit = ForceAudit {
        lattice_points: lattice_points(&config.params)?.len(),
        norms: force_norms(&f)?,
        norm_ratios: audit_norm_equivalence(&spec, &config.grid, &fa.s_values, &fa.p_values)?,
        grashof: grashof_table(&f, &config.params)?,
        concentration: fa
            .mus
            .iter()
            .zip(conc)
            .map(|(&mu, outside_l2)| ConcentrationEntry { mu, outside_l2 })
            .collect(),
    };
    art.csv("norm_ratios.csv", &audit.norm_ratios)?;
    art.json("force_audit.json", &audit)?;
    art.snapshot("force.nsk", &f, config.params.ell0)?;
    Ok(Status::Completed)
}

#[derive(Serialize)]
struct KernelRow {
    r: f64,
    closed_form: f64,
    quadrature: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct KernelAudit {
    max_relative_error: f64,
    mass: f64,
    mass_error: f64,
    bound: crate::kernels::PiecewiseBound,
    transfer: crate::kernels::TransferReport,
}

fn run_kernel_audit(config: &ExperimentConfig, art: &mut Artifacts) -> Result<Status> {
    let ks = section(&config.kernel, "kernel")?;
    let k = BesselKernel::new(config.params.nu, config.params.alpha)?;
    let rows = ks
        .radii
        .iter()
        .map(|&r| {
            let closed_form = k.eval(r)?;
            let quadrature = k.radial_quadrature(r)?;
            Ok(KernelRow {
                r,
                closed_form,
                quadrature,
                relative_error: ((quadrature - closed_form) / closed_form).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mass = k.mass()?;
    let n = ks.tail_exponent;
    let tail = move |s: f64| (1.0 + s).powf(-n);
    let audit = KernelAudit {
        max_relative_error: rows.iter().map(|r| r.relative_error).fold(0.0, f64::max),
        mass,
        mass_error: (mass - 1.0 / k.alpha).abs(),
        bound: k.piecewise_bound(),
        transfer: decay_transfer_check(&k, &tail, n, &ks.tail_radii)?,
    };
    art.csv("kernel.csv", &rows)?;
    art.json("kernel.json", &audit)?;
    Ok(Status::Completed)
}

fn run_point(base: &ExperimentConfig, sweep: &SweepSection, index: usize, value: f64, dir: &Path) -> SummaryRow {
    let mut point = base.clone();
    point.kind = sweep.kind;
    point.sweep = None;
    let result = point
        .apply(sweep.parameter, value)
        .and_then(|_| point.clone().resolve())
        .and_then(|resolved| run(&resolved, dir));
    match result {
        Ok(out) => SummaryRow {
            index,
            value: Some(value),
            ..out.row
        },
        Err(e) => {
            log::warn!("sweep point {index} ({:?} = {value}) failed: {e}", sweep.parameter);
            let mut row = SummaryRow::with_params(&point.params);
            row.index = index;
            row.value = Some(value);
            row.status = status_label(Status::Failed).into();
            row.message = e.to_string();
            row
        }
    }
}

/// Runs every sweep point in parallel, each in its own `point-NNN`
/// directory, and consolidates one row per point in input order.
fn run_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let sweep = section(&config.sweep, "sweep")?;
    let mut art = Artifacts::new(out_dir)?;
    let rows: Vec<SummaryRow> = sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| run_point(config, sweep, i, v, &out_dir.join(format!("point-{i:03}"))))
        .collect();
    let status = if rows.iter().any(|r| r.status == status_label(Status::Failed)) {
        Status::Failed
    } else if rows.iter().any(|r| r.status == status_label(Status::Diverged)) {
        Status::Diverged
    } else {
        Status::Completed
    };
    art.csv("sweep.csv", &rows)?;
    art.json("sweep.json", &rows)?;
    let files = art.finish(config, status)?;
    Ok(RunOutcome {
        status,
        out_dir: out_dir.to_path_buf(),
        files,
        row: SummaryRow {
            status: status_label(status).into(),
            ..SummaryRow::with_params(&config.params)
        },
    })
}
