#![allow(dead_code)]

use nslab::dynamics::{random_initial, InitialSpec};
use nslab::forcing::{build_force, ForceSpec, Orientation, PhysicalParams};
use nslab::spectral::{GridSpec, SpectralField, VectorSamples};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(std::f64::consts::PI, n).unwrap()
}

/// White-noise samples; their transform is a generic real field.
pub fn noise_samples(g: GridSpec, seed: u64) -> VectorSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = VectorSamples::zeros(g);
    for c in 0..3 {
        for v in s.comps[c].iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    s
}

pub fn noise_field(g: GridSpec, seed: u64) -> SpectralField {
    SpectralField::forward(&noise_samples(g, seed))
}

/// Random solenoidal field with energy on the low shells.
pub fn solenoidal(g: GridSpec, seed: u64, max_shell: f64) -> SpectralField {
    let spec = InitialSpec {
        energy: 1.0,
        slope: -2.0,
        max_shell,
    };
    random_initial(&g, &spec, seed).unwrap()
}

/// Box of half-side 2, unit injection scale: the force lives on `|k| = 1`.
pub fn unit_params(nu: f64, alpha: f64, force: f64) -> PhysicalParams {
    PhysicalParams {
        nu,
        alpha,
        ell0: 1.0,
        length: 1.0,
        force,
        rho1: 1.0,
        rho2: 2.0,
    }
}

/// Direction whose shears interact nonlinearly.
pub const GENERIC: Orientation = Orientation::Uniform([1.0, 0.4, 0.2]);

pub fn force(p: &PhysicalParams, g: &GridSpec, orientation: Orientation) -> SpectralField {
    build_force(
        &ForceSpec {
            params: *p,
            orientation,
        },
        g,
    )
    .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
