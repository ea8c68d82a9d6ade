mod common;

use common::rel;
use nslab::kernels::{decay_transfer_check, torus_consistency, BesselKernel};
use nslab::spectral::GridSpec;
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn closed_form_matches_quadrature(nu in 0.2f64..3.0, alpha in 0.1f64..3.0, lr in -2.0f64..1.6) {
        let k = BesselKernel::new(nu, alpha).unwrap();
        let r = 10f64.powf(lr);
        prop_assert!(rel(k.radial_quadrature(r).unwrap(), k.eval(r).unwrap()) <= 1e-6);
    }

    #[test]
    fn viscosity_scales_out(nu in 0.1f64..5.0, alpha in 0.1f64..5.0, r in 0.01f64..40.0) {
        let k = BesselKernel::new(nu, alpha).unwrap();
        let unit = k.unit_viscosity();
        prop_assert_eq!(unit.nu, 1.0);
        prop_assert!(rel(k.eval(r).unwrap(), unit.eval(r).unwrap() / nu) <= 1e-14);
    }
}

#[test]
fn value_at_unit_radius() {
    let k = BesselKernel::new(1.0, 1.0).unwrap();
    let e = (-1.0f64).exp() / (4.0 * PI);
    assert!(rel(k.eval(1.0).unwrap(), e) <= 1e-15);
    assert!(rel(k.radial_quadrature(1.0).unwrap(), e) <= 1e-6);
}

#[test]
fn mass_is_the_inverse_damping() {
    let k = BesselKernel::new(1.0, 2.0).unwrap();
    assert!((k.mass().unwrap() - 0.5).abs() <= 1e-6);
}

#[test]
fn piecewise_constants_match_their_suprema() {
    for (nu, alpha) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
        let k = BesselKernel::new(nu, alpha).unwrap();
        let a = k.decay_rate();
        let b = k.piecewise_bound();
        assert!(rel(b.split_radius, 2.0 / a) <= 1e-14);
        assert!(rel(b.near_constant, 1.0 / (4.0 * PI * nu)) <= 1e-3);
        assert!(rel(b.far_constant, a * (-1.0f64).exp() / (8.0 * PI * nu)) <= 1e-3);
        for r in [0.01, 0.5 * b.split_radius, b.split_radius, 3.0 * b.split_radius, 40.0] {
            let g = k.eval(r).unwrap();
            let bound = if r <= b.split_radius {
                b.near_constant / r
            } else {
                b.far_constant * (-0.5 * a * r).exp()
            };
            assert!(g <= bound * (1.0 + 1e-12), "r = {r}");
        }
    }
}

#[test]
fn algebraic_tails_pass_through_the_kernel() {
    let radii: Vec<f64> = (0..7).map(|i| 10.0 + 5.0 * i as f64).collect();
    let tail = |r: f64| (1.0 + r).powi(-4);
    let mut last = f64::INFINITY;
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let k = BesselKernel::new(1.0, alpha).unwrap();
        let rep = decay_transfer_check(&k, &tail, 4.0, &radii).unwrap();
        println!("alpha {alpha}: plateau {:.4e}, spread {:.3}", rep.plateau, rep.spread);
        assert!(rep.spread <= 1.5);
        assert!(rep.plateau <= last);
        last = rep.plateau;
    }
    // An exponential profile decays faster than any power.
    let k = BesselKernel::new(1.0, 1.0).unwrap();
    let g = |r: f64| k.eval(r).unwrap();
    let rep = decay_transfer_check(&k, &g, 4.0, &[10.0, 20.0, 40.0]).unwrap();
    assert!(rep.points[2].weighted < 1e-3 * rep.points[0].weighted);
}

#[test]
fn torus_symbol_reproduces_the_free_space_convolution() {
    // Twelve e-folding lengths of the kernel on each side.
    let k = BesselKernel::new(1.0, 1.0).unwrap();
    let g = GridSpec::new(12.0, 96).unwrap();
    let err = torus_consistency(&k, &g, 0.6).unwrap();
    println!("torus consistency error {err:.3e}");
    assert!(err <= 1e-4);
}
