mod common;

use common::{force, unit_params, GENERIC};
use nslab::spectral::{norm, GridSpec, SpectralField};
use nslab::stationary::{
    catalan, catalan_partial_sums, catalan_sequence, empirical_bilinear_constant, generating_function,
    gevrey_picard_check, log_convex_increasing, oseen_expand, picard_solve, pressure_defect, pressure_recover,
    resolvent, working_norm, PicardConfig, Variant, Verdict,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(2.0, 16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(8) })]

    #[test]
    fn converged_fixed_points_solve_the_equations(
        nu in 0.5f64..2.0,
        alpha in 0.1f64..1.0,
        amp in 0.01f64..0.5,
        damped in any::<bool>(),
    ) {
        let g = grid();
        let p = unit_params(nu, alpha, amp);
        let f = force(&p, &g, GENERIC);
        let variant = if damped { Variant::Damped } else { Variant::Classical };
        let cfg = PicardConfig::new(variant);
        let out = picard_solve(&f, &p, &cfg).unwrap();
        prop_assert!(out.verdict.converged(), "{:?}", out.verdict);
        prop_assert!(out.pde_residual <= 10.0 * cfg.tolerance);
        let m = out.apriori;
        prop_assert!(m.homogeneous <= 1e-6 * m.f_hdot_minus1);
        if damped {
            prop_assert!(m.damped.unwrap() <= 1e-6 * m.f_h_minus1);
        }
        let pr = pressure_recover(&out.solution);
        prop_assert!(pressure_defect(&out.solution, &pr) <= 1e-12 * f.max_abs());
        prop_assert!(out.solution.max_divergence() <= 1e-12 * out.solution.max_abs());
    }
}

#[test]
fn zero_force_has_only_the_trivial_solution() {
    let g = grid();
    let p = unit_params(1.0, 0.5, 0.0);
    let f = SpectralField::zeros(g);
    for v in [Variant::Damped, Variant::Classical] {
        let out = picard_solve(&f, &p, &PicardConfig::new(v)).unwrap();
        assert!(out.solution.is_zero());
    }
}

#[test]
fn energy_norm_over_grashof_stays_bounded() {
    let g = grid();
    let mut ratios = Vec::new();
    for nu in [0.5, 1.0, 2.0] {
        for amp in [1e-3, 1e-2, 1e-1] {
            let p = unit_params(nu, 0.5, amp);
            let f = force(&p, &g, GENERIC);
            let out = picard_solve(&f, &p, &PicardConfig::new(Variant::Damped)).unwrap();
            assert!(out.verdict.converged());
            let e = norm(&out.solution, working_norm(Variant::Damped, &p)).unwrap();
            let g32 = nslab::forcing::grashof(&p, 1.5).unwrap();
            ratios.push(e / (nu * g32));
        }
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("||U||_E / (nu G_3/2) in [{min:.4}, {max:.4}]");
    assert!(max / min < 10.0);
}

#[test]
fn large_forces_are_reported_not_raised() {
    let g = grid();
    let p = unit_params(0.05, 0.0, 50.0);
    let f = force(&p, &g, GENERIC);
    let mut cfg = PicardConfig::new(Variant::Classical);
    cfg.max_iters = 60;
    let out = picard_solve(&f, &p, &cfg).unwrap();
    assert!(matches!(out.verdict, Verdict::Diverged { .. }), "{:?}", out.verdict);
}

#[test]
fn oseen_terms_respect_support_growth_and_match_picard() {
    let g = GridSpec::new(2.0, 32).unwrap();
    let p = unit_params(1.0, 0.0, 0.05);
    let f = force(&p, &g, GENERIC);
    let u1 = resolvent(&f, p.nu, 0.0);
    let c = empirical_bilinear_constant(&f, &p, Variant::Classical, &[(u1.clone(), u1)], 4, 9).unwrap();
    let mut cfg = PicardConfig::new(Variant::Classical);
    cfg.tolerance = 1e-13;
    let pic = picard_solve(&f, &p, &cfg).unwrap();
    assert!(pic.verdict.converged());
    let exp = oseen_expand(&f, &p, 6, c, Some(&pic.solution)).unwrap();
    assert!(exp.ledger.contraction_radius < 1.0);
    let kind = working_norm(Variant::Classical, &p);
    let scale = norm(&pic.solution, kind).unwrap();
    for t in &exp.ledger.terms {
        assert!(
            t.support_radius <= t.support_limit,
            "n = {}: {} > {}",
            t.n,
            t.support_radius,
            t.support_limit
        );
        assert!(
            t.norm <= t.catalan_bound * (1.0 + 1e-9),
            "n = {}: {} > {}",
            t.n,
            t.norm,
            t.catalan_bound
        );
    }
    let last = exp.ledger.terms.last().unwrap().partial_residual.unwrap();
    assert!(last / scale < 1e-9, "relative partial-sum residual {}", last / scale);
    let residuals: Vec<f64> = exp.ledger.terms.iter().map(|t| t.partial_residual.unwrap()).collect();
    for w in residuals.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn catalan_recursion_matches_closed_forms() {
    let seq = catalan_sequence(40);
    for (i, a) in seq.iter().enumerate() {
        let n = i + 1;
        // A_n = binom(2n - 2, n - 1) / n
        let mut b = BigUint::from(1u32);
        for k in 0..(n - 1) {
            b = b * BigUint::from((2 * (n - 1) - k) as u64) / BigUint::from((k + 1) as u64);
        }
        assert_eq!(*a, b / BigUint::from(n as u64));
    }
    assert_eq!(catalan(12).unwrap(), BigUint::from(58786u32));
    // Inside the disc the tail is geometric; on the boundary z = -1/4 the
    // alternating tail decays like n^{-3/2}.
    for (z, tol) in [(-0.1, 1e-12), (0.05, 1e-12), (0.2, 1e-12), (-0.25, 1e-4)] {
        let s = catalan_partial_sums(z, 2000);
        assert!(
            (s.last().unwrap() - generating_function(z).unwrap()).abs() < tol,
            "z = {z}"
        );
    }
}

#[test]
fn gevrey_curve_of_a_stationary_state_is_log_convex() {
    let g = grid();
    let p = unit_params(1.0, 0.5, 0.5);
    let f = force(&p, &g, GENERIC);
    let out = picard_solve(&f, &p, &PicardConfig::new(Variant::Damped)).unwrap();
    let betas: Vec<f64> = (0..8).map(|k| 0.1 * k as f64).collect();
    let curve = gevrey_picard_check(&out.solution, &betas).unwrap();
    assert!(log_convex_increasing(&curve, 1e-12));
}
