mod common;

use common::{force, solenoidal, unit_params, GENERIC};
use nslab::dynamics::{
    balance_residual_simpson, evolve, gronwall_bound, gronwall_margin, kolmogorov_diagnostics, long_time_averages,
    stability_experiment, EvolverConfig, InitialSpec, Scheme,
};
use nslab::forcing::PhysicalParams;
use nslab::spectral::{norm, GridSpec, NormKind, SpectralField, VectorSamples};
use nslab::stationary::{picard_solve, PicardConfig, Variant};
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(2.0, 16).unwrap()
}

fn config(p: PhysicalParams, dt: f64, t_end: f64, scheme: Scheme) -> EvolverConfig {
    EvolverConfig {
        params: p,
        grid: grid(),
        dt,
        t_end,
        scheme,
        snapshot_every: None,
        window_start_fraction: 0.5,
        adaptive: true,
    }
}

fn hm1_sq(f: &SpectralField) -> f64 {
    norm(f, NormKind::Hdot(-1.0)).unwrap().powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(6) })]

    #[test]
    fn runs_stay_solenoidal_and_under_the_envelope(
        seed in any::<u64>(),
        nu in 0.2f64..1.0,
        alpha in 0.1f64..1.0,
        amp in 0.0f64..1.0,
    ) {
        let g = grid();
        let p = unit_params(nu, alpha, amp);
        let f = force(&p, &g, GENERIC);
        let u0 = solenoidal(g, seed, 4.0);
        let cfg = EvolverConfig { snapshot_every: Some(10), ..config(p, 0.02, 2.0, Scheme::Rk4) };
        let run = evolve(&u0, &f, &cfg).unwrap();
        for (_, u) in &run.snapshots {
            prop_assert!(u.max_divergence() <= 1e-10);
        }
        let scale = gronwall_bound(&p, 1.0, hm1_sq(&f), 0.0).unwrap();
        prop_assert!(gronwall_margin(&run.record).unwrap() <= 1e-6 * scale);
        prop_assert!(run.record.band_energy.iter().zip(&run.record.energy).all(|(b, e)| b <= e));
    }
}

#[test]
fn shear_relaxes_to_the_stationary_shear() {
    let g = grid();
    let p = unit_params(0.4, 0.3, 1.0);
    let dk = g.delta_kappa();
    let mut f = SpectralField::forward(&VectorSamples::from_fn(g, |x| [0.5 * (dk * x[1]).sin(), 0.0, 0.0]));
    let z = num_complex::Complex64::new(0.0, 0.0);
    f.set_coeff(0, [z, z, z]);
    let rate = p.nu * dk * dk + p.alpha;
    let u_star = f.scale(1.0 / rate);
    let cfg = EvolverConfig {
        snapshot_every: Some(10),
        ..config(p, 0.01, 6.0, Scheme::Rk4)
    };
    let run = evolve(&SpectralField::zeros(g), &f, &cfg).unwrap();
    // Lawson RK4 treats the constant force to fourth order, so compare the
    // distance to U* with the exact linear decay.
    for (t, u) in &run.snapshots {
        let d = u.sub(&u_star).max_abs() / u_star.max_abs();
        let exact = (-rate * t).exp();
        assert!((d - exact).abs() <= 1e-8, "t = {t}: {d} vs {exact}");
    }
}

#[test]
fn unforced_energy_decays_at_least_like_the_damping() {
    let g = grid();
    let p = unit_params(0.3, 0.5, 0.0);
    let u0 = solenoidal(g, 3, 4.0);
    let run = evolve(&u0, &SpectralField::zeros(g), &config(p, 0.02, 3.0, Scheme::Rk4)).unwrap();
    let e0 = run.record.energy[0];
    for (t, e) in run.record.time.iter().zip(&run.record.energy) {
        assert!(*e <= (-2.0 * p.alpha * t).exp() * e0 * (1.0 + 1e-6));
    }
}

#[test]
fn energy_balance_converges_at_the_scheme_order() {
    let g = grid();
    let p = unit_params(0.3, 0.5, 0.5);
    let f = force(&p, &g, GENERIC);
    let u0 = solenoidal(g, 5, 4.0);
    for scheme in [Scheme::Rk2, Scheme::Rk4] {
        let res: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| {
                let cfg = EvolverConfig {
                    adaptive: false,
                    ..config(p, dt, 0.4, scheme)
                };
                let run = evolve(&u0, &f, &cfg).unwrap();
                balance_residual_simpson(&run.record).unwrap().abs()
            })
            .collect();
        let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        println!("{scheme:?}: residuals {res:?}, orders {orders:?}");
        let nominal = scheme.order() as f64;
        let last = *orders.last().unwrap();
        assert!(
            (last - nominal).abs() <= 0.1 * nominal,
            "{scheme:?}: measured order {last}"
        );
    }
}

#[test]
fn dissipation_is_bounded_by_band_velocity_times_force() {
    let g = grid();
    for (nu, alpha, amp) in [(0.5, 0.25, 0.5), (0.5, 1.0, 2.0), (1.0, 0.5, 1.0)] {
        let p = unit_params(nu, alpha, amp);
        let f = force(&p, &g, GENERIC);
        let run = evolve(&solenoidal(g, 9, 3.0), &f, &config(p, 0.02, 8.0, Scheme::Rk4)).unwrap();
        let avg = long_time_averages(&run.record, 2.0, 0.5).unwrap();
        assert!(avg.u_ell0 <= avg.u);
        assert!(avg.plain.u_sq <= hm1_sq(&f) / (nu * alpha) * (1.0 + 1e-3) + run.record.energy[0]);
        let k = kolmogorov_diagnostics(&avg, &f, &p).unwrap();
        println!("nu {nu} alpha {alpha}: prop2 margin {:.3e}", k.prop2_margin);
        assert!(k.prop2_margin <= 1e-6);
    }
}

#[test]
fn identical_runs_produce_identical_records() {
    let g = grid();
    let p = unit_params(0.5, 0.5, 1.0);
    let f = force(&p, &g, GENERIC);
    let u0 = solenoidal(g, 21, 4.0);
    let cfg = config(p, 0.02, 1.0, Scheme::Rk4);
    let a = evolve(&u0, &f, &cfg).unwrap();
    let b = evolve(&u0, &f, &cfg).unwrap();
    assert_eq!(a.record, b.record);
    assert_eq!(a.final_state, b.final_state);
    assert_eq!(a.record.to_csv(), b.record.to_csv());
}

#[test]
fn perturbations_of_a_stable_state_decay_at_twice_the_damping() {
    let g = grid();
    let perturbation = InitialSpec {
        energy: 1e-4,
        slope: -2.0,
        max_shell: 3.0,
    };

    // No force: the stationary state is zero and the decay is pure damping.
    let p = unit_params(0.5, 0.5, 0.0);
    let zero = SpectralField::zeros(g);
    let cfg = config(p, 0.02, 4.0, Scheme::Rk4);
    let rep = stability_experiment(&zero, &zero, &[1, 2], &perturbation, &cfg, 1e-8).unwrap();
    for r in &rep.runs {
        assert!(r.rate >= 2.0 * p.alpha * (1.0 - 1e-3), "rate {}", r.rate);
        assert!(r.envelope_margin <= 1e-12 * r.initial_distance_sq);
    }

    let p = unit_params(0.5, 0.5, 0.05);
    let f = force(&p, &g, GENERIC);
    let mut pc = PicardConfig::new(Variant::Damped);
    pc.tolerance = 1e-13;
    let pic = picard_solve(&f, &p, &pc).unwrap();
    let cfg = config(p, 0.02, 4.0, Scheme::Rk4);
    let none = InitialSpec {
        energy: 0.0,
        ..perturbation
    };
    // The discrete fixed point of the scheme sits O(dt^4) away from U*.
    let fine = EvolverConfig { dt: 0.01, ..cfg };
    let still = stability_experiment(&pic.solution, &f, &[4], &none, &fine, 1e-8).unwrap();
    assert!(still.runs[0].final_distance_sq.sqrt() <= 1e-10);
    let rep = stability_experiment(&pic.solution, &f, &[1, 2, 3], &perturbation, &cfg, 1e-8).unwrap();
    assert!(rep.hypothesis_holds);
    for r in &rep.runs {
        assert!(r.rate >= 2.0 * p.alpha * 0.95, "rate {}", r.rate);
    }
}
