use cvples_core::diagnostics::velocity;
use cvples_core::*;
use std::f64::consts::PI;

fn tgv(n: usize) -> (TgvParams, Grid, ConservedState) {
    let p = TgvParams::default();
    let g = p.grid(n).unwrap();
    let s = init_tgv(&g, &p, &p.thermo()).unwrap();
    (p, g, s)
}

#[test]
fn tgv_energy_is_resolution_independent() {
    for n in [16, 32, 64] {
        let (p, _, s) = tgv(n);
        let e = kinetic_energy(&s).unwrap();
        assert!((e - p.v0 * p.v0 / 8.0).abs() < 1e-12, "{n}");
    }
}

#[test]
fn tgv_initial_divergence_and_enstrophy() {
    let (_, g, s) = tgv(32);
    let u = velocity(&s).unwrap();
    let d = Differentiator::new(g).unwrap();
    assert!(max_divergence(&u, &d).unwrap() < 1e-9);
    // omega = (-cos x sin y sin z, -sin x cos y sin z, 2 sin x sin y cos z)
    let xi = volume_average(&enstrophy(&u).unwrap());
    assert!((xi - 3.0 / 8.0).abs() < 1e-6, "{xi}");
}

#[test]
fn tgv_spectrum_sits_in_low_shells() {
    let (_, _, s) = tgv(32);
    let (_, e) = energy_spectrum(&velocity(&s).unwrap()).unwrap();
    let total: f64 = e.iter().sum();
    assert!(e[..=2].iter().sum::<f64>() >= 0.999 * total);
}

#[test]
fn enstrophy_hand_curl() {
    let g = Grid::cube(32, 2.0 * PI).unwrap();
    let u = VectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()]);
    let xi = enstrophy(&u).unwrap();
    let exact = ScalarField::from_fn(g, |x, _, _| 0.5 * x.cos() * x.cos());
    for (a, b) in xi.data().iter().zip(exact.data()) {
        assert!((a - b).abs() < 1e-5);
    }
    let still = VectorField::from_fn(g, |_, _, _| [1.0, -2.0, 0.5]);
    assert!(enstrophy(&still).unwrap().max_abs() < 1e-12);
}

#[test]
fn swirl_peaks_near_core_radius() {
    let p = HelixParams::default();
    // Finer quadrature as oracle for the radial profile.
    let fine = HelixParams { samples_per_turn: 2048, ..p };
    let f = HelixField::new(&fine, [0.0, 0.0], 0.0).unwrap();
    let rc = p.core_radius();
    let th: f64 = 0.3;
    let speed = |dr: f64| {
        let r = p.radius + dr;
        let u = f.velocity([r * th.cos(), p.ell() * th, r * th.sin()]);
        let v = f.velocity([p.radius * th.cos(), p.ell() * th, p.radius * th.sin()]);
        // swirl relative to the local filament motion
        ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
    };
    let (mut best, mut arg) = (0.0, 0.0);
    for i in 1..=600 {
        let dr = 3.0 * rc * i as f64 / 600.0;
        let s = 0.5 * (speed(dr) + speed(-dr));
        if s > best {
            (best, arg) = (s, dr);
        }
    }
    assert!((arg / rc - 1.0).abs() < 0.2, "peak at {} r_c", arg / rc);
}

#[test]
fn helix_velocity_is_solenoidal_when_resolved() {
    let p = HelixParams {
        core_ratio: 0.3,
        n_kernel: 2.0,
        ..HelixParams::default()
    };
    let g = p.grid(32).unwrap();
    let u = helix_velocity(&g, &p).unwrap();
    let peak = u.norm_squared().max().sqrt();
    let div = gradient(&u).unwrap().trace();
    let rms = volume_average(&div.map(|v| v * v)).sqrt();
    assert!(rms <= 1e-3 * peak / g.spacing(Axis::X), "{}", rms * g.spacing(Axis::X) / peak);
}

#[test]
fn ideal_helix_has_subcell_deviation() {
    let p = HelixParams {
        perturbation: 0.0,
        ..HelixParams::default()
    };
    let g = p.grid(32).unwrap();
    let init = init_helix(&g, &p).unwrap();
    let d = vortex_deviation(&init.state, &p).unwrap();
    assert!(d <= g.spacing(Axis::X).max(g.spacing(Axis::Z)), "{d}");
    assert!((init.peak_speed / init.sound_speed - p.mach_peak).abs() < 1e-12);
}

#[test]
fn quadrature_guard_trips_on_coarse_sampling() {
    let p = HelixParams {
        samples_per_turn: 8,
        ..HelixParams::default()
    };
    assert!(matches!(
        check_helix_convergence(&p, 1e-3),
        Err(Error::QuadratureNotConverged { .. })
    ));
    assert!(check_helix_convergence(&HelixParams::default(), 1e-3).is_ok());
}

#[test]
fn sgs_dissipation_vanishes_without_viscosity() {
    let (_, g, s) = tgv(16);
    let strain = strain_rate(&velocity(&s).unwrap()).unwrap();
    assert_eq!(sgs_dissipation(&ScalarField::zeros(g), &strain).unwrap(), 0.0);
}
