use heunstep::geometry::PhysicalConfig;
use heunstep::scattering::*;
use num_complex::Complex64;
use proptest::prelude::*;

const ENERGIES: [f64; 5] = [1.1, 1.5, 2.0, 3.0, 5.0];
const SIGMAS: [f64; 4] = [-0.1, -0.25, -0.6, -1.0];

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn flux_identity_on_grid() {
    for &s in &SIGMAS {
        for &e in &ENERGIES {
            let amp = amplitudes(&PhysicalConfig::unit_step(s), e, one()).unwrap();
            assert!(
                amp.flux_defect() <= 1e-8,
                "sigma {s} E {e}: {}",
                amp.flux_defect()
            );
            let k = amp.k;
            let unit = (amp.b / amp.a).norm_sqr() + k.k2 / k.k1 * (amp.c / amp.a).norm_sqr();
            assert!((unit - 1.0).abs() <= 1e-8);
            let t = k.k2 * amp.c.norm_sqr() / (k.k1 * amp.a.norm_sqr());
            assert!(
                (t - amp.t).abs() <= 1e-10,
                "T from amplitudes {t} vs {}",
                amp.t
            );
        }
    }
}

#[test]
fn amplitudes_are_linear_in_c2() {
    let cfg = PhysicalConfig::unit_step(-0.6);
    let base = amplitudes(&cfg, 2.5, one()).unwrap();
    let lam = Complex64::new(-0.7, 2.1);
    let scaled = amplitudes(&cfg, 2.5, lam).unwrap();
    for (x, y) in [(scaled.a, base.a), (scaled.b, base.b), (scaled.c, base.c)] {
        assert!((x - lam * y).norm() <= 1e-13 * x.norm());
    }
}

/// Plane-wave decomposition of the analytic wavefunction far from the step.
fn decompose(wf: &Wavefunction, x: f64, k: f64) -> (Complex64, Complex64) {
    let h = 1e-3;
    let f = |t: f64| wf.eval(t).unwrap();
    let d = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let p = f(x);
    let i = Complex64::i();
    let fwd = (-i * k * x).exp() * (p + d / (i * k)) / 2.0;
    let bwd = (i * k * x).exp() * (p - d / (i * k)) / 2.0;
    (fwd, bwd)
}

#[test]
fn closed_forms_match_the_wavefunction_asymptotes() {
    for &x0 in &[0.0, 1.7] {
        for &(s, e) in &[(-0.25, 2.0), (-1.0, 1.5), (-0.6, 4.0)] {
            let cfg = PhysicalConfig::unit_step(s).with_x0(x0);
            let amp = amplitudes(&cfg, e, one()).unwrap();
            let wf = Wavefunction::new(&cfg, e, Complex64::new(0.0, 0.0), one()).unwrap();
            let k = amp.k;
            // the left tail decays like exp(-|x - x0| / (3|sigma|))
            let (a, b) = decompose(&wf, x0 - 90.0 * s.abs(), k.k1);
            let (c, back) = decompose(&wf, x0 + 40.0 * s.abs(), k.k2);
            assert!(
                (a - amp.a).norm() <= 1e-6 * amp.a.norm(),
                "A {a} vs {}",
                amp.a
            );
            assert!(
                (b - amp.b).norm() <= 1e-6 * amp.a.norm(),
                "B {b} vs {}",
                amp.b
            );
            assert!(
                (c - amp.c).norm() <= 1e-6 * amp.c.norm(),
                "C {c} vs {}",
                amp.c
            );
            assert!(back.norm() <= 1e-6 * amp.c.norm());
        }
    }
}

#[test]
fn right_side_is_a_single_plane_wave() {
    for &s in &SIGMAS {
        let cfg = PhysicalConfig::unit_step(s);
        let e = 2.0;
        let k2 = wavenumbers(&cfg, e).unwrap().k2;
        let wf = Wavefunction::new(&cfg, e, Complex64::new(0.0, 0.0), one()).unwrap();
        let at = |x: f64| wf.eval(x).unwrap() * (-Complex64::i() * k2 * x).exp();
        let (p, q) = (at(30.0 * s.abs()), at(40.0 * s.abs()));
        assert!((p - q).norm() <= 1e-5 * q.norm(), "sigma {s}: {p} vs {q}");
    }
}

#[test]
fn wavefunction_solves_schrodinger() {
    for &s in &[-0.25, -1.0] {
        for &e in &[1.5, 2.0, 4.0] {
            let cfg = PhysicalConfig::unit_step(s);
            let wf = Wavefunction::new(&cfg, e, Complex64::new(0.0, 0.0), one()).unwrap();
            let n = 201;
            let span = 10.0 * s.abs();
            let rows: Vec<(f64, f64)> = (0..n)
                .map(|j| {
                    let x = -span + 2.0 * span * j as f64 / (n - 1) as f64;
                    let (r, sc) = wf.schrodinger_residual(x, 1e-3).unwrap();
                    (r.norm(), sc)
                })
                .collect();
            let scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
            assert!(
                worst <= 1e-6 * scale,
                "sigma {s} E {e}: {worst} vs scale {scale}"
            );
        }
    }
}

#[test]
fn general_solution_is_linear() {
    let cfg = PhysicalConfig::unit_step(-0.4);
    let (c1, c2) = (Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.4));
    let (d1, d2) = (Complex64::new(-0.5, 0.9), Complex64::new(0.2, 0.0));
    for &x in &[-2.0, -0.3, 0.0, 0.8, 3.0] {
        let a = wavefunction_psi(x, &cfg, 2.2, c1, c2).unwrap();
        let b = wavefunction_psi(x, &cfg, 2.2, d1, d2).unwrap();
        let ab = wavefunction_psi(x, &cfg, 2.2, c1 + d1, c2 + d2).unwrap();
        assert!((a + b - ab).norm() <= 1e-12 * ab.norm().max(1.0));
    }
}

#[test]
fn smoother_step_transmits_more_than_abrupt_step() {
    for &s in &SIGMAS {
        for &e in &ENERGIES {
            let cfg = PhysicalConfig::unit_step(s);
            let k = wavenumbers(&cfg, e).unwrap();
            assert!(transmission(&cfg, e).unwrap() > abrupt_step_t(k.k1, k.k2));
        }
    }
}

#[test]
fn limits() {
    let t = transmission(&PhysicalConfig::unit_step(-1e-4), 2.0).unwrap();
    assert!((t - (12.0 * 2.0_f64.sqrt() - 16.0)).abs() < 1e-3);
    assert!(transmission(&PhysicalConfig::unit_step(-10.0), 2.0).unwrap() > 0.999);
    let cfg = PhysicalConfig::unit_step(-0.25);
    assert!(transmission(&cfg, 1.0 + 1e-10).unwrap() < 1e-3);
    assert!(reflection(&cfg, 1.0 + 1e-10).unwrap() > 0.999);
    // far past double range for a direct sinh
    let t = transmission(&PhysicalConfig::unit_step(-400.0), 3.0).unwrap();
    assert!(t.is_finite() && t > 0.999);
}

#[test]
fn reflection_falls_with_energy() {
    let cfg = PhysicalConfig::unit_step(-0.25);
    let mut last = 1.0;
    for j in 1..=200 {
        let e = 1.0 + 10.0 * j as f64 / 200.0;
        let r = reflection(&cfg, e).unwrap();
        assert!(r < last, "E {e}: {r} >= {last}");
        last = r;
    }
}

#[test]
fn reflection_ordered_by_steepness() {
    let r = |s: f64| reflection(&PhysicalConfig::unit_step(s), 2.0).unwrap();
    assert!(r(-0.1) > r(-0.25));
    assert!(r(-0.25) > r(-0.6));
}

#[test]
fn sign_of_sigma_does_not_change_t() {
    for &s in &SIGMAS {
        let a = transmission(&PhysicalConfig::unit_step(s), 2.0).unwrap();
        let b = transmission(&PhysicalConfig::unit_step(-s), 2.0).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wavenumber_identity(
        v0 in -5.0..5.0f64, v1 in -5.0..5.0f64, mass in 0.1..10.0f64,
        hbar in 0.1..5.0f64, excess in 1e-6..20.0f64,
    ) {
        let cfg = PhysicalConfig::new(v0, v1, -1.0, 0.0, mass, hbar).unwrap();
        let e = regime_threshold(&cfg) + excess;
        let k = wavenumbers(&cfg, e).unwrap();
        let size = 3.0 * k.k1 * k.k1;
        prop_assert!(k.identity_residual().abs() <= 1e-12 * size.max(1.0));
    }

    #[test]
    fn unitarity_and_x0_invariance(
        v1 in 0.05..4.0f64, sigma in -3.0..-0.02f64, excess in 1e-3..10.0f64, x0 in -50.0..50.0f64,
    ) {
        let cfg = PhysicalConfig::new(0.0, v1, sigma, 0.0, 1.0, 1.0).unwrap();
        let e = v1 + excess;
        let t = transmission(&cfg, e).unwrap();
        let r = reflection(&cfg, e).unwrap();
        prop_assert!(t > 0.0 && t <= 1.0);
        prop_assert!((0.0..1.0).contains(&r));
        prop_assert!((t + r - 1.0).abs() <= 1e-15);
        prop_assert_eq!(t, transmission(&cfg.with_x0(x0), e).unwrap());
        let k = wavenumbers(&cfg, e).unwrap();
        prop_assert!(t > abrupt_step_t(k.k1, k.k2));
    }
}
