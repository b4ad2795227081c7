use proptest::prelude::*;
use slowpass::dhb::*;
use slowpass::models::*;
use slowpass::qss::*;

fn xs() -> Vec<f64> {
    (0..=40).map(|k| -10.0 + 0.5 * k as f64).collect()
}

fn params(beta_r: f64, beta_i: f64) -> CglParams {
    CglParams {
        beta_r,
        beta_i,
        ..Default::default()
    }
}

#[test]
fn closed_form_matches_growth_scan_with_complex_diffusivity() {
    let p = params(3.0, 1.0);
    let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
    let closed = buffer_curve_closed_form(&p, &s, &xs()).unwrap();
    let modes = ModeSum::new(&s, 20.0, 2001).unwrap();
    let scanned = buffer_curve_from_growth(&p, &modes, &xs(), -1.0, BufferOrder::Leading).unwrap();
    let mut compared = 0;
    for (a, b) in closed.samples.iter().zip(&scanned.samples) {
        if a.valid && b.valid {
            assert!((a.mu - b.mu).abs() < 1e-6, "x={}: {} vs {}", a.x, a.mu, b.mu);
            compared += 1;
        }
    }
    assert!(compared > 20);
}

#[test]
fn spot_value_without_diffusion() {
    let p = params(0.0, 0.0);
    let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
    let c = buffer_curve_closed_form(&p, &s, &[0.0, 5.0]).unwrap();
    assert!((c.samples[0].mu - 0.5).abs() < 1e-10);
    assert!((c.samples[1].mu - 0.75f64.sqrt()).abs() < 1e-10);
    assert!(c.samples.iter().all(|b| b.valid));
}

#[test]
fn buffer_curve_does_not_depend_on_amplitude() {
    let p = params(1.0, 0.0);
    let small = SourceProfile::gaussian(1.0, 0.25).unwrap();
    let large = SourceProfile::gaussian(100.0, 0.25).unwrap();
    let a = buffer_curve_closed_form(&p, &small, &xs()).unwrap();
    let b = buffer_curve_closed_form(&p, &large, &xs()).unwrap();
    for (u, v) in a.samples.iter().zip(&b.samples) {
        assert!((u.mu - v.mu).abs() < 1e-8);
    }
    let ma = ModeSum::new(&small, 20.0, 1001).unwrap();
    let mb = ModeSum::new(&large, 20.0, 1001).unwrap();
    let ga = buffer_curve_from_growth(&p, &ma, &xs(), -1.0, BufferOrder::K4Corrected).unwrap();
    let gb = buffer_curve_from_growth(&p, &mb, &xs(), -1.0, BufferOrder::K4Corrected).unwrap();
    for (u, v) in ga.samples.iter().zip(&gb.samples) {
        assert!((u.mu - v.mu).abs() < 1e-8 || (u.mu.is_nan() && v.mu.is_nan()));
    }
}

#[test]
fn validity_flips_for_dispersive_diffusivity() {
    // With D = 3i, Re(1 + sigma / (z D)) = 1 - 3 w0 sigma / (9 (mu^2 + w0^2)), which changes
    // sign for sigma = 2; the crossing is located independently by bisection.
    let p = params(0.0, 3.0);
    let s = SourceProfile::gaussian(1.0, 2.0).unwrap();
    let re = |mu: f64| {
        let zd = p.z(mu) * p.d();
        (1.0 + 2.0 / zd).re
    };
    let (mut lo, mut hi) = (0.0, 5.0);
    assert!(re(lo) < 0.0 || re(hi) < 0.0);
    let sign_lo = re(lo) >= 0.0;
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if (re(m) >= 0.0) == sign_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    assert_eq!(buffer_validity(lo - 1e-6, &p, &s), sign_lo);
    assert_eq!(buffer_validity(hi + 1e-6, &p, &s), !sign_lo);
}

#[test]
fn memory_effect_prediction() {
    let p = CglParams::default();
    assert!((memory_onset_prediction(-0.3, &p).unwrap() - 0.3).abs() < 1e-15);
    assert!(memory_onset_prediction(-1.0, &p).is_err());
    assert!(memory_onset_prediction(0.1, &p).is_err());
}

#[test]
fn qss_residual_scales_with_eps_to_five_halves() {
    let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
    let r = |eps: f64| {
        let p = CglParams { eps, ..Default::default() };
        cgl_asymptotic_residual(0.0, -1.0, &p, &s).unwrap().norm()
    };
    let ratio = r(0.01) / r(0.005);
    assert!((4.5..=6.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn frozen_newton_qss_matches_cubic_perturbation_series() {
    // Without drift or diffusion the QSS solves z A + f = alpha |A|^2 A, whose small-f expansion is
    // A = -f / z - alpha f^3 / (z^2 |z|^2) + O(f^5).
    let p = params(0.0, 0.0);
    let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
    for mu in [-1.0, -0.5, 0.0, 0.4] {
        let f = p.eps.sqrt() * s.eval(0.3).unwrap();
        let z = p.z(mu);
        let series = -f / z - p.alpha() * f.powi(3) / (z * z * z.norm_sqr());
        let n = cgl_qss_newton(0.3, mu, &p, &s, None).unwrap();
        assert!(p.rhs(n, mu, s.eval(0.3).unwrap()).norm() < 1e-13);
        assert!((n - series).norm() < 5.0 * f.powi(5) / z.norm().powi(7), "mu={mu}");
    }
}

proptest! {
    #[test]
    fn buffer_curve_is_even_and_grows_with_distance(
        beta_r in 0.0f64..4.0,
        sigma in 0.1f64..2.0,
        x in 0.1f64..8.0,
    ) {
        let p = params(beta_r, 0.0);
        let s = SourceProfile::gaussian(1.0, sigma).unwrap();
        let c = buffer_curve_closed_form(&p, &s, &[-x, x, 0.5 * x]).unwrap();
        let [l, r, h] = [c.samples[0], c.samples[1], c.samples[2]];
        prop_assert!((l.mu - r.mu).abs() < 1e-10);
        prop_assert!(r.mu >= h.mu - 1e-12);
        prop_assert!(h.mu >= p.omega0 - 1e-12);
    }
}
