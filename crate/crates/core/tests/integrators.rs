use num_complex::Complex64;
use slowpass::integrator::*;
use slowpass::models::*;
use slowpass::spatial::*;

fn max_diff(a: &Field<Complex64>, b: &Field<Complex64>) -> f64 {
    a.max_distance(b).unwrap()
}

fn final_field(model: &CglModel, g: &Grid1D, dt: f64, t_end: f64, kind: IntegratorKind, init: &Field<Complex64>) -> Field<Complex64> {
    let cfg = RunConfig::new(*g, dt, StopRule::Time(t_end))
        .with_stride(1_000_000)
        .with_integrator(kind);
    integrate_run(model, &cfg, init).unwrap().last().unwrap().field.clone()
}

#[test]
fn strang_linear_mode_is_second_order() {
    let p = CglParams {
        beta_r: 2.0,
        beta_i: 0.5,
        ..Default::default()
    };
    let model = CglModel::new(p, SourceProfile::constant(0.0), -1.0).unwrap();
    let g = Grid1D::new(4.0, 81).unwrap();
    let m = 20;
    let k = g.mode_wavenumber(m);
    let delta = 1e-9;
    let init = Field::from_fn(&g, |x| Complex64::new(delta * (k * (x + 4.0)).cos(), 0.0)).unwrap();
    let t_end = 2.0;
    // Exact solution of the semi-discrete linear problem.
    let growth = Complex64::new(-1.0, p.omega0) * t_end + 0.5 * p.eps * t_end * t_end
        - p.eps * p.d() * g.discrete_symbol(m) * t_end;
    let exact = Field::from_fn(&g, |x| delta * (k * (x + 4.0)).cos() * growth.exp()).unwrap();
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&dt| max_diff(&final_field(&model, &g, dt, t_end, IntegratorKind::Strang, &init), &exact) / delta)
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..2.2).contains(&order), "order {order}, errors {errs:?}");
    }
}

#[test]
fn strang_and_crank_nicolson_agree_at_second_order() {
    let model = CglModel::new(CglParams::default(), SourceProfile::gaussian(1.0, 0.25).unwrap(), -1.0).unwrap();
    let g = Grid1D::new(5.0, 201).unwrap();
    let init = Field::from_fn(&g, |x| Complex64::new(0.1 * (-x * x).exp(), 0.0)).unwrap();
    let t_end = 20.0;
    let gaps: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let a = final_field(&model, &g, dt, t_end, IntegratorKind::Strang, &init);
            let b = final_field(&model, &g, dt, t_end, IntegratorKind::CnReference, &init);
            max_diff(&a, &b)
        })
        .collect();
    for w in gaps.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.7..2.3).contains(&order), "order {order}, gaps {gaps:?}");
    }
}

#[test]
fn snapshot_ramp_values_are_exact() {
    let model = CglModel::new(CglParams::default(), SourceProfile::constant(1.0), -1.0).unwrap();
    let g = Grid1D::new(1.0, 11).unwrap();
    let cfg = RunConfig::new(g, 0.05, StopRule::Ramp(-0.9)).with_stride(7);
    let traj = integrate_run(&model, &cfg, &Field::constant(&g, Complex64::new(0.0, 0.0)).unwrap()).unwrap();
    for s in &traj.snapshots {
        assert!((s.ramp - (-1.0 + 0.01 * s.t)).abs() < 1e-14);
        assert!((s.t - s.step as f64 * 0.05).abs() < 1e-12);
    }
    assert!((traj.last().unwrap().ramp + 0.9).abs() < 1e-12);
}

#[test]
fn lactotroph_without_diffusion_matches_pointwise_rk4() {
    let p = LactotrophParams { d: 0.0, ..Default::default() };
    let model = LactotrophModel::new(p, SourceProfile::gaussian(1.0, 50.0).unwrap(), 6.0, 0.002).unwrap();
    let g = Grid1D::new(50.0, 11).unwrap();
    let init = Field::from_fn(&g, |x| {
        let mut s = p.steady_state_at(-40.0 + 0.1 * x);
        s.n += 0.01;
        s
    })
    .unwrap();
    let dt = 0.05;
    let cfg = RunConfig::new(g, dt, StopRule::Time(50.0)).with_stride(10_000);
    let out = integrate_run(&model, &cfg, &init).unwrap();
    let last = &out.last().unwrap().field;

    let src = model.source.sample(&g.points()).unwrap();
    for (j, s0) in init.values().iter().enumerate() {
        let mut s = *s0;
        let f = |s: LacState, t: f64| p.rhs(s, 6.0 - 0.002 * t + src[j]);
        for n in 0..1000 {
            let t = n as f64 * dt;
            let k1 = f(s, t);
            let k2 = f(s.axpy(dt / 2.0, k1), t + dt / 2.0);
            let k3 = f(s.axpy(dt / 2.0, k2), t + dt / 2.0);
            let k4 = f(s.axpy(dt, k3), t + dt);
            s = s.axpy(dt / 6.0, k1.axpy(2.0, k2).axpy(2.0, k3).axpy(1.0, k4));
        }
        let got = last.values()[j];
        assert!((got.v - s.v).abs() < 1e-9 && (got.n - s.n).abs() < 1e-12, "j={j}: {got:?} vs {s:?}");
    }
}
