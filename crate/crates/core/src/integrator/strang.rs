use super::{IntegratorKind, Stepper};
use crate::error::Result;
use crate::models::ReactionModel;
use crate::spatial::{Field, Grid1D};

/// Half diffusion, RK4 reaction over `dt`, half diffusion.
pub fn strang_step<M: ReactionModel>(
    f: &Field<M::State>,
    t: f64,
    dt: f64,
    model: &M,
    grid: &Grid1D,
) -> Result<Field<M::State>> {
    f.check_on(grid)?;
    let mut u = f.values().to_vec();
    Stepper::new(model, grid, dt, IntegratorKind::Strang)?.step(&mut u, t)?;
    Field::new(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CglModel, CglParams, RampSpec, SourceProfile};
    use crate::spatial::diffusion_substep;
    use crate::Complex64;

    fn model(beta_r: f64, rate: f64, source: SourceProfile) -> CglModel {
        let p = CglParams {
            beta_r,
            ..Default::default()
        };
        CglModel::with_ramp(p, source, RampSpec::increasing(-1.0, rate)).unwrap()
    }

    #[test]
    fn without_diffusion_matches_pointwise_rk4() {
        let g = Grid1D::new(2.0, 11).unwrap();
        let m = model(0.0, 0.01, SourceProfile::gaussian(1.0, 0.25).unwrap());
        let f = Field::from_fn(&g, |x| Complex64::new(0.2 * x, 0.1)).unwrap();
        let dt = 0.05;
        let out = strang_step(&f, 3.0, dt, &m, &g).unwrap();
        for (j, y) in f.values().iter().enumerate() {
            let s = m.source.eval(g.x(j)).unwrap();
            let r = |a: Complex64, t: f64| m.params.rhs(a, m.ramp.value(t), s);
            let k1 = r(*y, 3.0);
            let k2 = r(y + k1 * (dt / 2.0), 3.0 + dt / 2.0);
            let k3 = r(y + k2 * (dt / 2.0), 3.0 + dt / 2.0);
            let k4 = r(y + k3 * dt, 3.0 + dt);
            let e = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            assert!((out.get(j) - e).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_diffusion_is_two_half_substeps() {
        let g = Grid1D::new(3.0, 31).unwrap();
        let p = CglParams {
            omega0: 0.0,
            alpha_i: 0.0,
            ..Default::default()
        };
        // zero reaction: mu = 0, w0 = 0, tiny amplitude so the cubic is negligible below 1e-15
        let m = CglModel::with_ramp(p, SourceProfile::constant(0.0), RampSpec::increasing(0.0, 0.0)).unwrap();
        let f = Field::from_fn(&g, |x| Complex64::new(1e-6 * (x).cos(), 0.0)).unwrap();
        let out = strang_step(&f, 0.0, 0.4, &m, &g).unwrap();
        let half = diffusion_substep(&f, m.params.d() * p.eps, 0.2, &g).unwrap();
        let two = diffusion_substep(&half, m.params.d() * p.eps, 0.2, &g).unwrap();
        assert!(out.max_distance(&two).unwrap() < 1e-18);
    }
}
