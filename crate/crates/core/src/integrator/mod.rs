//! Time stepping: Strang splitting and a Crank–Nicolson reference scheme.

mod cn;
mod run;
mod strang;

pub use cn::cn_reference_step;
pub use run::{integrate_run, integrate_with, IntegratorKind, RunConfig, Snapshot, StopRule, Trajectory};
pub use strang::strang_step;

use crate::error::{Error, Result};
use crate::models::ReactionModel;
use crate::spatial::{Diffusing, DiffusionOperator, Grid1D, PointState, Scalar};

type ScalarOf<M> = <<M as ReactionModel>::State as Diffusing>::Scalar;

/// Reusable stepping machinery for one model, grid and step size.
pub struct Stepper<'m, M: ReactionModel> {
    model: &'m M,
    kind: IntegratorKind,
    dt: f64,
    source: Vec<f64>,
    /// Strang: half-step propagator. CN: full-step propagator.
    diffusion: DiffusionOperator<ScalarOf<M>>,
    scratch: Vec<ScalarOf<M>>,
    stage: Vec<M::State>,
    next: Vec<M::State>,
    max_sweeps: usize,
}

impl<'m, M: ReactionModel> Stepper<'m, M> {
    pub fn new(model: &'m M, grid: &Grid1D, dt: f64, kind: IntegratorKind) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(crate::error::invalid(format!("time step must be positive, got {dt}")));
        }
        let source = model.source().sample(&grid.points())?;
        let h = match kind {
            IntegratorKind::Strang => 0.5 * dt,
            IntegratorKind::CnReference => dt,
        };
        let diffusion = DiffusionOperator::new(grid, model.diffusivity(), h)?;
        Ok(Self {
            model,
            kind,
            dt,
            source,
            diffusion,
            scratch: Vec::with_capacity(grid.n_points()),
            stage: Vec::with_capacity(grid.n_points()),
            next: Vec::with_capacity(grid.n_points()),
            max_sweeps: 25,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kind(&self) -> IntegratorKind {
        self.kind
    }

    /// Advances `u` from `t` to `t + dt`.
    pub fn step(&mut self, u: &mut [M::State], t: f64) -> Result<()> {
        if u.len() != self.source.len() {
            return Err(crate::error::invalid(format!(
                "state has {} points, grid has {}",
                u.len(),
                self.source.len()
            )));
        }
        match self.kind {
            IntegratorKind::Strang => {
                self.diffusion.apply_to(u, &mut self.scratch);
                self.reaction_rk4(u, t);
                self.diffusion.apply_to(u, &mut self.scratch);
                Ok(())
            }
            IntegratorKind::CnReference => self.cn_step(u, t),
        }
    }

    fn reaction_rk4(&self, u: &mut [M::State], t: f64) {
        let ramp = self.model.ramp();
        let dt = self.dt;
        let (r0, r1, r2) = (ramp.value(t), ramp.value(t + 0.5 * dt), ramp.value(t + dt));
        let m = self.model;
        for (y, &s) in u.iter_mut().zip(&self.source) {
            let k1 = m.rate(*y, r0, s);
            let k2 = m.rate(y.axpy(0.5 * dt, k1), r1, s);
            let k3 = m.rate(y.axpy(0.5 * dt, k2), r1, s);
            let k4 = m.rate(y.axpy(dt, k3), r2, s);
            *y = y
                .axpy(dt / 6.0, k1)
                .axpy(dt / 3.0, k2)
                .axpy(dt / 3.0, k3)
                .axpy(dt / 6.0, k4);
        }
    }

    fn cn_step(&mut self, u: &mut [M::State], t: f64) -> Result<()> {
        let m = self.model;
        let dt = self.dt;
        let r0 = m.ramp().value(t);
        let r_mid = m.ramp().value(t + 0.5 * dt);

        let mut explicit: Vec<ScalarOf<M>> = u.iter().map(Diffusing::diffusing).collect();
        self.diffusion.apply_explicit(&mut explicit);

        self.stage.clear();
        self.stage
            .extend(u.iter().zip(&self.source).map(|(y, &s)| y.axpy(dt, m.rate(*y, r0, s))));
        self.next.resize(u.len(), <M::State as PointState>::zero());

        for _ in 0..self.max_sweeps {
            self.scratch.clear();
            for j in 0..u.len() {
                let mid = u[j].axpy(0.5, self.stage[j].axpy(-1.0, u[j]));
                let rate = m.rate(mid, r_mid, self.source[j]);
                self.next[j] = u[j].axpy(dt, rate);
                self.scratch.push(explicit[j] + rate.diffusing().scale(dt));
            }
            self.diffusion.solve_implicit(&mut self.scratch);
            let mut change: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for j in 0..u.len() {
                self.next[j].set_diffusing(self.scratch[j]);
                let d = self.next[j].axpy(-1.0, self.stage[j]).norm();
                if !(d <= change) {
                    change = d;
                }
                scale = scale.max(self.next[j].norm());
            }
            std::mem::swap(&mut self.stage, &mut self.next);
            if !change.is_finite() {
                break;
            }
            if change <= 1e-13 * scale {
                u.copy_from_slice(&self.stage);
                return Ok(());
            }
        }
        Err(Error::StepFailure {
            t,
            reason: format!("fixed point did not converge in {} sweeps", self.max_sweeps),
        })
    }
}
