use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::Stepper;
use crate::error::{invalid, Error, Result};
use crate::models::{RampSpec, ReactionModel};
use crate::spatial::{Field, Grid1D, PointState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    Strang,
    CnReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Integrate until this time.
    Time(f64),
    /// Integrate until the ramp reaches this value.
    Ramp(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: Grid1D,
    pub dt: f64,
    pub stop: StopRule,
    /// Steps between stored snapshots.
    pub snapshot_stride: usize,
    pub integrator: IntegratorKind,
    pub blowup_threshold: f64,
}

impl RunConfig {
    pub fn new(grid: Grid1D, dt: f64, stop: StopRule) -> Self {
        Self {
            grid,
            dt,
            stop,
            snapshot_stride: 1,
            integrator: IntegratorKind::Strang,
            blowup_threshold: 1e6,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_integrator(mut self, kind: IntegratorKind) -> Self {
        self.integrator = kind;
        self
    }

    /// Number of steps implied by the stop rule for `ramp`.
    pub fn n_steps(&self, ramp: &RampSpec) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot stride must be at least 1"));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(invalid("blow-up threshold must be positive"));
        }
        let t_end = match self.stop {
            StopRule::Time(t) => t,
            StopRule::Ramp(r) => ramp
                .time_to(r)
                .ok_or_else(|| invalid(format!("ramp {ramp:?} never reaches {r}")))?,
        };
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(invalid(format!("end time must be non-negative, got {t_end}")));
        }
        Ok((t_end / self.dt - 1e-9).ceil().max(0.0) as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<P> {
    pub step: usize,
    pub t: f64,
    pub ramp: f64,
    pub field: Field<P>,
}

/// Stored snapshots of one run. Times increase strictly.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<P> {
    pub config: RunConfig,
    pub ramp: RampSpec,
    pub snapshots: Vec<Snapshot<P>>,
}

impl<P: PointState> Trajectory<P> {
    pub fn grid(&self) -> &Grid1D {
        &self.config.grid
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn ramps(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.ramp).collect()
    }

    /// Time series at grid index `j`.
    pub fn series(&self, j: usize) -> Vec<P> {
        self.snapshots.iter().map(|s| s.field.get(j)).collect()
    }

    pub fn last(&self) -> Option<&Snapshot<P>> {
        self.snapshots.last()
    }

    /// Snapshots with `t` in `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> Self {
        Self {
            config: self.config,
            ramp: self.ramp,
            snapshots: self
                .snapshots
                .iter()
                .filter(|s| s.t >= t0 && s.t <= t1)
                .cloned()
                .collect(),
        }
    }
}

/// Runs the model, handing every stored snapshot to `observer`.
///
/// Snapshots are emitted at step 0, every `snapshot_stride` steps, and at the final step.
/// Returning `ControlFlow::Break` stops the run after that snapshot.
pub fn integrate_with<M, F>(model: &M, cfg: &RunConfig, initial: &Field<M::State>, mut observer: F) -> Result<()>
where
    M: ReactionModel,
    F: FnMut(Snapshot<M::State>) -> ControlFlow<()>,
{
    let ramp = *model.ramp();
    let n_steps = cfg.n_steps(&ramp)?;
    initial.check_on(&cfg.grid)?;
    let mut stepper = Stepper::new(model, &cfg.grid, cfg.dt, cfg.integrator)?;
    let mut u = initial.values().to_vec();

    let emit = |step: usize, u: &[M::State]| {
        let t = step as f64 * cfg.dt;
        Snapshot {
            step,
            t,
            ramp: ramp.value(t),
            field: Field::from_vec_unchecked(u.to_vec()),
        }
    };
    if observer(emit(0, &u)).is_break() {
        return Ok(());
    }
    for step in 1..=n_steps {
        let t = (step - 1) as f64 * cfg.dt;
        stepper.step(&mut u, t)?;
        check_blowup(&u, t + cfg.dt, cfg.blowup_threshold)?;
        if (step % cfg.snapshot_stride == 0 || step == n_steps) && observer(emit(step, &u)).is_break() {
            break;
        }
    }
    Ok(())
}

fn check_blowup<P: PointState>(u: &[P], t: f64, threshold: f64) -> Result<()> {
    for (index, p) in u.iter().enumerate() {
        let magnitude = p.norm();
        if !magnitude.is_finite() || magnitude > threshold {
            return Err(Error::BlowUp { t, index, magnitude });
        }
    }
    Ok(())
}

pub fn integrate_run<M: ReactionModel>(
    model: &M,
    cfg: &RunConfig,
    initial: &Field<M::State>,
) -> Result<Trajectory<M::State>> {
    let mut snapshots = Vec::new();
    integrate_with(model, cfg, initial, |s| {
        snapshots.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(Trajectory {
        config: *cfg,
        ramp: *model.ramp(),
        snapshots,
    })
}
