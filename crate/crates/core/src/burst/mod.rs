//! Classification of bursting rhythms in voltage time series.
//!
//! An oscillation is an LAO when the minimum preceding its peak lies below `v_split`
//! (a full excursion to the hyperpolarized phase) and an SAO otherwise.

mod canard;
mod events;
mod front;
mod signature;
mod synthetic;

pub use canard::{canard_transitions, maximal_canard_scan, CanardSample, CanardTransition};
pub use events::{classify_events, ClassifierParams, Event, EventKind, EventSequence};
pub use front::{front_speed, FrontFit};
pub use signature::{burst_signature, BurstCycle, BurstSignature, Periodicity};
pub use synthetic::SyntheticBurst;

use crate::integrator::{Snapshot, Trajectory};
use crate::spatial::{Grid1D, PointState};

/// One scalar observable sampled on a space-time lattice. `values[j]` is the series at `x[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSeries {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SpaceTimeSeries {
    pub fn from_trajectory<P: PointState>(traj: &Trajectory<P>, observable: impl Fn(&P) -> f64) -> Self {
        Self::from_snapshots(traj.grid(), &traj.snapshots, observable)
    }

    pub fn from_snapshots<P: PointState>(grid: &Grid1D, snapshots: &[Snapshot<P>], observable: impl Fn(&P) -> f64) -> Self {
        let x = grid.points();
        let values = (0..x.len())
            .map(|j| snapshots.iter().map(|s| observable(&s.field.values()[j])).collect())
            .collect();
        Self {
            t: snapshots.iter().map(|s| s.t).collect(),
            x,
            values,
        }
    }

    /// Restriction to `t` in `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> Self {
        let lo = self.t.partition_point(|&t| t < t0);
        let hi = self.t.partition_point(|&t| t <= t1);
        Self {
            t: self.t[lo..hi].to_vec(),
            x: self.x.clone(),
            values: self.values.iter().map(|v| v[lo..hi].to_vec()).collect(),
        }
    }

    pub fn global_min(&self) -> f64 {
        self.values.iter().flatten().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// Midpoint between the hyperpolarized minimum and the depolarized QSS voltage.
pub fn default_v_split(v_min: f64, v_qss: f64) -> f64 {
    0.5 * (v_min + v_qss)
}
