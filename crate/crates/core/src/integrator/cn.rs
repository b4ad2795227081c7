use super::{IntegratorKind, Stepper};
use crate::error::Result;
use crate::models::ReactionModel;
use crate::spatial::{Field, Grid1D};

/// Crank–Nicolson on the diffusion with the reaction evaluated at the midpoint state,
/// resolved by fixed-point sweeps.
pub fn cn_reference_step<M: ReactionModel>(
    f: &Field<M::State>,
    t: f64,
    dt: f64,
    model: &M,
    grid: &Grid1D,
) -> Result<Field<M::State>> {
    f.check_on(grid)?;
    let mut u = f.values().to_vec();
    Stepper::new(model, grid, dt, IntegratorKind::CnReference)?.step(&mut u, t)?;
    Field::new(u)
}
