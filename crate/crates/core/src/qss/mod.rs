//! Quasi-stationary states and Hopf loci.

mod cgl;
mod hopf;
mod lactotroph;

pub use cgl::{
    cgl_asymptotic_residual, cgl_qss, cgl_qss_asymptotic, cgl_qss_field, cgl_qss_leading, cgl_qss_newton,
    CglQssOptions,
};
pub use hopf::{cgl_linearization, hopf_locus, HopfLocus, HopfProblem, HopfSample, Linearization};
pub use lactotroph::{lactotroph_qss, lactotroph_qss_field, LacQssOptions};

use serde::{Deserialize, Serialize};

use crate::spatial::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QssMethod {
    Asymptotic,
    Newton,
}

/// QSS of the frozen-parameter problem on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QssField<P> {
    pub ramp: f64,
    pub method: QssMethod,
    pub field: Field<P>,
}
