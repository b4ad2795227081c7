//! Spatial discretisation on `[-L, L]` with zero-flux boundaries.

mod diffusion;
mod field;
mod grid;
mod spectrum;
mod tridiag;

pub use diffusion::{apply_laplacian, diffusion_substep, laplacian_into, DiffusionOperator};
pub use field::{Diffusing, Field, FieldKind, PointState, Scalar};
pub use grid::Grid1D;
pub use spectrum::{cosine_coefficients, cosine_spectrum, cosine_synthesis, ModalEnergy, Spectrum};
pub use tridiag::Tridiagonal;
