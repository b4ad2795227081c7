//! Reaction terms, applied-current profiles and slow ramps.

mod cgl;
mod lactotroph;
mod ramp;
mod source;

pub use cgl::{CglModel, CglParams};
pub use lactotroph::{boltzmann, GatingSteady, LacState, LactotrophModel, LactotrophParams};
pub use ramp::{RampDirection, RampSpec};
pub use source::{SourceDerivatives, SourceProfile};

use crate::spatial::Diffusing;

/// Pointwise reaction kinetics plus the data needed to assemble the PDE.
///
/// Diffusion acts only on the component exposed through [`Diffusing`].
pub trait ReactionModel: Send + Sync {
    type State: Diffusing;

    fn ramp(&self) -> &RampSpec;
    fn source(&self) -> &SourceProfile;
    /// Coefficient multiplying the second derivative of the diffusing component.
    fn diffusivity(&self) -> <Self::State as Diffusing>::Scalar;
    /// Reaction rate with the ramp value and the local applied current already evaluated.
    fn rate(&self, u: Self::State, ramp: f64, source: f64) -> Self::State;
}
