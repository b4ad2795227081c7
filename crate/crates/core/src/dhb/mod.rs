//! Delayed Hopf analysis: measured onset, predicted buffer curves, growth exponents and delays.

mod buffer;
mod delay;
mod growth;
mod memory;
mod onset;

pub use buffer::{buffer_curve_closed_form, buffer_validity, BufferCurve, BufferOrder, BufferSample};
pub use delay::{delay_measurement, DelaySample};
pub use growth::{buffer_curve_from_growth, inhom_growth_exponent, ModeSum};
pub use memory::memory_onset_prediction;
pub use onset::{detect_onset, OnsetCurve, OnsetDetector, OnsetSample};
