//! Simulation and analysis of delayed bifurcations in 1-D reaction–diffusion
//! equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`spatial`]: uniform grids, fields, zero-flux diffusion operators and
//!   cosine-basis spectra.
//! - [`models`]: reaction terms for the complex Ginzburg–Landau equation with a
//!   slowly ramped growth rate and for a conductance-based lactotroph model.
//! - [`integrator`]: Strang splitting and a Crank–Nicolson reference stepper.
//! - [`qss`]: quasi-stationary states and Hopf loci.
//! - [`dhb`]: onset detection, buffer curves and delay measurements.
//! - [`burst`]: event classification and burst signatures for bursting rhythms.
//! - [`io`]: CSV and binary persistence of trajectories and analysis products.

pub mod burst;
pub mod dhb;
pub mod error;
pub mod integrator;
pub mod io;
pub mod models;
pub mod qss;
pub mod spatial;

pub use error::{Error, Result};
pub use num_complex::Complex64;
