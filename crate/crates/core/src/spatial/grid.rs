use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform mesh `x_j = -L + j dx`, `j = 0..N-1`, with `dx = 2L / (N - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_length: f64,
    n_points: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(invalid(format!("half-length must be positive, got {half_length}")));
        }
        if n_points < 3 {
            return Err(invalid(format!("need at least 3 grid points, got {n_points}")));
        }
        Ok(Self {
            half_length,
            n_points,
            dx: 2.0 * half_length / (n_points - 1) as f64,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Position of grid point `j`; the end points are exactly `-L` and `+L`.
    pub fn x(&self, j: usize) -> f64 {
        debug_assert!(j < self.n_points);
        if j + 1 == self.n_points {
            self.half_length
        } else {
            -self.half_length + j as f64 * self.dx
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the grid point closest to `x` (clamped to the domain).
    pub fn nearest_index(&self, x: f64) -> usize {
        let s = ((x + self.half_length) / self.dx).round();
        s.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Wavenumber of the `m`-th zero-flux cosine mode `cos(m pi (x + L) / 2L)`.
    pub fn mode_wavenumber(&self, m: usize) -> f64 {
        m as f64 * PI / (2.0 * self.half_length)
    }

    /// Eigenvalue magnitude of the discrete Laplacian on mode `m`
    /// (the "discrete k^2" of the centred second difference).
    pub fn discrete_symbol(&self, m: usize) -> f64 {
        let theta = PI * m as f64 / (self.n_points - 1) as f64;
        let s = (0.5 * theta).sin();
        4.0 * s * s / (self.dx * self.dx)
    }

    /// Warning text when the mesh cannot represent wavenumbers up to `k_max`.
    pub fn resolution_warning(&self, k_max: f64) -> Option<String> {
        let limit = PI / k_max;
        (self.dx > limit).then(|| {
            format!(
                "grid spacing {:.4e} exceeds pi/k_max = {:.4e}; modes above k = {:.3} are not resolved",
                self.dx,
                limit,
                PI / self.dx
            )
        })
    }
}
