use super::{Diffusing, Field, Grid1D, PointState, Scalar, Tridiagonal};
use crate::error::{invalid, Result};

/// Centred second difference with ghost-point reflection at both ends.
pub fn laplacian_into<S: Scalar>(u: &[S], dx: f64, out: &mut [S]) {
    let n = u.len();
    debug_assert!(n >= 3 && out.len() == n);
    let inv = 1.0 / (dx * dx);
    out[0] = (u[1] - u[0]).scale(2.0 * inv);
    for j in 1..n - 1 {
        out[j] = (u[j - 1] - u[j].scale(2.0) + u[j + 1]).scale(inv);
    }
    out[n - 1] = (u[n - 2] - u[n - 1]).scale(2.0 * inv);
}

pub fn apply_laplacian<S: Scalar + PointState>(f: &Field<S>, g: &Grid1D) -> Result<Field<S>> {
    f.check_on(g)?;
    let mut out = vec![<S as Scalar>::zero(); f.len()];
    laplacian_into(f.values(), g.dx(), &mut out);
    Ok(Field::from_vec_unchecked(out))
}

/// Crank–Nicolson propagator for `u_t = d u_xx` over a fixed step `h`.
#[derive(Debug, Clone)]
pub struct DiffusionOperator<S> {
    /// `d h / (2 dx^2)`
    half_courant: S,
    solver: Option<Tridiagonal<S>>,
    n: usize,
}

impl<S: Scalar> DiffusionOperator<S> {
    pub fn new(grid: &Grid1D, diffusivity: S, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("diffusion step must be positive, got {h}")));
        }
        if !diffusivity.modulus().is_finite() {
            return Err(invalid("diffusivity is not finite"));
        }
        if diffusivity.real_part() < 0.0 {
            return Err(invalid(format!(
                "diffusivity {diffusivity:?} has negative real part"
            )));
        }
        let n = grid.n_points();
        let half_courant = diffusivity.scale(h / (2.0 * grid.dx() * grid.dx()));
        let solver = (diffusivity != S::zero()).then(|| {
            let one = S::from_real(1.0);
            let off = -half_courant;
            let mut lower = vec![off; n];
            let mut upper = vec![off; n];
            lower[n - 1] = off.scale(2.0);
            upper[0] = off.scale(2.0);
            let diag = vec![one + half_courant.scale(2.0); n];
            Tridiagonal::factor(&lower, &diag, &upper)
        });
        Ok(Self {
            half_courant,
            solver,
            n,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.solver.is_none()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `u <- (I - hd/2 L)^{-1} (I + hd/2 L) u`
    pub fn apply(&self, u: &mut [S]) {
        let Some(solver) = &self.solver else {
            return;
        };
        assert_eq!(u.len(), self.n);
        self.apply_explicit(u);
        solver.solve_in_place(u);
    }

    /// `u <- (I + hd/2 L) u`
    pub fn apply_explicit(&self, u: &mut [S]) {
        let n = u.len();
        let c = self.half_courant;
        let mut prev = u[0];
        u[0] = u[0] + c.scale(2.0) * (u[1] - u[0]);
        for j in 1..n - 1 {
            let cur = u[j];
            u[j] = cur + c * (prev - cur.scale(2.0) + u[j + 1]);
            prev = cur;
        }
        let cur = u[n - 1];
        u[n - 1] = cur + c.scale(2.0) * (prev - cur);
    }

    /// `u <- (I - hd/2 L)^{-1} u`
    pub fn solve_implicit(&self, u: &mut [S]) {
        if let Some(solver) = &self.solver {
            solver.solve_in_place(u);
        }
    }

    /// Applies the propagator to the diffusing component of every point.
    pub fn apply_to<P: Diffusing<Scalar = S>>(&self, values: &mut [P], scratch: &mut Vec<S>) {
        if self.is_identity() {
            return;
        }
        scratch.clear();
        scratch.extend(values.iter().map(Diffusing::diffusing));
        self.apply(scratch);
        for (p, v) in values.iter_mut().zip(scratch.iter()) {
            p.set_diffusing(*v);
        }
    }
}

/// One Crank–Nicolson step of `u_t = d u_xx` applied to the diffusing component.
pub fn diffusion_substep<P: Diffusing>(
    f: &Field<P>,
    diffusivity: P::Scalar,
    dt: f64,
    g: &Grid1D,
) -> Result<Field<P>> {
    f.check_on(g)?;
    let op = DiffusionOperator::new(g, diffusivity, dt)?;
    let mut values = f.values().to_vec();
    let mut scratch = Vec::with_capacity(values.len());
    op.apply_to(&mut values, &mut scratch);
    Ok(Field::from_vec_unchecked(values))
}
