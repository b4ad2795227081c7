use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Grid1D;
use crate::error::{invalid, Error, Result};

/// Scalar type a diffusion operator can act on.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn from_real(v: f64) -> Self;
    fn scale(self, a: f64) -> Self;
    fn modulus(self) -> f64;
    fn real_part(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(v: f64) -> Self {
        v
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn real_part(self) -> f64 {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn real_part(self) -> f64 {
        self.re
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    RealScalar,
    ComplexScalar,
    RealTriple,
}

/// State stored at one grid point.
pub trait PointState: Copy + Debug + Send + Sync + PartialEq + 'static {
    const KIND: FieldKind;
    /// Number of real components when flattened.
    const COMPONENTS: usize;

    fn component_names() -> &'static [&'static str];
    fn zero() -> Self;
    /// `self + a * other`
    fn axpy(self, a: f64, other: Self) -> Self;
    /// Euclidean norm over all real components.
    fn norm(self) -> f64;
    fn write_components(&self, out: &mut [f64]);
    fn from_components(c: &[f64]) -> Self;

    fn is_finite(self) -> bool {
        let mut buf = [0.0; 8];
        self.write_components(&mut buf[..Self::COMPONENTS]);
        buf[..Self::COMPONENTS].iter().all(|v| v.is_finite())
    }
}

/// Point state with a single component subject to diffusion.
pub trait Diffusing: PointState {
    type Scalar: Scalar;
    fn diffusing(&self) -> Self::Scalar;
    fn set_diffusing(&mut self, v: Self::Scalar);
}

impl PointState for f64 {
    const KIND: FieldKind = FieldKind::RealScalar;
    const COMPONENTS: usize = 1;
    fn component_names() -> &'static [&'static str] {
        &["u"]
    }
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, a: f64, other: Self) -> Self {
        self + a * other
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn write_components(&self, out: &mut [f64]) {
        out[0] = *self;
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Diffusing for f64 {
    type Scalar = f64;
    fn diffusing(&self) -> f64 {
        *self
    }
    fn set_diffusing(&mut self, v: f64) {
        *self = v;
    }
}

impl PointState for Complex64 {
    const KIND: FieldKind = FieldKind::ComplexScalar;
    const COMPONENTS: usize = 2;
    fn component_names() -> &'static [&'static str] {
        &["re", "im"]
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(self, a: f64, other: Self) -> Self {
        self + other * a
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn write_components(&self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn from_components(c: &[f64]) -> Self {
        Complex64::new(c[0], c[1])
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

impl Diffusing for Complex64 {
    type Scalar = Complex64;
    fn diffusing(&self) -> Complex64 {
        *self
    }
    fn set_diffusing(&mut self, v: Complex64) {
        *self = v;
    }
}

/// Grid-function of point states. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<P> {
    values: Vec<P>,
}

impl<P: PointState> Field<P> {
    pub fn new(values: Vec<P>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite field entry at index {j}")));
        }
        Ok(Self { values })
    }

    /// Wraps values already known to be finite.
    pub(crate) fn from_vec_unchecked(values: Vec<P>) -> Self {
        Self { values }
    }

    pub fn from_fn(grid: &Grid1D, mut f: impl FnMut(f64) -> P) -> Result<Self> {
        Self::new((0..grid.n_points()).map(|j| f(grid.x(j))).collect())
    }

    pub fn constant(grid: &Grid1D, v: P) -> Result<Self> {
        Self::new(vec![v; grid.n_points()])
    }

    pub fn kind(&self) -> FieldKind {
        P::KIND
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[P] {
        &self.values
    }

    pub fn into_values(self) -> Vec<P> {
        self.values
    }

    pub fn get(&self, j: usize) -> P {
        self.values[j]
    }

    pub fn check_on(&self, grid: &Grid1D) -> Result<()> {
        if self.values.len() != grid.n_points() {
            return Err(invalid(format!(
                "field has {} points, grid has {}",
                self.values.len(),
                grid.n_points()
            )));
        }
        Ok(())
    }

    /// Pointwise distance `|self_j - other_j|`.
    pub fn distance(&self, other: &Self) -> Result<Vec<f64>> {
        if self.len() != other.len() {
            return Err(Error::InvalidArgument("field lengths differ".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.axpy(-1.0, *b).norm())
            .collect())
    }

    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.distance(other)?.into_iter().fold(0.0, f64::max))
    }

    /// Flattened real components, point-major.
    pub fn to_components(&self) -> Vec<f64> {
        let c = P::COMPONENTS;
        let mut out = vec![0.0; self.len() * c];
        for (p, chunk) in self.values.iter().zip(out.chunks_mut(c)) {
            p.write_components(chunk);
        }
        out
    }

    pub fn from_components(data: &[f64]) -> Result<Self> {
        let c = P::COMPONENTS;
        if data.len() % c != 0 {
            return Err(invalid(format!("{} values do not split into {c}-tuples", data.len())));
        }
        Self::new(data.chunks(c).map(P::from_components).collect())
    }
}

impl<P: Diffusing> Field<P> {
    pub fn diffusing(&self) -> Vec<P::Scalar> {
        self.values.iter().map(Diffusing::diffusing).collect()
    }
}
