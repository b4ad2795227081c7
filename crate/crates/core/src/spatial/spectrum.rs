use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Field, Grid1D, PointState, Scalar};
use crate::error::{invalid, Result};

/// Energy carried by one cosine mode `cos(m pi (x + L) / 2L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalEnergy {
    /// Number of half-wavelengths across the domain.
    pub index: usize,
    pub wavenumber: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub modes: Vec<ModalEnergy>,
    pub coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn total_energy(&self) -> f64 {
        self.modes.iter().map(|m| m.energy).sum()
    }

    /// Fraction of energy in modes with wavenumber at most `k`.
    pub fn fraction_below(&self, k: f64) -> f64 {
        let total = self.total_energy();
        if total == 0.0 {
            return 1.0;
        }
        self.modes
            .iter()
            .filter(|m| m.wavenumber <= k + 1e-12)
            .map(|m| m.energy)
            .sum::<f64>()
            / total
    }
}

fn cos_table(n: usize) -> Vec<f64> {
    let period = 2 * (n - 1);
    (0..period)
        .map(|r| (PI * r as f64 / (n - 1) as f64).cos())
        .collect()
}

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Squared trapezoid norm of basis vector `m`, in index units.
fn basis_norm(m: usize, n: usize) -> f64 {
    if m == 0 || m + 1 == n {
        (n - 1) as f64
    } else {
        0.5 * (n - 1) as f64
    }
}

/// Coefficients `c_m` with `u_j = sum_m c_m cos(pi m j / (N-1))` (DCT-I).
pub fn cosine_coefficients<S: Scalar>(u: &[S]) -> Result<Vec<Complex64>> {
    let n = u.len();
    if n < 3 {
        return Err(invalid("cosine transform needs at least 3 samples"));
    }
    let table = cos_table(n);
    let period = table.len();
    let weighted: Vec<Complex64> = u
        .iter()
        .enumerate()
        .map(|(j, v)| v.to_complex() * trapezoid_weight(j, n))
        .collect();
    Ok((0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut r = 0usize;
            for w in &weighted {
                acc += w * table[r];
                r += m;
                if r >= period {
                    r -= period;
                }
            }
            acc / basis_norm(m, n)
        })
        .collect())
}

pub fn cosine_synthesis(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coefficients.len();
    if n < 3 {
        return Err(invalid("cosine transform needs at least 3 coefficients"));
    }
    let table = cos_table(n);
    let period = table.len();
    Ok((0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut r = 0usize;
            for c in coefficients {
                acc += c * table[r];
                r += j;
                if r >= period {
                    r -= period;
                }
            }
            acc
        })
        .collect())
}

/// Modal energies in the zero-flux cosine basis.
///
/// Energies are `|c_m|^2 ||phi_m||^2 dx` with trapezoid weights, so their sum is the
/// trapezoid integral of `|u|^2`.
pub fn cosine_spectrum<S: Scalar + PointState>(f: &Field<S>, g: &Grid1D) -> Result<Spectrum> {
    f.check_on(g)?;
    let n = g.n_points();
    let coefficients = cosine_coefficients(f.values())?;
    let modes = coefficients
        .iter()
        .enumerate()
        .map(|(m, c)| ModalEnergy {
            index: m,
            wavenumber: g.mode_wavenumber(m),
            energy: c.norm_sqr() * basis_norm(m, n) * g.dx(),
        })
        .collect();
    Ok(Spectrum {
        modes,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_energy(f: &Field<f64>, g: &Grid1D) -> f64 {
        let n = g.n_points();
        f.values()
            .iter()
            .enumerate()
            .map(|(j, v)| trapezoid_weight(j, n) * v * v)
            .sum::<f64>()
            * g.dx()
    }

    #[test]
    fn constant_field_is_mode_zero() {
        let g = Grid1D::new(3.0, 17).unwrap();
        let s = cosine_spectrum(&Field::constant(&g, 2.0).unwrap(), &g).unwrap();
        assert!((s.modes[0].energy - 4.0 * 6.0).abs() < 1e-12);
        assert!(s.modes[1..].iter().all(|m| m.energy < 1e-24));
    }

    #[test]
    fn single_cosine_is_one_mode() {
        let g = Grid1D::new(5.0, 101).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * PI * x / 5.0).cos()).unwrap();
        let s = cosine_spectrum(&f, &g).unwrap();
        let total = s.total_energy();
        let top = s.modes.iter().max_by(|a, b| a.energy.total_cmp(&b.energy)).unwrap();
        assert_eq!(top.index, 6);
        assert!((top.wavenumber - 3.0 * PI / 5.0).abs() < 1e-12);
        assert!((top.energy - total).abs() < 1e-12 * total);
    }

    #[test]
    fn parseval_and_round_trip() {
        let g = Grid1D::new(2.0, 33).unwrap();
        let f = Field::from_fn(&g, |x| (1.3 * x).sin() + 0.2 * x * x - x.exp() * 0.05).unwrap();
        let s = cosine_spectrum(&f, &g).unwrap();
        let e = field_energy(&f, &g);
        assert!((s.total_energy() - e).abs() < 1e-12 * e);
        let back = cosine_synthesis(&s.coefficients).unwrap();
        for (a, b) in back.iter().zip(f.values()) {
            assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }
}
