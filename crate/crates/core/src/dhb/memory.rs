use crate::error::{Error, Result};
use crate::models::CglParams;

/// Onset predicted by the homogeneous part of the linear solution when the ramp starts
/// between `-w0` and the Hopf point: the solution decays until `mu = -mu0` and grows after.
pub fn memory_onset_prediction(mu0: f64, p: &CglParams) -> Result<f64> {
    if !(mu0 > -p.omega0 && mu0 < 0.0) {
        return Err(Error::Domain(format!(
            "mu0 = {mu0} outside (-{w}, 0); the buffer curve governs onset there",
            w = p.omega0
        )));
    }
    Ok(-mu0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_of_start() {
        let p = CglParams::default();
        assert_eq!(memory_onset_prediction(-0.3, &p).unwrap(), 0.3);
        assert!(memory_onset_prediction(-1e-12, &p).unwrap() < 1e-11);
        assert!(memory_onset_prediction(-1.0, &p).is_err());
        assert!(memory_onset_prediction(0.1, &p).is_err());
    }
}
