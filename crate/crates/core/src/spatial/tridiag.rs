use super::Scalar;

/// Pre-factored tridiagonal system (Thomas algorithm).
///
/// No pivoting: callers only build diagonally dominant matrices.
#[derive(Debug, Clone)]
pub struct Tridiagonal<S> {
    lower: Vec<S>,
    upper_mod: Vec<S>,
    inv_pivot: Vec<S>,
}

impl<S: Scalar> Tridiagonal<S> {
    /// `lower[0]` and `upper[n-1]` are ignored.
    pub fn factor(lower: &[S], diag: &[S], upper: &[S]) -> Self {
        let n = diag.len();
        assert!(n > 0 && lower.len() == n && upper.len() == n);
        let one = S::from_real(1.0);
        let mut upper_mod = vec![S::zero(); n];
        let mut inv_pivot = vec![S::zero(); n];
        let mut pivot = diag[0];
        inv_pivot[0] = one / pivot;
        upper_mod[0] = upper[0] * inv_pivot[0];
        for j in 1..n {
            pivot = diag[j] - lower[j] * upper_mod[j - 1];
            inv_pivot[j] = one / pivot;
            if j + 1 < n {
                upper_mod[j] = upper[j] * inv_pivot[j];
            }
        }
        Self {
            lower: lower.to_vec(),
            upper_mod,
            inv_pivot,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [S]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        rhs[0] = rhs[0] * self.inv_pivot[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - self.lower[j] * rhs[j - 1]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] = rhs[j] - self.upper_mod[j] * rhs[j + 1];
        }
    }
}
