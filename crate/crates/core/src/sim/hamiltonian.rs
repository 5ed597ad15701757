use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ising::IsingProblem;

/// Largest problem the dense evolution accepts.
pub const MAX_DENSE_VARIABLES: usize = 14;

pub(crate) fn check_dense_limit(problem: &IsingProblem) -> Result<()> {
    if problem.num_variables() > MAX_DENSE_VARIABLES {
        return Err(Error::Capability(format!(
            "{} variables exceed the dense simulation limit of {MAX_DENSE_VARIABLES}",
            problem.num_variables()
        )));
    }
    Ok(())
}

/// Per-basis-state values of the two diagonal sums in the problem
/// Hamiltonian, so that the diagonal at `(a, b, g)` is
/// `b/2 * (g * field[k] + coupling[k])`.
#[derive(Debug, Clone)]
pub struct DiagonalTerms {
    pub num_variables: usize,
    pub field: Vec<f64>,
    pub coupling: Vec<f64>,
}

impl DiagonalTerms {
    pub fn new(problem: &IsingProblem) -> Result<Self> {
        check_dense_limit(problem)?;
        let n = problem.num_variables();
        let dim = 1usize << n;
        let spin = |k: usize, i: usize| if (k >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut field = vec![0.0; dim];
        let mut coupling = vec![0.0; dim];
        for k in 0..dim {
            for (&i, &h) in problem.linear() {
                field[k] += h * spin(k, i);
            }
            for (&(i, j), &w) in problem.quadratic() {
                coupling[k] += w * spin(k, i) * spin(k, j);
            }
        }
        Ok(Self {
            num_variables: n,
            field,
            coupling,
        })
    }

    pub fn dim(&self) -> usize {
        self.field.len()
    }

    pub fn diagonal(&self, b: f64, g: f64) -> impl Iterator<Item = f64> + '_ {
        self.field
            .iter()
            .zip(&self.coupling)
            .map(move |(f, c)| 0.5 * b * (g * f + c))
    }

    /// Dense `H(a, b, g)`. Real symmetric, hence Hermitian.
    pub fn matrix(&self, a: f64, b: f64, g: f64) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for (k, d) in self.diagonal(b, g).enumerate() {
            h[(k, k)] = d;
        }
        let off = -0.5 * a;
        if off != 0.0 {
            for k in 0..dim {
                for i in 0..self.num_variables {
                    h[(k, k ^ (1 << i))] = off;
                }
            }
        }
        h
    }
}

/// `H = -(a/2) sum_i X_i + (b/2) (g sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j)`
/// in the canonical basis (bit 0 = spin up = Z eigenvalue +1).
pub fn build_hamiltonian(problem: &IsingProblem, a: f64, b: f64, g: f64) -> Result<DMatrix<f64>> {
    Ok(DiagonalTerms::new(problem)?.matrix(a, b, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z_term() {
        let p = IsingProblem::new(1, [(0, 1.0)], []).unwrap();
        let h = build_hamiltonian(&p, 0.0, 2.0, 1.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
    }

    #[test]
    fn single_x_term() {
        let p = IsingProblem::new(1, [], []).unwrap();
        let h = build_hamiltonian(&p, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn two_spin_coupler_diagonal() {
        let p = IsingProblem::new(2, [], [((0, 1), 1.0)]).unwrap();
        let h = build_hamiltonian(&p, 0.0, 2.0, 0.0).unwrap();
        assert_eq!(h.diagonal().as_slice(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn off_diagonal_pattern_and_hermiticity() {
        let p = IsingProblem::new(3, [(1, 0.3)], [((0, 2), -1.0), ((1, 2), 0.5)]).unwrap();
        let h = build_hamiltonian(&p, 1.7, 3.1, 0.4).unwrap();
        assert_eq!(h, h.transpose());
        for r in 0..8usize {
            for c in 0..8usize {
                if r == c {
                    continue;
                }
                let expected = if (r ^ c).count_ones() == 1 { -0.85 } else { 0.0 };
                assert_eq!(h[(r, c)], expected);
            }
            let e = p.energy_of_index(r as u64);
            let field = p.bias(1) * if (r >> 1) & 1 == 0 { 1.0 } else { -1.0 };
            let coupling = e - field;
            assert!((h[(r, r)] - 0.5 * 3.1 * (0.4 * field + coupling)).abs() < 1e-14);
        }
    }

    #[test]
    fn dense_limit() {
        let p = IsingProblem::new(15, [], []).unwrap();
        assert!(matches!(build_hamiltonian(&p, 1.0, 1.0, 1.0), Err(Error::Capability(_))));
    }
}
