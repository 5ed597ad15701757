//! Built-in zero-field instances with the ground-state structure used in the
//! susceptibility experiments.

use crate::error::{Error, Result};
use crate::ising::IsingProblem;

fn build(name: &str, n: usize, couplers: &[(usize, usize, f64)]) -> IsingProblem {
    IsingProblem::new(n, [], couplers.iter().map(|&(i, j, w)| ((i, j), w)))
        .expect("built-in instance is valid")
        .with_name(name)
}

/// Six variables, four ground states at energy -6 (indices 19, 23, 40, 44).
pub fn n6() -> IsingProblem {
    build(
        "n6",
        6,
        &[
            (0, 1, -1.0),
            (0, 2, -1.0),
            (0, 3, 1.0),
            (0, 4, -1.0),
            (0, 5, -1.0),
            (1, 2, 1.0),
            (1, 3, 1.0),
            (1, 4, -1.0),
            (1, 5, 1.0),
            (4, 5, 1.0),
        ],
    )
}

/// Seven variables, two ground states at energy -7.
pub fn n7() -> IsingProblem {
    build(
        "n7",
        7,
        &[
            (0, 1, 1.0),
            (0, 2, 1.0),
            (0, 4, -1.0),
            (0, 6, 1.0),
            (1, 5, 1.0),
            (2, 3, 1.0),
            (4, 5, 1.0),
            (4, 6, 1.0),
            (5, 6, 1.0),
        ],
    )
}

/// Eight variables, eight ground states at energy -11.
pub fn n8() -> IsingProblem {
    build(
        "n8",
        8,
        &[
            (0, 1, 1.0),
            (0, 4, 1.0),
            (0, 5, -1.0),
            (0, 6, 1.0),
            (0, 7, 1.0),
            (1, 5, 1.0),
            (1, 7, -1.0),
            (2, 3, 1.0),
            (2, 4, 1.0),
            (2, 6, -1.0),
            (3, 4, -1.0),
            (3, 6, 1.0),
            (4, 5, 1.0),
            (5, 7, 1.0),
            (6, 7, -1.0),
        ],
    )
}

pub const BUILTIN_NAMES: [&str; 3] = ["n6", "n7", "n8"];

pub fn builtin(name: &str) -> Result<IsingProblem> {
    match name {
        "n6" => Ok(n6()),
        "n7" => Ok(n7()),
        "n8" => Ok(n8()),
        other => Err(Error::invalid(format!(
            "unknown built-in instance {other:?} (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}
