//! Ising problems, classical spin states and the state-distance metrics.
//!
//! Energies follow `E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j` with
//! `s_i` in `{-1, +1}`. States are addressed by a canonical index where
//! bit `j = 0` means `s_j = +1` and bit `j = 1` means `s_j = -1`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default cutoff for exhaustive ground-state enumeration.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 24;

/// Largest variable count a [`SpinState`] index can address.
pub const MAX_INDEXED_VARIABLES: usize = 63;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    num_variables: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    name: Option<String>,
}

impl IsingProblem {
    /// Builds a problem, normalizing every coupler key to `(min, max)`.
    ///
    /// Rejects out-of-range indices, self-couplers, duplicate pairs (in
    /// either orientation) and non-finite coefficients.
    pub fn new(
        num_variables: usize,
        linear: impl IntoIterator<Item = (usize, f64)>,
        quadratic: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self> {
        if num_variables == 0 {
            return Err(Error::invalid("num_variables must be positive"));
        }
        if num_variables > MAX_INDEXED_VARIABLES {
            return Err(Error::invalid(format!(
                "num_variables {num_variables} exceeds the addressable maximum {MAX_INDEXED_VARIABLES}"
            )));
        }
        let mut lin = BTreeMap::new();
        for (i, h) in linear {
            if i >= num_variables {
                return Err(Error::invalid(format!(
                    "linear index {i} out of range for {num_variables} variables"
                )));
            }
            if !h.is_finite() {
                return Err(Error::invalid(format!("linear bias on {i} is not finite")));
            }
            if lin.insert(i, h).is_some() {
                return Err(Error::invalid(format!("duplicate linear index {i}")));
            }
        }
        let mut quad = BTreeMap::new();
        for ((a, b), j) in quadratic {
            if a >= num_variables || b >= num_variables {
                return Err(Error::invalid(format!(
                    "coupler ({a}, {b}) out of range for {num_variables} variables"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-coupler on variable {a}")));
            }
            if !j.is_finite() {
                return Err(Error::invalid(format!("coupler ({a}, {b}) is not finite")));
            }
            let key = (a.min(b), a.max(b));
            if quad.insert(key, j).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate coupler ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Ok(Self {
            num_variables,
            linear: lin,
            quadratic: quad,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of basis states, `2^n`.
    pub fn num_states(&self) -> u64 {
        1u64 << self.num_variables
    }

    /// Same couplers, linear map replaced.
    pub fn with_linear(&self, linear: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut p = IsingProblem::new(
            self.num_variables,
            linear,
            self.quadratic.iter().map(|(&k, &v)| (k, v)),
        )?;
        p.name = self.name.clone();
        Ok(p)
    }

    /// Linear bias of variable `i` (zero when absent).
    pub fn bias(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    /// Coupler-graph degree of each variable. Linear terms add no edges.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_variables];
        for &(i, j) in self.quadratic.keys() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.quadratic.keys().copied()
    }

    /// Energy of the state with canonical index `index`.
    ///
    /// Linear terms are summed first, then couplers in ascending key order.
    pub fn energy_of_index(&self, index: u64) -> f64 {
        let spin = |i: usize| if (index >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for (&i, &h) in &self.linear {
            e += h * spin(i);
        }
        for (&(i, j), &w) in &self.quadratic {
            e += w * spin(i) * spin(j);
        }
        e
    }

    /// Energies of every basis state, indexed canonically.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.num_states()).map(|k| self.energy_of_index(k)).collect()
    }
}

impl fmt::Display for IsingProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n={}, {} linear, {} couplers)",
            self.name.as_deref().unwrap_or("ising"),
            self.num_variables,
            self.linear.len(),
            self.quadratic.len()
        )
    }
}

/// A classical assignment of `n` spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinState {
    spins: Vec<i8>,
}

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.len() > MAX_INDEXED_VARIABLES {
            return Err(Error::invalid(format!(
                "state of length {} is not indexable",
                spins.len()
            )));
        }
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!("spin value {bad} is not +1 or -1")));
        }
        Ok(Self { spins })
    }

    /// Decodes a canonical index.
    pub fn from_index(index: u64, n: usize) -> Result<Self> {
        if n > MAX_INDEXED_VARIABLES {
            return Err(Error::invalid(format!("cannot index {n} variables")));
        }
        if n < 64 && index >> n != 0 {
            return Err(Error::invalid(format!(
                "index {index} out of range for {n} variables"
            )));
        }
        let spins = (0..n)
            .map(|j| if (index >> j) & 1 == 0 { 1 } else { -1 })
            .collect();
        Ok(Self { spins })
    }

    pub fn index(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .fold(0u64, |acc, (j, _)| acc | (1 << j))
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Every spin negated.
    pub fn complement(&self) -> Self {
        Self {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.spins.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(if *s > 0 { "+1" } else { "-1" })?;
        }
        f.write_str("]")
    }
}

pub fn complement(state: &SpinState) -> SpinState {
    state.complement()
}

/// Bit-complement of a canonical index over `n` variables.
pub fn complement_index(index: u64, n: usize) -> u64 {
    !index & mask(n)
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateSet {
    pub energy: f64,
    /// Canonical indices, ascending.
    pub states: Vec<u64>,
}

impl GroundStateSet {
    pub fn contains(&self, index: u64) -> bool {
        self.states.binary_search(&index).is_ok()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn check_len(problem: &IsingProblem, state: &SpinState) -> Result<()> {
    if state.len() != problem.num_variables() {
        return Err(Error::invalid(format!(
            "state has {} spins but the problem has {} variables",
            state.len(),
            problem.num_variables()
        )));
    }
    Ok(())
}

pub fn energy(problem: &IsingProblem, state: &SpinState) -> Result<f64> {
    check_len(problem, state)?;
    let s = state.spins();
    let mut e = 0.0;
    for (&i, &h) in problem.linear() {
        e += h * f64::from(s[i]);
    }
    for (&(i, j), &w) in problem.quadratic() {
        e += w * f64::from(s[i]) * f64::from(s[j]);
    }
    Ok(e)
}

/// Tolerance used to group equal energies.
fn tie_tolerance(problem: &IsingProblem) -> f64 {
    let scale: f64 = problem.linear().values().map(|h| h.abs()).sum::<f64>()
        + problem.quadratic().values().map(|j| j.abs()).sum::<f64>();
    1e-12 * (1.0 + scale)
}

pub fn enumerate_ground_states(problem: &IsingProblem) -> Result<GroundStateSet> {
    enumerate_ground_states_with_limit(problem, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn enumerate_ground_states_with_limit(
    problem: &IsingProblem,
    limit: usize,
) -> Result<GroundStateSet> {
    let n = problem.num_variables();
    if n > limit {
        return Err(Error::Capability(format!(
            "{n} variables exceed the exhaustive limit of {limit}; sample instead"
        )));
    }
    let tol = tie_tolerance(problem);
    let mut best = f64::INFINITY;
    let mut states = Vec::new();
    for k in 0..problem.num_states() {
        let e = problem.energy_of_index(k);
        if e < best - tol {
            best = e;
            states.clear();
            states.push(k);
        } else if (e - best).abs() <= tol {
            states.push(k);
            best = best.min(e);
        }
    }
    Ok(GroundStateSet {
        energy: best,
        states,
    })
}

pub fn hamming_distance_proportion(a: &SpinState, b: &SpinState) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "state lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("hamming proportion of empty states"));
    }
    let diff = a
        .spins()
        .iter()
        .zip(b.spins())
        .filter(|(x, y)| x != y)
        .count();
    Ok(diff as f64 / a.len() as f64)
}

/// Degree-weighted closeness of `initial` to `gs`.
///
/// With `V` the variables where the two states differ, returns
/// `(sum_{v in V} deg(v) / |V|) / |V|`, or `M + 1` when `V` is empty
/// (`M` the largest coupler-graph degree).
pub fn delta_metric(problem: &IsingProblem, initial: &SpinState, gs: &SpinState) -> Result<f64> {
    check_len(problem, initial)?;
    check_len(problem, gs)?;
    let deg = problem.degrees();
    let differing: Vec<usize> = (0..problem.num_variables())
        .filter(|&v| initial.spins()[v] != gs.spins()[v])
        .collect();
    if differing.is_empty() {
        let max_degree = deg.iter().copied().max().unwrap_or(0);
        return Ok(max_degree as f64 + 1.0);
    }
    let size = differing.len() as f64;
    let total: usize = differing.iter().map(|&v| deg[v]).sum();
    Ok((total as f64 / size) * (1.0 / size))
}

/// `J_ij` uniform on `{-1, +1}` for each edge, no linear terms.
pub fn random_spin_glass(
    num_variables: usize,
    edges: &[(usize, usize)],
    seed: u64,
) -> Result<IsingProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quadratic: Vec<_> = edges
        .iter()
        .map(|&e| (e, if rng.random::<bool>() { 1.0 } else { -1.0 }))
        .collect();
    IsingProblem::new(num_variables, std::iter::empty(), quadratic)
}
