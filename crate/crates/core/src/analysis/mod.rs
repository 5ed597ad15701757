//! Ground-state proportions, response curves, susceptibility and clustering.

mod cluster;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{delta_metric, energy, hamming_distance_proportion, GroundStateSet, IsingProblem, SpinState};
use crate::sim::Observation;

pub use cluster::{kmeans, spectral_cluster, ClusterAssignment, ClusterParams};
pub use sweep::{response_curves, sweep_response_curve, target_distributions};

/// Ordered h-gain plateau strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HGrid {
    values: Vec<f64>,
}

impl HGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("h grid needs at least two values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("h grid values must be finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("h grid must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `start, start + 0.1, ..., 3.0`, computed as `k / 10` to avoid drift.
    fn tenths_from(first: u32) -> Self {
        Self {
            values: (first..=30).map(|k| f64::from(k) / 10.0).collect(),
        }
    }

    /// Variant of the default that omits `h = 0`.
    pub fn from_first_step() -> Self {
        Self::tenths_from(1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `0.0, 0.1, ..., 3.0` (31 points).
impl Default for HGrid {
    fn default() -> Self {
        Self::tenths_from(0)
    }
}

impl TryFrom<Vec<f64>> for HGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HGrid> for Vec<f64> {
    fn from(g: HGrid) -> Self {
        g.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub initial_state: u64,
    pub target_gs: u64,
    pub p_gs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityRecord {
    pub gs_index: u64,
    pub initial_state: u64,
    pub chi: f64,
    pub delta: f64,
    pub energy: f64,
    pub hamming: f64,
}

/// Fraction of reads (or probability mass) on `gs`.
pub fn pgs(observation: &Observation, gs: u64) -> Result<f64> {
    observation.fraction(gs)
}

/// Share of each ground state among the ground-state hits.
pub fn gs_distribution(observation: &Observation, gs_set: &GroundStateSet) -> Result<BTreeMap<u64, f64>> {
    let weights = observation.weights();
    let hits: Vec<(u64, f64)> = gs_set
        .states
        .iter()
        .map(|&g| (g, weights.get(&g).copied().unwrap_or(0.0)))
        .collect();
    let total: f64 = hits.iter().map(|(_, w)| w).sum();
    if !(total > 0.0) {
        return Err(Error::Undefined("no ground-state samples".into()));
    }
    Ok(hits.into_iter().map(|(g, w)| (g, w / total)).collect())
}

/// Sum of the curve over `len - 1`: the 31-point default grid is summed
/// over all 31 points and divided by 30, so a curve of ones gives 31/30.
pub fn chi(curve: &ResponseCurve) -> f64 {
    chi_of(&curve.p_gs)
}

pub fn chi_of(p_gs: &[f64]) -> f64 {
    let divisor = p_gs.len().saturating_sub(1).max(1) as f64;
    p_gs.iter().sum::<f64>() / divisor
}

pub fn record(problem: &IsingProblem, curve: &ResponseCurve) -> Result<SusceptibilityRecord> {
    let n = problem.num_variables();
    let initial = SpinState::from_index(curve.initial_state, n)?;
    let gs = SpinState::from_index(curve.target_gs, n)?;
    Ok(SusceptibilityRecord {
        gs_index: curve.target_gs,
        initial_state: curve.initial_state,
        chi: chi(curve),
        delta: delta_metric(problem, &initial, &gs)?,
        energy: energy(problem, &initial)?,
        hamming: hamming_distance_proportion(&initial, &gs)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiAverages {
    pub means: BTreeMap<u64, f64>,
    /// One entry per ground state whose records do not cover every initial state.
    pub warnings: Vec<String>,
}

/// Mean χ per target ground state. Coverage is checked against
/// `2^num_variables` distinct initial states.
pub fn average_chi_per_gs(records: &[SusceptibilityRecord], num_variables: usize) -> ChiAverages {
    let mut groups: BTreeMap<u64, (f64, std::collections::BTreeSet<u64>, usize)> = BTreeMap::new();
    for r in records {
        let e = groups.entry(r.gs_index).or_default();
        e.0 += r.chi;
        e.1.insert(r.initial_state);
        e.2 += 1;
    }
    let expected = 1u128 << num_variables.min(127);
    let mut warnings = Vec::new();
    let means = groups
        .into_iter()
        .map(|(gs, (sum, seen, count))| {
            if (seen.len() as u128) < expected {
                warnings.push(format!(
                    "ground state {gs}: {} of {expected} initial states covered",
                    seen.len()
                ));
            }
            (gs, sum / count as f64)
        })
        .collect();
    ChiAverages { means, warnings }
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("lengths differ ({} vs {})", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::invalid("pearson needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Distribution, SampleSet};

    fn counts(c: &[(u64, u64)]) -> Observation {
        Observation::Samples(SampleSet::from_counts(c.iter().copied().collect(), "t"))
    }

    #[test]
    fn pgs_examples() {
        assert_eq!(pgs(&counts(&[(3, 1000)]), 3).unwrap(), 1.0);
        assert_eq!(pgs(&counts(&[(2, 1000)]), 3).unwrap(), 0.0);
        assert_eq!(pgs(&counts(&[(3, 250), (1, 750)]), 3).unwrap(), 0.25);
        assert!(pgs(&counts(&[]), 3).is_err());
        let d = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(pgs(&Observation::Exact(d), 1).unwrap(), 0.5);
    }

    #[test]
    fn gs_distribution_examples() {
        let set = GroundStateSet { energy: -1.0, states: vec![1, 6] };
        let one = gs_distribution(&counts(&[(1, 40)]), &set).unwrap();
        assert_eq!(one, BTreeMap::from([(1, 1.0), (6, 0.0)]));
        let even = gs_distribution(&counts(&[(1, 7), (6, 7)]), &set).unwrap();
        assert_eq!(even, BTreeMap::from([(1, 0.5), (6, 0.5)]));
        let mixed = gs_distribution(&counts(&[(1, 30), (6, 10), (2, 60)]), &set).unwrap();
        assert_eq!(mixed, BTreeMap::from([(1, 0.75), (6, 0.25)]));
        assert!(matches!(
            gs_distribution(&counts(&[(2, 5)]), &set),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn chi_examples() {
        let curve = |v: f64| ResponseCurve { initial_state: 0, target_gs: 0, p_gs: vec![v; 31] };
        assert_eq!(chi(&curve(0.0)), 0.0);
        assert!((chi(&curve(1.0)) - 31.0 / 30.0).abs() < 1e-12);
        assert!((chi(&curve(0.5)) - 31.0 / 60.0).abs() < 1e-12);
    }

    #[test]
    fn grids() {
        let g = HGrid::default();
        assert_eq!(g.len(), 31);
        assert_eq!(g.values()[0], 0.0);
        assert_eq!(g.values()[30], 3.0);
        assert_eq!(g.values()[7], 0.7);
        let g = HGrid::from_first_step();
        assert_eq!(g.len(), 30);
        assert_eq!(g.values()[0], 0.1);
        assert!(HGrid::new(vec![0.0, 0.0]).is_err());
        assert!(HGrid::new(vec![1.0]).is_err());
    }

    #[test]
    fn averages() {
        let r = |gs, init, chi| SusceptibilityRecord {
            gs_index: gs,
            initial_state: init,
            chi,
            delta: 0.0,
            energy: 0.0,
            hamming: 0.0,
        };
        let recs = [r(1, 0, 0.2), r(1, 1, 0.6), r(2, 0, 1.0), r(2, 1, 0.5)];
        let avg = average_chi_per_gs(&recs, 1);
        assert_eq!(avg.means, BTreeMap::from([(1, 0.4), (2, 0.75)]));
        assert!(avg.warnings.is_empty());
        let avg = average_chi_per_gs(&recs[..3], 1);
        assert_eq!(avg.warnings.len(), 1);
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(pearson(&x, &[1.0; 4]), Err(Error::Undefined(_))));
        assert!(pearson(&x, &x[..3]).is_err());
    }
}
