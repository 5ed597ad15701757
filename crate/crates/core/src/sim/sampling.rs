use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability vector over canonical state indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Rejects negative or non-finite entries and totals off 1 by more than 1e-9.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::invalid("empty distribution"));
        }
        if let Some(k) = probabilities.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid(format!(
                "probability of state {k} is {}",
                probabilities[k]
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("distribution sums to {total}")));
        }
        Ok(Self { probabilities })
    }

    pub fn point_mass(index: u64, len: usize) -> Result<Self> {
        if index as usize >= len {
            return Err(Error::invalid(format!("state {index} out of range")));
        }
        let mut p = vec![0.0; len];
        p[index as usize] = 1.0;
        Ok(Self { probabilities: p })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probability(&self, index: u64) -> f64 {
        self.probabilities.get(index as usize).copied().unwrap_or(0.0)
    }

    /// Highest-probability state, lowest index on ties.
    pub fn argmax(&self) -> u64 {
        let mut best = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = k;
            }
        }
        best as u64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("state_index,probability\n");
        for (k, p) in self.probabilities.iter().enumerate() {
            let _ = writeln!(out, "{k},{p:?}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub counts: BTreeMap<u64, u64>,
    pub total_reads: u64,
    pub provenance: String,
}

impl SampleSet {
    pub fn from_counts(counts: BTreeMap<u64, u64>, provenance: impl Into<String>) -> Self {
        let counts: BTreeMap<u64, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Self {
            total_reads: counts.values().sum(),
            counts,
            provenance: provenance.into(),
        }
    }

    pub fn count(&self, index: u64) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Most frequent state, lowest index on ties.
    pub fn mode(&self) -> Option<u64> {
        let mut best: Option<(u64, u64)> = None;
        for (&k, &c) in &self.counts {
            if best.map_or(true, |(_, bc)| c > bc) {
                best = Some((k, c));
            }
        }
        best.map(|(k, _)| k)
    }
}

/// Multinomial draw of `num_reads` reads.
pub fn sample(dist: &Distribution, num_reads: u64, seed: u64) -> SampleSet {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let last_nonzero = dist
        .probabilities()
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..num_reads {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(k as u64).or_insert(0) += 1;
    }
    SampleSet::from_counts(counts, format!("multinomial seed={seed}"))
}

/// Expected counts for `num_reads` reads, without randomness.
pub fn sample_exact(dist: &Distribution, num_reads: u64) -> BTreeMap<u64, f64> {
    dist.probabilities()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k as u64, p * num_reads as f64))
        .collect()
}

/// Result of a run: exact probabilities or finite reads.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Exact(Distribution),
    Samples(SampleSet),
}

impl Observation {
    /// Mass (or read fraction) at `index`.
    pub fn fraction(&self, index: u64) -> Result<f64> {
        match self {
            Self::Exact(d) => Ok(d.probability(index)),
            Self::Samples(s) if s.total_reads == 0 => Err(Error::invalid("empty sample set")),
            Self::Samples(s) => Ok(s.count(index) as f64 / s.total_reads as f64),
        }
    }

    /// Non-zero weights keyed by state index.
    pub fn weights(&self) -> BTreeMap<u64, f64> {
        match self {
            Self::Exact(d) => sample_exact(d, 1),
            Self::Samples(s) => s.counts.iter().map(|(&k, &c)| (k, c as f64)).collect(),
        }
    }

    pub fn dominant(&self) -> Result<u64> {
        match self {
            Self::Exact(d) => Ok(d.argmax()),
            Self::Samples(s) => s.mode().ok_or_else(|| Error::invalid("empty sample set")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn point_mass_takes_every_read() {
        let d = Distribution::point_mass(2, 4).unwrap();
        let s = sample(&d, 500, 9);
        assert_eq!(s.counts, BTreeMap::from([(2, 500)]));
        assert_eq!(s.total_reads, 500);
    }

    #[test]
    fn seeded_draws_repeat() {
        let d = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(sample(&d, 1000, 4), sample(&d, 1000, 4));
        assert_ne!(sample(&d, 1000, 4).counts, sample(&d, 1000, 5).counts);
    }

    #[test]
    fn uniform_counts_within_three_sigma() {
        let d = Distribution::new(vec![0.25; 4]).unwrap();
        let n = 1_000_000u64;
        let s = sample(&d, n, 1);
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            assert!((s.count(k) as f64 - 250_000.0).abs() < 3.0 * sigma);
        }
        assert_eq!(s.counts.values().sum::<u64>(), n);
    }

    #[test]
    fn zero_probability_states_are_never_drawn() {
        let d = Distribution::new(vec![0.0, 0.5, 0.0, 0.5, 0.0]).unwrap();
        let s = sample(&d, 10_000, 3);
        assert!(s.counts.keys().all(|k| *k == 1 || *k == 3));
    }

    #[test]
    fn exact_mode_gives_expected_counts() {
        let d = Distribution::new(vec![0.25, 0.0, 0.75]).unwrap();
        assert_eq!(sample_exact(&d, 1000), BTreeMap::from([(0, 250.0), (2, 750.0)]));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let s = SampleSet::from_counts(BTreeMap::from([(5, 10), (3, 10)]), "t");
        assert_eq!(s.mode(), Some(3));
        let d = Distribution::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(d.argmax(), 1);
    }
}
