//! Dense state-vector propagation.
//!
//! Each step freezes `H` at the step midpoint and applies its exact
//! exponential through a real symmetric eigendecomposition, so every step is
//! unitary up to rounding. Steps never straddle a schedule anchor; a segment
//! over which both controls are constant is covered by a single step.

use nalgebra::{DMatrix, SymmetricEigen};

use super::hamiltonian::DiagonalTerms;
use super::sampling::Distribution;
use super::{total_variation, BackendConfig, BackendKind, NORM_FAILURE_THRESHOLD, PHASE_FACTOR};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::schedule::{AnnealEnvelope, AnnealSpec};

const MAX_REFINEMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub start: f64,
    pub len: f64,
}

impl Step {
    pub fn midpoint(&self) -> f64 {
        self.start + 0.5 * self.len
    }
}

/// Steps covering `[0, annealing_time]`.
pub fn step_plan(spec: &AnnealSpec, dt: f64) -> Vec<Step> {
    let ts = spec.breakpoints();
    let mut plan = Vec::new();
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        // Controls are affine inside a segment, so two interior probes decide constancy.
        let constant = spec.controls(a + 0.25 * len) == spec.controls(a + 0.75 * len);
        let pieces = if constant { 1 } else { (len / dt).ceil().max(1.0) as usize };
        let h = len / pieces as f64;
        plan.extend((0..pieces).map(|k| Step {
            start: a + k as f64 * h,
            len: h,
        }));
    }
    plan
}

/// Largest `| ||psi|| - 1 |` observed after each step, over all columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormTrace {
    pub deviations: Vec<f64>,
}

impl NormTrace {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Complex `dim x cols` block stored as real and imaginary parts.
struct Block {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl Block {
    fn basis(dim: usize, columns: &[u64]) -> Self {
        let mut re = DMatrix::zeros(dim, columns.len());
        for (c, &k) in columns.iter().enumerate() {
            re[(k as usize, c)] = 1.0;
        }
        Self {
            re,
            im: DMatrix::zeros(dim, columns.len()),
        }
    }

    fn uniform(dim: usize) -> Self {
        Self {
            re: DMatrix::from_element(dim, 1, 1.0 / (dim as f64).sqrt()),
            im: DMatrix::zeros(dim, 1),
        }
    }

    fn column_norm_deviation(&self) -> (usize, f64) {
        let mut worst = (0, 0.0);
        for c in 0..self.re.ncols() {
            let sq = self.re.column(c).norm_squared() + self.im.column(c).norm_squared();
            let dev = (sq.sqrt() - 1.0).abs();
            if dev > worst.1 || dev.is_nan() {
                worst = (c, dev);
            }
        }
        worst
    }

    fn distributions(&self) -> Result<Vec<Distribution>> {
        (0..self.re.ncols())
            .map(|c| {
                let p: Vec<f64> = self
                    .re
                    .column(c)
                    .iter()
                    .zip(self.im.column(c).iter())
                    .map(|(r, i)| r * r + i * i)
                    .collect();
                let total: f64 = p.iter().sum();
                Distribution::new(p.into_iter().map(|x| x / total).collect())
            })
            .collect()
    }
}

struct Propagator<'a> {
    diag: DiagonalTerms,
    envelope: &'a AnnealEnvelope,
    spec: &'a AnnealSpec,
}

impl Propagator<'_> {
    fn run(&self, dt: f64, block: &mut Block, mut trace: Option<&mut NormTrace>) -> Result<()> {
        let dim = self.diag.dim();
        let cols = block.re.ncols();
        let mut wr = DMatrix::zeros(dim, cols);
        let mut wi = DMatrix::zeros(dim, cols);
        for step in step_plan(self.spec, dt) {
            let (s, g) = self.spec.controls(step.midpoint());
            let (a, b) = self.envelope.eval(s);
            if a == 0.0 {
                for (k, d) in self.diag.diagonal(b, g).enumerate() {
                    let (sin, cos) = (PHASE_FACTOR * d * step.len).sin_cos();
                    rotate_row(&mut block.re, &mut block.im, k, cos, sin);
                }
            } else {
                let eig = SymmetricEigen::new(self.diag.matrix(a, b, g));
                let v = &eig.eigenvectors;
                wr.gemm_tr(1.0, v, &block.re, 0.0);
                wi.gemm_tr(1.0, v, &block.im, 0.0);
                for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                    let (sin, cos) = (PHASE_FACTOR * lambda * step.len).sin_cos();
                    rotate_row(&mut wr, &mut wi, k, cos, sin);
                }
                block.re.gemm(1.0, v, &wr, 0.0);
                block.im.gemm(1.0, v, &wi, 0.0);
            }
            let (column, dev) = block.column_norm_deviation();
            if let Some(trace) = trace.as_deref_mut() {
                trace.deviations.push(dev);
            }
            if !(dev <= NORM_FAILURE_THRESHOLD) {
                return Err(Error::Integration(format!(
                    "norm drift {dev:e} in column {column} after the step ending at t = {} us (s = {s}, g = {g}, step {} us)",
                    step.start + step.len,
                    step.len
                )));
            }
        }
        Ok(())
    }
}

/// Multiplies row `k` by `exp(-i theta)` given `cos theta`, `sin theta`.
fn rotate_row(re: &mut DMatrix<f64>, im: &mut DMatrix<f64>, k: usize, cos: f64, sin: f64) {
    for c in 0..re.ncols() {
        let (x, y) = (re[(k, c)], im[(k, c)]);
        re[(k, c)] = x * cos + y * sin;
        im[(k, c)] = y * cos - x * sin;
    }
}

fn prepare<'a>(
    problem: &IsingProblem,
    envelope: &'a AnnealEnvelope,
    spec: &'a AnnealSpec,
    cfg: &BackendConfig,
) -> Result<Propagator<'a>> {
    if cfg.kind != BackendKind::Schrodinger {
        return Err(Error::invalid("evolve requires the schrodinger backend"));
    }
    cfg.validate()?;
    spec.validate()?;
    if let Some(init) = &spec.initial_state {
        if init.len() != problem.num_variables() {
            return Err(Error::invalid(format!(
                "initial state has {} spins for {} variables",
                init.len(),
                problem.num_variables()
            )));
        }
    }
    Ok(Propagator {
        diag: DiagonalTerms::new(problem)?,
        envelope,
        spec,
    })
}

fn run_refined(
    prop: &Propagator<'_>,
    cfg: &BackendConfig,
    start: impl Fn() -> Block,
    mut trace: Option<&mut NormTrace>,
) -> Result<Vec<Distribution>> {
    let mut dt = cfg.dt;
    let mut block = start();
    prop.run(dt, &mut block, trace.as_deref_mut())?;
    let mut current = block.distributions()?;
    let Some(tol) = cfg.convergence_tolerance else {
        return Ok(current);
    };
    for _ in 0..MAX_REFINEMENTS {
        dt *= 0.5;
        let mut block = start();
        prop.run(dt, &mut block, None)?;
        let refined = block.distributions()?;
        let change = current
            .iter()
            .zip(&refined)
            .map(|(p, q)| total_variation(p.probabilities(), q.probabilities()))
            .fold(0.0, f64::max);
        current = refined;
        if change <= tol {
            return Ok(current);
        }
    }
    Err(Error::Integration(format!(
        "no convergence to {tol:e} after halving dt {MAX_REFINEMENTS} times (dt = {dt:e} us)"
    )))
}

/// Final measurement distribution. Starts from `spec.initial_state` when
/// present, else from the uniform superposition.
pub fn evolve(
    problem: &IsingProblem,
    envelope: &AnnealEnvelope,
    spec: &AnnealSpec,
    cfg: &BackendConfig,
) -> Result<Distribution> {
    Ok(evolve_traced(problem, envelope, spec, cfg)?.0)
}

/// As [`evolve`], also returning the per-step norm deviations of the first pass.
pub fn evolve_traced(
    problem: &IsingProblem,
    envelope: &AnnealEnvelope,
    spec: &AnnealSpec,
    cfg: &BackendConfig,
) -> Result<(Distribution, NormTrace)> {
    let prop = prepare(problem, envelope, spec, cfg)?;
    let dim = prop.diag.dim();
    let init = spec.initial_state.as_ref().map(|s| s.index());
    let start = || match init {
        Some(k) => Block::basis(dim, &[k]),
        None => Block::uniform(dim),
    };
    let mut trace = NormTrace::default();
    let mut out = run_refined(&prop, cfg, start, Some(&mut trace))?;
    Ok((out.remove(0), trace))
}

/// Final distributions for each basis-state start in `initials`, sharing one
/// propagation. `spec.initial_state` only selects the schedule checks.
pub fn transition_probabilities(
    problem: &IsingProblem,
    envelope: &AnnealEnvelope,
    spec: &AnnealSpec,
    initials: &[u64],
    cfg: &BackendConfig,
) -> Result<Vec<Distribution>> {
    let prop = prepare(problem, envelope, spec, cfg)?;
    let dim = prop.diag.dim();
    if let Some(&bad) = initials.iter().find(|&&k| k as usize >= dim) {
        return Err(Error::invalid(format!("initial state {bad} out of range")));
    }
    if initials.is_empty() {
        return Ok(Vec::new());
    }
    run_refined(&prop, cfg, || Block::basis(dim, initials), None)
}
