//! `sweep`: every (target, h) task plus the RA-only and forward runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use susmap::analysis::target_distributions;
use susmap::schedule::AnnealEnvelope;
use susmap::seed::derive_seed;
use susmap::sim::{
    evolve, sample, svmc_evolve, transition_probabilities, BackendConfig, BackendKind, Observation,
};
use susmap::SpinState;

use crate::config::{to_toml, EnvelopeSource, Experiment, ProblemSource};
use crate::error::{CliError, Result};
use crate::store::{unix_now, CommandRecord, RunDir, TaskFailure, CONFIG};

pub const RA_ONLY_KEY: u64 = 1 << 63;
pub const FORWARD_KEY: u64 = (1 << 63) + 1;

pub const CURVES: &str = "sweep/response_curves.csv";
pub const RA_ONLY: &str = "sweep/ra_only.csv";
pub const FORWARD: &str = "sweep/forward.csv";
const RA_ONLY_TASK: &str = "sweep/tasks/ra_only.csv";
const FORWARD_TASK: &str = "sweep/tasks/forward.csv";

pub fn task_path(gs: u64, h_index: usize) -> String {
    format!("sweep/tasks/gs{gs}/h{h_index:02}.csv")
}

/// `(state, probability)` pairs with non-zero weight; sampled reads become
/// read fractions.
fn weights(obs: &Observation) -> Vec<(u64, f64)> {
    match obs {
        Observation::Exact(d) => d
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(k, &p)| (k as u64, p))
            .collect(),
        Observation::Samples(s) => s
            .counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / s.total_reads as f64))
            .collect(),
    }
}

fn distribution_csv(rows: &[(u64, &Observation)]) -> String {
    let mut out = String::from("initial_state,state_index,probability\n");
    for &(init, obs) in rows {
        for (k, p) in weights(obs) {
            let _ = writeln!(out, "{init},{k},{p:?}");
        }
    }
    out
}

/// Per-initial-state distributions of one task file.
pub type TaskDistributions = BTreeMap<u64, BTreeMap<u64, f64>>;

pub fn parse_distributions(text: &str) -> Result<TaskDistributions> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out: TaskDistributions = BTreeMap::new();
    for row in rdr.deserialize::<(u64, u64, f64)>() {
        let (init, k, p) = row.map_err(|e| susmap::Error::Parse {
            line: e.position().map(|p| p.line() as usize),
            message: e.to_string(),
        })?;
        out.entry(init).or_default().insert(k, p);
    }
    Ok(out)
}

pub fn read_task(dir: &RunDir, rel: &str) -> Result<TaskDistributions> {
    parse_distributions(&dir.read(rel)?).map_err(|e| CliError::file(&dir.path(rel), e))
}

fn task_complete(dir: &RunDir, rel: &str, initials: &[u64]) -> bool {
    dir.exists(rel)
        && read_task(dir, rel)
            .map(|d| initials.iter().all(|i| d.contains_key(i)))
            .unwrap_or(false)
}

fn with_seed(backend: &BackendConfig, seed: u64) -> BackendConfig {
    BackendConfig {
        seed,
        ..backend.clone()
    }
}

/// Writes the self-contained snapshot (config, instance, envelope) into
/// `dir`, refusing a directory that already holds a different one.
pub fn prepare_run_dir(exp: &Experiment, dir: &RunDir) -> Result<()> {
    let mut snapshot = exp.config.clone();
    snapshot.output = None;
    snapshot.problem = ProblemSource {
        path: Some("problem.toml".into()),
        ..ProblemSource::default()
    };
    let mut files = vec![(
        "problem.toml",
        susmap::instance::to_instance_string(&exp.problem),
    )];
    snapshot.envelope = match &exp.presets.envelope {
        AnnealEnvelope::Analytic { a_max, b_max } => EnvelopeSource {
            a_max: Some(*a_max),
            b_max: Some(*b_max),
            path: None,
        },
        table => {
            files.push(("envelope.csv", table.to_csv(0)));
            EnvelopeSource {
                path: Some("envelope.csv".into()),
                ..EnvelopeSource::default()
            }
        }
    };
    let config_text = to_toml(&snapshot);
    if dir.exists(CONFIG) && dir.read(CONFIG)? != config_text {
        return Err(CliError::config(
            "output",
            format!(
                "{} already holds a run with a different configuration",
                dir.root.display()
            ),
        ));
    }
    for (name, text) in files {
        dir.write(name, &text)?;
    }
    dir.write(CONFIG, &config_text)
}

enum Task {
    Curve { gs: u64, h_index: usize },
    RaOnly,
    Forward,
}

impl Task {
    fn path(&self) -> String {
        match *self {
            Task::Curve { gs, h_index } => task_path(gs, h_index),
            Task::RaOnly => RA_ONLY_TASK.into(),
            Task::Forward => FORWARD_TASK.into(),
        }
    }

    fn initials<'a>(&self, exp: &'a Experiment) -> &'a [u64] {
        match self {
            Task::Forward => &[0],
            _ => &exp.initials,
        }
    }

    fn run(&self, exp: &Experiment) -> Result<String> {
        let master = exp.config.backend.seed;
        let presets = &exp.presets;
        match *self {
            Task::Curve { gs, h_index } => {
                let backend = with_seed(&exp.config.backend, derive_seed(master, &[gs, h_index as u64]));
                let h = exp.grid.values()[h_index];
                let obs = target_distributions(&exp.problem, gs, h, &exp.initials, presets, &backend)?;
                let rows: Vec<(u64, &Observation)> = exp.initials.iter().copied().zip(&obs).collect();
                Ok(distribution_csv(&rows))
            }
            Task::RaOnly => {
                let seed = derive_seed(master, &[RA_ONLY_KEY]);
                let backend = with_seed(&exp.config.backend, seed);
                let n = exp.problem.num_variables();
                let obs: Vec<Observation> = match backend.kind {
                    BackendKind::Schrodinger => {
                        let spec = presets.reverse_spec(&SpinState::from_index(exp.initials[0], n)?, 0.0)?;
                        transition_probabilities(&exp.problem, &presets.envelope, &spec, &exp.initials, &backend)?
                            .into_iter()
                            .zip(&exp.initials)
                            .map(|(d, &i)| {
                                if presets.exact {
                                    Observation::Exact(d)
                                } else {
                                    Observation::Samples(sample(&d, presets.num_reads, derive_seed(seed, &[i])))
                                }
                            })
                            .collect()
                    }
                    BackendKind::Svmc => exp
                        .initials
                        .iter()
                        .map(|&i| {
                            let spec = presets.reverse_spec(&SpinState::from_index(i, n)?, 0.0)?;
                            let cfg = with_seed(&backend, derive_seed(seed, &[i]));
                            Ok(Observation::Samples(svmc_evolve(&exp.problem, &presets.envelope, &spec, &cfg)?))
                        })
                        .collect::<Result<_>>()?,
                };
                let rows: Vec<(u64, &Observation)> = exp.initials.iter().copied().zip(&obs).collect();
                Ok(distribution_csv(&rows))
            }
            Task::Forward => {
                let seed = derive_seed(master, &[FORWARD_KEY]);
                let backend = with_seed(&exp.config.backend, seed);
                let spec = presets.forward_spec()?;
                let obs = match backend.kind {
                    BackendKind::Schrodinger => {
                        let d = evolve(&exp.problem, &presets.envelope, &spec, &backend)?;
                        if presets.exact {
                            Observation::Exact(d)
                        } else {
                            Observation::Samples(sample(&d, spec.num_reads, seed))
                        }
                    }
                    BackendKind::Svmc => {
                        Observation::Samples(svmc_evolve(&exp.problem, &presets.envelope, &spec, &backend)?)
                    }
                };
                Ok(distribution_csv(&[(0, &obs)]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub computed: usize,
    pub reused: usize,
    pub failures: Vec<TaskFailure>,
}

fn merge_outputs(exp: &Experiment, dir: &RunDir) -> Result<()> {
    let mut curves = String::from("gs_index,initial_state,h,p_gs\n");
    for &gs in &exp.targets {
        let tasks: Vec<Option<TaskDistributions>> = (0..exp.grid.len())
            .map(|j| read_task(dir, &task_path(gs, j)).ok())
            .collect();
        for &init in &exp.initials {
            for (j, h) in exp.grid.values().iter().enumerate() {
                if let Some(d) = tasks[j].as_ref().and_then(|t| t.get(&init)) {
                    let p = d.get(&gs).copied().unwrap_or(0.0);
                    let _ = writeln!(curves, "{gs},{init},{h:?},{p:?}");
                }
            }
        }
    }
    dir.write(CURVES, &curves)?;

    if exp.config.sweep.ra_only {
        if let Ok(d) = read_task(dir, RA_ONLY_TASK) {
            let mut out = String::from("gs_index,initial_state,p_gs\n");
            for &gs in &exp.targets {
                for (init, dist) in &d {
                    let p = dist.get(&gs).copied().unwrap_or(0.0);
                    let _ = writeln!(out, "{gs},{init},{p:?}");
                }
            }
            dir.write(RA_ONLY, &out)?;
        }
    }
    if exp.config.sweep.forward {
        if let Some(dist) = read_task(dir, FORWARD_TASK).ok().and_then(|d| d.get(&0).cloned()) {
            let hits: f64 = exp
                .ground_states
                .states
                .iter()
                .map(|g| dist.get(g).copied().unwrap_or(0.0))
                .sum();
            let mut out = String::from("gs_index,p_gs,gs_share\n");
            for &gs in &exp.ground_states.states {
                let p = dist.get(&gs).copied().unwrap_or(0.0);
                let share = if hits > 0.0 { p / hits } else { 0.0 };
                let _ = writeln!(out, "{gs},{p:?},{share:?}");
            }
            dir.write(FORWARD, &out)?;
        }
    }
    Ok(())
}

/// Runs every task whose output is missing or incomplete, then merges.
/// Task failures are collected rather than aborting the sweep.
pub fn run_sweep(exp: &Experiment, dir: &RunDir, jobs: usize) -> Result<SweepSummary> {
    let started = unix_now();
    prepare_run_dir(exp, dir)?;
    let mut tasks: Vec<Task> = exp
        .targets
        .iter()
        .flat_map(|&gs| (0..exp.grid.len()).map(move |h_index| Task::Curve { gs, h_index }))
        .collect();
    if exp.config.sweep.ra_only {
        tasks.push(Task::RaOnly);
    }
    if exp.config.sweep.forward {
        tasks.push(Task::Forward);
    }
    let (done, todo): (Vec<Task>, Vec<Task>) = tasks
        .into_iter()
        .partition(|t| task_complete(dir, &t.path(), t.initials(exp)));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::config("jobs", e.to_string()))?;
    let results: Vec<(String, Result<()>)> = pool.install(|| {
        todo.par_iter()
            .map(|t| {
                let path = t.path();
                let res = t.run(exp).and_then(|text| dir.write(&path, &text));
                (path, res)
            })
            .collect()
    });
    let failures: Vec<TaskFailure> = results
        .into_iter()
        .filter_map(|(task, r)| r.err().map(|e| TaskFailure { task, error: e.to_string() }))
        .collect();
    let summary = SweepSummary {
        computed: todo.len() - failures.len(),
        reused: done.len(),
        failures,
    };
    merge_outputs(exp, dir)?;
    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        computed_tasks: summary.computed,
        reused_tasks: summary.reused,
        failures: summary.failures.clone(),
        warnings: Vec::new(),
    };
    dir.update_manifest("sweep", record, exp.config.backend.seed)?;
    Ok(summary)
}
