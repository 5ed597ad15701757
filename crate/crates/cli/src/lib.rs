//! Orchestration for susceptibility experiments: sweeps, analysis,
//! clustering, transition networks, tiling and reports over a run directory.

pub mod analyze;
pub mod cluster;
pub mod config;
pub mod error;
pub mod network;
pub mod report;
pub mod store;
mod svg;
pub mod sweep;
pub mod tile;

use std::path::PathBuf;

use susmap::sim::BackendKind;

use crate::config::{load_config, Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::store::RunDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sweep,
    Analyze,
    Cluster,
    Network,
    Tile,
    Report,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub backend: Option<BackendKind>,
    pub exact: bool,
}

impl Options {
    fn overridden(&self, mut config: ExperimentConfig) -> ExperimentConfig {
        if let Some(seed) = self.seed {
            config.backend.seed = seed;
        }
        if let Some(kind) = self.backend {
            config.backend.kind = kind;
        }
        if self.exact {
            config.schedule.exact = true;
        }
        config
    }

    fn experiment(&self) -> Result<(Experiment, RunDir)> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::config("--config", "this command needs a config file"))?;
        let config = self.overridden(load_config(path)?);
        let base = path.parent().map(PathBuf::from).unwrap_or_default();
        let out = self
            .out
            .clone()
            .or_else(|| config.output.as_ref().map(|o| base.join(o)))
            .ok_or_else(|| CliError::config("output", "set `output` in the config or pass --out"))?;
        Ok((Experiment::resolve(config, &base)?, RunDir::new(out)))
    }

    /// Run directory for commands that read a previous sweep.
    fn run_dir(&self) -> Result<RunDir> {
        if let Some(out) = &self.out {
            return Ok(RunDir::new(out));
        }
        if let Some(path) = &self.config {
            let config = load_config(path)?;
            if let Some(o) = config.output {
                let base = path.parent().map(PathBuf::from).unwrap_or_default();
                return Ok(RunDir::new(base.join(o)));
            }
        }
        Err(CliError::config("--out", "pass --out or a config with `output`"))
    }

    fn jobs(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// Runs one command; the returned JSON value summarizes what was produced.
pub fn run(command: Command, opts: &Options) -> Result<serde_json::Value> {
    use serde_json::json;
    match command {
        Command::Sweep => {
            let (exp, dir) = opts.experiment()?;
            let s = sweep::run_sweep(&exp, &dir, opts.jobs())?;
            if !s.failures.is_empty() {
                return Err(CliError::Partial {
                    failed: s.failures.len(),
                    total: s.failures.len() + s.computed + s.reused,
                });
            }
            Ok(json!({ "command": "sweep", "out": dir.root, "computed": s.computed, "reused": s.reused }))
        }
        Command::Analyze => {
            let dir = opts.run_dir()?;
            let s = analyze::run_analyze(&dir)?;
            Ok(json!({ "command": "analyze", "out": dir.root, "records": s.records, "correlations": s.correlations }))
        }
        Command::Cluster => {
            let dir = opts.run_dir()?;
            let exp = analyze::open_run(&dir)?;
            let rows = cluster::run_cluster(&dir, &exp.config.clustering)?;
            Ok(json!({ "command": "cluster", "out": dir.root, "labeled": rows.len() }))
        }
        Command::Network => {
            let dir = opts.run_dir()?;
            let nets = network::run_network(&dir)?;
            let sizes: Vec<_> = nets
                .iter()
                .map(|(g, (_, n))| json!({ "gs": g, "nodes": n.nodes.len(), "edges": n.edges.len() }))
                .collect();
            Ok(json!({ "command": "network", "out": dir.root, "networks": sizes }))
        }
        Command::Tile => {
            let (exp, dir) = opts.experiment()?;
            let base = opts
                .config
                .as_ref()
                .and_then(|p| p.parent())
                .map(PathBuf::from)
                .unwrap_or_default();
            let defects = tile::load_defects(&exp.config.tiling, &base)?;
            let s = tile::run_tile(&exp, &defects, &dir)?;
            Ok(json!({ "command": "tile", "out": dir.root, "summary": s }))
        }
        Command::Report => {
            let dir = opts.run_dir()?;
            let files = report::run_report(&dir)?;
            Ok(json!({ "command": "report", "out": dir.root, "files": files }))
        }
    }
}
