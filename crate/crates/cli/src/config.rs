//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use susmap::analysis::{ClusterParams, HGrid};
use susmap::ising::{enumerate_ground_states, GroundStateSet, IsingProblem};
use susmap::schedule::{
    parse_envelope_csv, validate_hgain_schedule, AnnealEnvelope, HGainLimits, PiecewiseLinearSchedule,
};
use susmap::sim::{BackendConfig, Presets};
use susmap::topology::TileParams;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub problem: ProblemSource,
    /// `backend.seed` is the master seed of the run.
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default)]
    pub envelope: EnvelopeSource,
    #[serde(default)]
    pub schedule: Presets,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub clustering: ClusterParams,
    #[serde(default)]
    pub tiling: TilingSettings,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomProblem>,
}

/// `J = +-1` spin glass; all pairs are coupled when `edges` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomProblem {
    pub num_variables: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSource {
    /// CSV with header `s,A_GHz,B_GHz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Named(String),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    All(String),
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    /// `"default"` (0.0..=3.0), `"from_first_step"` (0.1..=3.0) or explicit values.
    pub h_grid: GridSpec,
    pub targets: Selection,
    pub initials: Selection,
    /// Also run each initial state once without h-gain.
    pub ra_only: bool,
    /// Also run a forward anneal of the bare problem.
    pub forward: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            h_grid: GridSpec::Named("default".into()),
            targets: Selection::All("all".into()),
            initials: Selection::All("all".into()),
            ra_only: true,
            forward: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TilingSettings {
    pub m: usize,
    pub fabric_only: bool,
    /// Defect list, one qubit id per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defects: Option<PathBuf>,
    pub retry_budget: u64,
}

impl Default for TilingSettings {
    fn default() -> Self {
        Self {
            m: 16,
            fabric_only: true,
            defects: None,
            retry_budget: TileParams::default().retry_budget,
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| {
        let field = e
            .span()
            .map(|s| format!("line {}", text[..s.start.min(text.len())].matches('\n').count() + 1))
            .unwrap_or_else(|| "document".into());
        CliError::config(field, e.message().trim())
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
    parse_config(&text)
}

pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

/// A config with every source loaded and every selection expanded.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub problem: IsingProblem,
    pub ground_states: GroundStateSet,
    pub targets: Vec<u64>,
    pub initials: Vec<u64>,
    pub grid: HGrid,
    pub presets: Presets,
}

fn relative(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn resolve_problem(src: &ProblemSource, base: &Path) -> Result<IsingProblem> {
    let set = [src.builtin.is_some(), src.path.is_some(), src.random.is_some()];
    if set.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::config("problem", "set exactly one of builtin, path, random"));
    }
    if let Some(name) = &src.builtin {
        return susmap::instances::builtin(name).map_err(|e| CliError::config("problem.builtin", e.to_string()));
    }
    if let Some(p) = &src.path {
        let p = relative(base, p);
        return susmap::instance::read_instance(&p).map_err(|e| CliError::file(&p, e));
    }
    let r = src.random.as_ref().expect("one source is set");
    let edges = match &r.edges {
        Some(e) => e.clone(),
        None => (0..r.num_variables)
            .flat_map(|i| (i + 1..r.num_variables).map(move |j| (i, j)))
            .collect(),
    };
    susmap::ising::random_spin_glass(r.num_variables, &edges, r.seed)
        .map_err(|e| CliError::config("problem.random", e.to_string()))
}

fn resolve_envelope(src: &EnvelopeSource, base: &Path) -> Result<AnnealEnvelope> {
    match (&src.path, src.a_max, src.b_max) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(CliError::config(
            "envelope",
            "path and a_max/b_max are mutually exclusive",
        )),
        (Some(p), _, _) => {
            let p = relative(base, p);
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::file(&p, e))?;
            parse_envelope_csv(&text).map_err(|e| CliError::file(&p, e))
        }
        (None, a, b) => {
            let a_max = a.unwrap_or(susmap::schedule::DEFAULT_A_MAX_GHZ);
            let b_max = b.unwrap_or(susmap::schedule::DEFAULT_B_MAX_GHZ);
            if !(a_max >= 0.0 && b_max > 0.0 && a_max.is_finite() && b_max.is_finite()) {
                return Err(CliError::config("envelope", "a_max must be >= 0 and b_max > 0"));
            }
            Ok(AnnealEnvelope::Analytic { a_max, b_max })
        }
    }
}

fn resolve_selection(sel: &Selection, field: &str, universe: &[u64]) -> Result<Vec<u64>> {
    match sel {
        Selection::All(k) if k == "all" => Ok(universe.to_vec()),
        Selection::All(k) => Err(CliError::config(field, format!("expected \"all\" or a list, got {k:?}"))),
        Selection::List(list) => {
            let mut out = Vec::with_capacity(list.len());
            for (i, &s) in list.iter().enumerate() {
                if universe.binary_search(&s).is_err() {
                    return Err(CliError::config(format!("{field}[{i}]"), format!("{s} is not allowed here")));
                }
                if out.contains(&s) {
                    return Err(CliError::config(format!("{field}[{i}]"), format!("duplicate {s}")));
                }
                out.push(s);
            }
            if out.is_empty() {
                return Err(CliError::config(field, "empty selection"));
            }
            out.sort_unstable();
            Ok(out)
        }
    }
}

impl Experiment {
    /// `base` anchors relative paths (normally the config file's directory).
    pub fn resolve(config: ExperimentConfig, base: &Path) -> Result<Self> {
        config
            .backend
            .validate()
            .map_err(|e| CliError::config("backend", e.to_string()))?;
        let problem = resolve_problem(&config.problem, base)?;
        let ground_states = enumerate_ground_states(&problem)?;
        let grid = match &config.sweep.h_grid {
            GridSpec::Named(n) if n == "default" => HGrid::default(),
            GridSpec::Named(n) if n == "from_first_step" => HGrid::from_first_step(),
            GridSpec::Named(n) => {
                return Err(CliError::config("sweep.h_grid", format!("unknown grid {n:?}")))
            }
            GridSpec::Values(v) => {
                HGrid::new(v.clone()).map_err(|e| CliError::config("sweep.h_grid", e.to_string()))?
            }
        };
        // Device limits apply to the shape on its native 100 us clock.
        let h_max = grid.values().iter().fold(0.0f64, |m, h| m.max(h.abs()));
        let shape = PiecewiseLinearSchedule::from_pairs(&config.schedule.hgain_shape)
            .and_then(|s| s.amplified(h_max))
            .map_err(|e| CliError::config("schedule.hgain_shape", e.to_string()))?;
        if let Some(v) = validate_hgain_schedule(&shape, &HGainLimits::default()).first() {
            return Err(CliError::config("schedule.hgain_shape", format!("at h = {h_max}: {v}")));
        }
        let targets = resolve_selection(&config.sweep.targets, "sweep.targets", &ground_states.states)
            .map_err(|e| match e {
                CliError::Config { field, message } => CliError::config(field, format!("{message} (ground states: {:?})", ground_states.states)),
                other => other,
            })?;
        let all_states: Vec<u64> = (0..problem.num_states()).collect();
        let initials = resolve_selection(&config.sweep.initials, "sweep.initials", &all_states)?;
        let mut presets = config.schedule.clone();
        presets.envelope = resolve_envelope(&config.envelope, base)?;
        presets
            .forward_spec()
            .map_err(|e| CliError::config("schedule.forward_anchors", e.to_string()))?;
        if let Some(&t) = targets.first() {
            let state = susmap::SpinState::from_index(t, problem.num_variables())?;
            presets
                .reverse_spec(&state, grid.values()[grid.len() - 1])
                .map_err(|e| CliError::config("schedule", e.to_string()))?;
        }
        Ok(Self {
            config,
            problem,
            ground_states,
            targets,
            initials,
            grid,
            presets,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let config = load_config(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::resolve(config, base)
    }
}
