//! `tile`: disjoint copies of the problem graph on a Pegasus graph.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use susmap::topology::{parse_defect_list, pegasus_graph, tile_disjoint_embeddings, validate_embeddings, TileParams};

use crate::config::{Experiment, TilingSettings};
use crate::error::{CliError, Result};
use crate::store::{unix_now, CommandRecord, RunDir, CONFIG};

pub const EMBEDDINGS: &str = "tiling/embeddings.json";
pub const TILING_SUMMARY: &str = "tiling/summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingSummary {
    pub m: usize,
    pub fabric_only: bool,
    pub defects: usize,
    pub qubits: usize,
    pub couplers: usize,
    pub pattern_variables: usize,
    pub embeddings: usize,
    pub seed: u64,
}

pub fn load_defects(settings: &TilingSettings, base: &Path) -> Result<BTreeSet<u64>> {
    match &settings.defects {
        None => Ok(BTreeSet::new()),
        Some(p) => {
            let p = if p.is_absolute() { p.clone() } else { base.join(p) };
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::file(&p, e))?;
            parse_defect_list(&text).map_err(|e| CliError::file(&p, e))
        }
    }
}

pub fn run_tile(exp: &Experiment, defects: &BTreeSet<u64>, dir: &RunDir) -> Result<TilingSummary> {
    let started = unix_now();
    let t = &exp.config.tiling;
    let graph = pegasus_graph(t.m, t.fabric_only, defects)
        .map_err(|e| CliError::config("tiling.m", e.to_string()))?;
    let params = TileParams {
        seed: exp.config.backend.seed,
        retry_budget: t.retry_budget,
    };
    let set = tile_disjoint_embeddings(&graph, &exp.problem, &params)?;
    let findings = validate_embeddings(&graph, &exp.problem, &set);
    if let Some(f) = findings.first() {
        return Err(susmap::Error::Undefined(format!("tiling failed validation: {f:?}")).into());
    }
    let summary = TilingSummary {
        m: t.m,
        fabric_only: t.fabric_only,
        defects: defects.len(),
        qubits: graph.num_nodes(),
        couplers: graph.num_edges(),
        pattern_variables: exp.problem.num_variables(),
        embeddings: set.len(),
        seed: params.seed,
    };
    dir.write(EMBEDDINGS, &set.to_json())?;
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    dir.write(TILING_SUMMARY, &text)?;
    if !dir.exists(CONFIG) {
        crate::sweep::prepare_run_dir(exp, dir)?;
    }
    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        ..CommandRecord::default()
    };
    dir.update_manifest("tile", record, exp.config.backend.seed)?;
    Ok(summary)
}
