//! `cluster`: spectral clustering of each target's response curves.

use std::fmt::Write as _;

use susmap::analysis::{spectral_cluster, ClusterParams};

use crate::analyze::{load_curves, open_run};
use crate::error::{CliError, Result};
use crate::store::{unix_now, CommandRecord, RunDir};

pub const CLUSTERS: &str = "analysis/clusters.csv";

/// `(gs, initial, cluster)` rows, in file order.
pub fn run_cluster(dir: &RunDir, params: &ClusterParams) -> Result<Vec<(u64, u64, usize)>> {
    let started = unix_now();
    let exp = open_run(dir)?;
    let (curves, gaps) = load_curves(&exp, dir)?;
    let mut rows = Vec::new();
    for &gs in &exp.targets {
        let members: Vec<_> = curves.range((gs, 0)..=(gs, u64::MAX)).map(|(_, c)| c).collect();
        if members.is_empty() {
            continue;
        }
        let vectors: Vec<Vec<f64>> = members.iter().map(|c| c.p_gs.clone()).collect();
        let assignment = spectral_cluster(&vectors, params)
            .map_err(|e| CliError::config("clustering", format!("ground state {gs}: {e}")))?;
        rows.extend(members.iter().zip(assignment.labels).map(|(c, l)| (gs, c.initial_state, l)));
    }
    if rows.is_empty() {
        return Err(CliError::Missing {
            command: "sweep",
            message: "no complete response curves".into(),
        });
    }
    let mut text = String::from("gs_index,initial_state,cluster\n");
    for (gs, init, l) in &rows {
        let _ = writeln!(text, "{gs},{init},{l}");
    }
    dir.write(CLUSTERS, &text)?;
    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        warnings: gaps.into_iter().map(|g| format!("missing curve: {g}")).collect(),
        ..CommandRecord::default()
    };
    dir.update_manifest("cluster", record, exp.config.backend.seed)?;
    Ok(rows)
}
