//! `network`: dominant-state paths and their union per target.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use susmap::network::{export_network, DominantPath, NetworkFormat, TransitionNetwork};

use crate::analyze::open_run;
use crate::error::{CliError, Result};
use crate::store::{unix_now, CommandRecord, RunDir};
use crate::sweep::{read_task, task_path, TaskDistributions};

pub const PATHS: &str = "networks/paths.csv";

pub fn network_path(gs: u64, format: NetworkFormat) -> String {
    format!("networks/gs{gs}.{}", format.extension())
}

/// Argmax of a stored distribution, lowest index on ties.
fn dominant(dist: &BTreeMap<u64, f64>) -> Option<u64> {
    let mut best: Option<(u64, f64)> = None;
    for (&k, &p) in dist {
        if best.map_or(true, |(_, bp)| p > bp) {
            best = Some((k, p));
        }
    }
    best.map(|(k, _)| k)
}

pub fn run_network(dir: &RunDir) -> Result<BTreeMap<u64, (Vec<DominantPath>, TransitionNetwork)>> {
    let started = unix_now();
    let exp = open_run(dir)?;
    let mut out = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut paths_csv = String::from("gs_index,initial_state,path\n");
    for &gs in &exp.targets {
        let tasks: Vec<TaskDistributions> = (0..exp.grid.len())
            .map(|j| {
                let rel = task_path(gs, j);
                if !dir.exists(&rel) {
                    return Err(CliError::Missing {
                        command: "sweep",
                        message: format!("{rel} not found"),
                    });
                }
                read_task(dir, &rel)
            })
            .collect::<Result<_>>()?;
        let mut paths = Vec::new();
        for &init in &exp.initials {
            let seq: Option<Vec<u64>> = tasks.iter().map(|t| t.get(&init).and_then(dominant)).collect();
            match seq {
                Some(seq) => paths.push(DominantPath::from_sequence(init, gs, seq)),
                None => warnings.push(format!("gs {gs} initial {init}: incomplete distributions")),
            }
        }
        let net = susmap::network::union_network(&paths, &exp.problem);
        for fmt in [NetworkFormat::Json, NetworkFormat::Graphml, NetworkFormat::Dot] {
            dir.write(&network_path(gs, fmt), &export_network(&net, fmt))?;
        }
        for p in &paths {
            let states: Vec<String> = p.states.iter().map(u64::to_string).collect();
            let _ = writeln!(paths_csv, "{gs},{},{}", p.initial_state, states.join(" "));
        }
        out.insert(gs, (paths, net));
    }
    dir.write(PATHS, &paths_csv)?;
    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        warnings,
        ..CommandRecord::default()
    };
    dir.update_manifest("network", record, exp.config.backend.seed)?;
    Ok(out)
}
