//! `report`: SVG figures and a plain-text summary of a run directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use susmap::network::{parse_network_json, NetworkFormat};

use crate::analyze::{load_curves, open_run, read_records, AnalysisSummary, AVERAGES, SUMMARY};
use crate::cluster::CLUSTERS;
use crate::error::{CliError, Result};
use crate::network::network_path;
use crate::store::{unix_now, CommandRecord, RunDir};
use crate::svg;
use crate::sweep::FORWARD;

pub const REPORT_SUMMARY: &str = "report/summary.txt";

fn csv_rows<T: serde::de::DeserializeOwned>(dir: &RunDir, rel: &str) -> Result<Vec<T>> {
    let text = dir.read(rel)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::file(&dir.path(rel), e))
}

fn fmt_opt(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".into(), |v| format!("{v:.4}"))
}

/// Returns the relative paths written.
pub fn run_report(dir: &RunDir) -> Result<Vec<String>> {
    let started = unix_now();
    let records = read_records(dir)?;
    let summary: AnalysisSummary = serde_json::from_str(&dir.require(SUMMARY, "analyze")?)
        .map_err(|e| CliError::file(&dir.path(SUMMARY), e))?;
    let exp = open_run(dir)?;
    let series: BTreeMap<u64, usize> = exp.targets.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut written = Vec::new();
    let mut put = |rel: String, text: String| -> Result<()> {
        dir.write(&rel, &text)?;
        written.push(rel);
        Ok(())
    };

    type Field = fn(&susmap::analysis::SusceptibilityRecord) -> f64;
    let scatters: [(&str, &str, Field); 3] = [
        ("hamming", "Hamming distance proportion", |r| r.hamming),
        ("energy", "initial-state energy", |r| r.energy),
        ("delta", "delta", |r| r.delta),
    ];
    for (name, label, f) in scatters {
        let pts: Vec<(f64, f64, usize)> = records
            .iter()
            .map(|r| (f(r), r.chi, series.get(&r.gs_index).copied().unwrap_or(0)))
            .collect();
        put(
            format!("report/chi_vs_{name}.svg"),
            svg::scatter(&format!("chi vs {label}"), label, "chi", &pts),
        )?;
    }

    let averages: Vec<(u64, f64, usize)> = csv_rows(dir, AVERAGES)?;
    let bars: Vec<(String, f64)> = averages.iter().map(|(g, m, _)| (g.to_string(), *m)).collect();
    put("report/average_chi.svg".into(), svg::bars("mean chi per ground state", "mean chi", &bars))?;

    let forward: Option<Vec<(u64, f64, f64)>> = if dir.exists(FORWARD) { Some(csv_rows(dir, FORWARD)?) } else { None };
    if let Some(rows) = &forward {
        let bars: Vec<(String, f64)> = rows.iter().map(|(g, _, s)| (g.to_string(), *s)).collect();
        put(
            "report/forward_gs_share.svg".into(),
            svg::bars("forward anneal ground-state share", "share", &bars),
        )?;
    }

    let clusters: Option<Vec<(u64, u64, usize)>> = if dir.exists(CLUSTERS) { Some(csv_rows(dir, CLUSTERS)?) } else { None };
    if let Some(rows) = &clusters {
        let (curves, _) = load_curves(&exp, dir)?;
        for &gs in &exp.targets {
            let lines: Vec<(usize, &[f64])> = rows
                .iter()
                .filter(|r| r.0 == gs)
                .filter_map(|&(g, init, l)| curves.get(&(g, init)).map(|c| (l, c.p_gs.as_slice())))
                .collect();
            if !lines.is_empty() {
                put(
                    format!("report/curves_gs{gs}.svg"),
                    svg::curves(&format!("response curves toward {gs}, coloured by cluster"), exp.grid.values(), &lines),
                )?;
            }
        }
    }

    let mut network_sizes = Vec::new();
    for &gs in &exp.targets {
        let rel = network_path(gs, NetworkFormat::Json);
        if !dir.exists(&rel) {
            continue;
        }
        let net = parse_network_json(&dir.read(&rel)?).map_err(|e| CliError::file(&dir.path(&rel), e))?;
        let nodes: Vec<(u64, f64)> = net.nodes.iter().map(|(&s, &e)| (s, e)).collect();
        let index: BTreeMap<u64, usize> = nodes.iter().enumerate().map(|(i, n)| (n.0, i)).collect();
        let edges: Vec<(usize, usize, u64)> = net
            .edges
            .iter()
            .map(|(&(u, v), s)| (index[&u], index[&v], s.multiplicity))
            .collect();
        network_sizes.push((gs, nodes.len(), edges.len()));
        put(
            format!("report/network_gs{gs}.svg"),
            svg::network(&format!("state transitions toward {gs}"), &nodes, &edges, &exp.ground_states.states),
        )?;
    }

    let mut text = String::new();
    let _ = writeln!(text, "problem: {} variables, {} couplers", exp.problem.num_variables(), exp.problem.quadratic().len());
    let _ = writeln!(text, "ground states (energy {}): {:?}", exp.ground_states.energy, exp.ground_states.states);
    let _ = writeln!(text, "h grid: {} values from {} to {}", exp.grid.len(), exp.grid.values()[0], exp.grid.values()[exp.grid.len() - 1]);
    let _ = writeln!(text, "records: {}", summary.records);
    let _ = writeln!(text, "\nmean chi per ground state:");
    for (g, m) in &summary.mean_chi {
        let _ = writeln!(text, "  {g}: {m:.6}");
    }
    let _ = writeln!(text, "\nper-target extremes:");
    for &gs in &exp.targets {
        let mine: Vec<_> = records.iter().filter(|r| r.gs_index == gs).collect();
        let max = mine.iter().max_by(|a, b| a.chi.total_cmp(&b.chi).then(b.initial_state.cmp(&a.initial_state)));
        let min = mine.iter().min_by(|a, b| a.chi.total_cmp(&b.chi).then(a.initial_state.cmp(&b.initial_state)));
        if let (Some(max), Some(min)) = (max, min) {
            let _ = writeln!(
                text,
                "  {gs}: max chi {:.6} from {}, min chi {:.3e} from {}",
                max.chi, max.initial_state, min.chi, min.initial_state
            );
        }
    }
    let c = &summary.correlations;
    let _ = writeln!(text, "\npearson r with chi:");
    let _ = writeln!(text, "  hamming proportion: {}", fmt_opt(c.hamming_chi));
    let _ = writeln!(text, "  energy: {}", fmt_opt(c.energy_chi));
    let _ = writeln!(text, "  delta: {}", fmt_opt(c.delta_chi));
    let _ = writeln!(text, "  RA-only P_GS: {}", fmt_opt(c.ra_only_chi));
    if let Some(rows) = &forward {
        let _ = writeln!(text, "\nforward anneal:");
        for (g, p, s) in rows {
            let _ = writeln!(text, "  {g}: P = {p:.6}, share = {s:.4}");
        }
    }
    if let Some(rows) = &clusters {
        let _ = writeln!(text, "\ncluster sizes:");
        for &gs in &exp.targets {
            let mut sizes = BTreeMap::new();
            for r in rows.iter().filter(|r| r.0 == gs) {
                *sizes.entry(r.2).or_insert(0usize) += 1;
            }
            let _ = writeln!(text, "  {gs}: {:?}", sizes.values().collect::<Vec<_>>());
        }
    }
    if !network_sizes.is_empty() {
        let _ = writeln!(text, "\ntransition networks:");
        for (g, n, e) in &network_sizes {
            let _ = writeln!(text, "  {g}: {n} nodes, {e} edges");
        }
    }
    if !summary.warnings.is_empty() {
        let _ = writeln!(text, "\nwarnings:");
        for w in &summary.warnings {
            let _ = writeln!(text, "  {w}");
        }
    }
    put(REPORT_SUMMARY.into(), text)?;

    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        ..CommandRecord::default()
    };
    dir.update_manifest("report", record, exp.config.backend.seed)?;
    Ok(written)
}
