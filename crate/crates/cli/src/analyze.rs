//! `analyze`: susceptibility records, per-ground-state averages and correlations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use susmap::analysis::{average_chi_per_gs, pearson, record, ResponseCurve, SusceptibilityRecord};

use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::store::{unix_now, CommandRecord, RunDir, CONFIG};
use crate::sweep::{CURVES, FORWARD, RA_ONLY};

pub const RECORDS: &str = "analysis/records.csv";
pub const AVERAGES: &str = "analysis/averages.csv";
pub const SUMMARY: &str = "analysis/summary.json";

/// Loads the experiment snapshot stored in a run directory.
pub fn open_run(dir: &RunDir) -> Result<Experiment> {
    let text = dir.require(CONFIG, "sweep")?;
    let config = crate::config::parse_config(&text)?;
    Experiment::resolve(config, &dir.root)
}

fn csv_rows<T: serde::de::DeserializeOwned>(dir: &RunDir, rel: &str, text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::file(&dir.path(rel), e))
}

/// Complete curves keyed by `(gs, initial)`, plus a description of every gap.
pub fn load_curves(exp: &Experiment, dir: &RunDir) -> Result<(BTreeMap<(u64, u64), ResponseCurve>, Vec<String>)> {
    let text = dir.require(CURVES, "sweep")?;
    let rows: Vec<(u64, u64, f64, f64)> = csv_rows(dir, CURVES, &text)?;
    let mut raw: BTreeMap<(u64, u64), BTreeMap<usize, f64>> = BTreeMap::new();
    for (gs, init, h, p) in rows {
        if let Some(j) = exp.grid.values().iter().position(|&v| v == h) {
            raw.entry((gs, init)).or_default().insert(j, p);
        }
    }
    let mut curves = BTreeMap::new();
    let mut gaps = Vec::new();
    for &gs in &exp.targets {
        for &init in &exp.initials {
            match raw.remove(&(gs, init)) {
                Some(points) if points.len() == exp.grid.len() => {
                    curves.insert(
                        (gs, init),
                        ResponseCurve {
                            initial_state: init,
                            target_gs: gs,
                            p_gs: points.into_values().collect(),
                        },
                    );
                }
                Some(points) => gaps.push(format!(
                    "gs {gs} initial {init}: {} of {} h values",
                    points.len(),
                    exp.grid.len()
                )),
                None => gaps.push(format!("gs {gs} initial {init}: no curve")),
            }
        }
    }
    Ok((curves, gaps))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub hamming_chi: Option<f64>,
    pub energy_chi: Option<f64>,
    pub delta_chi: Option<f64>,
    /// Between the RA-only ground-state probability and χ.
    pub ra_only_chi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub records: usize,
    pub mean_chi: BTreeMap<u64, f64>,
    pub correlations: Correlations,
    /// Forward-anneal share of each ground state among ground-state hits.
    pub forward_gs_share: Option<BTreeMap<u64, f64>>,
    pub warnings: Vec<String>,
}

fn correlate(x: &[f64], y: &[f64], label: &str, warnings: &mut Vec<String>) -> Option<f64> {
    match pearson(x, y) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("{label}: {e}"));
            None
        }
    }
}

pub fn run_analyze(dir: &RunDir) -> Result<AnalysisSummary> {
    let started = unix_now();
    let exp = open_run(dir)?;
    let (curves, gaps) = load_curves(&exp, dir)?;
    let mut warnings: Vec<String> = gaps.into_iter().map(|g| format!("missing curve: {g}")).collect();
    if curves.is_empty() {
        return Err(CliError::Missing {
            command: "sweep",
            message: "no complete response curves".into(),
        });
    }
    let records: Vec<SusceptibilityRecord> = curves
        .values()
        .map(|c| record(&exp.problem, c))
        .collect::<susmap::Result<_>>()?;

    let mut text = String::from("gs_index,initial_state,chi,delta,energy,hamming\n");
    for r in &records {
        let _ = writeln!(
            text,
            "{},{},{:?},{:?},{:?},{:?}",
            r.gs_index, r.initial_state, r.chi, r.delta, r.energy, r.hamming
        );
    }
    dir.write(RECORDS, &text)?;

    let averages = average_chi_per_gs(&records, exp.problem.num_variables());
    warnings.extend(averages.warnings.iter().cloned());
    let mut text = String::from("gs_index,mean_chi,initial_states\n");
    for (gs, mean) in &averages.means {
        let count = records.iter().filter(|r| r.gs_index == *gs).count();
        let _ = writeln!(text, "{gs},{mean:?},{count}");
    }
    dir.write(AVERAGES, &text)?;

    let chi: Vec<f64> = records.iter().map(|r| r.chi).collect();
    let col = |f: fn(&SusceptibilityRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let mut correlations = Correlations {
        hamming_chi: correlate(&col(|r| r.hamming), &chi, "hamming vs chi", &mut warnings),
        energy_chi: correlate(&col(|r| r.energy), &chi, "energy vs chi", &mut warnings),
        delta_chi: correlate(&col(|r| r.delta), &chi, "delta vs chi", &mut warnings),
        ra_only_chi: None,
    };
    if dir.exists(RA_ONLY) {
        let rows: Vec<(u64, u64, f64)> = csv_rows(dir, RA_ONLY, &dir.read(RA_ONLY)?)?;
        let ra: BTreeMap<(u64, u64), f64> = rows.into_iter().map(|(g, i, p)| ((g, i), p)).collect();
        let pairs: Vec<(f64, f64)> = records
            .iter()
            .filter_map(|r| ra.get(&(r.gs_index, r.initial_state)).map(|&p| (p, r.chi)))
            .collect();
        if pairs.len() < records.len() {
            warnings.push(format!("RA-only values cover {} of {} records", pairs.len(), records.len()));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        correlations.ra_only_chi = correlate(&x, &y, "RA-only vs chi", &mut warnings);
    } else {
        warnings.push("no RA-only results; ra_only_chi omitted".into());
    }
    let forward_gs_share = if dir.exists(FORWARD) {
        let rows: Vec<(u64, f64, f64)> = csv_rows(dir, FORWARD, &dir.read(FORWARD)?)?;
        Some(rows.into_iter().map(|(g, _, s)| (g, s)).collect())
    } else {
        None
    };

    let summary = AnalysisSummary {
        records: records.len(),
        mean_chi: averages.means,
        correlations,
        forward_gs_share,
        warnings: warnings.clone(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    dir.write(SUMMARY, &text)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let record = CommandRecord {
        started_unix: started,
        finished_unix: unix_now(),
        warnings,
        ..CommandRecord::default()
    };
    dir.update_manifest("analyze", record, exp.config.backend.seed)?;
    Ok(summary)
}

pub fn read_records(dir: &RunDir) -> Result<Vec<SusceptibilityRecord>> {
    let text = dir.require(RECORDS, "analyze")?;
    csv_rows(dir, RECORDS, &text)
}
