//! Dominant-state paths over an h sweep and their union graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::sim::Observation;

/// Argmax state; ties go to the lowest index.
pub fn dominant_state(observation: &Observation) -> Result<u64> {
    observation.dominant()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantPath {
    pub initial_state: u64,
    pub target_gs: u64,
    /// Dominant states in h order with consecutive repeats collapsed.
    pub states: Vec<u64>,
}

impl DominantPath {
    pub fn from_sequence(initial_state: u64, target_gs: u64, dominant: impl IntoIterator<Item = u64>) -> Self {
        let mut states: Vec<u64> = Vec::new();
        for s in dominant {
            if states.last() != Some(&s) {
                states.push(s);
            }
        }
        Self {
            initial_state,
            target_gs,
            states,
        }
    }
}

/// Path from per-h observations ordered by ascending h.
pub fn build_path(initial_state: u64, target_gs: u64, per_h: &[Observation]) -> Result<DominantPath> {
    let dominant = per_h.iter().map(dominant_state).collect::<Result<Vec<_>>>()?;
    Ok(DominantPath::from_sequence(initial_state, target_gs, dominant))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeStats {
    pub multiplicity: u64,
    /// Traversals from the lower to the higher state index.
    pub ascending: u64,
    pub descending: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitionNetwork {
    /// State index to its energy.
    pub nodes: BTreeMap<u64, f64>,
    /// Keys are `(u, v)` with `u < v`.
    pub edges: BTreeMap<(u64, u64), EdgeStats>,
}

impl TransitionNetwork {
    /// Adds one path; the union is order-independent.
    pub fn add_path(&mut self, problem: &IsingProblem, path: &DominantPath) {
        for &s in &path.states {
            self.nodes.entry(s).or_insert_with(|| problem.energy_of_index(s));
        }
        for w in path.states.windows(2) {
            let (a, b) = (w[0], w[1]);
            let e = self.edges.entry((a.min(b), a.max(b))).or_default();
            e.multiplicity += 1;
            if a < b {
                e.ascending += 1;
            } else {
                e.descending += 1;
            }
        }
    }

    /// Same network with every state index mapped through `f`.
    pub fn relabeled(&self, f: impl Fn(u64) -> u64) -> Self {
        let mut out = Self::default();
        for (&s, &e) in &self.nodes {
            out.nodes.insert(f(s), e);
        }
        for (&(u, v), &stats) in &self.edges {
            let (a, b) = (f(u), f(v));
            let stats = if a < b {
                stats
            } else {
                EdgeStats {
                    ascending: stats.descending,
                    descending: stats.ascending,
                    ..stats
                }
            };
            out.edges.insert((a.min(b), a.max(b)), stats);
        }
        out
    }
}

pub fn union_network(paths: &[DominantPath], problem: &IsingProblem) -> TransitionNetwork {
    let mut net = TransitionNetwork::default();
    for p in paths {
        net.add_path(problem, p);
    }
    net
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkFormat {
    Graphml,
    Dot,
    Json,
}

impl std::str::FromStr for NetworkFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphml" => Ok(Self::Graphml),
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid(format!("unknown network format {other:?}"))),
        }
    }
}

impl NetworkFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Graphml => "graphml",
            Self::Dot => "dot",
            Self::Json => "json",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    state: u64,
    energy: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    u: u64,
    v: u64,
    multiplicity: u64,
    #[serde(default)]
    ascending: u64,
    #[serde(default)]
    descending: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNetwork {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

pub fn export_network(net: &TransitionNetwork, format: NetworkFormat) -> String {
    match format {
        NetworkFormat::Json => {
            let doc = JsonNetwork {
                nodes: net
                    .nodes
                    .iter()
                    .map(|(&state, &energy)| JsonNode { state, energy })
                    .collect(),
                edges: net
                    .edges
                    .iter()
                    .map(|(&(u, v), s)| JsonEdge {
                        u,
                        v,
                        multiplicity: s.multiplicity,
                        ascending: s.ascending,
                        descending: s.descending,
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc).expect("network serializes");
            text.push('\n');
            text
        }
        NetworkFormat::Dot => {
            let mut out = String::from("graph transitions {\n");
            for (s, e) in &net.nodes {
                let _ = writeln!(out, "  {s} [state={s}, energy={e:?}];");
            }
            for ((u, v), st) in &net.edges {
                let _ = writeln!(
                    out,
                    "  {u} -- {v} [multiplicity={}, ascending={}, descending={}];",
                    st.multiplicity, st.ascending, st.descending
                );
            }
            out.push_str("}\n");
            out
        }
        NetworkFormat::Graphml => {
            let mut out = String::from(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
  <key id=\"state\" for=\"node\" attr.name=\"state\" attr.type=\"long\"/>\n\
  <key id=\"energy\" for=\"node\" attr.name=\"energy\" attr.type=\"double\"/>\n\
  <key id=\"multiplicity\" for=\"edge\" attr.name=\"multiplicity\" attr.type=\"long\"/>\n\
  <key id=\"ascending\" for=\"edge\" attr.name=\"ascending\" attr.type=\"long\"/>\n\
  <key id=\"descending\" for=\"edge\" attr.name=\"descending\" attr.type=\"long\"/>\n\
  <graph id=\"transitions\" edgedefault=\"undirected\">\n",
            );
            for (s, e) in &net.nodes {
                let _ = writeln!(
                    out,
                    "    <node id=\"n{s}\"><data key=\"state\">{s}</data><data key=\"energy\">{e:?}</data></node>"
                );
            }
            for ((u, v), st) in &net.edges {
                let _ = writeln!(
                    out,
                    "    <edge source=\"n{u}\" target=\"n{v}\"><data key=\"multiplicity\">{}</data><data key=\"ascending\">{}</data><data key=\"descending\">{}</data></edge>",
                    st.multiplicity, st.ascending, st.descending
                );
            }
            out.push_str("  </graph>\n</graphml>\n");
            out
        }
    }
}

/// Parses the JSON export.
pub fn parse_network_json(text: &str) -> Result<TransitionNetwork> {
    let doc: JsonNetwork = serde_json::from_str(text)
        .map_err(|e| Error::parse(Some(e.line()), e.to_string()))?;
    let mut net = TransitionNetwork::default();
    for n in doc.nodes {
        if !n.energy.is_finite() {
            return Err(Error::parse(None, format!("node {} has a non-finite energy", n.state)));
        }
        if net.nodes.insert(n.state, n.energy).is_some() {
            return Err(Error::parse(None, format!("duplicate node {}", n.state)));
        }
    }
    for e in doc.edges {
        if e.u >= e.v {
            return Err(Error::parse(None, format!("edge ({}, {}) must satisfy u < v", e.u, e.v)));
        }
        if !net.nodes.contains_key(&e.u) || !net.nodes.contains_key(&e.v) {
            return Err(Error::parse(None, format!("edge ({}, {}) references a missing node", e.u, e.v)));
        }
        let stats = EdgeStats {
            multiplicity: e.multiplicity,
            ascending: e.ascending,
            descending: e.descending,
        };
        if net.edges.insert((e.u, e.v), stats).is_some() {
            return Err(Error::parse(None, format!("duplicate edge ({}, {})", e.u, e.v)));
        }
    }
    Ok(net)
}
