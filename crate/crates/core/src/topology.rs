//! Pegasus hardware graphs and disjoint tiling of a small native pattern.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingProblem;

const OFFSETS_VERTICAL: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
const OFFSETS_HORIZONTAL: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pegasus,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareGraph {
    pub family: Family,
    pub size_parameter: Option<usize>,
    pub defects: BTreeSet<u64>,
    adjacency: BTreeMap<u64, BTreeSet<u64>>,
    /// Neighbourhoods of removed defects, as they were at removal.
    removed: BTreeMap<u64, BTreeSet<u64>>,
}

impl HardwareGraph {
    /// Simple undirected graph; self-loops are rejected.
    pub fn from_edges(nodes: impl IntoIterator<Item = u64>, edges: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut adjacency: BTreeMap<u64, BTreeSet<u64>> = nodes.into_iter().map(|n| (n, BTreeSet::new())).collect();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on {a}")));
            }
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
        Ok(Self {
            family: Family::Custom,
            size_parameter: None,
            defects: BTreeSet::new(),
            adjacency,
            removed: BTreeMap::new(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = u64> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn contains(&self, q: u64) -> bool {
        self.adjacency.contains_key(&q)
    }

    pub fn neighbours(&self, q: u64) -> impl Iterator<Item = u64> + '_ {
        self.adjacency.get(&q).into_iter().flatten().copied()
    }

    pub fn degree(&self, q: u64) -> usize {
        self.adjacency.get(&q).map_or(0, BTreeSet::len)
    }

    pub fn has_edge(&self, a: u64, b: u64) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, ns)| ns.range(a + 1..).map(move |&b| (a, b)))
    }

    /// Removes `defects` and their couplers. Ids absent from the graph are
    /// recorded but otherwise ignored.
    pub fn with_defects(mut self, defects: &BTreeSet<u64>) -> Self {
        for &q in defects {
            if let Some(ns) = self.adjacency.remove(&q) {
                for &n in &ns {
                    if let Some(s) = self.adjacency.get_mut(&n) {
                        s.remove(&q);
                    }
                }
                self.removed.insert(q, ns);
            }
        }
        self.defects.extend(defects.iter().copied());
        self
    }

    /// The graph before any defects were removed.
    pub fn template(&self) -> HardwareGraph {
        let mut adjacency = self.adjacency.clone();
        for (&q, ns) in &self.removed {
            adjacency.entry(q).or_default().extend(ns.iter().copied());
            for &n in ns {
                adjacency.entry(n).or_default().insert(q);
            }
        }
        HardwareGraph {
            family: self.family,
            size_parameter: self.size_parameter,
            defects: BTreeSet::new(),
            adjacency,
            removed: BTreeMap::new(),
        }
    }
}

/// Integer label of Pegasus coordinate `(u, w, k, z)`.
pub fn pegasus_linear_index(m: usize, u: usize, w: usize, k: usize, z: usize) -> u64 {
    (((u * m + w) * 12 + k) * (m - 1) + z) as u64
}

/// Pegasus graph `P_m`. `fabric_only` drops qubits that have no internal
/// coupler, leaving `(m - 1)(24m - 8)` qubits.
pub fn pegasus_graph(m: usize, fabric_only: bool, defects: &BTreeSet<u64>) -> Result<HardwareGraph> {
    if m < 2 {
        return Err(Error::invalid(format!("pegasus size {m} must be at least 2")));
    }
    let total = (24 * m * (m - 1)) as u64;
    if let Some(&bad) = defects.iter().find(|&&q| q >= total) {
        return Err(Error::invalid(format!("defect {bad} is not a qubit of P{m}")));
    }
    let idx = |u, w, k, z| pegasus_linear_index(m, u, w, k, z);
    let mut edges = Vec::new();
    let mut internal = BTreeSet::new();
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                for z in 0..m - 1 {
                    if z + 1 < m - 1 {
                        edges.push((idx(u, w, k, z), idx(u, w, k, z + 1)));
                    }
                    if k % 2 == 0 {
                        edges.push((idx(u, w, k, z), idx(u, w, k + 1, z)));
                    }
                }
            }
        }
    }
    for w in 0..m {
        for kk in 0..12 {
            let lo = if w > 0 { 0 } else { OFFSETS_HORIZONTAL[kk] };
            let hi = if w < m - 1 { 12 } else { OFFSETS_HORIZONTAL[kk] };
            for k in lo..hi {
                for z in 0..m - 1 {
                    let z1 = z + usize::from(kk < OFFSETS_VERTICAL[k]);
                    let w1 = w - usize::from(k < OFFSETS_HORIZONTAL[kk]);
                    let (a, b) = (idx(0, w, k, z), idx(1, z1, kk, w1));
                    edges.push((a, b));
                    internal.insert(a);
                    internal.insert(b);
                }
            }
        }
    }
    let keep = |q: &u64| !fabric_only || internal.contains(q);
    let nodes: Vec<u64> = (0..total).filter(keep).collect();
    let edges: Vec<(u64, u64)> = edges.into_iter().filter(|(a, b)| keep(a) && keep(b)).collect();
    let mut g = HardwareGraph::from_edges(nodes, edges)?;
    g.family = Family::Pegasus;
    g.size_parameter = Some(m);
    Ok(g.with_defects(defects))
}

/// Node-disjoint copies of a pattern: entry `i` of each embedding is the
/// qubit hosting pattern variable `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingSet {
    pub embeddings: Vec<Vec<u64>>,
}

impl EmbeddingSet {
    pub fn len(&self) -> usize {
        self.embeddings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.embeddings.is_empty()
    }

    pub fn to_json(&self) -> String {
        let maps: Vec<BTreeMap<usize, u64>> = self
            .embeddings
            .iter()
            .map(|e| e.iter().copied().enumerate().collect())
            .collect();
        let mut s = serde_json::to_string_pretty(&maps).expect("embeddings serialize");
        s.push('\n');
        s
    }

    /// Parses a list of `{variable: qubit}` maps. Each map must cover
    /// variables `0..len` exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let maps: Vec<BTreeMap<usize, u64>> = serde_json::from_str(text)
            .map_err(|e| Error::parse(Some(e.line()), e.to_string()))?;
        let mut embeddings = Vec::with_capacity(maps.len());
        for (i, map) in maps.into_iter().enumerate() {
            if map.keys().enumerate().any(|(pos, &v)| pos != v) {
                return Err(Error::parse(None, format!("embedding {i} does not cover variables 0..{}", map.len())));
            }
            embeddings.push(map.into_values().collect());
        }
        Ok(Self { embeddings })
    }
}

/// One qubit id per line; blank lines and `#` comments are skipped.
pub fn parse_defect_list(text: &str) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let q = body
            .parse::<u64>()
            .map_err(|_| Error::parse(Some(i + 1), format!("{body:?} is not a qubit id")))?;
        out.insert(q);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    WrongSize { embedding: usize, len: usize },
    UnknownQubit { embedding: usize, variable: usize, qubit: u64 },
    NotInjective { embedding: usize, qubit: u64 },
    Overlap { first: usize, second: usize, qubit: u64 },
    MissingEdge { embedding: usize, u: usize, v: usize },
}

/// Pattern adjacency lists over variables `0..n`.
fn pattern_graph(pattern: &IsingProblem) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); pattern.num_variables()];
    for (i, j) in pattern.edges() {
        adj[i].push(j);
        adj[j].push(i);
    }
    adj
}

/// Empty when the set is valid.
pub fn validate_embeddings(target: &HardwareGraph, pattern: &IsingProblem, set: &EmbeddingSet) -> Vec<Finding> {
    let n = pattern.num_variables();
    let mut findings = Vec::new();
    let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
    for (e, emb) in set.embeddings.iter().enumerate() {
        if emb.len() != n {
            findings.push(Finding::WrongSize { embedding: e, len: emb.len() });
            continue;
        }
        let mut own = BTreeSet::new();
        for (v, &q) in emb.iter().enumerate() {
            if !target.contains(q) {
                findings.push(Finding::UnknownQubit { embedding: e, variable: v, qubit: q });
            }
            if !own.insert(q) {
                findings.push(Finding::NotInjective { embedding: e, qubit: q });
                continue;
            }
            if let Some(&first) = owner.get(&q) {
                findings.push(Finding::Overlap { first, second: e, qubit: q });
            } else {
                owner.insert(q, e);
            }
        }
        for (u, v) in pattern.edges() {
            if !target.has_edge(emb[u], emb[v]) {
                findings.push(Finding::MissingEdge { embedding: e, u, v });
            }
        }
    }
    findings
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TileParams {
    pub seed: u64,
    /// Search-tree expansions allowed per anchor qubit.
    pub retry_budget: u64,
}

impl Default for TileParams {
    fn default() -> Self {
        Self {
            seed: 0,
            retry_budget: 2000,
        }
    }
}

/// Placement order: each variable after the first has a placed neighbour.
fn placement_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let first = (0..n).max_by_key(|&v| (adj[v].len(), std::cmp::Reverse(v))).unwrap_or(0);
    let mut order = vec![first];
    let mut placed = vec![false; n];
    placed[first] = true;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = adj[v].iter().filter(|&&u| placed[u]).count();
                (links, adj[v].len(), std::cmp::Reverse(v))
            })
            .expect("pattern is connected");
        placed[next] = true;
        order.push(next);
    }
    order
}

fn is_connected(adj: &[Vec<usize>]) -> bool {
    if adj.is_empty() {
        return false;
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

struct Search<'a> {
    target: &'a HardwareGraph,
    adj: &'a [Vec<usize>],
    order: &'a [usize],
    free: &'a BTreeSet<u64>,
    budget: u64,
    map: Vec<Option<u64>>,
    used: BTreeSet<u64>,
}

impl Search<'_> {
    fn free_degree(&self, q: u64) -> usize {
        self.target.neighbours(q).filter(|n| self.free.contains(n)).count()
    }

    fn fits(&self, var: usize, q: u64) -> bool {
        self.free.contains(&q)
            && !self.used.contains(&q)
            && self.free_degree(q) >= self.adj[var].len()
            && self.adj[var]
                .iter()
                .all(|&u| self.map[u].map_or(true, |qu| self.target.has_edge(q, qu)))
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let var = self.order[depth];
        let anchor = self.adj[var]
            .iter()
            .find_map(|&u| self.map[u])
            .expect("placement order keeps the pattern connected");
        let mut candidates: Vec<u64> = self
            .target
            .neighbours(anchor)
            .filter(|&q| self.fits(var, q))
            .collect();
        // Tight spots first: leave open regions for later copies.
        candidates.sort_by_key(|&q| (self.free_degree(q), q));
        for q in candidates {
            self.map[var] = Some(q);
            self.used.insert(q);
            if self.extend(depth + 1) {
                return true;
            }
            self.used.remove(&q);
            self.map[var] = None;
        }
        false
    }
}

/// Greedy randomized packing of node-disjoint pattern copies.
///
/// Anchor qubits are visited in an order fixed by the seed and the qubit ids
/// alone; from each still-free anchor a bounded backtracking search tries to
/// place the pattern, and a success removes its qubits. Packing runs on the
/// defect-free template and copies touching a defect are dropped afterwards,
/// so adding defects can only remove copies.
pub fn tile_disjoint_embeddings(
    target: &HardwareGraph,
    pattern: &IsingProblem,
    params: &TileParams,
) -> Result<EmbeddingSet> {
    let adj = pattern_graph(pattern);
    if adj.len() > target.num_nodes() {
        return Err(Error::invalid(format!(
            "pattern has {} variables but the target only {} qubits",
            adj.len(),
            target.num_nodes()
        )));
    }
    if !is_connected(&adj) {
        return Err(Error::invalid("pattern graph is not connected"));
    }
    let order = placement_order(&adj);
    let template = target.template();
    let mut anchors: Vec<(u64, u64)> = template
        .nodes()
        .map(|q| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive_seed(params.seed, &[q]));
            (rng.random::<u64>(), q)
        })
        .collect();
    anchors.sort_unstable();

    let mut free: BTreeSet<u64> = template.nodes().collect();
    let mut out = EmbeddingSet::default();
    for (_, anchor) in anchors {
        if !free.contains(&anchor) || template.neighbours(anchor).filter(|n| free.contains(n)).count() < adj[order[0]].len() {
            continue;
        }
        let mut search = Search {
            target: &template,
            adj: &adj,
            order: &order,
            free: &free,
            budget: params.retry_budget,
            map: vec![None; adj.len()],
            used: BTreeSet::from([anchor]),
        };
        search.map[order[0]] = Some(anchor);
        if search.extend(1) {
            let emb: Vec<u64> = search.map.into_iter().map(|q| q.expect("complete")).collect();
            for q in &emb {
                free.remove(q);
            }
            out.embeddings.push(emb);
        }
    }
    out.embeddings.retain(|emb| emb.iter().all(|&q| target.contains(q)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_dense() {
        let m = 3;
        let mut seen = BTreeSet::new();
        for u in 0..2 {
            for w in 0..m {
                for k in 0..12 {
                    for z in 0..m - 1 {
                        seen.insert(pegasus_linear_index(m, u, w, k, z));
                    }
                }
            }
        }
        assert_eq!(seen.len(), 24 * m * (m - 1));
        assert_eq!(seen.last(), Some(&((24 * m * (m - 1) - 1) as u64)));
    }

    #[test]
    fn defect_removal() {
        let g = pegasus_graph(2, true, &BTreeSet::new()).unwrap();
        let q = g.nodes().nth(7).unwrap();
        let d = pegasus_graph(2, true, &BTreeSet::from([q])).unwrap();
        assert_eq!(d.num_nodes(), g.num_nodes() - 1);
        assert_eq!(d.num_edges(), g.num_edges() - g.degree(q));
        assert!(d.edges().all(|(a, b)| a != q && b != q));
        assert!(pegasus_graph(1, true, &BTreeSet::new()).is_err());
        assert!(pegasus_graph(2, true, &BTreeSet::from([48])).is_err());
    }

    #[test]
    fn defect_lists() {
        let d = parse_defect_list("# dead qubits\n12\n\n  7 # flaky\n").unwrap();
        assert_eq!(d, BTreeSet::from([7, 12]));
        match parse_defect_list("1\nx\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn embedding_json_round_trip() {
        let set = EmbeddingSet {
            embeddings: vec![vec![4, 9, 1], vec![0, 2, 3]],
        };
        assert_eq!(EmbeddingSet::from_json(&set.to_json()).unwrap(), set);
        assert!(EmbeddingSet::from_json(r#"[{"0": 1, "2": 3}]"#).is_err());
    }
}
