//! Seeded random topologies and shortest-path ensembles.

use std::collections::{BTreeSet, VecDeque};

use nodeloc_core::NodeId;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::doc::TopologyDocument;
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Each of the n(n-1)/2 edges independently with probability `p`.
    ErdosRenyi { n: usize, p: f64 },
    /// Preferential attachment: a clique on `m0 + 1` nodes, then each new node
    /// links to `m0` distinct existing nodes chosen proportionally to degree.
    BarabasiAlbert { n: usize, m0: usize },
    /// `width` x `height` lattice, row-major ids.
    Grid { width: usize, height: usize },
}

impl GraphModel {
    pub fn node_count(&self) -> usize {
        match *self {
            GraphModel::ErdosRenyi { n, .. } | GraphModel::BarabasiAlbert { n, .. } => n,
            GraphModel::Grid { width, height } => width * height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonitorRule {
    Count(usize),
    /// Rounded to the nearest count, at least one.
    Fraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySpec {
    pub model: GraphModel,
    pub monitors: MonitorRule,
    pub seed: u64,
}

fn edges_for(model: GraphModel, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let n = model.node_count();
    if n < 2 {
        return Err(usage(format!("a topology needs at least 2 nodes, got {n}")));
    }
    let mut edges = Vec::new();
    match model {
        GraphModel::ErdosRenyi { p, .. } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(usage(format!("edge probability {p} is outside [0, 1]")));
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphModel::BarabasiAlbert { m0, .. } => {
            if m0 == 0 || m0 >= n {
                return Err(usage(format!("attachment count must be in 1..{n}, got {m0}")));
            }
            // one entry per edge endpoint, so uniform draws follow degree
            let mut ends = Vec::new();
            for u in 0..=m0 {
                for v in u + 1..=m0 {
                    edges.push((u, v));
                    ends.extend([u, v]);
                }
            }
            for v in m0 + 1..n {
                let mut targets = BTreeSet::new();
                while targets.len() < m0 {
                    targets.insert(ends[rng.random_range(0..ends.len())]);
                }
                for u in targets {
                    edges.push((u, v));
                    ends.extend([u, v]);
                }
            }
        }
        GraphModel::Grid { width, height } => {
            for r in 0..height {
                for c in 0..width {
                    let u = r * width + c;
                    if c + 1 < width {
                        edges.push((u, u + 1));
                    }
                    if r + 1 < height {
                        edges.push((u, u + width));
                    }
                }
            }
        }
    }
    Ok(edges)
}

/// Monitors are named `m1, m2, ...` and non-monitors `v1, v2, ...`, both in id order.
pub fn generate_topology(spec: &TopologySpec) -> Result<TopologyDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.model.node_count();
    let edges = edges_for(spec.model, &mut rng)?;
    let count = match spec.monitors {
        MonitorRule::Count(c) => c,
        MonitorRule::Fraction(f) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(usage(format!("monitor fraction {f} is outside [0, 1]")));
            }
            ((f * n as f64).round() as usize).max(1)
        }
    };
    if count == 0 {
        return Err(usage("at least one monitor is required"));
    }
    if count >= n {
        return Err(usage(format!(
            "{count} monitors on {n} nodes leaves no non-monitor"
        )));
    }
    let mut monitor = vec![false; n];
    for i in sample(&mut rng, n, count) {
        monitor[i] = true;
    }
    let (mut mi, mut vi) = (0, 0);
    let nodes = monitor
        .iter()
        .map(|&m| {
            if m {
                mi += 1;
                (format!("m{mi}"), true)
            } else {
                vi += 1;
                (format!("v{vi}"), false)
            }
        })
        .collect();
    let edges = edges.into_iter().map(|(u, v)| (NodeId(u), NodeId(v))).collect();
    TopologyDocument::new(nodes, edges, None)
}

/// Up to `limit` shortest paths from `from` to `to`, in lexicographic order of node ids.
fn shortest_paths(doc: &TopologyDocument, adj: &[Vec<usize>], from: usize, to: usize, limit: usize) -> Vec<Vec<NodeId>> {
    let mut dist = vec![usize::MAX; doc.node_count()];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut out = Vec::new();
    if dist[from] == usize::MAX {
        return out;
    }
    fn walk(adj: &[Vec<usize>], dist: &[usize], path: &mut Vec<usize>, limit: usize, out: &mut Vec<Vec<NodeId>>) {
        let u = *path.last().unwrap();
        if dist[u] == 0 {
            out.push(path.iter().map(|&i| NodeId(i)).collect());
            return;
        }
        for &w in &adj[u] {
            if out.len() >= limit {
                return;
            }
            if dist[w] + 1 == dist[u] {
                path.push(w);
                walk(adj, dist, path, limit, out);
                path.pop();
            }
        }
    }
    walk(adj, &dist, &mut vec![from], limit, &mut out);
    out
}

/// Attaches a shortest-path ensemble: for each ordered monitor pair, up to
/// `per_pair` shortest paths, dropping any path already present in either
/// direction. Returns the document and human-readable warnings.
pub fn generate_paths(doc: &TopologyDocument, per_pair: usize) -> Result<(TopologyDocument, Vec<String>)> {
    let n = doc.node_count();
    let monitors: Vec<usize> = (0..n).filter(|&i| doc.is_monitor(NodeId(i))).collect();
    if monitors.len() < 2 {
        return Err(usage(format!(
            "path generation needs at least 2 monitors, found {}",
            monitors.len()
        )));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in doc.edges() {
        adj[u.0].push(v.0);
        adj[v.0].push(u.0);
    }
    adj.iter_mut().for_each(|a| a.sort_unstable());

    let mut warnings = Vec::new();
    let mut seen = BTreeSet::new();
    let mut paths = Vec::new();
    for &a in &monitors {
        for &b in &monitors {
            if a == b {
                continue;
            }
            let found = shortest_paths(doc, &adj, a, b, per_pair);
            if found.is_empty() && a < b {
                warnings.push(format!(
                    "no path between {} and {}",
                    doc.name(NodeId(a)),
                    doc.name(NodeId(b))
                ));
            }
            for p in found {
                let rev: Vec<NodeId> = p.iter().rev().copied().collect();
                if !seen.contains(&rev) && seen.insert(p.clone()) {
                    paths.push(p);
                }
            }
        }
    }
    if paths.is_empty() {
        warnings.push("generated path set is empty".to_owned());
    }
    let covered: BTreeSet<NodeId> = paths.iter().flatten().copied().collect();
    let missed: Vec<&str> = (0..n)
        .map(NodeId)
        .filter(|&v| !doc.is_monitor(v) && !covered.contains(&v))
        .map(|v| doc.name(v))
        .collect();
    if !missed.is_empty() && !paths.is_empty() {
        warnings.push(format!("non-monitors on no path: {}", missed.join(", ")));
    }
    Ok((doc.clone().with_paths(Some(paths))?, warnings))
}
