//! Undirected simple graphs, monitor-labelled topologies, and the connectivity
//! primitives the rest of the crate is built on.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, INF};

/// Dense node index, contiguous `0..node_count` within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

pub type NodeSet = BTreeSet<NodeId>;

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl AsRef<Graph> for Graph {
    fn as_ref(&self) -> &Graph {
        self
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); node_count];
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u.0 >= node_count || v.0 >= node_count {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::input(format!("duplicate edge ({u}, {v})")));
            }
            adj[u.0].push(v);
            adj[v.0].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            edge_count: seen.len(),
        })
    }

    /// Builds a graph from an edge list that may contain duplicates; they are merged.
    pub(crate) fn merged(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let unique: BTreeSet<(NodeId, NodeId)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        Graph::new(node_count, unique).expect("merged edge list is simple")
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |v| v.0 > u)
                .map(move |v| (NodeId(u), v))
        })
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.adj.len()
    }

    pub fn adjacent(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.0]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.0].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.0].binary_search(&v).is_ok()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        self.adj.iter().all(|l| l.len() + 1 == n)
    }

    pub(crate) fn check(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "node {v} is not in a graph with {} nodes",
                self.node_count()
            )))
        }
    }

    pub(crate) fn mask_of(&self, set: &NodeSet) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.node_count()];
        for &v in set {
            self.check(v)?;
            mask[v.0] = true;
        }
        Ok(mask)
    }

    /// Component label per node (`usize::MAX` for removed nodes) and the component count.
    /// Labels follow the smallest member id.
    pub(crate) fn component_labels(&self, removed: &[bool]) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.node_count()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.node_count() {
            if removed[start] || label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !removed[w.0] && label[w.0] == usize::MAX {
                        label[w.0] = count;
                        stack.push(w.0);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

/// A network: an undirected graph whose nodes are labelled monitor or non-monitor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    graph: Graph,
    is_monitor: Vec<bool>,
    monitors: Vec<NodeId>,
    non_monitors: Vec<NodeId>,
}

impl AsRef<Graph> for Topology {
    fn as_ref(&self) -> &Graph {
        &self.graph
    }
}

impl Topology {
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        monitors: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let graph = Graph::new(node_count, edges)?;
        let mut is_monitor = vec![false; node_count];
        for m in monitors {
            graph.check(m)?;
            is_monitor[m.0] = true;
        }
        Topology::from_parts(graph, is_monitor)
    }

    pub fn from_parts(graph: Graph, is_monitor: Vec<bool>) -> Result<Self> {
        if is_monitor.len() != graph.node_count() {
            return Err(Error::input("monitor flags do not match the node count"));
        }
        let (monitors, non_monitors): (Vec<NodeId>, Vec<NodeId>) =
            graph.nodes().partition(|v| is_monitor[v.0]);
        if monitors.is_empty() {
            return Err(Error::input("a topology needs at least one monitor"));
        }
        Ok(Topology {
            graph,
            is_monitor,
            monitors,
            non_monitors,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn monitors(&self) -> &[NodeId] {
        &self.monitors
    }

    pub fn non_monitors(&self) -> &[NodeId] {
        &self.non_monitors
    }

    /// Number of non-monitors.
    pub fn sigma(&self) -> usize {
        self.non_monitors.len()
    }

    pub fn is_monitor(&self, v: NodeId) -> bool {
        self.is_monitor[v.0]
    }

    pub fn check(&self, v: NodeId) -> Result<()> {
        self.graph.check(v)
    }

    pub(crate) fn check_non_monitor(&self, v: NodeId) -> Result<()> {
        self.check(v)?;
        if self.is_monitor(v) {
            Err(Error::input(format!("{v} is a monitor")))
        } else {
            Ok(())
        }
    }

    /// Number of monitors adjacent to `v`.
    pub fn monitor_degree(&self, v: NodeId) -> usize {
        self.graph
            .adjacent(v)
            .iter()
            .filter(|w| self.is_monitor(**w))
            .count()
    }
}

/// Connected components of a vertex-deleted subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    /// Sorted by smallest member id.
    pub components: Vec<NodeSet>,
    pub removed: NodeSet,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn connected_components<G: AsRef<Graph>>(graph: &G, removed: &NodeSet) -> Result<ComponentPartition> {
    let graph = graph.as_ref();
    let mask = graph.mask_of(removed)?;
    let (label, count) = graph.component_labels(&mask);
    let mut components = vec![NodeSet::new(); count];
    for v in graph.nodes() {
        if label[v.0] != usize::MAX {
            components[label[v.0]].insert(v);
        }
    }
    Ok(ComponentPartition {
        components,
        removed: removed.clone(),
    })
}

/// Open neighbourhood of `v`.
pub fn neighbors<G: AsRef<Graph>>(graph: &G, v: NodeId) -> Result<NodeSet> {
    let graph = graph.as_ref();
    graph.check(v)?;
    Ok(graph.adjacent(v).iter().copied().collect())
}

/// Nodes outside `set` adjacent to some member of it.
pub fn neighborhood_of_set<G: AsRef<Graph>>(graph: &G, set: &NodeSet) -> Result<NodeSet> {
    let graph = graph.as_ref();
    let mut out = NodeSet::new();
    for &s in set {
        graph.check(s)?;
        out.extend(graph.adjacent(s).iter().filter(|w| !set.contains(w)));
    }
    Ok(out)
}

/// Maximum number of paths from `source` to distinct members of `targets`,
/// pairwise disjoint except at `source`, that avoid `forbidden`.
pub fn max_disjoint_paths<G: AsRef<Graph>>(
    graph: &G,
    source: NodeId,
    targets: &NodeSet,
    forbidden: &NodeSet,
) -> Result<usize> {
    let graph = graph.as_ref();
    let targets = graph.mask_of(targets)?;
    let forbidden = graph.mask_of(forbidden)?;
    check_disjoint_path_query(graph, source, &targets, &forbidden)?;
    let (mut net, src, sink) = disjoint_path_network(graph, source, &targets, &forbidden);
    Ok(net.max_flow(src, sink, INF) as usize)
}

fn check_disjoint_path_query(graph: &Graph, source: NodeId, targets: &[bool], forbidden: &[bool]) -> Result<()> {
    graph.check(source)?;
    if forbidden[source.0] {
        return Err(Error::input(format!("source {source} is forbidden")));
    }
    if targets[source.0] {
        return Err(Error::input(format!("source {source} is also a target")));
    }
    if let Some(t) = (0..graph.node_count()).find(|&t| targets[t] && forbidden[t]) {
        return Err(Error::input(format!("target {} is forbidden", NodeId(t))));
    }
    Ok(())
}

// Node v splits into in = 2v and out = 2v + 1; the super-sink is 2n.
fn disjoint_path_network(
    graph: &Graph,
    source: NodeId,
    targets: &[bool],
    forbidden: &[bool],
) -> (FlowNetwork, usize, usize) {
    let n = graph.node_count();
    let sink = 2 * n;
    let mut net = FlowNetwork::new(2 * n + 1);
    for v in 0..n {
        if forbidden[v] {
            continue;
        }
        if v != source.0 {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
        if targets[v] {
            net.add_arc(2 * v + 1, sink, 1);
        }
        for &w in graph.adjacent(NodeId(v)) {
            if !forbidden[w.0] && w != source {
                net.add_arc(2 * v + 1, 2 * w.0, 1);
            }
        }
    }
    (net, 2 * source.0 + 1, sink)
}

/// Up to `want` disjoint routes from `source` to distinct targets. Each route
/// starts at `source` and stops at the first target it meets.
pub(crate) fn disjoint_routes(
    graph: &Graph,
    source: NodeId,
    targets: &[bool],
    forbidden: &[bool],
    want: usize,
) -> Vec<Vec<NodeId>> {
    let (mut net, src, sink) = disjoint_path_network(graph, source, targets, forbidden);
    let value = net.max_flow(src, sink, want as u32);
    let mut used = BTreeSet::new();
    let mut routes = Vec::new();
    for first in net.flow_successors(src).collect::<Vec<_>>() {
        if routes.len() == value as usize {
            break;
        }
        let mut route = vec![source];
        let mut cur = first;
        while cur != sink {
            if cur % 2 == 0 {
                let v = NodeId(cur / 2);
                if let Some(pos) = route.iter().position(|&x| x == v) {
                    route.truncate(pos);
                }
                route.push(v);
                if targets[v.0] {
                    break;
                }
                cur += 1;
            } else {
                let next = net
                    .flow_successors(cur)
                    .find(|&h| !used.contains(&(cur, h)))
                    .expect("flow conservation");
                used.insert((cur, next));
                cur = next;
            }
        }
        routes.push(route);
    }
    routes
}

fn local_vertex_connectivity(graph: &Graph, s: NodeId, t: NodeId, limit: usize) -> usize {
    let n = graph.node_count();
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let cap = if v == s.0 || v == t.0 { INF } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, cap);
        for &w in graph.adjacent(NodeId(v)) {
            net.add_arc(2 * v + 1, 2 * w.0, INF);
        }
    }
    net.max_flow(2 * s.0 + 1, 2 * t.0, limit as u32) as usize
}

/// Vertex connectivity: `n - 1` for complete graphs, 0 for disconnected ones.
pub fn vertex_connectivity<G: AsRef<Graph>>(graph: &G) -> Result<usize> {
    let graph = graph.as_ref();
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::input(format!(
            "vertex connectivity needs at least 2 nodes, got {n}"
        )));
    }
    if graph.is_complete() {
        return Ok(n - 1);
    }
    // A minimum-degree vertex either survives some minimum cut, and then is
    // separated from a non-neighbour, or belongs to every one, and then two of
    // its neighbours lie on opposite sides.
    let anchor = graph
        .nodes()
        .min_by_key(|&v| (graph.degree(v), v))
        .expect("non-empty");
    let mut best = graph.degree(anchor);
    for w in graph.nodes() {
        if best == 0 {
            return Ok(0);
        }
        if w != anchor && !graph.has_edge(anchor, w) {
            best = best.min(local_vertex_connectivity(graph, anchor, w, best));
        }
    }
    let around = graph.adjacent(anchor);
    for (i, &x) in around.iter().enumerate() {
        for &y in &around[i + 1..] {
            if !graph.has_edge(x, y) {
                best = best.min(local_vertex_connectivity(graph, x, y, best));
            }
        }
    }
    Ok(best)
}

/// Whether the graph is `k`-vertex-connected. `k = 0` always holds.
pub fn is_k_connected<G: AsRef<Graph>>(graph: &G, k: usize) -> Result<bool> {
    let graph = graph.as_ref();
    if k == 0 {
        return Ok(true);
    }
    if graph.node_count() <= k {
        return Ok(false);
    }
    Ok(vertex_connectivity(graph)? >= k)
}

/// `k`-connectivity decided from an already computed connectivity number.
pub(crate) fn k_connected_from(node_count: usize, connectivity: usize, k: usize) -> bool {
    k == 0 || (node_count > k && connectivity >= k)
}
