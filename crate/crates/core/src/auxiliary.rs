//! Auxiliary graphs whose vertex connectivity characterises identifiability.
//!
//! Both graphs drop every monitor, add one virtual monitor `m'`, join `m'` to
//! the non-monitors adjacent to the represented monitors, and join those
//! non-monitors pairwise with virtual links. `G*` represents all monitors;
//! `G_m` represents every monitor except `m`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{vertex_connectivity, Graph, NodeId, NodeSet, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxKind {
    /// Virtual monitor stands for every monitor.
    GStar,
    /// Virtual monitor stands for every monitor except the given one.
    GM(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliaryGraph {
    graph: Graph,
    kind: AuxKind,
    virtual_monitor: NodeId,
    /// Topology id of each non-virtual auxiliary node, in auxiliary-id order.
    origin: Vec<NodeId>,
    /// Edges (in auxiliary ids) that are not images of topology edges.
    virtual_edges: BTreeSet<(NodeId, NodeId)>,
}

impl AsRef<Graph> for AuxiliaryGraph {
    fn as_ref(&self) -> &Graph {
        &self.graph
    }
}

impl AuxiliaryGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> AuxKind {
        self.kind
    }

    pub fn virtual_monitor(&self) -> NodeId {
        self.virtual_monitor
    }

    pub fn virtual_edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.virtual_edges
    }

    /// Topology node represented by an auxiliary node; `None` for `m'`.
    pub fn origin(&self, aux: NodeId) -> Option<NodeId> {
        self.origin.get(aux.0).copied()
    }

    /// Auxiliary node standing for a topology non-monitor.
    pub fn aux_id(&self, original: NodeId) -> Option<NodeId> {
        self.origin.binary_search(&original).ok().map(NodeId)
    }

    /// Neighbours of `m'`, as topology ids.
    pub fn attachment(&self) -> NodeSet {
        self.graph
            .adjacent(self.virtual_monitor)
            .iter()
            .map(|a| self.origin[a.0])
            .collect()
    }

    pub fn connectivity(&self) -> usize {
        vertex_connectivity(&self.graph).expect("auxiliary graphs have at least two nodes")
    }
}

fn build(topology: &Topology, excluded: Option<NodeId>, kind: AuxKind) -> Result<AuxiliaryGraph> {
    if topology.sigma() == 0 {
        return Err(Error::input("auxiliary graphs need at least one non-monitor"));
    }
    let graph = topology.graph();
    let origin: Vec<NodeId> = topology.non_monitors().to_vec();
    let sigma = origin.len();
    let mut aux_of = vec![usize::MAX; topology.node_count()];
    for (i, v) in origin.iter().enumerate() {
        aux_of[v.0] = i;
    }
    let virtual_monitor = NodeId(sigma);

    let attached: Vec<usize> = origin
        .iter()
        .enumerate()
        .filter(|(_, &v)| {
            graph
                .adjacent(v)
                .iter()
                .any(|&w| topology.is_monitor(w) && Some(w) != excluded)
        })
        .map(|(i, _)| i)
        .collect();

    let mut real = BTreeSet::new();
    for (u, v) in graph.edges() {
        if !topology.is_monitor(u) && !topology.is_monitor(v) {
            real.insert((NodeId(aux_of[u.0]), NodeId(aux_of[v.0])));
        }
    }
    let mut virtual_edges = BTreeSet::new();
    for (i, &a) in attached.iter().enumerate() {
        virtual_edges.insert((NodeId(a), virtual_monitor));
        for &b in &attached[i + 1..] {
            let e = (NodeId(a), NodeId(b));
            if !real.contains(&e) {
                virtual_edges.insert(e);
            }
        }
    }

    let graph = Graph::merged(sigma + 1, real.iter().chain(virtual_edges.iter()).copied());
    Ok(AuxiliaryGraph {
        graph,
        kind,
        virtual_monitor,
        origin,
        virtual_edges,
    })
}

/// `G*`: non-monitors plus a virtual monitor standing for all monitors.
pub fn build_gstar(topology: &Topology) -> Result<AuxiliaryGraph> {
    build(topology, None, AuxKind::GStar)
}

/// `G_m`: as `G*`, but the virtual monitor does not stand for `m`.
pub fn build_gm(topology: &Topology, m: NodeId) -> Result<AuxiliaryGraph> {
    topology.check(m)?;
    if !topology.is_monitor(m) {
        return Err(Error::input(format!("{m} is not a monitor")));
    }
    build(topology, Some(m), AuxKind::GM(m))
}

/// Smallest connectivity over all `G_m`.
pub fn delta_min(topology: &Topology) -> Result<usize> {
    let mut best = usize::MAX;
    for &m in topology.monitors() {
        best = best.min(build_gm(topology, m)?.connectivity());
    }
    Ok(best)
}
