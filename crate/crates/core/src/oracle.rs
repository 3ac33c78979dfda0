//! Brute-force ground truth for identifiability.
//!
//! Two failure sets are distinguishable when some measurable path traverses a
//! node of exactly one of them. Under CAP a node is measurable avoiding `F`
//! when its component in `G - F` holds a monitor; under CSP when it has two
//! vertex-disjoint routes to distinct monitors in `G - F`; under UP when some
//! given path through it misses `F`.
//!
//! [`Oracle`] tabulates, for every failure set, which non-monitors remain
//! measurable. Everything else is bit arithmetic over that table, so the
//! number of non-monitors is capped (7 by default).

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{disjoint_routes, NodeId, NodeSet, Topology};
use crate::up::PathEnsemble;

/// Largest `max_sigma` an [`OracleConfig`] may request.
pub const HARD_SIGMA_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Cap,
    Csp,
    Up,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cap => "CAP",
            ModelKind::Csp => "CSP",
            ModelKind::Up => "UP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbingModel {
    /// Arbitrary monitor-anchored walks.
    Cap,
    /// Monitor-to-monitor simple paths.
    Csp,
    /// A fixed, externally chosen path set.
    Up(PathEnsemble),
}

impl ProbingModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ProbingModel::Cap => ModelKind::Cap,
            ProbingModel::Csp => ModelKind::Csp,
            ProbingModel::Up(_) => ModelKind::Up,
        }
    }
}

/// A set of non-monitors assumed failed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FailureSet(NodeSet);

impl FailureSet {
    pub fn new(topology: &Topology, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut set = NodeSet::new();
        for v in nodes {
            topology.check(v)?;
            if topology.is_monitor(v) {
                return Err(Error::input(format!("monitor {v} cannot fail")));
            }
            set.insert(v);
        }
        Ok(FailureSet(set))
    }

    pub fn empty() -> Self {
        FailureSet::default()
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }
}

/// A concrete measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    /// Monitor-to-monitor node sequence (CAP walk or CSP simple path).
    Walk(Vec<NodeId>),
    /// Index into the UP path ensemble.
    Path(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `probe` traverses `node`, which lies in exactly one of the two sets, and avoids the other set.
    DistinguishingPath { probe: Probe, node: NodeId },
    /// No measurable path reaches `node` once `trapped_by` has failed.
    UnprobeableNode { node: NodeId, trapped_by: FailureSet },
    IndistinguishablePair { first: FailureSet, second: FailureSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    pub distinguishable: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeState {
    Up,
    Down,
}

/// Observed probe states. Under CAP and CSP there is one probe per
/// non-monitor, keyed by node id, that is up iff the node is measurable
/// given the failures; under UP the probes are the ensemble's paths, keyed by
/// path id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeMap {
    pub model: ModelKind,
    pub observations: BTreeMap<usize, ProbeState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Refuse to enumerate beyond this many non-monitors.
    pub max_sigma: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_sigma: 7 }
    }
}

/// Outcome of a brute-force k-identifiability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identifiability {
    pub k: usize,
    /// First indistinguishable pair in enumeration order, if any.
    pub counterexample: Option<(FailureSet, FailureSet)>,
}

impl Identifiability {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Which nodes `exhaustive_component_condition` may delete besides non-monitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorRemoval {
    None,
    /// Always delete this monitor.
    Exactly(NodeId),
    /// Delete at most one monitor, counted against the size budget.
    AtMostOne,
}

fn check_target(topology: &Topology, v: NodeId, avoid: &FailureSet) -> Result<()> {
    topology.check_non_monitor(v)?;
    if avoid.contains(v) {
        return Err(Error::input(format!("{v} is in the avoided set")));
    }
    Ok(())
}

fn to_mask(topology: &Topology, set: &FailureSet) -> Vec<bool> {
    let mut mask = vec![false; topology.node_count()];
    for v in set.nodes() {
        mask[v.0] = true;
    }
    mask
}

/// Shortest route from `v` to a monitor avoiding `dead`, lowest ids first.
fn route_to_monitor(topology: &Topology, v: NodeId, dead: &[bool]) -> Option<Vec<NodeId>> {
    let graph = topology.graph();
    let mut parent = vec![usize::MAX; topology.node_count()];
    parent[v.0] = v.0;
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        if topology.is_monitor(u) {
            let mut route = vec![u];
            let mut cur = u;
            while cur != v {
                cur = NodeId(parent[cur.0]);
                route.push(cur);
            }
            route.reverse();
            return Some(route);
        }
        for &w in graph.adjacent(u) {
            if !dead[w.0] && parent[w.0] == usize::MAX {
                parent[w.0] = u.0;
                queue.push_back(w);
            }
        }
    }
    None
}

fn measurable_probe(topology: &Topology, model: &ProbingModel, v: NodeId, dead: &[bool]) -> Option<Probe> {
    match model {
        ProbingModel::Cap => route_to_monitor(topology, v, dead).map(|route| {
            // out to the monitor and back again
            let mut walk: Vec<NodeId> = route.iter().rev().copied().collect();
            walk.extend(route.iter().skip(1));
            Probe::Walk(walk)
        }),
        ProbingModel::Csp => {
            let targets: Vec<bool> = (0..topology.node_count())
                .map(|i| topology.is_monitor(NodeId(i)) && !dead[i])
                .collect();
            let routes = disjoint_routes(topology.graph(), v, &targets, dead, 2);
            (routes.len() == 2).then(|| {
                let mut walk: Vec<NodeId> = routes[0].iter().rev().copied().collect();
                walk.extend(routes[1].iter().skip(1));
                Probe::Walk(walk)
            })
        }
        ProbingModel::Up(ensemble) => ensemble
            .incidence(v)?
            .iter()
            .find(|&&p| ensemble.paths()[p].nodes.iter().all(|w| !dead[w.0]))
            .map(|&p| Probe::Path(p)),
    }
}

/// A measurable path through `v` that avoids every node of `avoid`, if one exists.
pub fn measurable_path(
    topology: &Topology,
    model: &ProbingModel,
    v: NodeId,
    avoid: &FailureSet,
) -> Result<Option<Probe>> {
    check_target(topology, v, avoid)?;
    Ok(measurable_probe(topology, model, v, &to_mask(topology, avoid)))
}

pub fn measurable_path_exists(
    topology: &Topology,
    model: &ProbingModel,
    v: NodeId,
    avoid: &FailureSet,
) -> Result<bool> {
    Ok(measurable_path(topology, model, v, avoid)?.is_some())
}

pub fn distinguishable(
    topology: &Topology,
    model: &ProbingModel,
    first: &FailureSet,
    second: &FailureSet,
) -> Result<Distinction> {
    if first == second {
        return Err(Error::input("cannot distinguish a failure set from itself"));
    }
    for (a, b) in [(first, second), (second, first)] {
        let dead = to_mask(topology, a);
        for &v in b.nodes().difference(a.nodes()) {
            if let Some(probe) = measurable_probe(topology, model, v, &dead) {
                return Ok(Distinction {
                    distinguishable: true,
                    witness: Witness::DistinguishingPath { probe, node: v },
                });
            }
        }
    }
    Ok(Distinction {
        distinguishable: false,
        witness: Witness::IndistinguishablePair {
            first: first.clone(),
            second: second.clone(),
        },
    })
}

/// Failure-set masks over the non-monitor indices, by size and then lexicographically.
fn enumerate_sets(free: u64, max_size: usize) -> Vec<u64> {
    let mut sets: Vec<u64> = Vec::new();
    let mut sub = free;
    loop {
        if sub.count_ones() as usize <= max_size {
            sets.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    sets.sort_by_cached_key(|&m| {
        let members: Vec<u32> = (0..64).filter(|i| m >> i & 1 == 1).collect();
        (members.len(), members)
    });
    sets
}

/// Measurability table for one topology and probing model.
#[derive(Debug, Clone)]
pub struct Oracle<'a> {
    topology: &'a Topology,
    model: &'a ProbingModel,
    slot: Vec<Option<usize>>,
    /// For each failure mask, the mask of non-monitors outside it that stay measurable.
    reach: Vec<u64>,
    /// UP only: non-monitor mask of each path.
    path_masks: Vec<u64>,
}

impl<'a> Oracle<'a> {
    pub fn new(topology: &'a Topology, model: &'a ProbingModel, config: OracleConfig) -> Result<Self> {
        let sigma = topology.sigma();
        let limit = config.max_sigma.min(HARD_SIGMA_LIMIT);
        if sigma > limit {
            return Err(Error::capacity(format!(
                "brute-force identifiability over {sigma} non-monitors exceeds the guard of {limit}"
            )));
        }
        if let ProbingModel::Up(e) = model {
            if e.non_monitors() != topology.non_monitors() {
                return Err(Error::input("path ensemble was built for a different topology"));
            }
        }
        let nm = topology.non_monitors();
        let mut slot = vec![None; topology.node_count()];
        for (i, v) in nm.iter().enumerate() {
            slot[v.0] = Some(i);
        }
        let path_masks = match model {
            ProbingModel::Up(e) => e
                .paths()
                .iter()
                .map(|p| {
                    p.nodes
                        .iter()
                        .filter_map(|v| slot[v.0])
                        .fold(0u64, |m, i| m | 1 << i)
                })
                .collect(),
            _ => Vec::new(),
        };
        let mut reach = vec![0u64; 1 << sigma];
        let mut dead = vec![false; topology.node_count()];
        for (mask, entry) in reach.iter_mut().enumerate() {
            for (i, v) in nm.iter().enumerate() {
                dead[v.0] = mask >> i & 1 == 1;
            }
            for (i, &v) in nm.iter().enumerate() {
                if mask >> i & 1 == 0 && measurable_probe(topology, model, v, &dead).is_some() {
                    *entry |= 1 << i;
                }
            }
        }
        Ok(Oracle {
            topology,
            model,
            slot,
            reach,
            path_masks,
        })
    }

    pub fn sigma(&self) -> usize {
        self.topology.sigma()
    }

    fn full(&self) -> u64 {
        (1u64 << self.sigma()) - 1
    }

    fn mask(&self, set: &FailureSet) -> Result<u64> {
        set.nodes().iter().try_fold(0u64, |m, v| {
            let i = self
                .slot
                .get(v.0)
                .copied()
                .flatten()
                .ok_or_else(|| Error::input(format!("{v} is not a non-monitor")))?;
            Ok(m | 1 << i)
        })
    }

    fn set(&self, mask: u64) -> FailureSet {
        let nm = self.topology.non_monitors();
        FailureSet(
            (0..nm.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| nm[i])
                .collect(),
        )
    }

    /// Non-monitors outside `failed` that remain measurable.
    pub fn probeable(&self, failed: &FailureSet) -> Result<FailureSet> {
        Ok(self.set(self.reach[self.mask(failed)? as usize]))
    }

    fn separated(&self, base: u64, a: u64, b: u64) -> bool {
        (b & !a & self.reach[(a | base) as usize]) != 0 || (a & !b & self.reach[(b | base) as usize]) != 0
    }

    pub fn distinguishable(&self, first: &FailureSet, second: &FailureSet) -> Result<bool> {
        if first == second {
            return Err(Error::input("cannot distinguish a failure set from itself"));
        }
        Ok(self.separated(0, self.mask(first)?, self.mask(second)?))
    }

    fn first_confusion(&self, base: u64, k: usize) -> Option<(u64, u64)> {
        let sets = enumerate_sets(self.full() & !base, k);
        for (i, &a) in sets.iter().enumerate() {
            for &b in &sets[i + 1..] {
                if !self.separated(base, a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.sigma() {
            return Err(Error::input(format!(
                "k = {k} exceeds the number of non-monitors ({})",
                self.sigma()
            )));
        }
        Ok(())
    }

    /// Every pair of distinct failure sets of size at most `k` is distinguishable.
    pub fn k_identifiable(&self, k: usize) -> Result<Identifiability> {
        self.check_k(k)?;
        let counterexample = self
            .first_confusion(0, k)
            .map(|(a, b)| (self.set(a), self.set(b)));
        Ok(Identifiability { k, counterexample })
    }

    /// Largest k for which the network is k-identifiable.
    pub fn omega(&self) -> usize {
        (1..=self.sigma())
            .find(|&k| self.first_confusion(0, k).is_some())
            .map_or(self.sigma(), |k| k - 1)
    }

    /// A node that no measurable path reaches after some failure set of size
    /// at most `k` not containing it, if there is one.
    pub fn sufficient_violation(&self, k: usize) -> Result<Option<Witness>> {
        self.check_k(k)?;
        for f in enumerate_sets(self.full(), k) {
            let stuck = self.full() & !f & !self.reach[f as usize];
            if stuck != 0 {
                let i = stuck.trailing_zeros() as usize;
                return Ok(Some(Witness::UnprobeableNode {
                    node: self.topology.non_monitors()[i],
                    trapped_by: self.set(f),
                }));
            }
        }
        Ok(None)
    }

    pub fn abstract_sufficient(&self, k: usize) -> Result<bool> {
        Ok(self.sufficient_violation(k)?.is_none())
    }

    /// For every non-monitor set `V'` smaller than `k`, the network minus `V'`
    /// is (k - |V'|)-identifiable.
    pub fn abstract_necessary(&self, k: usize) -> Result<bool> {
        self.check_k(k)?;
        if k == 0 {
            return Ok(true);
        }
        Ok(enumerate_sets(self.full(), k - 1)
            .into_iter()
            .all(|removed| self.first_confusion(removed, k - removed.count_ones() as usize).is_none()))
    }

    fn observe(&self, failed: u64) -> OutcomeMap {
        let observations = match self.model {
            ProbingModel::Up(_) => self
                .path_masks
                .iter()
                .enumerate()
                .map(|(id, &pm)| (id, if pm & failed != 0 { ProbeState::Down } else { ProbeState::Up }))
                .collect(),
            _ => {
                let up = self.reach[failed as usize];
                self.topology
                    .non_monitors()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.0, if up >> i & 1 == 1 { ProbeState::Up } else { ProbeState::Down }))
                    .collect()
            }
        };
        OutcomeMap {
            model: self.model.kind(),
            observations,
        }
    }

    pub fn simulate(&self, truth: &FailureSet) -> Result<OutcomeMap> {
        Ok(self.observe(self.mask(truth)?))
    }

    fn check_outcomes(&self, outcomes: &OutcomeMap) -> Result<()> {
        if outcomes.model != self.model.kind() {
            return Err(Error::format(format!(
                "outcomes are for {} but the analysis uses {}",
                outcomes.model.name(),
                self.model.kind().name()
            )));
        }
        let expected: Vec<usize> = match self.model {
            ProbingModel::Up(e) => (0..e.len()).collect(),
            _ => self.topology.non_monitors().iter().map(|v| v.0).collect(),
        };
        let got: Vec<usize> = outcomes.observations.keys().copied().collect();
        if got != expected {
            let missing: Vec<usize> = expected.iter().filter(|p| !outcomes.observations.contains_key(p)).copied().collect();
            let extra: Vec<usize> = got.iter().filter(|p| !expected.contains(p)).copied().collect();
            return Err(Error::format(format!(
                "outcome probes do not match the model: missing {missing:?}, unexpected {extra:?}"
            )));
        }
        Ok(())
    }

    /// Every failure set of size at most `k_max` consistent with `outcomes`,
    /// ordered by size and then lexicographically.
    pub fn localize(&self, outcomes: &OutcomeMap, k_max: usize) -> Result<Vec<FailureSet>> {
        self.check_outcomes(outcomes)?;
        Ok(enumerate_sets(self.full(), k_max.min(self.sigma()))
            .into_iter()
            .filter(|&f| self.observe(f).observations == outcomes.observations)
            .map(|f| self.set(f))
            .collect())
    }
}

pub fn abstract_sufficient(topology: &Topology, model: &ProbingModel, k: usize, config: OracleConfig) -> Result<bool> {
    Oracle::new(topology, model, config)?.abstract_sufficient(k)
}

pub fn abstract_necessary(topology: &Topology, model: &ProbingModel, k: usize, config: OracleConfig) -> Result<bool> {
    Oracle::new(topology, model, config)?.abstract_necessary(k)
}

pub fn k_identifiable_oracle(
    topology: &Topology,
    model: &ProbingModel,
    k: usize,
    config: OracleConfig,
) -> Result<Identifiability> {
    Oracle::new(topology, model, config)?.k_identifiable(k)
}

pub fn omega_oracle(topology: &Topology, model: &ProbingModel, config: OracleConfig) -> Result<usize> {
    Ok(Oracle::new(topology, model, config)?.omega())
}

/// Probe outcomes produced by the failure of `truth`. Needs no size guard.
pub fn simulate_measurements(topology: &Topology, model: &ProbingModel, truth: &FailureSet) -> Result<OutcomeMap> {
    for v in truth.nodes() {
        topology.check_non_monitor(*v)?;
    }
    let dead = to_mask(topology, truth);
    let observations = match model {
        ProbingModel::Up(e) => e
            .paths()
            .iter()
            .map(|p| {
                let down = p.nodes.iter().any(|v| dead[v.0]);
                (p.id, if down { ProbeState::Down } else { ProbeState::Up })
            })
            .collect(),
        _ => topology
            .non_monitors()
            .iter()
            .map(|&v| {
                let up = !dead[v.0] && measurable_probe(topology, model, v, &dead).is_some();
                (v.0, if up { ProbeState::Up } else { ProbeState::Down })
            })
            .collect(),
    };
    Ok(OutcomeMap {
        model: model.kind(),
        observations,
    })
}

pub fn localize(
    topology: &Topology,
    model: &ProbingModel,
    outcomes: &OutcomeMap,
    k_max: usize,
    config: OracleConfig,
) -> Result<Vec<FailureSet>> {
    Oracle::new(topology, model, config)?.localize(outcomes, k_max)
}

/// Whether every component left after deleting any allowed node set of the
/// given size contains a monitor.
///
/// With [`MonitorRemoval::None`] the deleted sets are non-monitor sets of size
/// at most `s`; with `Exactly(m)` they are `m` plus at most `s` non-monitors;
/// with `AtMostOne` they have at most `s` nodes of which at most one is a monitor.
pub fn exhaustive_component_condition(
    topology: &Topology,
    s: usize,
    removal: MonitorRemoval,
    config: OracleConfig,
) -> Result<bool> {
    let sigma = topology.sigma();
    let limit = config.max_sigma.min(HARD_SIGMA_LIMIT);
    if sigma > limit {
        return Err(Error::capacity(format!(
            "enumerating subsets of {sigma} non-monitors exceeds the guard of {limit}"
        )));
    }
    if s > sigma {
        return Err(Error::input(format!("s = {s} exceeds the number of non-monitors ({sigma})")));
    }
    if let MonitorRemoval::Exactly(m) = removal {
        topology.check(m)?;
        if !topology.is_monitor(m) {
            return Err(Error::input(format!("{m} is not a monitor")));
        }
    }
    let graph = topology.graph();
    let nm = topology.non_monitors();
    let all_monitored = |removed: &[bool]| {
        let (label, count) = graph.component_labels(removed);
        let mut seen = vec![false; count];
        for &m in topology.monitors() {
            if label[m.0] != usize::MAX {
                seen[label[m.0]] = true;
            }
        }
        seen.into_iter().all(|b| b)
    };
    let mut removed = vec![false; topology.node_count()];
    let mut check = |extra: Option<NodeId>, budget: usize| {
        enumerate_sets((1u64 << sigma) - 1, budget).into_iter().all(|mask| {
            removed.iter_mut().for_each(|r| *r = false);
            for (i, v) in nm.iter().enumerate() {
                removed[v.0] = mask >> i & 1 == 1;
            }
            if let Some(m) = extra {
                removed[m.0] = true;
            }
            all_monitored(&removed)
        })
    };
    Ok(match removal {
        MonitorRemoval::None => check(None, s),
        MonitorRemoval::Exactly(m) => check(Some(m), s),
        MonitorRemoval::AtMostOne => {
            check(None, s)
                && (s == 0 || topology.monitors().iter().all(|&m| check(Some(m), s - 1)))
        }
    })
}
