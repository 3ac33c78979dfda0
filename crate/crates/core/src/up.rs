//! Fixed measurement path ensembles and minimum set cover (MSC) profiles.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Topology};

/// Default cap on the number of candidate covering sets an exact MSC search accepts.
pub const DEFAULT_MAX_COVER_SETS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPath {
    pub id: usize,
    pub nodes: Vec<NodeId>,
}

impl MeasurementPath {
    pub fn traverses(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEnsemble {
    paths: Vec<MeasurementPath>,
    non_monitors: Vec<NodeId>,
    incidence: BTreeMap<NodeId, BTreeSet<usize>>,
}

impl PathEnsemble {
    pub fn paths(&self) -> &[MeasurementPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn non_monitors(&self) -> &[NodeId] {
        &self.non_monitors
    }

    /// Ids of the paths traversing non-monitor `v`.
    pub fn incidence(&self, v: NodeId) -> Option<&BTreeSet<usize>> {
        self.incidence.get(&v)
    }

    /// Non-monitors no path traverses.
    pub fn unobserved(&self) -> Vec<NodeId> {
        self.incidence
            .iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(v, _)| *v)
            .collect()
    }
}

/// Validates monitor-to-monitor walks and indexes which paths traverse each non-monitor.
pub fn build_ensemble(topology: &Topology, paths: Vec<Vec<NodeId>>) -> Result<PathEnsemble> {
    let graph = topology.graph();
    let mut incidence: BTreeMap<NodeId, BTreeSet<usize>> = topology
        .non_monitors()
        .iter()
        .map(|&v| (v, BTreeSet::new()))
        .collect();
    let mut out = Vec::with_capacity(paths.len());
    for (id, nodes) in paths.into_iter().enumerate() {
        let (Some(&first), Some(&last)) = (nodes.first(), nodes.last()) else {
            return Err(Error::format(format!("path {id} is empty")));
        };
        if let Some(bad) = nodes.iter().find(|v| !graph.contains(**v)) {
            return Err(Error::format(format!("path {id} uses unknown node {bad}")));
        }
        for end in [first, last] {
            if !topology.is_monitor(end) {
                return Err(Error::format(format!(
                    "path {id} must start and end at monitors, but {end} is not one"
                )));
            }
        }
        if let Some(w) = nodes.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
            return Err(Error::format(format!(
                "path {id} steps from {} to {}, which are not adjacent",
                w[0], w[1]
            )));
        }
        for v in &nodes {
            if let Some(set) = incidence.get_mut(v) {
                set.insert(id);
            }
        }
        out.push(MeasurementPath { id, nodes });
    }
    Ok(PathEnsemble {
        paths: out,
        non_monitors: topology.non_monitors().to_vec(),
        incidence,
    })
}

/// A minimum set cover size, or `Infinite` when no cover exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Msc {
    Finite(usize),
    Infinite,
}

impl Msc {
    /// Whether this value strictly exceeds `k`.
    pub fn exceeds(self, k: usize) -> bool {
        match self {
            Msc::Finite(c) => c > k,
            Msc::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Msc::Finite(c) => Some(c),
            Msc::Infinite => None,
        }
    }
}

impl Ord for Msc {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Msc::Finite(a), Msc::Finite(b)) => a.cmp(b),
            (Msc::Finite(_), Msc::Infinite) => Ordering::Less,
            (Msc::Infinite, Msc::Finite(_)) => Ordering::Greater,
            (Msc::Infinite, Msc::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Msc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Msc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Msc::Finite(c) => write!(f, "{c}"),
            Msc::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Msc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Msc::Finite(c) => s.serialize_u64(*c as u64),
            Msc::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Msc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(c) => Ok(Msc::Finite(c as usize)),
            Raw::Text(t) if t == "inf" => Ok(Msc::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a count or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MscProfile {
    pub msc: BTreeMap<NodeId, Msc>,
    /// Minimum MSC over all non-monitors.
    pub big_delta: Msc,
    /// Non-monitors on no path; their MSC is 0.
    pub unobserved: Vec<NodeId>,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn minus(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn union(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// Exact minimum set cover by branch and bound.
struct Cover<'a> {
    sets: &'a [Bits],
    best: usize,
}

impl Cover<'_> {
    fn search(&mut self, uncovered: &Bits, chosen: usize) {
        if uncovered.is_empty() {
            self.best = self.best.min(chosen);
            return;
        }
        let gains: Vec<usize> = self.sets.iter().map(|s| s.and(uncovered).count()).collect();
        let widest = gains.iter().copied().max().unwrap_or(0);
        if widest == 0 {
            return;
        }
        if chosen + uncovered.count().div_ceil(widest) >= self.best {
            return;
        }
        // Branch on the uncovered element with the fewest covering sets.
        let len = uncovered.0.len() * 64;
        let pivot = (0..len)
            .filter(|&i| uncovered.get(i))
            .min_by_key(|&i| self.sets.iter().filter(|s| s.get(i)).count())
            .expect("uncovered is non-empty");
        let mut options: Vec<usize> = (0..self.sets.len()).filter(|&j| self.sets[j].get(pivot)).collect();
        options.sort_by_key(|&j| std::cmp::Reverse(gains[j]));
        for j in options {
            self.search(&uncovered.minus(&self.sets[j]), chosen + 1);
        }
    }
}

fn min_cover(universe: usize, mut sets: Vec<Bits>, max_sets: usize) -> Result<Msc> {
    let full = Bits::full(universe);
    let reach = sets.iter().fold(Bits::empty(universe), |acc, s| acc.union(s));
    if reach != full {
        return Ok(Msc::Infinite);
    }
    // Drop sets contained in another; among equal sets keep the first.
    let mut keep = vec![true; sets.len()];
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i != j && keep[j] && sets[i].is_subset(&sets[j]) && (sets[i] != sets[j] || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut flags = keep.into_iter();
    sets.retain(|_| flags.next().unwrap());
    if sets.len() > max_sets {
        return Err(Error::capacity(format!(
            "exact set cover over {} candidate sets exceeds the limit of {max_sets}",
            sets.len()
        )));
    }
    let mut cover = Cover {
        sets: &sets,
        best: sets.len() + 1,
    };
    cover.search(&full, 0);
    Ok(Msc::Finite(cover.best))
}

/// Fewest other non-monitors whose paths jointly cover every path through `v`.
pub fn msc(ensemble: &PathEnsemble, v: NodeId) -> Result<Msc> {
    msc_with_limit(ensemble, v, DEFAULT_MAX_COVER_SETS)
}

pub fn msc_with_limit(ensemble: &PathEnsemble, v: NodeId, max_sets: usize) -> Result<Msc> {
    let Some(own) = ensemble.incidence(v) else {
        return Err(Error::input(format!("{v} is not a non-monitor of this ensemble")));
    };
    if own.is_empty() {
        return Ok(Msc::Finite(0));
    }
    let slot: BTreeMap<usize, usize> = own.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let sets: Vec<Bits> = ensemble
        .non_monitors()
        .iter()
        .filter(|&&w| w != v)
        .filter_map(|w| {
            let mut bits = Bits::empty(own.len());
            for p in &ensemble.incidence[w] {
                if let Some(&i) = slot.get(p) {
                    bits.set(i);
                }
            }
            (!bits.is_empty()).then_some(bits)
        })
        .collect();
    min_cover(own.len(), sets, max_sets)
}

pub fn msc_profile(ensemble: &PathEnsemble) -> Result<MscProfile> {
    msc_profile_with_limit(ensemble, DEFAULT_MAX_COVER_SETS)
}

pub fn msc_profile_with_limit(ensemble: &PathEnsemble, max_sets: usize) -> Result<MscProfile> {
    let mut msc = BTreeMap::new();
    for &v in ensemble.non_monitors() {
        msc.insert(v, msc_with_limit(ensemble, v, max_sets)?);
    }
    let big_delta = msc.values().copied().min().unwrap_or(Msc::Infinite);
    Ok(MscProfile {
        msc,
        big_delta,
        unobserved: ensemble.unobserved(),
    })
}
