//! Polynomial-time identifiability verdicts and maximum-identifiability bounds
//! for the three probing models.
//!
//! Per-k verdicts pair a sufficient and a necessary condition. Under CAP both
//! come from the connectivity of `G*`; under CSP from `G*` together with every
//! `G_m`; under UP from the MSC profile. At the largest failure-set sizes
//! (`k = σ` for CAP and CSP, `k = σ - 1` for CSP) exact neighbour tests replace
//! the connectivity conditions, so those verdicts are never indeterminate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::auxiliary::{build_gm, build_gstar};
use crate::error::{Error, Result};
use crate::graph::{k_connected_from, NodeId, Topology};
use crate::up::{Msc, MscProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictValue {
    Identifiable,
    NotIdentifiable,
    Indeterminate,
}

/// Which condition decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    /// `k = 0`: only the empty failure set is possible.
    EmptyFailureSet,
    /// CAP: `G*` is (k+1)-connected / k-connected.
    GstarConnectivity,
    /// CAP, `k = σ`: every non-monitor neighbours a monitor.
    MonitorNeighbor,
    /// CSP: `G*` (k+2)- and every `G_m` (k+1)-connected / `G*` (k+1)- and `G_m` k-connected.
    GstarGmConnectivity,
    /// CSP, `k = σ`: every non-monitor has two monitor neighbours.
    TwoMonitorNeighbors,
    /// CSP, `k = σ - 1`: at most one exception to two monitor neighbours,
    /// adjacent to one monitor and every other non-monitor.
    NearlyTwoMonitorNeighbors,
    /// UP: every MSC exceeds k / k - 1.
    MscThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub sufficient_holds: bool,
    pub necessary_holds: bool,
    pub rationale: Rationale,
}

impl Verdict {
    fn new(sufficient: bool, necessary: bool, rationale: Rationale) -> Result<Self> {
        if sufficient && !necessary {
            return Err(Error::Invariant(format!(
                "sufficient condition holds but necessary one fails ({rationale:?})"
            )));
        }
        let value = if sufficient {
            VerdictValue::Identifiable
        } else if !necessary {
            VerdictValue::NotIdentifiable
        } else {
            VerdictValue::Indeterminate
        };
        Ok(Verdict {
            value,
            sufficient_holds: sufficient,
            necessary_holds: necessary,
            rationale,
        })
    }

    fn exact(holds: bool, rationale: Rationale) -> Self {
        Verdict::new(holds, holds, rationale).expect("exact verdicts are consistent")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaBounds {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
    /// Whether the closed-form bound's precondition held.
    pub applicable: bool,
    /// Empty when `applicable`; otherwise names the failed precondition.
    pub guard_note: String,
}

impl OmegaBounds {
    fn new(lower: usize, upper: usize, applicable: bool, guard_note: String) -> Self {
        debug_assert!(lower <= upper);
        OmegaBounds {
            lower,
            upper,
            exact: (lower == upper).then_some(lower),
            applicable,
            guard_note,
        }
    }

    pub fn contains(&self, omega: usize) -> bool {
        (self.lower..=self.upper).contains(&omega)
    }
}

/// Connectivity numbers and neighbour counts every CAP/CSP condition reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivitySummary {
    pub sigma: usize,
    /// δ(G*).
    pub delta_gstar: usize,
    /// δ(G_m) for each monitor m.
    pub delta_gm: BTreeMap<NodeId, usize>,
    /// min over m of δ(G_m).
    pub delta_min: usize,
    /// Monitor neighbours of each non-monitor.
    pub monitor_neighbors: BTreeMap<NodeId, usize>,
    /// Non-monitor neighbours of each non-monitor.
    pub non_monitor_neighbors: BTreeMap<NodeId, usize>,
}

impl ConnectivitySummary {
    pub fn compute(topology: &Topology) -> Result<Self> {
        let delta_gstar = build_gstar(topology)?.connectivity();
        let mut delta_gm = BTreeMap::new();
        for &m in topology.monitors() {
            delta_gm.insert(m, build_gm(topology, m)?.connectivity());
        }
        let delta_min = delta_gm.values().copied().min().expect("at least one monitor");
        let graph = topology.graph();
        let monitor_neighbors = topology
            .non_monitors()
            .iter()
            .map(|&v| (v, topology.monitor_degree(v)))
            .collect();
        let non_monitor_neighbors = topology
            .non_monitors()
            .iter()
            .map(|&v| (v, graph.degree(v) - topology.monitor_degree(v)))
            .collect();
        Ok(ConnectivitySummary {
            sigma: topology.sigma(),
            delta_gstar,
            delta_gm,
            delta_min,
            monitor_neighbors,
            non_monitor_neighbors,
        })
    }

    // Both auxiliary graphs have σ + 1 nodes.
    fn gstar_connected(&self, k: usize) -> bool {
        k_connected_from(self.sigma + 1, self.delta_gstar, k)
    }

    fn every_gm_connected(&self, k: usize) -> bool {
        k_connected_from(self.sigma + 1, self.delta_min, k)
    }

    /// Every non-monitor has a monitor neighbour.
    pub fn all_monitor_adjacent(&self) -> bool {
        self.monitor_neighbors.values().all(|&c| c >= 1)
    }

    /// Every non-monitor has at least two monitor neighbours.
    pub fn all_two_monitor_adjacent(&self) -> bool {
        self.monitor_neighbors.values().all(|&c| c >= 2)
    }

    /// All non-monitors but at most one have two monitor neighbours, and the
    /// exception has exactly one monitor neighbour and every other non-monitor
    /// as a neighbour.
    pub fn nearly_two_monitor_adjacent(&self) -> bool {
        let short: Vec<NodeId> = self
            .monitor_neighbors
            .iter()
            .filter(|(_, &c)| c < 2)
            .map(|(v, _)| *v)
            .collect();
        match short.as_slice() {
            [] => true,
            [v] => self.monitor_neighbors[v] == 1 && self.non_monitor_neighbors[v] + 1 == self.sigma,
            _ => false,
        }
    }

    /// Exact test for CSP identifiability at `k = σ - 1`. With a single
    /// non-monitor that is `k = 0`, which always holds.
    pub fn csp_sigma_minus_one_exact(&self) -> bool {
        self.sigma <= 1 || self.nearly_two_monitor_adjacent()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.sigma {
            Err(Error::input(format!(
                "k = {k} exceeds the number of non-monitors ({})",
                self.sigma
            )))
        } else {
            Ok(())
        }
    }

    pub fn cap_verdict(&self, k: usize) -> Result<Verdict> {
        self.check_k(k)?;
        if k == 0 {
            return Ok(Verdict::exact(true, Rationale::EmptyFailureSet));
        }
        if k == self.sigma {
            let exact = self.all_monitor_adjacent();
            return Verdict::new(exact, exact && self.gstar_connected(k), Rationale::MonitorNeighbor);
        }
        Verdict::new(
            self.gstar_connected(k + 1),
            self.gstar_connected(k),
            Rationale::GstarConnectivity,
        )
    }

    pub fn csp_verdict(&self, k: usize) -> Result<Verdict> {
        self.check_k(k)?;
        if k == 0 {
            return Ok(Verdict::exact(true, Rationale::EmptyFailureSet));
        }
        if k == self.sigma {
            return Ok(Verdict::exact(
                self.all_two_monitor_adjacent(),
                Rationale::TwoMonitorNeighbors,
            ));
        }
        if k + 1 == self.sigma {
            return Ok(Verdict::exact(
                self.csp_sigma_minus_one_exact(),
                Rationale::NearlyTwoMonitorNeighbors,
            ));
        }
        Verdict::new(
            self.gstar_connected(k + 2) && self.every_gm_connected(k + 1),
            self.gstar_connected(k + 1) && self.every_gm_connected(k),
            Rationale::GstarGmConnectivity,
        )
    }

    pub fn omega_cap(&self) -> Result<OmegaBounds> {
        let (delta, sigma) = (self.delta_gstar, self.sigma);
        if delta < sigma {
            return Ok(OmegaBounds::new(delta.saturating_sub(1), delta, true, String::new()));
        }
        let note = format!(
            "connectivity of G* ({delta}) exceeds sigma - 1 ({})",
            sigma as i64 - 1
        );
        if self.all_monitor_adjacent() {
            return Ok(OmegaBounds::new(sigma, sigma, false, note));
        }
        let (lower, upper) = scan_bounds(sigma, |k| self.cap_verdict(k))?;
        Ok(OmegaBounds::new(lower, upper, false, note))
    }

    pub fn omega_csp(&self) -> Result<OmegaBounds> {
        let sigma = self.sigma as i64;
        let dmin = self.delta_min as i64;
        let dstar = self.delta_gstar as i64;
        let guard = dmin.min(dstar - 1);
        if guard <= sigma - 2 {
            let lower = (dmin - 1).min(dstar - 2).max(0) as usize;
            let upper = guard.max(0) as usize;
            return Ok(OmegaBounds::new(lower, upper, true, String::new()));
        }
        let note = format!(
            "min(delta_min, connectivity of G* - 1) = {guard} exceeds sigma - 2 ({})",
            sigma - 2
        );
        let sigma = self.sigma;
        if self.all_two_monitor_adjacent() {
            return Ok(OmegaBounds::new(sigma, sigma, false, note));
        }
        if sigma >= 1 && self.csp_sigma_minus_one_exact() {
            return Ok(OmegaBounds::new(sigma - 1, sigma - 1, false, note));
        }
        let (lower, upper) = scan_bounds(sigma, |k| self.csp_verdict(k))?;
        Ok(OmegaBounds::new(lower, upper, false, note))
    }
}

/// Bounds on Ω read off per-k verdicts: the longest identifiable prefix and
/// the first k known not to be identifiable.
fn scan_bounds(sigma: usize, verdict: impl Fn(usize) -> Result<Verdict>) -> Result<(usize, usize)> {
    let mut lower = 0;
    let mut upper = sigma;
    let mut prefix = true;
    for k in 0..=sigma {
        let v = verdict(k)?;
        if prefix && v.sufficient_holds {
            lower = k;
        } else {
            prefix = false;
        }
        if !v.necessary_holds {
            upper = k - 1;
            break;
        }
    }
    Ok((lower, upper))
}

pub fn cap_verdict(topology: &Topology, k: usize) -> Result<Verdict> {
    ConnectivitySummary::compute(topology)?.cap_verdict(k)
}

pub fn csp_verdict(topology: &Topology, k: usize) -> Result<Verdict> {
    ConnectivitySummary::compute(topology)?.csp_verdict(k)
}

pub fn omega_cap(topology: &Topology) -> Result<OmegaBounds> {
    ConnectivitySummary::compute(topology)?.omega_cap()
}

pub fn omega_csp(topology: &Topology) -> Result<OmegaBounds> {
    ConnectivitySummary::compute(topology)?.omega_csp()
}

pub fn up_verdict(profile: &MscProfile, k: usize) -> Result<Verdict> {
    if k == 0 {
        return Ok(Verdict::exact(true, Rationale::EmptyFailureSet));
    }
    Verdict::new(
        profile.msc.values().all(|m| m.exceeds(k)),
        profile.msc.values().all(|m| m.exceeds(k - 1)),
        Rationale::MscThreshold,
    )
}

pub fn omega_up(profile: &MscProfile) -> OmegaBounds {
    let sigma = profile.msc.len();
    match profile.big_delta {
        Msc::Infinite => OmegaBounds::new(sigma, sigma, true, String::new()),
        Msc::Finite(d) => OmegaBounds::new(d.saturating_sub(1), d, true, String::new()),
    }
}
