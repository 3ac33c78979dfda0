//! Node-failure identifiability for Boolean network tomography.
//!
//! Given an undirected topology with designated monitors, decide how many
//! simultaneous non-monitor failures can be uniquely localized from end-to-end
//! path measurements under three probing models:
//!
//! - CAP: monitors may send arbitrary walks,
//! - CSP: monitor-to-monitor simple paths between distinct monitors,
//! - UP: a fixed, externally chosen set of paths.
//!
//! Graph-theoretic tests live in [`conditions`]; [`oracle`] holds the
//! exhaustive ground truth used to validate them on small networks.

pub mod auxiliary;
pub mod conditions;
mod error;
mod flow;
pub mod graph;
pub mod oracle;
pub mod up;

pub use auxiliary::{build_gm, build_gstar, delta_min, AuxKind, AuxiliaryGraph};
pub use conditions::{
    cap_verdict, csp_verdict, omega_cap, omega_csp, omega_up, up_verdict, ConnectivitySummary, OmegaBounds,
    Rationale, Verdict, VerdictValue,
};
pub use error::{Error, Result};
pub use graph::{
    connected_components, is_k_connected, max_disjoint_paths, neighborhood_of_set, neighbors, vertex_connectivity,
    ComponentPartition, Graph, NodeId, NodeSet, Topology,
};
pub use oracle::{
    FailureSet, Identifiability, ModelKind, MonitorRemoval, Oracle, OracleConfig, OutcomeMap, Probe, ProbeState,
    ProbingModel, Witness,
};
pub use up::{build_ensemble, msc, msc_profile, MeasurementPath, Msc, MscProfile, PathEnsemble};
