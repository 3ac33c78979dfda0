//! Outcome files: observed probe states, keyed by node name (CAP, CSP) or path index (UP).

use std::collections::BTreeMap;

use nodeloc_core::{ModelKind, NodeId, OutcomeMap, ProbeState};
use serde::{Deserialize, Serialize};

use crate::doc::TopologyDocument;
use crate::error::{format, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbeKey {
    Path(usize),
    Node(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub probe: ProbeKey,
    pub state: ProbeState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeFile {
    pub model: ModelKind,
    pub observations: Vec<Observation>,
}

impl OutcomeFile {
    pub fn from_map(doc: &TopologyDocument, map: &OutcomeMap) -> Self {
        let observations = map
            .observations
            .iter()
            .map(|(&key, &state)| Observation {
                probe: match map.model {
                    ModelKind::Up => ProbeKey::Path(key),
                    _ => ProbeKey::Node(doc.name(NodeId(key)).to_owned()),
                },
                state,
            })
            .collect();
        OutcomeFile {
            model: map.model,
            observations,
        }
    }

    pub fn to_map(&self, doc: &TopologyDocument) -> Result<OutcomeMap> {
        let mut observations = BTreeMap::new();
        for (i, o) in self.observations.iter().enumerate() {
            let key = match (&o.probe, self.model) {
                (ProbeKey::Path(p), ModelKind::Up) => *p,
                (ProbeKey::Node(name), ModelKind::Cap | ModelKind::Csp) => doc
                    .id(name)
                    .ok_or_else(|| format(format!("observations[{i}].probe: unknown node {name:?}")))?
                    .0,
                _ => {
                    return Err(format(format!(
                        "observations[{i}].probe: {} probes are {}",
                        self.model.name(),
                        if self.model == ModelKind::Up { "path indices" } else { "node names" }
                    )))
                }
            };
            if observations.insert(key, o.state).is_some() {
                return Err(format(format!("observations[{i}]: probe listed twice")));
            }
        }
        Ok(OutcomeMap {
            model: self.model,
            observations,
        })
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| format(format!("outcomes: {e}")))
    }

    pub fn emit(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("outcomes always serialize");
        out.push('\n');
        out
    }
}
