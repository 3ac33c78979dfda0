//! The on-disk topology format.
//!
//! ```json
//! {"version": 1,
//!  "nodes": [{"name": "m1", "monitor": true}, {"name": "v1", "monitor": false}],
//!  "edges": [["m1", "v1"]],
//!  "paths": [["m1", "v1", "m1"]]}
//! ```
//!
//! `paths` is optional and carries a fixed measurement path set.

use std::collections::{BTreeSet, HashMap};

use nodeloc_core::{build_ensemble, NodeId, PathEnsemble, Topology};
use serde::{Deserialize, Serialize};

use crate::error::{format, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    version: u32,
    nodes: Vec<RawNode>,
    edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paths: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    name: String,
    monitor: bool,
}

/// A validated topology with node names and an optional path set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyDocument {
    names: Vec<String>,
    monitor: Vec<bool>,
    edges: Vec<(NodeId, NodeId)>,
    paths: Option<Vec<Vec<NodeId>>>,
    index: HashMap<String, NodeId>,
}

impl TopologyDocument {
    /// Builds a document from named nodes and id-based edges, checking the same
    /// invariants `parse` does.
    pub fn new(
        nodes: Vec<(String, bool)>,
        edges: Vec<(NodeId, NodeId)>,
        paths: Option<Vec<Vec<NodeId>>>,
    ) -> Result<Self> {
        let (names, monitor): (Vec<String>, Vec<bool>) = nodes.into_iter().unzip();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(format(format!("nodes[{i}].name: empty name")));
            }
            if index.insert(name.clone(), NodeId(i)).is_some() {
                return Err(format(format!("nodes[{i}].name: duplicate name {name:?}")));
            }
        }
        let doc = TopologyDocument {
            names,
            monitor,
            edges,
            paths,
            index,
        };
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if !self.monitor.iter().any(|&m| m) {
            return Err(format("nodes: at least one node must be a monitor"));
        }
        let mut seen = BTreeSet::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u.0 >= n || v.0 >= n {
                return Err(format(format!("edges[{i}]: endpoint out of range")));
            }
            if u == v {
                return Err(format(format!("edges[{i}]: self-loop on {:?}", self.names[u.0])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(format(format!(
                    "edges[{i}]: duplicate edge {:?} - {:?}",
                    self.names[u.0], self.names[v.0]
                )));
            }
        }
        if self.paths.is_some() {
            self.ensemble_for(&self.topology()?)
                .map_err(|e| format(format!("paths: {e}")))?;
        }
        Ok(())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| format(format!("input is not UTF-8: {e}")))?;
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| format(e.to_string()))?;
        if raw.version != FORMAT_VERSION {
            return Err(format(format!(
                "version: unsupported format version {} (expected {FORMAT_VERSION})",
                raw.version
            )));
        }
        let nodes: Vec<(String, bool)> = raw.nodes.into_iter().map(|n| (n.name, n.monitor)).collect();
        let lookup: HashMap<&str, NodeId> = nodes
            .iter()
            .enumerate()
            .map(|(i, (name, _))| (name.as_str(), NodeId(i)))
            .collect();
        let resolve = |field: String, name: &str| {
            lookup
                .get(name)
                .copied()
                .ok_or_else(|| format(format!("{field}: unknown node {name:?}")))
        };
        let edges = raw
            .edges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                Ok((
                    resolve(format!("edges[{i}][0]"), a)?,
                    resolve(format!("edges[{i}][1]"), b)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let paths = raw
            .paths
            .map(|paths| {
                paths
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        p.iter()
                            .enumerate()
                            .map(|(j, name)| resolve(format!("paths[{i}][{j}]"), name))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        TopologyDocument::new(nodes, edges, paths)
    }

    /// Canonical pretty-printed JSON, newline-terminated.
    pub fn emit(&self) -> String {
        let raw = RawDocument {
            version: FORMAT_VERSION,
            nodes: self
                .names
                .iter()
                .zip(&self.monitor)
                .map(|(name, &monitor)| RawNode {
                    name: name.clone(),
                    monitor,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (self.name(u).to_owned(), self.name(v).to_owned()))
                .collect(),
            paths: self
                .paths
                .as_ref()
                .map(|ps| ps.iter().map(|p| self.names_of(p)).collect()),
        };
        let mut out = serde_json::to_string_pretty(&raw).expect("documents always serialize");
        out.push('\n');
        out
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn names_of<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> Vec<String> {
        nodes.into_iter().map(|&v| self.name(v).to_owned()).collect()
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn is_monitor(&self, v: NodeId) -> bool {
        self.monitor[v.0]
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn paths(&self) -> Option<&[Vec<NodeId>]> {
        self.paths.as_deref()
    }

    pub fn with_paths(mut self, paths: Option<Vec<Vec<NodeId>>>) -> Result<Self> {
        self.paths = paths;
        self.validate()?;
        Ok(self)
    }

    pub fn topology(&self) -> Result<Topology> {
        let monitors = (0..self.names.len()).filter(|&i| self.monitor[i]).map(NodeId);
        Ok(Topology::new(self.names.len(), self.edges.iter().copied(), monitors)?)
    }

    fn ensemble_for(&self, topology: &Topology) -> nodeloc_core::Result<Option<PathEnsemble>> {
        self.paths
            .as_ref()
            .map(|p| build_ensemble(topology, p.clone()))
            .transpose()
    }

    /// The path set as a UP ensemble over `topology`, if the document has one.
    pub fn ensemble(&self, topology: &Topology) -> Result<Option<PathEnsemble>> {
        Ok(self.ensemble_for(topology)?)
    }

    /// Reads paths written one per line as whitespace-separated node names.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_path_lines(&self, text: &str) -> Result<Vec<Vec<NodeId>>> {
        let mut paths = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let path = line
                .split_whitespace()
                .map(|name| {
                    self.id(name)
                        .ok_or_else(|| format(format!("line {}: unknown node {name:?}", line_no + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            paths.push(path);
        }
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CliError;

    const MINIMAL: &str = r#"{"version":1,"nodes":[{"name":"m1","monitor":true},{"name":"v","monitor":false}],"edges":[["m1","v"]]}"#;

    fn err(text: &str) -> String {
        match TopologyDocument::parse(text.as_bytes()) {
            Err(CliError::Format(m)) => m,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document() {
        let doc = TopologyDocument::parse(MINIMAL.as_bytes()).unwrap();
        let t = doc.topology().unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.sigma(), 1);
        assert!(doc.paths().is_none());
    }

    #[test]
    fn round_trip() {
        let doc = TopologyDocument::parse(MINIMAL.as_bytes()).unwrap();
        let again = TopologyDocument::parse(doc.emit().as_bytes()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(doc.emit(), again.emit());
    }

    #[test]
    fn diagnostics_name_the_field() {
        assert!(err(&MINIMAL.replace(r#"["m1","v"]"#, r#"["m1","x"]"#)).contains("edges[0][1]"));
        assert!(err(&MINIMAL.replace(r#""v""#, r#""m1""#)).contains("duplicate name"));
        assert!(err(&MINIMAL.replace(r#"["m1","v"]"#, r#"["v","v"]"#)).contains("self-loop"));
        assert!(err(&MINIMAL.replace(r#"["m1","v"]"#, r#"["m1","v"],["v","m1"]"#)).contains("duplicate edge"));
        assert!(err(&MINIMAL.replace(r#""version":1"#, r#""version":2"#)).contains("version"));
        assert!(err(&MINIMAL.replace(r#""edges""#, r#""extra":0,"edges""#)).contains("unknown field"));
        assert!(err(&MINIMAL.replace("true", "false")).contains("monitor"));
        assert!(err("{\n  \"version\": 1,\n  \"nodes\": [\n}").contains("line"));
    }

    #[test]
    fn paths_are_checked() {
        let with_paths = MINIMAL.replace("]]}", r#"]],"paths":[["m1","v","m1"]]}"#);
        let doc = TopologyDocument::parse(with_paths.as_bytes()).unwrap();
        assert_eq!(doc.paths().unwrap().len(), 1);
        let t = doc.topology().unwrap();
        assert_eq!(doc.ensemble(&t).unwrap().unwrap().len(), 1);

        let bad = MINIMAL.replace("]]}", r#"]],"paths":[["v","m1"]]}"#);
        assert!(err(&bad).contains("paths"));
    }

    #[test]
    fn path_lines() {
        let doc = TopologyDocument::parse(MINIMAL.as_bytes()).unwrap();
        let paths = doc.parse_path_lines("# comment\nm1 v m1\n\n").unwrap();
        assert_eq!(paths, vec![vec![NodeId(0), NodeId(1), NodeId(0)]]);
        assert!(matches!(doc.parse_path_lines("m1 q"), Err(CliError::Format(m)) if m.contains("line 1")));
    }
}
