//! Full identifiability analysis of a document and its JSON / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nodeloc_core::{
    msc_profile, omega_up, up_verdict, ConnectivitySummary, ModelKind, Msc, OmegaBounds, Oracle, OracleConfig,
    ProbingModel, Rationale, Verdict, VerdictValue,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::doc::TopologyDocument;
use crate::error::{usage, CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    /// Empty means CAP and CSP, plus UP when the document has paths.
    pub models: Vec<ModelKind>,
    /// Largest k tabulated; defaults to σ.
    pub k_max: Option<usize>,
    pub oracle: bool,
    /// Largest σ the oracle will enumerate.
    pub guard: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            models: Vec::new(),
            k_max: None,
            oracle: true,
            guard: OracleConfig::default().max_sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    pub config: AnalyzeOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub nodes: usize,
    pub edges: usize,
    pub monitors: Vec<String>,
    pub sigma: usize,
    pub paths: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub k: usize,
    pub verdict: VerdictValue,
    pub sufficient: bool,
    pub necessary: bool,
    pub rationale: Rationale,
    /// Brute-force k-identifiability, when the oracle ran.
    pub oracle: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityData {
    pub delta_gstar: usize,
    pub delta_gm: BTreeMap<String, usize>,
    pub delta_min: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MscData {
    pub msc: BTreeMap<String, Msc>,
    pub big_delta: Msc,
    pub unobserved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub omega: usize,
    /// First indistinguishable pair of size at most Ω + 1, when Ω < σ.
    pub counterexample: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSection {
    pub model: ModelKind,
    pub verdicts: Vec<VerdictRow>,
    pub omega: OmegaBounds,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub connectivity: Option<ConnectivityData>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub msc: Option<MscData>,
    pub oracle: Option<OracleResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub topology: TopologySummary,
    pub models: Vec<ModelSection>,
}

pub fn input_hash(doc: &TopologyDocument) -> String {
    Sha256::digest(doc.emit().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn row(k: usize, v: Verdict) -> VerdictRow {
    VerdictRow {
        k,
        verdict: v.value,
        sufficient: v.sufficient_holds,
        necessary: v.necessary_holds,
        rationale: v.rationale,
        oracle: None,
    }
}

pub fn analyze(doc: &TopologyDocument, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    let topology = doc.topology()?;
    let ensemble = doc.ensemble(&topology)?;
    let sigma = topology.sigma();
    let mut options = options.clone();
    if options.models.is_empty() {
        options.models = vec![ModelKind::Cap, ModelKind::Csp];
        if ensemble.is_some() {
            options.models.push(ModelKind::Up);
        }
    }
    let mut seen = Vec::new();
    options.models.retain(|m| {
        let fresh = !seen.contains(m);
        seen.push(*m);
        fresh
    });
    if options.models.contains(&ModelKind::Up) && ensemble.is_none() {
        return Err(usage("UP analysis needs a path set (add \"paths\" or pass --paths)"));
    }
    if options.oracle && sigma > options.guard {
        return Err(CliError::Capacity(format!(
            "brute-force oracle over {sigma} non-monitors exceeds the guard of {}; rerun with --oracle off or raise --guard",
            options.guard
        )));
    }
    let k_top = options.k_max.unwrap_or(sigma).min(sigma);
    let config = OracleConfig {
        max_sigma: options.guard,
    };
    let summary = if options.models.iter().any(|m| *m != ModelKind::Up) {
        Some(ConnectivitySummary::compute(&topology)?)
    } else {
        None
    };
    let names = |set: &nodeloc_core::FailureSet| doc.names_of(set.nodes());

    let mut sections = Vec::new();
    for &kind in &options.models {
        let (model, verdicts, omega, connectivity, msc) = match kind {
            ModelKind::Cap | ModelKind::Csp => {
                let s = summary.as_ref().expect("computed for CAP/CSP");
                let (model, verdicts, omega) = if kind == ModelKind::Cap {
                    let rows = (0..=k_top).map(|k| Ok(row(k, s.cap_verdict(k)?))).collect::<Result<Vec<_>>>()?;
                    (ProbingModel::Cap, rows, s.omega_cap()?)
                } else {
                    let rows = (0..=k_top).map(|k| Ok(row(k, s.csp_verdict(k)?))).collect::<Result<Vec<_>>>()?;
                    (ProbingModel::Csp, rows, s.omega_csp()?)
                };
                let connectivity = ConnectivityData {
                    delta_gstar: s.delta_gstar,
                    delta_gm: s.delta_gm.iter().map(|(m, d)| (doc.name(*m).to_owned(), *d)).collect(),
                    delta_min: s.delta_min,
                };
                (model, verdicts, omega, Some(connectivity), None)
            }
            ModelKind::Up => {
                let e = ensemble.clone().expect("checked above");
                let profile = msc_profile(&e)?;
                let rows = (0..=k_top)
                    .map(|k| Ok(row(k, up_verdict(&profile, k)?)))
                    .collect::<Result<Vec<_>>>()?;
                let data = MscData {
                    msc: profile.msc.iter().map(|(v, m)| (doc.name(*v).to_owned(), *m)).collect(),
                    big_delta: profile.big_delta,
                    unobserved: doc.names_of(&profile.unobserved),
                };
                (ProbingModel::Up(e), rows, omega_up(&profile), None, Some(data))
            }
        };
        let mut section = ModelSection {
            model: kind,
            verdicts,
            omega,
            connectivity,
            msc,
            oracle: None,
        };
        if options.oracle {
            let o = Oracle::new(&topology, &model, config)?;
            for r in &mut section.verdicts {
                r.oracle = Some(o.k_identifiable(r.k)?.holds());
            }
            let omega = o.omega();
            let counterexample = if omega < sigma {
                o.k_identifiable(omega + 1)?
                    .counterexample
                    .map(|(a, b)| (names(&a), names(&b)))
            } else {
                None
            };
            section.oracle = Some(OracleResult { omega, counterexample });
        }
        sections.push(section);
    }

    let report = AnalysisReport {
        provenance: Provenance {
            tool: "nodeloc".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            input_sha256: input_hash(doc),
            config: options,
        },
        topology: TopologySummary {
            nodes: topology.node_count(),
            edges: topology.graph().edge_count(),
            monitors: doc.names_of(topology.monitors()),
            sigma,
            paths: doc.paths().map(|p| p.len()),
        },
        models: sections,
    };
    check_report(&report)?;
    Ok(report)
}

/// Consistency checks run before any report is emitted.
pub fn check_report(report: &AnalysisReport) -> Result<()> {
    let fail = |model: ModelKind, msg: String| Err(CliError::Invariant(format!("{}: {msg}", model.name())));
    for s in &report.models {
        let mut settled_no = false;
        let mut left_yes = false;
        for r in &s.verdicts {
            match r.verdict {
                VerdictValue::Identifiable if left_yes => {
                    return fail(s.model, format!("k = {} IDENTIFIABLE after a weaker verdict", r.k));
                }
                VerdictValue::Identifiable => {}
                VerdictValue::NotIdentifiable => {
                    settled_no = true;
                    left_yes = true;
                }
                VerdictValue::Indeterminate if settled_no => {
                    return fail(s.model, format!("k = {} INDETERMINATE after NOT_IDENTIFIABLE", r.k));
                }
                VerdictValue::Indeterminate => left_yes = true,
            }
            if let Some(truth) = r.oracle {
                if r.sufficient && !truth {
                    return fail(s.model, format!("k = {}: sufficient condition holds, oracle disagrees", r.k));
                }
                if truth && !r.necessary {
                    return fail(s.model, format!("k = {}: oracle identifiable, necessary condition fails", r.k));
                }
            }
        }
        if s.omega.lower > s.omega.upper {
            return fail(s.model, format!("empty bounds [{}, {}]", s.omega.lower, s.omega.upper));
        }
        if let Some(o) = &s.oracle {
            if !s.omega.contains(o.omega) {
                return fail(
                    s.model,
                    format!("oracle omega {} outside [{}, {}]", o.omega, s.omega.lower, s.omega.upper),
                );
            }
        }
    }
    Ok(())
}

pub fn emit_json(report: &AnalysisReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports always serialize");
    out.push('\n');
    out
}

fn label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::from("?"),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn emit_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    let t = &report.topology;
    let _ = writeln!(out, "{} {}  input sha256 {}", p.tool, p.version, p.input_sha256);
    let models: Vec<&str> = p.config.models.iter().map(|m| m.name()).collect();
    let _ = writeln!(
        out,
        "config: models {}  k_max {}  oracle {}  guard {}",
        models.join(","),
        p.config.k_max.map_or("sigma".to_owned(), |k| k.to_string()),
        if p.config.oracle { "on" } else { "off" },
        p.config.guard
    );
    let _ = write!(
        out,
        "topology: {} nodes, {} edges, monitors {}, sigma {}",
        t.nodes,
        t.edges,
        t.monitors.join(","),
        t.sigma
    );
    if let Some(n) = t.paths {
        let _ = write!(out, ", {n} paths");
    }
    out.push('\n');

    for s in &report.models {
        let _ = writeln!(out, "\n[{}]", s.model.name());
        let _ = writeln!(
            out,
            "{:>3}  {:<18} {:<10} {:<9} {:<6} rationale",
            "k", "verdict", "sufficient", "necessary", "oracle"
        );
        for r in &s.verdicts {
            let _ = writeln!(
                out,
                "{:>3}  {:<18} {:<10} {:<9} {:<6} {}",
                r.k,
                label(&r.verdict),
                yes_no(r.sufficient),
                yes_no(r.necessary),
                r.oracle.map_or("-", yes_no),
                label(&r.rationale)
            );
        }
        let o = &s.omega;
        let _ = write!(out, "omega bounds [{}, {}]", o.lower, o.upper);
        if let Some(e) = o.exact {
            let _ = write!(out, " exact {e}");
        }
        if !o.applicable {
            let _ = write!(out, " ({})", o.guard_note);
        }
        out.push('\n');
        if let Some(c) = &s.connectivity {
            let gm: Vec<String> = c.delta_gm.iter().map(|(m, d)| format!("{m}:{d}")).collect();
            let _ = writeln!(
                out,
                "delta(G*) {}  delta(G_m) {}  delta_min {}",
                c.delta_gstar,
                gm.join(" "),
                c.delta_min
            );
        }
        if let Some(m) = &s.msc {
            let per: Vec<String> = m.msc.iter().map(|(v, c)| format!("{v}:{c}")).collect();
            let _ = writeln!(out, "msc {}  Delta {}", per.join(" "), m.big_delta);
            if !m.unobserved.is_empty() {
                let _ = writeln!(out, "unobserved {}", m.unobserved.join(","));
            }
        }
        if let Some(o) = &s.oracle {
            let _ = write!(out, "oracle omega {}", o.omega);
            if let Some((a, b)) = &o.counterexample {
                let _ = write!(out, "  confuses {{{}}} with {{{}}}", a.join(","), b.join(","));
            }
            out.push('\n');
        }
    }
    out
}

/// Reads a JSON report back and re-checks it.
pub fn parse_report(bytes: &[u8]) -> Result<AnalysisReport> {
    let report: AnalysisReport =
        serde_json::from_slice(bytes).map_err(|e| CliError::Format(format!("report: {e}")))?;
    check_report(&report)?;
    Ok(report)
}
