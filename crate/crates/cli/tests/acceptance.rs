//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nodeloc::generate::{generate_paths, generate_topology, GraphModel, MonitorRule, TopologySpec};
use nodeloc::{analyze, emit_json, emit_text, AnalyzeOptions, TopologyDocument};
use nodeloc_core::oracle::{exhaustive_component_condition, simulate_measurements, MonitorRemoval};
use nodeloc_core::{
    build_gm, build_gstar, is_k_connected, msc_profile, omega_up, up_verdict, vertex_connectivity,
    ConnectivitySummary, FailureSet, Graph, Msc, NodeId, Oracle, OracleConfig, PathEnsemble, ProbingModel, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SIZE: usize = 320;
const UP_CORPUS_SIZE: usize = 320;
const CONFIG: OracleConfig = OracleConfig { max_sigma: 7 };

struct Instance {
    doc: TopologyDocument,
    topology: Topology,
}

struct UpInstance {
    topology: Topology,
    ensemble: PathEnsemble,
}

fn random_spec(rng: &mut ChaCha8Rng, seed: u64, min_monitors: usize) -> TopologySpec {
    let n = rng.random_range(4..=8usize);
    let monitors = rng.random_range(min_monitors..=3usize.min(n - 1));
    let model = match rng.random_range(0..10) {
        0 => GraphModel::Grid { width: 2, height: n / 2 },
        1 | 2 => GraphModel::BarabasiAlbert { n, m0: rng.random_range(1..=2) },
        _ => GraphModel::ErdosRenyi { n, p: rng.random_range(0.25..0.85) },
    };
    TopologySpec {
        model,
        monitors: MonitorRule::Count(monitors),
        seed,
    }
}

fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..CORPUS_SIZE)
        .map(|i| {
            let doc = generate_topology(&random_spec(&mut rng, 1_000 + i as u64, 1)).expect("valid spec");
            let topology = doc.topology().expect("generated documents are valid");
            Instance { doc, topology }
        })
        .collect()
}

fn up_corpus() -> Vec<UpInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_602);
    (0..UP_CORPUS_SIZE)
        .map(|i| {
            let doc = generate_topology(&random_spec(&mut rng, 50_000 + i as u64, 2)).expect("valid spec");
            let per_pair = rng.random_range(1..=3);
            let (doc, _) = generate_paths(&doc, per_pair).expect("two monitors");
            let topology = doc.topology().unwrap();
            let ensemble = doc.ensemble(&topology).unwrap().unwrap();
            UpInstance { topology, ensemble }
        })
        .collect()
}

struct Outcome {
    violations: Vec<String>,
    checks: usize,
    /// Oracle verdicts seen: (identifiable, not identifiable).
    tally: (usize, usize),
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            violations: Vec::new(),
            checks: 0,
            tally: (0, 0),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    fn count(&mut self, identifiable: bool) {
        if identifiable {
            self.tally.0 += 1;
        } else {
            self.tally.1 += 1;
        }
    }
}

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
}

fn report(c: &Criterion, outcome: &Outcome, elapsed: Duration, detail: &str) -> bool {
    let in_time = c.limit.is_none_or(|l| elapsed <= l);
    let pass = outcome.violations.is_empty() && in_time;
    let detail = if outcome.tally == (0, 0) {
        detail.to_owned()
    } else {
        format!("oracle yes/no {}/{}{detail}", outcome.tally.0, outcome.tally.1)
    };
    let limit = c.limit.map_or(String::new(), |l| format!(" (limit {} s)", l.as_secs()));
    println!(
        "criterion {} {:<38} {}  violations {}  checks {}  {}  {:.2} s{}",
        c.id,
        c.title,
        if pass { "PASS" } else { "FAIL" },
        outcome.violations.len(),
        outcome.checks,
        detail,
        elapsed.as_secs_f64(),
        limit
    );
    for v in outcome.violations.iter().take(5) {
        println!("    {v}");
    }
    pass
}

fn sandwich(corpus: &[Instance], csp: bool) -> Outcome {
    let mut out = Outcome::new();
    for (i, inst) in corpus.iter().enumerate() {
        let t = &inst.topology;
        let summary = ConnectivitySummary::compute(t).unwrap();
        let model = if csp { ProbingModel::Csp } else { ProbingModel::Cap };
        let o = Oracle::new(t, &model, CONFIG).unwrap();
        for k in 0..=t.sigma() {
            let v = if csp { summary.csp_verdict(k) } else { summary.cap_verdict(k) }.unwrap();
            let truth = o.k_identifiable(k).unwrap().holds();
            out.count(truth);
            out.check(!v.sufficient_holds || truth, || format!("instance {i}, k={k}: sufficient but not identifiable"));
            out.check(!truth || v.necessary_holds, || format!("instance {i}, k={k}: identifiable but necessary fails"));
        }
    }
    out
}

fn up_sandwich(corpus: &[UpInstance]) -> Outcome {
    let mut out = Outcome::new();
    for (i, inst) in corpus.iter().enumerate() {
        let profile = msc_profile(&inst.ensemble).unwrap();
        let model = ProbingModel::Up(inst.ensemble.clone());
        let o = Oracle::new(&inst.topology, &model, CONFIG).unwrap();
        for k in 0..=inst.topology.sigma() {
            let v = up_verdict(&profile, k).unwrap();
            let truth = o.k_identifiable(k).unwrap().holds();
            out.count(truth);
            out.check(!v.sufficient_holds || truth, || format!("UP instance {i}, k={k}: sufficient but not identifiable"));
            out.check(!truth || v.necessary_holds, || format!("UP instance {i}, k={k}: identifiable but necessary fails"));
        }
    }
    out
}

fn connectivity_equivalences(corpus: &[Instance]) -> Outcome {
    let mut out = Outcome::new();
    for (i, inst) in corpus.iter().enumerate() {
        let t = &inst.topology;
        let gstar = build_gstar(t).unwrap();
        for s in 0..t.sigma() {
            let raw = exhaustive_component_condition(t, s, MonitorRemoval::None, CONFIG).unwrap();
            out.check(raw == is_k_connected(&gstar, s + 1).unwrap(), || format!("instance {i}, G*, s={s}"));
        }
        for &m in t.monitors() {
            let gm = build_gm(t, m).unwrap();
            for s in 0..t.sigma() {
                let raw = exhaustive_component_condition(t, s, MonitorRemoval::Exactly(m), CONFIG).unwrap();
                out.check(raw == is_k_connected(&gm, s + 1).unwrap(), || format!("instance {i}, G_m m={m}, s={s}"));
            }
        }
    }
    out
}

fn extreme_k_tests(corpus: &[Instance]) -> Outcome {
    let mut out = Outcome::new();
    for (i, inst) in corpus.iter().enumerate() {
        let t = &inst.topology;
        let sigma = t.sigma();
        let s = ConnectivitySummary::compute(t).unwrap();
        let cap = Oracle::new(t, &ProbingModel::Cap, CONFIG).unwrap();
        let csp = Oracle::new(t, &ProbingModel::Csp, CONFIG).unwrap();
        out.check(
            cap.k_identifiable(sigma).unwrap().holds() == s.all_monitor_adjacent(),
            || format!("instance {i}: CAP sigma-identifiability"),
        );
        out.check(
            csp.k_identifiable(sigma).unwrap().holds() == s.all_two_monitor_adjacent(),
            || format!("instance {i}: CSP sigma-identifiability"),
        );
        out.check(
            csp.k_identifiable(sigma - 1).unwrap().holds() == s.csp_sigma_minus_one_exact(),
            || format!("instance {i}: CSP (sigma-1)-identifiability"),
        );
    }
    out
}

fn omega_sandwiches(corpus: &[Instance], up: &[UpInstance]) -> (Outcome, usize) {
    let mut out = Outcome::new();
    let mut guarded = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let t = &inst.topology;
        let s = ConnectivitySummary::compute(t).unwrap();
        for (name, model, bounds) in [
            ("CAP", ProbingModel::Cap, s.omega_cap().unwrap()),
            ("CSP", ProbingModel::Csp, s.omega_csp().unwrap()),
        ] {
            let omega = Oracle::new(t, &model, CONFIG).unwrap().omega();
            if bounds.applicable {
                guarded += 1;
                out.check(bounds.upper - bounds.lower <= 1, || format!("instance {i} {name}: width > 1"));
            }
            out.check(bounds.contains(omega), || {
                format!("instance {i} {name}: omega {omega} outside [{}, {}]", bounds.lower, bounds.upper)
            });
        }
    }
    for (i, inst) in up.iter().enumerate() {
        let profile = msc_profile(&inst.ensemble).unwrap();
        let bounds = omega_up(&profile);
        let model = ProbingModel::Up(inst.ensemble.clone());
        let omega = Oracle::new(&inst.topology, &model, CONFIG).unwrap().omega();
        out.check(bounds.contains(omega), || format!("UP instance {i}: omega {omega} outside bounds"));
        if let Msc::Finite(d) = profile.big_delta {
            out.check(d.saturating_sub(1) <= omega && omega <= d, || format!("UP instance {i}: Delta {d} vs {omega}"));
        }
    }
    (out, guarded)
}

fn brute_connectivity(g: &Graph) -> usize {
    let n = g.node_count();
    if g.is_complete() {
        return n - 1;
    }
    (0u32..1 << n)
        .filter(|&mask| {
            let kept: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            if kept.len() < 2 {
                return false;
            }
            let mut seen = vec![false; n];
            let mut stack = vec![kept[0]];
            seen[kept[0]] = true;
            while let Some(u) = stack.pop() {
                for w in g.adjacent(NodeId(u)) {
                    if mask >> w.0 & 1 == 0 && !seen[w.0] {
                        seen[w.0] = true;
                        stack.push(w.0);
                    }
                }
            }
            kept.iter().any(|&v| !seen[v])
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .expect("a non-complete graph has a separating set")
}

fn brute_msc(e: &PathEnsemble, v: NodeId) -> Msc {
    let Some(target) = e.incidence(v).filter(|t| !t.is_empty()) else {
        return Msc::Finite(0);
    };
    let others: Vec<NodeId> = e.non_monitors().iter().copied().filter(|&w| w != v).collect();
    (0u32..1 << others.len())
        .filter(|mask| {
            target.iter().all(|p| {
                (0..others.len())
                    .any(|j| mask >> j & 1 == 1 && e.incidence(others[j]).is_some_and(|s| s.contains(p)))
            })
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .map_or(Msc::Infinite, Msc::Finite)
}

fn connectivity_and_msc(corpus: &[Instance], up: &[UpInstance]) -> (Outcome, usize, usize) {
    let mut out = Outcome::new();
    let (mut graphs, mut ensembles) = (0, 0);
    for (i, inst) in corpus.iter().enumerate() {
        let t = &inst.topology;
        let mut all = vec![t.graph().clone(), build_gstar(t).unwrap().graph().clone()];
        all.extend(t.monitors().iter().map(|&m| build_gm(t, m).unwrap().graph().clone()));
        for g in all.iter().filter(|g| g.node_count() >= 2 && g.node_count() <= 8) {
            graphs += 1;
            let (got, want) = (vertex_connectivity(g).unwrap(), brute_connectivity(g));
            out.check(got == want, || format!("instance {i}: connectivity {got} vs exhaustive {want}"));
        }
    }
    for (i, inst) in up.iter().enumerate().filter(|(_, u)| u.topology.sigma() <= 6) {
        ensembles += 1;
        let profile = msc_profile(&inst.ensemble).unwrap();
        for &v in inst.ensemble.non_monitors() {
            let want = brute_msc(&inst.ensemble, v);
            out.check(profile.msc[&v] == want, || format!("UP instance {i} {v}: msc {} vs {want}", profile.msc[&v]));
        }
    }
    (out, graphs, ensembles)
}

fn subsets_up_to(items: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    (0u32..1 << items.len())
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..items.len()).filter(|j| m >> j & 1 == 1).map(|j| items[j]).collect())
        .collect()
}

fn localization(corpus: &[Instance], up: &[UpInstance]) -> Outcome {
    let mut out = Outcome::new();
    let mut run = |label: String, t: &Topology, model: ProbingModel| {
        let o = Oracle::new(t, &model, CONFIG).unwrap();
        let omega = o.omega();
        for truth in subsets_up_to(t.non_monitors(), omega) {
            let truth = FailureSet::new(t, truth).unwrap();
            let obs = simulate_measurements(t, &model, &truth).unwrap();
            let found = o.localize(&obs, omega).unwrap();
            out.check(found == [truth.clone()], || format!("{label}: truth {:?} gave {found:?}", truth.nodes()));
        }
    };
    for (i, inst) in corpus.iter().enumerate() {
        run(format!("instance {i} CAP"), &inst.topology, ProbingModel::Cap);
        run(format!("instance {i} CSP"), &inst.topology, ProbingModel::Csp);
    }
    for (i, inst) in up.iter().enumerate() {
        run(format!("UP instance {i}"), &inst.topology, ProbingModel::Up(inst.ensemble.clone()));
    }
    out
}

fn determinism(corpus: &[Instance]) -> Outcome {
    let mut out = Outcome::new();
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests");
    for name in ["path", "cycle", "one_hop", "two_path"] {
        let doc = TopologyDocument::parse(&fs::read(base.join("fixtures").join(format!("{name}.json"))).unwrap()).unwrap();
        let first = analyze(&doc, &AnalyzeOptions::default()).unwrap();
        let second = analyze(&doc, &AnalyzeOptions::default()).unwrap();
        out.check(emit_json(&first) == emit_json(&second), || format!("{name}: repeated JSON differs"));
        out.check(emit_text(&first) == emit_text(&second), || format!("{name}: repeated text differs"));
        let golden = fs::read_to_string(base.join("golden").join(format!("{name}.json"))).unwrap();
        out.check(emit_json(&first) == golden, || format!("{name}: JSON golden mismatch"));
        let golden = fs::read_to_string(base.join("golden").join(format!("{name}.txt"))).unwrap();
        out.check(emit_text(&first) == golden, || format!("{name}: text golden mismatch"));
    }
    for (i, inst) in corpus.iter().enumerate().step_by(16) {
        let a = emit_json(&analyze(&inst.doc, &AnalyzeOptions::default()).unwrap());
        let b = emit_json(&analyze(&inst.doc, &AnalyzeOptions::default()).unwrap());
        out.check(a == b, || format!("instance {i}: repeated analysis differs"));
    }
    out
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn main() {
    let corpus = corpus();
    let up = up_corpus();
    let paths: usize = up.iter().map(|u| u.ensemble.len()).sum();
    println!(
        "acceptance corpus: {} topologies (4-8 nodes, 1-3 monitors), {} UP instances ({} paths)",
        corpus.len(),
        up.len(),
        paths
    );
    let secs = |s| Some(Duration::from_secs(s));
    let mut all = true;

    let (o, t) = timed(|| sandwich(&corpus, false));
    all &= report(&Criterion { id: 1, title: "CAP verdicts sandwich the oracle", limit: secs(60) }, &o, t, "");
    let (o, t) = timed(|| sandwich(&corpus, true));
    all &= report(&Criterion { id: 2, title: "CSP verdicts sandwich the oracle", limit: secs(120) }, &o, t, "");
    let (o, t) = timed(|| up_sandwich(&up));
    all &= report(&Criterion { id: 3, title: "UP verdicts sandwich the oracle", limit: secs(60) }, &o, t, "");
    let (o, t) = timed(|| connectivity_equivalences(&corpus));
    all &= report(&Criterion { id: 4, title: "G*/G_m connectivity equivalences", limit: None }, &o, t, "");
    let (o, t) = timed(|| extreme_k_tests(&corpus));
    all &= report(&Criterion { id: 5, title: "exact tests at k = sigma, sigma - 1", limit: None }, &o, t, "");
    let ((o, guarded), t) = timed(|| omega_sandwiches(&corpus, &up));
    let detail = format!("guarded bounds {guarded}");
    all &= report(&Criterion { id: 6, title: "omega bounds contain the oracle", limit: None }, &o, t, &detail);
    let ((o, graphs, ensembles), t) = timed(|| connectivity_and_msc(&corpus, &up));
    let detail = format!("graphs {graphs} ensembles {ensembles}");
    all &= report(&Criterion { id: 7, title: "connectivity and MSC vs exhaustive", limit: None }, &o, t, &detail);
    let (o, t) = timed(|| localization(&corpus, &up));
    all &= report(&Criterion { id: 8, title: "simulate -> localize round trip", limit: None }, &o, t, "");
    let (o, t) = timed(|| determinism(&corpus));
    all &= report(&Criterion { id: 9, title: "deterministic reports and goldens", limit: None }, &o, t, "");

    if !all {
        println!("acceptance: FAILED");
        std::process::exit(1);
    }
    println!("acceptance: all 9 criteria passed");
}
