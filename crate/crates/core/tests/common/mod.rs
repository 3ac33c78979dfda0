#![allow(dead_code)]

use nodeloc_core::{build_ensemble, NodeId, PathEnsemble, Topology};
use proptest::prelude::*;

pub fn ids(v: &[usize]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

pub fn topology(n: usize, edges: &[(usize, usize)], monitors: &[usize]) -> Topology {
    Topology::new(
        n,
        edges.iter().map(|&(u, v)| (NodeId(u), NodeId(v))),
        monitors.iter().map(|&m| NodeId(m)),
    )
    .unwrap()
}

/// Random topology with `nodes` nodes (default 4..=8) and 1..=3 monitors.
pub fn arb_topology(nodes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Topology> {
    nodes
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec(prop::bool::weighted(0.45), pairs),
                prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=3.min(n - 1)),
            )
        })
        .prop_map(|(n, bits, monitors)| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            topology(n, &edges, &monitors)
        })
}

/// Simple monitor-to-monitor paths in lexicographic order.
pub fn simple_paths(t: &Topology) -> Vec<Vec<NodeId>> {
    fn extend(t: &Topology, path: &mut Vec<NodeId>, on: &mut [bool], out: &mut Vec<Vec<NodeId>>) {
        let last = *path.last().unwrap();
        for &w in t.graph().adjacent(last) {
            if on[w.0] {
                continue;
            }
            path.push(w);
            if t.is_monitor(w) {
                if w > path[0] {
                    out.push(path.clone());
                }
            } else {
                on[w.0] = true;
                extend(t, path, on, out);
                on[w.0] = false;
            }
            path.pop();
        }
    }
    let mut out = Vec::new();
    for &m in t.monitors() {
        let mut on = vec![false; t.node_count()];
        on[m.0] = true;
        extend(t, &mut vec![m], &mut on, &mut out);
    }
    out
}

/// Topology plus a random subset of its simple monitor-to-monitor paths.
pub fn arb_up_instance() -> impl Strategy<Value = (Topology, PathEnsemble)> {
    (arb_topology(4..=7), any::<u64>()).prop_map(|(t, pick)| {
        let all = simple_paths(&t);
        let mut chosen: Vec<Vec<NodeId>> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| pick.rotate_left(*i as u32 % 64) & 3 != 0)
            .map(|(_, p)| p.clone())
            .take(12)
            .collect();
        if chosen.is_empty() {
            chosen.extend(all.into_iter().take(1));
        }
        let e = build_ensemble(&t, chosen).unwrap();
        (t, e)
    })
}

pub fn subsets(items: &[NodeId]) -> impl Iterator<Item = Vec<NodeId>> + '_ {
    (0u64..1 << items.len()).map(move |m| {
        (0..items.len())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| items[i])
            .collect()
    })
}
