//! Small Dinic max-flow used by the vertex-cut and disjoint-path routines.

use std::collections::VecDeque;

pub(crate) const INF: u32 = u32::MAX / 4;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
    orig: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            iter: vec![0; nodes],
        }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap, orig: cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            orig: 0,
        });
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, u: usize, sink: usize, pushed: u32) -> u32 {
        if u == sink {
            return pushed;
        }
        while self.iter[u] < self.out[u].len() {
            let a = self.out[u][self.iter[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, sink, pushed.min(cap));
                if got > 0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    /// Maximum flow value, stopping early once `limit` is reached.
    pub(crate) fn max_flow(&mut self, source: usize, sink: usize, limit: u32) -> u32 {
        let mut total = 0;
        while total < limit && self.bfs(source, sink) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let got = self.dfs(source, sink, limit - total);
                if got == 0 {
                    break;
                }
                total += got;
                if total >= limit {
                    break;
                }
            }
        }
        total
    }

    /// Heads of arcs leaving `u` that currently carry positive flow.
    pub(crate) fn flow_successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[u].iter().filter_map(move |&a| {
            let arc = &self.arcs[a];
            (arc.orig > 0 && arc.cap < arc.orig).then_some(arc.to)
        })
    }
}
