//! Dinic max-flow on `f64` capacities.
//!
//! Arcs are visited in insertion order, so the flow and the extracted cut are
//! reproducible for a given construction order.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    rev: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowGraph {
    adj: Vec<Vec<Arc>>,
    max_cap: f64,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        FlowGraph {
            adj: vec![Vec::new(); nodes],
            max_cap: 0.0,
        }
    }

    /// Directed arc `from -> to` with capacity `cap` and reverse capacity `rev_cap`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64, rev_cap: f64) {
        debug_assert!(cap >= 0.0 && rev_cap >= 0.0);
        if cap == 0.0 && rev_cap == 0.0 {
            return;
        }
        let fwd = self.adj[from].len();
        let bwd = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, rev: bwd, cap });
        self.adj[to].push(Arc {
            to: from,
            rev: fwd,
            cap: rev_cap,
        });
        self.max_cap = self.max_cap.max(cap).max(rev_cap);
    }

    fn eps(&self) -> f64 {
        1e-12 * self.max_cap.max(1.0)
    }

    fn levels(&self, s: usize, t: usize, eps: f64) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.adj[u] {
                if a.cap > eps && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    /// Saturates the graph and returns the total flow pushed from `s` to `t`.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let eps = self.eps();
        let mut total = 0.0;
        while let Some(level) = self.levels(s, t, eps) {
            let mut next = vec![0usize; self.adj.len()];
            // iterative blocking-flow search; `path` holds (node, arc index)
            let mut path: Vec<(usize, usize)> = Vec::new();
            let mut u = s;
            loop {
                if u == t {
                    let push = path
                        .iter()
                        .map(|&(v, i)| self.adj[v][i].cap)
                        .fold(f64::INFINITY, f64::min);
                    for &(v, i) in &path {
                        let (to, rev) = (self.adj[v][i].to, self.adj[v][i].rev);
                        self.adj[v][i].cap -= push;
                        self.adj[to][rev].cap += push;
                    }
                    total += push;
                    // resume from the first saturated arc
                    let cut = path
                        .iter()
                        .position(|&(v, i)| self.adj[v][i].cap <= eps)
                        .unwrap_or(0);
                    path.truncate(cut);
                    u = path.last().map_or(s, |&(v, i)| self.adj[v][i].to);
                    continue;
                }
                let mut advanced = false;
                while next[u] < self.adj[u].len() {
                    let a = &self.adj[u][next[u]];
                    if a.cap > eps && level[a.to] == level[u] + 1 {
                        path.push((u, next[u]));
                        u = a.to;
                        advanced = true;
                        break;
                    }
                    next[u] += 1;
                }
                if advanced {
                    continue;
                }
                // dead end: retreat
                match path.pop() {
                    Some((v, _)) => {
                        next[v] += 1;
                        u = v;
                    }
                    None => break,
                }
            }
        }
        total
    }

    /// Nodes that can still reach `t` through residual arcs after [`max_flow`].
    /// Every other node belongs to the (largest) source side of a minimum cut.
    pub fn reaches_sink(&self, t: usize) -> Vec<bool> {
        let eps = self.eps();
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for a in &self.adj[v] {
                // residual of the opposite arc a.to -> v
                let u = a.to;
                if !seen[u] && self.adj[u][a.rev].cap > eps {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}
