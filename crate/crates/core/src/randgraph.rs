//! Erdős–Rényi `G(n,m)` and Gilbert `G(n,p)` graphs, plus the connectivity,
//! odd-cycle and even-walk primitives the triviality certificate is built on.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("{m} edges requested but a simple graph on {n} vertices has at most {max}")]
    TooManyEdges { n: usize, m: usize, max: usize },
    #[error("edge probability {0} outside [0,1]")]
    BadProbability(f64),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Undirected graph without multi-edges. Self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    edge_set: HashSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

fn normalize(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            n,
            edges: Vec::new(),
            edge_set: HashSet::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut g = SimpleGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`; returns false when the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        let e = normalize(u, v);
        if !self.edge_set.insert(e) {
            return Ok(false);
        }
        self.edges.push(e);
        self.adjacency[u].push(v);
        if u != v {
            self.adjacency[v].push(u);
        }
        Ok(true)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_set.contains(&normalize(u, v))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// BFS from `root`: parent pointers (root points to itself) and depths.
    fn bfs(&self, root: usize, parent: &mut [usize], depth: &mut [usize]) {
        parent[root] = root;
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    depth[w] = depth[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    /// A BFS spanning forest as parent pointers (`parent[root] == root`).
    pub fn spanning_forest(&self) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0; self.n];
        for v in 0..self.n {
            if parent[v] == usize::MAX {
                self.bfs(v, &mut parent, &mut depth);
            }
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0; self.n];
        self.bfs(0, &mut parent, &mut depth);
        parent.iter().all(|&p| p != usize::MAX)
    }

    /// An odd closed walk `[v, …, v]` when the graph is not bipartite.
    ///
    /// Found by 2-colouring each component along a BFS tree; the first
    /// monochromatic edge `{u, w}` closes the cycle through the lowest common
    /// ancestor of `u` and `w`. A self-loop gives the walk `[v, v]`.
    pub fn odd_cycle(&self) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0; self.n];
        for root in 0..self.n {
            if parent[root] == usize::MAX {
                self.bfs(root, &mut parent, &mut depth);
            }
        }
        let &(u, w) = self.edges.iter().find(|&&(u, w)| depth[u] % 2 == depth[w] % 2)?;
        let mut left = vec![u];
        let mut right = vec![w];
        let (mut a, mut b) = (u, w);
        while depth[a] > depth[b] {
            a = parent[a];
            left.push(a);
        }
        while depth[b] > depth[a] {
            b = parent[b];
            right.push(b);
        }
        while a != b {
            a = parent[a];
            b = parent[b];
            left.push(a);
            right.push(b);
        }
        // left runs u .. lca, right runs w .. lca
        let mut walk: Vec<usize> = right.into_iter().rev().collect();
        walk.extend(left);
        Some(walk)
    }

    /// Shortest walk `x → y` of even length, if one exists.
    ///
    /// Breadth-first search over `(vertex, parity)` pairs. Such a walk exists
    /// iff `x` and `y` share a component and either that component has an
    /// odd cycle or `x` and `y` have the same colour.
    pub fn even_path(&self, x: usize, y: usize) -> Option<Vec<usize>> {
        if x >= self.n || y >= self.n {
            return None;
        }
        let idx = |v: usize, parity: usize| 2 * v + parity;
        let mut prev = vec![usize::MAX; 2 * self.n];
        let start = idx(x, 0);
        prev[start] = start;
        let mut queue = VecDeque::from([start]);
        let target = idx(y, 0);
        while let Some(s) = queue.pop_front() {
            if s == target {
                break;
            }
            let (v, parity) = (s / 2, s % 2);
            for &w in &self.adjacency[v] {
                let t = idx(w, 1 - parity);
                if prev[t] == usize::MAX {
                    prev[t] = s;
                    queue.push_back(t);
                }
            }
        }
        if prev[target] == usize::MAX {
            return None;
        }
        let mut walk = vec![y];
        let mut s = target;
        while s != start {
            s = prev[s];
            walk.push(s / 2);
        }
        walk.reverse();
        Some(walk)
    }

    /// Whether consecutive vertices of `walk` are joined by edges.
    pub fn is_walk(&self, walk: &[usize]) -> bool {
        !walk.is_empty()
            && walk.iter().all(|&v| v < self.n)
            && walk.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

/// Uniform graph on `n` vertices with exactly `m` loop-free edges.
///
/// Pairs are drawn uniformly and repeats discarded; above half density the
/// complement is sampled instead.
pub fn sample_gnm(n: usize, m: usize, seed: u64) -> Result<SimpleGraph, GraphError> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(GraphError::TooManyEdges { n, m, max });
    }
    let mut rng = rng::stream(seed);
    let complement = m > max / 2;
    let target = if complement { max - m } else { m };
    let mut chosen = HashSet::with_capacity(target);
    while chosen.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            chosen.insert(normalize(u, v));
        }
    }
    let mut g = SimpleGraph::new(n);
    if complement {
        for u in 0..n {
            for v in u + 1..n {
                if !chosen.contains(&(u, v)) {
                    g.add_edge(u, v)?;
                }
            }
        }
    } else {
        let mut edges: Vec<_> = chosen.into_iter().collect();
        edges.sort_unstable();
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// Each of the `n(n-1)/2` pairs present independently with probability `p`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<SimpleGraph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::BadProbability(p));
    }
    let mut rng = rng::stream(seed);
    let mut g = SimpleGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphProperty {
    Connected,
    OddCycle,
}

impl std::str::FromStr for GraphProperty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "connectivity" | "connected" => Ok(GraphProperty::Connected),
            "oddcycle" => Ok(GraphProperty::OddCycle),
            other => Err(format!("unknown mode `{other}` (expected connectivity|oddcycle)")),
        }
    }
}

/// Edge probability `min(1, n^{δ-1})`.
pub fn threshold_probability(n: usize, delta: f64) -> f64 {
    (n as f64).powf(delta - 1.0).min(1.0)
}

/// Fraction of `trials` samples of `G(n, n^{δ-1})` with the property.
///
/// Trial `i` uses the seed derived from `(seed, i)`, so the result does not
/// depend on how trials are scheduled across threads.
pub fn estimate_threshold(
    n: usize,
    delta: f64,
    trials: usize,
    property: GraphProperty,
    seed: u64,
) -> Result<f64, GraphError> {
    let p = threshold_probability(n, delta);
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_gnp(n, p, rng::trial_seed(seed, t as u64))?;
            Ok(match property {
                GraphProperty::Connected => g.is_connected(),
                GraphProperty::OddCycle => g.odd_cycle().is_some(),
            })
        })
        .collect::<Result<_, GraphError>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / trials.max(1) as f64)
}
