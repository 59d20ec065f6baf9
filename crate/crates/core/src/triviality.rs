//! The word-pair graph and the ℤ₄ triviality certificate.
//!
//! Vertices are the positive two-letter words `a_i a_j`. A positive relator
//! `a_i a_j a_k a_l` says `a_i a_j = (a_k a_l)^{-1}`, so it becomes an edge
//! between `(i,j)` and `(k,l)`. Along an even walk the inverses cancel and
//! the endpoints are equal words; an odd closed walk at `w` forces
//! `w = w^{-1}`. If the graph is connected and not bipartite, every
//! two-letter word is equal to every other, `a_i a_k = a_j a_k` gives
//! `a_i = a_j`, and the group is a quotient of `<g | g^4>`.

use serde::Serialize;

use crate::model::{Presentation, Relator};
use crate::randgraph::SimpleGraph;

/// Graph on ordered generator pairs with one edge per positive relator.
#[derive(Debug, Clone)]
pub struct WordPairGraph {
    n: u32,
    /// `(u, v, relator index)`; a multiset, self-loops allowed.
    edges: Vec<(usize, usize, usize)>,
    r0_count: usize,
    simple: SimpleGraph,
}

impl WordPairGraph {
    pub fn build(p: &Presentation) -> Self {
        let n = p.n();
        let vertex = |i: u32, j: u32| ((i - 1) * n + (j - 1)) as usize;
        let mut simple = SimpleGraph::new((n * n) as usize);
        let mut edges = Vec::new();
        let mut r0_count = 0;
        for (idx, r) in p.relators().iter().enumerate() {
            if !r.is_positive() {
                continue;
            }
            let g = r.letters().map(|l| l.generator());
            let u = vertex(g[0], g[1]);
            let v = vertex(g[2], g[3]);
            if u == v {
                r0_count += 1;
            }
            edges.push((u, v, idx));
            simple.add_edge(u, v).expect("vertex in range");
        }
        WordPairGraph { n, edges, r0_count, simple }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        (self.n * self.n) as usize
    }

    /// The pair `(i, j)` a vertex stands for.
    pub fn pair(&self, vertex: usize) -> (u32, u32) {
        let v = vertex as u32;
        (v / self.n + 1, v % self.n + 1)
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    /// Relators of the form `a_i a_j a_i a_j`.
    pub fn r0_count(&self) -> usize {
        self.r0_count
    }

    /// The underlying graph with parallel edges merged.
    pub fn graph(&self) -> &SimpleGraph {
        &self.simple
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrivialityStatus {
    Certified,
    Unknown,
}

/// Spanning tree plus an odd closed walk in the word-pair graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialityCertificate {
    /// Tree edges `(child, parent)`; one per non-root vertex.
    pub tree: Vec<(usize, usize)>,
    /// Closed walk of odd length, first vertex repeated at the end.
    pub odd_walk: Vec<usize>,
}

impl TrivialityCertificate {
    /// Replays the certificate against the graph it claims to describe.
    pub fn verify(&self, graph: &WordPairGraph) -> bool {
        let g = graph.graph();
        let n = g.vertex_count();
        if self.tree.len() + 1 != n || !self.tree.iter().all(|&(c, p)| g.has_edge(c, p)) {
            return false;
        }
        // Tree edges must connect everything: union-find over them.
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &(c, p) in &self.tree {
            let (a, b) = (find(&mut root, c), find(&mut root, p));
            if a == b {
                return false;
            }
            root[a] = b;
        }
        let walk = &self.odd_walk;
        g.is_walk(walk) && walk.first() == walk.last() && (walk.len() - 1) % 2 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialityVerdict {
    pub status: TrivialityStatus,
    pub certificate: Option<TrivialityCertificate>,
}

impl TrivialityVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == TrivialityStatus::Certified
    }
}

/// Certifies that the group is a quotient of ℤ₄ whenever the word-pair
/// graph is connected and not bipartite; otherwise reports `Unknown`.
///
/// All positive relators contribute, including `a_i a_j a_i a_j` as
/// self-loops. Non-positive relators are ignored.
pub fn detect_trivial(p: &Presentation) -> TrivialityVerdict {
    detect_trivial_in(&WordPairGraph::build(p))
}

pub fn detect_trivial_in(wpg: &WordPairGraph) -> TrivialityVerdict {
    let unknown = TrivialityVerdict { status: TrivialityStatus::Unknown, certificate: None };
    let g = wpg.graph();
    if !g.is_connected() {
        return unknown;
    }
    let Some(odd_walk) = g.odd_cycle() else {
        return unknown;
    };
    let tree = g
        .spanning_forest()
        .into_iter()
        .enumerate()
        .filter(|&(v, p)| v != p)
        .collect();
    TrivialityVerdict {
        status: TrivialityStatus::Certified,
        certificate: Some(TrivialityCertificate { tree, odd_walk }),
    }
}

/// The relators along a walk, for reporting.
pub fn walk_relators(wpg: &WordPairGraph, p: &Presentation, walk: &[usize]) -> Vec<Relator> {
    walk.windows(2)
        .filter_map(|w| {
            wpg.edges
                .iter()
                .find(|&&(u, v, _)| (u, v) == (w[0], w[1]) || (v, u) == (w[0], w[1]))
                .map(|&(_, _, idx)| p.relators()[idx])
        })
        .collect()
}
