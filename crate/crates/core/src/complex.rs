//! Square complexes, the dual graph Γ of hypergraphs, and embedded trees.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::model::Presentation;

/// One side of a square: a one-cell traversed forwards or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Side {
    pub cell: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareComplex {
    vertex_count: usize,
    one_cells: Vec<(usize, usize)>,
    two_cells: Vec<[Side; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("one-cell {cell} endpoint out of range")]
    BadEndpoint { cell: usize },
    #[error("two-cell {cell} references missing one-cell")]
    BadSide { cell: usize },
}

impl SquareComplex {
    pub fn new(
        vertex_count: usize,
        one_cells: Vec<(usize, usize)>,
        two_cells: Vec<[Side; 4]>,
    ) -> Result<Self, ComplexError> {
        for (cell, &(a, b)) in one_cells.iter().enumerate() {
            if a >= vertex_count || b >= vertex_count {
                return Err(ComplexError::BadEndpoint { cell });
            }
        }
        for (cell, sides) in two_cells.iter().enumerate() {
            if sides.iter().any(|s| s.cell >= one_cells.len()) {
                return Err(ComplexError::BadSide { cell });
            }
        }
        Ok(SquareComplex { vertex_count, one_cells, two_cells })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn one_cells(&self) -> &[(usize, usize)] {
        &self.one_cells
    }

    pub fn two_cells(&self) -> &[[Side; 4]] {
        &self.two_cells
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.one_cells.len() as i64 + self.two_cells.len() as i64
    }
}

/// Bouquet of `n` loops with one square per relator; one-cell `g - 1`
/// is generator `a_g`.
pub fn build_presentation_complex(p: &Presentation) -> SquareComplex {
    let n = p.n() as usize;
    let two_cells = p
        .relators()
        .iter()
        .map(|r| {
            r.letters().map(|l| Side { cell: l.generator() as usize - 1, forward: l.is_positive() })
        })
        .collect();
    SquareComplex { vertex_count: 1, one_cells: vec![(0, 0); n], two_cells }
}

/// An edge of Γ: the midline of square `two_cell` joining opposite sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualEdge {
    pub u: usize,
    pub v: usize,
    pub two_cell: usize,
    /// 0 joins sides 1 and 3, 1 joins sides 2 and 4.
    pub pair: u8,
}

/// The dual graph Γ restricted to the live one-cells and two-cells.
#[derive(Debug, Clone)]
pub struct HypergraphGraph {
    alive: Vec<bool>,
    edges: Vec<DualEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl HypergraphGraph {
    pub fn build(x: &SquareComplex) -> Self {
        let ones = vec![true; x.one_cells.len()];
        let twos = vec![true; x.two_cells.len()];
        Self::build_masked(x, &ones, &twos)
    }

    /// Γ of the subcomplex spanned by the flagged cells. A live square
    /// must not use a dead one-cell.
    pub fn build_masked(x: &SquareComplex, one_alive: &[bool], two_alive: &[bool]) -> Self {
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); x.one_cells.len()];
        for (c, sides) in x.two_cells.iter().enumerate() {
            if !two_alive[c] {
                continue;
            }
            for pair in 0..2u8 {
                let (u, v) = (sides[pair as usize].cell, sides[pair as usize + 2].cell);
                assert!(one_alive[u] && one_alive[v], "live square on removed one-cell");
                let id = edges.len();
                edges.push(DualEdge { u, v, two_cell: c, pair });
                adjacency[u].push(id);
                if v != u {
                    adjacency[v].push(id);
                }
            }
        }
        HypergraphGraph { alive: one_alive.to_vec(), edges, adjacency }
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    /// Loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v]
            .iter()
            .map(|&e| if self.edges[e].u == self.edges[e].v { 2 } else { 1 })
            .sum()
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let edge = self.edges[e];
        if edge.u == v {
            edge.v
        } else {
            edge.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypergraph {
    pub id: usize,
    /// Sorted one-cell ids.
    pub vertices: Vec<usize>,
    /// Indices into the edges of Γ.
    pub edges: Vec<usize>,
}

impl Hypergraph {
    pub fn is_edgeful(&self) -> bool {
        !self.edges.is_empty()
    }
}

/// Connected components of Γ, isolated vertices included, numbered by
/// their smallest one-cell.
pub fn hypergraphs(gamma: &HypergraphGraph) -> Vec<Hypergraph> {
    let mut seen = vec![false; gamma.alive.len()];
    let mut out = Vec::new();
    for start in gamma.live_vertices() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut vertices = vec![start];
        let mut edges = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &gamma.adjacency[v] {
                edges.insert(e);
                let w = gamma.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    vertices.push(w);
                    queue.push_back(w);
                }
            }
        }
        vertices.sort_unstable();
        out.push(Hypergraph { id: out.len(), vertices, edges: edges.into_iter().collect() });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeWitness {
    /// Edges of Γ forming a closed circuit (a loop, a parallel pair, or a cycle).
    Cycle(Vec<usize>),
    /// A square crossed by two edges of the hypergraph.
    TwoCell(usize),
}

impl std::fmt::Display for TreeWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeWitness::Cycle(edges) => {
                let list: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
                write!(f, "cycle[{}]", list.join(","))
            }
            TreeWitness::TwoCell(c) => write!(f, "two-cell[{c}]"),
        }
    }
}

/// Acyclic as a multigraph and injective into two-cells.
pub fn is_embedded_tree(h: &Hypergraph, gamma: &HypergraphGraph) -> Result<(), TreeWitness> {
    if let Some(c) = find_cycle(h, gamma) {
        return Err(TreeWitness::Cycle(c));
    }
    let mut seen = HashMap::new();
    for &e in &h.edges {
        if seen.insert(gamma.edges[e].two_cell, e).is_some() {
            return Err(TreeWitness::TwoCell(gamma.edges[e].two_cell));
        }
    }
    Ok(())
}

pub fn is_tree(h: &Hypergraph, gamma: &HypergraphGraph) -> bool {
    find_cycle(h, gamma).is_none()
}

fn find_cycle(h: &Hypergraph, gamma: &HypergraphGraph) -> Option<Vec<usize>> {
    // Build a spanning tree edge by edge; the first edge closing a loop
    // yields the circuit tree-path + edge.
    let index: HashMap<usize, usize> = h.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..h.vertices.len()).collect();
    let mut tree_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); h.vertices.len()];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in &h.edges {
        let (u, v) = (index[&gamma.edges[e].u], index[&gamma.edges[e].v]);
        if u == v {
            return Some(vec![e]);
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            let mut path = tree_path(&tree_adj, u, v);
            path.push(e);
            return Some(path);
        }
        parent[a] = b;
        tree_adj[u].push((v, e));
        tree_adj[v].push((u, e));
    }
    None
}

fn tree_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut via = vec![None; adj.len()];
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(y, e) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = to;
    while let Some((prev, e)) = via[x] {
        path.push(e);
        x = prev;
    }
    path.reverse();
    path
}

pub fn carrier(h: &Hypergraph, gamma: &HypergraphGraph) -> BTreeSet<usize> {
    h.edges.iter().map(|&e| gamma.edges[e].two_cell).collect()
}

/// Generators whose letters appear exactly once across all relators.
pub fn generators_occurring_once(p: &Presentation) -> Vec<u32> {
    let counts = occurrence_counts(p);
    (1..=p.n()).filter(|&g| counts[g as usize - 1] == 1).collect()
}

/// Occurrences of each generator, either sign, indexed from zero.
pub fn occurrence_counts(p: &Presentation) -> Vec<usize> {
    let mut counts = vec![0usize; p.n() as usize];
    for r in p.relators() {
        for l in r.letters() {
            counts[l.generator() as usize - 1] += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypergraphStats {
    pub components: usize,
    pub trees: usize,
    pub embedded: usize,
    pub leaves: usize,
}

impl HypergraphStats {
    pub fn all_embedded(&self) -> bool {
        self.embedded == self.components
    }
}

pub fn hypergraph_stats(p: &Presentation) -> HypergraphStats {
    let x = build_presentation_complex(p);
    let gamma = HypergraphGraph::build(&x);
    let hs = hypergraphs(&gamma);
    let trees = hs.iter().filter(|h| is_tree(h, &gamma)).count();
    let embedded = hs.iter().filter(|h| is_embedded_tree(h, &gamma).is_ok()).count();
    let leaves = gamma.live_vertices().filter(|&v| gamma.degree(v) == 1).count();
    HypergraphStats { components: hs.len(), trees, embedded, leaves }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Density, Model, Relator};

    fn pres(n: u32, rels: &[[i32; 4]]) -> Presentation {
        Presentation::new(
            Model::Square,
            n,
            Density::parse("0.2").unwrap(),
            0,
            rels.iter().map(|&r| Relator::from_signed(r)).collect(),
        )
        .unwrap()
    }

    fn gamma(p: &Presentation) -> HypergraphGraph {
        HypergraphGraph::build(&build_presentation_complex(p))
    }

    #[test]
    fn presentation_complex_shape() {
        let x = build_presentation_complex(&pres(2, &[[1, 2, 1, 2]]));
        assert_eq!((x.vertex_count(), x.one_cells().len(), x.two_cells().len()), (1, 2, 1));
        let x = build_presentation_complex(&pres(3, &[]));
        assert_eq!((x.one_cells().len(), x.two_cells().len()), (3, 0));
        let x = build_presentation_complex(&pres(4, &[[1, 2, 3, 4]]));
        let cells: Vec<usize> = x.two_cells()[0].iter().map(|s| s.cell).collect();
        assert_eq!(cells, vec![0, 1, 2, 3]);
        let x = build_presentation_complex(&pres(2, &[[1, -2, 1, -2]]));
        assert!(!x.two_cells()[0][1].forward);
    }

    #[test]
    fn dual_edges() {
        let g = gamma(&pres(4, &[[1, 2, 3, 4]]));
        let pairs: Vec<(usize, usize, u8)> = g.edges().iter().map(|e| (e.u, e.v, e.pair)).collect();
        assert_eq!(pairs, vec![(0, 2, 0), (1, 3, 1)]);
        let g = gamma(&pres(2, &[[1, 2, 1, 2]]));
        assert!(g.edges().iter().all(|e| e.u == e.v));
        let g = gamma(&pres(3, &[[1, 2, 1, 3]]));
        let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 2)]);
    }

    #[test]
    fn components() {
        let g = gamma(&pres(4, &[[1, 2, 3, 4]]));
        let hs = hypergraphs(&g);
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].vertices, vec![0, 2]);
        assert_eq!(hs[1].vertices, vec![1, 3]);
        assert_eq!(hypergraphs(&gamma(&pres(3, &[]))).len(), 3);
        assert_eq!(hypergraphs(&gamma(&pres(2, &[[1, 2, 1, 2]]))).len(), 2);
    }

    #[test]
    fn embedded_tree_checks() {
        let g = gamma(&pres(4, &[[1, 2, 3, 4]]));
        let hs = hypergraphs(&g);
        assert!(is_embedded_tree(&hs[0], &g).is_ok());
        assert_eq!(carrier(&hs[0], &g).into_iter().collect::<Vec<_>>(), vec![0]);

        let g = gamma(&pres(2, &[[1, 2, 1, 2]]));
        let hs = hypergraphs(&g);
        assert!(matches!(is_embedded_tree(&hs[0], &g), Err(TreeWitness::Cycle(_))));

        // a1 a2 a2 a3: midlines a1-a2 and a2-a3 share the square.
        let g = gamma(&pres(3, &[[1, 2, 2, 3]]));
        let hs = hypergraphs(&g);
        assert_eq!(hs.len(), 1);
        assert_eq!(is_embedded_tree(&hs[0], &g), Err(TreeWitness::TwoCell(0)));

        let g = gamma(&pres(5, &[]));
        let hs = hypergraphs(&g);
        assert!(is_embedded_tree(&hs[0], &g).is_ok());
        assert!(carrier(&hs[0], &g).is_empty());
    }

    #[test]
    fn parallel_edges_are_cycles() {
        let g = gamma(&pres(4, &[[1, 2, 3, 4], [1, 4, 3, 2]]));
        let hs = hypergraphs(&g);
        let h = hs.iter().find(|h| h.vertices == vec![0, 2]).unwrap();
        assert!(matches!(is_embedded_tree(h, &g), Err(TreeWitness::Cycle(c)) if c.len() == 2));
    }

    #[test]
    fn occurring_once() {
        assert_eq!(generators_occurring_once(&pres(5, &[[1, 2, 3, 4]])), vec![1, 2, 3, 4]);
        assert!(generators_occurring_once(&pres(2, &[[1, 2, 1, 2]])).is_empty());
        assert!(generators_occurring_once(&pres(3, &[[1, 1, 2, 3], [2, 3, 2, 3]])).is_empty());
    }
}
