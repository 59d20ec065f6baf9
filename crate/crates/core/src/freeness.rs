//! Freeness by repeated HNN splitting along embedded-tree hypergraphs.
//!
//! Cutting the presentation complex along an embedded tree removes its
//! dual one-cells and carrier squares and splits off a free ℤ factor.
//! When every hypergraph is an embedded tree, every hypergraph of what
//! remains is one too, so the cuts continue until only loops are left.

use rand::Rng;
use serde::Serialize;

use crate::complex::{
    build_presentation_complex, carrier, hypergraphs, is_embedded_tree, Hypergraph, HypergraphGraph, TreeWitness,
};
use crate::model::Presentation;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Edgeful component with the smallest id.
    SmallestId,
    /// Uniformly random edgeful component.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalStep {
    pub hypergraph: Hypergraph,
    pub one_cells: Vec<usize>,
    pub two_cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessCertificate {
    pub removals: Vec<RemovalStep>,
    pub leftover_loops: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotCertified {
    /// Id of the offending hypergraph in the presentation complex.
    pub hypergraph: usize,
    pub witness: TreeWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FreenessVerdict {
    Certified(FreenessCertificate),
    NotCertified(NotCertified),
}

impl FreenessVerdict {
    pub fn rank(&self) -> Option<usize> {
        match self {
            FreenessVerdict::Certified(c) => Some(c.rank),
            FreenessVerdict::NotCertified(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&FreenessCertificate> {
        match self {
            FreenessVerdict::Certified(c) => Some(c),
            FreenessVerdict::NotCertified(_) => None,
        }
    }
}

pub fn detect_free(p: &Presentation) -> FreenessVerdict {
    detect_free_with(p, Selection::SmallestId)
}

pub fn detect_free_with(p: &Presentation, selection: Selection) -> FreenessVerdict {
    let x = build_presentation_complex(p);
    let mut one_alive = vec![true; x.one_cells().len()];
    let mut two_alive = vec![true; x.two_cells().len()];

    let gamma = HypergraphGraph::build(&x);
    for h in hypergraphs(&gamma) {
        if let Err(witness) = is_embedded_tree(&h, &gamma) {
            return FreenessVerdict::NotCertified(NotCertified { hypergraph: h.id, witness });
        }
    }

    let mut stream = match selection {
        Selection::Random(seed) => Some(rng::stream(seed)),
        Selection::SmallestId => None,
    };
    let mut removals = Vec::new();
    loop {
        let gamma = HypergraphGraph::build_masked(&x, &one_alive, &two_alive);
        let edgeful: Vec<Hypergraph> = hypergraphs(&gamma).into_iter().filter(Hypergraph::is_edgeful).collect();
        if edgeful.is_empty() {
            break;
        }
        let pick = match stream.as_mut() {
            Some(s) => s.gen_range(0..edgeful.len()),
            None => 0,
        };
        let h = edgeful.into_iter().nth(pick).expect("index in range");
        assert!(is_embedded_tree(&h, &gamma).is_ok(), "embedded trees persist under removal");
        let squares: Vec<usize> = carrier(&h, &gamma).into_iter().collect();
        for &v in &h.vertices {
            one_alive[v] = false;
        }
        for &c in &squares {
            two_alive[c] = false;
        }
        removals.push(RemovalStep { one_cells: h.vertices.clone(), two_cells: squares, hypergraph: h });
    }
    debug_assert!(two_alive.iter().all(|&a| !a));
    let leftover_loops = one_alive.iter().filter(|&&a| a).count();
    FreenessVerdict::Certified(FreenessCertificate { rank: removals.len() + leftover_loops, removals, leftover_loops })
}

/// `rank = n - |R|`, forced by Euler characteristic: each cut removes a
/// tree with `v` one-cells and `v - 1` squares.
pub fn certified_rank_identity(cert: &FreenessCertificate, p: &Presentation) -> bool {
    cert.rank as i64 == p.n() as i64 - p.relators().len() as i64
}
