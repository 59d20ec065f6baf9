//! Enumeration of small disc diagrams collared by two segments.
//!
//! All ways of gluing `F` squares into a disc with a given boundary
//! length are generated, reduced to isomorphism classes (mirror images
//! included) and filtered by the collar condition: walking around the
//! boundary, exactly two vertices `x`, `x'` meet 0 or 2 internal edges,
//! every other vertex meets exactly one, the two arcs between `x` and `x'`
//! are nonempty, the internal edges of each arc are dual to a single
//! segment, the two segments differ, and exactly two faces (the corners)
//! are crossed by both.

use std::collections::{BTreeSet, HashMap};

use super::{validate, AbstractDiagram, Face, Orientation, SignedEdge};

const L: usize = 4;

/// Slot `s` is face `s / 4`, position `s % 4`.
fn gluing_to_diagram(faces: usize, partner: &[Option<usize>]) -> AbstractDiagram {
    let mut slots = vec![SignedEdge { edge: 0, forward: true }; faces * L];
    let mut next = 1;
    for s in 0..faces * L {
        match partner[s] {
            Some(t) if t < s => {}
            Some(t) => {
                slots[s] = SignedEdge { edge: next, forward: true };
                slots[t] = SignedEdge { edge: next, forward: false };
                next += 1;
            }
            None => {
                slots[s] = SignedEdge { edge: next, forward: true };
                next += 1;
            }
        }
    }
    AbstractDiagram {
        l: L,
        faces: (0..faces)
            .map(|f| Face {
                id: f as u32,
                slots: slots[f * L..(f + 1) * L].to_vec(),
                class: f as u32,
                orient: Orientation::Pos,
                start: 0,
            })
            .collect(),
        fixed: Default::default(),
    }
}

/// Isomorphism-invariant code of the gluing pattern, mirror images
/// identified. Requires every edge to have at most two slots.
pub fn canonical_code(d: &AbstractDiagram) -> Vec<usize> {
    let s = d.structure();
    let l = d.l;
    let nf = d.faces.len();
    let partner = |f: usize, j: usize| -> Option<(usize, usize)> {
        let e = s.edge_index[&d.faces[f].slots[j].edge];
        s.edge_slots[e].iter().copied().find(|&x| x != (f, j))
    };
    let boundary = usize::MAX;
    let mut best: Option<Vec<usize>> = None;
    for f0 in 0..nf {
        for j0 in 0..l {
            for dir in [1usize, l - 1] {
                let mut idx: Vec<Option<usize>> = vec![None; nf];
                let mut off = vec![0usize; nf];
                let mut queue = std::collections::VecDeque::from([f0]);
                idx[f0] = Some(0);
                off[f0] = j0;
                let mut found = 1;
                let mut code = Vec::with_capacity(nf * l);
                while let Some(f) = queue.pop_front() {
                    for k in 0..l {
                        let j = (off[f] + dir * k) % l;
                        match partner(f, j) {
                            None => code.push(boundary),
                            Some((g, jj)) => {
                                if idx[g].is_none() {
                                    idx[g] = Some(found);
                                    off[g] = jj;
                                    found += 1;
                                    queue.push_back(g);
                                }
                                // Local index of jj in g's reading direction.
                                let local = ((jj + l - off[g]) * dir) % l;
                                code.push(idx[g].unwrap() * l + local);
                            }
                        }
                    }
                }
                if found == nf && best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
        }
    }
    best.unwrap_or_default()
}

pub fn isomorphic(a: &AbstractDiagram, b: &AbstractDiagram) -> bool {
    a.faces.len() == b.faces.len() && canonical_code(a) == canonical_code(b)
}

/// Disc diagrams of `faces` squares with `boundary` boundary edges, one
/// per isomorphism class. Faces are never glued to themselves.
pub fn enumerate_discs(faces: usize, boundary: usize) -> Vec<AbstractDiagram> {
    let slots = faces * L;
    if boundary > slots || (slots - boundary) % 2 == 1 {
        return Vec::new();
    }
    let mut partner = vec![None; slots];
    let mut assigned = vec![false; slots];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    fn rec(
        faces: usize,
        boundary_left: usize,
        partner: &mut Vec<Option<usize>>,
        assigned: &mut Vec<bool>,
        seen: &mut BTreeSet<Vec<usize>>,
        out: &mut Vec<AbstractDiagram>,
    ) {
        let Some(s) = assigned.iter().position(|&a| !a) else {
            if !is_disc_candidate(faces, partner) {
                return;
            }
            let d = gluing_to_diagram(faces, partner);
            if validate(&d).is_empty() && seen.insert(canonical_code(&d)) {
                out.push(d);
            }
            return;
        };
        let open = assigned.iter().filter(|&&a| !a).count();
        assigned[s] = true;
        if boundary_left > 0 {
            rec(faces, boundary_left - 1, partner, assigned, seen, out);
        }
        if open - 1 > boundary_left {
            for t in s + 1..assigned.len() {
                if assigned[t] || t / L == s / L {
                    continue;
                }
                assigned[t] = true;
                partner[s] = Some(t);
                partner[t] = Some(s);
                rec(faces, boundary_left, partner, assigned, seen, out);
                partner[s] = None;
                partner[t] = None;
                assigned[t] = false;
            }
        }
        assigned[s] = false;
    }
    rec(faces, boundary, &mut partner, &mut assigned, &mut seen, &mut out);
    out
}

/// Connected with Euler characteristic 1, computed on the raw gluing.
fn is_disc_candidate(faces: usize, partner: &[Option<usize>]) -> bool {
    let slots = faces * L;
    // Node 2s is where slot s starts, 2s + 1 where it ends.
    let mut uf: Vec<usize> = (0..2 * slots).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let union = |uf: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(uf, a), find(uf, b));
        uf[ra] = rb;
    };
    let mut face_uf: Vec<usize> = (0..faces).collect();
    let mut edges = 0;
    for s in 0..slots {
        let next = s - s % L + (s % L + 1) % L;
        union(&mut uf, 2 * s + 1, 2 * next);
        match partner[s] {
            Some(t) if t > s => {
                edges += 1;
                union(&mut uf, 2 * s, 2 * t + 1);
                union(&mut uf, 2 * s + 1, 2 * t);
                union(&mut face_uf, s / L, t / L);
            }
            Some(_) => {}
            None => edges += 1,
        }
    }
    let vertices = (0..2 * slots).filter(|&x| find(&mut uf, x) == x).count();
    let root = find(&mut face_uf, 0);
    vertices as i64 - edges as i64 + faces as i64 == 1 && (0..faces).all(|f| find(&mut face_uf, f) == root)
}

/// Boundary data of a diagram collared by two segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collar {
    /// Boundary vertices in cyclic order.
    pub boundary: Vec<usize>,
    /// Positions in `boundary` of the two special vertices.
    pub ends: (usize, usize),
    /// Face indices crossed by both segments.
    pub corners: Vec<usize>,
}

/// The collar structure, if the (valid disc) diagram has one.
pub fn two_collar(d: &AbstractDiagram) -> Option<Collar> {
    let s = d.structure();
    // Boundary edges oriented by their face: start vertex -> (end vertex, edge).
    let mut succ: HashMap<usize, usize> = HashMap::new();
    for e in s.boundary_edges() {
        let (f, j) = s.edge_slots[e][0];
        let fwd = d.faces[f].slots[j].forward;
        let (a, b) = if fwd { (2 * e, 2 * e + 1) } else { (2 * e + 1, 2 * e) };
        if succ.insert(s.end_vertex[a], s.end_vertex[b]).is_some() {
            return None;
        }
    }
    let first = *succ.keys().min()?;
    let mut cycle = vec![first];
    let mut v = succ[&first];
    while v != first {
        cycle.push(v);
        v = *succ.get(&v)?;
        if cycle.len() > succ.len() {
            return None;
        }
    }
    if cycle.len() != succ.len() {
        return None;
    }
    let b = cycle.len();

    let mut internal_at: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in 0..s.edge_count() {
        if !s.is_boundary(e) {
            for end in [2 * e, 2 * e + 1] {
                internal_at.entry(s.end_vertex[end]).or_default().push(e);
            }
        }
    }
    let deg = |v: usize| internal_at.get(&v).map_or(0, |x| x.len());
    let special: Vec<usize> = (0..b).filter(|&i| deg(cycle[i]) != 1).collect();
    let [p, q] = special[..] else { return None };
    if !(matches!(deg(cycle[p]), 0 | 2) && matches!(deg(cycle[q]), 0 | 2)) {
        return None;
    }
    if q - p < 2 || p + b - q < 2 {
        return None;
    }

    // Dual graph: opposite sides of each square are joined.
    let mut comp: Vec<usize> = (0..s.edge_count()).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    for f in &d.faces {
        for k in 0..2 {
            let (a, c) = (s.edge_index[&f.slots[k].edge], s.edge_index[&f.slots[k + 2].edge]);
            let (ra, rc) = (find(&mut comp, a), find(&mut comp, c));
            comp[ra] = rc;
        }
    }
    let mut arc_comp = |range: Vec<usize>| -> Option<usize> {
        let comps: BTreeSet<usize> = range.iter().map(|&i| find(&mut comp, internal_at[&cycle[i]][0])).collect();
        (comps.len() == 1).then(|| *comps.iter().next().unwrap())
    };
    let c1 = arc_comp((p + 1..q).collect())?;
    let c2 = arc_comp((q + 1..p + b).map(|i| i % b).collect())?;
    if c1 == c2 {
        return None;
    }
    let both: BTreeSet<usize> = [c1, c2].into();
    for i in [p, q] {
        if deg(cycle[i]) == 2 {
            let got: BTreeSet<usize> = internal_at[&cycle[i]].iter().map(|&e| find(&mut comp, e)).collect();
            if got != both {
                return None;
            }
        }
    }
    let corners: Vec<usize> = d
        .faces
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            let a = find(&mut comp, s.edge_index[&f.slots[0].edge]);
            let c = find(&mut comp, s.edge_index[&f.slots[1].edge]);
            BTreeSet::from([a, c]) == both
        })
        .map(|(i, _)| i)
        .collect();
    if corners.len() != 2 {
        return None;
    }
    Some(Collar { boundary: cycle, ends: (p, q), corners })
}

/// Isomorphism classes of two-collared discs with the given face count
/// and boundary length.
pub fn enumerate_two_collared(faces: usize, boundary: usize) -> Vec<AbstractDiagram> {
    enumerate_discs(faces, boundary).into_iter().filter(|d| two_collar(d).is_some()).collect()
}
