//! Backtracking search for relator tuples that fulfill a diagram.
//!
//! Faces are placed one at a time, classes in ownership-rank order. The
//! first face of a class picks its relator; each placement writes the
//! face's letters onto its edges and backtracks on the first clash.

use serde::Serialize;

use super::{ownership, slot_label, AbstractDiagram, Orientation, OwnershipError, Structure};
use crate::model::{Letter, Relator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Stop after this many results.
    pub max_results: Option<usize>,
    /// Distinct classes must bear distinct relators.
    pub distinct_relators: bool,
    /// Ignore the diagram's orientations and starts and try all of them.
    pub free_decorations: bool,
    /// Reject placements where two adjacent faces mirror each other
    /// across their common edge.
    pub reject_reduction_pairs: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_results: None, distinct_relators: true, free_decorations: false, reject_reduction_pairs: false }
    }
}

impl SearchOptions {
    pub fn first() -> Self {
        SearchOptions { max_results: Some(1), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fulfillment {
    /// `(class, relator)` in class-rank order.
    pub classes: Vec<(u32, Relator)>,
    /// `(orientation, start)` per face, in face order.
    pub decorations: Vec<(Orientation, usize)>,
}

impl Fulfillment {
    pub fn relator_of(&self, class: u32) -> Option<Relator> {
        self.classes.iter().find(|(c, _)| *c == class).map(|&(_, r)| r)
    }
}

pub fn find_fulfillments(d: &AbstractDiagram, relators: &[Relator], opts: SearchOptions) -> Vec<Fulfillment> {
    let mut out = Vec::new();
    search(d, relators, opts, &mut |f| {
        out.push(f.clone());
        true
    });
    out
}

pub fn count_fulfillments(d: &AbstractDiagram, relators: &[Relator], opts: SearchOptions) -> usize {
    let mut count = 0;
    search(d, relators, opts, &mut |_| {
        count += 1;
        true
    });
    count
}

pub fn is_fulfillable(d: &AbstractDiagram, relators: &[Relator], opts: SearchOptions) -> bool {
    let mut found = false;
    search(d, relators, SearchOptions { max_results: Some(1), ..opts }, &mut |_| {
        found = true;
        false
    });
    found
}

const DECORATIONS: [(Orientation, usize); 8] = [
    (Orientation::Pos, 0),
    (Orientation::Pos, 1),
    (Orientation::Pos, 2),
    (Orientation::Pos, 3),
    (Orientation::Neg, 0),
    (Orientation::Neg, 1),
    (Orientation::Neg, 2),
    (Orientation::Neg, 3),
];

struct Engine<'a> {
    d: &'a AbstractDiagram,
    relators: &'a [Relator],
    opts: SearchOptions,
    order: Vec<usize>,
    /// Class slot (rank - 1) per face index.
    class_slot: Vec<usize>,
    class_ids: Vec<u32>,
    /// Edge index per face slot.
    edges: Vec<Vec<usize>>,
    /// For each face slot, the other slot on the same edge, if any.
    partner: Vec<Vec<Option<(usize, usize)>>>,
    label: Vec<Option<Letter>>,
    chosen: Vec<Option<usize>>,
    used: Vec<bool>,
    placed: Vec<Option<(Orientation, usize)>>,
    /// Counter-clockwise letters of each placed face.
    ccw: Vec<Vec<Letter>>,
    results: usize,
}

/// Runs the search, calling `emit` per result until it returns false or
/// `max_results` is reached.
pub fn search(d: &AbstractDiagram, relators: &[Relator], opts: SearchOptions, emit: &mut dyn FnMut(&Fulfillment) -> bool) {
    assert_eq!(d.l, 4, "fulfillment search needs relator length 4");
    if !opts.free_decorations {
        if let Err(OwnershipError::NeverFulfillable(_)) = ownership(d) {
            return;
        }
    }
    let s: Structure = d.structure();
    let ranking = d.class_ranking();
    let class_ids: Vec<u32> = ranking.iter().map(|&(c, _)| c).collect();
    let class_slot: Vec<usize> =
        d.faces.iter().map(|f| class_ids.iter().position(|&c| c == f.class).expect("ranked")).collect();
    let mut order: Vec<usize> = (0..d.faces.len()).collect();
    order.sort_by_key(|&fi| (class_slot[fi], fi));
    let edges: Vec<Vec<usize>> =
        d.faces.iter().map(|f| f.slots.iter().map(|sl| s.edge_index[&sl.edge]).collect()).collect();
    let partner = d
        .faces
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            (0..f.slots.len())
                .map(|j| s.edge_slots[edges[fi][j]].iter().copied().find(|&(g, k)| (g, k) != (fi, j)))
                .collect()
        })
        .collect();
    let mut label = vec![None; s.edge_count()];
    for (e, &letter) in &d.fixed {
        if let Some(&i) = s.edge_index.get(e) {
            label[i] = Some(letter);
        }
    }
    let mut engine = Engine {
        d,
        relators,
        opts,
        order,
        class_slot,
        class_ids,
        edges,
        partner,
        label,
        chosen: vec![None; ranking.len()],
        used: vec![false; relators.len()],
        placed: vec![None; d.faces.len()],
        ccw: vec![Vec::new(); d.faces.len()],
        results: 0,
    };
    engine.place(0, emit);
}

impl Engine<'_> {
    /// Returns false to abort the whole search.
    fn place(&mut self, step: usize, emit: &mut dyn FnMut(&Fulfillment) -> bool) -> bool {
        if step == self.order.len() {
            let f = Fulfillment {
                classes: self
                    .class_ids
                    .iter()
                    .zip(&self.chosen)
                    .map(|(&c, r)| (c, self.relators[r.expect("all classes chosen")]))
                    .collect(),
                decorations: self.placed.iter().map(|p| p.expect("all faces placed")).collect(),
            };
            self.results += 1;
            let more = emit(&f);
            return more && self.opts.max_results.is_none_or(|m| self.results < m);
        }
        let fi = self.order[step];
        let cs = self.class_slot[fi];
        match self.chosen[cs] {
            Some(r) => self.decorate(step, fi, r, emit),
            None => {
                for r in 0..self.relators.len() {
                    if self.opts.distinct_relators && self.used[r] {
                        continue;
                    }
                    self.chosen[cs] = Some(r);
                    self.used[r] = true;
                    let go_on = self.decorate(step, fi, r, emit);
                    self.used[r] = false;
                    self.chosen[cs] = None;
                    if !go_on {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn decorate(&mut self, step: usize, fi: usize, r: usize, emit: &mut dyn FnMut(&Fulfillment) -> bool) -> bool {
        let face = &self.d.faces[fi];
        let own = [(face.orient, face.start)];
        let choices: &[(Orientation, usize)] = if self.opts.free_decorations { &DECORATIONS } else { &own };
        let word = self.relators[r].0;
        for &(orient, start) in choices {
            let mut written = Vec::new();
            let mut ok = true;
            for (j, sl) in face.slots.iter().enumerate() {
                let e = self.edges[fi][j];
                let want = slot_label(&word, orient, start, j, sl.forward);
                match self.label[e] {
                    Some(have) if have != want => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        self.label[e] = Some(want);
                        written.push(e);
                    }
                }
            }
            if ok {
                self.placed[fi] = Some((orient, start));
                self.ccw[fi] = (0..4).map(|j| slot_label(&word, orient, start, j, true)).collect();
                if self.opts.reject_reduction_pairs && self.mirrors_neighbor(fi) {
                    ok = false;
                }
                let go_on = !ok || self.place(step + 1, emit);
                self.placed[fi] = None;
                for e in written.drain(..) {
                    self.label[e] = None;
                }
                if !go_on {
                    return false;
                }
            } else {
                for e in written {
                    self.label[e] = None;
                }
            }
        }
        true
    }

    fn mirrors_neighbor(&self, fi: usize) -> bool {
        let l = 4;
        for j in 0..l {
            let Some((g, k)) = self.partner[fi][j] else { continue };
            if g == fi || self.placed[g].is_none() {
                continue;
            }
            let (a, b) = (&self.ccw[fi], &self.ccw[g]);
            if (0..l).all(|t| a[(j + t) % l] == b[(k + l - t) % l].inverse()) {
                return true;
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("class {0} has no relator")]
    MissingClass(u32),
    #[error("edge {edge} reads {first} and {second}")]
    Clash { edge: u32, first: Letter, second: Letter },
    #[error("fixed edge {edge} wants {want}, got {got}")]
    Fixed { edge: u32, want: Letter, got: Letter },
    #[error("decoration count does not match faces")]
    Shape,
}

/// Recomputes every edge label from scratch. Returns labels in
/// structure edge order.
pub fn replay(d: &AbstractDiagram, f: &Fulfillment) -> Result<Vec<Letter>, ReplayError> {
    if f.decorations.len() != d.faces.len() {
        return Err(ReplayError::Shape);
    }
    let s = d.structure();
    let mut label: Vec<Option<Letter>> = vec![None; s.edge_count()];
    for (fi, face) in d.faces.iter().enumerate() {
        let word = f.relator_of(face.class).ok_or(ReplayError::MissingClass(face.class))?.0;
        let (orient, start) = f.decorations[fi];
        for (j, sl) in face.slots.iter().enumerate() {
            let e = s.edge_index[&sl.edge];
            let got = slot_label(&word, orient, start, j, sl.forward);
            match label[e] {
                Some(first) if first != got => return Err(ReplayError::Clash { edge: sl.edge, first, second: got }),
                _ => label[e] = Some(got),
            }
        }
    }
    for (edge, &want) in &d.fixed {
        let got = label[s.edge_index[edge]].expect("every edge is on a face");
        if got != want {
            return Err(ReplayError::Fixed { edge: *edge, want, got });
        }
    }
    Ok(label.into_iter().map(|l| l.expect("every edge is on a face")).collect())
}
