//! Abstract van Kampen diagrams.
//!
//! A diagram is a set of faces, each a counter-clockwise cycle of signed
//! edge ids. `+e` means the face walks edge `e` from its tail to its head,
//! `-e` the other way. An edge used by two slots is internal, by one slot
//! a boundary edge. Each face carries a relator class, an orientation and
//! a start slot: with orientation `+` the relator is read
//! counter-clockwise from the start slot, with `-` clockwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::model::{Letter, Model};

pub mod collared;
pub mod corner;
pub mod search;

pub use search::{find_fulfillments, replay, Fulfillment, ReplayError, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Pos => Orientation::Neg,
            Orientation::Neg => Orientation::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Orientation::Pos => '+',
            Orientation::Neg => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SignedEdge {
    pub edge: u32,
    pub forward: bool,
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.forward { '+' } else { '-' }, self.edge)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: u32,
    pub slots: Vec<SignedEdge>,
    pub class: u32,
    pub orient: Orientation,
    pub start: usize,
}

impl Face {
    /// 1-based position in the relator of the letter at `slot`.
    pub fn position(&self, slot: usize) -> usize {
        position(self.slots.len(), self.orient, self.start, slot)
    }
}

pub(crate) fn position(l: usize, orient: Orientation, start: usize, slot: usize) -> usize {
    match orient {
        Orientation::Pos => (slot + l - start) % l + 1,
        Orientation::Neg => (start + l - slot) % l + 1,
    }
}

/// Label of an edge, read in its own direction, when `word` sits on a
/// face that reaches it through a slot with the given direction.
pub(crate) fn slot_label(word: &[Letter], orient: Orientation, start: usize, slot: usize, forward: bool) -> Letter {
    let l = word.len();
    let w = word[position(l, orient, start, slot) - 1];
    if forward == (orient == Orientation::Pos) {
        w
    } else {
        w.inverse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbstractDiagram {
    pub l: usize,
    pub faces: Vec<Face>,
    /// Fixed labels, read in the edge's own direction.
    pub fixed: BTreeMap<u32, Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn perr(line: usize, message: impl Into<String>) -> DiagramError {
    DiagramError::Parse { line, message: message.into() }
}

impl AbstractDiagram {
    pub fn from_text(text: &str) -> Result<Self, DiagramError> {
        let mut l = None;
        let mut faces: Vec<Face> = Vec::new();
        let mut fixed = BTreeMap::new();
        let mut edits: Vec<(usize, String, u32, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(v) = content.strip_prefix("l=") {
                l = Some(v.trim().parse::<usize>().map_err(|_| perr(line, "bad relator length"))?);
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens[0] {
                "face" => {
                    if tokens.len() < 3 {
                        return Err(perr(line, "face needs an id and edges"));
                    }
                    let id: u32 = tokens[1].parse().map_err(|_| perr(line, "bad face id"))?;
                    if faces.iter().any(|f| f.id == id) {
                        return Err(perr(line, format!("duplicate face {id}")));
                    }
                    let slots = tokens[2..]
                        .iter()
                        .map(|t| parse_signed_edge(t).ok_or_else(|| perr(line, format!("bad edge `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    faces.push(Face { id, slots, class: id, orient: Orientation::Pos, start: 0 });
                }
                "class" | "orient" | "start" => {
                    if tokens.len() != 3 {
                        return Err(perr(line, format!("{} takes a face and a value", tokens[0])));
                    }
                    let face: u32 = tokens[1].parse().map_err(|_| perr(line, "bad face id"))?;
                    edits.push((line, tokens[0].to_string(), face, tokens[2].to_string()));
                }
                "fixed" => {
                    if tokens.len() != 3 {
                        return Err(perr(line, "fixed takes an edge and a letter"));
                    }
                    let edge: u32 = tokens[1].parse().map_err(|_| perr(line, "bad edge id"))?;
                    let letter: i32 = tokens[2].parse().map_err(|_| perr(line, "bad letter"))?;
                    if letter == 0 {
                        return Err(perr(line, "letter 0"));
                    }
                    if fixed.insert(edge, Letter::from_signed(letter)).is_some() {
                        return Err(perr(line, format!("edge {edge} fixed twice")));
                    }
                }
                other => return Err(perr(line, format!("unknown directive `{other}`"))),
            }
        }
        for (line, key, face_id, value) in edits {
            let face = faces
                .iter_mut()
                .find(|f| f.id == face_id)
                .ok_or_else(|| perr(line, format!("unknown face {face_id}")))?;
            match key.as_str() {
                "class" => face.class = value.parse().map_err(|_| perr(line, "bad class"))?,
                "orient" => {
                    face.orient = match value.as_str() {
                        "+" => Orientation::Pos,
                        "-" => Orientation::Neg,
                        _ => return Err(perr(line, "orientation must be + or -")),
                    }
                }
                _ => face.start = value.parse().map_err(|_| perr(line, "bad start"))?,
            }
        }
        let l = l.ok_or_else(|| perr(1, "missing l=<int>"))?;
        Ok(AbstractDiagram { l, faces, fixed })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("l={}\n", self.l);
        for f in &self.faces {
            let slots: Vec<String> = f.slots.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!("face {} {}\n", f.id, slots.join(" ")));
        }
        for f in &self.faces {
            if f.class != f.id {
                out.push_str(&format!("class {} {}\n", f.id, f.class));
            }
            if f.orient != Orientation::Pos {
                out.push_str(&format!("orient {} {}\n", f.id, f.orient.symbol()));
            }
            if f.start != 0 {
                out.push_str(&format!("start {} {}\n", f.id, f.start));
            }
        }
        for (e, letter) in &self.fixed {
            out.push_str(&format!("fixed {} {}\n", e, letter.signed()));
        }
        out
    }

    pub fn face_index(&self, id: u32) -> Option<usize> {
        self.faces.iter().position(|f| f.id == id)
    }

    /// Distinct class ids in ascending order.
    pub fn classes(&self) -> Vec<u32> {
        self.faces.iter().map(|f| f.class).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Classes by multiplicity descending, then id ascending. Rank 1 is
    /// the first entry.
    pub fn class_ranking(&self) -> Vec<(u32, usize)> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for f in &self.faces {
            *counts.entry(f.class).or_default() += 1;
        }
        let mut v: Vec<(u32, usize)> = counts.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    pub fn structure(&self) -> Structure {
        Structure::build(self)
    }

    /// Removes faces by index and fixes the edges they shared with the
    /// remaining faces to the labels computed from `words`.
    pub fn without_faces(&self, removed: &[(usize, [Letter; 4])]) -> AbstractDiagram {
        let mut fixed = self.fixed.clone();
        for &(fi, word) in removed {
            let f = &self.faces[fi];
            for (j, s) in f.slots.iter().enumerate() {
                fixed.insert(s.edge, slot_label(&word, f.orient, f.start, j, s.forward));
            }
        }
        let drop: BTreeSet<usize> = removed.iter().map(|&(fi, _)| fi).collect();
        let faces: Vec<Face> =
            self.faces.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, f)| f.clone()).collect();
        let live: BTreeSet<u32> = faces.iter().flat_map(|f| f.slots.iter().map(|s| s.edge)).collect();
        fixed.retain(|e, _| live.contains(e));
        AbstractDiagram { l: self.l, faces, fixed }
    }
}

fn parse_signed_edge(t: &str) -> Option<SignedEdge> {
    let v: i64 = t.parse().ok()?;
    if v == 0 || v.unsigned_abs() > u32::MAX as u64 {
        return None;
    }
    Some(SignedEdge { edge: v.unsigned_abs() as u32, forward: v > 0 })
}

/// Combinatorics derived from the face lists.
#[derive(Debug, Clone)]
pub struct Structure {
    pub edge_ids: Vec<u32>,
    pub edge_index: HashMap<u32, usize>,
    /// `(face index, slot)` per edge.
    pub edge_slots: Vec<Vec<(usize, usize)>>,
    /// Vertex of each edge end: `2e` tail, `2e + 1` head.
    pub end_vertex: Vec<usize>,
    pub vertex_count: usize,
    pub valence: Vec<usize>,
    pub internal_vertex: Vec<bool>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

impl Structure {
    fn build(d: &AbstractDiagram) -> Self {
        let edge_ids: Vec<u32> =
            d.faces.iter().flat_map(|f| f.slots.iter().map(|s| s.edge)).collect::<BTreeSet<_>>().into_iter().collect();
        let edge_index: HashMap<u32, usize> = edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut edge_slots = vec![Vec::new(); edge_ids.len()];
        let mut uf = UnionFind::new(2 * edge_ids.len());
        for (fi, f) in d.faces.iter().enumerate() {
            let len = f.slots.len();
            for (j, s) in f.slots.iter().enumerate() {
                let e = edge_index[&s.edge];
                edge_slots[e].push((fi, j));
                let next = f.slots[(j + 1) % len];
                let end = if s.forward { 2 * e + 1 } else { 2 * e };
                let ne = edge_index[&next.edge];
                let next_start = if next.forward { 2 * ne } else { 2 * ne + 1 };
                uf.union(end, next_start);
            }
        }
        let mut ids = HashMap::new();
        let end_vertex: Vec<usize> = (0..2 * edge_ids.len())
            .map(|x| {
                let r = uf.find(x);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        let vertex_count = ids.len();
        let mut valence = vec![0; vertex_count];
        let mut internal_vertex = vec![true; vertex_count];
        for (x, &v) in end_vertex.iter().enumerate() {
            valence[v] += 1;
            if edge_slots[x / 2].len() < 2 {
                internal_vertex[v] = false;
            }
        }
        Structure { edge_ids, edge_index, edge_slots, end_vertex, vertex_count, valence, internal_vertex }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_boundary(&self, e: usize) -> bool {
        self.edge_slots[e].len() == 1
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.edge_count()).filter(|&e| self.is_boundary(e)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Defect {
    NoFaces,
    FaceLength { face: u32, len: usize },
    StartOutOfRange { face: u32, start: usize },
    EdgeSlots { edge: u32, count: usize },
    SameDirection { edge: u32 },
    FixedUnknownEdge { edge: u32 },
    Disconnected,
    NoBoundary,
    Euler { chi: i64 },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::NoFaces => write!(f, "no faces"),
            Defect::FaceLength { face, len } => write!(f, "face {face} has {len} slots"),
            Defect::StartOutOfRange { face, start } => write!(f, "face {face} start {start} out of range"),
            Defect::EdgeSlots { edge, count } => write!(f, "edge {edge} used by {count} slots"),
            Defect::SameDirection { edge } => write!(f, "edge {edge} walked the same way by both slots"),
            Defect::FixedUnknownEdge { edge } => write!(f, "fixed edge {edge} not in any face"),
            Defect::Disconnected => write!(f, "diagram is disconnected"),
            Defect::NoBoundary => write!(f, "diagram has no boundary"),
            Defect::Euler { chi } => write!(f, "Euler characteristic {chi}, expected 1"),
        }
    }
}

/// Structural checks for a disc diagram. An empty list means valid.
pub fn validate(d: &AbstractDiagram) -> Vec<Defect> {
    let mut defects = Vec::new();
    if d.faces.is_empty() {
        return vec![Defect::NoFaces];
    }
    for f in &d.faces {
        if f.slots.len() != d.l {
            defects.push(Defect::FaceLength { face: f.id, len: f.slots.len() });
        }
        if f.start >= d.l {
            defects.push(Defect::StartOutOfRange { face: f.id, start: f.start });
        }
    }
    let s = d.structure();
    for (e, slots) in s.edge_slots.iter().enumerate() {
        let edge = s.edge_ids[e];
        match slots.len() {
            1 => {}
            2 => {
                let dir = |(fi, j): (usize, usize)| d.faces[fi].slots[j].forward;
                if dir(slots[0]) == dir(slots[1]) {
                    defects.push(Defect::SameDirection { edge });
                }
            }
            count => defects.push(Defect::EdgeSlots { edge, count }),
        }
    }
    for &e in d.fixed.keys() {
        if !s.edge_index.contains_key(&e) {
            defects.push(Defect::FixedUnknownEdge { edge: e });
        }
    }
    let mut uf = UnionFind::new(d.faces.len());
    for slots in &s.edge_slots {
        for w in slots.windows(2) {
            uf.union(w[0].0, w[1].0);
        }
    }
    let root = uf.find(0);
    if (0..d.faces.len()).any(|f| uf.find(f) != root) {
        defects.push(Defect::Disconnected);
    }
    if s.boundary_edges().is_empty() {
        defects.push(Defect::NoBoundary);
    }
    let chi = s.vertex_count as i64 - s.edge_count() as i64 + d.faces.len() as i64;
    if chi != 1 {
        defects.push(Defect::Euler { chi });
    }
    defects
}

/// Internal edges where two distinct faces form a reduction pair: same
/// class, opposite orientations, same position.
pub fn reduction_pairs(d: &AbstractDiagram) -> Vec<u32> {
    let s = d.structure();
    let mut out = Vec::new();
    for (e, slots) in s.edge_slots.iter().enumerate() {
        if let [(f1, j1), (f2, j2)] = slots[..] {
            let (a, b) = (&d.faces[f1], &d.faces[f2]);
            if f1 != f2 && a.class == b.class && a.orient != b.orient && a.position(j1) == b.position(j2) {
                out.push(s.edge_ids[e]);
            }
        }
    }
    out
}

pub fn is_reduced(d: &AbstractDiagram) -> bool {
    reduction_pairs(d).is_empty()
}

/// Internal non-fixed edges whose two slots demand a letter equal to its
/// own inverse: same class, same orientation, same position.
pub fn self_inverse_edges(d: &AbstractDiagram) -> Vec<u32> {
    let s = d.structure();
    let mut out = Vec::new();
    for (e, slots) in s.edge_slots.iter().enumerate() {
        if let [(f1, j1), (f2, j2)] = slots[..] {
            let (a, b) = (&d.faces[f1], &d.faces[f2]);
            if a.class == b.class && a.orient == b.orient && a.position(j1) == b.position(j2) {
                out.push(s.edge_ids[e]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassOwnership {
    pub class: u32,
    pub rank: usize,
    pub multiplicity: usize,
    pub kappa: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OwnershipReport {
    /// Owning face indices per edge, in structure order. A fixed internal
    /// edge lists both faces; a free boundary edge lists none.
    pub owners: Vec<Vec<usize>>,
    /// Number of owned slots per face.
    pub delta: Vec<usize>,
    /// Ranked as in [`AbstractDiagram::class_ranking`].
    pub classes: Vec<ClassOwnership>,
}

impl OwnershipReport {
    pub fn delta_sum(&self) -> usize {
        self.delta.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum OwnershipError {
    #[error("edge {0} would carry a letter equal to its inverse")]
    NeverFulfillable(u32),
    #[error("edge {0} lies between a reduction pair")]
    NotReduced(u32),
}

pub fn ownership(d: &AbstractDiagram) -> Result<OwnershipReport, OwnershipError> {
    let s = d.structure();
    let ranking = d.class_ranking();
    let rank: HashMap<u32, usize> = ranking.iter().enumerate().map(|(i, &(c, _))| (c, i + 1)).collect();
    let key = |fi: usize, j: usize| (rank[&d.faces[fi].class], d.faces[fi].position(j));
    let mut owners = vec![Vec::new(); s.edge_count()];
    let mut delta = vec![0usize; d.faces.len()];
    for (e, slots) in s.edge_slots.iter().enumerate() {
        let fixed = d.fixed.contains_key(&s.edge_ids[e]);
        if fixed {
            for &(fi, _) in slots {
                owners[e].push(fi);
                delta[fi] += 1;
            }
            continue;
        }
        if let [(f1, j1), (f2, j2)] = slots[..] {
            let (k1, k2) = (key(f1, j1), key(f2, j2));
            if k1 == k2 {
                let edge = s.edge_ids[e];
                return Err(if d.faces[f1].orient == d.faces[f2].orient {
                    OwnershipError::NeverFulfillable(edge)
                } else {
                    OwnershipError::NotReduced(edge)
                });
            }
            let owner = if k1 > k2 { f1 } else { f2 };
            owners[e].push(owner);
            delta[owner] += 1;
        }
    }
    let classes = ranking
        .iter()
        .enumerate()
        .map(|(i, &(class, multiplicity))| ClassOwnership {
            class,
            rank: i + 1,
            multiplicity,
            kappa: d.faces.iter().enumerate().filter(|(_, f)| f.class == class).map(|(fi, _)| delta[fi]).max().unwrap_or(0),
        })
        .collect();
    Ok(OwnershipReport { owners, delta, classes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagramStats {
    pub l: usize,
    pub faces: usize,
    pub boundary: usize,
    pub fixed: usize,
    pub area_sum: usize,
    pub edges: usize,
    pub vertices: usize,
    pub internal_vertices: usize,
}

pub fn stats(d: &AbstractDiagram) -> DiagramStats {
    let s = d.structure();
    DiagramStats {
        l: d.l,
        faces: d.faces.len(),
        boundary: s.boundary_edges().len(),
        fixed: d.fixed.len(),
        area_sum: d.faces.iter().map(|f| f.slots.len()).sum(),
        edges: s.edge_count(),
        vertices: s.vertex_count,
        internal_vertices: s.internal_vertex.iter().filter(|&&b| b).count(),
    }
}

/// `|∂D| ≥ 4(1 − 2d − ε)|D|`.
pub fn iso_check(stats: &DiagramStats, d: f64, eps: f64) -> bool {
    stats.boundary as f64 >= 4.0 * (1.0 - 2.0 * d - eps) * stats.faces as f64
}

/// `½((|∂A| − 2K)/|A| − l(1 − 2d))`; the fulfillment probability is at
/// most `base^e`.
pub fn bound_exponent(stats: &DiagramStats, d: f64, l: usize) -> f64 {
    assert!(stats.faces >= 1, "bound needs at least one face");
    let excess = stats.boundary as f64 - 2.0 * stats.fixed as f64;
    0.5 * (excess / stats.faces as f64 - l as f64 * (1.0 - 2.0 * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FulfillmentBound {
    pub exponent: f64,
    pub base: u64,
    pub value: f64,
    pub vacuous: bool,
}

pub fn fulfillment_bound(stats: &DiagramStats, n: u32, d: f64, model: Model) -> FulfillmentBound {
    let exponent = bound_exponent(stats, d, stats.l);
    let base = model.base(n);
    let value = (base as f64).powf(exponent).min(1.0);
    FulfillmentBound { exponent, base, value, vacuous: exponent >= 0.0 }
}

/// Internal vertices of odd valence. Any one of them rules out a
/// fulfillment by positive words, since around an internal vertex the
/// positive directions of the edges must alternate.
pub fn parity_defects(d: &AbstractDiagram) -> Vec<usize> {
    let s = d.structure();
    (0..s.vertex_count).filter(|&v| s.internal_vertex[v] && s.valence[v] % 2 == 1).collect()
}
