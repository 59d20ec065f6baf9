//! Corner scans over the two-collared shapes.
//!
//! In shape a or b the corner face bears a chosen relator `r`. Removing
//! the faces that bear `r` leaves a smaller diagram whose new boundary
//! edges carry fixed letters of `r`; the scan asks whether the rest of
//! the presentation fulfills it.

use serde::Serialize;

use super::search::is_fulfillable;
use super::{AbstractDiagram, Orientation, SearchOptions};
use crate::model::{Letter, Presentation, Relator};

pub const SHAPE_A: &str = include_str!("../../fixtures/a.diag");
pub const SHAPE_B: &str = include_str!("../../fixtures/b.diag");
pub const SHAPE_C: &str = include_str!("../../fixtures/c.diag");
pub const SHAPE_A_PRIME: &str = include_str!("../../fixtures/a_prime.diag");
pub const SHAPE_B_PRIME: &str = include_str!("../../fixtures/b_prime.diag");
pub const SHAPE_B_DOUBLE_PRIME: &str = include_str!("../../fixtures/b_double_prime.diag");

/// The shipped diagrams by name.
pub fn canned_diagrams() -> Vec<(&'static str, AbstractDiagram)> {
    [
        ("a", SHAPE_A),
        ("b", SHAPE_B),
        ("c", SHAPE_C),
        ("a_prime", SHAPE_A_PRIME),
        ("b_prime", SHAPE_B_PRIME),
        ("b_double_prime", SHAPE_B_DOUBLE_PRIME),
    ]
    .into_iter()
    .map(|(name, text)| (name, AbstractDiagram::from_text(text).expect("fixture parses")))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerShape {
    pub name: &'static str,
    /// The full two-collared diagram.
    pub shape: AbstractDiagram,
    /// Faces bearing `r`, corner first.
    pub r_faces: Vec<usize>,
}

impl CornerShape {
    /// Every way of placing `r` on the removed faces, as the fixed-letter
    /// diagram left behind.
    pub fn instances(&self, r: &Relator) -> Vec<AbstractDiagram> {
        let decorations: Vec<(Orientation, usize)> =
            [Orientation::Pos, Orientation::Neg].into_iter().flat_map(|o| (0..4).map(move |s| (o, s))).collect();
        let mut choices: Vec<Vec<(Orientation, usize)>> = vec![Vec::new()];
        for _ in &self.r_faces {
            choices = choices
                .into_iter()
                .flat_map(|prefix| {
                    decorations.iter().map(move |&dec| {
                        let mut v = prefix.clone();
                        v.push(dec);
                        v
                    })
                })
                .collect();
        }
        choices
            .into_iter()
            .map(|decs| {
                let mut shape = self.shape.clone();
                for (&fi, &(orient, start)) in self.r_faces.iter().zip(&decs) {
                    shape.faces[fi].orient = orient;
                    shape.faces[fi].start = start;
                }
                let removed: Vec<(usize, [Letter; 4])> =
                    self.r_faces.iter().map(|&fi| (fi, r.0)).collect();
                shape.without_faces(&removed)
            })
            .collect()
    }
}

/// a′, b′ and b″: shape a with its corner bearing `r`, shape b likewise,
/// and shape b with `r` on the corner and on the face opposite it.
pub fn corner_shapes() -> Vec<CornerShape> {
    let a = AbstractDiagram::from_text(SHAPE_A).expect("fixture parses");
    let b = AbstractDiagram::from_text(SHAPE_B).expect("fixture parses");
    vec![
        CornerShape { name: "a_prime", shape: a, r_faces: vec![0] },
        CornerShape { name: "b_prime", shape: b.clone(), r_faces: vec![0] },
        CornerShape { name: "b_double_prime", shape: b, r_faces: vec![0, 3] },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerResult {
    pub shape: &'static str,
    pub placements: usize,
    pub fulfillable_placements: usize,
}

impl CornerResult {
    pub fn fulfillable(&self) -> bool {
        self.fulfillable_placements > 0
    }
}

/// Options used for the leftover faces: any relator of `R ∖ {r}` on any
/// face in any decoration, reduction pairs excluded.
pub fn corner_search_options() -> SearchOptions {
    SearchOptions {
        max_results: Some(1),
        distinct_relators: false,
        free_decorations: true,
        reject_reduction_pairs: true,
    }
}

pub fn corner_scan(p: &Presentation, r: &Relator, shapes: &[CornerShape]) -> Vec<CornerResult> {
    let rest: Vec<Relator> = p.relators().iter().copied().filter(|x| x != r).collect();
    shapes
        .iter()
        .map(|shape| {
            let instances = shape.instances(r);
            let fulfillable_placements =
                instances.iter().filter(|d| is_fulfillable(d, &rest, corner_search_options())).count();
            CornerResult { shape: shape.name, placements: instances.len(), fulfillable_placements }
        })
        .collect()
}
