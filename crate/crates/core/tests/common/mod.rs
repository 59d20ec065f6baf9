#![allow(dead_code)]

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use squaremodel::diagrams::collared::enumerate_discs;
use squaremodel::diagrams::{AbstractDiagram, Orientation};
use squaremodel::{sample_presentation, Density, Letter, Model, Presentation, Relator};

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn density(text: &str) -> Density {
    Density::parse(text).unwrap()
}

pub fn sample(model: Model, n: u32, d: &str, seed: u64) -> Presentation {
    sample_presentation(n, &density(d), model, seed).unwrap()
}

pub fn presentation(model: Model, n: u32, rels: Vec<Relator>) -> Presentation {
    Presentation::new(model, n, density("0.1"), 0, rels).unwrap()
}

/// Independent of the library: no letter is followed by its inverse,
/// cyclically.
pub fn reduced_signed(w: &[i32; 4]) -> bool {
    (0..4).all(|i| w[i] != -w[(i + 1) % 4])
}

pub fn random_letter(rng: &mut SplitMix64, n: u32, positive_only: bool) -> Letter {
    let g = rng.gen_range(1..=n);
    if positive_only || rng.gen_bool(0.5) {
        Letter::pos(g)
    } else {
        Letter::neg(g)
    }
}

/// A uniform relator set drawn directly, bypassing the sampler.
pub fn random_relators(rng: &mut SplitMix64, n: u32, count: usize, model: Model) -> Vec<Relator> {
    let mut out: Vec<Relator> = Vec::new();
    while out.len() < count {
        let w = [(); 4].map(|_| random_letter(rng, n, model == Model::PositiveSquare));
        let r = Relator(w);
        if r.is_cyclically_reduced() && !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Every disc diagram of at most three squares.
pub fn disc_gallery() -> &'static [AbstractDiagram] {
    static GALLERY: OnceLock<Vec<AbstractDiagram>> = OnceLock::new();
    GALLERY.get_or_init(|| {
        let mut out = Vec::new();
        for faces in 1..=3 {
            for boundary in 0..=4 * faces {
                out.extend(enumerate_discs(faces, boundary));
            }
        }
        out
    })
}

/// Random classes, orientations, starts and fixed edges on a gallery
/// diagram.
pub fn decorate(d: &AbstractDiagram, rng: &mut SplitMix64, n: u32, fixed_prob: f64) -> AbstractDiagram {
    let mut d = d.clone();
    let nf = d.faces.len() as u32;
    for f in &mut d.faces {
        f.class = rng.gen_range(0..nf);
        f.orient = if rng.gen_bool(0.5) { Orientation::Pos } else { Orientation::Neg };
        f.start = rng.gen_range(0..4);
    }
    let edges: Vec<u32> = d.faces.iter().flat_map(|f| f.slots.iter().map(|s| s.edge)).collect();
    for e in edges {
        if rng.gen_bool(fixed_prob) {
            let letter = random_letter(rng, n, false);
            d.fixed.insert(e, letter);
        }
    }
    d
}

pub fn random_diagram(rng: &mut SplitMix64, n: u32, fixed_prob: f64) -> AbstractDiagram {
    let gallery = disc_gallery();
    let base = &gallery[rng.gen_range(0..gallery.len())];
    decorate(base, rng, n, fixed_prob)
}
