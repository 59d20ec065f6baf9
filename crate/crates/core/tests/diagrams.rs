mod common;

use proptest::prelude::*;
use squaremodel::diagrams::collared::{enumerate_two_collared, isomorphic, two_collar};
use squaremodel::diagrams::corner::{
    canned_diagrams, corner_scan, corner_search_options, corner_shapes, SHAPE_A, SHAPE_B, SHAPE_C,
};
use squaremodel::diagrams::search::{count_fulfillments, is_fulfillable};
use squaremodel::diagrams::{
    bound_exponent, ownership, parity_defects, replay, stats, validate, AbstractDiagram, Fulfillment, Orientation,
    SearchOptions,
};
use squaremodel::{Model, Relator};

use common::{disc_gallery, presentation, random_diagram, random_relators, rng};

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

/// Every relator assignment and decoration, checked by replay alone.
fn brute_count(d: &AbstractDiagram, rels: &[Relator], distinct: bool, free: bool) -> usize {
    let classes = d.classes();
    let decos: Vec<Vec<(Orientation, usize)>> = if free {
        let mut all = vec![Vec::new()];
        for _ in &d.faces {
            all = all
                .into_iter()
                .flat_map(|p: Vec<_>| DECORATIONS.iter().map(move |&x| [p.clone(), vec![x]].concat()))
                .collect();
        }
        all
    } else {
        vec![d.faces.iter().map(|f| (f.orient, f.start)).collect()]
    };
    let mut count = 0;
    let mut pick = vec![0usize; classes.len()];
    loop {
        let ok = !distinct || {
            let mut s = pick.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        if ok {
            for deco in &decos {
                let f = Fulfillment {
                    classes: classes.iter().zip(&pick).map(|(&c, &i)| (c, rels[i])).collect(),
                    decorations: deco.clone(),
                };
                if replay(d, &f).is_ok() {
                    count += 1;
                }
            }
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return count;
            }
            pick[k] += 1;
            if pick[k] < rels.len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn exactly_three_two_collared_shapes() {
    let mut found = Vec::new();
    for faces in 1..=4 {
        for boundary in 0..=4 * faces {
            found.extend(enumerate_two_collared(faces, boundary));
        }
    }
    assert_eq!(found.len(), 3);
    for text in [SHAPE_A, SHAPE_B, SHAPE_C] {
        let fixture = AbstractDiagram::from_text(text).unwrap();
        assert!(two_collar(&fixture).is_some());
        assert_eq!(found.iter().filter(|d| isomorphic(d, &fixture)).count(), 1);
    }
}

#[test]
fn gallery_is_euler_one() {
    for d in disc_gallery() {
        let st = stats(d);
        assert_eq!(st.vertices as i64 - st.edges as i64 + st.faces as i64, 1);
        assert_eq!(2 * st.edges - st.boundary, st.area_sum);
    }
}

#[test]
fn odd_valence_blocks_positive_words() {
    let c = AbstractDiagram::from_text(SHAPE_C).unwrap();
    assert_eq!(parity_defects(&c).len(), 2);
    let all: Vec<Relator> = (0..16).map(|i| Relator::from_signed([1, 1 + (i & 1), 1 + (i >> 1 & 1), 1 + (i >> 2 & 1)])).collect();
    let opts = SearchOptions { distinct_relators: false, free_decorations: true, ..Default::default() };
    assert_eq!(count_fulfillments(&c, &all, opts), 0);
    assert!(count_fulfillments(&AbstractDiagram::from_text(SHAPE_B).unwrap(), &all, opts) > 0);
}

#[test]
fn corner_instance_against_union_bound() {
    // The a′ fixture is one face with two fixed letters. A uniform positive
    // word matches two given positions with probability n^{-2}, so over 8
    // decorations and |R| relators the chance is at most 8|R|/n^2.
    let a_prime = canned_diagrams().into_iter().find(|(name, _)| *name == "a_prime").unwrap().1;
    let (n, d) = (8u32, "0.1");
    let trials = 2000;
    let mut hits = 0;
    for seed in 0..trials {
        let p = common::sample(Model::PositiveSquare, n, d, seed);
        hits += is_fulfillable(&a_prime, p.relators(), corner_search_options()) as u64;
    }
    let bound = 8.0 * p_count(n, d) as f64 / (n * n) as f64;
    let rate = hits as f64 / trials as f64;
    let allowance = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
    assert!(rate <= bound + allowance, "rate {rate} bound {bound}");
    assert!(hits > 0);
}

#[test]
fn corner_scan_counts_placements() {
    let p = common::sample(Model::PositiveSquare, 5, "0.3", 3);
    let r = p.relators()[0];
    let res = corner_scan(&p, &r, &corner_shapes());
    let placements: Vec<usize> = res.iter().map(|c| c.placements).collect();
    assert_eq!(placements, vec![8, 8, 64]);
    for c in &res {
        assert!(c.fulfillable_placements <= c.placements);
    }
}

fn p_count(n: u32, d: &str) -> u64 {
    squaremodel::num_relators(n, &common::density(d), Model::PositiveSquare).unwrap()
}

#[test]
fn canned_exponents() {
    for (name, d) in canned_diagrams() {
        let e = bound_exponent(&stats(&d), 0.2, 4);
        assert!(e < 0.0, "{name}: {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn search_agrees_with_brute_force(seed in any::<u64>(), n in 1u32..4, count in 1usize..5, distinct in any::<bool>(), free in any::<bool>(), fixed in 0.0f64..0.3) {
        let mut g = rng(seed);
        let d = random_diagram(&mut g, n, fixed);
        prop_assume!(!free || d.faces.len() <= 2);
        let model = if seed % 2 == 0 { Model::PositiveSquare } else { Model::Square };
        let universe = squaremodel::count_words(n, model) as usize;
        let rels = random_relators(&mut g, n, count.min(universe), model);
        let opts = SearchOptions { max_results: None, distinct_relators: distinct, free_decorations: free, reject_reduction_pairs: false };
        let fast = count_fulfillments(&d, &rels, opts);
        prop_assert_eq!(fast, brute_count(&d, &rels, distinct, free));
    }

    #[test]
    fn fulfillments_replay_and_ignore_class_names(seed in any::<u64>(), n in 1u32..4, count in 1usize..6) {
        let mut g = rng(seed);
        let d = random_diagram(&mut g, n, 0.1);
        let rels = random_relators(&mut g, n, count.min(squaremodel::count_words(n, Model::Square) as usize), Model::Square);
        let opts = SearchOptions { distinct_relators: false, ..Default::default() };
        let found = squaremodel::diagrams::find_fulfillments(&d, &rels, opts);
        for f in &found {
            prop_assert!(replay(&d, f).is_ok());
        }
        let mut renamed = d.clone();
        for f in &mut renamed.faces {
            f.class = 1000 - 7 * f.class;
        }
        prop_assert_eq!(count_fulfillments(&renamed, &rels, opts), found.len());
    }

    #[test]
    fn ownership_identity(seed in any::<u64>(), fixed in 0.0f64..0.5) {
        let mut g = rng(seed);
        let d = random_diagram(&mut g, 3, fixed);
        prop_assert!(validate(&d).is_empty());
        if let Ok(own) = ownership(&d) {
            let st = stats(&d);
            prop_assert_eq!(
                st.boundary as i64 - 2 * st.fixed as i64,
                (4 * st.faces) as i64 - 2 * own.delta_sum() as i64
            );
            if st.fixed == 0 {
                prop_assert_eq!(own.delta_sum(), st.edges - st.boundary);
            }
        }
    }
}

#[test]
fn lone_face_fulfilled_by_its_own_relator() {
    let d = AbstractDiagram::from_text("l=4\nface 0 +1 +2 +3 +4\n").unwrap();
    let r = Relator::from_signed([1, -2, 3, 2]);
    let p = presentation(Model::Square, 3, vec![r]);
    assert_eq!(count_fulfillments(&d, p.relators(), SearchOptions::default()), 1);
}
