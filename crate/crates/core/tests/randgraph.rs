use std::collections::VecDeque;

use proptest::prelude::*;
use squaremodel::randgraph::{sample_gnm, sample_gnp, SimpleGraph};

fn graph_strategy() -> impl Strategy<Value = SimpleGraph> {
    (1usize..14).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |edges| {
                let mut g = SimpleGraph::new(n);
                for (u, v) in edges {
                    g.add_edge(u, v).unwrap();
                }
                g
            })
    })
}

/// BFS two-colouring, self-loops included.
fn bipartite(g: &SimpleGraph) -> bool {
    let mut colour = vec![None; g.vertex_count()];
    for s in 0..g.vertex_count() {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in g.neighbors(u) {
                match colour[v] {
                    None => {
                        colour[v] = Some(!colour[u].unwrap());
                        q.push_back(v);
                    }
                    Some(c) if c == colour[u].unwrap() => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Shortest even walk lengths from `x`, via the bipartite double cover.
fn even_distances(g: &SimpleGraph, x: usize) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut dist = vec![None; 2 * n];
    dist[2 * x] = Some(0);
    let mut q = VecDeque::from([2 * x]);
    while let Some(s) = q.pop_front() {
        let (u, parity) = (s / 2, s % 2);
        for &v in g.neighbors(u) {
            let t = 2 * v + (1 - parity);
            if dist[t].is_none() {
                dist[t] = Some(dist[s].unwrap() + 1);
                q.push_back(t);
            }
        }
    }
    (0..n).map(|v| dist[2 * v]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn odd_cycle_iff_not_bipartite(g in graph_strategy()) {
        match g.odd_cycle() {
            Some(w) => {
                prop_assert!(!bipartite(&g));
                prop_assert_eq!(w.first(), w.last());
                prop_assert_eq!((w.len() - 1) % 2, 1);
                prop_assert!(g.is_walk(&w));
            }
            None => prop_assert!(bipartite(&g)),
        }
    }

    #[test]
    fn even_paths(g in graph_strategy()) {
        let n = g.vertex_count();
        let everywhere = g.is_connected() && g.odd_cycle().is_some();
        for x in 0..n {
            let dist = even_distances(&g, x);
            for y in 0..n {
                let got = g.even_path(x, y);
                prop_assert_eq!(got.is_some(), dist[y].is_some());
                if everywhere {
                    prop_assert!(got.is_some());
                }
                if let Some(w) = got {
                    prop_assert_eq!(w[0], x);
                    prop_assert_eq!(*w.last().unwrap(), y);
                    prop_assert!(g.is_walk(&w));
                    prop_assert_eq!(w.len() - 1, dist[y].unwrap());
                }
            }
        }
    }

    #[test]
    fn properties_monotone_under_edge_addition(g in graph_strategy(), extra in prop::collection::vec((0usize..14, 0usize..14), 1..10)) {
        let mut h = g.clone();
        let (mut conn, mut odd) = (g.is_connected(), g.odd_cycle().is_some());
        for (u, v) in extra {
            let n = h.vertex_count();
            h.add_edge(u % n, v % n).unwrap();
            let (c, o) = (h.is_connected(), h.odd_cycle().is_some());
            prop_assert!(c || !conn);
            prop_assert!(o || !odd);
            conn = c;
            odd = o;
        }
    }

    #[test]
    fn gnm_has_exactly_m_edges(n in 1usize..30, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let max = n * (n - 1) / 2;
        let m = (frac * max as f64) as usize;
        let g = sample_gnm(n, m, seed).unwrap();
        prop_assert_eq!(g.edge_count(), m);
        prop_assert_eq!(sample_gnm(n, m, seed).unwrap(), g);
    }
}

#[test]
fn gnp_edge_density() {
    let (n, p) = (200, 0.05);
    let g = sample_gnp(n, p, 11).unwrap();
    let pairs = (n * (n - 1) / 2) as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    assert!((g.edge_count() as f64 - pairs * p).abs() < 5.0 * sd);
}
