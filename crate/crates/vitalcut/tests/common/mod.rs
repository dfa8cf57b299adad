//! Shared graph suite and comparison helpers for the integration tests.
//!
//! The random suite is fully seeded: every run sees byte-identical graphs.

use vitalcut::gen::{
    cover_gadget, gen_db, gen_gm, gen_gsq, heavy_bipartite, path_graph, random_network,
    zigzag_ladder,
};
use vitalcut::graph::{CapacityValue, FlowNetwork, STCut};
use vitalcut::oracle::CutCatalog;

/// 200 seeded random digraphs with n <= 12, m <= 40, capacities <= 50.
pub fn random_suite() -> Vec<(String, FlowNetwork)> {
    (0..200u64)
        .map(|seed| {
            let n = 4 + (seed % 9) as usize; // 4..=12
            let m = (2 * n + (seed % 17) as usize).min(40);
            let max_cap = 1 + (seed % 50); // 1..=50
            (
                format!("random-{seed}"),
                random_network(n, m, max_cap, seed).expect("seeded graph"),
            )
        })
        .collect()
}

/// Hand-built fixtures spanning every generator family.
pub fn fixtures() -> Vec<(String, FlowNetwork)> {
    let mut fx: Vec<(String, FlowNetwork)> = vec![
        ("path-2-1-2".into(), path_graph(&[2, 1, 2]).unwrap()),
        ("path-5-3-7-4-6".into(), path_graph(&[5, 3, 7, 4, 6]).unwrap()),
        ("cover-gadget".into(), cover_gadget()),
        ("matrix-2x2".into(), gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap()),
        ("matrix-1x3".into(), gen_gm(&[vec![4, 1, 2]]).unwrap()),
        (
            "bipartite-mixed".into(),
            gen_db(2, &[vec![true, false], vec![true, true]]).unwrap(),
        ),
        ("bipartite-empty".into(), gen_db(1, &[vec![false]]).unwrap()),
        ("heavy-3".into(), heavy_bipartite(3, 2).unwrap()),
    ];
    for n in 2..=4usize {
        let base = (n * n) as u64;
        let weights: Vec<u64> = (0..(n * n) as u64).map(|i| base + i).collect();
        fx.push((format!("grid-{n}"), gen_gsq(n, &weights).unwrap()));
    }
    for n in 3..=5usize {
        fx.push((format!("zigzag-{n}"), zigzag_ladder(n).unwrap()));
    }
    fx
}

/// Random suite plus fixtures: the graphs every exact criterion runs over.
pub fn full_suite() -> Vec<(String, FlowNetwork)> {
    let mut all = fixtures();
    all.extend(random_suite());
    all
}

/// Sorted vertex lists of a set of cut sides, for order-free comparison.
pub fn sides_as_vertex_sets(n: usize, sides: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = sides
        .iter()
        .map(|side| (0..n).filter(|&v| side[v]).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The enumerated least-cut family of one edge, as sorted vertex sets.
pub fn oracle_family_of(g: &FlowNetwork, cat: &CutCatalog, pos: usize) -> Vec<Vec<usize>> {
    let sides: Vec<Vec<bool>> = cat.mincuts_for[pos].iter().map(|&ci| cat.side(ci)).collect();
    sides_as_vertex_sets(g.n(), &sides)
}

/// Recomputed flow value after shifting one edge's capacity, deleting it
/// when the new capacity is zero. Infinite capacities absorb finite shifts.
pub fn recompute_after_shift(g: &FlowNetwork, e_id: usize, delta: i64) -> u64 {
    let e = *g.edge(e_id).unwrap();
    let modified = match e.cap {
        CapacityValue::Infinite => g.clone(),
        CapacityValue::Finite(_) => g
            .with_edge_capacity(e_id, e.cap.add_signed(delta).unwrap())
            .unwrap(),
    };
    vitalcut::maxflow::max_flow(&modified).unwrap().value
}

/// Build an `STCut` from a catalog side.
pub fn cut_of_side(g: &FlowNetwork, side: &[bool]) -> STCut {
    STCut::from_side(g, side).unwrap()
}
