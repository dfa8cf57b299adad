//! Generators for the fixture families used across the test suites, plus a
//! seeded random-network helper for property tests.
//!
//! Vertex layouts are fixed and documented per generator so tests can refer
//! to edges by id.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, FlowNetwork};

/// Simple path `0 -> 1 -> ... -> k` with the given finite capacities;
/// source 0, sink k. Edge i joins vertex i to i+1.
pub fn path_graph(caps: &[u64]) -> Result<FlowNetwork> {
    if caps.is_empty() {
        return Err(Error::InvalidInput("path needs at least one edge".into()));
    }
    let n = caps.len() + 1;
    let mut g = FlowNetwork::new(n, 0, n - 1)?;
    for (i, &c) in caps.iter().enumerate() {
        g.add_edge(i, i + 1, CapacityValue::Finite(c))?;
    }
    Ok(g)
}

/// Complete bipartite gadget with unit fringe edges and distinct heavy
/// middle weights: every one of the n*n middle edges gets its own
/// mincut-for-edge capacity `w + 2n - 2`.
///
/// Layout: s=0, u_i=1+i, v_j=1+n+j, t=2n+1. Edge ids: `(s,u_i)` at i,
/// `(v_j,t)` at n+j, middle `(u_i,v_j)` at 2n + i*n + j.
pub fn gen_gsq(n: usize, weights: &[u64]) -> Result<FlowNetwork> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if weights.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "need {} weights, got {}",
            n * n,
            weights.len()
        )));
    }
    let floor = (n * n) as u64;
    let mut seen = weights.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("weights must be pairwise distinct".into()));
    }
    if let Some(&w) = weights.iter().find(|&&w| w < floor) {
        return Err(Error::InvalidInput(format!("weight {w} below floor {floor}")));
    }
    let s = 0;
    let t = 2 * n + 1;
    let mut g = FlowNetwork::new(2 * n + 2, s, t)?;
    for i in 0..n {
        g.add_edge(s, 1 + i, CapacityValue::Finite(1))?;
    }
    for j in 0..n {
        g.add_edge(1 + n + j, t, CapacityValue::Finite(1))?;
    }
    for i in 0..n {
        for j in 0..n {
            g.add_edge(1 + i, 1 + n + j, CapacityValue::Finite(weights[i * n + j]))?;
        }
    }
    Ok(g)
}

/// Matrix gadget: infinite edges s->u_i and v_j->t, finite middle edge
/// (u_i,v_j) of capacity M[i][j]. The unique finite (s,t)-cut is
/// {s} union {u_i}, so f* = sum of all entries and failing a middle edge
/// costs exactly its entry.
///
/// Layout: s=0, u_i=1+i, v_j=1+rows+j, t=rows+cols+1. Edge ids: s-edges
/// 0..rows, middles row-major rows..rows+rows*cols, then sink edges.
pub fn gen_gm(m: &[Vec<u64>]) -> Result<FlowNetwork> {
    if m.is_empty() || m[0].is_empty() {
        return Err(Error::InvalidInput("matrix must be nonempty".into()));
    }
    let rows = m.len();
    let cols = m[0].len();
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("matrix rows must have equal length".into()));
    }
    if m.iter().flatten().any(|&x| x == 0) {
        return Err(Error::InvalidInput("matrix entries must be positive".into()));
    }
    let s = 0;
    let t = rows + cols + 1;
    let mut g = FlowNetwork::new(rows + cols + 2, s, t)?;
    for i in 0..rows {
        g.add_edge(s, 1 + i, CapacityValue::Infinite)?;
    }
    for i in 0..rows {
        for j in 0..cols {
            g.add_edge(1 + i, 1 + rows + j, CapacityValue::Finite(m[i][j]))?;
        }
    }
    for j in 0..cols {
        g.add_edge(1 + rows + j, t, CapacityValue::Infinite)?;
    }
    Ok(g)
}

/// Unit-capacity DAG derived from a bipartite adjacency: every internal
/// vertex ends up with equal in- and out-degree, every edge is saturated by
/// the canonical maximum flow, and the mincut structure mirrors the
/// adjacency (dual edge failures drop f* by 1 exactly for present pairs).
///
/// Layout: s=0, left u_i=1+i, right v_j=1+n+j, t=2n+1. Edge order:
/// per-left (1+outdeg) copies of (s,u_i); one (s,v_j) per right vertex;
/// adjacency edges row-major; one (u_i,t) per left vertex; per-right
/// (1+indeg) copies of (v_j,t).
pub fn gen_db(n: usize, adj: &[Vec<bool>]) -> Result<FlowNetwork> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if adj.len() != n || adj.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("adjacency must be n x n".into()));
    }
    let s = 0;
    let t = 2 * n + 1;
    let unit = CapacityValue::Finite(1);
    let outdeg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let indeg: Vec<usize> =
        (0..n).map(|j| adj.iter().filter(|r| r[j]).count()).collect();
    let mut g = FlowNetwork::new(2 * n + 2, s, t)?;
    for i in 0..n {
        for _ in 0..=outdeg[i] {
            g.add_edge(s, 1 + i, unit)?;
        }
    }
    for j in 0..n {
        g.add_edge(s, 1 + n + j, unit)?;
    }
    for i in 0..n {
        for j in 0..n {
            if adj[i][j] {
                g.add_edge(1 + i, 1 + n + j, unit)?;
            }
        }
    }
    for i in 0..n {
        g.add_edge(1 + i, t, unit)?;
    }
    for j in 0..n {
        for _ in 0..=indeg[j] {
            g.add_edge(1 + n + j, t, unit)?;
        }
    }
    Ok(g)
}

/// Fixed 6-vertex demonstration network whose five vital edges need a
/// three-cut cover, while one vital edge owns three distinct mincuts.
///
/// Vertices: s=0, a=1, b=2, c=3, d=4, t=5. Edge ids: 0 (s,a,5), 1 (s,b,3),
/// 2 (b,a,2), 3 (a,c,7), 4 (b,d,2), 5..=11 seven unit (c,t), 12..=14 three
/// unit (d,t).
pub fn cover_gadget() -> FlowNetwork {
    let fin = CapacityValue::Finite;
    let mut g = FlowNetwork::new(6, 0, 5).unwrap();
    g.add_edge(0, 1, fin(5)).unwrap();
    g.add_edge(0, 2, fin(3)).unwrap();
    g.add_edge(2, 1, fin(2)).unwrap();
    g.add_edge(1, 3, fin(7)).unwrap();
    g.add_edge(2, 4, fin(2)).unwrap();
    for _ in 0..7 {
        g.add_edge(3, 5, fin(1)).unwrap();
    }
    for _ in 0..3 {
        g.add_edge(4, 5, fin(1)).unwrap();
    }
    g
}

/// Complete bipartite network with heavy middle edges (capacity n^c):
/// f* = n*n, every middle edge stays partially saturated in the canonical
/// flow, and the cheapest cut separating u_i from v_j (capacity 2n^2) is
/// not a mincut for the edge (u_i,v_j).
///
/// Layout: s=0, u_i=1+i, v_j=1+n+j, t=2n+1. Edge ids: (s,u_i) at i with
/// capacity n^2, middles row-major 2n-offset free: (u_i,v_j) at n + i*n + j,
/// sink edges (v_j,t) of capacity n at n + n*n + j.
pub fn heavy_bipartite(n: usize, c: u32) -> Result<FlowNetwork> {
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    if c < 2 {
        return Err(Error::InvalidInput("need exponent c >= 2".into()));
    }
    let nn = (n as u64) * (n as u64);
    let mid = (n as u64)
        .checked_pow(c)
        .ok_or_else(|| Error::LimitExceeded(format!("{n}^{c} overflows")))?;
    let s = 0;
    let t = 2 * n + 1;
    let mut g = FlowNetwork::new(2 * n + 2, s, t)?;
    for i in 0..n {
        g.add_edge(s, 1 + i, CapacityValue::Finite(nn))?;
    }
    for i in 0..n {
        for j in 0..n {
            g.add_edge(1 + i, 1 + n + j, CapacityValue::Finite(mid))?;
        }
    }
    for j in 0..n {
        g.add_edge(1 + n + j, t, CapacityValue::Finite(n as u64))?;
    }
    Ok(g)
}

/// Ladder with crossing back edges whose quotient transform is the identity:
/// the mincut {s} union A for the first rung is crossed 2n-1 times by the
/// zigzag path s,u_n,v_n,u_{n-1},...,u_1,v_1,t.
///
/// Layout: s=0, u_i=i for 1<=i<=n, v_i=n+i, t=2n+1. Edge ids:
/// (s,u_i) cap n at i-1; rung (u_i,v_i) cap n+1 at n+i-1; (v_i,t) cap n+1
/// at 2n+i-1; chain (u_i,u_{i+1}) cap n-i at 3n+i-1; back (v_{i+1},u_i)
/// cap i at 4n-1+i-1.
pub fn zigzag_ladder(n: usize) -> Result<FlowNetwork> {
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    let s = 0;
    let t = 2 * n + 1;
    let fin = |v: usize| CapacityValue::Finite(v as u64);
    let mut g = FlowNetwork::new(2 * n + 2, s, t)?;
    for i in 1..=n {
        g.add_edge(s, i, fin(n))?;
    }
    for i in 1..=n {
        g.add_edge(i, n + i, fin(n + 1))?;
    }
    for i in 1..=n {
        g.add_edge(n + i, t, fin(n + 1))?;
    }
    for i in 1..n {
        g.add_edge(i, i + 1, fin(n - i))?;
    }
    for i in 1..n {
        g.add_edge(n + i + 1, i, fin(i))?;
    }
    Ok(g)
}

/// Seeded random multigraph: `m` directed edges sampled uniformly over
/// ordered vertex pairs (no self loops, parallels allowed), capacities
/// uniform in 1..=max_cap. Source 0, sink n-1. Deterministic per seed.
pub fn random_network(n: usize, m: usize, max_cap: u64, seed: u64) -> Result<FlowNetwork> {
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    if max_cap == 0 {
        return Err(Error::InvalidInput("need max_cap >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = FlowNetwork::new(n, 0, n - 1)?;
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = loop {
            let v = rng.gen_range(0..n);
            if v != u {
                break v;
            }
        };
        let c = rng.gen_range(1..=max_cap);
        g.add_edge(u, v, CapacityValue::Finite(c))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_shape() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 3);
        assert_eq!(g.s(), 0);
        assert_eq!(g.t(), 3);
    }

    #[test]
    fn gsq_validates_weights() {
        assert!(gen_gsq(2, &[5, 6, 7]).is_err());
        assert!(gen_gsq(2, &[5, 6, 7, 7]).is_err());
        assert!(gen_gsq(2, &[3, 6, 7, 8]).is_err());
        let g = gen_gsq(2, &[5, 6, 7, 8]).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 8);
        // middle edge (u_0, v_1) sits at id 2n + 0*n + 1
        let e = g.edge(5).unwrap();
        assert_eq!((e.tail, e.head, e.cap), (1, 4, CapacityValue::Finite(6)));
    }

    #[test]
    fn gsq_single_cell() {
        let g = gen_gsq(1, &[1]).unwrap();
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn gm_layout() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 8);
        assert_eq!(g.edges()[0].cap, CapacityValue::Infinite);
        let mid = g.edge(2 + 3).unwrap(); // row 1, col 1 at rows + i*cols + j
        assert_eq!(mid.cap, CapacityValue::Finite(4));
        assert!(gen_gm(&[vec![0]]).is_err());
    }

    #[test]
    fn db_balances_degrees() {
        let adj = vec![vec![true, false], vec![true, true]];
        let g = gen_db(2, &adj).unwrap();
        let mut indeg = vec![0usize; g.n()];
        let mut outdeg = vec![0usize; g.n()];
        for e in g.edges() {
            outdeg[e.tail] += 1;
            indeg[e.head] += 1;
        }
        for v in 0..g.n() {
            if v != g.s() && v != g.t() {
                assert_eq!(indeg[v], outdeg[v], "vertex {v}");
            }
        }
    }

    #[test]
    fn cover_gadget_shape() {
        let g = cover_gadget();
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 15);
        assert_eq!(g.edge(2).unwrap().tail, 2);
        assert_eq!(g.edge(2).unwrap().head, 1);
    }

    #[test]
    fn heavy_bipartite_shape() {
        let g = heavy_bipartite(3, 3).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 3 + 9 + 3);
        assert_eq!(g.edge(0).unwrap().cap, CapacityValue::Finite(9));
        assert_eq!(g.edge(3).unwrap().cap, CapacityValue::Finite(27));
        assert_eq!(g.edge(12).unwrap().cap, CapacityValue::Finite(3));
    }

    #[test]
    fn zigzag_shape() {
        let g = zigzag_ladder(3).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 3 * 3 + 2 * 2);
        // chain edge (u_1, u_2) has capacity n-1
        let e = g.edge(3 * 3).unwrap();
        assert_eq!((e.tail, e.head, e.cap), (1, 2, CapacityValue::Finite(2)));
        // back edge (v_2, u_1) has capacity 1
        let e = g.edge(3 * 3 + 2).unwrap();
        assert_eq!((e.tail, e.head, e.cap), (5, 1, CapacityValue::Finite(1)));
    }

    #[test]
    fn random_network_is_deterministic() {
        let a = random_network(8, 20, 50, 42).unwrap();
        let b = random_network(8, 20, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = random_network(8, 20, 50, 43).unwrap();
        assert_ne!(a, c);
    }
}
