//! Sensitivity structure for single-edge capacity changes.
//!
//! [`TvitTree`] is a binary split tree over the vertex set. Vital edges are
//! processed in nondecreasing order of their least separating-cut capacity;
//! each edge whose endpoints still share a leaf splits that leaf along a
//! witness minimum cut for the edge. The collected internal-node cuts form a
//! cover of size at most n-1, and the lowest common ancestor of two endpoint
//! leaves stores a genuine minimum cut for every vital edge between them.
//!
//! Capacity decreases are answered from the tree alone ([`query_cap`],
//! [`query_cut`]); capacity increases and edge insertions go through
//! [`InsertOracle`], which keeps the residual cores around the terminals and,
//! per vertex, the cheapest cut forcing that vertex onto either side.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, Edge, FlowNetwork, STCut};
use crate::maxflow::{
    farthest_mincut_of, max_flow, mincut_with, nearest_mincut, residual_sink_side,
    residual_source_side,
};
use crate::pqdag::{build_pq, build_pq_forced, TopoRecord};
use crate::vital::{all_vital_edges, VitalAnalysis};

/// One node of a split tree: a leaf holds a set of vertices, an internal
/// node holds the cut that separated its left subtree from its right one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitNode {
    pub parent: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    /// Internal nodes: capacity of the stored cut.
    pub cap: Option<u64>,
    /// Internal nodes: the separating cut (source side first in order).
    pub cut: Option<STCut>,
    /// Leaves: member vertices, sorted.
    pub vertices: Vec<usize>,
    /// Leaves: in-order position among leaves.
    pub ord: Option<usize>,
}

impl SplitNode {
    fn leaf(vertices: Vec<usize>) -> SplitNode {
        SplitNode {
            parent: None,
            left: None,
            right: None,
            cap: None,
            cut: None,
            vertices,
            ord: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.left.is_none()
    }
}

/// Arena-backed binary split tree with constant-time lowest common ancestor
/// queries (Euler tour plus sparse table).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCore {
    pub nodes: Vec<SplitNode>,
    pub root: usize,
    /// Vertex -> leaf node id.
    pub leaf_of: Vec<usize>,
    euler: Vec<usize>,
    euler_depth: Vec<usize>,
    first_visit: Vec<usize>,
    sparse: Vec<Vec<usize>>,
}

impl SplitCore {
    /// Builds the tree by replaying `items` in the given order. Each item
    /// carries a cut that must place `u` on the source side and `v` on the
    /// sink side; items whose endpoints are already in different leaves are
    /// skipped.
    pub(crate) fn build(n: usize, items: &[(usize, usize, u64, STCut)]) -> Result<SplitCore> {
        let mut nodes = vec![SplitNode::leaf((0..n).collect())];
        let mut leaf_of = vec![0usize; n];
        for &(u, v, cap, ref cut) in items {
            if leaf_of[u] == leaf_of[v] {
                if !cut.contains(u) || cut.contains(v) {
                    return Err(Error::InvariantViolation(format!(
                        "split cut does not separate {u} from {v} in that order"
                    )));
                }
                let leaf = leaf_of[u];
                let (inside, outside): (Vec<usize>, Vec<usize>) = nodes[leaf]
                    .vertices
                    .iter()
                    .partition(|&&x| cut.contains(x));
                debug_assert!(!inside.is_empty() && !outside.is_empty());
                let left = nodes.len();
                nodes.push(SplitNode::leaf(inside));
                let right = nodes.len();
                nodes.push(SplitNode::leaf(outside));
                for &x in &nodes[left].vertices {
                    leaf_of[x] = left;
                }
                for &x in &nodes[right].vertices {
                    leaf_of[x] = right;
                }
                nodes[left].parent = Some(leaf);
                nodes[right].parent = Some(leaf);
                let inner = &mut nodes[leaf];
                inner.left = Some(left);
                inner.right = Some(right);
                inner.cap = Some(cap);
                inner.cut = Some(cut.clone());
                inner.vertices = Vec::new();
            }
        }

        let mut core = SplitCore {
            nodes,
            root: 0,
            leaf_of,
            euler: Vec::new(),
            euler_depth: Vec::new(),
            first_visit: Vec::new(),
            sparse: Vec::new(),
        };
        core.finalize();
        Ok(core)
    }

    /// Assigns in-order leaf positions and builds the Euler-tour sparse
    /// table used by `lca`.
    fn finalize(&mut self) {
        let count = self.nodes.len();
        self.euler.clear();
        self.euler_depth.clear();
        self.first_visit = vec![usize::MAX; count];
        let mut next_ord = 0usize;
        // In-order walk: left subtree, node, right subtree; the node is
        // appended to the Euler tour on every visit.
        enum Step {
            Enter(usize, usize),
            Visit(usize, usize),
            Exit(usize, usize),
        }
        let mut stack = vec![Step::Enter(self.root, 0)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(x, d) => {
                    self.touch(x, d);
                    if let Some(l) = self.nodes[x].left {
                        stack.push(Step::Visit(x, d));
                        stack.push(Step::Enter(l, d + 1));
                    } else {
                        self.nodes[x].ord = Some(next_ord);
                        next_ord += 1;
                    }
                }
                Step::Visit(x, d) => {
                    self.touch(x, d);
                    let r = self.nodes[x].right.expect("internal node has two children");
                    stack.push(Step::Exit(x, d));
                    stack.push(Step::Enter(r, d + 1));
                }
                Step::Exit(x, d) => self.touch(x, d),
            }
        }

        // Sparse table of depth-minima over the Euler tour.
        let len = self.euler.len();
        let levels = usize::BITS as usize - len.leading_zeros() as usize;
        let mut sparse = Vec::with_capacity(levels);
        sparse.push((0..len).collect::<Vec<usize>>());
        let mut span = 1usize;
        while span * 2 <= len {
            let prev = sparse.last().expect("at least one level");
            let mut row = Vec::with_capacity(len - span * 2 + 1);
            for i in 0..=len - span * 2 {
                let a = prev[i];
                let b = prev[i + span];
                row.push(if self.euler_depth[a] <= self.euler_depth[b] {
                    a
                } else {
                    b
                });
            }
            sparse.push(row);
            span *= 2;
        }
        self.sparse = sparse;
    }

    fn touch(&mut self, x: usize, depth: usize) {
        if self.first_visit[x] == usize::MAX {
            self.first_visit[x] = self.euler.len();
        }
        self.euler.push(x);
        self.euler_depth.push(depth);
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut i, mut j) = (self.first_visit[a], self.first_visit[b]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let width = j - i + 1;
        let level = usize::BITS as usize - 1 - width.leading_zeros() as usize;
        let x = self.sparse[level][i];
        let y = self.sparse[level][j + 1 - (1 << level)];
        let best = if self.euler_depth[x] <= self.euler_depth[y] {
            x
        } else {
            y
        };
        self.euler[best]
    }

    /// In-order position of the leaf holding `v`.
    pub fn ord_of(&self, v: usize) -> usize {
        self.nodes[self.leaf_of[v]]
            .ord
            .expect("leaves carry in-order positions")
    }

    /// Internal-node cuts in creation order.
    pub fn cover(&self) -> Vec<(u64, &STCut)> {
        self.nodes
            .iter()
            .filter(|x| !x.is_leaf())
            .map(|x| {
                (
                    x.cap.expect("internal node capacity"),
                    x.cut.as_ref().expect("internal node cut"),
                )
            })
            .collect()
    }
}

/// Split tree answering single-edge capacity-decrease queries in constant
/// time after construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TvitTree {
    pub core: SplitCore,
    pub fstar: u64,
    /// Minimal-source-side minimum cut of the unmodified network.
    pub global_cut: STCut,
    /// Edge table of the underlying network, for id lookup.
    pub edges: Vec<Edge>,
    pub n: usize,
    pub s: usize,
    pub t: usize,
}

impl TvitTree {
    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map(|pos| &self.edges[pos])
            .map_err(|_| Error::UnknownEdge(id))
    }

    /// Number of stored cover cuts (internal nodes).
    pub fn cover_size(&self) -> usize {
        self.core.nodes.iter().filter(|x| !x.is_leaf()).count()
    }
}

/// Builds the decrease-query tree, classifying edges internally.
pub fn build_tvit(g: &FlowNetwork) -> Result<TvitTree> {
    let analysis = all_vital_edges(g)?;
    build_tvit_from_analysis(g, &analysis)
}

/// Builds the decrease-query tree from a precomputed edge classification.
/// Witness cuts in `analysis` must be minimal-source-side minimum cuts for
/// their edges.
pub fn build_tvit_from_analysis(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<TvitTree> {
    let mut items: Vec<(usize, usize, u64, STCut)> = Vec::new();
    // Unbounded edges absorb every in-range finite decrease, so the tree
    // answers the unchanged flow value for them without storing a split.
    let mut rows: Vec<_> = analysis
        .vital_rows()
        .filter(|r| r.lambda.is_some_and(CapacityValue::is_finite))
        .collect();
    rows.sort_by_key(|r| {
        (
            r.lambda
                .expect("vital rows carry lambda")
                .finite()
                .expect("rows with infinite lambda were filtered"),
            r.edge,
        )
    });
    for row in rows {
        let e = g.edge(row.edge)?;
        let lambda = row
            .lambda
            .and_then(CapacityValue::finite)
            .expect("vital lambda is finite");
        let cut = row
            .witness_cut
            .clone()
            .expect("vital rows carry a witness cut");
        items.push((e.tail, e.head, lambda, cut));
    }
    let core = SplitCore::build(g.n(), &items)?;
    let f = max_flow(g)?;
    let global_cut = nearest_mincut(g, &f)?;
    let tree = TvitTree {
        core,
        fstar: f.value,
        global_cut,
        edges: g.edges().to_vec(),
        n: g.n(),
        s: g.s(),
        t: g.t(),
    };
    debug_assert!(tree.cover_size() + 1 <= g.n());
    Ok(tree)
}

enum DecreaseAnswer<'a> {
    Unchanged,
    AtNode { value: u64, node: &'a SplitNode },
}

/// Shared dispatch for the decrease queries: validates the change and finds
/// the answering internal node, if any.
fn decrease_lookup<'a>(t: &'a TvitTree, e_id: usize, delta: i64) -> Result<DecreaseAnswer<'a>> {
    let e = *t.edge(e_id)?;
    if delta > 0 {
        return Err(Error::InvalidInput(
            "capacity increases are answered by the insertion oracle".into(),
        ));
    }
    if let CapacityValue::Finite(w) = e.cap {
        if delta < -(w.min(i64::MAX as u64) as i64) {
            return Err(Error::InvalidInput(format!(
                "capacity change {delta} drops edge {e_id} below zero"
            )));
        }
    }
    let (lu, lv) = (t.core.leaf_of[e.tail], t.core.leaf_of[e.head]);
    if lu == lv || t.core.ord_of(e.tail) > t.core.ord_of(e.head) {
        return Ok(DecreaseAnswer::Unchanged);
    }
    let node = &t.core.nodes[t.core.lca(lu, lv)];
    let cap = node.cap.expect("lca of distinct leaves is internal") as i128 + delta as i128;
    debug_assert!(cap >= 0);
    if (cap as u64) < t.fstar {
        Ok(DecreaseAnswer::AtNode {
            value: cap as u64,
            node,
        })
    } else {
        Ok(DecreaseAnswer::Unchanged)
    }
}

/// Maximum-flow value after adding `delta <= 0` to the capacity of edge
/// `e_id`, answered from the tree alone.
pub fn query_cap(t: &TvitTree, e_id: usize, delta: i64) -> Result<u64> {
    Ok(match decrease_lookup(t, e_id, delta)? {
        DecreaseAnswer::Unchanged => t.fstar,
        DecreaseAnswer::AtNode { value, .. } => value,
    })
}

/// A minimum cut of the modified network for the same query.
pub fn query_cut(t: &TvitTree, e_id: usize, delta: i64) -> Result<STCut> {
    Ok(match decrease_lookup(t, e_id, delta)? {
        DecreaseAnswer::Unchanged => t.global_cut.clone(),
        DecreaseAnswer::AtNode { node, .. } => {
            node.cut.clone().expect("internal node stores its cut")
        }
    })
}

/// Precomputed data answering edge-insertion (and capacity-increase)
/// queries without running a flow.
///
/// `source_core` is the set of vertices inside every minimum cut (the
/// minimal source side); `sink_core` the set outside every minimum cut.
/// For each vertex the oracle keeps the cheapest cut forcing it onto the
/// sink side (`exclude_*`) and onto the source side (`include_*`), along
/// with rebuildable records of the cut-family structures for those values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InsertOracle {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub fstar: u64,
    pub source_core: Vec<bool>,
    pub sink_core: Vec<bool>,
    pub nearest: STCut,
    pub farthest: STCut,
    pub exclude_cap: Vec<CapacityValue>,
    pub exclude_cut: Vec<Option<STCut>>,
    pub exclude_rec: Vec<Option<TopoRecord>>,
    pub include_cap: Vec<CapacityValue>,
    pub include_cut: Vec<Option<STCut>>,
    pub include_rec: Vec<Option<TopoRecord>>,
    pub global_rec: TopoRecord,
    pub edges: Vec<Edge>,
}

/// Builds the insertion oracle: one residual sweep for the cores plus, per
/// vertex, the cheapest one-sided forced cuts and their family records.
pub fn build_insert_oracle(g: &FlowNetwork) -> Result<InsertOracle> {
    let f = max_flow(g)?;
    let fstar = f.value;
    let source_core = residual_source_side(g, &f);
    let sink_core = residual_sink_side(g, &f);
    let nearest = nearest_mincut(g, &f)?;
    let farthest = farthest_mincut_of(g, &f)?;
    let global = build_pq(g)?;
    let global_rec = global.record();

    let n = g.n();
    let mut exclude_cap = vec![CapacityValue::Infinite; n];
    let mut exclude_cut: Vec<Option<STCut>> = vec![None; n];
    let mut exclude_rec: Vec<Option<TopoRecord>> = vec![None; n];
    let mut include_cap = vec![CapacityValue::Infinite; n];
    let mut include_cut: Vec<Option<STCut>> = vec![None; n];
    let mut include_rec: Vec<Option<TopoRecord>> = vec![None; n];

    for v in 0..n {
        if v == g.s() {
            include_cap[v] = CapacityValue::Finite(fstar);
            include_cut[v] = Some(nearest.clone());
            include_rec[v] = Some(global_rec.clone());
            continue;
        }
        if v == g.t() {
            exclude_cap[v] = CapacityValue::Finite(fstar);
            exclude_cut[v] = Some(nearest.clone());
            exclude_rec[v] = Some(global_rec.clone());
            continue;
        }
        let (cap, cut) = mincut_with(g, &[], &[v])?;
        exclude_cap[v] = cap;
        exclude_cut[v] = cut;
        if cap.is_finite() {
            let (d, _) = build_pq_forced(g, &[], &[v])?;
            exclude_rec[v] = Some(d.record());
        }
        let (cap, cut) = mincut_with(g, &[v], &[])?;
        include_cap[v] = cap;
        include_cut[v] = cut;
        if cap.is_finite() {
            let (d, _) = build_pq_forced(g, &[v], &[])?;
            include_rec[v] = Some(d.record());
        }
        if source_core[v] {
            debug_assert!(exclude_cap[v] > CapacityValue::Finite(fstar));
        }
        if sink_core[v] {
            debug_assert!(include_cap[v] > CapacityValue::Finite(fstar));
        }
    }

    Ok(InsertOracle {
        n,
        s: g.s(),
        t: g.t(),
        fstar,
        source_core,
        sink_core,
        nearest,
        farthest,
        exclude_cap,
        exclude_cut,
        exclude_rec,
        include_cap,
        include_cut,
        include_rec,
        global_rec,
        edges: g.edges().to_vec(),
    })
}

fn cv_cmp(a: CapacityValue, b: CapacityValue) -> Ordering {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Maximum-flow value and a witness minimum cut after inserting an edge
/// `(u, v)` of capacity `delta > 0` (equivalently, increasing an existing
/// `(u, v)` capacity by `delta`).
pub fn query_insert(
    o: &InsertOracle,
    u: usize,
    v: usize,
    delta: u64,
) -> Result<(CapacityValue, STCut)> {
    if u >= o.n || v >= o.n {
        return Err(Error::InvalidInput(format!(
            "insertion endpoint out of range: ({u}, {v}) with n = {}",
            o.n
        )));
    }
    if delta == 0 {
        return Err(Error::InvalidInput(
            "inserted capacity must be positive".into(),
        ));
    }
    if u == v || u == o.t || v == o.s {
        return Err(Error::InvalidInput(format!(
            "degenerate insertion endpoints ({u}, {v})"
        )));
    }
    if !o.source_core[u] {
        // The minimal-side minimum cut keeps u outside, so the new edge
        // cannot contribute to it.
        return Ok((CapacityValue::Finite(o.fstar), o.nearest.clone()));
    }
    if !o.sink_core[v] {
        // The maximal-side minimum cut keeps v (and u) inside.
        return Ok((CapacityValue::Finite(o.fstar), o.farthest.clone()));
    }
    // Every minimum cut separates u from v, so the answer is the cheapest of:
    // forcing u out, forcing v in, or paying delta on top of a current cut.
    let candidates: [(CapacityValue, Option<&STCut>); 3] = [
        (o.exclude_cap[u], o.exclude_cut[u].as_ref()),
        (o.include_cap[v], o.include_cut[v].as_ref()),
        (
            CapacityValue::Finite(o.fstar.saturating_add(delta)),
            Some(&o.nearest),
        ),
    ];
    let (best_cap, best_cut) = candidates
        .into_iter()
        .min_by(|a, b| cv_cmp(a.0, b.0))
        .expect("three candidates");
    let cut = best_cut
        .expect("finite candidate carries a witness cut")
        .clone();
    Ok((best_cap, cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{cover_gadget, gen_gm, gen_gsq, path_graph, random_network};
    use crate::maxflow::max_flow;
    use crate::oracle::CutCatalog;

    fn recompute_decrease(g: &FlowNetwork, e_id: usize, delta: i64) -> u64 {
        let e = *g.edge(e_id).unwrap();
        let modified = match e.cap {
            CapacityValue::Infinite => g.clone(),
            CapacityValue::Finite(w) => {
                let new_w = (w as i128 + delta as i128) as u64;
                if new_w == 0 {
                    g.without_edge(e_id).unwrap()
                } else {
                    g.with_edge_capacity(e_id, CapacityValue::Finite(new_w))
                        .unwrap()
                }
            }
        };
        max_flow(&modified).unwrap().value
    }

    #[test]
    fn path_tree_splits_every_vertex_apart() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let t = build_tvit(&g).unwrap();
        assert_eq!(t.cover_size(), 3);
        let ords: Vec<usize> = (0..4).map(|v| t.core.ord_of(v)).collect();
        assert_eq!(ords, vec![0, 1, 2, 3]);
        assert_eq!(query_cap(&t, 1, 0).unwrap(), 3);
        assert_eq!(query_cap(&t, 1, -1).unwrap(), 2);
        assert_eq!(query_cap(&t, 1, -3).unwrap(), 0);
        assert_eq!(query_cap(&t, 0, -1).unwrap(), 3);
        assert_eq!(query_cap(&t, 0, -3).unwrap(), 2);
        assert_eq!(query_cap(&t, 0, -5).unwrap(), 0);
        let cut = query_cut(&t, 1, -3).unwrap();
        assert_eq!(cut.vertices(), vec![0, 1]);
        // No capacity drop: the stored global minimum cut comes back.
        let cut = query_cut(&t, 2, -1).unwrap();
        assert_eq!(cut.vertices(), t.global_cut.vertices());
    }

    #[test]
    fn gadget_cover_matches_enumerated_minimum_cover() {
        let g = cover_gadget();
        let t = build_tvit(&g).unwrap();
        let cover = t.core.cover();
        let sides: Vec<Vec<usize>> = cover.iter().map(|(_, c)| c.vertices()).collect();
        assert_eq!(sides, vec![vec![0], vec![0, 2], vec![0, 1, 2]]);
        let caps: Vec<u64> = cover.iter().map(|(c, _)| *c).collect();
        assert_eq!(caps, vec![8, 9, 9]);
        // Left/right orientation: source-side leaf first in order.
        assert!(t.core.ord_of(0) < t.core.ord_of(1));
        assert!(t.core.ord_of(2) < t.core.ord_of(1));
    }

    #[test]
    fn gadget_queries_match_frozen_vitality() {
        let g = cover_gadget();
        let t = build_tvit(&g).unwrap();
        // Full drops land at fstar minus the frozen per-edge vitality.
        let w_min = [5u64, 3, 1, 6, 1];
        for (e, &wm) in w_min.iter().enumerate() {
            let w = g.edge(e).unwrap().cap.finite().unwrap();
            assert_eq!(query_cap(&t, e, -(w as i64)).unwrap(), 8 - wm);
        }
        // The cut answering for edge 4 is one of the three enumerated
        // minimum cuts for it.
        let cut = query_cut(&t, 4, -2).unwrap();
        assert_eq!(cut.vertices(), vec![0, 2]);
        assert_eq!(cut.capacity, CapacityValue::Finite(9));
    }

    #[test]
    fn square_grid_middles_share_a_leaf_and_answer_fstar() {
        let g = gen_gsq(2, &[5, 6, 7, 8]).unwrap();
        let t = build_tvit(&g).unwrap();
        for (i, v) in [(1usize, 3usize), (1, 4), (2, 3), (2, 4)] {
            assert_eq!(t.core.leaf_of[i], t.core.leaf_of[v]);
        }
        for e in 4..8 {
            let w = g.edge(e).unwrap().cap.finite().unwrap() as i64;
            assert_eq!(query_cap(&t, e, -w).unwrap(), 2);
        }
        assert!(t.cover_size() <= g.n() - 1);
    }

    #[test]
    fn decrease_answers_match_flow_recomputation() {
        let mut fixtures = vec![
            path_graph(&[5, 3, 7]).unwrap(),
            cover_gadget(),
            gen_gsq(2, &[5, 6, 7, 8]).unwrap(),
            gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap(),
        ];
        for seed in 0..4 {
            fixtures.push(random_network(8, 18, 12, seed).unwrap());
        }
        for g in &fixtures {
            let t = build_tvit(g).unwrap();
            for e in g.edges() {
                for delta in [i64::MIN, -1, 0] {
                    let delta = if delta == i64::MIN {
                        match e.cap.finite() {
                            Some(w) => -(w as i64),
                            None => -1,
                        }
                    } else {
                        delta
                    };
                    if let Some(w) = e.cap.finite() {
                        if (w as i64) < -delta {
                            continue;
                        }
                    }
                    let got = query_cap(&t, e.id, delta).unwrap();
                    let want = recompute_decrease(g, e.id, delta);
                    assert_eq!(got, want, "edge {} delta {delta}", e.id);
                    // The returned cut is a genuine cut of the modified
                    // network with exactly the returned capacity.
                    let cut = query_cut(&t, e.id, delta).unwrap();
                    let modified = match e.cap.finite() {
                        Some(w) if (w as i128 + delta as i128) == 0 => {
                            g.without_edge(e.id).unwrap()
                        }
                        Some(w) => g
                            .with_edge_capacity(
                                e.id,
                                CapacityValue::Finite((w as i128 + delta as i128) as u64),
                            )
                            .unwrap(),
                        None => g.clone(),
                    };
                    let side: Vec<bool> =
                        (0..g.n()).map(|x| cut.contains(x)).collect();
                    let recut = STCut::from_side(&modified, &side).unwrap();
                    assert_eq!(recut.capacity, CapacityValue::Finite(got));
                }
            }
        }
    }

    #[test]
    fn lca_cuts_are_minimum_cuts_for_their_edges() {
        let g = cover_gadget();
        let cat = CutCatalog::compute(&g).unwrap();
        let t = build_tvit(&g).unwrap();
        for e in g.edges() {
            if cat.vitality[e.id] == 0 {
                continue;
            }
            let (lu, lv) = (t.core.leaf_of[e.tail], t.core.leaf_of[e.head]);
            assert_ne!(lu, lv, "vital edge endpoints must be separated");
            let node = &t.core.nodes[t.core.lca(lu, lv)];
            let cut = node.cut.as_ref().unwrap();
            assert_eq!(CapacityValue::Finite(node.cap.unwrap()), cat.lambda[e.id]);
            assert!(cut.contains(e.tail) && !cut.contains(e.head));
            assert_eq!(cut.capacity, cat.lambda[e.id]);
        }
    }

    #[test]
    fn rejects_unknown_edges_and_out_of_range_changes() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let t = build_tvit(&g).unwrap();
        assert!(matches!(
            query_cap(&t, 99, 0),
            Err(Error::UnknownEdge(99))
        ));
        assert!(matches!(
            query_cap(&t, 1, -4),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(query_cap(&t, 1, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn insert_oracle_cores_match_enumerated_cut_sides() {
        let fixtures = vec![
            path_graph(&[1, 1, 1]).unwrap(),
            cover_gadget(),
            gen_gsq(2, &[5, 6, 7, 8]).unwrap(),
            gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap(),
            random_network(8, 18, 12, 5).unwrap(),
        ];
        for g in &fixtures {
            let o = build_insert_oracle(g).unwrap();
            let cat = CutCatalog::compute(g).unwrap();
            let mut inter = vec![true; g.n()];
            let mut union = vec![false; g.n()];
            for &ci in &cat.mincuts {
                let side = cat.side(ci);
                for v in 0..g.n() {
                    inter[v] &= side[v];
                    union[v] |= side[v];
                }
            }
            assert_eq!(o.source_core, inter);
            let outside: Vec<bool> = union.iter().map(|&b| !b).collect();
            assert_eq!(o.sink_core, outside);
        }
    }

    #[test]
    fn grid_matrix_cores_and_insert_value() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        let o = build_insert_oracle(&g).unwrap();
        let core: Vec<usize> = (0..g.n()).filter(|&v| o.source_core[v]).collect();
        assert_eq!(core, vec![0, 1, 2]);
        let sink: Vec<usize> = (0..g.n()).filter(|&v| o.sink_core[v]).collect();
        assert_eq!(sink, vec![3, 4, 5]);
        // Both one-sided forcings cross an infinite edge, so the only
        // candidate left is paying delta on a current minimum cut.
        let (cap, cut) = query_insert(&o, 1, 4, 3).unwrap();
        assert_eq!(cap, CapacityValue::Finite(13));
        let (h, _) = g
            .with_inserted_edge(1, 4, CapacityValue::Finite(3))
            .unwrap();
        assert_eq!(max_flow(&h).unwrap().value, 13);
        let side: Vec<bool> = (0..g.n()).map(|x| cut.contains(x)).collect();
        let recut = STCut::from_side(&h, &side).unwrap();
        assert_eq!(recut.capacity, CapacityValue::Finite(13));
    }

    #[test]
    fn unit_path_insert_branches() {
        let g = path_graph(&[1, 1, 1]).unwrap();
        let o = build_insert_oracle(&g).unwrap();
        // Endpoint outside the source core: value unchanged.
        let (cap, cut) = query_insert(&o, 1, 2, 5).unwrap();
        assert_eq!(cap, CapacityValue::Finite(1));
        assert_eq!(cut.vertices(), vec![0]);
        // Head not reaching the sink residually: value unchanged, witness is
        // the maximal-side cut.
        let (cap, cut) = query_insert(&o, 0, 2, 5).unwrap();
        assert_eq!(cap, CapacityValue::Finite(1));
        assert_eq!(cut.vertices(), vec![0, 1, 2]);
        // Both cores hit: a direct source-to-sink insertion raises the value.
        let (cap, _) = query_insert(&o, 0, 3, 5).unwrap();
        assert_eq!(cap, CapacityValue::Finite(6));
    }

    #[test]
    fn insert_answers_match_flow_recomputation() {
        let mut fixtures = vec![
            path_graph(&[2, 5]).unwrap(),
            cover_gadget(),
            gen_gsq(2, &[5, 6, 7, 8]).unwrap(),
        ];
        for seed in 10..14 {
            fixtures.push(random_network(7, 14, 9, seed).unwrap());
        }
        for g in &fixtures {
            let o = build_insert_oracle(g).unwrap();
            for u in 0..g.n() {
                for v in 0..g.n() {
                    if u == v || u == g.t() || v == g.s() {
                        continue;
                    }
                    for delta in [1u64, 4, 9] {
                        let (cap, cut) = query_insert(&o, u, v, delta).unwrap();
                        let (h, _) = g
                            .with_inserted_edge(u, v, CapacityValue::Finite(delta))
                            .unwrap();
                        let want = max_flow(&h).unwrap().value;
                        assert_eq!(
                            cap,
                            CapacityValue::Finite(want),
                            "insert ({u}, {v}) delta {delta}"
                        );
                        let side: Vec<bool> =
                            (0..g.n()).map(|x| cut.contains(x)).collect();
                        let recut = STCut::from_side(&h, &side).unwrap();
                        assert_eq!(recut.capacity, CapacityValue::Finite(want));
                    }
                }
            }
        }
    }

    #[test]
    fn disconnected_terminals_still_answer_inserts() {
        let g = FlowNetwork::new(2, 0, 1).unwrap();
        let o = build_insert_oracle(&g).unwrap();
        assert_eq!(o.fstar, 0);
        let (cap, cut) = query_insert(&o, 0, 1, 4).unwrap();
        assert_eq!(cap, CapacityValue::Finite(4));
        assert_eq!(cut.vertices(), vec![0]);
    }

    #[test]
    fn insert_rejects_degenerate_endpoints() {
        let g = path_graph(&[1, 1, 1]).unwrap();
        let o = build_insert_oracle(&g).unwrap();
        assert!(query_insert(&o, 1, 1, 2).is_err());
        assert!(query_insert(&o, 3, 1, 2).is_err());
        assert!(query_insert(&o, 1, 0, 2).is_err());
        assert!(query_insert(&o, 1, 2, 0).is_err());
        assert!(query_insert(&o, 9, 1, 2).is_err());
    }

    #[test]
    fn tree_and_oracle_round_trip_through_json() {
        let g = cover_gadget();
        let t = build_tvit(&g).unwrap();
        let o = build_insert_oracle(&g).unwrap();
        let t2: TvitTree =
            serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        let o2: InsertOracle =
            serde_json::from_str(&serde_json::to_string(&o).unwrap()).unwrap();
        for e in g.edges() {
            let w = e.cap.finite().unwrap() as i64;
            assert_eq!(
                query_cap(&t, e.id, -w).unwrap(),
                query_cap(&t2, e.id, -w).unwrap()
            );
        }
        let a = query_insert(&o, 2, 3, 4).unwrap();
        let b = query_insert(&o2, 2, 3, 4).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.vertices(), b.1.vertices());
    }
}

