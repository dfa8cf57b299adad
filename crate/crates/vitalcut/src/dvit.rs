//! Acyclic rewrite of the network and the farthest-cut tree.
//!
//! The family of interest is every least-capacity cut of every vital edge
//! (edges with an infinite least cut are excluded: no finite cut of theirs
//! exists). [`build_dvit`] contracts vertices no family member separates,
//! deletes edges that cross one member outward and another inward (such
//! edges are provably nonvital), and re-aims edges that only ever cross
//! inward as capacity-0 reverse arcs. The result is a DAG that keeps the
//! flow value and every vital edge, and in which each family member crosses
//! any directed path at most once. The converse fails: [`max_crossings`]
//! can certify a cut the family does not contain, so the DAG is a summary,
//! not a membership oracle.
//!
//! [`FvitTree`] reuses the split-tree machinery with a different selection:
//! each vital edge contributes its *farthest* least cut (the unique one
//! maximal under inclusion), and equal-value groups are replayed largest
//! side first. The lowest common ancestor of the endpoint leaves then
//! stores exactly the farthest cut of every vital edge, which answers
//! [`query_ifsubcut`] — "is A inside some least cut for e?" — in O(|A|).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cover::SplitCore;
use crate::error::{Error, Result};
use crate::graph::{CapacityValue, Edge, FlowNetwork, STCut};
use crate::maxflow::{max_flow, residual_sink_side};
use crate::pqdag::{build_pq_forced, forced_graph, PQDag};
use crate::vital::{all_vital_edges, VitalAnalysis};

/// How an edge relates to the family of least cuts of all vital edges.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EdgeRole {
    /// Crosses some member outward (tail inside, head outside), never inward.
    ContributesOnly,
    /// Crosses some member inward (head inside, tail outside), never outward.
    IncomingOnly,
    /// Crosses one member outward and another inward. Always nonvital; the
    /// transform deletes these edges.
    Gamma,
    /// No member separates its endpoints; the endpoints share a node and the
    /// edge vanishes into it.
    Neither,
}

impl EdgeRole {
    /// Tag used in the serialized form: what the transform did to the edge.
    pub fn tag(self) -> &'static str {
        match self {
            EdgeRole::ContributesOnly => "kept",
            EdgeRole::IncomingOnly => "reversed0",
            EdgeRole::Gamma => "deleted-gamma",
            EdgeRole::Neither => "absorbed",
        }
    }
}

/// Direction-resolved arc of the transformed DAG.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DvitArcKind {
    /// Original direction and capacity.
    Kept,
    /// Reverse of the original edge at capacity 0: visible to path and
    /// transversality logic, invisible to capacity sums.
    Reversed0,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DvitArc {
    pub tail: usize,
    pub head: usize,
    /// Id of the originating edge.
    pub edge: usize,
    pub cap: CapacityValue,
    pub kind: DvitArcKind,
}

/// The transformed network: a DAG over contraction classes that preserves
/// the flow value and every vital edge with a finite least cut, and in which
/// every stored-family cut is crossed at most once by any directed path.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DvitDag {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub fstar: u64,
    /// Vertex -> node, nodes numbered in topological order.
    pub class_of: Vec<usize>,
    /// Node -> sorted member vertices.
    pub members: Vec<Vec<usize>>,
    /// Node holding s; always 0.
    pub s_node: usize,
    /// Node holding t; always the last node.
    pub t_node: usize,
    /// Arcs sorted by (tail, head, edge); tails always precede heads.
    pub arcs: Vec<DvitArc>,
    /// Role per edge, parallel to `edges`.
    pub roles: Vec<EdgeRole>,
    /// Edge table of the source network.
    pub edges: Vec<Edge>,
}

impl DvitDag {
    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    pub fn role_of(&self, e_id: usize) -> Result<EdgeRole> {
        self.edges
            .binary_search_by_key(&e_id, |e| e.id)
            .map(|pos| self.roles[pos])
            .map_err(|_| Error::UnknownEdge(e_id))
    }

    /// The transformed network as a plain flow network over nodes: kept arcs
    /// only, original ids and capacities. Capacity-0 reverse arcs carry no
    /// flow, so this network has the same flow value as the full DAG.
    pub fn quotient_network(&self) -> Result<FlowNetwork> {
        let mut kept: Vec<Edge> = self
            .arcs
            .iter()
            .filter(|a| a.kind == DvitArcKind::Kept)
            .map(|a| Edge { id: a.edge, tail: a.tail, head: a.head, cap: a.cap })
            .collect();
        kept.sort_by_key(|e| e.id);
        FlowNetwork::from_edge_list(self.node_count(), self.s_node, self.t_node, &kept)
    }

    /// Image of a vertex cut on the nodes. Errors with `NotRepresentable`
    /// when the cut splits a node.
    pub fn node_side(&self, cut: &STCut) -> Result<Vec<bool>> {
        if cut.side.len() != self.n {
            return Err(Error::InvalidInput("cut is over a different vertex set".into()));
        }
        let mut side = vec![None::<bool>; self.node_count()];
        for (v, &inside) in cut.side.iter().enumerate() {
            match side[self.class_of[v]] {
                None => side[self.class_of[v]] = Some(inside),
                Some(prev) if prev != inside => return Err(Error::NotRepresentable),
                _ => {}
            }
        }
        Ok(side
            .into_iter()
            .map(|o| o.expect("every node has a member vertex"))
            .collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nodes": self.members,
            "edges": self
                .arcs
                .iter()
                .map(|a| json!([a.tail, a.head, a.edge, a.cap]))
                .collect::<Vec<_>>(),
            "topo": (0..self.node_count()).collect::<Vec<_>>(),
            "tags": self
                .edges
                .iter()
                .zip(&self.roles)
                .map(|(e, r)| json!({ "edge": e.id, "tag": r.tag() }))
                .collect::<Vec<_>>(),
            "fstar": self.fstar,
        })
    }
}

/// One cut-family DAG per vital edge with a finite least-cut value, in edge
/// order. The stored family of the DAG for edge (u,v) is exactly the set of
/// least-capacity cuts keeping u inside and v outside.
fn family_dags(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<Vec<PQDag>> {
    let mut dags = Vec::new();
    for row in analysis.vital_rows() {
        if !row.lambda.is_some_and(CapacityValue::is_finite) {
            continue;
        }
        let e = g.edge(row.edge)?;
        let (d, _) = build_pq_forced(g, &[e.tail], &[e.head])?;
        dags.push(d);
    }
    Ok(dags)
}

/// Per-node reachability along arcs (reflexive).
fn reach_matrix(d: &PQDag) -> Vec<Vec<bool>> {
    let succ = d.succ();
    (0..d.node_count())
        .map(|v| PQDag::closure(&succ, &[v]))
        .collect()
}

/// Does some stored cut of `d` keep node `a` inside and node `b` outside?
/// Stored cut sides are the arc-closed node sets containing the source node
/// and missing the sink node, so the test is: distinct nodes, `a` not pinned
/// outside, `b` not pinned inside, and no arc path forces `b` in with `a`.
fn separable(d: &PQDag, reach: &[Vec<bool>], a: usize, b: usize) -> bool {
    a != b && a != d.sink_node && b != d.source_node && !reach[a][b]
}

/// Role of every edge with respect to the union of the given cut families,
/// parallel to `g.edges()`.
fn roles_from_dags(g: &FlowNetwork, dags: &[PQDag]) -> Vec<EdgeRole> {
    let reaches: Vec<Vec<Vec<bool>>> = dags.iter().map(reach_matrix).collect();
    g.edges()
        .iter()
        .map(|e| {
            let mut out = false;
            let mut inward = false;
            for (d, reach) in dags.iter().zip(&reaches) {
                let (a, b) = (d.phi[e.tail], d.phi[e.head]);
                out = out || separable(d, reach, a, b);
                inward = inward || separable(d, reach, b, a);
            }
            match (out, inward) {
                (true, false) => EdgeRole::ContributesOnly,
                (false, true) => EdgeRole::IncomingOnly,
                (true, true) => EdgeRole::Gamma,
                (false, false) => EdgeRole::Neither,
            }
        })
        .collect()
}

/// Role of every edge with respect to the family of all least cuts of all
/// vital edges (finite least-cut values only), parallel to `g.edges()`.
pub fn edge_roles(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<Vec<EdgeRole>> {
    Ok(roles_from_dags(g, &family_dags(g, analysis)?))
}

/// Core of the transform over an explicit list of cut-family DAGs.
fn transform(g: &FlowNetwork, dags: &[PQDag], fstar: u64) -> Result<DvitDag> {
    if dags.is_empty() {
        return Err(Error::InvalidInput(
            "no vital edge has a finite least cut; nothing separates the vertices".into(),
        ));
    }
    let n = g.n();
    let roles = roles_from_dags(g, dags);

    // Contract vertices no family member separates: within one DAG that is
    // "same node", so the classes are the distinct per-DAG node tuples.
    let mut class_raw = vec![usize::MAX; n];
    let mut min_vertex: Vec<usize> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for v in 0..n {
        let key: Vec<usize> = dags.iter().map(|d| d.phi[v]).collect();
        let next = seen.len();
        let c = *seen.entry(key).or_insert(next);
        if c == min_vertex.len() {
            min_vertex.push(v);
        }
        class_raw[v] = c;
    }
    let k = seen.len();
    debug_assert_ne!(class_raw[g.s()], class_raw[g.t()]);

    let mut raw_arcs: Vec<DvitArc> = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let (qt, qh) = (class_raw[e.tail], class_raw[e.head]);
        debug_assert_eq!(qt == qh, roles[i] == EdgeRole::Neither);
        match roles[i] {
            EdgeRole::ContributesOnly => raw_arcs.push(DvitArc {
                tail: qt,
                head: qh,
                edge: e.id,
                cap: e.cap,
                kind: DvitArcKind::Kept,
            }),
            EdgeRole::IncomingOnly => raw_arcs.push(DvitArc {
                tail: qh,
                head: qt,
                edge: e.id,
                cap: CapacityValue::ZERO,
                kind: DvitArcKind::Reversed0,
            }),
            EdgeRole::Gamma | EdgeRole::Neither => {}
        }
    }

    // Priority topological order: the node of s first, the node of t last,
    // otherwise smallest member vertex first. Every family member keeps the
    // node of s inside and the node of t outside, so no arc enters the
    // former or leaves the latter.
    let mut indeg = vec![0usize; k];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    for a in &raw_arcs {
        indeg[a.head] += 1;
        succ[a.tail].push(a.head);
    }
    let key = |c: usize| -> (u8, usize) {
        if c == class_raw[g.s()] {
            (0, 0)
        } else if c == class_raw[g.t()] {
            (2, 0)
        } else {
            (1, min_vertex[c])
        }
    };
    let mut heap = std::collections::BinaryHeap::new();
    for c in 0..k {
        if indeg[c] == 0 {
            heap.push(std::cmp::Reverse((key(c), c)));
        }
    }
    let mut order = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &w in &succ[c] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(std::cmp::Reverse((key(w), w)));
            }
        }
    }
    if order.len() != k {
        return Err(Error::InvariantViolation("transformed graph has a directed cycle".into()));
    }
    let mut pos = vec![0usize; k];
    for (i, &c) in order.iter().enumerate() {
        pos[c] = i;
    }
    debug_assert_eq!(pos[class_raw[g.s()]], 0);
    debug_assert_eq!(pos[class_raw[g.t()]], k - 1);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut class_of = vec![0usize; n];
    for v in 0..n {
        class_of[v] = pos[class_raw[v]];
        members[class_of[v]].push(v);
    }
    let mut arcs: Vec<DvitArc> = raw_arcs
        .into_iter()
        .map(|a| DvitArc { tail: pos[a.tail], head: pos[a.head], ..a })
        .collect();
    arcs.sort_by_key(|a| (a.tail, a.head, a.edge));
    debug_assert!(arcs.iter().all(|a| a.tail < a.head));

    Ok(DvitDag {
        n,
        s: g.s(),
        t: g.t(),
        fstar,
        class_of,
        members,
        s_node: 0,
        t_node: k - 1,
        arcs,
        roles,
        edges: g.edges().to_vec(),
    })
}

/// Builds the transformed DAG from the family of all least cuts of all
/// vital edges (finite least-cut values only). Errors when that family is
/// empty, i.e. when the flow value is zero.
pub fn build_dvit(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<DvitDag> {
    transform(g, &family_dags(g, analysis)?, analysis.fstar)
}

/// The unique inclusion-maximal least cut keeping the edge's tail inside and
/// head outside: the complement of the vertices that residually reach t
/// under a maximum flow of the pinned network. Errors with `NotVital` for
/// nonvital edges and with `UnboundedFlow` for vital edges of infinite
/// capacity, which have no finite least cut.
pub fn farthest_mincut(g: &FlowNetwork, e_id: usize) -> Result<STCut> {
    let e = *g.edge(e_id)?;
    if e.head == g.s() || e.tail == g.t() {
        // Such an edge crosses no (s,t)-cut at all, so no cut capacity
        // changes when it goes away.
        return Err(Error::NotVital(e_id));
    }
    let f = max_flow(g)?;
    match e.cap {
        CapacityValue::Finite(w) => {
            let h = forced_graph(g, &[e.tail], &[e.head])?;
            let fh = match max_flow(&h) {
                Ok(fh) => fh,
                Err(Error::UnboundedFlow) => return Err(Error::NotVital(e_id)),
                Err(other) => return Err(other),
            };
            debug_assert!(fh.value >= w, "the edge crosses its own least cut");
            if fh.value - w >= f.value {
                return Err(Error::NotVital(e_id));
            }
            let reach_t = residual_sink_side(&h, &fh);
            let side: Vec<bool> = reach_t.iter().map(|&b| !b).collect();
            let cut = STCut::from_side(g, &side)?;
            debug_assert_eq!(cut.capacity, CapacityValue::Finite(fh.value));
            Ok(cut)
        }
        CapacityValue::Infinite => {
            // Infinite edges have no finite cut to report; they are vital
            // exactly when removing them lowers the flow value.
            let rest: Vec<Edge> = g.edges().iter().copied().filter(|x| x.id != e_id).collect();
            let g2 = FlowNetwork::from_edge_list(g.n(), g.s(), g.t(), &rest)?;
            if max_flow(&g2)?.value == f.value {
                Err(Error::NotVital(e_id))
            } else {
                Err(Error::UnboundedFlow)
            }
        }
    }
}

/// What a per-edge farthest-cut query can answer.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CutQueryKind {
    /// Vital with a finite least cut: the tree stores its farthest cut.
    Stored,
    /// Vital of infinite capacity: no finite least cut exists.
    Unbounded,
    Nonvital,
}

/// Split tree whose internal nodes store farthest least cuts: the lowest
/// common ancestor of the endpoint leaves of any stored vital edge holds
/// exactly that edge's farthest cut.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FvitTree {
    pub core: SplitCore,
    pub fstar: u64,
    /// Edge table of the underlying network, for id lookup.
    pub edges: Vec<Edge>,
    /// Query class per edge, parallel to `edges`.
    pub kinds: Vec<CutQueryKind>,
    pub n: usize,
    pub s: usize,
    pub t: usize,
}

impl FvitTree {
    fn index_of(&self, e_id: usize) -> Result<usize> {
        self.edges
            .binary_search_by_key(&e_id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(e_id))
    }

    pub fn edge(&self, e_id: usize) -> Result<&Edge> {
        self.index_of(e_id).map(|i| &self.edges[i])
    }

    /// Number of stored cuts (internal nodes); at most n-1.
    pub fn cover_size(&self) -> usize {
        self.core.nodes.iter().filter(|x| !x.is_leaf()).count()
    }

    /// The farthest least cut of a vital edge, straight off the lowest
    /// common ancestor of its endpoint leaves.
    pub fn farthest_cut(&self, e_id: usize) -> Result<&STCut> {
        let i = self.index_of(e_id)?;
        match self.kinds[i] {
            CutQueryKind::Nonvital => Err(Error::NotVital(e_id)),
            CutQueryKind::Unbounded => Err(Error::UnboundedFlow),
            CutQueryKind::Stored => {
                let e = &self.edges[i];
                let node = self
                    .core
                    .lca(self.core.leaf_of[e.tail], self.core.leaf_of[e.head]);
                self.core.nodes[node].cut.as_ref().ok_or_else(|| {
                    Error::InvariantViolation(format!(
                        "endpoints of stored edge {e_id} share a leaf"
                    ))
                })
            }
        }
    }
}

/// Builds the farthest-cut tree from a precomputed edge classification.
/// Items are replayed in nondecreasing least-cut value; within one value the
/// largest farthest cut goes first, which makes every skipped edge inherit
/// its own farthest cut at the lowest common ancestor.
pub fn build_fvit_from_analysis(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<FvitTree> {
    let mut rows: Vec<(u64, usize, usize, usize, usize, STCut)> = Vec::new();
    for row in analysis.vital_rows() {
        let Some(lambda) = row.lambda.and_then(CapacityValue::finite) else {
            continue;
        };
        let e = *g.edge(row.edge)?;
        let h = forced_graph(g, &[e.tail], &[e.head])?;
        let fh = max_flow(&h)?;
        if fh.value != lambda {
            return Err(Error::InvariantViolation(format!(
                "stored least-cut value {lambda} for edge {} disagrees with recomputed {}",
                e.id, fh.value
            )));
        }
        let reach_t = residual_sink_side(&h, &fh);
        let side: Vec<bool> = reach_t.iter().map(|&b| !b).collect();
        let cut = STCut::from_side(g, &side)?;
        let size = cut.side.iter().filter(|&&b| b).count();
        rows.push((lambda, size, e.id, e.tail, e.head, cut));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let items: Vec<(usize, usize, u64, STCut)> =
        rows.into_iter().map(|(l, _, _, u, v, c)| (u, v, l, c)).collect();
    let core = SplitCore::build(g.n(), &items)?;

    let mut kinds = vec![CutQueryKind::Nonvital; g.m()];
    for row in analysis.vital_rows() {
        let i = g.index_of(row.edge)?;
        kinds[i] = if row.lambda.is_some_and(CapacityValue::is_finite) {
            CutQueryKind::Stored
        } else {
            CutQueryKind::Unbounded
        };
    }
    Ok(FvitTree {
        core,
        fstar: analysis.fstar,
        edges: g.edges().to_vec(),
        kinds,
        n: g.n(),
        s: g.s(),
        t: g.t(),
    })
}

/// Builds the farthest-cut tree, classifying edges internally.
pub fn build_fvit(g: &FlowNetwork) -> Result<FvitTree> {
    let analysis = all_vital_edges(g)?;
    build_fvit_from_analysis(g, &analysis)
}

/// Is `a` contained in some least cut for the edge? Equivalent to
/// containment in the farthest cut, checked in O(|a|) off the bitmap.
pub fn query_ifsubcut(f: &FvitTree, a: &[usize], e_id: usize) -> Result<bool> {
    let cut = f.farthest_cut(e_id)?;
    for &v in a {
        if v >= f.n {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
        if !cut.contains(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How often a directed simple path crosses the cut boundary, in either
/// direction. Validates that consecutive vertices are joined by an edge and
/// that no vertex repeats.
pub fn path_crossings(g: &FlowNetwork, path: &[usize], cut: &STCut) -> Result<usize> {
    if cut.side.len() != g.n() {
        return Err(Error::InvalidInput("cut is over a different vertex set".into()));
    }
    if path.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    let mut seen = HashSet::new();
    for &v in path {
        if v >= g.n() {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidInput(format!("vertex {v} repeats; path is not simple")));
        }
    }
    let present: HashSet<(usize, usize)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    let mut crossings = 0;
    for w in path.windows(2) {
        if !present.contains(&(w[0], w[1])) {
            return Err(Error::InvalidInput(format!("no edge ({},{})", w[0], w[1])));
        }
        if cut.side[w[0]] != cut.side[w[1]] {
            crossings += 1;
        }
    }
    Ok(crossings)
}

/// Largest number of cut-boundary crossings over all directed paths of the
/// transformed DAG, counting capacity-0 reverse arcs like any other arc.
/// Errors with `NotRepresentable` when the cut splits a node.
pub fn max_crossings(d: &DvitDag, cut: &STCut) -> Result<usize> {
    let side = d.node_side(cut)?;
    // Arcs are sorted by tail and always ascend, so one pass relaxes in
    // topological order; starts and ends are unconstrained.
    let mut best = vec![0usize; d.node_count()];
    for a in &d.arcs {
        let gain = usize::from(side[a.tail] != side[a.head]);
        best[a.head] = best[a.head].max(best[a.tail] + gain);
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{cover_gadget, gen_gm, path_graph, random_network, zigzag_ladder};
    use crate::oracle::{mask_to_side, CutCatalog};
    use crate::pqdag::{build_pq, ArcKind};
    use crate::vital::EdgeKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Two-prong fan: s feeds a, a splits to b and c, both drain to t. The
    /// cheap drains push every least cut past the split, so {s,a} is crossed
    /// exactly once by each of the two paths yet belongs to no vital edge's
    /// family.
    fn fan_witness() -> FlowNetwork {
        let mut g = FlowNetwork::new(5, 0, 4).unwrap();
        for (tail, head, cap) in [(0, 1, 10), (1, 2, 4), (1, 3, 4), (2, 4, 2), (3, 4, 2)] {
            g.add_edge(tail, head, CapacityValue::Finite(cap)).unwrap();
        }
        g
    }

    /// Two parallel unit paths whose middles are tied together by a huge
    /// two-way cycle: no least cut separates u from v, so the pair contracts
    /// and the cycle edges are absorbed.
    fn twin_hub() -> FlowNetwork {
        let mut g = FlowNetwork::new(4, 0, 3).unwrap();
        for (tail, head, cap) in [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, 100), (2, 1, 100)]
        {
            g.add_edge(tail, head, CapacityValue::Finite(cap)).unwrap();
        }
        g
    }

    /// Union of the least-cut families of all vital finite-value edges, as
    /// vertex masks, straight from exhaustive enumeration.
    fn oracle_family(g: &FlowNetwork, cat: &CutCatalog) -> Vec<u32> {
        let mut members: Vec<u32> = Vec::new();
        for k in 0..g.m() {
            if cat.vitality[k] > 0 && cat.lambda[k].is_finite() {
                members.extend(cat.mincuts_for[k].iter().map(|&ci| cat.mask(ci)));
            }
        }
        members.sort_unstable();
        members.dedup();
        members
    }

    fn oracle_roles(g: &FlowNetwork, cat: &CutCatalog) -> Vec<EdgeRole> {
        let members = oracle_family(g, cat);
        g.edges()
            .iter()
            .map(|e| {
                let out = members
                    .iter()
                    .any(|m| m >> e.tail & 1 == 1 && m >> e.head & 1 == 0);
                let inward = members
                    .iter()
                    .any(|m| m >> e.tail & 1 == 0 && m >> e.head & 1 == 1);
                match (out, inward) {
                    (true, false) => EdgeRole::ContributesOnly,
                    (false, true) => EdgeRole::IncomingOnly,
                    (true, true) => EdgeRole::Gamma,
                    (false, false) => EdgeRole::Neither,
                }
            })
            .collect()
    }

    fn small_graphs() -> Vec<FlowNetwork> {
        let mut gs = vec![
            fan_witness(),
            twin_hub(),
            cover_gadget(),
            path_graph(&[2, 1, 2]).unwrap(),
            zigzag_ladder(3).unwrap(),
            gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap(),
        ];
        for seed in 0..20 {
            let n = 6 + (seed as usize % 4);
            gs.push(random_network(n, 2 * n + 2, 7, seed).unwrap());
        }
        gs
    }

    #[test]
    fn roles_agree_with_the_oracle_everywhere() {
        for (i, g) in small_graphs().iter().enumerate() {
            let analysis = all_vital_edges(g).unwrap();
            let cat = CutCatalog::compute(g).unwrap();
            assert_eq!(
                edge_roles(g, &analysis).unwrap(),
                oracle_roles(g, &cat),
                "graph {i}"
            );
        }
    }

    #[test]
    fn fan_has_a_one_transversal_cut_outside_the_family() {
        let g = fan_witness();
        let analysis = all_vital_edges(&g).unwrap();
        let roles = edge_roles(&g, &analysis).unwrap();
        assert!(roles.iter().all(|&r| r == EdgeRole::ContributesOnly));

        let d = build_dvit(&g, &analysis).unwrap();
        assert_eq!(d.node_count(), 5);
        assert_eq!(d.arcs.len(), 5);

        let sa = STCut::from_vertices(&g, &[0, 1]).unwrap();
        assert_eq!(max_crossings(&d, &sa).unwrap(), 1);

        let cat = CutCatalog::compute(&g).unwrap();
        let family = oracle_family(&g, &cat);
        assert!(!family.contains(&0b00011), "{{s,a}} must not be a member");
        for &m in &family {
            let cut = STCut::from_side(&g, &mask_to_side(g.n(), m)).unwrap();
            assert!(max_crossings(&d, &cut).unwrap() <= 1);
        }
    }

    #[test]
    fn zigzag_side_edges_are_deleted_or_reversed() {
        for n in [3usize, 4, 5] {
            let g = zigzag_ladder(n).unwrap();
            let analysis = all_vital_edges(&g).unwrap();
            let cat = CutCatalog::compute(&g).unwrap();
            let roles = edge_roles(&g, &analysis).unwrap();
            assert_eq!(roles, oracle_roles(&g, &cat), "n={n}");

            // Source edges, rungs, and sink edges survive. Every chain edge
            // crosses one family member outward and another inward, as does
            // the unit-capacity back edge (v_2, u_1). The heavier back edges
            // (v_{i+1}, u_i) with i >= 2 never point out of a member: pulling
            // u_i inside a candidate cut costs 1 but saves their capacity i,
            // so a strictly cheaper cut always undercuts them. They only
            // point inward and get reversed at capacity zero.
            for (i, &r) in roles.iter().enumerate() {
                let expect = if i < 3 * n {
                    EdgeRole::ContributesOnly
                } else if i <= 4 * n - 1 {
                    EdgeRole::Gamma
                } else {
                    EdgeRole::IncomingOnly
                };
                assert_eq!(r, expect, "n={n} edge {i}");
            }

            // The deleted and reversed edges are all non-vital.
            for (i, row) in analysis.rows.iter().enumerate() {
                if roles[i] != EdgeRole::ContributesOnly {
                    assert_eq!(row.class, EdgeKind::Nonvital, "n={n} edge {i}");
                }
            }
        }
    }

    #[test]
    fn zigzag_cut_flattens_after_the_transform() {
        let n = 3;
        let g = zigzag_ladder(n).unwrap();
        let analysis = all_vital_edges(&g).unwrap();

        // {s, u_1..u_n} is a least cut for the first rung; the weaving path
        // s,u_3,v_3,u_2,v_2,u_1,v_1,t crosses its boundary 2n-1 times.
        let c = STCut::from_vertices(&g, &[0, 1, 2, 3]).unwrap();
        let cat = CutCatalog::compute(&g).unwrap();
        let mask = 0b0000_1111u32;
        let ci = cat.index_of_mask(mask).unwrap();
        assert!(cat.mincuts_for[n].contains(&ci), "first rung keeps the cut");
        assert_eq!(c.capacity, CapacityValue::Finite((n * n + n) as u64));

        let path = vec![0, 3, 6, 2, 5, 1, 4, 7];
        assert_eq!(path_crossings(&g, &path, &c).unwrap(), 2 * n - 1);

        let d = build_dvit(&g, &analysis).unwrap();
        assert_eq!(d.node_count(), 2 * n + 2);
        let kept = d.arcs.iter().filter(|a| a.kind == DvitArcKind::Kept).count();
        let reversed = d.arcs.iter().filter(|a| a.kind == DvitArcKind::Reversed0).count();
        assert_eq!(kept, 3 * n);
        assert_eq!(reversed, n - 2);
        assert_eq!(max_crossings(&d, &c).unwrap(), 1);
    }

    #[test]
    fn twin_vertices_collapse_and_their_cycle_is_absorbed() {
        let g = twin_hub();
        let analysis = all_vital_edges(&g).unwrap();
        let d = build_dvit(&g, &analysis).unwrap();
        assert_eq!(d.members, vec![vec![0], vec![1, 2], vec![3]]);
        assert_eq!(d.role_of(4).unwrap(), EdgeRole::Neither);
        assert_eq!(d.role_of(5).unwrap(), EdgeRole::Neither);
        assert_eq!(d.arcs.len(), 4);

        let qn = d.quotient_network().unwrap();
        assert_eq!(max_flow(&qn).unwrap().value, 2);

        let tags = d.to_json();
        assert_eq!(tags["tags"][4]["tag"], "absorbed");
        assert_eq!(tags["tags"][0]["tag"], "kept");
    }

    #[test]
    fn restricted_to_the_cheapest_cuts_the_transform_mirrors_the_flow_dag() {
        let mut gs = vec![
            fan_witness(),
            cover_gadget(),
            zigzag_ladder(3).unwrap(),
            gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap(),
        ];
        for seed in 100..110 {
            gs.push(random_network(8, 18, 6, seed).unwrap());
        }
        for (i, g) in gs.iter().enumerate() {
            let dpq = build_pq(g).unwrap();
            let f = max_flow(g).unwrap();
            let dv = transform(g, std::slice::from_ref(&dpq), f.value).unwrap();

            assert_eq!(dv.node_count(), dpq.node_count(), "graph {i}");
            let map: Vec<usize> = (0..dpq.node_count())
                .map(|x| dv.class_of[dpq.nodes[x][0]])
                .collect();
            for (x, vs) in dpq.nodes.iter().enumerate() {
                assert_eq!(&dv.members[map[x]], vs, "graph {i}");
            }
            assert_eq!(dv.arcs.len(), dpq.arcs.len(), "graph {i}");
            for a in &dpq.arcs {
                let mirrored = dv
                    .arcs
                    .iter()
                    .find(|b| b.edge == a.edge)
                    .unwrap_or_else(|| panic!("graph {i}: edge {} lost", a.edge));
                assert_eq!(mirrored.tail, map[a.to], "graph {i}");
                assert_eq!(mirrored.head, map[a.from], "graph {i}");
                let expect = match a.kind {
                    ArcKind::Reversed => DvitArcKind::Kept,
                    ArcKind::Forward => DvitArcKind::Reversed0,
                };
                assert_eq!(mirrored.kind, expect, "graph {i}");
            }
        }
    }

    #[test]
    fn transform_invariants_hold_everywhere() {
        let mut gs = small_graphs();
        for seed in 200..280 {
            let n = 6 + (seed as usize % 7);
            gs.push(random_network(n, 2 * n + 4, 9, seed).unwrap());
        }
        let mut checked = 0;
        for (i, g) in gs.iter().enumerate() {
            let analysis = all_vital_edges(g).unwrap();
            let d = match build_dvit(g, &analysis) {
                Ok(d) => d,
                Err(Error::InvalidInput(_)) => {
                    assert_eq!(analysis.fstar, 0, "graph {i}");
                    continue;
                }
                Err(other) => panic!("graph {i}: {other}"),
            };
            checked += 1;

            // Shape: topological numbering with the terminals at the ends.
            assert!(d.arcs.iter().all(|a| a.tail < a.head), "graph {i}");
            assert_eq!(d.class_of[g.s()], 0, "graph {i}");
            assert_eq!(d.class_of[g.t()], d.node_count() - 1, "graph {i}");

            // Flow value preserved, and every vital edge with a finite least
            // cut stays vital in the transformed network.
            let qn = d.quotient_network().unwrap();
            assert_eq!(max_flow(&qn).unwrap().value, analysis.fstar, "graph {i}");
            let qa = all_vital_edges(&qn).unwrap();
            for row in analysis.vital_rows() {
                if !row.lambda.is_some_and(CapacityValue::is_finite) {
                    continue;
                }
                let qrow = qa
                    .rows
                    .iter()
                    .find(|r| r.edge == row.edge)
                    .unwrap_or_else(|| panic!("graph {i}: vital edge {} dropped", row.edge));
                assert_ne!(qrow.class, EdgeKind::Nonvital, "graph {i} edge {}", row.edge);
            }

            // Every family member maps onto whole nodes, stays cheap enough
            // for its edge, and no directed path crosses it twice.
            let cat = CutCatalog::compute(g).unwrap();
            for k in 0..g.m() {
                if cat.vitality[k] == 0 || cat.lambda[k].is_infinite() {
                    continue;
                }
                let e = g.edges()[k];
                let w = e.cap.finite().expect("finite least cut implies finite edge");
                for &ci in &cat.mincuts_for[k] {
                    let cut = STCut::from_side(g, &mask_to_side(g.n(), cat.mask(ci))).unwrap();
                    let side = d.node_side(&cut).unwrap();
                    assert!(max_crossings(&d, &cut).unwrap() <= 1, "graph {i} edge {k}");
                    let qcut = STCut::from_side(&qn, &side).unwrap();
                    let qcap = qcut.capacity.finite().expect("kept arcs are finite");
                    assert!(qcap - w < analysis.fstar, "graph {i} edge {k}");
                }
            }
        }
        assert!(checked >= 20, "only {checked} graphs exercised the transform");
    }

    #[test]
    fn difference_sets_have_no_crossing_edges() {
        for (i, g) in small_graphs().iter().enumerate() {
            let cat = CutCatalog::compute(g).unwrap();
            for k in 0..g.m() {
                if cat.vitality[k] == 0 || cat.lambda[k].is_infinite() {
                    continue;
                }
                let cuts = &cat.mincuts_for[k];
                for (xi, &ci) in cuts.iter().enumerate() {
                    for &cj in &cuts[xi + 1..] {
                        let only_i = cat.mask(ci) & !cat.mask(cj);
                        let only_j = cat.mask(cj) & !cat.mask(ci);
                        for e in g.edges() {
                            let i_to_j =
                                only_i >> e.tail & 1 == 1 && only_j >> e.head & 1 == 1;
                            let j_to_i =
                                only_j >> e.tail & 1 == 1 && only_i >> e.head & 1 == 1;
                            assert!(
                                !i_to_j && !j_to_i,
                                "graph {i} edge {} bridges the difference sets",
                                e.id
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn farthest_cut_is_the_oracle_maximum() {
        for (i, g) in small_graphs().iter().enumerate() {
            let cat = CutCatalog::compute(g).unwrap();
            for (k, e) in g.edges().iter().enumerate() {
                match farthest_mincut(g, e.id) {
                    Ok(cut) => {
                        let ci = cat.farthest_for[k]
                            .unwrap_or_else(|| panic!("graph {i}: edge {k} not vital-finite"));
                        assert_eq!(
                            cut.side,
                            mask_to_side(g.n(), cat.mask(ci)),
                            "graph {i} edge {k}"
                        );
                    }
                    Err(Error::NotVital(id)) => {
                        assert_eq!(id, e.id);
                        assert_eq!(cat.vitality[k], 0, "graph {i} edge {k}");
                    }
                    Err(Error::UnboundedFlow) => {
                        assert!(cat.vitality[k] > 0 && cat.lambda[k].is_infinite());
                    }
                    Err(other) => panic!("graph {i} edge {k}: {other}"),
                }
            }
        }
    }

    #[test]
    fn farthest_cut_pins_down_known_sides() {
        let p = path_graph(&[2, 1, 2]).unwrap();
        assert_eq!(farthest_mincut(&p, 1).unwrap().vertices(), vec![0, 1]);

        // The crossing edge of the gadget keeps three cuts; the largest
        // one stops right before its head.
        let g = cover_gadget();
        assert_eq!(farthest_mincut(&g, 4).unwrap().vertices(), vec![0, 1, 2, 3]);

        assert!(matches!(farthest_mincut(&g, 99), Err(Error::UnknownEdge(99))));
    }

    #[test]
    fn farthest_tree_matches_the_direct_computation() {
        let mut gs = small_graphs();
        for seed in 300..400 {
            gs.push(random_network(8, 16, 6, seed).unwrap());
        }
        for (i, g) in gs.iter().enumerate() {
            let analysis = all_vital_edges(g).unwrap();
            let f = build_fvit_from_analysis(g, &analysis).unwrap();
            assert!(f.cover_size() <= g.n() - 1, "graph {i}");
            for e in g.edges() {
                match farthest_mincut(g, e.id) {
                    Ok(cut) => {
                        assert_eq!(f.farthest_cut(e.id).unwrap(), &cut, "graph {i} edge {}", e.id)
                    }
                    Err(Error::NotVital(_)) => {
                        assert!(
                            matches!(f.farthest_cut(e.id), Err(Error::NotVital(_))),
                            "graph {i} edge {}",
                            e.id
                        );
                    }
                    Err(Error::UnboundedFlow) => {
                        assert!(
                            matches!(f.farthest_cut(e.id), Err(Error::UnboundedFlow)),
                            "graph {i} edge {}",
                            e.id
                        );
                    }
                    Err(other) => panic!("graph {i} edge {}: {other}", e.id),
                }
            }
        }
    }

    #[test]
    fn unit_path_tree_stores_every_prefix() {
        let g = path_graph(&[1, 2, 3]).unwrap();
        let f = build_fvit(&g).unwrap();
        assert_eq!(f.cover_size(), g.n() - 1);
        assert_eq!(f.farthest_cut(0).unwrap().vertices(), vec![0]);
        assert_eq!(f.farthest_cut(1).unwrap().vertices(), vec![0, 1]);
        assert_eq!(f.farthest_cut(2).unwrap().vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn subset_queries_match_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (i, g) in small_graphs().iter().enumerate() {
            let cat = CutCatalog::compute(g).unwrap();
            let f = build_fvit(g).unwrap();
            for (k, e) in g.edges().iter().enumerate() {
                if cat.vitality[k] == 0 || cat.lambda[k].is_infinite() {
                    continue;
                }
                assert!(query_ifsubcut(&f, &[g.s()], e.id).unwrap(), "graph {i}");
                assert!(!query_ifsubcut(&f, &[g.s(), g.t()], e.id).unwrap(), "graph {i}");
                for _ in 0..20 {
                    let a: Vec<usize> = (0..g.n()).filter(|_| rng.gen_bool(0.5)).collect();
                    let mask: u32 = a.iter().map(|&v| 1u32 << v).sum();
                    let expect = cat.mincuts_for[k]
                        .iter()
                        .any(|&ci| cat.mask(ci) & mask == mask);
                    assert_eq!(
                        query_ifsubcut(&f, &a, e.id).unwrap(),
                        expect,
                        "graph {i} edge {k} set {a:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn subset_queries_reject_bad_edges_and_vertices() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        let f = build_fvit(&g).unwrap();
        // Pinned edges of the two-layer network: infinite feeds are vital
        // but have no finite cut; the middles are stored.
        assert!(matches!(query_ifsubcut(&f, &[0], 0), Err(Error::UnboundedFlow)));
        let mid = f
            .edges
            .iter()
            .find(|e| e.cap.is_finite())
            .expect("the matrix edges are finite")
            .id;
        assert!(matches!(query_ifsubcut(&f, &[99], mid), Err(Error::InvalidInput(_))));
        assert!(matches!(query_ifsubcut(&f, &[0], 999), Err(Error::UnknownEdge(999))));

        let p = path_graph(&[1, 1, 1]).unwrap();
        let fp = build_fvit(&p).unwrap();
        assert!(matches!(fp.farthest_cut(5), Err(Error::UnknownEdge(5))));
    }

    #[test]
    fn paths_and_cuts_are_validated() {
        let g = zigzag_ladder(3).unwrap();
        let c = STCut::from_vertices(&g, &[0, 1, 2, 3]).unwrap();
        assert!(matches!(
            path_crossings(&g, &[0, 7], &c),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            path_crossings(&g, &[0, 3, 6, 3], &c),
            Err(Error::InvalidInput(_))
        ));

        let t = twin_hub();
        let analysis = all_vital_edges(&t).unwrap();
        let d = build_dvit(&t, &analysis).unwrap();
        let split = STCut::from_vertices(&t, &[0, 1]).unwrap();
        assert!(matches!(max_crossings(&d, &split), Err(Error::NotRepresentable)));
    }

    #[test]
    fn zero_flow_networks_are_rejected() {
        let mut g = FlowNetwork::new(4, 0, 3).unwrap();
        g.add_edge(0, 1, CapacityValue::Finite(3)).unwrap();
        g.add_edge(2, 3, CapacityValue::Finite(3)).unwrap();
        let analysis = all_vital_edges(&g).unwrap();
        assert_eq!(analysis.fstar, 0);
        assert!(matches!(build_dvit(&g, &analysis), Err(Error::InvalidInput(_))));
        assert!(edge_roles(&g, &analysis)
            .unwrap()
            .iter()
            .all(|&r| r == EdgeRole::Neither));
    }
}
