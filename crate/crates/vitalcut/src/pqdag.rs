//! The mincut-family DAG: strongly connected components of a residual graph,
//! condensed and canonically ordered so that every least-capacity (s,t)-cut
//! is exactly a successor-closed node set containing the source node and
//! missing the sink node.
//!
//! Conventions (fixed across the crate):
//! - Arcs follow residual direction: a saturated edge (x,y) yields the arc
//!   node(y) -> node(x) tagged `Reversed`; a zero-flow crossing edge yields
//!   node(x) -> node(y) tagged `Forward`. Partially saturated edges never
//!   cross nodes.
//! - The canonical order τ is a topological order of those arcs (arcs go
//!   from earlier to later), with the sink node as early as possible, the
//!   source node as late as possible, and ties broken by smallest contained
//!   vertex id. Node ids are renumbered to τ positions, so `topo` is the
//!   identity and arcs satisfy from < to.
//! - Every suffix of τ that contains the source node and misses the sink
//!   node is a least-capacity cut.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, Edge, FlowNetwork, STCut};
use crate::maxflow::{is_maximum, max_flow, FlowAssignment};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ArcKind {
    /// Crossing edge carrying zero flow; arc keeps the edge direction.
    Forward,
    /// Saturated crossing edge; arc opposes the edge direction.
    Reversed,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DagArc {
    pub from: usize,
    pub to: usize,
    /// Id of the originating edge (may belong to an augmented graph).
    pub edge: usize,
    pub kind: ArcKind,
}

/// Condensed DAG of one family of (s,t)-cuts over a fixed vertex set.
#[derive(Clone, Debug)]
pub struct PQDag {
    /// nodes[i] = sorted vertex ids of the node at τ position i.
    pub nodes: Vec<Vec<usize>>,
    /// Vertex -> node id.
    pub phi: Vec<usize>,
    /// Arcs sorted by (from, to, edge); always from < to.
    pub arcs: Vec<DagArc>,
    /// Identity permutation after canonicalization; kept for serialization.
    pub topo: Vec<usize>,
    pub source_node: usize,
    pub sink_node: usize,
    /// Original terminal vertices.
    pub s: usize,
    pub t: usize,
    pub origin: String,
}

/// Space-reduced stand-in for a [`PQDag`]: partition and order only; the
/// arcs are recomputed from the origin edge list on demand.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TopoRecord {
    pub node_count: usize,
    pub phi: Vec<usize>,
    /// tau[i] = node id at position i (any valid topological order).
    pub tau: Vec<usize>,
    pub source_node: usize,
    pub sink_node: usize,
    pub s: usize,
    pub t: usize,
    pub origin: String,
}

impl PQDag {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Structural equality: partition, arcs, and terminals (origin label
    /// ignored).
    pub fn same_structure(&self, other: &PQDag) -> bool {
        self.nodes == other.nodes
            && self.arcs == other.arcs
            && self.source_node == other.source_node
            && self.sink_node == other.sink_node
    }

    /// Successor adjacency over nodes.
    pub fn succ(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for a in &self.arcs {
            adj[a.from].push(a.to);
        }
        adj
    }

    /// Predecessor adjacency over nodes.
    pub fn pred(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for a in &self.arcs {
            adj[a.to].push(a.from);
        }
        adj
    }

    /// Reflexive reachable set from `start` over the given adjacency.
    pub fn closure(adj: &[Vec<usize>], start: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; adj.len()];
        let mut queue: Vec<usize> = Vec::new();
        for &v in start {
            if !seen[v] {
                seen[v] = true;
                queue.push(v);
            }
        }
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen
    }

    pub fn record(&self) -> TopoRecord {
        TopoRecord {
            node_count: self.node_count(),
            phi: self.phi.clone(),
            tau: self.topo.clone(),
            source_node: self.source_node,
            sink_node: self.sink_node,
            s: self.s,
            t: self.t,
            origin: self.origin.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nodes": self.nodes,
            "edges": self.arcs.iter().map(|a| vec![a.from, a.to, a.edge]).collect::<Vec<_>>(),
            "topo": self.topo,
        })
    }
}

/// Canonicalize a raw condensation: priority topological order (sink node
/// first, source node last, then smallest contained vertex), renumber nodes
/// to order positions, sort arcs.
pub(crate) fn canonicalize(
    nodes: Vec<Vec<usize>>,
    arcs: Vec<DagArc>,
    source_node: usize,
    sink_node: usize,
    s: usize,
    t: usize,
    origin: String,
) -> Result<PQDag> {
    let k = nodes.len();
    let mut indeg = vec![0usize; k];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    for a in &arcs {
        indeg[a.to] += 1;
        succ[a.from].push(a.to);
    }
    let key = |node: usize| -> (u8, usize) {
        if node == sink_node {
            (0, 0)
        } else if node == source_node {
            (2, 0)
        } else {
            (1, *nodes[node].iter().min().expect("nonempty node"))
        }
    };
    let mut heap = std::collections::BinaryHeap::new();
    for v in 0..k {
        if indeg[v] == 0 {
            heap.push(std::cmp::Reverse((key(v), v)));
        }
    }
    let mut order = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, v))) = heap.pop() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(std::cmp::Reverse((key(w), w)));
            }
        }
    }
    if order.len() != k {
        return Err(Error::InvariantViolation("cut-family DAG has a cycle".into()));
    }
    let mut pos = vec![0usize; k];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }

    let mut new_nodes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (old, vs) in nodes.into_iter().enumerate() {
        let mut vs = vs;
        vs.sort_unstable();
        new_nodes[pos[old]] = vs;
    }
    let mut phi = vec![usize::MAX; new_nodes.iter().map(|ns| ns.len()).sum()];
    let total: usize = new_nodes.iter().map(|ns| ns.iter().max().map_or(0, |&m| m + 1)).max().unwrap_or(0);
    phi.resize(total, usize::MAX);
    for (i, vs) in new_nodes.iter().enumerate() {
        for &v in vs {
            phi[v] = i;
        }
    }
    let mut new_arcs: Vec<DagArc> = arcs
        .into_iter()
        .map(|a| DagArc { from: pos[a.from], to: pos[a.to], edge: a.edge, kind: a.kind })
        .collect();
    new_arcs.sort_by_key(|a| (a.from, a.to, a.edge));
    debug_assert!(new_arcs.iter().all(|a| a.from < a.to));
    let source_node = pos[source_node];
    let sink_node = pos[sink_node];
    debug_assert!(sink_node < source_node);
    Ok(PQDag {
        nodes: new_nodes,
        phi,
        arcs: new_arcs,
        topo: (0..k).collect(),
        source_node,
        sink_node,
        s,
        t,
        origin,
    })
}

/// Iterative Tarjan; returns per-vertex component ids.
fn scc(n: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut comp = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, ci)) = call.last() {
            if ci < adj[v].len() {
                call.last_mut().unwrap().1 += 1;
                let w = adj[v][ci];
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    (comp_count, comp)
}

/// Build the DAG of all least-capacity (s,t)-cuts.
pub fn build_pq(g: &FlowNetwork) -> Result<PQDag> {
    let f = max_flow(g)?;
    build_pq_from_flow(g, &f)
}

/// Build from a given maximum flow (validated).
pub fn build_pq_from_flow(g: &FlowNetwork, f: &FlowAssignment) -> Result<PQDag> {
    if !is_maximum(g, f) {
        return Err(Error::InvalidInput("flow is not a maximum flow".into()));
    }
    let n = g.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in g.edges().iter().enumerate() {
        let fl = f.flows[k];
        let open = match e.cap {
            CapacityValue::Infinite => true,
            CapacityValue::Finite(w) => fl < w,
        };
        if open {
            adj[e.tail].push(e.head);
        }
        if fl > 0 {
            adj[e.head].push(e.tail);
        }
    }
    let (k, comp) = scc(n, &adj);
    if comp[g.s()] == comp[g.t()] {
        return Err(Error::InvariantViolation("terminals share a residual component".into()));
    }
    let mut nodes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for v in 0..n {
        nodes[comp[v]].push(v);
    }
    let mut arcs = Vec::new();
    for (ki, e) in g.edges().iter().enumerate() {
        let (a, b) = (comp[e.tail], comp[e.head]);
        if a == b {
            continue;
        }
        let fl = f.flows[ki];
        let saturated = matches!(e.cap, CapacityValue::Finite(w) if fl == w);
        if fl == 0 {
            arcs.push(DagArc { from: a, to: b, edge: e.id, kind: ArcKind::Forward });
        } else if saturated {
            arcs.push(DagArc { from: b, to: a, edge: e.id, kind: ArcKind::Reversed });
        } else {
            return Err(Error::InvariantViolation(format!(
                "partially saturated edge {} crosses residual components",
                e.id
            )));
        }
    }

    // Coarsen the condensation to separation classes: components the
    // implication arcs pin to one side in every stored cut join the matching
    // terminal node. Afterwards two vertices share a node exactly when no
    // stored cut separates them, so equal families over the same graph have
    // equal structure. Arcs whose endpoints merge describe edges no stored
    // cut crosses and disappear.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); k];
    for a in &arcs {
        succ[a.from].push(a.to);
        pred[a.to].push(a.from);
    }
    let always_in = PQDag::closure(&succ, &[comp[g.s()]]);
    let never_in = PQDag::closure(&pred, &[comp[g.t()]]);
    if (0..k).any(|c| always_in[c] && never_in[c]) {
        return Err(Error::InvariantViolation(
            "a residual component is pinned to both cut sides".into(),
        ));
    }
    let mut group = vec![usize::MAX; k];
    let mut next = 2usize;
    for c in 0..k {
        group[c] = if always_in[c] {
            0
        } else if never_in[c] {
            1
        } else {
            next += 1;
            next - 1
        };
    }
    let mut coarse_nodes: Vec<Vec<usize>> = vec![Vec::new(); next];
    for (c, vs) in nodes.into_iter().enumerate() {
        coarse_nodes[group[c]].extend(vs);
    }
    let coarse_arcs: Vec<DagArc> = arcs
        .into_iter()
        .filter(|a| group[a.from] != group[a.to])
        .map(|a| DagArc { from: group[a.from], to: group[a.to], edge: a.edge, kind: a.kind })
        .collect();
    canonicalize(
        coarse_nodes,
        coarse_arcs,
        0,
        1,
        g.s(),
        g.t(),
        format!("network(n={},m={})", g.n(), g.m()),
    )
}

/// The network augmented with infinite forcing edges: every vertex of
/// `force_s` gains an infinite edge from s (pinning it to the source side of
/// any finite cut) and every vertex of `force_t` an infinite edge to t.
/// Forcing edges take the next fresh ids in list order, so the same inputs
/// always rebuild the identical augmented network.
pub fn forced_graph(
    g: &FlowNetwork,
    force_s: &[usize],
    force_t: &[usize],
) -> Result<FlowNetwork> {
    let mut h = g.clone();
    for &x in force_s {
        if x >= g.n() {
            return Err(Error::InvalidInput(format!("vertex {x} out of range")));
        }
        if x == g.t() {
            return Err(Error::NotSeparated("t cannot be forced onto the source side".into()));
        }
        if x != g.s() {
            h.add_edge(g.s(), x, CapacityValue::Infinite)?;
        }
    }
    for &y in force_t {
        if y >= g.n() {
            return Err(Error::InvalidInput(format!("vertex {y} out of range")));
        }
        if y == g.s() {
            return Err(Error::NotSeparated("s cannot be forced onto the sink side".into()));
        }
        if y != g.t() {
            h.add_edge(y, g.t(), CapacityValue::Infinite)?;
        }
    }
    Ok(h)
}

/// DAG of the least-capacity cuts keeping `force_s` on the source side and
/// `force_t` on the sink side: build over the augmented network with
/// infinite forcing edges. Returns the DAG together with the augmented
/// network (whose fresh edge ids may appear on arcs).
pub fn build_pq_forced(
    g: &FlowNetwork,
    force_s: &[usize],
    force_t: &[usize],
) -> Result<(PQDag, FlowNetwork)> {
    let h = forced_graph(g, force_s, force_t)?;
    let d = build_pq(&h)?;
    Ok((d, h))
}

/// Is the cut a member of the stored family: it must not subdivide any node,
/// and its node image must be successor-closed.
pub fn is_one_transversal(d: &PQDag, cut: &STCut) -> Result<bool> {
    if cut.side.len() != d.phi.len() {
        return Err(Error::InvalidInput("cut is over a different vertex set".into()));
    }
    let mut in_set = vec![None::<bool>; d.node_count()];
    for (v, &inside) in cut.side.iter().enumerate() {
        let node = d.phi[v];
        match in_set[node] {
            None => in_set[node] = Some(inside),
            Some(prev) if prev != inside => {
                return Err(Error::NotRepresentable);
            }
            _ => {}
        }
    }
    let in_set: Vec<bool> = in_set.into_iter().map(|o| o.unwrap_or(false)).collect();
    debug_assert!(in_set[d.source_node] && !in_set[d.sink_node]);
    Ok(d.arcs.iter().all(|a| !(in_set[a.from] && !in_set[a.to])))
}

/// Enumerate every stored cut as a vertex-side indicator, ascending by node
/// bitmask. Guarded: needs at most 24 nodes.
pub fn stored_cut_sides(d: &PQDag) -> Result<Vec<Vec<bool>>> {
    let k = d.node_count();
    if k > 24 {
        return Err(Error::LimitExceeded(format!("{k} nodes is too many to enumerate")));
    }
    let mut succ_mask = vec![0u32; k];
    for a in &d.arcs {
        succ_mask[a.from] |= 1 << a.to;
    }
    let mut out = Vec::new();
    for mask in 0..(1u32 << k) {
        if mask >> d.source_node & 1 == 0 || mask >> d.sink_node & 1 == 1 {
            continue;
        }
        let closed = (0..k).all(|v| mask >> v & 1 == 0 || succ_mask[v] & !mask == 0);
        if !closed {
            continue;
        }
        let mut side = vec![false; d.phi.len()];
        for (v, &node) in d.phi.iter().enumerate() {
            side[v] = mask >> node & 1 == 1;
        }
        out.push(side);
    }
    Ok(out)
}

/// Rebuild the DAG from the origin edge list plus a partition-and-order
/// record: edges whose endpoints' nodes appear in order get a forward arc,
/// inverted ones a reversed arc, same-node edges vanish. Output is
/// canonical, so any valid order of the same DAG rebuilds identically.
pub fn construct_dpq_from_order(edges: &[Edge], rec: &TopoRecord) -> Result<PQDag> {
    let k = rec.node_count;
    if rec.phi.len() < edges.iter().map(|e| e.tail.max(e.head) + 1).max().unwrap_or(0) {
        return Err(Error::InvalidInput("record does not cover the edge list's vertices".into()));
    }
    if rec.tau.len() != k {
        return Err(Error::InvalidInput("order length differs from node count".into()));
    }
    let mut pos = vec![usize::MAX; k];
    for (i, &node) in rec.tau.iter().enumerate() {
        if node >= k || pos[node] != usize::MAX {
            return Err(Error::InvalidInput("order is not a permutation of node ids".into()));
        }
        pos[node] = i;
    }
    if rec.source_node >= k || rec.sink_node >= k || rec.source_node == rec.sink_node {
        return Err(Error::InvalidInput("bad terminal nodes".into()));
    }
    if rec.phi.iter().any(|&p| p >= k) {
        return Err(Error::InvalidInput("partition refers to unknown nodes".into()));
    }
    let mut nodes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &p) in rec.phi.iter().enumerate() {
        nodes[p].push(v);
    }
    if nodes.iter().any(|ns| ns.is_empty()) {
        return Err(Error::InvalidInput("empty node in record".into()));
    }
    let mut arcs = Vec::new();
    for e in edges {
        let (a, b) = (rec.phi[e.tail], rec.phi[e.head]);
        if a == b {
            continue;
        }
        if pos[a] < pos[b] {
            arcs.push(DagArc { from: a, to: b, edge: e.id, kind: ArcKind::Forward });
        } else {
            arcs.push(DagArc { from: b, to: a, edge: e.id, kind: ArcKind::Reversed });
        }
    }
    canonicalize(nodes, arcs, rec.source_node, rec.sink_node, rec.s, rec.t, rec.origin.clone())
}

/// Restrict to the stored cuts keeping `x` on the source side and `y` on
/// the sink side: the source node absorbs every node forced inside
/// (descendants of x's node or of the source node), the sink node absorbs
/// every node forced outside (ancestors of y's node or of the sink node).
pub fn restrict_pq(d: &PQDag, x: usize, y: usize) -> Result<PQDag> {
    if x >= d.phi.len() || y >= d.phi.len() {
        return Err(Error::InvalidInput("vertex out of range".into()));
    }
    let succ = d.succ();
    let pred = d.pred();
    let in_src = PQDag::closure(&succ, &[d.source_node, d.phi[x]]);
    let in_snk = PQDag::closure(&pred, &[d.sink_node, d.phi[y]]);
    if (0..d.node_count()).any(|v| in_src[v] && in_snk[v]) {
        return Err(Error::NotSeparated(format!("no stored cut keeps {x} before {y}")));
    }
    // New grouping: 0 = source group, 1 = sink group, middles keep identity.
    let mut group = vec![usize::MAX; d.node_count()];
    let mut next = 2;
    for v in 0..d.node_count() {
        group[v] = if in_src[v] {
            0
        } else if in_snk[v] {
            1
        } else {
            let id = next;
            next += 1;
            id
        };
    }
    let mut nodes: Vec<Vec<usize>> = vec![Vec::new(); next];
    for (v, &node) in d.phi.iter().enumerate() {
        nodes[group[node]].push(v);
    }
    let arcs: Vec<DagArc> = d
        .arcs
        .iter()
        .filter(|a| group[a.from] != group[a.to])
        .map(|a| DagArc { from: group[a.from], to: group[a.to], edge: a.edge, kind: a.kind })
        .collect();
    canonicalize(nodes, arcs, 0, 1, d.s, d.t, format!("{}|{}~{}", d.origin, x, y))
}

/// Per-vertex separation class within one DAG: 0 = inside every stored cut,
/// 1 = outside every stored cut, else 2 + node id.
fn separation_classes(d: &PQDag) -> Result<Vec<usize>> {
    let succ = d.succ();
    let pred = d.pred();
    let always_in = PQDag::closure(&succ, &[d.source_node]);
    let never_in = PQDag::closure(&pred, &[d.sink_node]);
    if (0..d.node_count()).any(|v| always_in[v] && never_in[v]) {
        return Err(Error::InvariantViolation("DAG stores no cut at all".into()));
    }
    Ok(d
        .phi
        .iter()
        .map(|&node| {
            if always_in[node] {
                0
            } else if never_in[node] {
                1
            } else {
                2 + node
            }
        })
        .collect())
}

/// Merge several cut-family DAGs over the same graph into the DAG of the
/// union family. Vertices separated by no stored cut of any member collapse;
/// each origin edge crossing the merged partition takes its orientation from
/// the members that separate its endpoints, which must agree.
pub fn merge_dag_family(members: &[&PQDag], origin_edges: &[Edge]) -> Result<PQDag> {
    let Some(first) = members.first() else {
        return Err(Error::InvalidInput("empty DAG family".into()));
    };
    let n = first.phi.len();
    if members.iter().any(|d| d.phi.len() != n || d.s != first.s || d.t != first.t) {
        return Err(Error::InvalidInput("members disagree on the vertex set".into()));
    }
    let classes: Vec<Vec<usize>> = members
        .iter()
        .map(|d| separation_classes(d))
        .collect::<Result<_>>()?;

    // Group vertices by class tuple, first-seen order by vertex id.
    let mut group = vec![usize::MAX; n];
    let mut seen: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let key: Vec<usize> = classes.iter().map(|c| c[v]).collect();
        let id = *seen.entry(key).or_insert_with(|| {
            nodes.push(Vec::new());
            nodes.len() - 1
        });
        group[v] = id;
        nodes[id].push(v);
    }

    // Arc lookup per member by edge id.
    let arc_maps: Vec<std::collections::HashMap<usize, &DagArc>> = members
        .iter()
        .map(|d| d.arcs.iter().map(|a| (a.edge, a)).collect())
        .collect();

    let mut arcs = Vec::new();
    for e in origin_edges {
        let (gu, gv) = (group[e.tail], group[e.head]);
        if gu == gv {
            continue;
        }
        let mut vote: Option<ArcKind> = None;
        for (i, cls) in classes.iter().enumerate() {
            if cls[e.tail] == cls[e.head] {
                continue;
            }
            let arc = arc_maps[i].get(&e.id).ok_or_else(|| {
                Error::InvariantViolation(format!(
                    "member {i} separates edge {} but stores no arc for it",
                    e.id
                ))
            })?;
            match vote {
                None => vote = Some(arc.kind),
                Some(k) if k != arc.kind => {
                    return Err(Error::InvariantViolation(format!(
                        "members disagree on the orientation of edge {}",
                        e.id
                    )));
                }
                _ => {}
            }
        }
        let kind = vote.ok_or_else(|| {
            Error::InvariantViolation(format!(
                "edge {} crosses the merged partition but no member separates it",
                e.id
            ))
        })?;
        let (from, to) = match kind {
            ArcKind::Forward => (gu, gv),
            ArcKind::Reversed => (gv, gu),
        };
        arcs.push(DagArc { from, to, edge: e.id, kind });
    }
    canonicalize(
        nodes,
        arcs,
        group[first.s],
        group[first.t],
        first.s,
        first.t,
        format!("merge({})", members.len()),
    )
}

/// Two-member convenience wrapper; a missing second half returns the first
/// unchanged (modulo canonical form).
pub fn merge_pair_dags(
    d1: &PQDag,
    d2: Option<&PQDag>,
    origin_edges: &[Edge],
) -> Result<PQDag> {
    match d2 {
        Some(d2) => merge_dag_family(&[d1, d2], origin_edges),
        None => Ok(d1.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{cover_gadget, gen_db, gen_gsq, path_graph};
    use crate::oracle::CutCatalog;

    fn sides_sorted(mut sides: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
        sides.sort();
        sides
    }

    fn family_of(d: &PQDag) -> Vec<Vec<bool>> {
        sides_sorted(stored_cut_sides(d).unwrap())
    }

    fn oracle_mincut_sides(g: &FlowNetwork) -> Vec<Vec<bool>> {
        let cat = CutCatalog::compute(g).unwrap();
        sides_sorted(cat.mincuts.iter().map(|&i| cat.side(i)).collect())
    }

    #[test]
    fn path_with_distinct_caps_has_one_cut() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let d = build_pq(&g).unwrap();
        assert_eq!(d.node_count(), 2);
        assert_eq!(d.nodes[0], vec![2, 3]); // sink side first
        assert_eq!(d.nodes[1], vec![0, 1]);
        assert_eq!(d.arcs.len(), 1);
        assert_eq!((d.arcs[0].from, d.arcs[0].to, d.arcs[0].edge), (0, 1, 1));
        assert_eq!(d.arcs[0].kind, ArcKind::Reversed);
        assert_eq!(family_of(&d), oracle_mincut_sides(&g));
    }

    #[test]
    fn unit_path_is_a_chain_with_all_prefix_cuts() {
        let g = path_graph(&[1, 1, 1]).unwrap();
        let d = build_pq(&g).unwrap();
        assert_eq!(d.node_count(), 4);
        assert_eq!(stored_cut_sides(&d).unwrap().len(), 3);
        assert_eq!(family_of(&d), oracle_mincut_sides(&g));
    }

    #[test]
    fn families_match_oracle_on_fixtures() {
        for g in [cover_gadget(), gen_gsq(2, &[5, 6, 7, 8]).unwrap()] {
            let d = build_pq(&g).unwrap();
            assert_eq!(family_of(&d), oracle_mincut_sides(&g));
        }
    }

    #[test]
    fn one_transversal_matches_oracle_membership() {
        let g = cover_gadget();
        let d = build_pq(&g).unwrap();
        let cat = CutCatalog::compute(&g).unwrap();
        for i in 0..cat.len() {
            let cut = cat.cut(&g, i);
            let is_min = cat.capacity(i) == CapacityValue::Finite(cat.fstar);
            match is_one_transversal(&d, &cut) {
                Ok(b) => assert_eq!(b, is_min, "cut {:?}", cut.vertices()),
                Err(Error::NotRepresentable) => {
                    assert!(!is_min, "mincut must respect the partition")
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn suffixes_between_terminal_positions_are_mincuts() {
        for g in [cover_gadget(), gen_gsq(2, &[5, 6, 7, 8]).unwrap(), path_graph(&[2, 2, 2]).unwrap()] {
            let d = build_pq(&g).unwrap();
            let fstar = max_flow(&g).unwrap().value;
            for k in d.sink_node + 1..=d.source_node {
                let side: Vec<bool> = d.phi.iter().map(|&node| node >= k).collect();
                let cut = STCut::from_side(&g, &side).unwrap();
                assert_eq!(cut.capacity, CapacityValue::Finite(fstar), "suffix at {k}");
            }
        }
    }

    #[test]
    fn bipartite_dag_comes_back_reversed() {
        let adj = vec![vec![true, false], vec![true, true]];
        let g = gen_db(2, &adj).unwrap();
        let d = build_pq(&g).unwrap();
        // Every vertex is its own node and every edge reappears reversed.
        assert_eq!(d.node_count(), g.n());
        assert!(d.nodes.iter().all(|ns| ns.len() == 1));
        assert_eq!(d.arcs.len(), g.m());
        for e in g.edges() {
            let arc = d.arcs.iter().find(|a| a.edge == e.id).unwrap();
            assert_eq!(d.nodes[arc.from], vec![e.head]);
            assert_eq!(d.nodes[arc.to], vec![e.tail]);
            assert_eq!(arc.kind, ArcKind::Reversed);
        }
    }

    #[test]
    fn record_round_trip_is_identity() {
        for g in [cover_gadget(), path_graph(&[1, 1, 1]).unwrap()] {
            let d = build_pq(&g).unwrap();
            let back = construct_dpq_from_order(g.edges(), &d.record()).unwrap();
            assert!(back.same_structure(&d));
        }
    }

    #[test]
    fn rebuild_is_order_independent() {
        // Diamond: the two middle nodes are incomparable, so two orders exist.
        let mut g = FlowNetwork::new(4, 0, 3).unwrap();
        g.add_edge(0, 1, CapacityValue::Finite(1)).unwrap();
        g.add_edge(0, 2, CapacityValue::Finite(1)).unwrap();
        g.add_edge(1, 3, CapacityValue::Finite(1)).unwrap();
        g.add_edge(2, 3, CapacityValue::Finite(1)).unwrap();
        let d = build_pq(&g).unwrap();
        assert_eq!(d.node_count(), 4);
        let mut rec = d.record();
        let (a, b) = (rec.tau[1], rec.tau[2]);
        rec.tau[1] = b;
        rec.tau[2] = a;
        let back = construct_dpq_from_order(g.edges(), &rec).unwrap();
        assert!(back.same_structure(&d));
    }

    #[test]
    fn rebuild_rejects_bad_records() {
        let g = path_graph(&[1, 1]).unwrap();
        let d = build_pq(&g).unwrap();
        let mut rec = d.record();
        rec.tau = vec![0, 0, 1];
        assert!(construct_dpq_from_order(g.edges(), &rec).is_err());
        let mut rec = d.record();
        rec.phi = vec![0];
        assert!(construct_dpq_from_order(g.edges(), &rec).is_err());
    }

    #[test]
    fn restrict_to_terminals_keeps_the_family() {
        let g = gen_gsq(2, &[5, 6, 7, 8]).unwrap();
        let d = build_pq(&g).unwrap();
        let r = restrict_pq(&d, g.s(), g.t()).unwrap();
        assert_eq!(family_of(&r), family_of(&d));
    }

    #[test]
    fn restrict_selects_separating_cuts() {
        let g = gen_gsq(2, &[5, 6, 7, 8]).unwrap();
        let d = build_pq(&g).unwrap();
        // Cuts keeping u_0 (vertex 1) inside: only everything-but-t.
        let r = restrict_pq(&d, 1, g.t()).unwrap();
        let fam = family_of(&r);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0], vec![true, true, true, true, true, false]);
        // Cuts keeping u_0 outside: only {s}.
        let r = restrict_pq(&d, g.s(), 1).unwrap();
        let fam = family_of(&r);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0], vec![true, false, false, false, false, false]);
    }

    #[test]
    fn restrict_errors_when_nothing_separates() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let d = build_pq(&g).unwrap();
        // Only stored cut is {s,a}; it cannot put b before a.
        assert!(matches!(restrict_pq(&d, 2, 1), Err(Error::NotSeparated(_))));
    }

    #[test]
    fn forced_family_matches_oracle() {
        let g = cover_gadget();
        let cat = CutCatalog::compute(&g).unwrap();
        // Edge 4 = (b,d): u=2, v=4, least separating capacity 9.
        let (d, _h) = build_pq_forced(&g, &[2], &[4]).unwrap();
        let fam = family_of(&d);
        let expected = sides_sorted(
            cat.separating_cuts(2, 4, CapacityValue::Finite(9))
                .into_iter()
                .map(|i| cat.side(i))
                .collect(),
        );
        assert_eq!(fam, expected);
        assert_eq!(fam.len(), 3);
    }

    #[test]
    fn merge_of_split_family_restores_it() {
        let g = gen_gsq(2, &[5, 6, 7, 8]).unwrap();
        let d = build_pq(&g).unwrap();
        let with_u0 = restrict_pq(&d, 1, g.t()).unwrap();
        let without_u0 = restrict_pq(&d, g.s(), 1).unwrap();
        let merged = merge_dag_family(&[&with_u0, &without_u0], g.edges()).unwrap();
        assert_eq!(family_of(&merged), family_of(&d));
    }

    #[test]
    fn merge_with_missing_half_is_identity() {
        let g = cover_gadget();
        let d = build_pq(&g).unwrap();
        let m = merge_pair_dags(&d, None, g.edges()).unwrap();
        assert!(m.same_structure(&d));
    }

    #[test]
    fn json_shape() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let d = build_pq(&g).unwrap();
        let v = d.to_json();
        assert_eq!(v["nodes"][0], json!([2, 3]));
        assert_eq!(v["edges"][0], json!([0, 1, 1]));
        assert_eq!(v["topo"], json!([0, 1]));
    }
}
