//! Terminal-set cut structures and the compact all-cuts store.
//!
//! For a terminal set `S`, the cuts of interest are the (s,t)-cuts of least
//! capacity among those splitting `S`. Quotienting the graph by "no such cut
//! separates this pair" yields a network whose cut families a small set of
//! pivot-forced DAGs covers. Nesting these structures along a recursive
//! partition of the vertex set (split by minimum pairwise separation cost)
//! gives every saturated vital edge a two-DAG home, while unsaturated vital
//! edges keep a private forced-cut DAG. The whole arrangement compresses to
//! O(n) partition-and-order records, from which the queries below rebuild
//! cut-family DAGs for any vital edge and for any single-edge capacity
//! change without new max-flow computations (one exception is counted and
//! reported: a never-contributing edge deleted outright).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cover::{build_insert_oracle, query_cap, InsertOracle, TvitTree};
use crate::error::{Error, Result};
use crate::graph::{CapacityValue, Edge, FlowNetwork};
use crate::maxflow::mincut_capacity_with;
use crate::oracle::oracle_steiner_mincuts;
use crate::pqdag::{
    build_pq, build_pq_forced, canonicalize, construct_dpq_from_order, forced_graph,
    merge_dag_family, restrict_pq, PQDag, TopoRecord,
};
use crate::vital::{EdgeKind, VitalAnalysis};

/// Largest vertex count for which the separation relation is decided by cut
/// enumeration; beyond it every pair runs the four-terminal forcing test.
const RELATION_ORACLE_LIMIT: usize = 16;

/// Least capacity of an (s,t)-cut separating `u` from `v`, in either
/// orientation. `Infinite` when no finite cut tells them apart.
pub fn separation_cost(g: &FlowNetwork, u: usize, v: usize) -> Result<CapacityValue> {
    if u >= g.n() || v >= g.n() {
        return Err(Error::InvalidInput(format!("vertex pair ({u},{v}) out of range")));
    }
    if u == v {
        return Err(Error::InvalidInput(format!("separation of vertex {u} from itself")));
    }
    let mut best = CapacityValue::Infinite;
    for (x, y) in [(u, v), (v, u)] {
        match mincut_capacity_with(g, &[x], &[y]) {
            Ok(c) => best = best.min(c),
            // One orientation may be impossible (x the sink or y the source).
            Err(Error::NotSeparated(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// One node of the recursive separation hierarchy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Vertices below this node, ascending.
    pub set: Vec<usize>,
    /// Least pairwise separation cost within the set; `None` on leaves.
    pub cap: Option<CapacityValue>,
}

impl HierarchyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Rooted tree over all vertices: each internal node carries the least
/// pairwise separation cost of its set, and its children are the classes of
/// the relation "separation cost strictly above that minimum".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyTree {
    pub nodes: Vec<HierarchyNode>,
    pub root: usize,
    /// Vertex -> leaf node id.
    pub leaf_of: Vec<usize>,
    /// Node -> distance from the root.
    pub depth: Vec<usize>,
}

impl HierarchyTree {
    pub fn lca(&self, u: usize, v: usize) -> Result<usize> {
        if u >= self.leaf_of.len() || v >= self.leaf_of.len() {
            return Err(Error::InvalidInput(format!("vertex pair ({u},{v}) out of range")));
        }
        let (mut a, mut b) = (self.leaf_of[u], self.leaf_of[v]);
        while self.depth[a] > self.depth[b] {
            a = self.nodes[a].parent.expect("non-root node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.nodes[b].parent.expect("non-root node has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root node has a parent");
            b = self.nodes[b].parent.expect("non-root node has a parent");
        }
        Ok(a)
    }

    /// Capacity at the lowest common node of two distinct vertices. Equals
    /// their separation cost exactly.
    pub fn lca_cap(&self, u: usize, v: usize) -> Result<CapacityValue> {
        if u == v {
            return Err(Error::InvalidInput(format!("separation of vertex {u} from itself")));
        }
        let node = self.lca(u, v)?;
        self.nodes[node]
            .cap
            .ok_or_else(|| Error::InvariantViolation("distinct vertices met at a leaf".into()))
    }
}

/// Builds the separation hierarchy with one pairwise cost matrix: costs are
/// properties of the graph alone, so every recursion level reuses them.
pub fn build_hierarchy(g: &FlowNetwork) -> Result<HierarchyTree> {
    let n = g.n();
    let mut sep = vec![vec![CapacityValue::Infinite; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let c = separation_cost(g, u, v)?;
            sep[u][v] = c;
            sep[v][u] = c;
        }
    }
    let mut nodes: Vec<HierarchyNode> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut leaf_of = vec![usize::MAX; n];
    let root = grow_node((0..n).collect(), None, 0, &sep, &mut nodes, &mut depth, &mut leaf_of)?;
    debug_assert!(leaf_of.iter().all(|&l| l != usize::MAX));
    Ok(HierarchyTree { nodes, root, leaf_of, depth })
}

fn grow_node(
    set: Vec<usize>,
    parent: Option<usize>,
    d: usize,
    sep: &[Vec<CapacityValue>],
    nodes: &mut Vec<HierarchyNode>,
    depth: &mut Vec<usize>,
    leaf_of: &mut [usize],
) -> Result<usize> {
    let id = nodes.len();
    nodes.push(HierarchyNode { parent, children: Vec::new(), set: set.clone(), cap: None });
    depth.push(d);
    if set.len() == 1 {
        leaf_of[set[0]] = id;
        return Ok(id);
    }
    let mut lambda = CapacityValue::Infinite;
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            lambda = lambda.min(sep[u][v]);
        }
    }
    nodes[id].cap = Some(lambda);

    // Children: connected components under strictly-greater separation. With
    // an Infinite minimum no pair exceeds it, so every vertex becomes its own
    // singleton leaf, which is the intended degenerate shape.
    let k = set.len();
    let mut comp = vec![usize::MAX; k];
    let mut count = 0usize;
    for i in 0..k {
        if comp[i] != usize::MAX {
            continue;
        }
        comp[i] = count;
        let mut queue = vec![i];
        while let Some(a) = queue.pop() {
            for b in 0..k {
                if comp[b] == usize::MAX && sep[set[a]][set[b]] > lambda {
                    comp[b] = count;
                    queue.push(b);
                }
            }
        }
        count += 1;
    }
    // The grouping must already be pairwise: members of one component exceed
    // the minimum directly, members of different components meet it exactly.
    for i in 0..k {
        for j in i + 1..k {
            let same = comp[i] == comp[j];
            let above = sep[set[i]][set[j]] > lambda;
            if same != above {
                return Err(Error::InvariantViolation(
                    "separation classes are not transitive".into(),
                ));
            }
        }
    }
    if count < 2 {
        return Err(Error::InvariantViolation("a split produced a single class".into()));
    }
    for c in 0..count {
        let child_set: Vec<usize> = (0..k).filter(|&i| comp[i] == c).map(|i| set[i]).collect();
        let cid = grow_node(child_set, Some(id), d + 1, sep, nodes, depth, leaf_of)?;
        nodes[id].children.push(cid);
    }
    Ok(id)
}

/// Which side of the pivot a stored DAG pins down.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PivotSide {
    /// Pivot forced inside: cuts with the pivot class on the source side and
    /// the indexed class outside.
    SourceSide,
    /// Pivot forced outside: cuts with the indexed class inside and the
    /// pivot class on the sink side.
    SinkSide,
}

/// One pivot-forced cut-family DAG over the quotient network.
#[derive(Clone, Debug)]
pub struct PivotDag {
    /// The non-pivot class this DAG is indexed by.
    pub node: usize,
    pub side: PivotSide,
    pub dag: PQDag,
}

/// How a terminal-set structure covers its cut family.
#[derive(Clone, Debug)]
pub enum SteinerFamily {
    /// A third class beyond the terminals' exists: two forced DAGs per other
    /// class (those whose forced minimum meets the family capacity).
    Pivot { pivot: usize, dags: Vec<PivotDag> },
    /// Only the two terminal classes hold set members, so every quotient
    /// (s,t)-mincut splits the set: one plain DAG suffices.
    Direct { dag: PQDag },
}

/// Quotient view of one terminal set: the classes no family cut separates,
/// the crossing edges (original ids), and the covering DAGs.
#[derive(Clone, Debug)]
pub struct SteinerStructure {
    /// The terminal set, ascending, deduplicated.
    pub steiner: Vec<usize>,
    /// Least capacity of an (s,t)-cut splitting the set.
    pub lambda: u64,
    /// Vertex -> quotient class, classes numbered by smallest member.
    pub phi: Vec<usize>,
    pub class_count: usize,
    /// Quotient network; edges keep their original ids.
    pub quotient: FlowNetwork,
    pub s_node: usize,
    pub t_node: usize,
    /// Classes containing terminal-set vertices, ascending.
    pub steiner_nodes: Vec<usize>,
    pub family: SteinerFamily,
}

impl SteinerStructure {
    /// Number of stored DAGs.
    pub fn dag_count(&self) -> usize {
        match &self.family {
            SteinerFamily::Pivot { dags, .. } => dags.len(),
            SteinerFamily::Direct { .. } => 1,
        }
    }

    /// Every stored cut expanded to vertex space, deduplicated and sorted.
    /// Exponential in DAG node count; intended for validation at test scale.
    pub fn family_sides(&self) -> Result<Vec<Vec<bool>>> {
        let dags: Vec<&PQDag> = match &self.family {
            SteinerFamily::Pivot { dags, .. } => dags.iter().map(|d| &d.dag).collect(),
            SteinerFamily::Direct { dag } => vec![dag],
        };
        let mut out: Vec<Vec<bool>> = Vec::new();
        for d in dags {
            for side_q in crate::pqdag::stored_cut_sides(d)? {
                out.push(self.phi.iter().map(|&c| side_q[c]).collect());
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn steiner_lambda(g: &FlowNetwork, steiner: &[usize]) -> Result<CapacityValue> {
    let mut lambda = CapacityValue::Infinite;
    for &a in steiner {
        for &b in steiner {
            if a == b {
                continue;
            }
            match mincut_capacity_with(g, &[a], &[b]) {
                Ok(c) => lambda = lambda.min(c),
                Err(Error::NotSeparated(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(lambda)
}

/// Symmetric matrix: is some least-capacity set-splitting cut separating the
/// pair? Decided by enumeration (`via_oracle`) or by four-terminal forcing:
/// u,v are separated iff some orientation and some ordered terminal pair
/// (a,b) admit a forced cut of exactly the family capacity.
pub(crate) fn steiner_separation(
    g: &FlowNetwork,
    steiner: &[usize],
    lambda: u64,
    via_oracle: bool,
) -> Result<Vec<Vec<bool>>> {
    let n = g.n();
    let mut sep = vec![vec![false; n]; n];
    if via_oracle {
        let (lam, cuts) = oracle_steiner_mincuts(g, steiner)?;
        if lam != CapacityValue::Finite(lambda) {
            return Err(Error::InvariantViolation(format!(
                "enumerated splitting minimum {lam:?} differs from pairwise minimum {lambda}"
            )));
        }
        for c in &cuts {
            for u in 0..n {
                for v in u + 1..n {
                    if c.side[u] != c.side[v] {
                        sep[u][v] = true;
                        sep[v][u] = true;
                    }
                }
            }
        }
    } else {
        for u in 0..n {
            'pair: for v in u + 1..n {
                for (x, y) in [(u, v), (v, u)] {
                    for &a in steiner {
                        for &b in steiner {
                            if a == b {
                                continue;
                            }
                            let fs = if x == a { vec![x] } else { vec![x, a] };
                            let ft = if y == b { vec![y] } else { vec![y, b] };
                            match mincut_capacity_with(g, &fs, &ft) {
                                Ok(CapacityValue::Finite(c)) if c == lambda => {
                                    sep[u][v] = true;
                                    sep[v][u] = true;
                                    continue 'pair;
                                }
                                Ok(CapacityValue::Finite(c)) if c < lambda => {
                                    return Err(Error::InvariantViolation(format!(
                                        "forced cut below the splitting minimum ({c} < {lambda})"
                                    )));
                                }
                                Ok(_) => {}
                                Err(Error::NotSeparated(_)) => {}
                                Err(e) => return Err(e),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(sep)
}

/// Quotient classes from the separation matrix, numbered by smallest member.
/// Rejects non-equivalence relations.
fn classes_from_separation(sep: &[Vec<bool>]) -> Result<(Vec<usize>, usize)> {
    let n = sep.len();
    let mut phi = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for v in 0..n {
        match reps.iter().position(|&r| !sep[r][v]) {
            Some(c) => phi[v] = c,
            None => {
                reps.push(v);
                phi[v] = reps.len() - 1;
            }
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            // Same class must mean unseparated and vice versa; a mismatch
            // means the pairwise relation is not transitive.
            if (phi[u] == phi[v]) == sep[u][v] {
                return Err(Error::InvariantViolation(
                    "separation relation is not an equivalence".into(),
                ));
            }
        }
    }
    Ok((phi, reps.len()))
}

/// Forced cut-family DAG over the quotient when the forced minimum meets the
/// family capacity; `None` when the forcing is impossible or only met above
/// it. A forced value strictly below the family capacity is impossible
/// (every such cut splits the terminal set) and reported as corruption.
fn forced_family(
    quotient: &FlowNetwork,
    force_s: &[usize],
    force_t: &[usize],
    lambda: u64,
) -> Result<Option<PQDag>> {
    let cap = match mincut_capacity_with(quotient, force_s, force_t) {
        Ok(c) => c,
        Err(Error::NotSeparated(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    match cap {
        CapacityValue::Finite(c) if c == lambda => {
            let (dag, _aux) = build_pq_forced(quotient, force_s, force_t)?;
            Ok(Some(dag))
        }
        CapacityValue::Finite(c) if c < lambda => Err(Error::InvariantViolation(format!(
            "forced cut below the splitting minimum ({c} < {lambda})"
        ))),
        _ => Ok(None),
    }
}

/// Builds the quotient structure of one terminal set: the class map, the
/// crossing-edge network, and the covering DAGs rooted at a pivot class (or
/// a single plain DAG when only the terminal classes host set members).
pub fn build_steiner_structure(g: &FlowNetwork, steiner: &[usize]) -> Result<SteinerStructure> {
    let mut set = steiner.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() < 2 {
        return Err(Error::InvalidInput("terminal set needs at least 2 vertices".into()));
    }
    if let Some(&v) = set.iter().find(|&&v| v >= g.n()) {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    let lambda = match steiner_lambda(g, &set)? {
        CapacityValue::Finite(l) => l,
        CapacityValue::Infinite => {
            return Err(Error::NotSeparated("no finite cut splits the terminal set".into()))
        }
    };
    let sep = steiner_separation(g, &set, lambda, g.n() <= RELATION_ORACLE_LIMIT)?;
    let (phi, class_count) = classes_from_separation(&sep)?;
    let s_node = phi[g.s()];
    let t_node = phi[g.t()];
    if s_node == t_node {
        return Err(Error::InvariantViolation("terminals share a quotient class".into()));
    }
    let crossing: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| phi[e.tail] != phi[e.head])
        .map(|e| Edge { id: e.id, tail: phi[e.tail], head: phi[e.head], cap: e.cap })
        .collect();
    let quotient = FlowNetwork::from_edge_list(class_count, s_node, t_node, &crossing)?;

    let mut steiner_nodes: Vec<usize> = set.iter().map(|&v| phi[v]).collect();
    steiner_nodes.sort_unstable();
    steiner_nodes.dedup();
    if steiner_nodes.len() < 2 {
        return Err(Error::InvariantViolation(
            "terminal set collapsed into one class despite a finite splitting cut".into(),
        ));
    }

    let pivot = steiner_nodes.iter().copied().find(|&c| c != s_node && c != t_node);
    let family = match pivot {
        Some(p) => {
            let mut dags = Vec::new();
            for &beta in &steiner_nodes {
                if beta == p {
                    continue;
                }
                if let Some(dag) = forced_family(&quotient, &[p], &[beta], lambda)? {
                    dags.push(PivotDag { node: beta, side: PivotSide::SourceSide, dag });
                }
                if let Some(dag) = forced_family(&quotient, &[beta], &[p], lambda)? {
                    dags.push(PivotDag { node: beta, side: PivotSide::SinkSide, dag });
                }
            }
            if dags.is_empty() {
                return Err(Error::InvariantViolation("pivot class covers no cut".into()));
            }
            if dags.len() > 2 * set.len() - 2 {
                return Err(Error::InvariantViolation(format!(
                    "{} DAGs exceed the 2|S|-2 bound",
                    dags.len()
                )));
            }
            SteinerFamily::Pivot { pivot: p, dags }
        }
        None => {
            // Both terminal classes hold set members, so any quotient
            // (s,t)-cut splits the set and the plain minimum equals the
            // family capacity.
            match mincut_capacity_with(&quotient, &[s_node], &[t_node])? {
                CapacityValue::Finite(c) if c == lambda => {}
                other => {
                    return Err(Error::InvariantViolation(format!(
                        "quotient minimum {other:?} differs from splitting minimum {lambda}"
                    )))
                }
            }
            let (dag, _aux) = build_pq_forced(&quotient, &[s_node], &[t_node])?;
            SteinerFamily::Direct { dag }
        }
    };

    Ok(SteinerStructure {
        steiner: set,
        lambda,
        phi,
        class_count,
        quotient,
        s_node,
        t_node,
        steiner_nodes,
        family,
    })
}

/// Space-reduced form of one terminal-set structure: class map plus the
/// partition-and-order records of its DAGs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientLevel {
    pub lambda: u64,
    pub phi: Vec<usize>,
    pub class_count: usize,
    pub s_node: usize,
    pub t_node: usize,
    pub steiner_nodes: Vec<usize>,
    pub family: LevelFamily,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum LevelFamily {
    Pivot { pivot: usize, dags: Vec<LevelDag> },
    Direct { rec: TopoRecord },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelDag {
    pub node: usize,
    pub side: PivotSide,
    pub rec: TopoRecord,
}

impl QuotientLevel {
    fn from_structure(ss: &SteinerStructure) -> QuotientLevel {
        let family = match &ss.family {
            SteinerFamily::Pivot { pivot, dags } => LevelFamily::Pivot {
                pivot: *pivot,
                dags: dags
                    .iter()
                    .map(|d| LevelDag { node: d.node, side: d.side, rec: d.dag.record() })
                    .collect(),
            },
            SteinerFamily::Direct { dag } => LevelFamily::Direct { rec: dag.record() },
        };
        QuotientLevel {
            lambda: ss.lambda,
            phi: ss.phi.clone(),
            class_count: ss.class_count,
            s_node: ss.s_node,
            t_node: ss.t_node,
            steiner_nodes: ss.steiner_nodes.clone(),
            family,
        }
    }

    fn record_count(&self) -> usize {
        match &self.family {
            LevelFamily::Pivot { dags, .. } => dags.len(),
            LevelFamily::Direct { .. } => 1,
        }
    }

    fn quotient_network(&self, edges: &[Edge]) -> Result<FlowNetwork> {
        let crossing: Vec<Edge> = edges
            .iter()
            .filter(|e| self.phi[e.tail] != self.phi[e.head])
            .map(|e| Edge { id: e.id, tail: self.phi[e.tail], head: self.phi[e.head], cap: e.cap })
            .collect();
        FlowNetwork::from_edge_list(self.class_count, self.s_node, self.t_node, &crossing)
    }
}

/// Record of one unsaturated vital edge's private cut family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LooseRecord {
    pub edge: usize,
    /// Least capacity of a cut the edge contributes to.
    pub lambda: u64,
    pub rec: TopoRecord,
}

/// Routing entry of one saturated vital edge into its hierarchy level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TightRoute {
    pub edge: usize,
    pub lambda: u64,
    pub level: usize,
}

/// The compact store: O(n) partition-and-order records covering every vital
/// edge's cut family, the global mincut family, and the insertion records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XvitStore {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub fstar: u64,
    pub edges: Vec<Edge>,
    /// Record of the whole-graph mincut family DAG.
    pub global: TopoRecord,
    /// Unsaturated vital edges, ascending by edge id.
    pub loose: Vec<LooseRecord>,
    /// Saturated vital edges, ascending by edge id.
    pub tight: Vec<TightRoute>,
    /// Vital edges of unbounded capacity: no finite cut family exists.
    pub unbounded: Vec<usize>,
    /// Terminal-set structures, one per finite internal hierarchy node.
    pub levels: Vec<QuotientLevel>,
    pub insert: InsertOracle,
}

impl XvitStore {
    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map(|pos| &self.edges[pos])
            .map_err(|_| Error::UnknownEdge(id))
    }

    pub fn base_network(&self) -> Result<FlowNetwork> {
        FlowNetwork::from_edge_list(self.n, self.s, self.t, &self.edges)
    }

    /// Stored cut-family records: the global one, the per-loose-edge ones,
    /// and the per-level DAG records. Insertion records are counted by the
    /// insertion oracle itself.
    pub fn record_count(&self) -> usize {
        1 + self.loose.len() + self.levels.iter().map(|l| l.record_count()).sum::<usize>()
    }

    pub fn is_vital(&self, e_id: usize) -> bool {
        self.loose.binary_search_by_key(&e_id, |r| r.edge).is_ok()
            || self.tight.binary_search_by_key(&e_id, |r| r.edge).is_ok()
            || self.unbounded.binary_search(&e_id).is_ok()
    }
}

/// Builds the compact store from an edge classification: one forced-cut
/// record per unsaturated vital edge, a hierarchy level per finite internal
/// node with saturated vital edges routed to their lowest common node, plus
/// the global record and the insertion records.
pub fn build_svit(g: &FlowNetwork, analysis: &VitalAnalysis) -> Result<XvitStore> {
    let global = build_pq(g)?.record();
    let insert = build_insert_oracle(g)?;

    let mut loose: Vec<LooseRecord> = Vec::new();
    let mut unbounded: Vec<usize> = Vec::new();
    let mut tight_edges: Vec<(usize, u64, usize, usize)> = Vec::new();
    for row in analysis.vital_rows() {
        let e = *g.edge(row.edge)?;
        match row.class {
            EdgeKind::Loose => match row.lambda {
                Some(CapacityValue::Finite(lam)) => {
                    let h = forced_graph(g, &[e.tail], &[e.head])?;
                    loose.push(LooseRecord { edge: e.id, lambda: lam, rec: build_pq(&h)?.record() });
                }
                // An unbounded edge contributes to no finite cut; there is
                // no least-capacity family to record.
                Some(CapacityValue::Infinite) => unbounded.push(e.id),
                None => {
                    return Err(Error::InvariantViolation(format!(
                        "vital edge {} lacks a contributing-cut capacity",
                        e.id
                    )))
                }
            },
            EdgeKind::Tight => {
                let Some(CapacityValue::Finite(lam)) = row.lambda else {
                    return Err(Error::InvariantViolation(format!(
                        "saturated vital edge {} lacks a finite contributing-cut capacity",
                        e.id
                    )));
                };
                tight_edges.push((e.id, lam, e.tail, e.head));
            }
            EdgeKind::Nonvital => unreachable!("vital rows exclude nonvital edges"),
        }
    }

    let hierarchy = build_hierarchy(g)?;
    let mut levels: Vec<QuotientLevel> = Vec::new();
    let mut level_of: Vec<Option<usize>> = vec![None; hierarchy.nodes.len()];
    for (idx, node) in hierarchy.nodes.iter().enumerate() {
        let Some(CapacityValue::Finite(lam)) = node.cap else { continue };
        let ss = build_steiner_structure(g, &node.set)?;
        if ss.lambda != lam {
            return Err(Error::InvariantViolation(format!(
                "hierarchy capacity {lam} disagrees with the terminal-set minimum {}",
                ss.lambda
            )));
        }
        // The node's children must be exactly the quotient classes holding
        // set members: one class per child, no straddling, none missing.
        let mut child_classes: Vec<usize> = Vec::with_capacity(node.children.len());
        for &cid in &node.children {
            let cset = &hierarchy.nodes[cid].set;
            let class = ss.phi[cset[0]];
            if cset.iter().any(|&v| ss.phi[v] != class) {
                return Err(Error::InvariantViolation(
                    "hierarchy child straddles quotient classes".into(),
                ));
            }
            child_classes.push(class);
        }
        child_classes.sort_unstable();
        if child_classes.windows(2).any(|w| w[0] == w[1]) || child_classes != ss.steiner_nodes {
            return Err(Error::InvariantViolation(
                "hierarchy children do not match the terminal classes".into(),
            ));
        }
        level_of[idx] = Some(levels.len());
        levels.push(QuotientLevel::from_structure(&ss));
    }

    let mut tight: Vec<TightRoute> = Vec::new();
    for (edge, lambda, u, v) in tight_edges {
        let mu = hierarchy.lca(u, v)?;
        let Some(level) = level_of[mu] else {
            return Err(Error::InvariantViolation(format!(
                "saturated vital edge {edge} routes to a node without a finite structure"
            )));
        };
        if levels[level].lambda != lambda {
            return Err(Error::InvariantViolation(format!(
                "edge {edge} meets capacity {lambda} but its level stores {}",
                levels[level].lambda
            )));
        }
        tight.push(TightRoute { edge, lambda, level });
    }

    loose.sort_by_key(|r| r.edge);
    tight.sort_by_key(|r| r.edge);
    unbounded.sort_unstable();

    let store = XvitStore {
        n: g.n(),
        s: g.s(),
        t: g.t(),
        fstar: analysis.fstar,
        edges: g.edges().to_vec(),
        global,
        loose,
        tight,
        unbounded,
        levels,
        insert,
    };
    debug_assert!(store.record_count() <= 3 * g.n());
    Ok(store)
}

/// Maps a quotient-space DAG back to vertex space: each node becomes the
/// union of its classes' vertices; arcs (which reference original edge ids)
/// carry over unchanged.
fn expand_quotient(d: &PQDag, phi: &[usize], s: usize, t: usize) -> Result<PQDag> {
    let mut nodes: Vec<Vec<usize>> = vec![Vec::new(); d.node_count()];
    for (v, &c) in phi.iter().enumerate() {
        nodes[d.phi[c]].push(v);
    }
    if nodes.iter().any(|ns| ns.is_empty()) {
        return Err(Error::InvariantViolation("expansion produced an empty node".into()));
    }
    canonicalize(
        nodes,
        d.arcs.clone(),
        d.source_node,
        d.sink_node,
        s,
        t,
        format!("expand({})", d.origin),
    )
}

fn tight_family(x: &XvitStore, route: &TightRoute) -> Result<PQDag> {
    let level = &x.levels[route.level];
    let e = *x.edge(route.edge)?;
    let (alpha, beta) = (level.phi[e.tail], level.phi[e.head]);
    if alpha == beta {
        return Err(Error::InvariantViolation(format!(
            "edge {} endpoints share a quotient class",
            route.edge
        )));
    }
    let quotient = level.quotient_network(&x.edges)?;
    let mut halves: Vec<PQDag> = Vec::new();
    let mut keep = |dag: PQDag| -> Result<()> {
        match restrict_pq(&dag, alpha, beta) {
            Ok(h) => {
                halves.push(h);
                Ok(())
            }
            // This stored family holds no cut with the right orientation for
            // the pair; the other one must.
            Err(Error::NotSeparated(_)) => Ok(()),
            Err(err) => Err(err),
        }
    };
    match &level.family {
        LevelFamily::Direct { rec } => {
            keep(construct_dpq_from_order(quotient.edges(), rec)?)?;
        }
        LevelFamily::Pivot { pivot, dags } => {
            if beta != *pivot {
                if let Some(pd) =
                    dags.iter().find(|d| d.node == beta && d.side == PivotSide::SourceSide)
                {
                    let aux = forced_graph(&quotient, &[*pivot], &[beta])?;
                    keep(construct_dpq_from_order(aux.edges(), &pd.rec)?)?;
                }
            }
            if alpha != *pivot {
                if let Some(pd) =
                    dags.iter().find(|d| d.node == alpha && d.side == PivotSide::SinkSide)
                {
                    let aux = forced_graph(&quotient, &[alpha], &[*pivot])?;
                    keep(construct_dpq_from_order(aux.edges(), &pd.rec)?)?;
                }
            }
        }
    }
    if halves.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "stored records hold no cut separating edge {}",
            route.edge
        )));
    }
    let refs: Vec<&PQDag> = halves.iter().collect();
    let merged = merge_dag_family(&refs, quotient.edges())?;
    expand_quotient(&merged, &level.phi, x.s, x.t)
}

/// The DAG of all least-capacity cuts the edge contributes to, rebuilt from
/// records alone. Unsaturated edges rebuild their private record over the
/// pair-forced network; saturated edges restrict their level's two
/// pivot-side DAGs to the pair and merge. The result equals a from-scratch
/// build over the pair-forced graph.
pub fn query_allcuts(x: &XvitStore, e_id: usize) -> Result<PQDag> {
    if let Ok(pos) = x.tight.binary_search_by_key(&e_id, |r| r.edge) {
        return tight_family(x, &x.tight[pos]);
    }
    if let Ok(pos) = x.loose.binary_search_by_key(&e_id, |r| r.edge) {
        let base = x.base_network()?;
        let e = *base.edge(e_id)?;
        let h = forced_graph(&base, &[e.tail], &[e.head])?;
        return construct_dpq_from_order(h.edges(), &x.loose[pos].rec);
    }
    if x.unbounded.binary_search(&e_id).is_ok() {
        // No finite cut ever carries this edge's contribution.
        return Err(Error::UnboundedFlow);
    }
    x.edge(e_id)?;
    Err(Error::NotVital(e_id))
}

/// Identity of one stored DAG when listing them all.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StoredDagId {
    Global,
    LooseEdge(usize),
    LevelDag { level: usize, node: usize, side: PivotSide },
    LevelDirect { level: usize },
}

/// Rebuilds every stored DAG (global, per-loose-edge, per-level), expanded
/// to vertex space. Together their families cover, per vital edge, every
/// least-capacity cut that edge contributes to.
pub fn query_allcuts_all_edges(x: &XvitStore) -> Result<Vec<(StoredDagId, PQDag)>> {
    let base = x.base_network()?;
    let mut out: Vec<(StoredDagId, PQDag)> =
        vec![(StoredDagId::Global, construct_dpq_from_order(base.edges(), &x.global)?)];
    for lr in &x.loose {
        let e = *base.edge(lr.edge)?;
        let h = forced_graph(&base, &[e.tail], &[e.head])?;
        out.push((StoredDagId::LooseEdge(lr.edge), construct_dpq_from_order(h.edges(), &lr.rec)?));
    }
    for (li, level) in x.levels.iter().enumerate() {
        let quotient = level.quotient_network(&x.edges)?;
        match &level.family {
            LevelFamily::Direct { rec } => {
                let dag = construct_dpq_from_order(quotient.edges(), rec)?;
                out.push((
                    StoredDagId::LevelDirect { level: li },
                    expand_quotient(&dag, &level.phi, x.s, x.t)?,
                ));
            }
            LevelFamily::Pivot { pivot, dags } => {
                for pd in dags {
                    let (fs, ft) = match pd.side {
                        PivotSide::SourceSide => (*pivot, pd.node),
                        PivotSide::SinkSide => (pd.node, *pivot),
                    };
                    let aux = forced_graph(&quotient, &[fs], &[ft])?;
                    let dag = construct_dpq_from_order(aux.edges(), &pd.rec)?;
                    out.push((
                        StoredDagId::LevelDag { level: li, node: pd.node, side: pd.side },
                        expand_quotient(&dag, &level.phi, x.s, x.t)?,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Answer to a capacity-change family query.
#[derive(Clone, Debug)]
pub struct MincutFamilyAnswer {
    /// Maximum flow value after the change.
    pub value: u64,
    /// DAG of all minimum cuts of the changed network.
    pub dag: PQDag,
    /// Max-flow computations spent; zero means the answer came purely from
    /// stored records.
    pub flow_calls: usize,
}

/// All minimum cuts after changing one edge's capacity by `delta`,
/// reconstructed from records. Decreases that lower the value hand back the
/// edge's own cut family; ties merge it with the unchanged global family;
/// increases combine the one-sided insertion records. The only max-flow
/// spend is deciding a tie for an edge outside every store (deleted
/// outright), and it is counted in `flow_calls`.
pub fn query_allmincut(
    t: &TvitTree,
    x: &XvitStore,
    e_id: usize,
    delta: i64,
) -> Result<MincutFamilyAnswer> {
    if t.fstar != x.fstar || t.n != x.n || t.s != x.s || t.t != x.t {
        return Err(Error::InvalidInput("tree and store describe different networks".into()));
    }
    let e = *x.edge(e_id)?;
    let base = x.base_network()?;
    let global = construct_dpq_from_order(base.edges(), &x.global);

    let Some(w) = e.cap.finite() else {
        // Unbounded capacity absorbs any finite shift.
        return Ok(MincutFamilyAnswer { value: x.fstar, dag: global?, flow_calls: 0 });
    };

    if delta == 0 {
        return Ok(MincutFamilyAnswer { value: x.fstar, dag: global?, flow_calls: 0 });
    }

    if delta < 0 {
        let value = query_cap(t, e_id, delta)?;
        if value < x.fstar {
            // Only the edge's own least-capacity cuts reach the new value.
            return Ok(MincutFamilyAnswer { value, dag: query_allcuts(x, e_id)?, flow_calls: 0 });
        }
        // Value unchanged. The edge's cut family joins the answer exactly
        // when its capacity lands on the old value.
        let mut flow_calls = 0usize;
        let mut joining: Option<PQDag> = None;
        if let Ok(pos) = x.tight.binary_search_by_key(&e_id, |r| r.edge) {
            if x.tight[pos].lambda as i128 + delta as i128 == x.fstar as i128 {
                joining = Some(query_allcuts(x, e_id)?);
            }
        } else if let Ok(pos) = x.loose.binary_search_by_key(&e_id, |r| r.edge) {
            if x.loose[pos].lambda as i128 + delta as i128 == x.fstar as i128 {
                joining = Some(query_allcuts(x, e_id)?);
            }
        } else if x.unbounded.binary_search(&e_id).is_err() && delta == -(w as i64) {
            // A never-needed edge deleted outright: its cheapest
            // contributing cut may land exactly on the old value. That
            // capacity is not stored anywhere, so measure it now.
            flow_calls += 1;
            match mincut_capacity_with(&base, &[e.tail], &[e.head]) {
                Ok(CapacityValue::Finite(lam)) if lam == x.fstar + w => {
                    flow_calls += 1;
                    joining = Some(build_pq_forced(&base, &[e.tail], &[e.head])?.0);
                }
                Ok(_) => {}
                Err(Error::NotSeparated(_)) => {}
                Err(err) => return Err(err),
            }
        }
        let g_dag = global?;
        let dag = match &joining {
            Some(e_dag) => merge_dag_family(&[&g_dag, e_dag], base.edges())?,
            None => g_dag,
        };
        return Ok(MincutFamilyAnswer { value: x.fstar, dag, flow_calls });
    }

    // Increase: answered entirely from the insertion records.
    let ins = &x.insert;
    let (u, v) = (e.tail, e.head);
    let g_dag = global?;
    if !ins.source_core[u] || !ins.sink_core[v] {
        // Some minimum cut avoids the edge's contribution; exactly those
        // survive: the ones with the tail outside or the head inside.
        let mut halves: Vec<PQDag> = Vec::new();
        for (a, b) in [(x.s, u), (v, x.t)] {
            match restrict_pq(&g_dag, a, b) {
                Ok(h) => halves.push(h),
                Err(Error::NotSeparated(_)) => {}
                Err(err) => return Err(err),
            }
        }
        if halves.is_empty() {
            return Err(Error::InvariantViolation(
                "no minimum cut avoids an edge outside the cores".into(),
            ));
        }
        let refs: Vec<&PQDag> = halves.iter().collect();
        let dag = merge_dag_family(&refs, base.edges())?;
        return Ok(MincutFamilyAnswer { value: x.fstar, dag, flow_calls: 0 });
    }

    // The edge contributes to every minimum cut: the new value is the best
    // of the cheapest tail-excluding cut, the cheapest head-including cut,
    // and the uniformly shifted old minimum.
    let lifted = x.fstar as u128 + delta as u128;
    let mut best = lifted;
    if let CapacityValue::Finite(c) = ins.exclude_cap[u] {
        best = best.min(c as u128);
    }
    if let CapacityValue::Finite(c) = ins.include_cap[v] {
        best = best.min(c as u128);
    }
    let value =
        u64::try_from(best).map_err(|_| Error::LimitExceeded("cut value exceeds u64".into()))?;
    let mut members: Vec<PQDag> = Vec::new();
    if ins.exclude_cap[u] == CapacityValue::Finite(value) {
        let rec = ins.exclude_rec[u].as_ref().ok_or_else(|| {
            Error::InvariantViolation(format!("finite excluding value for {u} lacks a record"))
        })?;
        let aux = forced_graph(&base, &[], &[u])?;
        members.push(construct_dpq_from_order(aux.edges(), rec)?);
    }
    if ins.include_cap[v] == CapacityValue::Finite(value) {
        let rec = ins.include_rec[v].as_ref().ok_or_else(|| {
            Error::InvariantViolation(format!("finite including value for {v} lacks a record"))
        })?;
        let aux = forced_graph(&base, &[v], &[])?;
        members.push(construct_dpq_from_order(aux.edges(), rec)?);
    }
    if lifted == value as u128 {
        // Every old minimum cut separates tail from head here, so the
        // restriction is the full family in contracted form.
        members.push(restrict_pq(&g_dag, u, v)?);
    }
    let refs: Vec<&PQDag> = members.iter().collect();
    let dag = merge_dag_family(&refs, base.edges())?;
    Ok(MincutFamilyAnswer { value, dag, flow_calls: 0 })
}

const SCHEMA: &str = "vitalcut/1";

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: String,
    n: usize,
    s: usize,
    t: usize,
    fstar: u64,
    edges: Vec<Edge>,
    global: String,
    loose: Vec<ManifestLoose>,
    tight: Vec<TightRoute>,
    unbounded: Vec<usize>,
    levels: Vec<ManifestLevel>,
    insert: String,
}

#[derive(Serialize, Deserialize)]
struct ManifestLoose {
    edge: usize,
    lambda: u64,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct ManifestLevel {
    lambda: u64,
    phi: Vec<usize>,
    class_count: usize,
    s_node: usize,
    t_node: usize,
    steiner_nodes: Vec<usize>,
    family: ManifestFamily,
}

#[derive(Serialize, Deserialize)]
enum ManifestFamily {
    Pivot { pivot: usize, dags: Vec<ManifestDag> },
    Direct { file: String },
}

#[derive(Serialize, Deserialize)]
struct ManifestDag {
    node: usize,
    side: PivotSide,
    file: String,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T> {
    let text = fs::read_to_string(dir.join(name))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{name}: malformed record: {e}")))
}

fn side_tag(side: PivotSide) -> &'static str {
    match side {
        PivotSide::SourceSide => "s",
        PivotSide::SinkSide => "t",
    }
}

/// Writes the store as a directory: `manifest.json` plus one record file
/// per DAG and the insertion records.
pub fn save_xvit(x: &XvitStore, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(dir, "global.rec.json", &x.global)?;
    write_json(dir, "insert.json", &x.insert)?;
    let mut loose = Vec::new();
    for lr in &x.loose {
        let file = format!("loose-{}.rec.json", lr.edge);
        write_json(dir, &file, &lr.rec)?;
        loose.push(ManifestLoose { edge: lr.edge, lambda: lr.lambda, file });
    }
    let mut levels = Vec::new();
    for (li, level) in x.levels.iter().enumerate() {
        let family = match &level.family {
            LevelFamily::Direct { rec } => {
                let file = format!("level{li}-direct.rec.json");
                write_json(dir, &file, rec)?;
                ManifestFamily::Direct { file }
            }
            LevelFamily::Pivot { pivot, dags } => {
                let mut out = Vec::new();
                for pd in dags {
                    let file = format!("level{li}-{}-{}.rec.json", pd.node, side_tag(pd.side));
                    write_json(dir, &file, &pd.rec)?;
                    out.push(ManifestDag { node: pd.node, side: pd.side, file });
                }
                ManifestFamily::Pivot { pivot: *pivot, dags: out }
            }
        };
        levels.push(ManifestLevel {
            lambda: level.lambda,
            phi: level.phi.clone(),
            class_count: level.class_count,
            s_node: level.s_node,
            t_node: level.t_node,
            steiner_nodes: level.steiner_nodes.clone(),
            family,
        });
    }
    let manifest = Manifest {
        schema: SCHEMA.to_string(),
        n: x.n,
        s: x.s,
        t: x.t,
        fstar: x.fstar,
        edges: x.edges.clone(),
        global: "global.rec.json".to_string(),
        loose,
        tight: x.tight.clone(),
        unbounded: x.unbounded.clone(),
        levels,
        insert: "insert.json".to_string(),
    };
    write_json(dir, "manifest.json", &manifest)
}

/// Reads a store directory written by [`save_xvit`].
pub fn load_xvit(dir: &Path) -> Result<XvitStore> {
    let manifest: Manifest = read_json(dir, "manifest.json")?;
    if manifest.schema != SCHEMA {
        return Err(Error::InvalidInput(format!(
            "unsupported schema {:?} (expected {SCHEMA:?})",
            manifest.schema
        )));
    }
    let global: TopoRecord = read_json(dir, &manifest.global)?;
    let insert: InsertOracle = read_json(dir, &manifest.insert)?;
    let mut loose = Vec::new();
    for ml in &manifest.loose {
        loose.push(LooseRecord { edge: ml.edge, lambda: ml.lambda, rec: read_json(dir, &ml.file)? });
    }
    let mut levels = Vec::new();
    for ml in manifest.levels {
        let family = match ml.family {
            ManifestFamily::Direct { file } => LevelFamily::Direct { rec: read_json(dir, &file)? },
            ManifestFamily::Pivot { pivot, dags } => {
                let mut out = Vec::new();
                for md in dags {
                    out.push(LevelDag { node: md.node, side: md.side, rec: read_json(dir, &md.file)? });
                }
                LevelFamily::Pivot { pivot, dags: out }
            }
        };
        levels.push(QuotientLevel {
            lambda: ml.lambda,
            phi: ml.phi,
            class_count: ml.class_count,
            s_node: ml.s_node,
            t_node: ml.t_node,
            steiner_nodes: ml.steiner_nodes,
            family,
        });
    }
    Ok(XvitStore {
        n: manifest.n,
        s: manifest.s,
        t: manifest.t,
        fstar: manifest.fstar,
        edges: manifest.edges,
        global,
        loose,
        tight: manifest.tight,
        unbounded: manifest.unbounded,
        levels,
        insert,
    })
}
