//! Classification of edges by how much their removal lowers the maximum
//! flow value, split into two pipelines:
//!
//! - edges saturated by a fixed sparse maximum flow are handled with one
//!   forced-mincut query each ("tight" side);
//! - the at most n-1 partially loaded edges of that flow are screened with a
//!   forest filter and then settled with two flow computations each ("loose"
//!   side), keeping that side's total flow work linear in n.
//!
//! An edge is *vital* when deleting it strictly lowers the max-flow value;
//! its *vitality* is the drop. A vital edge is *tight* when some maximum
//! flow saturates it and *loose* otherwise.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, FlowNetwork, STCut};
use crate::maxflow::{
    acyclic_sparse_max_flow, is_maximum, max_flow, max_flow_along_edge, mincut_with,
    residual_source_side, FlowAssignment,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Tight,
    Loose,
    Nonvital,
}

/// One row of the full classification table.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct EdgeClass {
    pub edge: usize,
    pub class: EdgeKind,
    /// f* minus the max-flow value without the edge (0 for nonvital edges).
    pub vitality: u64,
    /// Least capacity of a cut the edge contributes to, when it was computed.
    pub lambda: Option<CapacityValue>,
    /// A cut of capacity `lambda` the edge contributes to, when available.
    pub witness_cut: Option<STCut>,
}

impl EdgeClass {
    pub fn to_json(&self) -> Value {
        json!({
            "edge": self.edge,
            "class": match self.class {
                EdgeKind::Tight => "tight",
                EdgeKind::Loose => "loose",
                EdgeKind::Nonvital => "nonvital",
            },
            "vitality": self.vitality,
            "lambda": self.lambda.map(|c| json!(c)).unwrap_or(Value::Null),
            "witness_cut": self
                .witness_cut
                .as_ref()
                .map(|c| json!(c.vertices()))
                .unwrap_or(Value::Null),
        })
    }
}

/// Full per-edge table plus the flow-call counters of both pipelines.
#[derive(Clone, Debug)]
pub struct VitalAnalysis {
    pub fstar: u64,
    pub rows: Vec<EdgeClass>,
    /// Max-flow computations spent on the loose side (kept at O(n)).
    pub loose_flow_calls: usize,
    /// Forced-mincut computations spent on the tight side (up to one per
    /// saturated edge).
    pub tight_flow_calls: usize,
}

impl VitalAnalysis {
    pub fn vital_rows(&self) -> impl Iterator<Item = &EdgeClass> {
        self.rows.iter().filter(|r| r.class != EdgeKind::Nonvital)
    }
}

/// A saturated vital edge found by the forced-mincut pipeline.
#[derive(Clone, PartialEq, Debug)]
pub struct TightEdge {
    pub edge: usize,
    /// Least capacity of a cut the edge contributes to.
    pub lambda: u64,
    pub vitality: u64,
    pub witness: STCut,
}

/// Outcome of the forest screening of partially loaded edges.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LooseCandidates {
    /// Survivors: a superset of all loose edges, at most n-1 of them.
    pub kept: Vec<usize>,
    /// Evicted because some maximum flow saturates them; they still need the
    /// saturated-edge treatment.
    pub evicted_saturable: Vec<usize>,
    /// Evicted because some maximum flow avoids them entirely: nonvital.
    pub evicted_zeroable: Vec<usize>,
}

/// A vital edge no maximum flow saturates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LooseEdge {
    pub edge: usize,
    pub vitality: u64,
    /// Largest flow the edge carries over all maximum flows (< capacity).
    pub alpha: u64,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }
    fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn residual_of(cap: CapacityValue, flow: u64) -> u64 {
    match cap {
        CapacityValue::Finite(w) => w - flow,
        CapacityValue::Infinite => u64::MAX,
    }
}

/// Vitality (f* drop) and witness mincut-for-the-edge obtained by deleting
/// the edge; `None` witness when the edge is nonvital.
fn vitality_by_deletion(
    g: &FlowNetwork,
    fstar: u64,
    e_id: usize,
    calls: &mut usize,
) -> Result<(u64, Option<STCut>)> {
    let g2 = g.without_edge(e_id)?;
    let f2 = max_flow(&g2)?;
    *calls += 1;
    let drop = fstar - f2.value;
    if drop == 0 {
        return Ok((0, None));
    }
    // Any least-capacity cut of the reduced network must have had the edge
    // contributing, otherwise it would beat f* in the original network.
    let side = residual_source_side(&g2, &f2);
    let cut = STCut::from_side(g, &side)?;
    debug_assert!(cut.contributing.contains(&e_id));
    Ok((drop, Some(cut)))
}

/// Saturated-edge pipeline: for every edge saturated by a maximum flow, ask
/// for the least-capacity cut separating its endpoints; the edge is vital
/// exactly when that capacity minus its own weight stays below f*. Returns
/// the vital ones with their least cut capacity and a witness cut.
pub fn tight_edges(g: &FlowNetwork) -> Result<Vec<TightEdge>> {
    let f = max_flow(g)?;
    let mut out = Vec::new();
    let mut calls = 0usize;
    tight_side(g, f.value, &saturated_ids(g, &f), &mut out, &mut calls)?;
    Ok(out)
}

fn saturated_ids(g: &FlowNetwork, f: &FlowAssignment) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(k, e)| matches!(e.cap, CapacityValue::Finite(w) if f.flows[*k] == w))
        .map(|(_, e)| e.id)
        .collect()
}

fn tight_side(
    g: &FlowNetwork,
    fstar: u64,
    ids: &[usize],
    out: &mut Vec<TightEdge>,
    calls: &mut usize,
) -> Result<()> {
    for &id in ids {
        let e = *g.edge(id)?;
        let w = e.cap.finite().expect("saturated edges have finite capacity");
        let (kappa, witness) = mincut_with(g, &[e.tail], &[e.head])?;
        *calls += 1;
        if let CapacityValue::Finite(k) = kappa {
            if k - w < fstar {
                let witness = witness.expect("finite forced cut has a witness");
                debug_assert!(witness.contributing.contains(&id));
                out.push(TightEdge { edge: id, lambda: k, vitality: fstar - (k - w), witness });
            }
        }
    }
    Ok(())
}

/// Rebalance a maximum flow around one undirected cycle of partially loaded
/// edges so that a single designated edge becomes saturated or empty,
/// without changing the flow value. Prefers emptying on ties. Returns the
/// designated edge and the rewritten flow.
pub fn redistribute_cycle(
    g: &FlowNetwork,
    f: &FlowAssignment,
    cycle: &[usize],
) -> Result<(usize, FlowAssignment)> {
    if !is_maximum(g, f) {
        return Err(Error::InvalidInput("flow is not a maximum flow".into()));
    }
    if cycle.len() < 2 {
        return Err(Error::InvalidInput("a cycle needs at least two edges".into()));
    }
    let mut ids = cycle.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != cycle.len() {
        return Err(Error::InvalidInput("repeated edge in cycle".into()));
    }
    for &id in cycle {
        let k = g.index_of(id)?;
        let e = g.edges()[k];
        let fl = f.flows[k];
        if fl == 0 || residual_of(e.cap, fl) == 0 {
            return Err(Error::InvalidInput(format!("edge {id} is not partially loaded")));
        }
    }

    // Walk the cycle: orient the first edge tail->head and follow shared
    // endpoints; `forward[i]` says edge i agrees with the walk.
    let n = cycle.len();
    let ends: Vec<(usize, usize)> = cycle
        .iter()
        .map(|&id| {
            let e = g.edge(id).unwrap();
            (e.tail, e.head)
        })
        .collect();
    let mut used = vec![false; n];
    let mut order: Vec<usize> = vec![0];
    let mut forward = vec![true];
    used[0] = true;
    let start = ends[0].0;
    let mut at = ends[0].1;
    while order.len() < n {
        let mut found = None;
        for i in 0..n {
            if used[i] {
                continue;
            }
            if ends[i].0 == at {
                found = Some((i, true, ends[i].1));
                break;
            }
            if ends[i].1 == at {
                found = Some((i, false, ends[i].0));
                break;
            }
        }
        let Some((i, fwd, next)) = found else {
            return Err(Error::InvalidInput("edges do not form a single cycle".into()));
        };
        used[i] = true;
        order.push(i);
        forward.push(fwd);
        at = next;
    }
    if at != start {
        return Err(Error::InvalidInput("edges do not form a closed cycle".into()));
    }

    let flow_at = |i: usize| f.flows[g.index_of(cycle[i]).unwrap()];
    let resid_at = |i: usize| {
        let k = g.index_of(cycle[i]).unwrap();
        residual_of(g.edges()[k].cap, f.flows[k])
    };
    let f_min = (0..n).map(flow_at).min().unwrap();
    let c_min = (0..n).map(resid_at).min().unwrap();

    // Pick the designated edge and the push direction that moves it to its
    // bound: emptying pushes against it, saturating pushes along it.
    let (target_pos, delta, along_target) = if f_min <= c_min {
        let pos = (0..n).filter(|&i| flow_at(i) == f_min).min_by_key(|&i| cycle[i]).unwrap();
        (pos, f_min, false)
    } else {
        let pos = (0..n).filter(|&i| resid_at(i) == c_min).min_by_key(|&i| cycle[i]).unwrap();
        (pos, c_min, true)
    };
    let walk_pos = order.iter().position(|&o| o == target_pos).unwrap();
    // Push with the walk when that traverses the target as needed, else
    // against it.
    let with_walk = forward[walk_pos] == along_target;

    let mut flows = f.flows.clone();
    for (wp, &i) in order.iter().enumerate() {
        let k = g.index_of(cycle[i]).unwrap();
        let along_push = forward[wp] == with_walk;
        if along_push {
            flows[k] += delta;
        } else {
            flows[k] -= delta;
        }
    }
    let f2 = FlowAssignment { flows, value: f.value };
    debug_assert!(is_maximum(g, &f2));
    Ok((cycle[target_pos], f2))
}

/// Forest screening of the partially loaded edges of a maximum flow. Edges
/// are inserted in ascending id order; each cycle evicts one provably
/// non-loose edge — the minimum-flow edge when its flow is at most the
/// minimum headroom (some maximum flow empties it), otherwise the
/// minimum-headroom edge (some maximum flow saturates it) — ties on the
/// smallest id. The flow itself is never rewritten.
pub fn loose_candidates(g: &FlowNetwork, f: &FlowAssignment) -> Result<LooseCandidates> {
    if !is_maximum(g, f) {
        return Err(Error::InvalidInput("flow is not a maximum flow".into()));
    }
    let mut sets = DisjointSets::new(g.n());
    // adj[v] = (edge index, other endpoint) of kept edges at v.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    let mut report = LooseCandidates::default();
    let mut kept: Vec<usize> = Vec::new();

    for (k, e) in g.edges().iter().enumerate() {
        let fl = f.flows[k];
        if fl == 0 || residual_of(e.cap, fl) == 0 {
            continue;
        }
        if sets.find(e.tail) != sets.find(e.head) {
            sets.union(e.tail, e.head);
            adj[e.tail].push((k, e.head));
            adj[e.head].push((k, e.tail));
            kept.push(k);
            continue;
        }
        // Unique forest path tail -> head closes a cycle with edge k.
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.n()];
        let mut queue = std::collections::VecDeque::from([e.tail]);
        let mut seen = vec![false; g.n()];
        seen[e.tail] = true;
        while let Some(v) = queue.pop_front() {
            if v == e.head {
                break;
            }
            for &(ek, other) in &adj[v] {
                if !seen[other] {
                    seen[other] = true;
                    prev[other] = Some((ek, v));
                    queue.push_back(other);
                }
            }
        }
        let mut cycle = vec![k];
        let mut at = e.head;
        while at != e.tail {
            let (ek, back) = prev[at].expect("endpoints are in one tree");
            cycle.push(ek);
            at = back;
        }

        let f_min = cycle.iter().map(|&i| f.flows[i]).min().unwrap();
        let c_min = cycle
            .iter()
            .map(|&i| residual_of(g.edges()[i].cap, f.flows[i]))
            .min()
            .unwrap();
        let evict = if f_min <= c_min {
            let i = *cycle
                .iter()
                .filter(|&&i| f.flows[i] == f_min)
                .min_by_key(|&&i| g.edges()[i].id)
                .unwrap();
            report.evicted_zeroable.push(g.edges()[i].id);
            i
        } else {
            let i = *cycle
                .iter()
                .filter(|&&i| residual_of(g.edges()[i].cap, f.flows[i]) == c_min)
                .min_by_key(|&&i| g.edges()[i].id)
                .unwrap();
            report.evicted_saturable.push(g.edges()[i].id);
            i
        };
        if evict == k {
            continue;
        }
        // Swap the evicted edge out of the forest for the new one; the cycle
        // keeps every vertex connected, so the set structure stays valid.
        let (a, b) = (g.edges()[evict].tail, g.edges()[evict].head);
        adj[a].retain(|&(ek, _)| ek != evict);
        adj[b].retain(|&(ek, _)| ek != evict);
        kept.retain(|&ek| ek != evict);
        adj[e.tail].push((k, e.head));
        adj[e.head].push((k, e.tail));
        kept.push(k);
    }

    report.kept = kept.into_iter().map(|k| g.edges()[k].id).collect();
    report.kept.sort_unstable();
    report.evicted_saturable.sort_unstable();
    report.evicted_zeroable.sort_unstable();
    debug_assert!(report.kept.len() <= g.n().saturating_sub(1));
    Ok(report)
}

/// Partially-loaded-edge pipeline: sparsify the flow, screen candidates with
/// the forest filter, then settle each survivor with a deletion flow
/// (vitality) and a flow-through-the-edge query (saturability). Returns all
/// loose edges plus the number of flow computations spent.
pub fn loose_edges(g: &FlowNetwork) -> Result<(Vec<LooseEdge>, usize)> {
    let f0 = max_flow(g)?;
    let mut calls = 1usize;
    let sparse = acyclic_sparse_max_flow(g, &f0)?;
    let cands = loose_candidates(g, &sparse)?;
    let mut out = Vec::new();
    for &id in &cands.kept {
        let (drop, _) = vitality_by_deletion(g, f0.value, id, &mut calls)?;
        if drop == 0 {
            continue;
        }
        let (alpha, _) = max_flow_along_edge(g, id)?;
        calls += 1;
        // An unbounded edge can never be saturated, so a positive deletion
        // drop makes it loose outright.
        let saturable = matches!(g.edge(id)?.cap, CapacityValue::Finite(w) if alpha >= w);
        if !saturable {
            out.push(LooseEdge { edge: id, vitality: drop, alpha });
        }
    }
    assert!(
        calls <= 3 * g.n() + 2,
        "loose pipeline used {calls} flow computations on n={}",
        g.n()
    );
    Ok((out, calls))
}

/// Classify every edge. Zero-flow edges of the sparse maximum flow are
/// nonvital outright; saturated and saturable edges go through the
/// forced-mincut pipeline; surviving partial edges go through the deletion
/// pipeline, whose flow work is asserted to stay linear in n.
pub fn all_vital_edges(g: &FlowNetwork) -> Result<VitalAnalysis> {
    let f0 = max_flow(g)?;
    let fstar = f0.value;
    let mut loose_calls = 1usize;
    let mut tight_calls = 0usize;
    let sparse = acyclic_sparse_max_flow(g, &f0)?;
    let cands = loose_candidates(g, &sparse)?;

    let mut tight_ids = saturated_ids(g, &sparse);
    tight_ids.extend_from_slice(&cands.evicted_saturable);
    tight_ids.sort_unstable();
    let mut tight_found = Vec::new();
    tight_side(g, fstar, &tight_ids, &mut tight_found, &mut tight_calls)?;
    let tight_by_id: std::collections::HashMap<usize, &TightEdge> =
        tight_found.iter().map(|t| (t.edge, t)).collect();

    let mut rows = Vec::with_capacity(g.m());
    for (k, e) in g.edges().iter().enumerate() {
        let id = e.id;
        let row = if tight_ids.binary_search(&id).is_ok() {
            match tight_by_id.get(&id) {
                Some(t) => EdgeClass {
                    edge: id,
                    class: EdgeKind::Tight,
                    vitality: t.vitality,
                    lambda: Some(CapacityValue::Finite(t.lambda)),
                    witness_cut: Some(t.witness.clone()),
                },
                None => EdgeClass {
                    edge: id,
                    class: EdgeKind::Nonvital,
                    vitality: 0,
                    lambda: None,
                    witness_cut: None,
                },
            }
        } else if cands.kept.binary_search(&id).is_ok() {
            let (drop, witness) = vitality_by_deletion(g, fstar, id, &mut loose_calls)?;
            if drop == 0 {
                EdgeClass {
                    edge: id,
                    class: EdgeKind::Nonvital,
                    vitality: 0,
                    lambda: None,
                    witness_cut: None,
                }
            } else {
                let (alpha, _) = max_flow_along_edge(g, id)?;
                loose_calls += 1;
                // An unbounded edge is never saturated and no finite cut
                // counts its contribution, yet deleting it can still lower
                // the flow value.
                let (class, lambda) = match e.cap.finite() {
                    None => (EdgeKind::Loose, CapacityValue::Infinite),
                    Some(w) => (
                        if alpha < w { EdgeKind::Loose } else { EdgeKind::Tight },
                        CapacityValue::Finite(fstar - drop + w),
                    ),
                };
                EdgeClass {
                    edge: id,
                    class,
                    vitality: drop,
                    lambda: Some(lambda),
                    witness_cut: witness,
                }
            }
        } else {
            debug_assert!(
                sparse.flows[k] == 0 || cands.evicted_zeroable.binary_search(&id).is_ok()
            );
            EdgeClass { edge: id, class: EdgeKind::Nonvital, vitality: 0, lambda: None, witness_cut: None }
        };
        rows.push(row);
    }
    assert!(
        loose_calls <= 3 * g.n() + 2,
        "loose pipeline used {loose_calls} flow computations on n={}",
        g.n()
    );
    Ok(VitalAnalysis { fstar, rows, loose_flow_calls: loose_calls, tight_flow_calls: tight_calls })
}

/// The k-th most vital edge (1-based), ordering by vitality descending and
/// then by edge id; `None` when fewer than k edges are vital.
pub fn kth_most_vital(g: &FlowNetwork, k: usize) -> Result<Option<(usize, u64)>> {
    if k == 0 {
        return Err(Error::InvalidInput("rank is 1-based".into()));
    }
    let analysis = all_vital_edges(g)?;
    let mut vital: Vec<(u64, usize)> =
        analysis.vital_rows().map(|r| (r.vitality, r.edge)).collect();
    vital.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(vital.get(k - 1).map(|&(v, id)| (id, v)))
}

/// Per-edge least capacity of a cut separating the edge's endpoints, `None`
/// where no (s,t)-cut can separate them (edges out of t or into s).
pub fn lambda_table(g: &FlowNetwork) -> Result<Vec<(usize, Option<CapacityValue>)>> {
    g.edges()
        .iter()
        .map(|e| {
            if e.tail == g.t() || e.head == g.s() {
                return Ok((e.id, None));
            }
            Ok((e.id, Some(crate::maxflow::mincut_capacity_with(g, &[e.tail], &[e.head])?)))
        })
        .collect()
}

/// Constructively verify that `cut` is a least-capacity cut among those the
/// edge contributes to: lowering the edge's capacity to its vitality turns
/// exactly these cuts into global least-capacity cuts, so a maximum flow of
/// the lowered network must saturate every contributing edge of `cut` and
/// avoid every incoming one.
pub fn verify_genflowcut(g: &FlowNetwork, e_id: usize, cut: &STCut) -> Result<bool> {
    let e = *g.edge(e_id)?;
    if cut.side.len() != g.n() {
        return Err(Error::InvalidInput("cut is over a different vertex set".into()));
    }
    if !cut.contributing.contains(&e_id) {
        return Err(Error::InvalidInput(format!("edge {e_id} does not contribute to the cut")));
    }
    if e.cap.is_infinite() {
        return Err(Error::NotVital(e_id));
    }
    let fstar = max_flow(g)?.value;
    let drop = fstar - max_flow(&g.without_edge(e_id)?)?.value;
    if drop == 0 {
        return Err(Error::NotVital(e_id));
    }
    let g2 = g.with_edge_capacity(e_id, CapacityValue::Finite(drop))?;
    let f2 = max_flow(&g2)?;
    if f2.value != fstar {
        return Err(Error::InvariantViolation(
            "lowering an edge to its vitality changed the flow value".into(),
        ));
    }
    let flow_of = |id: usize| f2.flows[g2.index_of(id).unwrap()];
    let saturated = cut.contributing.iter().all(|&id| {
        let w = g2.edge(id).unwrap().cap;
        matches!(w, CapacityValue::Finite(w) if flow_of(id) == w)
    });
    let empty = cut.incoming.iter().all(|&id| flow_of(id) == 0);
    Ok(saturated && empty)
}
