//! Exact integer maximum-flow engine (Dinic) and residual-graph services:
//! least-capacity cuts with forced sides, maximum and minimum flow along a
//! single edge, and conversion of a maximum flow into an acyclic one with at
//! most n-1 partially saturated edges.
//!
//! Infinite capacities are realized internally as a finite stand-in strictly
//! larger than any feasible flow value, so unboundedness stays detectable
//! while the engine works on plain integers.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, FlowNetwork, STCut};

/// A feasible (s,t)-flow, stored positionally: `flows[k]` is the flow on
/// `g.edges()[k]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlowAssignment {
    pub flows: Vec<u64>,
    pub value: u64,
}

impl FlowAssignment {
    /// Flow on the edge with the given id.
    pub fn flow_of(&self, g: &FlowNetwork, id: usize) -> Result<u64> {
        Ok(self.flows[g.index_of(id)?])
    }

    /// Capacity constraints, conservation at internal vertices, and the
    /// stated value all hold.
    pub fn is_feasible(&self, g: &FlowNetwork) -> bool {
        if self.flows.len() != g.m() {
            return false;
        }
        let mut balance = vec![0i128; g.n()];
        for (k, e) in g.edges().iter().enumerate() {
            let f = self.flows[k];
            if let Some(w) = e.cap.finite() {
                if f > w {
                    return false;
                }
            }
            balance[e.tail] -= f as i128;
            balance[e.head] += f as i128;
        }
        for v in 0..g.n() {
            if v != g.s() && v != g.t() && balance[v] != 0 {
                return false;
            }
        }
        balance[g.s()] == -(self.value as i128) && balance[g.t()] == self.value as i128
    }

    /// JSON object `{"value": v, "flows": {"<edge id>": f}}` with keys in
    /// ascending id order.
    pub fn to_json(&self, g: &FlowNetwork) -> Value {
        let mut flows = Map::new();
        for (k, e) in g.edges().iter().enumerate() {
            flows.insert(e.id.to_string(), json!(self.flows[k]));
        }
        json!({ "value": self.value, "flows": flows })
    }
}

/// Residual adjacency of a flow: forward arcs where capacity is not
/// exhausted, backward arcs where flow can be returned.
pub struct ResidualView {
    /// fwd[v] and back[v] list (target vertex, edge position) pairs.
    fwd: Vec<Vec<(usize, usize)>>,
    back: Vec<Vec<(usize, usize)>>,
    n: usize,
}

impl ResidualView {
    pub fn new(g: &FlowNetwork, f: &FlowAssignment) -> ResidualView {
        let mut fwd = vec![Vec::new(); g.n()];
        let mut back = vec![Vec::new(); g.n()];
        for (k, e) in g.edges().iter().enumerate() {
            let fl = f.flows[k];
            let open = match e.cap {
                CapacityValue::Infinite => true,
                CapacityValue::Finite(w) => fl < w,
            };
            if open {
                fwd[e.tail].push((e.head, k));
            }
            if fl > 0 {
                back[e.head].push((e.tail, k));
            }
        }
        ResidualView { fwd, back, n: g.n() }
    }

    /// Vertices reachable from `start` along residual arcs.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(v) = queue.pop() {
            for &(w, _) in self.fwd[v].iter().chain(self.back[v].iter()) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Vertices that can reach `target` along residual arcs.
    pub fn reaching(&self, target: usize) -> Vec<bool> {
        // Reverse adjacency: arc v->w is entered from w when walking backward.
        let mut rev = vec![Vec::new(); self.n];
        for v in 0..self.n {
            for &(w, _) in self.fwd[v].iter().chain(self.back[v].iter()) {
                rev[w].push(v);
            }
        }
        let mut seen = vec![false; self.n];
        let mut queue = vec![target];
        seen[target] = true;
        while let Some(v) = queue.pop() {
            for &u in &rev[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push(u);
                }
            }
        }
        seen
    }
}

/// Source side of the nearest mincut: vertices residually reachable from s.
pub fn residual_source_side(g: &FlowNetwork, f: &FlowAssignment) -> Vec<bool> {
    ResidualView::new(g, f).reachable_from(g.s())
}

/// Vertices that residually reach t; their complement is the source side of
/// the farthest mincut.
pub fn residual_sink_side(g: &FlowNetwork, f: &FlowAssignment) -> Vec<bool> {
    ResidualView::new(g, f).reaching(g.t())
}

/// Nearest mincut of a maximum flow.
pub fn nearest_mincut(g: &FlowNetwork, f: &FlowAssignment) -> Result<STCut> {
    let cut = STCut::from_side(g, &residual_source_side(g, f))?;
    debug_assert_eq!(cut.capacity, CapacityValue::Finite(f.value));
    Ok(cut)
}

/// Farthest mincut of a maximum flow.
pub fn farthest_mincut_of(g: &FlowNetwork, f: &FlowAssignment) -> Result<STCut> {
    let reach_t = residual_sink_side(g, f);
    let side: Vec<bool> = reach_t.iter().map(|&b| !b).collect();
    let cut = STCut::from_side(g, &side)?;
    debug_assert_eq!(cut.capacity, CapacityValue::Finite(f.value));
    Ok(cut)
}

/// True iff `f` is feasible and admits no residual s->t path.
pub fn is_maximum(g: &FlowNetwork, f: &FlowAssignment) -> bool {
    f.is_feasible(g) && !residual_source_side(g, f)[g.t()]
}

// ---------------------------------------------------------------------------
// Dinic core
// ---------------------------------------------------------------------------

struct Dinic {
    s: usize,
    t: usize,
    to: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize, s: usize, t: usize) -> Dinic {
        Dinic {
            s,
            t,
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    /// Add an arc pair; `back` > 0 warm-starts the arc with existing flow.
    fn arc(&mut self, u: usize, v: usize, fwd: u64, back: u64) -> usize {
        let i = self.to.len();
        self.to.push(v);
        self.cap.push(fwd);
        self.adj[u].push(i);
        self.to.push(u);
        self.cap.push(back);
        self.adj[v].push(i + 1);
        i
    }

    fn bfs(&mut self) -> bool {
        self.level.fill(-1);
        self.level[self.s] = 0;
        let mut queue = std::collections::VecDeque::from([self.s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let w = self.to[a];
                if self.cap[a] > 0 && self.level[w] < 0 {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.level[self.t] >= 0
    }

    fn dfs(&mut self, v: usize, limit: u64) -> u64 {
        if v == self.t {
            return limit;
        }
        while self.iter[v] < self.adj[v].len() {
            let a = self.adj[v][self.iter[v]];
            let w = self.to[a];
            if self.cap[a] > 0 && self.level[w] == self.level[v] + 1 {
                let pushed = self.dfs(w, limit.min(self.cap[a]));
                if pushed > 0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    /// Augment to completion; returns the total flow pushed.
    fn run(&mut self) -> u128 {
        let mut total: u128 = 0;
        while self.bfs() {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(self.s, u64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed as u128;
            }
        }
        total
    }

    /// Vertices reachable from s in the current residual state.
    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = vec![self.s];
        seen[self.s] = true;
        while let Some(v) = queue.pop() {
            for &a in &self.adj[v] {
                let w = self.to[a];
                if self.cap[a] > 0 && !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen
    }
}

/// Maximum (s,t)-flow. Errors with `UnboundedFlow` when an s->t path of
/// infinite-capacity edges exists.
pub fn max_flow(g: &FlowNetwork) -> Result<FlowAssignment> {
    let big = g.big();
    let mut d = Dinic::new(g.n(), g.s(), g.t());
    let arcs: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| d.arc(e.tail, e.head, e.cap.finite().unwrap_or(big), 0))
        .collect();
    let total = d.run();
    if total >= big as u128 {
        return Err(Error::UnboundedFlow);
    }
    let flows = arcs.iter().map(|&a| d.cap[a ^ 1]).collect();
    Ok(FlowAssignment { flows, value: total as u64 })
}

fn check_forcing_sets(g: &FlowNetwork, force_s: &[usize], force_t: &[usize]) -> Result<()> {
    for &x in force_s.iter().chain(force_t.iter()) {
        if x >= g.n() {
            return Err(Error::InvalidInput(format!("vertex {x} out of range")));
        }
    }
    if force_s.contains(&g.t()) {
        return Err(Error::NotSeparated("t cannot be forced onto the source side".into()));
    }
    if force_t.contains(&g.s()) {
        return Err(Error::NotSeparated("s cannot be forced onto the sink side".into()));
    }
    if let Some(&x) = force_s.iter().find(|x| force_t.contains(x)) {
        return Err(Error::NotSeparated(format!("vertex {x} forced onto both sides")));
    }
    Ok(())
}

/// Least capacity of an (s,t)-cut keeping `force_s` on the source side and
/// `force_t` on the sink side, together with a witness cut of that capacity
/// (`None` when every such cut is infinite).
pub fn mincut_with(
    g: &FlowNetwork,
    force_s: &[usize],
    force_t: &[usize],
) -> Result<(CapacityValue, Option<STCut>)> {
    check_forcing_sets(g, force_s, force_t)?;
    // Infinite edges (s,x) and (y,t) make any cut misplacing x or y
    // unboundedly expensive, so the plain mincut of the augmented network is
    // the forced mincut. The augmentation adds no finite capacity, hence
    // g.big() still strictly bounds every finite cut of it.
    let big: u64 = g.big();
    let mut d = Dinic::new(g.n(), g.s(), g.t());
    for e in g.edges() {
        d.arc(e.tail, e.head, e.cap.finite().unwrap_or(big), 0);
    }
    for &x in force_s {
        if x != g.s() {
            d.arc(g.s(), x, big, 0);
        }
    }
    for &y in force_t {
        if y != g.t() {
            d.arc(y, g.t(), big, 0);
        }
    }
    let total = d.run();
    if total >= big as u128 {
        return Ok((CapacityValue::Infinite, None));
    }
    let side = d.reachable();
    let cut = STCut::from_side(g, &side)?;
    debug_assert_eq!(cut.capacity, CapacityValue::Finite(total as u64));
    Ok((cut.capacity, Some(cut)))
}

/// Capacity-only variant of [`mincut_with`].
pub fn mincut_capacity_with(
    g: &FlowNetwork,
    force_s: &[usize],
    force_t: &[usize],
) -> Result<CapacityValue> {
    mincut_with(g, force_s, force_t).map(|(c, _)| c)
}

/// Largest flow the edge can carry across all maximum flows, together with a
/// maximum flow realizing it. Computed on an auxiliary network with new
/// terminals: the old terminals are tied off at capacity f*, the edge is
/// replaced by capacity-w(e) arcs from the new source into its head and from
/// its tail into the new sink, and augmentation continues from the original
/// flow.
pub fn max_flow_along_edge(g: &FlowNetwork, e_id: usize) -> Result<(u64, FlowAssignment)> {
    let base = max_flow(g)?;
    let fstar = base.value;
    let ei = g.index_of(e_id)?;
    let e = g.edges()[ei];

    // A finite sentinel above any feasible value in the auxiliary network.
    let big = {
        let mut sum: u128 = 2 * fstar as u128;
        for (k, e2) in g.edges().iter().enumerate() {
            if k == ei {
                continue;
            }
            sum += e2.cap.finite().unwrap_or(0) as u128;
        }
        sum += 2 * e.cap.finite().unwrap_or(0) as u128;
        u64::try_from(sum + 1).map_err(|_| Error::LimitExceeded("capacity sum overflow".into()))?
    };

    let (s2, t2) = (g.n(), g.n() + 1);
    let mut d = Dinic::new(g.n() + 2, s2, t2);
    let mut arcs = Vec::with_capacity(g.m());
    for (k, e2) in g.edges().iter().enumerate() {
        if k == ei {
            arcs.push(usize::MAX);
            continue;
        }
        let c = e2.cap.finite().unwrap_or(big);
        let fl = base.flows[k];
        arcs.push(d.arc(e2.tail, e2.head, c - fl, fl));
    }
    d.arc(s2, g.s(), 0, fstar);
    d.arc(g.t(), t2, 0, fstar);
    let we = e.cap.finite().unwrap_or(big);
    let fe = base.flows[ei];
    let arc_ev = d.arc(s2, e.head, we - fe, fe);
    let arc_eu = d.arc(e.tail, t2, we - fe, fe);

    let pushed = d.run();
    let alpha_wide = fe as u128 + pushed;
    if e.cap.is_infinite() && alpha_wide >= big as u128 {
        return Err(Error::UnboundedFlow);
    }
    let alpha = alpha_wide as u64;
    debug_assert_eq!(d.cap[arc_ev ^ 1], alpha);
    debug_assert_eq!(d.cap[arc_eu ^ 1], alpha);

    let flows: Vec<u64> = arcs
        .iter()
        .map(|&a| if a == usize::MAX { alpha } else { d.cap[a ^ 1] })
        .collect();
    let f_m = FlowAssignment { flows, value: fstar };
    debug_assert!(f_m.is_feasible(g));
    Ok((alpha, f_m))
}

/// Smallest flow the edge carries across all maximum flows:
/// f* minus the maximum flow of the network without the edge. Positive
/// exactly when every maximum flow needs the edge.
pub fn min_flow_along_edge(g: &FlowNetwork, e_id: usize) -> Result<u64> {
    let fstar = max_flow(g)?.value;
    let rest = max_flow(&g.without_edge(e_id)?)?.value;
    Ok(fstar - rest)
}

/// Rebuild a maximum flow so that its support is acyclic and at most n-1
/// edges are partially saturated: cancel directed flow cycles, then push
/// circulations around undirected cycles of partial edges until those edges
/// form a forest. The support never grows, so acyclicity survives the second
/// phase.
pub fn acyclic_sparse_max_flow(g: &FlowNetwork, f: &FlowAssignment) -> Result<FlowAssignment> {
    if !f.is_feasible(g) {
        return Err(Error::InvalidInput("flow is not feasible".into()));
    }
    if residual_source_side(g, f)[g.t()] {
        return Err(Error::InvalidInput("flow is not maximum".into()));
    }
    let mut fl = f.flows.clone();

    cancel_directed_cycles(g, &mut fl);

    // Break undirected cycles among partially saturated edges.
    loop {
        let Some(cycle) = undirected_partial_cycle(g, &fl) else { break };
        push_around_cycle(g, &mut fl, &cycle);
    }

    let out = FlowAssignment { flows: fl, value: f.value };
    debug_assert!(out.is_feasible(g));
    Ok(out)
}

fn cancel_directed_cycles(g: &FlowNetwork, fl: &mut [u64]) {
    loop {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
        for (k, e) in g.edges().iter().enumerate() {
            if fl[k] > 0 {
                adj[e.tail].push(k);
            }
        }
        let Some(cycle) = find_directed_cycle(g, &adj) else { return };
        let delta = cycle.iter().map(|&k| fl[k]).min().unwrap();
        for &k in &cycle {
            fl[k] -= delta;
        }
    }
}

/// DFS for a directed cycle over the given edge adjacency; returns the edge
/// positions along one cycle if present.
fn find_directed_cycle(g: &FlowNetwork, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    // color: 0 unvisited, 1 on stack, 2 done
    let mut color = vec![0u8; g.n()];
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (vertex, next child index)
    let mut path_edges: Vec<usize> = Vec::new();
    for root in 0..g.n() {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, 0));
        while let Some(&(v, ci)) = stack.last() {
            if ci < adj[v].len() {
                stack.last_mut().unwrap().1 += 1;
                let k = adj[v][ci];
                let w = g.edges()[k].head;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        path_edges.push(k);
                        stack.push((w, 0));
                    }
                    1 => {
                        // Cycle: suffix of the path from w, plus the closer.
                        let mut cyc = vec![k];
                        let mut at = v;
                        for &pk in path_edges.iter().rev() {
                            if at == w {
                                break;
                            }
                            cyc.push(pk);
                            at = g.edges()[pk].tail;
                        }
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
                path_edges.pop();
            }
        }
        path_edges.clear();
    }
    None
}

fn is_partial(e: &crate::graph::Edge, fl: u64) -> bool {
    fl > 0
        && match e.cap {
            CapacityValue::Infinite => true,
            CapacityValue::Finite(w) => fl < w,
        }
}

/// Find one undirected cycle among partial edges, as edge positions in walk
/// order: forest edges from one endpoint of the closing edge to the other,
/// then the closing edge.
fn undirected_partial_cycle(g: &FlowNetwork, fl: &[u64]) -> Option<Vec<usize>> {
    let mut parent = (0..g.n()).collect::<Vec<usize>>();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut accepted: Vec<usize> = Vec::new();
    for (k, e) in g.edges().iter().enumerate() {
        if !is_partial(e, fl[k]) {
            continue;
        }
        let (ru, rv) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        if ru == rv {
            // Walk the accepted forest from e.head back to e.tail.
            let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
            for &a in &accepted {
                let ea = &g.edges()[a];
                adj[ea.tail].push((ea.head, a));
                adj[ea.head].push((ea.tail, a));
            }
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.n()];
            let mut queue = std::collections::VecDeque::from([e.head]);
            let mut seen = vec![false; g.n()];
            seen[e.head] = true;
            while let Some(v) = queue.pop_front() {
                if v == e.tail {
                    break;
                }
                for &(w, a) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        prev[w] = Some((v, a));
                        queue.push_back(w);
                    }
                }
            }
            let mut cyc = Vec::new();
            let mut at = e.tail;
            while at != e.head {
                let (p, a) = prev[at].expect("forest path must exist");
                cyc.push(a);
                at = p;
            }
            cyc.reverse();
            cyc.push(k);
            return Some(cyc);
        }
        parent[ru] = rv;
        accepted.push(k);
    }
    None
}

/// Push a circulation around an undirected cycle of partial edges until one
/// of them saturates or drains; conservation and the flow value are
/// untouched.
fn push_around_cycle(g: &FlowNetwork, fl: &mut [u64], cycle: &[usize]) {
    // Orient the walk: start at the tail of the closing edge (which is the
    // last element, walked tail->head last). Reconstruct vertex order by
    // walking the cycle; an edge is "forward" when the walk uses tail->head.
    let closer = *cycle.last().unwrap();
    let mut at = g.edges()[closer].head;
    let mut forward = Vec::with_capacity(cycle.len());
    for &k in cycle {
        let e = &g.edges()[k];
        if e.tail == at {
            forward.push(true);
            at = e.head;
        } else {
            debug_assert_eq!(e.head, at);
            forward.push(false);
            at = e.tail;
        }
    }
    debug_assert_eq!(at, g.edges()[closer].head);

    let headroom = |k: usize| match g.edges()[k].cap {
        CapacityValue::Infinite => u64::MAX,
        CapacityValue::Finite(w) => w - fl[k],
    };
    let delta_for = |dir_forward: &dyn Fn(usize) -> bool| {
        cycle
            .iter()
            .enumerate()
            .map(|(i, &k)| if dir_forward(i) { headroom(k) } else { fl[k] })
            .min()
            .unwrap()
    };
    let fwd_mask = forward.clone();
    let mut delta = delta_for(&|i| fwd_mask[i]);
    let mut dir = true;
    if delta == u64::MAX {
        // Every edge faces forward with unbounded headroom: drain instead.
        delta = delta_for(&|i| !fwd_mask[i]);
        dir = false;
    }
    debug_assert!(delta > 0 && delta < u64::MAX);
    for (i, &k) in cycle.iter().enumerate() {
        if forward[i] == dir {
            fl[k] += delta;
        } else {
            fl[k] -= delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_gm, heavy_bipartite, path_graph};
    use crate::graph::FlowNetwork;

    fn fin(v: u64) -> CapacityValue {
        CapacityValue::Finite(v)
    }

    #[test]
    fn path_value() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let f = max_flow(&g).unwrap();
        assert_eq!(f.value, 3);
        assert_eq!(f.flows, vec![3, 3, 3]);
        assert!(is_maximum(&g, &f));
    }

    #[test]
    fn matrix_gadget_value() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(max_flow(&g).unwrap().value, 10);
    }

    #[test]
    fn disconnected_is_zero() {
        let mut g = FlowNetwork::new(3, 0, 2).unwrap();
        g.add_edge(0, 1, fin(4)).unwrap();
        let f = max_flow(&g).unwrap();
        assert_eq!(f.value, 0);
        assert_eq!(f.flows, vec![0]);
    }

    #[test]
    fn unbounded_is_detected() {
        let mut g = FlowNetwork::new(3, 0, 2).unwrap();
        g.add_edge(0, 1, CapacityValue::Infinite).unwrap();
        g.add_edge(1, 2, CapacityValue::Infinite).unwrap();
        g.add_edge(1, 2, fin(3)).unwrap();
        assert!(matches!(max_flow(&g), Err(Error::UnboundedFlow)));
    }

    #[test]
    fn infinite_edge_off_path_is_fine() {
        let mut g = FlowNetwork::new(4, 0, 3).unwrap();
        g.add_edge(0, 1, fin(5)).unwrap();
        g.add_edge(1, 3, fin(2)).unwrap();
        g.add_edge(2, 1, CapacityValue::Infinite).unwrap();
        assert_eq!(max_flow(&g).unwrap().value, 2);
    }

    #[test]
    fn forced_cut_on_path() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let (cap, cut) = mincut_with(&g, &[1], &[2]).unwrap();
        assert_eq!(cap, fin(3));
        let cut = cut.unwrap();
        assert!(cut.contains(1) && !cut.contains(2));
        assert_eq!(cut.contributing, vec![1]);
    }

    #[test]
    fn forced_cut_rejects_contradictions() {
        let g = path_graph(&[1, 1]).unwrap();
        assert!(matches!(mincut_with(&g, &[2], &[]), Err(Error::NotSeparated(_))));
        assert!(matches!(mincut_with(&g, &[], &[0]), Err(Error::NotSeparated(_))));
        assert!(matches!(mincut_with(&g, &[1], &[1]), Err(Error::NotSeparated(_))));
    }

    #[test]
    fn forced_cut_heavy_bipartite() {
        // Separating v_2 from u_1 costs 2n^2 even though f* = n^2.
        let n = 3;
        let g = heavy_bipartite(n, 2).unwrap();
        assert_eq!(max_flow(&g).unwrap().value, 9);
        let v2 = 1 + n + 1;
        let u1 = 1;
        assert_eq!(mincut_capacity_with(&g, &[v2], &[u1]).unwrap(), fin(18));
    }

    #[test]
    fn forced_cut_can_be_infinite() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        // Forcing a matrix-row vertex to the sink side cuts an infinite edge.
        let (cap, cut) = mincut_with(&g, &[], &[1]).unwrap();
        assert_eq!(cap, CapacityValue::Infinite);
        assert!(cut.is_none());
    }

    #[test]
    fn along_edge_on_path() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let (alpha, fm) = max_flow_along_edge(&g, 0).unwrap();
        assert_eq!(alpha, 3);
        assert_eq!(fm.value, 3);
        assert_eq!(fm.flow_of(&g, 0).unwrap(), 3);
    }

    #[test]
    fn along_edge_heavy_bipartite() {
        // Flow on (u_1,v_1) maxes out at the sink-edge capacity n.
        let n = 3;
        let g = heavy_bipartite(n, 2).unwrap();
        let (alpha, fm) = max_flow_along_edge(&g, n).unwrap();
        assert_eq!(alpha, 3);
        assert!(is_maximum(&g, &fm));
        assert_eq!(fm.flow_of(&g, n).unwrap(), 3);
    }

    #[test]
    fn along_edge_with_bypass() {
        let mut g = FlowNetwork::new(3, 0, 2).unwrap();
        let e_top = g.add_edge(0, 1, fin(5)).unwrap();
        g.add_edge(1, 2, fin(5)).unwrap();
        g.add_edge(0, 2, fin(5)).unwrap();
        let (alpha, _) = max_flow_along_edge(&g, e_top).unwrap();
        assert_eq!(alpha, 5);
        assert_eq!(min_flow_along_edge(&g, e_top).unwrap(), 5);
    }

    #[test]
    fn min_flow_on_path_and_matrix() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        assert_eq!(min_flow_along_edge(&g, 1).unwrap(), 3);
        let m = vec![vec![1, 2], vec![3, 4]];
        let g = gen_gm(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let id = 2 + i * 2 + j;
                assert_eq!(min_flow_along_edge(&g, id).unwrap(), m[i][j]);
            }
        }
    }

    #[test]
    fn circulation_is_cancelled() {
        let mut g = FlowNetwork::new(4, 0, 3).unwrap();
        g.add_edge(0, 3, fin(1)).unwrap();
        g.add_edge(1, 2, fin(5)).unwrap();
        g.add_edge(2, 1, fin(5)).unwrap();
        let f = FlowAssignment { flows: vec![1, 3, 3], value: 1 };
        assert!(f.is_feasible(&g));
        let out = acyclic_sparse_max_flow(&g, &f).unwrap();
        assert_eq!(out.flows, vec![1, 0, 0]);
        assert_eq!(out.value, 1);
    }

    #[test]
    fn sparse_rewrite_caps_partial_edges() {
        let n = 3;
        let g = heavy_bipartite(n, 2).unwrap();
        // Canonical flow: n per source edge, 1 per middle edge, n per sink edge.
        let mut flows = vec![n as u64; n];
        flows.extend(vec![1u64; n * n]);
        flows.extend(vec![n as u64; n]);
        let f = FlowAssignment { flows, value: (n * n) as u64 };
        assert!(is_maximum(&g, &f));
        let out = acyclic_sparse_max_flow(&g, &f).unwrap();
        assert_eq!(out.value, 9);
        assert!(out.is_feasible(&g));
        let partial = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(k, e)| is_partial(e, out.flows[*k]))
            .count();
        assert!(partial <= g.n() - 1, "{partial} partial edges");
        assert!(undirected_partial_cycle(&g, &out.flows).is_none());
    }

    #[test]
    fn path_flow_already_sparse() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let f = max_flow(&g).unwrap();
        let out = acyclic_sparse_max_flow(&g, &f).unwrap();
        assert_eq!(out.flows, f.flows);
    }

    #[test]
    fn rejects_non_maximum_flow() {
        let g = path_graph(&[5, 3, 7]).unwrap();
        let f = FlowAssignment { flows: vec![0, 0, 0], value: 0 };
        assert!(matches!(
            acyclic_sparse_max_flow(&g, &f),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn residual_sides_bracket_mincuts() {
        let g = gen_gm(&[vec![1, 2], vec![3, 4]]).unwrap();
        let f = max_flow(&g).unwrap();
        let near = nearest_mincut(&g, &f).unwrap();
        let far = farthest_mincut_of(&g, &f).unwrap();
        assert_eq!(near.capacity, fin(10));
        assert_eq!(far.capacity, fin(10));
        // Unique finite cut: {s, u_0, u_1} both ways.
        assert_eq!(near.side, far.side);
        assert_eq!(near.vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn flow_json_shape() {
        let g = path_graph(&[2, 2]).unwrap();
        let f = max_flow(&g).unwrap();
        let v = f.to_json(&g);
        assert_eq!(v["value"], 2);
        assert_eq!(v["flows"]["1"], 2);
    }
}
