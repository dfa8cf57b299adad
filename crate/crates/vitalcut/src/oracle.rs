//! Brute-force ground truth on small graphs: enumerate every (s,t)-cut and
//! derive all quantities the fast structures must reproduce — per-edge
//! least-capacity cuts, vitality, farthest cuts, minimum covers, Steiner
//! variants, and a feasibility check for prescribed flow on one edge.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{CapacityValue, FlowNetwork, STCut};
use crate::maxflow::max_flow;

/// Hard enumeration limit: 2^(n-2) cuts must stay small.
const ENUM_LIMIT: usize = 20;
const COVER_LIMIT: usize = 14;
const STEINER_LIMIT: usize = 16;

/// Exhaustive catalog of all (s,t)-cuts with per-edge derived data. Cuts are
/// kept as source-side bitmasks sorted ascending; per-edge vectors are
/// positional, parallel to `g.edges()`.
#[derive(Clone, Debug)]
pub struct CutCatalog {
    n: usize,
    masks: Vec<u32>,
    caps: Vec<CapacityValue>,
    /// Least cut capacity == maximum flow value.
    pub fstar: u64,
    /// Indices of cuts with capacity f*.
    pub mincuts: Vec<usize>,
    /// Per edge: least capacity among cuts where the edge contributes
    /// (Infinite when no finite such cut exists).
    pub lambda: Vec<CapacityValue>,
    /// Per edge: indices of the cuts achieving `lambda` with the edge
    /// contributing.
    pub mincuts_for: Vec<Vec<usize>>,
    /// Per edge: f* minus the best cut capacity with the edge's
    /// contribution ignored; positive exactly for vital edges.
    pub vitality: Vec<u64>,
    /// Per vital edge with finite lambda: index of the unique
    /// maximal-source-side cut among `mincuts_for`.
    pub farthest_for: Vec<Option<usize>>,
}

impl CutCatalog {
    pub fn compute(g: &FlowNetwork) -> Result<CutCatalog> {
        if g.n() > ENUM_LIMIT {
            return Err(Error::LimitExceeded(format!(
                "cut enumeration needs n <= {ENUM_LIMIT}, got {}",
                g.n()
            )));
        }
        let n = g.n();
        let free: Vec<usize> = (0..n).filter(|&v| v != g.s() && v != g.t()).collect();
        let mut masks: Vec<u32> = (0..(1u32 << free.len()))
            .map(|sub| {
                let mut mask = 1u32 << g.s();
                for (i, &v) in free.iter().enumerate() {
                    if sub >> i & 1 == 1 {
                        mask |= 1 << v;
                    }
                }
                mask
            })
            .collect();
        masks.sort_unstable();

        let m = g.m();
        let mut caps = Vec::with_capacity(masks.len());
        let mut lambda = vec![CapacityValue::Infinite; m];
        let mut mincuts_for: Vec<Vec<usize>> = vec![Vec::new(); m];
        // Best cut capacity per edge with that edge's contribution ignored.
        let mut best_wo = vec![CapacityValue::Infinite; m];

        for (ci, &mask) in masks.iter().enumerate() {
            let mut fin: u64 = 0;
            let mut inf_count: usize = 0;
            for e in g.edges() {
                if mask >> e.tail & 1 == 1 && mask >> e.head & 1 == 0 {
                    match e.cap {
                        CapacityValue::Finite(w) => fin += w,
                        CapacityValue::Infinite => inf_count += 1,
                    }
                }
            }
            let cap = if inf_count > 0 {
                CapacityValue::Infinite
            } else {
                CapacityValue::Finite(fin)
            };
            caps.push(cap);

            for (k, e) in g.edges().iter().enumerate() {
                let contributes = mask >> e.tail & 1 == 1 && mask >> e.head & 1 == 0;
                let excl = if !contributes {
                    cap
                } else {
                    match e.cap {
                        CapacityValue::Finite(w) => {
                            if inf_count > 0 {
                                CapacityValue::Infinite
                            } else {
                                CapacityValue::Finite(fin - w)
                            }
                        }
                        CapacityValue::Infinite => {
                            if inf_count > 1 {
                                CapacityValue::Infinite
                            } else {
                                CapacityValue::Finite(fin)
                            }
                        }
                    }
                };
                if excl < best_wo[k] {
                    best_wo[k] = excl;
                }
                if contributes {
                    if cap < lambda[k] {
                        lambda[k] = cap;
                        mincuts_for[k] = vec![ci];
                    } else if cap == lambda[k] {
                        mincuts_for[k].push(ci);
                    }
                }
            }
        }

        let fstar = caps
            .iter()
            .copied()
            .min()
            .unwrap()
            .expect_finite("least cut capacity")
            .map_err(|_| Error::UnboundedFlow)?;
        let mincuts: Vec<usize> = caps
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == CapacityValue::Finite(fstar))
            .map(|(i, _)| i)
            .collect();

        let mut vitality = Vec::with_capacity(m);
        for k in 0..m {
            let wo = best_wo[k]
                .expect_finite("cut capacity without edge")
                .map_err(|_| Error::UnboundedFlow)?;
            debug_assert!(wo <= fstar);
            vitality.push(fstar - wo);
        }

        let mut farthest_for = vec![None; m];
        for k in 0..m {
            if vitality[k] == 0 || lambda[k].is_infinite() {
                continue;
            }
            let &best = mincuts_for[k]
                .iter()
                .max_by_key(|&&ci| masks[ci].count_ones())
                .expect("vital edge with finite lambda has cuts");
            for &ci in &mincuts_for[k] {
                if masks[ci] & !masks[best] != 0 {
                    return Err(Error::InvariantViolation(format!(
                        "cuts for edge {} are not nested under union",
                        g.edges()[k].id
                    )));
                }
            }
            farthest_for[k] = Some(best);
        }

        Ok(CutCatalog {
            n,
            masks,
            caps,
            fstar,
            mincuts,
            lambda,
            mincuts_for,
            vitality,
            farthest_for,
        })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i]
    }

    pub fn capacity(&self, i: usize) -> CapacityValue {
        self.caps[i]
    }

    pub fn side(&self, i: usize) -> Vec<bool> {
        mask_to_side(self.n, self.masks[i])
    }

    pub fn cut(&self, g: &FlowNetwork, i: usize) -> STCut {
        STCut::from_side(g, &self.side(i)).expect("catalog masks are valid sides")
    }

    pub fn index_of_mask(&self, mask: u32) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }

    /// Edge is vital: removing it strictly drops the flow value.
    pub fn vital(&self, pos: usize) -> bool {
        self.vitality[pos] > 0
    }

    /// Indices of cuts of the given capacity keeping x on the source side
    /// and y on the sink side.
    pub fn separating_cuts(&self, x: usize, y: usize, cap: CapacityValue) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                self.caps[i] == cap && self.masks[i] >> x & 1 == 1 && self.masks[i] >> y & 1 == 0
            })
            .collect()
    }
}

pub fn mask_to_side(n: usize, mask: u32) -> Vec<bool> {
    (0..n).map(|v| mask >> v & 1 == 1).collect()
}

/// Minimum-cardinality set of cuts such that every vital edge has one of its
/// least-capacity cuts present; empty when no edge is vital. Exact
/// branch-and-bound set cover; deterministic.
pub fn oracle_mincut_cover(g: &FlowNetwork) -> Result<Vec<STCut>> {
    if g.n() > COVER_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "cover search needs n <= {COVER_LIMIT}, got {}",
            g.n()
        )));
    }
    let cat = CutCatalog::compute(g)?;
    let vital: Vec<usize> = (0..g.m()).filter(|&k| cat.vital(k)).collect();
    if vital.is_empty() {
        return Ok(Vec::new());
    }
    if vital.len() > 128 {
        return Err(Error::LimitExceeded("more than 128 vital edges".into()));
    }

    // Coverage bitmask per candidate cut, deduped; smallest cut mask wins as
    // representative.
    let mut by_coverage: HashMap<u128, usize> = HashMap::new();
    for ci in 0..cat.len() {
        let mut cover: u128 = 0;
        for (vi, &k) in vital.iter().enumerate() {
            if cat.mincuts_for[k].binary_search(&ci).is_ok() {
                cover |= 1 << vi;
            }
        }
        if cover != 0 {
            by_coverage.entry(cover).or_insert(ci);
        }
    }
    let mut candidates: Vec<(u128, usize)> = by_coverage.into_iter().collect();
    // Drop dominated coverages: an optimal cover can always swap a dominated
    // candidate for its dominator.
    candidates.sort_by(|a, b| {
        b.0.count_ones()
            .cmp(&a.0.count_ones())
            .then(a.1.cmp(&b.1))
    });
    let mut kept: Vec<(u128, usize)> = Vec::new();
    for (cov, ci) in candidates {
        if !kept.iter().any(|&(c2, _)| cov & !c2 == 0) {
            kept.push((cov, ci));
        }
    }

    let all: u128 = if vital.len() == 128 { u128::MAX } else { (1u128 << vital.len()) - 1 };

    // Greedy start for the bound.
    let mut best: Vec<usize> = Vec::new();
    {
        let mut uncovered = all;
        while uncovered != 0 {
            let &(cov, ci) = kept
                .iter()
                .max_by_key(|&&(c, ci2)| ((c & uncovered).count_ones(), std::cmp::Reverse(ci2)))
                .expect("every vital edge has a least-capacity cut");
            best.push(ci);
            uncovered &= !cov;
        }
    }

    fn search(
        kept: &[(u128, usize)],
        per_edge: &[Vec<usize>],
        uncovered: u128,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if uncovered == 0 {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= best.len() {
            return;
        }
        // Branch on the uncovered edge with the fewest candidates.
        let vi = (0..128)
            .filter(|&i| uncovered >> i & 1 == 1)
            .min_by_key(|&i| per_edge[i].len())
            .unwrap();
        for &cand in &per_edge[vi] {
            let (cov, ci) = kept[cand];
            chosen.push(ci);
            search(kept, per_edge, uncovered & !cov, chosen, best);
            chosen.pop();
        }
    }

    let per_edge: Vec<Vec<usize>> = (0..vital.len())
        .map(|vi| {
            (0..kept.len())
                .filter(|&c| kept[c].0 >> vi & 1 == 1)
                .collect()
        })
        .collect();
    let mut chosen = Vec::new();
    search(&kept, &per_edge, all, &mut chosen, &mut best);

    best.sort_by_key(|&ci| cat.mask(ci));
    best.dedup();
    Ok(best.iter().map(|&ci| cat.cut(g, ci)).collect())
}

/// Least capacity among cuts splitting the terminal set S, with every cut
/// achieving it. Cuts are returned in ascending mask order.
pub fn oracle_steiner_mincuts(
    g: &FlowNetwork,
    steiner: &[usize],
) -> Result<(CapacityValue, Vec<STCut>)> {
    if g.n() > STEINER_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "steiner enumeration needs n <= {STEINER_LIMIT}, got {}",
            g.n()
        )));
    }
    if steiner.len() < 2 {
        return Err(Error::InvalidInput("terminal set needs at least 2 vertices".into()));
    }
    let mut sorted = steiner.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != steiner.len() {
        return Err(Error::InvalidInput("terminal set has duplicates".into()));
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= g.n()) {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    let smask: u32 = sorted.iter().fold(0, |m, &v| m | 1 << v);

    let cat = CutCatalog::compute(g)?;
    let splits = |mask: u32| mask & smask != 0 && !mask & smask != 0;
    let mut lambda = CapacityValue::Infinite;
    for i in 0..cat.len() {
        if splits(cat.mask(i)) && cat.capacity(i) < lambda {
            lambda = cat.capacity(i);
        }
    }
    let cuts: Vec<STCut> = (0..cat.len())
        .filter(|&i| splits(cat.mask(i)) && cat.capacity(i) == lambda)
        .map(|i| cat.cut(g, i))
        .collect();
    if cuts.is_empty() {
        return Err(Error::InvariantViolation("no cut splits the terminal set".into()));
    }
    Ok((lambda, cuts))
}

/// Does some maximum flow put exactly `a` units on the edge? Answered by a
/// lower-bound feasibility reduction: pin the edge at `a`, pin the value at
/// f* through a return edge, and check that the excess network saturates.
pub fn feasible_max_flow_with_edge_flow(g: &FlowNetwork, e_id: usize, a: u64) -> Result<bool> {
    let ei = g.index_of(e_id)?;
    let e = g.edges()[ei];
    if let Some(w) = e.cap.finite() {
        if a > w {
            return Ok(false);
        }
    }
    let fstar = max_flow(g)?.value;

    let n = g.n();
    let (src, snk) = (n, n + 1);
    let mut red = FlowNetwork::new(n + 2, src, snk)?;
    for (k, e2) in g.edges().iter().enumerate() {
        if k == ei {
            continue;
        }
        red.add_edge(e2.tail, e2.head, e2.cap)?;
    }
    let mut excess = vec![0i128; n];
    excess[e.head] += a as i128;
    excess[e.tail] -= a as i128;
    excess[g.s()] += fstar as i128;
    excess[g.t()] -= fstar as i128;
    let mut need: u128 = 0;
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            red.add_edge(src, v, CapacityValue::Finite(x as u64))?;
            need += x as u128;
        } else if x < 0 {
            red.add_edge(v, snk, CapacityValue::Finite((-x) as u64))?;
        }
    }
    let got = max_flow(&red)?.value;
    Ok(got as u128 == need)
}
