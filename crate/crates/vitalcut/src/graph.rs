//! Graph data model: directed multigraphs with exact integer capacities,
//! (s,t)-cuts, and DIMACS-style file I/O.

use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact capacity: a nonnegative integer or the infinite sentinel.
///
/// `Infinite` compares greater than every `Finite` value and absorbs addition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CapacityValue {
    Finite(u64),
    Infinite,
}

impl CapacityValue {
    pub const ZERO: CapacityValue = CapacityValue::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, CapacityValue::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, CapacityValue::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            CapacityValue::Finite(v) => Some(v),
            CapacityValue::Infinite => None,
        }
    }

    pub fn expect_finite(self, what: &str) -> Result<u64> {
        self.finite()
            .ok_or_else(|| Error::InvalidInput(format!("{what} is infinite")))
    }

    /// Shift a finite value by a signed delta. Errors when the value is
    /// infinite or the result would be negative.
    pub fn add_signed(self, delta: i64) -> Result<CapacityValue> {
        let v = self.expect_finite("capacity")?;
        let shifted = (v as i128) + (delta as i128);
        if shifted < 0 {
            return Err(Error::InvalidInput(format!(
                "capacity {v} shifted by {delta} would be negative"
            )));
        }
        Ok(CapacityValue::Finite(shifted as u64))
    }
}

impl Add for CapacityValue {
    type Output = CapacityValue;

    fn add(self, rhs: CapacityValue) -> CapacityValue {
        match (self, rhs) {
            (CapacityValue::Finite(a), CapacityValue::Finite(b)) => {
                CapacityValue::Finite(a.checked_add(b).expect("capacity sum overflow"))
            }
            _ => CapacityValue::Infinite,
        }
    }
}

impl std::iter::Sum for CapacityValue {
    fn sum<I: Iterator<Item = CapacityValue>>(iter: I) -> CapacityValue {
        iter.fold(CapacityValue::ZERO, Add::add)
    }
}

impl fmt::Display for CapacityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityValue::Finite(v) => write!(f, "{v}"),
            CapacityValue::Infinite => write!(f, "inf"),
        }
    }
}

impl From<u64> for CapacityValue {
    fn from(v: u64) -> Self {
        CapacityValue::Finite(v)
    }
}

impl Serialize for CapacityValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CapacityValue::Finite(v) => ser.serialize_u64(*v),
            CapacityValue::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CapacityValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct CapVisitor;
        impl<'de> Visitor<'de> for CapVisitor {
            type Value = CapacityValue;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a nonnegative integer or the string \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CapacityValue, E> {
                Ok(CapacityValue::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CapacityValue, E> {
                if v < 0 {
                    Err(E::custom("negative capacity"))
                } else {
                    Ok(CapacityValue::Finite(v as u64))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CapacityValue, E> {
                if v == "inf" {
                    Ok(CapacityValue::Infinite)
                } else {
                    Err(E::custom(format!("unknown capacity token {v:?}")))
                }
            }
        }
        de.deserialize_any(CapVisitor)
    }
}

/// A directed edge with a stable id. Parallel edges are first-class; ids
/// stay stable under edge removal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub cap: CapacityValue,
}

/// Directed multigraph with designated source and sink.
///
/// Invariants: `s != t`, no self loops, every edge capacity positive,
/// edge ids strictly increasing in `edges`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlowNetwork {
    n: usize,
    s: usize,
    t: usize,
    edges: Vec<Edge>,
    next_id: usize,
}

impl FlowNetwork {
    pub fn new(n: usize, s: usize, t: usize) -> Result<FlowNetwork> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 vertices, got {n}")));
        }
        if s >= n || t >= n {
            return Err(Error::InvalidInput(format!("terminal out of range (n={n}, s={s}, t={t})")));
        }
        if s == t {
            return Err(Error::InvalidInput("source equals sink".into()));
        }
        Ok(FlowNetwork { n, s, t, edges: Vec::new(), next_id: 0 })
    }

    pub fn add_edge(
        &mut self,
        tail: usize,
        head: usize,
        cap: CapacityValue,
    ) -> Result<usize> {
        if tail >= self.n || head >= self.n {
            return Err(Error::InvalidInput(format!(
                "edge ({tail},{head}) out of range for n={}",
                self.n
            )));
        }
        if tail == head {
            return Err(Error::InvalidInput(format!("self loop at vertex {tail}")));
        }
        if cap == CapacityValue::ZERO {
            return Err(Error::InvalidInput(format!("nonpositive capacity on edge ({tail},{head})")));
        }
        let id = self.next_id;
        self.next_id += 1;
        self.edges.push(Edge { id, tail, head, cap });
        Ok(id)
    }

    pub fn from_edges(
        n: usize,
        s: usize,
        t: usize,
        edges: &[(usize, usize, CapacityValue)],
    ) -> Result<FlowNetwork> {
        let mut g = FlowNetwork::new(n, s, t)?;
        for &(u, v, c) in edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }

    /// Build a network from fully specified edges, keeping their ids. Ids
    /// must be strictly increasing; this is how derived networks (quotients,
    /// reconstructions from stored records) stay comparable with the graph
    /// they came from.
    pub fn from_edge_list(n: usize, s: usize, t: usize, edges: &[Edge]) -> Result<FlowNetwork> {
        let mut g = FlowNetwork::new(n, s, t)?;
        for e in edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({},{}) out of range for n={n}",
                    e.tail, e.head
                )));
            }
            if e.tail == e.head {
                return Err(Error::InvalidInput(format!("self loop at vertex {}", e.tail)));
            }
            if e.cap == CapacityValue::ZERO {
                return Err(Error::InvalidInput(format!(
                    "nonpositive capacity on edge ({},{})",
                    e.tail, e.head
                )));
            }
            if !g.edges.is_empty() && g.edges.last().unwrap().id >= e.id {
                return Err(Error::InvalidInput("edge ids must be strictly increasing".into()));
            }
            g.edges.push(*e);
            g.next_id = e.id + 1;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.index_of(id).map(|i| &self.edges[i])
    }

    /// Position of an edge id within `edges()`; ids stay sorted but may be
    /// sparse after removals, hence the binary search.
    pub fn index_of(&self, id: usize) -> Result<usize> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(id))
    }

    /// Copy of the network with one edge removed. All other edge ids are
    /// preserved, so flow tables indexed by id remain comparable.
    pub fn without_edge(&self, id: usize) -> Result<FlowNetwork> {
        self.edge(id)?;
        let mut g = self.clone();
        g.edges.retain(|e| e.id != id);
        Ok(g)
    }

    /// Copy of the network with one edge's capacity replaced.
    pub fn with_edge_capacity(&self, id: usize, cap: CapacityValue) -> Result<FlowNetwork> {
        if cap == CapacityValue::ZERO {
            return self.without_edge(id);
        }
        let mut g = self.clone();
        let pos = g
            .edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(id))?;
        g.edges[pos].cap = cap;
        Ok(g)
    }

    /// Copy of the network with a fresh edge appended; returns the new id.
    pub fn with_inserted_edge(
        &self,
        tail: usize,
        head: usize,
        cap: CapacityValue,
    ) -> Result<(FlowNetwork, usize)> {
        let mut g = self.clone();
        let id = g.add_edge(tail, head, cap)?;
        Ok((g, id))
    }

    /// Sum of all finite capacities.
    pub fn finite_sum(&self) -> u64 {
        self.edges
            .iter()
            .filter_map(|e| e.cap.finite())
            .fold(0u64, |a, b| a.checked_add(b).expect("capacity sum overflow"))
    }

    /// A finite stand-in strictly larger than any possible finite flow value.
    pub fn big(&self) -> u64 {
        self.finite_sum() + 1
    }

    /// Build the cut determined by a source-side indicator vector.
    pub fn cut_from_side(&self, side: &[bool]) -> Result<STCut> {
        STCut::from_side(self, side)
    }
}

/// An (s,t)-cut, stored as its source-side indicator plus derived data.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct STCut {
    /// side[v] == true iff v lies on the source side.
    pub side: Vec<bool>,
    /// Sum of capacities of contributing edges.
    pub capacity: CapacityValue,
    /// Edges with tail inside and head outside, by id.
    pub contributing: Vec<usize>,
    /// Edges with head inside and tail outside, by id.
    pub incoming: Vec<usize>,
}

impl STCut {
    pub fn from_side(g: &FlowNetwork, side: &[bool]) -> Result<STCut> {
        if side.len() != g.n() {
            return Err(Error::InvalidInput(format!(
                "side vector length {} does not match n={}",
                side.len(),
                g.n()
            )));
        }
        if !side[g.s()] {
            return Err(Error::InvalidInput("source not on the source side".into()));
        }
        if side[g.t()] {
            return Err(Error::InvalidInput("sink on the source side".into()));
        }
        let mut capacity = CapacityValue::ZERO;
        let mut contributing = Vec::new();
        let mut incoming = Vec::new();
        for e in g.edges() {
            match (side[e.tail], side[e.head]) {
                (true, false) => {
                    capacity = capacity + e.cap;
                    contributing.push(e.id);
                }
                (false, true) => incoming.push(e.id),
                _ => {}
            }
        }
        Ok(STCut { side: side.to_vec(), capacity, contributing, incoming })
    }

    pub fn from_vertices(g: &FlowNetwork, vertices: &[usize]) -> Result<STCut> {
        let mut side = vec![false; g.n()];
        for &v in vertices {
            if v >= g.n() {
                return Err(Error::InvalidInput(format!("vertex {v} out of range")));
            }
            side[v] = true;
        }
        STCut::from_side(g, &side)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.side[v]
    }

    /// Source-side vertices in increasing order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v]).collect()
    }

    pub fn source_side_size(&self) -> usize {
        self.side.iter().filter(|&&b| b).count()
    }

    /// True iff exactly the given edge separates strictly cheaper:
    /// capacity minus that edge's weight stays below the reference value.
    pub fn is_relevant_for(&self, g: &FlowNetwork, edge: usize, fstar: u64) -> Result<bool> {
        let e = g.edge(edge)?;
        if !(self.side[e.tail] && !self.side[e.head]) {
            return Ok(false);
        }
        match (self.capacity, e.cap) {
            (CapacityValue::Finite(c), CapacityValue::Finite(w)) => Ok(c - w < fstar),
            // An infinite-capacity contributing edge: dropping it leaves the
            // finite remainder, which is what must stay below f*.
            (CapacityValue::Infinite, CapacityValue::Infinite) => {
                let rest: CapacityValue = self
                    .contributing
                    .iter()
                    .filter(|&&id| id != edge)
                    .map(|&id| g.edge(id).expect("contributing edge exists").cap)
                    .sum();
                match rest {
                    CapacityValue::Finite(r) => Ok(r < fstar),
                    CapacityValue::Infinite => Ok(false),
                }
            }
            (CapacityValue::Infinite, CapacityValue::Finite(_)) => Ok(false),
            (CapacityValue::Finite(_), CapacityValue::Infinite) => unreachable!(
                "an infinite edge cannot contribute to a finite-capacity cut"
            ),
        }
    }
}

/// Parse the extended DIMACS max-flow format.
///
/// Lines: `c ...` comments, one `p max <n> <m>`, `n <id> s`, `n <id> t`,
/// and `a <tail> <head> <cap>` with 1-based vertex ids and `<cap>` a
/// positive integer or the token `inf`.
pub fn parse_network(text: &str) -> Result<FlowNetwork> {
    let mut header: Option<(usize, usize)> = None;
    let mut src: Option<usize> = None;
    let mut snk: Option<usize> = None;
    let mut arcs: Vec<(usize, usize, CapacityValue)> = Vec::new();

    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "p" => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate problem line"));
                }
                if tok.len() != 4 || tok[1] != "max" {
                    return Err(err(line_no, "expected `p max <n> <m>`"));
                }
                let n: usize = tok[2].parse().map_err(|_| err(line_no, "bad vertex count"))?;
                let m: usize = tok[3].parse().map_err(|_| err(line_no, "bad edge count"))?;
                if n < 2 {
                    return Err(err(line_no, "need at least 2 vertices"));
                }
                header = Some((n, m));
            }
            "n" => {
                let (n, _) = header.ok_or_else(|| err(line_no, "node line before problem line"))?;
                if tok.len() != 3 {
                    return Err(err(line_no, "expected `n <id> s|t`"));
                }
                let id: usize = tok[1].parse().map_err(|_| err(line_no, "bad vertex id"))?;
                if id < 1 || id > n {
                    return Err(err(line_no, "vertex id out of range"));
                }
                match tok[2] {
                    "s" => {
                        if src.is_some() {
                            return Err(err(line_no, "duplicate source designation"));
                        }
                        src = Some(id - 1);
                    }
                    "t" => {
                        if snk.is_some() {
                            return Err(err(line_no, "duplicate sink designation"));
                        }
                        snk = Some(id - 1);
                    }
                    _ => return Err(err(line_no, "node designator must be s or t")),
                }
            }
            "a" => {
                let (n, _) = header.ok_or_else(|| err(line_no, "arc line before problem line"))?;
                if tok.len() != 4 {
                    return Err(err(line_no, "expected `a <tail> <head> <cap>`"));
                }
                let u: usize = tok[1].parse().map_err(|_| err(line_no, "bad tail id"))?;
                let v: usize = tok[2].parse().map_err(|_| err(line_no, "bad head id"))?;
                if u < 1 || u > n || v < 1 || v > n {
                    return Err(err(line_no, "arc endpoint out of range"));
                }
                if u == v {
                    return Err(err(line_no, "self loop"));
                }
                let cap = if tok[3] == "inf" {
                    CapacityValue::Infinite
                } else {
                    let c: u64 = tok[3].parse().map_err(|_| err(line_no, "bad capacity"))?;
                    if c == 0 {
                        return Err(err(line_no, "nonpositive capacity"));
                    }
                    CapacityValue::Finite(c)
                };
                arcs.push((u - 1, v - 1, cap));
            }
            _ => return Err(err(line_no, "unknown line type")),
        }
    }

    let (n, m) = header.ok_or_else(|| err(0, "missing problem line"))?;
    if arcs.len() != m {
        return Err(err(
            0,
            &format!("problem line promises {m} arcs, found {}", arcs.len()),
        ));
    }
    let s = src.ok_or_else(|| err(0, "missing source designation"))?;
    let t = snk.ok_or_else(|| err(0, "missing sink designation"))?;
    if s == t {
        return Err(err(0, "source equals sink"));
    }
    FlowNetwork::from_edges(n, s, t, &arcs)
}

/// Serialize in the same dialect `parse_network` reads. Edges are emitted
/// in id order with LF line endings.
pub fn serialize_network(g: &FlowNetwork) -> String {
    let mut out = String::new();
    out.push_str(&format!("p max {} {}\n", g.n(), g.m()));
    out.push_str(&format!("n {} s\n", g.s() + 1));
    out.push_str(&format!("n {} t\n", g.t() + 1));
    for e in g.edges() {
        out.push_str(&format!("a {} {} {}\n", e.tail + 1, e.head + 1, e.cap));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4() -> FlowNetwork {
        FlowNetwork::from_edges(
            4,
            0,
            3,
            &[
                (0, 1, CapacityValue::Finite(5)),
                (1, 2, CapacityValue::Finite(3)),
                (2, 3, CapacityValue::Finite(7)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parse_p4() {
        let text = "c tiny path\np max 4 3\nn 1 s\nn 4 t\na 1 2 5\na 2 3 3\na 3 4 7\n";
        let g = parse_network(text).unwrap();
        assert_eq!(g, p4());
    }

    #[test]
    fn parse_empty_edge_section() {
        let g = parse_network("p max 3 0\nn 1 s\nn 2 t\n").unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn parse_rejects_zero_capacity() {
        let r = parse_network("p max 2 1\nn 1 s\nn 2 t\na 1 2 0\n");
        match r {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("nonpositive"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_arc_count_mismatch() {
        let r = parse_network("p max 2 2\nn 1 s\nn 2 t\na 1 2 1\n");
        assert!(matches!(r, Err(Error::Parse { .. })));
    }

    #[test]
    fn roundtrip_preserves_network() {
        let g = p4();
        assert_eq!(parse_network(&serialize_network(&g)).unwrap(), g);
    }

    #[test]
    fn infinite_capacity_token() {
        let g = parse_network("p max 2 1\nn 1 s\nn 2 t\na 1 2 inf\n").unwrap();
        assert_eq!(g.edges()[0].cap, CapacityValue::Infinite);
        assert!(serialize_network(&g).contains("a 1 2 inf"));
    }

    #[test]
    fn cut_capacity_and_edge_sets() {
        let g = p4();
        let cut = STCut::from_vertices(&g, &[0, 1]).unwrap();
        assert_eq!(cut.capacity, CapacityValue::Finite(3));
        assert_eq!(cut.contributing, vec![1]);
        assert!(cut.incoming.is_empty());
    }

    #[test]
    fn cut_rejects_sink_on_source_side() {
        let g = p4();
        assert!(STCut::from_vertices(&g, &[0, 3]).is_err());
    }

    #[test]
    fn without_edge_keeps_ids() {
        let g = p4().without_edge(1).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges()[1].id, 2);
        assert!(g.edge(1).is_err());
        assert!(g.edge(2).is_ok());
    }

    #[test]
    fn capacity_ordering_and_sum() {
        assert!(CapacityValue::Finite(u64::MAX) < CapacityValue::Infinite);
        let s: CapacityValue =
            [CapacityValue::Finite(2), CapacityValue::Finite(3)].into_iter().sum();
        assert_eq!(s, CapacityValue::Finite(5));
        let s: CapacityValue =
            [CapacityValue::Finite(2), CapacityValue::Infinite].into_iter().sum();
        assert_eq!(s, CapacityValue::Infinite);
    }

    #[test]
    fn capacity_json_forms() {
        let f = serde_json::to_string(&CapacityValue::Finite(7)).unwrap();
        assert_eq!(f, "7");
        let i = serde_json::to_string(&CapacityValue::Infinite).unwrap();
        assert_eq!(i, "\"inf\"");
        assert_eq!(
            serde_json::from_str::<CapacityValue>("\"inf\"").unwrap(),
            CapacityValue::Infinite
        );
    }
}
