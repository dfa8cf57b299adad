//! Per-vertex labels answering capacity-decrease queries without the tree.
//!
//! The split tree is decomposed into heavy paths (each internal node's
//! heavier child continues the path; ties go left). A vertex label records,
//! for every heavy path met on the root-to-leaf walk, where the walk left
//! that path and the cut capacity stored at the exit node. Two labels then
//! locate their lowest common ancestor at the first position where the
//! records disagree, so a query needs the two endpoint labels, the edge
//! capacity, and the change only.

use serde::{Deserialize, Serialize};

use crate::cover::TvitTree;
use crate::error::{Error, Result};
use crate::graph::CapacityValue;

/// One heavy-path segment of a root-to-leaf walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    /// Heavy-path id, assigned in depth-first discovery order.
    pub path: u32,
    /// Position along the path at which the walk leaves it (path heads sit
    /// at position 0); for the final segment, the leaf's own position.
    pub exit_pos: u32,
    /// Cut capacity stored at the exit node; 0 for the final leaf segment,
    /// which no query ever reads.
    pub cap: u64,
}

/// Self-contained per-vertex label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub vertex: u32,
    /// Leaf node id in the split tree (equal leaves mean no stored cut
    /// separates the two vertices).
    pub leaf: u32,
    /// In-order position of the leaf.
    pub ord: u32,
    /// Unmodified maximum-flow value.
    pub fstar: u64,
    /// Root-to-leaf heavy-path segments, root's path first.
    pub entries: Vec<LabelEntry>,
}

/// Builds one label per vertex from the decrease-query tree.
pub fn build_labels(t: &TvitTree) -> Vec<VertexLabel> {
    let nodes = &t.core.nodes;
    let count = nodes.len();

    // Leaves under each node, then heavy-path ids and positions: the child
    // with more leaves continues its parent's path (ties go left), every
    // light child heads a fresh path.
    let mut leaves = vec![0usize; count];
    let mut order: Vec<usize> = Vec::with_capacity(count);
    let mut stack = vec![t.core.root];
    while let Some(x) = stack.pop() {
        order.push(x);
        if let (Some(l), Some(r)) = (nodes[x].left, nodes[x].right) {
            stack.push(l);
            stack.push(r);
        }
    }
    for &x in order.iter().rev() {
        leaves[x] = match (nodes[x].left, nodes[x].right) {
            (Some(l), Some(r)) => leaves[l] + leaves[r],
            _ => 1,
        };
    }

    let mut path_of = vec![0u32; count];
    let mut pos_of = vec![0u32; count];
    let mut next_path = 0u32;
    // Heavy child first keeps path ids contiguous along each path.
    let mut stack: Vec<(usize, Option<(u32, u32)>)> = vec![(t.core.root, None)];
    while let Some((x, slot)) = stack.pop() {
        let (path, pos) = match slot {
            Some(v) => v,
            None => {
                let p = next_path;
                next_path += 1;
                (p, 0)
            }
        };
        path_of[x] = path;
        pos_of[x] = pos;
        if let (Some(l), Some(r)) = (nodes[x].left, nodes[x].right) {
            let (heavy, light) = if leaves[l] >= leaves[r] { (l, r) } else { (r, l) };
            stack.push((light, None));
            stack.push((heavy, Some((path, pos + 1))));
        }
    }

    (0..t.n)
        .map(|v| {
            let leaf = t.core.leaf_of[v];
            // Walk leaf to root; the first node seen on each path is its
            // exit node.
            let mut entries: Vec<LabelEntry> = Vec::new();
            let mut at = Some(leaf);
            let mut last_path = u32::MAX;
            while let Some(x) = at {
                if path_of[x] != last_path {
                    entries.push(LabelEntry {
                        path: path_of[x],
                        exit_pos: pos_of[x],
                        cap: nodes[x].cap.unwrap_or(0),
                    });
                    last_path = path_of[x];
                }
                at = nodes[x].parent;
            }
            entries.reverse();
            VertexLabel {
                vertex: v as u32,
                leaf: leaf as u32,
                ord: t.core.ord_of(v) as u32,
                fstar: t.fstar,
                entries,
            }
        })
        .collect()
}

/// Maximum-flow value after adding `delta <= 0` to the capacity of the edge
/// between the two labeled vertices (tail label first), computed from the
/// labels alone.
pub fn query_cap_labels(
    lx: &VertexLabel,
    ly: &VertexLabel,
    w: CapacityValue,
    delta: i64,
) -> Result<u64> {
    if delta > 0 {
        return Err(Error::InvalidInput(
            "capacity increases are answered by the insertion oracle".into(),
        ));
    }
    if let CapacityValue::Finite(w) = w {
        if delta < -(w.min(i64::MAX as u64) as i64) {
            return Err(Error::InvalidInput(format!(
                "capacity change {delta} drops the edge below zero"
            )));
        }
    }
    if lx.fstar != ly.fstar {
        return Err(Error::InvalidInput(
            "labels come from different structures".into(),
        ));
    }
    let fstar = lx.fstar;
    if lx.leaf == ly.leaf || lx.ord > ly.ord {
        return Ok(fstar);
    }
    // First disagreeing segment: the shallower exit is the lowest common
    // ancestor, and its stored capacity answers the query.
    let mut cap = None;
    for (a, b) in lx.entries.iter().zip(ly.entries.iter()) {
        if a == b {
            continue;
        }
        debug_assert_eq!(a.path, b.path, "walks diverge on a shared path");
        cap = Some(if a.exit_pos < b.exit_pos { a.cap } else { b.cap });
        break;
    }
    let cap = cap.ok_or_else(|| {
        Error::InvariantViolation("distinct leaves share the whole root walk".into())
    })?;
    let val = cap as i128 + delta as i128;
    debug_assert!(val >= 0);
    Ok(fstar.min(val as u64))
}

/// Field widths (in bits) sufficient to encode every label of a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelWidths {
    pub path_bits: u32,
    pub pos_bits: u32,
    pub cap_bits: u32,
    pub leaf_bits: u32,
    pub ord_bits: u32,
    pub value_bits: u32,
}

fn bits_for(max: u64) -> u32 {
    (64 - max.max(1).leading_zeros()).max(1)
}

/// Tight common field widths over a label set.
pub fn label_widths(labels: &[VertexLabel]) -> LabelWidths {
    let mut max_path = 0u64;
    let mut max_pos = 0u64;
    let mut max_cap = 0u64;
    let mut max_leaf = 0u64;
    let mut max_ord = 0u64;
    let mut max_val = 0u64;
    for l in labels {
        max_leaf = max_leaf.max(l.leaf as u64);
        max_ord = max_ord.max(l.ord as u64);
        max_val = max_val.max(l.fstar);
        for e in &l.entries {
            max_path = max_path.max(e.path as u64);
            max_pos = max_pos.max(e.exit_pos as u64);
            max_cap = max_cap.max(e.cap);
        }
    }
    LabelWidths {
        path_bits: bits_for(max_path),
        pos_bits: bits_for(max_pos),
        cap_bits: bits_for(max_cap),
        leaf_bits: bits_for(max_leaf),
        ord_bits: bits_for(max_ord),
        value_bits: bits_for(max_val),
    }
}

impl VertexLabel {
    /// Encoded size of this label under the given field widths, counting an
    /// entry-count field wide enough for the entry list.
    pub fn bit_size(&self, w: &LabelWidths) -> u64 {
        let per_entry = (w.path_bits + w.pos_bits + w.cap_bits) as u64;
        let fixed = (w.leaf_bits + w.ord_bits + w.value_bits) as u64;
        let count_field = bits_for(self.entries.len() as u64) as u64;
        fixed + count_field + per_entry * self.entries.len() as u64
    }
}
