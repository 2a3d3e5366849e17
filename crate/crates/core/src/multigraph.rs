//! Directed multigraph of dealers: one edge per transaction, keyed by
//! `(seller, buyer, time)`, carrying the (mutable) residual tax value.
//! Iteration order is deterministic everywhere (sorted maps throughout).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DealerId, Money, Timestamp, Transaction};

/// Identity of a single transaction edge. Two ledger rows never share one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub seller: DealerId,
    pub buyer: DealerId,
    pub time: Timestamp,
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}@{}", self.seller, self.buyer, self.time)
    }
}

/// A snapshot of one edge: its identity plus the value it carried when read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRef {
    pub seller: DealerId,
    pub buyer: DealerId,
    pub time: Timestamp,
    pub value: Money,
}

impl EdgeRef {
    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            seller: self.seller.clone(),
            buyer: self.buyer.clone(),
            time: self.time,
        }
    }
}

/// Why a graph mutation was refused.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at dealer {dealer}")]
    SelfLoop { dealer: DealerId },
    #[error("duplicate edge {key}")]
    DuplicateEdge { key: EdgeKey },
    #[error("no such edge {key}")]
    MissingEdge { key: EdgeKey },
    #[error("zero-valued edge {key}")]
    ZeroValue { key: EdgeKey },
}

/// Weighted directed multigraph over dealers.
///
/// Vertices persist once added, even after all their edges are deleted, so a
/// residual graph still names every dealer that ever traded. `Clone` is a
/// deep copy: mutating a clone never touches the original.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeSet<DealerId>,
    // out[seller][buyer][time] = residual value. Inner maps are pruned when
    // emptied so neighbour iteration never yields phantom pairs.
    out: BTreeMap<DealerId, BTreeMap<DealerId, BTreeMap<Timestamp, Money>>>,
    edge_count: usize,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph holding every transaction of a ledger at face value.
    pub fn from_transactions(transactions: &[Transaction]) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new();
        for tx in transactions {
            g.add_edge(tx)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, dealer: DealerId) {
        self.vertices.insert(dealer);
    }

    pub fn contains_vertex(&self, dealer: &DealerId) -> bool {
        self.vertices.contains(dealer)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &DealerId> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Inserts a transaction as an edge at its face value.
    pub fn add_edge(&mut self, tx: &Transaction) -> Result<EdgeKey, GraphError> {
        self.insert_edge(tx.seller.clone(), tx.buyer.clone(), tx.time, tx.value)
    }

    /// Inserts one edge. Refuses self-loops, zero values, and key reuse.
    pub fn insert_edge(
        &mut self,
        seller: DealerId,
        buyer: DealerId,
        time: Timestamp,
        value: Money,
    ) -> Result<EdgeKey, GraphError> {
        let key = EdgeKey {
            seller,
            buyer,
            time,
        };
        if key.seller == key.buyer {
            return Err(GraphError::SelfLoop { dealer: key.seller });
        }
        if value.is_zero() {
            return Err(GraphError::ZeroValue { key });
        }
        let slot = self
            .out
            .entry(key.seller.clone())
            .or_default()
            .entry(key.buyer.clone())
            .or_default();
        if slot.contains_key(&key.time) {
            return Err(GraphError::DuplicateEdge { key });
        }
        slot.insert(key.time, value);
        self.vertices.insert(key.seller.clone());
        self.vertices.insert(key.buyer.clone());
        self.edge_count += 1;
        Ok(key)
    }

    /// Removes one edge, returning the value it carried. Endpoint vertices
    /// stay in the graph.
    pub fn delete_edge(&mut self, key: &EdgeKey) -> Result<Money, GraphError> {
        let missing = || GraphError::MissingEdge { key: key.clone() };
        let per_buyer = self.out.get_mut(&key.seller).ok_or_else(missing)?;
        let per_time = per_buyer.get_mut(&key.buyer).ok_or_else(missing)?;
        let value = per_time.remove(&key.time).ok_or_else(missing)?;
        if per_time.is_empty() {
            per_buyer.remove(&key.buyer);
        }
        if per_buyer.is_empty() {
            self.out.remove(&key.seller);
        }
        self.edge_count -= 1;
        Ok(value)
    }

    pub fn edge_value(&self, key: &EdgeKey) -> Option<Money> {
        self.out
            .get(&key.seller)?
            .get(&key.buyer)?
            .get(&key.time)
            .copied()
    }

    pub fn get_edge(&self, key: &EdgeKey) -> Option<EdgeRef> {
        self.edge_value(key).map(|value| EdgeRef {
            seller: key.seller.clone(),
            buyer: key.buyer.clone(),
            time: key.time,
            value,
        })
    }

    /// Overwrites an edge's residual value (cancellation bookkeeping).
    /// A value of zero is not storable — delete the edge instead.
    pub(crate) fn set_edge_value(&mut self, key: &EdgeKey, value: Money) -> Result<(), GraphError> {
        if value.is_zero() {
            return Err(GraphError::ZeroValue { key: key.clone() });
        }
        let slot = self
            .out
            .get_mut(&key.seller)
            .and_then(|m| m.get_mut(&key.buyer))
            .and_then(|m| m.get_mut(&key.time))
            .ok_or(GraphError::MissingEdge { key: key.clone() })?;
        *slot = value;
        Ok(())
    }

    /// Distinct buyers this seller currently has an edge to, in sorted order.
    pub fn out_neighbors<'a>(&'a self, seller: &DealerId) -> impl Iterator<Item = &'a DealerId> {
        self.out
            .get(seller)
            .into_iter()
            .flat_map(|per_buyer| per_buyer.keys())
    }

    /// Every parallel edge from `seller` to `buyer`, oldest first.
    pub fn parallel_edges<'a>(
        &'a self,
        seller: &'a DealerId,
        buyer: &'a DealerId,
    ) -> impl Iterator<Item = EdgeRef> + 'a {
        self.out
            .get(seller)
            .and_then(|per_buyer| per_buyer.get(buyer))
            .into_iter()
            .flat_map(move |per_time| {
                per_time.iter().map(move |(time, value)| EdgeRef {
                    seller: seller.clone(),
                    buyer: buyer.clone(),
                    time: *time,
                    value: *value,
                })
            })
    }

    /// The highest-valued edge from `seller` to `buyer`; value ties go to the
    /// earliest edge, so the choice is deterministic.
    pub fn max_parallel_edge(&self, seller: &DealerId, buyer: &DealerId) -> Option<EdgeRef> {
        let per_time = self.out.get(seller)?.get(buyer)?;
        let mut best: Option<(Timestamp, Money)> = None;
        for (&time, &value) in per_time {
            // Strict comparison keeps the earliest edge on equal values.
            if best.is_none_or(|(_, best_value)| value > best_value) {
                best = Some((time, value));
            }
        }
        best.map(|(time, value)| EdgeRef {
            seller: seller.clone(),
            buyer: buyer.clone(),
            time,
            value,
        })
    }

    /// All edges in `(seller, buyer, time)` order.
    pub fn iter_edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.out.iter().flat_map(|(seller, per_buyer)| {
            per_buyer.iter().flat_map(move |(buyer, per_time)| {
                per_time.iter().map(move |(time, value)| EdgeRef {
                    seller: seller.clone(),
                    buyer: buyer.clone(),
                    time: *time,
                    value: *value,
                })
            })
        })
    }

    /// Whether any directed cycle exists. Parallel edges alone do not form
    /// one; the test walks distinct-neighbour adjacency with DFS colouring.
    pub fn has_cycle(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let mut color: BTreeMap<&DealerId, Color> =
            self.vertices.iter().map(|v| (v, Color::White)).collect();

        for start in &self.vertices {
            if color[start] != Color::White {
                continue;
            }
            color.insert(start, Color::Grey);
            let mut stack: Vec<(&DealerId, Vec<&DealerId>, usize)> =
                vec![(start, self.neighbor_refs(start), 0)];
            while let Some(top) = stack.last_mut() {
                let (vertex, neighbors, cursor) = top;
                if *cursor < neighbors.len() {
                    let next = neighbors[*cursor];
                    *cursor += 1;
                    match color[next] {
                        Color::Grey => return true,
                        Color::Black => {}
                        Color::White => {
                            color.insert(next, Color::Grey);
                            stack.push((next, self.neighbor_refs(next), 0));
                        }
                    }
                } else {
                    color.insert(vertex, Color::Black);
                    stack.pop();
                }
            }
        }
        false
    }

    fn neighbor_refs<'a>(&'a self, vertex: &DealerId) -> Vec<&'a DealerId> {
        self.out
            .get(vertex)
            .map(|per_buyer| per_buyer.keys().collect())
            .unwrap_or_default()
    }

    /// Whether a directed path leads from `from` to `to` (trivially true when
    /// they are the same vertex). BFS over distinct-neighbour adjacency.
    pub fn reaches(&self, from: &DealerId, to: &DealerId) -> bool {
        if !self.vertices.contains(from) || !self.vertices.contains(to) {
            return false;
        }
        if from == to {
            return true;
        }
        let mut seen: BTreeSet<&DealerId> = BTreeSet::new();
        seen.insert(from);
        let mut queue: VecDeque<&DealerId> = VecDeque::new();
        queue.push_back(from);
        while let Some(vertex) = queue.pop_front() {
            for next in self.out_neighbors(vertex) {
                if next == to {
                    return true;
                }
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        false
    }

    /// Graphviz rendering: every edge labelled `₹<rupees>@<iso-time>`, and a
    /// bare node line for each dealer left with no edges at all.
    pub fn to_dot(&self, name: &str) -> String {
        let mut used: BTreeSet<&DealerId> = BTreeSet::new();
        for (seller, per_buyer) in &self.out {
            used.insert(seller);
            used.extend(per_buyer.keys());
        }
        let mut dot = format!("digraph {name} {{\n");
        dot.push_str("  rankdir=LR;\n");
        for vertex in &self.vertices {
            if !used.contains(vertex) {
                let _ = writeln!(dot, "  \"{vertex}\";");
            }
        }
        for edge in self.iter_edges() {
            let _ = writeln!(
                dot,
                "  \"{}\" -> \"{}\" [label=\"{}@{}\"];",
                edge.seller, edge.buyer, edge.value, edge.time
            );
        }
        dot.push_str("}\n");
        dot
    }
}
