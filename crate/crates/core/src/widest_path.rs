//! Widest-path search: for a source `v`, find for every vertex the path that
//! maximises the minimum edge value along it. Best-first over a max-heap;
//! between parallel edges only the highest-valued one can matter.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::model::{DealerId, Money};
use crate::multigraph::{EdgeRef, MultiGraph};

/// A bottleneck distance. The source sits at `PosInf` (no edge constrains an
/// empty path); unreached vertices sit at `NegInf`. Variant order gives the
/// right comparison semantics for free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtValue {
    NegInf,
    Finite(Money),
    PosInf,
}

impl ExtValue {
    pub fn finite(self) -> Option<Money> {
        match self {
            ExtValue::Finite(m) => Some(m),
            _ => None,
        }
    }
}

/// Everything a search run learned, kept for inspection and testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    /// Best bottleneck value per vertex.
    pub dist: BTreeMap<DealerId, ExtValue>,
    /// The edge that last improved each vertex; chains back to the source.
    pub parent: BTreeMap<DealerId, EdgeRef>,
    /// Vertices in settlement order with their final distances. The sequence
    /// of distances is non-increasing — that is the heart of why settling a
    /// vertex fixes its answer.
    pub pop_order: Vec<(DealerId, ExtValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown vertex {0}")]
    UnknownVertex(DealerId),
}

/// A concrete path with its two load-bearing statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckPath {
    /// Edges in travel order; consecutive edges share the middle vertex.
    pub edges: Vec<EdgeRef>,
    /// Minimum edge value on the path.
    pub bottleneck: Money,
    /// Maximum edge value on the path.
    pub max_edge_value: Money,
}

impl BottleneckPath {
    /// Builds a path from a non-empty contiguous edge sequence.
    pub fn from_edges(edges: Vec<EdgeRef>) -> Self {
        assert!(!edges.is_empty(), "a path needs at least one edge");
        debug_assert!(
            edges.windows(2).all(|w| w[0].buyer == w[1].seller),
            "path edges must be contiguous"
        );
        let bottleneck = edges.iter().map(|e| e.value).min().unwrap();
        let max_edge_value = edges.iter().map(|e| e.value).max().unwrap();
        BottleneckPath {
            edges,
            bottleneck,
            max_edge_value,
        }
    }

    pub fn source(&self) -> &DealerId {
        &self.edges.first().unwrap().seller
    }

    pub fn target(&self) -> &DealerId {
        &self.edges.last().unwrap().buyer
    }
}

// Max-heap entry: larger distance pops first; among equal distances the
// lexicographically smaller dealer pops first, for determinism.
#[derive(Debug, PartialEq, Eq)]
struct QueueEntry {
    dist: ExtValue,
    vertex: DealerId,
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .cmp(&other.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Runs the widest-path search from `source` over the whole graph.
///
/// The heap has no decrease-key, so every improvement pushes a fresh entry
/// and stale or already-settled entries are skipped on pop. Relaxation only
/// accepts strict improvements, so the first vertex to claim a distance keeps
/// its parent — ties cannot flip the routing.
pub fn widest_search(g: &MultiGraph, source: &DealerId) -> Result<SearchState, SearchError> {
    if !g.contains_vertex(source) {
        return Err(SearchError::UnknownVertex(source.clone()));
    }
    let mut dist: BTreeMap<DealerId, ExtValue> = g
        .vertices()
        .map(|v| (v.clone(), ExtValue::NegInf))
        .collect();
    dist.insert(source.clone(), ExtValue::PosInf);

    let mut heap: BinaryHeap<QueueEntry> = dist
        .iter()
        .map(|(v, &d)| QueueEntry {
            dist: d,
            vertex: v.clone(),
        })
        .collect();
    let mut parent: BTreeMap<DealerId, EdgeRef> = BTreeMap::new();
    let mut settled: BTreeSet<DealerId> = BTreeSet::new();
    let mut pop_order: Vec<(DealerId, ExtValue)> = Vec::new();

    while let Some(QueueEntry {
        dist: entry_dist,
        vertex,
    }) = heap.pop()
    {
        if settled.contains(&vertex) || entry_dist != dist[&vertex] {
            continue;
        }
        settled.insert(vertex.clone());
        pop_order.push((vertex.clone(), entry_dist));

        for neighbor in g.out_neighbors(&vertex) {
            if settled.contains(neighbor) {
                continue;
            }
            let widest_hop = g
                .max_parallel_edge(&vertex, neighbor)
                .expect("a listed neighbour has at least one edge");
            let candidate = entry_dist.min(ExtValue::Finite(widest_hop.value));
            if candidate > dist[neighbor] {
                dist.insert(neighbor.clone(), candidate);
                parent.insert(neighbor.clone(), widest_hop);
                heap.push(QueueEntry {
                    dist: candidate,
                    vertex: neighbor.clone(),
                });
            }
        }
    }

    Ok(SearchState {
        dist,
        parent,
        pop_order,
    })
}

/// Widest path from `v` to `u`, or `None` when `u` is unreachable. A vertex
/// is never considered to reach itself here: a cycle needs real edges, so
/// `u == v` is `None` by definition.
pub fn max_min(
    g: &MultiGraph,
    u: &DealerId,
    v: &DealerId,
) -> Result<Option<BottleneckPath>, SearchError> {
    if !g.contains_vertex(u) {
        return Err(SearchError::UnknownVertex(u.clone()));
    }
    let state = widest_search(g, v)?;
    if u == v {
        return Ok(None);
    }
    if state.dist[u] == ExtValue::NegInf {
        return Ok(None);
    }
    let mut edges = Vec::new();
    let mut cursor = u.clone();
    while &cursor != v {
        let hop = state
            .parent
            .get(&cursor)
            .expect("a finite distance has a parent chain to the source")
            .clone();
        cursor = hop.seller.clone();
        edges.push(hop);
    }
    edges.reverse();
    let path = BottleneckPath::from_edges(edges);
    debug_assert_eq!(ExtValue::Finite(path.bottleneck), state.dist[u]);
    Ok(Some(path))
}
