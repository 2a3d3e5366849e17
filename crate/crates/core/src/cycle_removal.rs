//! Given a freshly inserted edge `e = (u, v)` that closed at least one cycle,
//! pick the cycle through `e` with the smallest flow value (max minus min
//! edge value) and cancel it by subtracting its minimum value everywhere.
//!
//! Candidate paths are collected on a scratch clone: repeatedly take the
//! widest `v -> u` path, then delete every edge at or above that path's
//! maximum — except `e` itself, which must stay eligible to close each
//! candidate. Each sweep strictly lowers the next path's maximum, so the
//! loop ends, and the best candidate can then be cancelled on the real graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DealerId, Money, Timestamp};
use crate::multigraph::{EdgeKey, EdgeRef, MultiGraph};
use crate::widest_path::{max_min, BottleneckPath};

/// The `v -> u` paths gathered for one inserted edge, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub paths: Vec<BottleneckPath>,
}

/// One closed cycle under consideration: a candidate path plus the closing
/// edge, with the statistics the selection rule needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCandidate {
    /// Path edges in travel order, the closing edge last.
    pub edges: Vec<EdgeRef>,
    /// Flow value: highest minus lowest edge value on the cycle.
    pub phi: Money,
    /// Lowest edge value on the cycle — the amount a cancellation subtracts.
    pub critical_value: Money,
    /// Highest edge value on the cycle.
    pub max_value: Money,
}

impl CycleCandidate {
    /// Closes a `v -> u` path with the inserted `u -> v` edge.
    pub fn close(path: &BottleneckPath, closing: &EdgeRef) -> Self {
        debug_assert_eq!(path.target(), &closing.seller, "path must end at u");
        debug_assert_eq!(path.source(), &closing.buyer, "path must start at v");
        let mut edges = path.edges.clone();
        edges.push(closing.clone());
        let max_value = path.max_edge_value.max(closing.value);
        let critical_value = path.bottleneck.min(closing.value);
        let phi = Money::from_paise(max_value.paise() - critical_value.paise());
        CycleCandidate {
            edges,
            phi,
            critical_value,
            max_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CancelError {
    #[error("no cycle passes through edge {key}")]
    NoCycleThroughEdge { key: EdgeKey },
    #[error("no candidate cycles to select from")]
    EmptyCandidateSet,
    #[error("inconsistent cycle state at edge {key}: {reason}")]
    InconsistentState { key: EdgeKey, reason: String },
}

/// Collects the candidate `v -> u` paths for the inserted edge `e = (u, v)`.
///
/// Precondition: every cycle in `g` passes through `e` (the chronological
/// driver guarantees this). Returns `NoCycleThroughEdge` when `e` is absent,
/// when no `v -> u` path exists, or when a leftover cycle avoiding `e` is
/// detected — the last being a best-effort precondition check.
pub fn collect_candidates(g: &MultiGraph, e: &EdgeRef) -> Result<CandidateSet, CancelError> {
    let closing_key = e.key();
    if g.edge_value(&closing_key).is_none() {
        return Err(CancelError::NoCycleThroughEdge { key: closing_key });
    }
    let (u, v) = (&e.seller, &e.buyer);

    let mut scratch = g.clone();
    let mut paths: Vec<BottleneckPath> = Vec::new();
    while scratch.reaches(v, u) {
        let path = max_min(&scratch, u, v)
            .expect("both endpoints exist in the scratch graph")
            .expect("reachability implies a widest path");
        debug_assert!(
            paths
                .last()
                .is_none_or(|prev| path.max_edge_value < prev.max_edge_value),
            "candidate path maxima must strictly decrease"
        );
        // Everything at or above this path's maximum is now unusable for a
        // *better* candidate; sweep it so the next round finds the runner-up.
        let threshold = path.max_edge_value;
        let doomed: Vec<EdgeKey> = scratch
            .iter_edges()
            .filter(|edge| edge.value >= threshold)
            .map(|edge| edge.key())
            .filter(|key| *key != closing_key)
            .collect();
        for key in &doomed {
            scratch
                .delete_edge(key)
                .expect("sweep keys come straight from iteration");
        }
        paths.push(path);
    }

    if paths.is_empty() || scratch.has_cycle() {
        // Either v never reached u at all, or some cycle avoiding e survived
        // every sweep; both mean the caller's precondition does not hold.
        return Err(CancelError::NoCycleThroughEdge { key: closing_key });
    }
    Ok(CandidateSet { paths })
}

/// Picks the candidate cycle with the smallest flow value φ. Ties go to the
/// smaller cycle maximum, then to earlier discovery, so selection is total
/// and deterministic.
pub fn select_min_flow_cycle(
    set: &CandidateSet,
    closing: &EdgeRef,
) -> Result<CycleCandidate, CancelError> {
    if set.paths.is_empty() {
        return Err(CancelError::EmptyCandidateSet);
    }
    let mut best: Option<CycleCandidate> = None;
    for path in &set.paths {
        let candidate = CycleCandidate::close(path, closing);
        let wins = match &best {
            None => true,
            Some(current) => (candidate.phi, candidate.max_value) < (current.phi, current.max_value),
        };
        if wins {
            best = Some(candidate);
        }
    }
    Ok(best.expect("non-empty set produced a candidate"))
}

/// One edge's before/after values within a cancelled cycle. A `post_paise`
/// of zero means the edge was deleted outright.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalEdge {
    pub seller: DealerId,
    pub buyer: DealerId,
    pub time: Timestamp,
    pub pre_paise: Money,
    pub post_paise: Money,
}

impl RemovalEdge {
    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            seller: self.seller.clone(),
            buyer: self.buyer.clone(),
            time: self.time,
        }
    }
}

/// The auditable record of one cancelled cycle: which insertion triggered it,
/// how much was subtracted, and every touched edge with its before/after
/// values. Serialized as one JSON object per line in `removals.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalRecord {
    /// 1-based position in the run's cancellation sequence.
    pub iteration: u64,
    /// The inserted edge whose arrival closed this cycle.
    pub trigger: EdgeKey,
    /// The cycle's minimum edge value, subtracted from every cycle edge.
    pub subtracted_paise: Money,
    /// Cycle edges in travel order, the trigger edge last.
    pub edges: Vec<RemovalEdge>,
}

impl RemovalRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("removal records always serialize")
    }

    pub fn from_json(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Renders records as JSON Lines (one record per line, trailing newline).
pub fn removals_to_jsonl(records: &[RemovalRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&record.to_json());
        out.push('\n');
    }
    out
}

/// Cancels one cycle on the live graph: subtracts the candidate's critical
/// value from every cycle edge, deleting edges that reach zero.
///
/// The graph is validated against the candidate snapshot before any edge is
/// touched, so on `InconsistentState` the graph is left exactly as it was.
pub fn cancel_cycle(
    g: &mut MultiGraph,
    candidate: &CycleCandidate,
    iteration: u64,
) -> Result<RemovalRecord, CancelError> {
    if candidate.edges.is_empty() {
        return Err(CancelError::EmptyCandidateSet);
    }
    let subtract = candidate.critical_value;
    for edge in &candidate.edges {
        let key = edge.key();
        match g.edge_value(&key) {
            None => {
                return Err(CancelError::InconsistentState {
                    key,
                    reason: "cycle edge is missing from the graph".to_string(),
                })
            }
            Some(current) if current != edge.value => {
                return Err(CancelError::InconsistentState {
                    key,
                    reason: format!(
                        "edge value {current} differs from the candidate snapshot {}",
                        edge.value
                    ),
                })
            }
            Some(current) if current < subtract => {
                return Err(CancelError::InconsistentState {
                    key,
                    reason: format!("edge value {current} is below the subtrahend {subtract}"),
                })
            }
            Some(_) => {}
        }
    }

    let mut edges = Vec::with_capacity(candidate.edges.len());
    for edge in &candidate.edges {
        let key = edge.key();
        let pre = edge.value;
        let post = pre
            .checked_sub(subtract)
            .expect("validated above: pre >= subtrahend");
        if post.is_zero() {
            g.delete_edge(&key).expect("validated above: edge exists");
        } else {
            g.set_edge_value(&key, post)
                .expect("validated above: edge exists and value is non-zero");
        }
        edges.push(RemovalEdge {
            seller: key.seller,
            buyer: key.buyer,
            time: key.time,
            pre_paise: pre,
            post_paise: post,
        });
    }

    Ok(RemovalRecord {
        iteration,
        trigger: candidate
            .edges
            .last()
            .expect("checked non-empty above")
            .key(),
        subtracted_paise: subtract,
        edges,
    })
}
