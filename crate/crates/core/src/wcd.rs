//! Chronological replay: insert each transaction in time order and, the
//! moment an insertion closes a cycle, cancel minimum-flow cycles through
//! that edge until the graph is acyclic again. The result is a residual
//! acyclic graph plus an auditable trail of every cancellation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycle_removal::{
    cancel_cycle, collect_candidates, select_min_flow_cycle, CancelError, RemovalRecord,
};
use crate::model::{DealerId, Money, SignedMoney, Transaction};
use crate::multigraph::{GraphError, MultiGraph};

/// Headline numbers for one replay run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WcdStats {
    pub dealers: u64,
    pub edges_in: u64,
    pub edges_surviving: u64,
    pub cycles_cancelled: u64,
    /// Total paise drained from the graph across all cancellations
    /// (sum over cycles of cycle length × subtracted value).
    pub paise_cancelled: Money,
}

/// Everything a replay produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcdResult {
    pub residual: MultiGraph,
    pub removals: Vec<RemovalRecord>,
    pub stats: WcdStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WcdError {
    #[error("ledger is not sorted by time at position {position}")]
    UnsortedLedger { position: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cancel(#[from] CancelError),
}

/// Replays a time-sorted ledger and cancels every cycle as it forms.
///
/// The graph is acyclic before each insertion, so any cycle the insertion
/// creates runs through the new edge; cancellation repeats while the new
/// edge survives and its buyer still reaches its seller. Each cancellation
/// zeroes at least the cycle's critical edge, so the burst terminates.
pub fn run_wcd(ledger: &[Transaction]) -> Result<WcdResult, WcdError> {
    for (position, pair) in ledger.windows(2).enumerate() {
        if pair[0].time > pair[1].time {
            return Err(WcdError::UnsortedLedger {
                position: position + 1,
            });
        }
    }

    let mut g = MultiGraph::new();
    let mut removals: Vec<RemovalRecord> = Vec::new();

    for tx in ledger {
        let key = g.add_edge(tx)?;
        // The loop ends early once the inserted edge itself is consumed by a
        // cancellation; nothing can still cycle through it after that.
        while let Some(closing) = g.get_edge(&key) {
            let closes_cycle = g.reaches(&key.buyer, &key.seller);
            debug_assert_eq!(
                closes_cycle,
                g.has_cycle(),
                "with an acyclic prefix, a cycle exists iff one runs through {key}"
            );
            if !closes_cycle {
                break;
            }
            let set = collect_candidates(&g, &closing)?;
            let cycle = select_min_flow_cycle(&set, &closing)?;
            let iteration = removals.len() as u64 + 1;
            removals.push(cancel_cycle(&mut g, &cycle, iteration)?);
        }
        debug_assert!(!g.has_cycle(), "every insertion must leave the graph acyclic");
    }

    let paise_cancelled = removals
        .iter()
        .flat_map(|record| record.edges.iter())
        .map(|edge| edge.pre_paise.paise() - edge.post_paise.paise())
        .sum();
    let stats = WcdStats {
        dealers: g.vertex_count() as u64,
        edges_in: ledger.len() as u64,
        edges_surviving: g.edge_count() as u64,
        cycles_cancelled: removals.len() as u64,
        paise_cancelled: Money::from_paise(paise_cancelled),
    };
    Ok(WcdResult {
        residual: g,
        removals,
        stats,
    })
}

/// Collapses parallel edges: total residual value per (seller, buyer) pair.
pub fn aggregate_pairs(g: &MultiGraph) -> BTreeMap<(DealerId, DealerId), Money> {
    let mut totals: BTreeMap<(DealerId, DealerId), Money> = BTreeMap::new();
    for edge in g.iter_edges() {
        let slot = totals
            .entry((edge.seller, edge.buyer))
            .or_insert(Money::ZERO);
        *slot = slot
            .checked_add(edge.value)
            .expect("pair aggregate overflows u64 paise");
    }
    totals
}

/// Net tax position per dealer over a graph's edges: tax collected on sales
/// minus tax paid on purchases. Every vertex gets an entry, isolated ones at
/// zero; negative means the dealer would claim a refund.
pub fn net_tax_position(g: &MultiGraph) -> BTreeMap<DealerId, SignedMoney> {
    let mut positions: BTreeMap<DealerId, SignedMoney> = g
        .vertices()
        .map(|v| (v.clone(), SignedMoney::ZERO))
        .collect();
    for edge in g.iter_edges() {
        let value = SignedMoney::from_paise(
            i64::try_from(edge.value.paise()).expect("edge value exceeds i64 paise"),
        );
        let seller_slot = positions.get_mut(&edge.seller).expect("seller is a vertex");
        *seller_slot = seller_slot
            .checked_add(value)
            .expect("net position overflows i64 paise");
        let buyer_slot = positions.get_mut(&edge.buyer).expect("buyer is a vertex");
        *buyer_slot = buyer_slot
            .checked_sub(value)
            .expect("net position overflows i64 paise");
    }
    positions
}
