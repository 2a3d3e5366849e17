//! Detection and cancellation of circular-trading cycles in taxed sales
//! ledgers.
//!
//! A ledger of taxed sales becomes a directed multigraph of dealers; replaying
//! it chronologically, every transaction that closes a cycle triggers the
//! cancellation of minimum-flow-value cycles through that edge until the graph
//! is acyclic again. The output is a residual acyclic graph — the trades that
//! still carry net tax weight — plus an auditable record of every cancelled
//! cycle.
//!
//! Module tour:
//! - [`model`]: dealers, paise-exact money, timestamps, CSV ledgers.
//! - [`multigraph`]: the keyed multigraph with deterministic iteration.
//! - [`widest_path`]: maximum-bottleneck search over a max-heap.
//! - [`cycle_removal`]: candidate collection, selection, cancellation.
//! - [`wcd`]: the chronological driver and aggregation helpers.
//! - [`synth`]: seeded ledger generation and the benchmark harness.
//! - [`oracle`] (feature `oracle`, on by default): exhaustive reference
//!   implementations and the independent removal auditor.

pub mod cycle_removal;
pub mod model;
pub mod multigraph;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod synth;
pub mod wcd;
pub mod widest_path;

pub use cycle_removal::{
    cancel_cycle, collect_candidates, removals_to_jsonl, select_min_flow_cycle, CancelError,
    CandidateSet, CycleCandidate, RemovalEdge, RemovalRecord,
};
pub use model::{
    parse_ledger, serialize_ledger, tax_payable, DealerId, LedgerError, LedgerFormat, Money,
    ParseMode, ParsedLedger, RowDiagnostic, RowError, SignedMoney, Timestamp, Transaction,
};
pub use multigraph::{EdgeKey, EdgeRef, GraphError, MultiGraph};
pub use wcd::{aggregate_pairs, net_tax_position, run_wcd, WcdError, WcdResult, WcdStats};
pub use widest_path::{max_min, widest_search, BottleneckPath, ExtValue, SearchError, SearchState};
