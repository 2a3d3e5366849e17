//! Exhaustive reference implementations for small instances: simple-path and
//! cycle enumeration, a brute-force widest path, and an independent audit of
//! a replay's removal trail. Everything here runs in exponential time by
//! design and refuses instances beyond a small budget.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::cycle_removal::{CycleCandidate, RemovalRecord};
use crate::model::{DealerId, Money, Transaction};
use crate::multigraph::{EdgeRef, MultiGraph};
use crate::wcd::WcdResult;
use crate::widest_path::BottleneckPath;

/// Upper bounds under which exhaustive enumeration stays affordable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallInstanceBudget {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_value: Money,
}

impl Default for SmallInstanceBudget {
    fn default() -> Self {
        SmallInstanceBudget {
            max_vertices: 8,
            max_edges: 14,
            max_value: Money::from_rupees(20),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance exceeds the small-instance budget: {reason}")]
    BudgetExceeded { reason: String },
}

impl SmallInstanceBudget {
    pub fn admits_graph(&self, g: &MultiGraph) -> bool {
        self.check_graph(g).is_ok()
    }

    pub fn check_graph(&self, g: &MultiGraph) -> Result<(), OracleError> {
        if g.vertex_count() > self.max_vertices {
            return Err(OracleError::BudgetExceeded {
                reason: format!(
                    "{} vertices > {} allowed",
                    g.vertex_count(),
                    self.max_vertices
                ),
            });
        }
        if g.edge_count() > self.max_edges {
            return Err(OracleError::BudgetExceeded {
                reason: format!("{} edges > {} allowed", g.edge_count(), self.max_edges),
            });
        }
        if let Some(edge) = g.iter_edges().find(|e| e.value > self.max_value) {
            return Err(OracleError::BudgetExceeded {
                reason: format!("edge value {} > {} allowed", edge.value, self.max_value),
            });
        }
        Ok(())
    }

    pub fn admits_ledger(&self, ledger: &[Transaction]) -> bool {
        self.check_ledger(ledger).is_ok()
    }

    pub fn check_ledger(&self, ledger: &[Transaction]) -> Result<(), OracleError> {
        if ledger.len() > self.max_edges {
            return Err(OracleError::BudgetExceeded {
                reason: format!("{} rows > {} allowed", ledger.len(), self.max_edges),
            });
        }
        let mut dealers: BTreeSet<&DealerId> = BTreeSet::new();
        for tx in ledger {
            dealers.insert(&tx.seller);
            dealers.insert(&tx.buyer);
            if tx.value > self.max_value {
                return Err(OracleError::BudgetExceeded {
                    reason: format!("row value {} > {} allowed", tx.value, self.max_value),
                });
            }
        }
        if dealers.len() > self.max_vertices {
            return Err(OracleError::BudgetExceeded {
                reason: format!(
                    "{} dealers > {} allowed",
                    dealers.len(),
                    self.max_vertices
                ),
            });
        }
        Ok(())
    }
}

// Depth-first enumeration of every vertex-simple path from `from` to `to`,
// branching over parallel edges individually. Callback gets each complete
// path; `from == to` yields nothing (paths here always have >= 1 edge).
fn for_each_simple_path<F: FnMut(&[EdgeRef])>(
    g: &MultiGraph,
    from: &DealerId,
    to: &DealerId,
    mut f: F,
) {
    if from == to || !g.contains_vertex(from) || !g.contains_vertex(to) {
        return;
    }
    let mut visited: BTreeSet<DealerId> = BTreeSet::new();
    visited.insert(from.clone());
    let mut path: Vec<EdgeRef> = Vec::new();
    dfs_paths(g, from, to, &mut visited, &mut path, &mut f);
}

fn dfs_paths<F: FnMut(&[EdgeRef])>(
    g: &MultiGraph,
    current: &DealerId,
    target: &DealerId,
    visited: &mut BTreeSet<DealerId>,
    path: &mut Vec<EdgeRef>,
    f: &mut F,
) {
    let neighbors: Vec<DealerId> = g.out_neighbors(current).cloned().collect();
    for neighbor in neighbors {
        for edge in g.parallel_edges(current, &neighbor).collect::<Vec<_>>() {
            if neighbor == *target {
                path.push(edge);
                f(path);
                path.pop();
            } else if !visited.contains(&neighbor) {
                visited.insert(neighbor.clone());
                path.push(edge);
                dfs_paths(g, &neighbor, target, visited, path, f);
                path.pop();
                visited.remove(&neighbor);
            }
        }
    }
}

/// Every simple cycle that the edge `e = (u, v)` would close, as candidates:
/// each simple `v -> u` path (over all parallel-edge choices) plus `e`.
/// `e` itself need not be present in `g`.
pub fn enumerate_cycles_through(
    g: &MultiGraph,
    e: &EdgeRef,
    budget: &SmallInstanceBudget,
) -> Result<Vec<CycleCandidate>, OracleError> {
    budget.check_graph(g)?;
    let mut cycles = Vec::new();
    for_each_simple_path(g, &e.buyer, &e.seller, |path| {
        cycles.push(CycleCandidate::close(
            &BottleneckPath::from_edges(path.to_vec()),
            e,
        ));
    });
    Ok(cycles)
}

/// Brute-force widest path from `from` to `to`: enumerate every simple path
/// and keep the best bottleneck. Ties prefer fewer edges, then the
/// lexicographically smallest edge-key sequence — deliberately *not* the
/// tie-breaks of the search engine, so agreement on values is meaningful.
pub fn brute_widest_path(
    g: &MultiGraph,
    from: &DealerId,
    to: &DealerId,
    budget: &SmallInstanceBudget,
) -> Result<Option<BottleneckPath>, OracleError> {
    budget.check_graph(g)?;
    let mut best: Option<BottleneckPath> = None;
    for_each_simple_path(g, from, to, |path| {
        let candidate = BottleneckPath::from_edges(path.to_vec());
        let wins = match &best {
            None => true,
            Some(current) => {
                let cand_keys: Vec<_> = candidate.edges.iter().map(EdgeRef::key).collect();
                let best_keys: Vec<_> = current.edges.iter().map(EdgeRef::key).collect();
                (
                    std::cmp::Reverse(candidate.bottleneck),
                    candidate.edges.len(),
                    cand_keys,
                ) < (
                    std::cmp::Reverse(current.bottleneck),
                    current.edges.len(),
                    best_keys,
                )
            }
        };
        if wins {
            best = Some(candidate);
        }
    });
    Ok(best)
}

/// Counts simple `from -> to` paths (over all parallel-edge choices) with a
/// bitmask dynamic program — a second, structurally different route to the
/// number that `for_each_simple_path` visits.
pub fn count_simple_paths(
    g: &MultiGraph,
    from: &DealerId,
    to: &DealerId,
    budget: &SmallInstanceBudget,
) -> Result<u64, OracleError> {
    budget.check_graph(g)?;
    if from == to || !g.contains_vertex(from) || !g.contains_vertex(to) {
        return Ok(0);
    }
    let vertices: Vec<&DealerId> = g.vertices().collect();
    let index: BTreeMap<&DealerId, usize> =
        vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = vertices.len();
    let mut multiplicity = vec![vec![0u64; n]; n];
    for edge in g.iter_edges() {
        multiplicity[index[&edge.seller]][index[&edge.buyer]] += 1;
    }
    let (start, goal) = (index[from], index[to]);

    let mut dp = vec![vec![0u64; n]; 1 << n];
    dp[1 << start][start] = 1;
    let mut total = 0u64;
    for mask in 0..(1usize << n) {
        for last in 0..n {
            let ways = dp[mask][last];
            if ways == 0 || mask & (1 << last) == 0 {
                continue;
            }
            if last == goal {
                // Paths end the moment they reach the goal.
                total += ways;
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 || multiplicity[last][next] == 0 {
                    continue;
                }
                dp[mask | (1 << next)][next] += ways * multiplicity[last][next];
            }
        }
    }
    Ok(total)
}

/// Acyclicity via Kahn's algorithm — a different algorithm family from the
/// engine's DFS colouring, kept here so audits do not lean on the code they
/// are auditing.
pub fn kahn_is_acyclic(g: &MultiGraph) -> bool {
    let mut indegree: BTreeMap<&DealerId, usize> = g.vertices().map(|v| (v, 0)).collect();
    for v in g.vertices() {
        for n in g.out_neighbors(v) {
            *indegree.get_mut(n).expect("neighbour is a vertex") += 1;
        }
    }
    let mut queue: VecDeque<&DealerId> = indegree
        .iter()
        .filter(|(_, deg)| **deg == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut popped = 0usize;
    while let Some(v) = queue.pop_front() {
        popped += 1;
        for n in g.out_neighbors(v) {
            let deg = indegree.get_mut(n).expect("neighbour is a vertex");
            *deg -= 1;
            if *deg == 0 {
                queue.push_back(n);
            }
        }
    }
    popped == g.vertex_count()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error(transparent)]
    Budget(#[from] OracleError),
    #[error("audit mismatch: {detail}")]
    Mismatch { detail: String },
}

fn mismatch(detail: String) -> AuditError {
    AuditError::Mismatch { detail }
}

/// Independently re-validates a replay: replays the ledger, checks that each
/// removal record describes a real cycle with correct arithmetic, that its
/// flow value is the *exhaustive minimum* over all cycles through its trigger
/// at that moment, that the graph is acyclic after every insertion's records,
/// and that the final state equals the reported residual.
pub fn audit_removals(
    ledger: &[Transaction],
    result: &WcdResult,
    budget: &SmallInstanceBudget,
) -> Result<(), AuditError> {
    budget.check_ledger(ledger)?;

    let mut g = MultiGraph::new();
    let mut pending = result.removals.iter();
    let mut next_removal = pending.next();
    let mut expected_iteration = 1u64;

    for tx in ledger {
        let key = g
            .add_edge(tx)
            .map_err(|err| mismatch(format!("ledger replay failed: {err}")))?;
        while let Some(record) = next_removal {
            if record.trigger != key {
                break;
            }
            audit_one_removal(&mut g, record, expected_iteration, budget)?;
            expected_iteration += 1;
            next_removal = pending.next();
        }
        if !kahn_is_acyclic(&g) {
            return Err(mismatch(format!(
                "graph is still cyclic after the removals recorded for {key}"
            )));
        }
    }

    if let Some(record) = next_removal {
        return Err(mismatch(format!(
            "removal {} names a trigger that never closed a cycle in replay order",
            record.iteration
        )));
    }
    if g != result.residual {
        return Err(mismatch(
            "replayed residual differs from the reported residual".to_string(),
        ));
    }
    Ok(())
}

fn audit_one_removal(
    g: &mut MultiGraph,
    record: &RemovalRecord,
    expected_iteration: u64,
    budget: &SmallInstanceBudget,
) -> Result<(), AuditError> {
    let tag = format!("removal {}", record.iteration);
    if record.iteration != expected_iteration {
        return Err(mismatch(format!(
            "{tag}: expected iteration {expected_iteration}"
        )));
    }
    if record.edges.len() < 2 {
        return Err(mismatch(format!("{tag}: cycle has fewer than two edges")));
    }
    // Shape: contiguous, closed, vertex-simple, trigger as the closing hop.
    for pair in record.edges.windows(2) {
        if pair[0].buyer != pair[1].seller {
            return Err(mismatch(format!("{tag}: edges are not contiguous")));
        }
    }
    let first = record.edges.first().expect("len checked");
    let last = record.edges.last().expect("len checked");
    if last.buyer != first.seller {
        return Err(mismatch(format!("{tag}: edge sequence is not closed")));
    }
    if last.key() != record.trigger {
        return Err(mismatch(format!(
            "{tag}: trigger is not the closing edge of the recorded cycle"
        )));
    }
    let sellers: BTreeSet<&DealerId> = record.edges.iter().map(|re| &re.seller).collect();
    if sellers.len() != record.edges.len() {
        return Err(mismatch(format!("{tag}: cycle revisits a dealer")));
    }
    // The recorded pre-values must be exactly what the replayed graph holds.
    for re in &record.edges {
        if g.edge_value(&re.key()) != Some(re.pre_paise) {
            return Err(mismatch(format!(
                "{tag}: recorded pre-value of {} disagrees with the replay",
                re.key()
            )));
        }
    }
    // Arithmetic: subtract the cycle minimum, exactly.
    let min_pre = record.edges.iter().map(|re| re.pre_paise).min().expect("non-empty");
    let max_pre = record.edges.iter().map(|re| re.pre_paise).max().expect("non-empty");
    if record.subtracted_paise != min_pre {
        return Err(mismatch(format!(
            "{tag}: subtracted {} instead of the cycle minimum {}",
            record.subtracted_paise, min_pre
        )));
    }
    for re in &record.edges {
        let expected_post = re.pre_paise.checked_sub(min_pre).expect("min <= pre");
        if re.post_paise != expected_post {
            return Err(mismatch(format!(
                "{tag}: post-value of {} should be {expected_post}",
                re.key()
            )));
        }
    }
    // Minimality: the recorded cycle's flow value must equal the exhaustive
    // minimum over every cycle through the trigger at this moment.
    let closing = g
        .get_edge(&record.trigger)
        .expect("pre-values already matched the graph");
    let all_cycles = enumerate_cycles_through(g, &closing, budget)?;
    if all_cycles.is_empty() {
        return Err(mismatch(format!(
            "{tag}: no cycle passes through the trigger at this point"
        )));
    }
    let best_phi = all_cycles.iter().map(|c| c.phi).min().expect("non-empty");
    let recorded_phi = Money::from_paise(max_pre.paise() - min_pre.paise());
    if recorded_phi != best_phi {
        return Err(mismatch(format!(
            "{tag}: flow value {recorded_phi} is not the minimum {best_phi}"
        )));
    }
    // Apply the record to keep the replay in lockstep.
    for re in &record.edges {
        if re.post_paise.is_zero() {
            g.delete_edge(&re.key()).expect("validated above");
        } else {
            g.set_edge_value(&re.key(), re.post_paise)
                .expect("validated above");
        }
    }
    Ok(())
}
