//! Exhaustive problem-level oracles. Each enumerates candidate solutions in
//! a deterministic order with feasibility tested by the direct checkers, so
//! they are independent of the reduction pipelines they judge.

use std::collections::BTreeSet;

use crate::connectivity::{is_two_connected, ConnMode};
use crate::error::{Error, Result};
use crate::graph::{dominates, union_with_candidates, EdgeSet, Graph, NodeId, Tree};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Objective value of the optimum.
    pub opt: Rat,
    /// Chosen candidate edges (augmentation problems) or graph edges
    /// (subgraph problems), endpoint pairs.
    pub edges: Vec<(NodeId, NodeId)>,
    /// Node set of the optimal subgraph, where meaningful.
    pub nodes: Vec<NodeId>,
}

fn cap_check(len: usize, cap: usize, what: &str) -> Result<()> {
    if len > cap.min(60) {
        return Err(Error::CapExceeded(format!(
            "{what}: {len} exceeds cap {}",
            cap.min(60)
        )));
    }
    Ok(())
}

/// Min-size F ⊆ E with T ∪ F 2-connected: combinations in increasing size,
/// first hit wins (lexicographically first within a size).
pub fn oracle_block_tree_aug(tree: &Tree, cands: &EdgeSet, cap: usize) -> Result<OracleReport> {
    cap_check(cands.len(), cap, "block-tree augmentation oracle")?;
    let m = cands.len();
    let all: Vec<_> = cands.members().to_vec();
    if !is_two_connected(&union_with_candidates(tree, &all), ConnMode::Node) {
        return Err(Error::Infeasible("no F ⊆ E 2-connects T".into()));
    }
    for size in 1..=m {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<_> = comb.iter().map(|&i| cands.get(i).clone()).collect();
            let union = union_with_candidates(tree, &chosen);
            if is_two_connected(&union, ConnMode::Node) {
                return Ok(OracleReport {
                    opt: Rat::int(size as i64),
                    edges: comb
                        .iter()
                        .map(|&i| (cands.get(i).u, cands.get(i).v))
                        .collect(),
                    nodes: (0..tree.n()).collect(),
                });
            }
            if !next_combination(&mut comb, m) {
                break;
            }
        }
    }
    Err(Error::Infeasible("no F ⊆ E 2-connects T".into()))
}

/// Min-cost F ⊆ E with T ∪ F 2-edge-connected.
pub fn oracle_tree_aug_ec(tree: &Tree, cands: &EdgeSet, cap: usize) -> Result<OracleReport> {
    cap_check(cands.len(), cap, "tree augmentation oracle")?;
    let m = cands.len();
    let mut best: Option<(Rat, u32, u64)> = None;
    for mask in 0..(1u64 << m) {
        let cost: Rat = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cands.get(i).cost)
            .sum();
        if let Some((bc, bp, bm)) = best {
            if (cost, mask.count_ones(), mask) >= (bc, bp, bm) {
                continue;
            }
        }
        let chosen: Vec<_> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cands.get(i).clone())
            .collect();
        let union = union_with_candidates(tree, &chosen);
        if is_two_connected(&union, ConnMode::Edge) {
            best = Some((cost, mask.count_ones(), mask));
        }
    }
    let Some((cost, _, mask)) = best else {
        return Err(Error::Infeasible("no F ⊆ E 2-edge-connects T".into()));
    };
    Ok(OracleReport {
        opt: cost,
        edges: (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (cands.get(i).u, cands.get(i).v))
            .collect(),
        nodes: (0..tree.n()).collect(),
    })
}

fn has_hamiltonian_cycle(g: &Graph, nodes: &[NodeId]) -> bool {
    let k = nodes.len();
    if k < 3 {
        return false;
    }
    // DFS over permutations anchored at nodes[0], with adjacency pruning
    fn rec(g: &Graph, order: &mut Vec<NodeId>, left: &mut BTreeSet<NodeId>) -> bool {
        if left.is_empty() {
            let first = order[0];
            let last = *order.last().unwrap();
            return g.has_edge(first, last);
        }
        let cur = *order.last().unwrap();
        let options: Vec<NodeId> = left
            .iter()
            .copied()
            .filter(|&v| g.has_edge(cur, v))
            .collect();
        for v in options {
            left.remove(&v);
            order.push(v);
            if rec(g, order, left) {
                return true;
            }
            order.pop();
            left.insert(v);
        }
        false
    }
    let mut order = vec![nodes[0]];
    let mut left: BTreeSet<NodeId> = nodes[1..].iter().copied().collect();
    rec(g, &mut order, &mut left)
}

/// Minimum edge count of a 2-connected spanning subgraph of g[nodes], or
/// None. A Hamiltonian cycle gives the floor |S| immediately; otherwise edge
/// subsets are enumerated by increasing size.
fn min_edges_two_connected(g: &Graph, nodes: &BTreeSet<NodeId>) -> Option<usize> {
    if nodes.len() < 3 {
        return None;
    }
    let (sub, map) = g.induced(nodes);
    if !is_two_connected(&sub, ConnMode::Node) {
        return None;
    }
    let ids: Vec<NodeId> = map.clone();
    if has_hamiltonian_cycle(g, &ids) {
        return Some(nodes.len());
    }
    let m = sub.m();
    for size in nodes.len() + 1..=m {
        // combinations of edge ids of the induced subgraph
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let keep: Vec<usize> = comb.clone();
            let candidate = sub.edge_subgraph(&keep);
            if is_two_connected(&candidate, ConnMode::Node) {
                return Some(size);
            }
            if !next_combination(&mut comb, m) {
                break;
            }
        }
    }
    Some(m)
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (k - i) {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Min-edge 2-connected dominating subgraph: all dominating node sets in
/// increasing size (|S| lower-bounds the edge count, pruning the search),
/// each with its cheapest 2-connected spanning subgraph.
pub fn oracle_2cds(g: &Graph, cap_n: usize) -> Result<OracleReport> {
    cap_check(g.n(), cap_n, "2cds oracle")?;
    if g.n() < 3 {
        return Err(Error::Infeasible("2cds needs n >= 3".into()));
    }
    let n = g.n();
    let mut subsets: Vec<u64> = (1..(1u64 << n)).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    let mut best: Option<(usize, BTreeSet<NodeId>)> = None;
    for mask in subsets {
        let size = mask.count_ones() as usize;
        if size < 3 {
            continue;
        }
        if let Some((be, _)) = &best {
            if size >= *be {
                break; // edge count >= |S| >= best
            }
        }
        let nodes: BTreeSet<NodeId> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if !dominates(g, &nodes) {
            continue;
        }
        if let Some(edges) = min_edges_two_connected(g, &nodes) {
            if best.as_ref().map_or(true, |(be, _)| edges < *be) {
                best = Some((edges, nodes));
            }
        }
    }
    let Some((edges, nodes)) = best else {
        return Err(Error::Infeasible("no 2-connected dominating subgraph".into()));
    };
    Ok(OracleReport {
        opt: Rat::int(edges as i64),
        edges: Vec::new(),
        nodes: nodes.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubgraphObjective {
    /// Min cost with at least k nodes.
    MinCostAtLeastK(usize),
    /// Min cost with profit at least Q.
    MinCostQuota(Rat),
    /// Max profit with cost at most B.
    MaxProfitBudget(Rat),
}

/// Optimum over all edge subsets of G whose span is 2-connected (or empty),
/// under the given objective. The cap bounds |E(G)|.
pub fn oracle_subgraph(g: &Graph, objective: SubgraphObjective, cap: usize) -> Result<OracleReport> {
    cap_check(g.m(), cap, "subgraph oracle")?;
    let m = g.m();
    // (objective key, mask); empty solution participates where feasible
    let mut best: Option<(Rat, u64)> = None;
    let feasible_empty = match objective {
        SubgraphObjective::MinCostAtLeastK(k) => k == 0,
        SubgraphObjective::MinCostQuota(q) => q <= Rat::zero(),
        SubgraphObjective::MaxProfitBudget(_) => true,
    };
    if feasible_empty {
        best = Some((Rat::zero(), 0));
    }
    for mask in 1u64..(1 << m) {
        let keep: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let cost: Rat = keep.iter().map(|&e| g.edge(e).cost).sum();
        let span: BTreeSet<NodeId> = keep
            .iter()
            .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
            .collect();
        let profit: Rat = span.iter().map(|&v| g.profit_of(v)).sum();
        match objective {
            SubgraphObjective::MinCostAtLeastK(k) => {
                if span.len() < k {
                    continue;
                }
            }
            SubgraphObjective::MinCostQuota(q) => {
                if profit < q {
                    continue;
                }
            }
            SubgraphObjective::MaxProfitBudget(b) => {
                if cost > b {
                    continue;
                }
            }
        }
        let key = match objective {
            SubgraphObjective::MaxProfitBudget(_) => profit,
            _ => cost,
        };
        let improves = match (&best, objective) {
            (None, _) => true,
            (Some((bk, bm)), SubgraphObjective::MaxProfitBudget(_)) => {
                (key, std::cmp::Reverse(mask)) > (*bk, std::cmp::Reverse(*bm))
            }
            (Some((bk, bm)), _) => (key, mask) < (*bk, *bm),
        };
        if !improves {
            continue;
        }
        // the kept edges on their span, compacted, must be 2-connected
        let map: Vec<NodeId> = span.iter().copied().collect();
        let back: std::collections::BTreeMap<NodeId, usize> =
            map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut raw = Vec::new();
        for &e in &keep {
            let edge = g.edge(e);
            raw.push((back[&edge.u], back[&edge.v], edge.cost));
        }
        let kept_graph = Graph::new(map.len(), raw)?;
        if is_two_connected(&kept_graph, ConnMode::Node) {
            best = Some((key, mask));
        }
    }
    let Some((opt, mask)) = best else {
        return Err(Error::Infeasible("no feasible subgraph".into()));
    };
    let keep: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
    let span: BTreeSet<NodeId> = keep
        .iter()
        .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
        .collect();
    Ok(OracleReport {
        opt,
        edges: keep.iter().map(|&e| (g.edge(e).u, g.edge(e).v)).collect(),
        nodes: span.into_iter().collect(),
    })
}
