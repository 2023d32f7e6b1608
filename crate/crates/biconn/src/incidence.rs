//! Incidence graphs between candidate edges and the tree nodes/edges on
//! their tree paths, with the short-cut and reduced variants, end-edge
//! reachability, and the equivalence checkers used as property tests.
//!
//! For a tree T and candidate set F, the (F,V) graph joins each link node f
//! to every tree node on T_f, and the (F,E_T) graph joins f to every tree
//! edge on T_f. Short-cutting adds a clique on each terminal's neighborhood;
//! the reduced graphs then drop the non-leaf terminals and keep the tree
//! leaves (leaf edges) as terminal set R.

use std::collections::{BTreeSet, VecDeque};

use crate::connectivity::{st_connectivity, ConnMode};
use crate::error::{Error, Result};
use crate::graph::{
    tree_path, tree_path_nodes, union_with_candidates, EdgeId, EdgeSet, Graph, NodeId, Tree,
};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncKind {
    Fv,
    Fet,
    ShortcutFv,
    ShortcutFet,
    ReducedFv,
    ReducedFet,
}

impl IncKind {
    pub fn name(&self) -> &'static str {
        match self {
            IncKind::Fv => "fv",
            IncKind::Fet => "fet",
            IncKind::ShortcutFv => "shortcut_fv",
            IncKind::ShortcutFet => "shortcut_fet",
            IncKind::ReducedFv => "reduced_fv",
            IncKind::ReducedFet => "reduced_fet",
        }
    }

    fn is_fv(&self) -> bool {
        matches!(self, IncKind::Fv | IncKind::ShortcutFv | IncKind::ReducedFv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncNode {
    /// Candidate edge f, by its id in the EdgeSet.
    Link(usize),
    TreeNode(NodeId),
    TreeEdge(EdgeId),
}

#[derive(Debug, Clone)]
pub struct IncidenceGraph {
    pub kind: IncKind,
    pub nodes: Vec<IncNode>,
    adj: Vec<BTreeSet<usize>>,
    /// Sorted indices into `nodes`.
    pub terminals: Vec<usize>,
}

impl IncidenceGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().copied()
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.terminals.binary_search(&i).is_ok()
    }

    pub fn index_of(&self, node: IncNode) -> Option<usize> {
        self.nodes.iter().position(|&x| x == node)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_path(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; self.n()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if y == b {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Unit-cost plain graph over the same node indices.
    pub fn to_graph(&self) -> Graph {
        let mut pairs = Vec::new();
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                if i < j {
                    pairs.push((i, j, Rat::one()));
                }
            }
        }
        Graph::new(self.n(), pairs).expect("incidence adjacency is simple")
    }
}

pub fn build_incidence(tree: &Tree, cands: &EdgeSet, kind: IncKind) -> Result<IncidenceGraph> {
    if tree.n() < 2 {
        return Err(Error::EmptyTree);
    }
    let base = build_base(tree, cands, kind.is_fv())?;
    Ok(match kind {
        IncKind::Fv | IncKind::Fet => base,
        IncKind::ShortcutFv | IncKind::ShortcutFet => short_cut_terminals(&base),
        IncKind::ReducedFv | IncKind::ReducedFet => reduce(tree, &short_cut_terminals(&base)),
    })
}

fn build_base(tree: &Tree, cands: &EdgeSet, fv: bool) -> Result<IncidenceGraph> {
    let f = cands.len();
    let mut nodes: Vec<IncNode> = (0..f).map(IncNode::Link).collect();
    if fv {
        nodes.extend((0..tree.n()).map(IncNode::TreeNode));
    } else {
        nodes.extend((0..tree.n() - 1).map(IncNode::TreeEdge));
    }
    let mut adj = vec![BTreeSet::new(); nodes.len()];
    for c in cands.members() {
        if fv {
            for v in tree_path_nodes(tree, c.u, c.v)? {
                adj[c.id].insert(f + v);
                adj[f + v].insert(c.id);
            }
        } else {
            for e in tree_path(tree, c.u, c.v)? {
                adj[c.id].insert(f + e);
                adj[f + e].insert(c.id);
            }
        }
    }
    let terminals: Vec<usize> = (f..nodes.len()).collect();
    Ok(IncidenceGraph {
        kind: if fv { IncKind::Fv } else { IncKind::Fet },
        nodes,
        adj,
        terminals,
    })
}

/// Adds a clique on the neighborhood of every terminal; terminals are kept
/// (removal happens only in the reduced variants). Idempotent on graphs that
/// are already short-cut or reduced.
pub fn short_cut_terminals(h: &IncidenceGraph) -> IncidenceGraph {
    let mut out = h.clone();
    for &t in &h.terminals {
        let nbrs: Vec<usize> = h.adj[t].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                out.adj[a].insert(b);
                out.adj[b].insert(a);
            }
        }
    }
    out.kind = match h.kind {
        IncKind::Fv => IncKind::ShortcutFv,
        IncKind::Fet => IncKind::ShortcutFet,
        other => other,
    };
    out
}

/// Deletes the non-leaf terminals of a short-cut graph and re-targets R to
/// the tree's leaves (FV) or leaf edges (FET).
fn reduce(tree: &Tree, h: &IncidenceGraph) -> IncidenceGraph {
    let keep = |node: &IncNode| match *node {
        IncNode::Link(_) => true,
        IncNode::TreeNode(v) => tree.is_leaf(v),
        IncNode::TreeEdge(e) => {
            let edge = tree.graph().edge(e);
            tree.is_leaf(edge.u) || tree.is_leaf(edge.v)
        }
    };
    let mut remap = vec![usize::MAX; h.n()];
    let mut nodes = Vec::new();
    for (i, node) in h.nodes.iter().enumerate() {
        if keep(node) {
            remap[i] = nodes.len();
            nodes.push(*node);
        }
    }
    let mut adj = vec![BTreeSet::new(); nodes.len()];
    for (i, nbrs) in h.adj.iter().enumerate() {
        if remap[i] == usize::MAX {
            continue;
        }
        for &j in nbrs {
            if remap[j] != usize::MAX {
                adj[remap[i]].insert(remap[j]);
            }
        }
    }
    let terminals: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| !matches!(n, IncNode::Link(_)))
        .map(|(i, _)| i)
        .collect();
    IncidenceGraph {
        kind: if h.kind.is_fv() {
            IncKind::ReducedFv
        } else {
            IncKind::ReducedFet
        },
        nodes,
        adj,
        terminals,
    }
}

/// First and last edges of the st-path in T; equal iff s,t are adjacent.
pub fn end_edges(tree: &Tree, s: NodeId, t: NodeId) -> Result<(EdgeId, EdgeId)> {
    if s == t {
        return Err(Error::InvalidPair(format!("s == t == {s}")));
    }
    let path = tree_path(tree, s, t)?;
    Ok((path[0], *path.last().unwrap()))
}

/// True iff the (F,E_T)-incidence graph has an e_s e_t-path (trivially true
/// when e_s = e_t, i.e. s,t adjacent in T).
pub fn h_reachable(tree: &Tree, cands: &EdgeSet, s: NodeId, t: NodeId) -> Result<bool> {
    let (es, et) = end_edges(tree, s, t)?;
    if es == et {
        return Ok(true);
    }
    let h = build_incidence(tree, cands, IncKind::Fet)?;
    let a = h.index_of(IncNode::TreeEdge(es)).expect("tree edge node");
    let b = h.index_of(IncNode::TreeEdge(et)).expect("tree edge node");
    Ok(h.has_path(a, b))
}

/// True iff all terminals lie in one connected component. Only meaningful
/// for the reduced kinds.
pub fn terminals_connected(h: &IncidenceGraph) -> Result<bool> {
    if !matches!(h.kind, IncKind::ReducedFv | IncKind::ReducedFet) {
        return Err(Error::WrongKind {
            expected: "reduced_fv or reduced_fet".into(),
            got: h.kind.name().into(),
        });
    }
    let Some(&first) = h.terminals.first() else {
        return Ok(true);
    };
    Ok(h.terminals.iter().all(|&t| h.has_path(first, t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivCheck {
    pub agree: bool,
    /// Flow-based connectivity side.
    pub lhs: bool,
    /// Incidence-graph reachability side.
    pub rhs: bool,
}

/// Pairwise equivalence: lambda/kappa of T+F on (s,t) >= 2 vs incidence-graph
/// reachability. Node mode requires s,t non-adjacent in T.
pub fn lemma_equiv_check(
    tree: &Tree,
    cands: &EdgeSet,
    s: NodeId,
    t: NodeId,
    mode: ConnMode,
) -> Result<EquivCheck> {
    if s == t {
        return Err(Error::InvalidPair(format!("s == t == {s}")));
    }
    if mode == ConnMode::Node && tree.graph().has_edge(s, t) {
        return Err(Error::InvalidPair(format!(
            "({s},{t}) adjacent in T: excluded from the node-mode equivalence"
        )));
    }
    let union = union_with_candidates(tree, cands.members());
    let lhs = st_connectivity(&union, s, t, mode)? >= 2;
    let rhs = match mode {
        ConnMode::Edge => {
            let h = build_incidence(tree, cands, IncKind::Fv)?;
            let a = h.index_of(IncNode::TreeNode(s)).expect("tree node");
            let b = h.index_of(IncNode::TreeNode(t)).expect("tree node");
            h.has_path(a, b)
        }
        ConnMode::Node => h_reachable(tree, cands, s, t)?,
    };
    Ok(EquivCheck {
        agree: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Global criterion: T+F 2-edge-connected vs reduced-FV terminals connected
/// (edge mode), T+F 2-connected vs reduced-FET terminals connected (node
/// mode). Trees with fewer than 3 nodes degenerate and are rejected.
pub fn global_criterion(tree: &Tree, cands: &EdgeSet, mode: ConnMode) -> Result<EquivCheck> {
    if tree.n() < 3 {
        return Err(Error::DegenerateTree(format!(
            "global criterion needs |T| >= 3, got {}",
            tree.n()
        )));
    }
    let union = union_with_candidates(tree, cands.members());
    let lhs = crate::connectivity::is_two_connected(&union, mode);
    let kind = match mode {
        ConnMode::Edge => IncKind::ReducedFv,
        ConnMode::Node => IncKind::ReducedFet,
    };
    let rhs = terminals_connected(&build_incidence(tree, cands, kind)?)?;
    Ok(EquivCheck {
        agree: lhs == rhs,
        lhs,
        rhs,
    })
}
