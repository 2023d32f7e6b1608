//! Undirected simple graphs, spanning trees and candidate edge sets.
//!
//! Node ids are dense `0..n`, edge ids dense `0..m`, endpoints stored with
//! `u < v`. All values are immutable after construction.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Rat,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }

    pub fn ends(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, EdgeId)>>,
    profits: Option<Vec<Rat>>,
}

impl Graph {
    pub fn new(n: usize, raw: Vec<(NodeId, NodeId, Rat)>) -> Result<Graph> {
        let mut edges = Vec::with_capacity(raw.len());
        let mut seen = BTreeSet::new();
        for (i, (a, b, cost)) in raw.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} endpoint out of range (n={n})"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop at {a}")));
            }
            if cost.is_negative() {
                return Err(Error::InvalidGraph(format!("edge {i} has negative cost")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!(
                    "parallel edge {i}: ({u},{v}) occurs twice"
                )));
            }
            edges.push(Edge { id: i, u, v, cost });
        }
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push((e.v, e.id));
            adj[e.v].push((e.u, e.id));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adj,
            profits: None,
        })
    }

    pub fn unit(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Graph> {
        Graph::new(n, pairs.iter().map(|&(u, v)| (u, v, Rat::one())).collect())
    }

    pub fn with_profits(mut self, profits: Vec<Rat>) -> Result<Graph> {
        if profits.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "profit vector length {} != n {}",
                profits.len(),
                self.n
            )));
        }
        if profits.iter().any(Rat::is_negative) {
            return Err(Error::InvalidGraph("negative node profit".into()));
        }
        self.profits = Some(profits);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn adj(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn profits(&self) -> Option<&[Rat]> {
        self.profits.as_deref()
    }

    pub fn profit_of(&self, v: NodeId) -> Rat {
        match &self.profits {
            Some(p) => p[v],
            None => Rat::one(),
        }
    }

    pub fn find_edge(&self, a: NodeId, b: NodeId) -> Option<EdgeId> {
        if a >= self.n || b >= self.n || a == b {
            return None;
        }
        let idx = self.adj[a].partition_point(|&(w, _)| w < b);
        self.adj[a]
            .get(idx)
            .and_then(|&(w, e)| (w == b).then_some(e))
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.find_edge(a, b).is_some()
    }

    pub fn total_cost(&self) -> Rat {
        self.edges.iter().map(|e| e.cost).sum()
    }

    /// Connected component ids, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = count;
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        queue.push_back(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.components().1 == 1
    }

    /// Subgraph induced by `nodes`, with the compaction map (new id -> old id).
    pub fn induced(&self, nodes: &BTreeSet<NodeId>) -> (Graph, Vec<NodeId>) {
        let map: Vec<NodeId> = nodes.iter().copied().collect();
        let mut back = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            back[old] = new;
        }
        let mut raw = Vec::new();
        for e in &self.edges {
            if back[e.u] != usize::MAX && back[e.v] != usize::MAX {
                raw.push((back[e.u], back[e.v], e.cost));
            }
        }
        let g = Graph::new(map.len(), raw).expect("induced subgraph of a valid graph");
        (g, map)
    }

    /// Same node set, restricted edge set (edge ids re-densified).
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> Graph {
        let raw = keep
            .iter()
            .map(|&id| {
                let e = &self.edges[id];
                (e.u, e.v, e.cost)
            })
            .collect();
        Graph::new(self.n, raw).expect("edge subgraph of a valid graph")
    }
}

/// A validated tree: connected with exactly n-1 edges.
#[derive(Debug, Clone)]
pub struct Tree(Graph);

impl Tree {
    pub fn new(g: Graph) -> Result<Tree> {
        if g.n() == 0 {
            return Err(Error::EmptyTree);
        }
        if g.m() != g.n() - 1 {
            return Err(Error::InvalidGraph(format!(
                "tree must have n-1 edges, got n={} m={}",
                g.n(),
                g.m()
            )));
        }
        if !g.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(Tree(g))
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn edges(&self) -> &[Edge] {
        self.0.edges()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.0.degree(v) == 1
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.n()).filter(|&v| self.is_leaf(v)).collect()
    }

    /// Tree edges incident to a leaf.
    pub fn leaf_edges(&self) -> Vec<EdgeId> {
        self.0
            .edges()
            .iter()
            .filter(|e| self.is_leaf(e.u) || self.is_leaf(e.v))
            .map(|e| e.id)
            .collect()
    }

    pub fn rooted(&self, root: NodeId) -> Result<RootedTree> {
        if root >= self.n() {
            return Err(Error::InvalidNode(root));
        }
        let n = self.n();
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, e) in self.0.adj(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    parent_edge[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        Ok(RootedTree {
            root,
            parent,
            parent_edge,
            order,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RootedTree {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    /// BFS order from the root.
    pub order: Vec<NodeId>,
}

/// A candidate edge for augmentation; ids are dense within the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandEdge {
    pub id: usize,
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Rat,
}

impl CandEdge {
    pub fn ends(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

/// An input edge dropped during [`EdgeSet::new`] canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub reason: &'static str,
}

/// Candidate edges on the nodes of a companion tree, disjoint from its edges.
#[derive(Debug, Clone)]
pub struct EdgeSet {
    members: Vec<CandEdge>,
}

impl EdgeSet {
    /// Canonicalizes endpoints, drops edges that duplicate a tree edge or an
    /// earlier candidate (a parallel edge never helps node connectivity), and
    /// reports the drops as warnings.
    pub fn new(
        tree: &Tree,
        raw: impl IntoIterator<Item = (NodeId, NodeId, Rat)>,
    ) -> Result<(EdgeSet, Vec<FilteredEdge>)> {
        let n = tree.n();
        let mut members = Vec::new();
        let mut filtered = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, b, cost) in raw {
            if a >= n || b >= n {
                return Err(Error::InvalidNode(a.max(b)));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("candidate self-loop at {a}")));
            }
            if cost.is_negative() {
                return Err(Error::InvalidGraph("negative candidate cost".into()));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if tree.graph().has_edge(u, v) {
                filtered.push(FilteredEdge {
                    u,
                    v,
                    reason: "duplicates a tree edge",
                });
                continue;
            }
            if !seen.insert((u, v)) {
                filtered.push(FilteredEdge {
                    u,
                    v,
                    reason: "duplicates an earlier candidate",
                });
                continue;
            }
            members.push(CandEdge {
                id: members.len(),
                u,
                v,
                cost,
            });
        }
        Ok((EdgeSet { members }, filtered))
    }

    pub fn members(&self) -> &[CandEdge] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, id: usize) -> &CandEdge {
        &self.members[id]
    }

    pub fn total_cost(&self) -> Rat {
        self.members.iter().map(|e| e.cost).sum()
    }
}

/// T ∪ F as one graph: tree edges keep their ids `0..n-1`, candidate `i`
/// becomes edge id `n-1+i`.
pub fn union_with_candidates(tree: &Tree, cands: &[CandEdge]) -> Graph {
    let mut raw: Vec<(NodeId, NodeId, Rat)> = tree
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.cost))
        .collect();
    raw.extend(cands.iter().map(|c| (c.u, c.v, c.cost)));
    Graph::new(tree.n(), raw).expect("tree and candidates are disjoint simple edges")
}

/// The unique u-v path in the tree, as edge ids ordered from u to v.
pub fn tree_path(tree: &Tree, u: NodeId, v: NodeId) -> Result<Vec<EdgeId>> {
    if u >= tree.n() {
        return Err(Error::InvalidNode(u));
    }
    if v >= tree.n() {
        return Err(Error::InvalidNode(v));
    }
    if u == v {
        return Err(Error::DegeneratePath(u));
    }
    let rooted = tree.rooted(u)?;
    let mut path = Vec::new();
    let mut x = v;
    while x != u {
        let e = rooted.parent_edge[x].expect("tree is connected");
        path.push(e);
        x = rooted.parent[x].expect("tree is connected");
    }
    path.reverse();
    Ok(path)
}

/// Nodes of the tree path between the endpoints of (u,v), in path order.
pub fn tree_path_nodes(tree: &Tree, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
    let edges = tree_path(tree, u, v)?;
    let mut nodes = vec![u];
    let mut cur = u;
    for e in edges {
        cur = tree.graph().edge(e).other(cur);
        nodes.push(cur);
    }
    Ok(nodes)
}

/// The forest T_F: the subgraph of T whose edges lie on some T_f, f in F.
/// Edge ids are re-densified; isolated nodes are kept.
pub fn covered_forest(tree: &Tree, cands: &EdgeSet) -> Result<Graph> {
    let mut on_path = vec![false; tree.n().saturating_sub(1)];
    for c in cands.members() {
        for e in tree_path(tree, c.u, c.v)? {
            on_path[e] = true;
        }
    }
    let keep: Vec<EdgeId> = (0..on_path.len()).filter(|&e| on_path[e]).collect();
    Ok(tree.graph().edge_subgraph(&keep))
}

/// True iff every node outside `s` has a neighbor in `s`.
pub fn dominates(g: &Graph, s: &BTreeSet<NodeId>) -> bool {
    (0..g.n()).all(|v| s.contains(&v) || g.adj(v).iter().any(|(w, _)| s.contains(w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Tree {
        let pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Tree::new(Graph::unit(n, &pairs).unwrap()).unwrap()
    }

    fn star(leaves: usize) -> Tree {
        // center is node 0
        let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Tree::new(Graph::unit(leaves + 1, &pairs).unwrap()).unwrap()
    }

    #[test]
    fn graph_rejects_self_loops_and_parallels() {
        assert!(matches!(
            Graph::unit(3, &[(0, 0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::unit(3, &[(0, 1), (1, 0)]),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn tree_path_on_path_graph() {
        // path a-b-c, (a,c) -> [ab, bc]
        let t = path_graph(3);
        assert_eq!(tree_path(&t, 0, 2).unwrap(), vec![0, 1]);
        assert_eq!(tree_path(&t, 2, 0).unwrap(), vec![1, 0]);
    }

    #[test]
    fn tree_path_on_star() {
        // star center 0, leaves 1,2: (1,2) -> [e(0,1), e(0,2)]
        let t = star(2);
        let p = tree_path(&t, 1, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(t.graph().edge(p[0]).touches(1));
        assert!(t.graph().edge(p[1]).touches(2));
    }

    #[test]
    fn tree_path_degenerate() {
        let t = path_graph(3);
        assert!(matches!(tree_path(&t, 1, 1), Err(Error::DegeneratePath(1))));
        assert!(matches!(tree_path(&t, 0, 9), Err(Error::InvalidNode(9))));
    }

    #[test]
    fn tree_path_reversal_symmetry() {
        let t = star(4);
        for u in 0..5 {
            for v in 0..5 {
                if u == v {
                    continue;
                }
                let mut fwd = tree_path(&t, u, v).unwrap();
                let rev = tree_path(&t, v, u).unwrap();
                fwd.reverse();
                assert_eq!(fwd, rev);
            }
        }
    }

    #[test]
    fn covered_forest_path() {
        // path a-b-c-d, F={ad} -> all three tree edges
        let t = path_graph(4);
        let (f, warn) = EdgeSet::new(&t, vec![(0, 3, Rat::one())]).unwrap();
        assert!(warn.is_empty());
        let forest = covered_forest(&t, &f).unwrap();
        assert_eq!(forest.m(), 3);
    }

    #[test]
    fn covered_forest_empty() {
        let t = path_graph(4);
        let (f, _) = EdgeSet::new(&t, Vec::new()).unwrap();
        assert_eq!(covered_forest(&t, &f).unwrap().m(), 0);
    }

    #[test]
    fn duplicate_tree_edge_filtered() {
        // a candidate equal to tree edge (a,b) is filtered with a warning and
        // contributes nothing to the forest
        let t = path_graph(4);
        let (f, warn) = EdgeSet::new(&t, vec![(1, 0, Rat::one())]).unwrap();
        assert_eq!(f.len(), 0);
        assert_eq!(warn.len(), 1);
        assert_eq!(warn[0].reason, "duplicates a tree edge");
        assert_eq!(covered_forest(&t, &f).unwrap().m(), 0);
    }

    #[test]
    fn dominates_examples() {
        let g = Graph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let all: BTreeSet<_> = (0..5).collect();
        assert!(dominates(&g, &all));
        let one: BTreeSet<_> = [0].into();
        assert!(!dominates(&g, &one));
        let star = Graph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let center: BTreeSet<_> = [0].into();
        assert!(dominates(&star, &center));
    }

    #[test]
    fn find_edge_binary_search() {
        let g = Graph::unit(6, &[(0, 5), (0, 2), (2, 5), (1, 3)]).unwrap();
        assert_eq!(g.find_edge(5, 0), Some(0));
        assert_eq!(g.find_edge(2, 0), Some(1));
        assert_eq!(g.find_edge(0, 1), None);
        assert_eq!(g.find_edge(3, 1), Some(3));
    }
}
