//! Connectivity oracles: st edge/node connectivity by augmenting-path flow,
//! 2-connectivity tests, and the block-cut tree.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnMode {
    Edge,
    Node,
}

/// Unit-capacity directed flow network with residual arcs.
struct FlowNet {
    head: Vec<Vec<usize>>, // per node, arc indices
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl FlowNet {
    fn new(n: usize) -> FlowNet {
        FlowNet {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn arc(&mut self, a: usize, b: usize, cap: i32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(cap);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    /// Max flow by BFS augmenting paths; instances are tiny so no blocking
    /// flow machinery.
    fn max_flow(&mut self, s: usize, t: usize, limit: i32) -> i32 {
        let mut flow = 0;
        while flow < limit {
            let mut prev_arc = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            'bfs: while let Some(x) = queue.pop_front() {
                for &a in &self.head[x] {
                    let y = self.to[a];
                    if !seen[y] && self.cap[a] > 0 {
                        seen[y] = true;
                        prev_arc[y] = a;
                        if y == t {
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut x = t;
            while x != s {
                let a = prev_arc[x];
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                x = self.to[a ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

fn lambda(g: &Graph, s: NodeId, t: NodeId) -> usize {
    let mut net = FlowNet::new(g.n());
    for e in g.edges() {
        net.arc(e.u, e.v, 1);
        net.arc(e.v, e.u, 1);
    }
    net.max_flow(s, t, i32::MAX) as usize
}

fn kappa(g: &Graph, s: NodeId, t: NodeId) -> usize {
    if let Some(direct) = g.find_edge(s, t) {
        // adjacent pair: the direct edge plus internally disjoint paths
        // avoiding it
        let keep: Vec<_> = (0..g.m()).filter(|&e| e != direct).collect();
        return 1 + kappa(&g.edge_subgraph(&keep), s, t);
    }
    // split every internal node w into w_in -> w_out with capacity 1
    let n = g.n();
    let big = (g.n() + g.m()) as i32 + 1;
    let node_in = |w: NodeId| w;
    let node_out = |w: NodeId| if w == s || w == t { w } else { n + w };
    let mut net = FlowNet::new(2 * n);
    for w in 0..n {
        if w != s && w != t {
            net.arc(node_in(w), node_out(w), 1);
        }
    }
    for e in g.edges() {
        net.arc(node_out(e.u), node_in(e.v), big);
        net.arc(node_out(e.v), node_in(e.u), big);
    }
    net.max_flow(node_out(s), node_in(t), big) as usize
}

/// lambda_G(s,t) in edge mode, kappa_G(s,t) in node mode.
pub fn st_connectivity(g: &Graph, s: NodeId, t: NodeId, mode: ConnMode) -> Result<usize> {
    if s >= g.n() {
        return Err(Error::InvalidNode(s));
    }
    if t >= g.n() {
        return Err(Error::InvalidNode(t));
    }
    if s == t {
        return Err(Error::InvalidPair(format!("s == t == {s}")));
    }
    Ok(match mode {
        ConnMode::Edge => lambda(g, s, t),
        ConnMode::Node => kappa(g, s, t),
    })
}

struct DfsLow {
    timer: usize,
    tin: Vec<usize>,
    low: Vec<usize>,
    is_cut: Vec<bool>,
    bridges: Vec<usize>,
    // stack of edge ids for block extraction
    edge_stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

fn dfs_low(g: &Graph, v: NodeId, parent_edge: Option<usize>, st: &mut DfsLow) {
    st.tin[v] = st.timer;
    st.low[v] = st.timer;
    st.timer += 1;
    let mut children = 0;
    for &(w, e) in g.adj(v) {
        if Some(e) == parent_edge {
            continue;
        }
        if st.tin[w] != usize::MAX {
            if st.tin[w] < st.tin[v] {
                st.edge_stack.push(e);
            }
            st.low[v] = st.low[v].min(st.tin[w]);
        } else {
            st.edge_stack.push(e);
            children += 1;
            dfs_low(g, w, Some(e), st);
            st.low[v] = st.low[v].min(st.low[w]);
            if st.low[w] > st.tin[v] {
                st.bridges.push(e);
            }
            if st.low[w] >= st.tin[v] {
                if parent_edge.is_some() || children > 1 {
                    st.is_cut[v] = true;
                }
                let mut block = Vec::new();
                while let Some(top) = st.edge_stack.pop() {
                    block.push(top);
                    if top == e {
                        break;
                    }
                }
                block.reverse();
                st.blocks.push(block);
            }
        }
    }
    if parent_edge.is_none() && children == 1 {
        st.is_cut[v] = false;
    }
}

fn run_dfs_low(g: &Graph) -> DfsLow {
    let mut st = DfsLow {
        timer: 0,
        tin: vec![usize::MAX; g.n()],
        low: vec![0; g.n()],
        is_cut: vec![false; g.n()],
        bridges: Vec::new(),
        edge_stack: Vec::new(),
        blocks: Vec::new(),
    };
    for v in 0..g.n() {
        if st.tin[v] == usize::MAX {
            dfs_low(g, v, None, &mut st);
        }
    }
    st
}

pub fn articulation_points(g: &Graph) -> Vec<NodeId> {
    let st = run_dfs_low(g);
    (0..g.n()).filter(|&v| st.is_cut[v]).collect()
}

pub fn bridges(g: &Graph) -> Vec<usize> {
    let mut b = run_dfs_low(g).bridges;
    b.sort_unstable();
    b
}

/// k=2 only. Node mode: n >= 3, connected, no cut vertex. Edge mode: n >= 2,
/// connected, no bridge.
pub fn is_two_connected(g: &Graph, mode: ConnMode) -> bool {
    if !g.is_connected() {
        return false;
    }
    match mode {
        ConnMode::Node => g.n() >= 3 && articulation_points(g).is_empty(),
        ConnMode::Edge => g.n() >= 2 && bridges(g).is_empty(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BctNode {
    Block(usize),
    Cut(NodeId),
}

/// Block-cut tree of a connected graph. Tree node ids: blocks first (in DFS
/// discovery order), then cut vertices (ascending).
#[derive(Debug, Clone)]
pub struct BlockCutTree {
    pub tree: Tree,
    /// Node sets of the biconnected components.
    pub blocks: Vec<Vec<NodeId>>,
    pub cut_vertices: Vec<NodeId>,
    pub node_desc: Vec<BctNode>,
}

pub fn block_cut_tree(g: &Graph) -> Result<BlockCutTree> {
    if !g.is_connected() || g.n() == 0 {
        return Err(Error::NotConnected);
    }
    if g.n() == 1 {
        let tree = Tree::new(Graph::unit(1, &[])?)?;
        return Ok(BlockCutTree {
            tree,
            blocks: vec![vec![0]],
            cut_vertices: Vec::new(),
            node_desc: vec![BctNode::Block(0)],
        });
    }
    let st = run_dfs_low(g);
    let mut blocks: Vec<Vec<NodeId>> = Vec::with_capacity(st.blocks.len());
    for edge_block in &st.blocks {
        let mut nodes: Vec<NodeId> = edge_block
            .iter()
            .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        blocks.push(nodes);
    }
    let cut_vertices: Vec<NodeId> = (0..g.n()).filter(|&v| st.is_cut[v]).collect();
    let cut_index = |v: NodeId| cut_vertices.binary_search(&v).unwrap();
    let b = blocks.len();
    let mut pairs = Vec::new();
    for (bi, nodes) in blocks.iter().enumerate() {
        for &v in nodes {
            if st.is_cut[v] {
                pairs.push((bi, b + cut_index(v)));
            }
        }
    }
    let tree = Tree::new(Graph::unit(b + cut_vertices.len(), &pairs)?)?;
    let mut node_desc: Vec<BctNode> = (0..b).map(BctNode::Block).collect();
    node_desc.extend(cut_vertices.iter().map(|&v| BctNode::Cut(v)));
    Ok(BlockCutTree {
        tree,
        blocks,
        cut_vertices,
        node_desc,
    })
}
