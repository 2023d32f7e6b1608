//! Crossing set families, the separability graph, the cover criterion, and
//! covering solvers backed by exhaustive scans over explicit families.
//!
//! Members are bitsets over a groundset of at most 64 nodes; all checks are
//! exhaustive pair scans, which is exactly what the equivalence suite needs.

use std::collections::{BTreeSet, VecDeque};

use crate::connectivity::bridges;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub const MAX_GROUNDSET: usize = 64;

/// Subset of a groundset of at most 64 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeMask(pub u64);

impl NodeMask {
    pub fn empty() -> NodeMask {
        NodeMask(0)
    }

    pub fn singleton(v: NodeId) -> NodeMask {
        NodeMask(1 << v)
    }

    pub fn from_nodes(nodes: &[NodeId]) -> NodeMask {
        NodeMask(nodes.iter().fold(0, |m, &v| m | (1 << v)))
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, o: NodeMask) -> NodeMask {
        NodeMask(self.0 | o.0)
    }

    pub fn inter(&self, o: NodeMask) -> NodeMask {
        NodeMask(self.0 & o.0)
    }

    pub fn minus(&self, o: NodeMask) -> NodeMask {
        NodeMask(self.0 & !o.0)
    }

    pub fn complement(&self, groundset: usize) -> NodeMask {
        let full = if groundset == 64 {
            u64::MAX
        } else {
            (1u64 << groundset) - 1
        };
        NodeMask(!self.0 & full)
    }

    pub fn is_subset(&self, o: NodeMask) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        (0..64).filter(|&v| self.contains(v)).collect()
    }
}

/// A on groundset V and B cross iff all four regions A∩B, A\B, B\A,
/// V\(A∪B) are non-empty.
pub fn sets_cross(a: NodeMask, b: NodeMask, groundset: usize) -> bool {
    !a.inter(b).is_empty()
        && !a.minus(b).is_empty()
        && !b.minus(a).is_empty()
        && !a.union(b).complement(groundset).is_empty()
}

/// Explicit set family: nonempty proper subsets, no duplicates, canonical
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    groundset: usize,
    members: Vec<NodeMask>,
}

impl SetFamily {
    pub fn new(groundset: usize, members: Vec<NodeMask>) -> Result<SetFamily> {
        if groundset == 0 || groundset > MAX_GROUNDSET {
            return Err(Error::BadParams(format!(
                "groundset size {groundset} outside 1..={MAX_GROUNDSET}"
            )));
        }
        let full = NodeMask::empty().complement(groundset);
        let mut sorted = members;
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::BadParams(format!(
                    "duplicate member {:?}",
                    pair[0].nodes()
                )));
            }
        }
        for &m in &sorted {
            if m.is_empty() || m == full || !m.is_subset(full) {
                return Err(Error::BadParams(format!(
                    "member {:?} is not a nonempty proper subset",
                    m.nodes()
                )));
            }
        }
        Ok(SetFamily {
            groundset,
            members: sorted,
        })
    }

    pub fn groundset(&self) -> usize {
        self.groundset
    }

    pub fn members(&self) -> &[NodeMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_member(&self, m: NodeMask) -> bool {
        self.members.binary_search(&m).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyFlags {
    pub crossing: bool,
    pub symmetric: bool,
    pub proper: bool,
}

/// Exhaustive pair checking of the crossing/symmetric/proper flags.
pub fn validate_family(fam: &SetFamily) -> FamilyFlags {
    let n = fam.groundset;
    let symmetric = fam
        .members
        .iter()
        .all(|m| fam.contains_member(m.complement(n)));
    let mut crossing = true;
    let mut proper = true;
    for (i, &a) in fam.members.iter().enumerate() {
        for &b in &fam.members[i + 1..] {
            if sets_cross(a, b, n) {
                if !fam.contains_member(a.inter(b)) || !fam.contains_member(a.union(b)) {
                    crossing = false;
                }
                let symdiff = a.minus(b).union(b.minus(a));
                if fam.contains_member(symdiff) {
                    proper = false;
                }
            }
        }
    }
    FamilyFlags {
        crossing,
        symmetric,
        proper,
    }
}

/// Inclusion-minimal members. For a validated symmetric crossing family the
/// cores must be pairwise disjoint; a violation is reported, never ignored.
pub fn cores(fam: &SetFamily) -> Result<Vec<NodeMask>> {
    let mut minimal: Vec<NodeMask> = fam
        .members
        .iter()
        .copied()
        .filter(|&m| {
            !fam.members
                .iter()
                .any(|&o| o != m && o.is_subset(m))
        })
        .collect();
    minimal.sort_unstable();
    let flags = validate_family(fam);
    if flags.symmetric && flags.crossing {
        for (i, &a) in minimal.iter().enumerate() {
            for &b in &minimal[i + 1..] {
                if !a.inter(b).is_empty() {
                    return Err(Error::InternalInvariant(format!(
                        "cores {:?} and {:?} of a symmetric crossing family intersect",
                        a.nodes(),
                        b.nodes()
                    )));
                }
            }
        }
    }
    Ok(minimal)
}

/// f covers A iff f has exactly one end in A.
pub fn edge_covers(f: (NodeId, NodeId), a: NodeMask) -> bool {
    a.contains(f.0) != a.contains(f.1)
}

/// True iff every member is covered; otherwise the first uncovered member is
/// the witness.
pub fn covers(j: &[(NodeId, NodeId)], fam: &SetFamily) -> (bool, Option<NodeMask>) {
    for &m in &fam.members {
        if !j.iter().any(|&f| edge_covers(f, m)) {
            return (false, Some(m));
        }
    }
    (true, None)
}

/// A separates f,g iff one of them has both ends in A and the other has no
/// end in A.
fn separates(a: NodeMask, f: (NodeId, NodeId), g: (NodeId, NodeId)) -> bool {
    let f_in = a.contains(f.0) && a.contains(f.1);
    let f_out = !a.contains(f.0) && !a.contains(f.1);
    let g_in = a.contains(g.0) && a.contains(g.1);
    let g_out = !a.contains(g.0) && !a.contains(g.1);
    (f_in && g_out) || (g_in && f_out)
}

pub fn separable(f: (NodeId, NodeId), g: (NodeId, NodeId), fam: &SetFamily) -> Result<bool> {
    if f == g || f == (g.1, g.0) {
        return Err(Error::InvalidPair(format!("f == g == ({},{})", f.0, f.1)));
    }
    Ok(fam.members.iter().any(|&a| separates(a, f, g)))
}

/// Query interface for implicit families: an uncovered member split by
/// (s,t), or none.
pub trait FamilyOracle {
    fn groundset(&self) -> usize;
    fn uncovered_split(
        &self,
        j: &[(NodeId, NodeId)],
        s: NodeId,
        t: NodeId,
    ) -> Option<NodeMask>;
    fn core_list(&self) -> Vec<NodeMask>;
}

impl FamilyOracle for SetFamily {
    fn groundset(&self) -> usize {
        self.groundset
    }

    fn uncovered_split(
        &self,
        j: &[(NodeId, NodeId)],
        s: NodeId,
        t: NodeId,
    ) -> Option<NodeMask> {
        self.members
            .iter()
            .copied()
            .find(|&a| a.contains(s) != a.contains(t) && !j.iter().any(|&f| edge_covers(f, a)))
    }

    fn core_list(&self) -> Vec<NodeMask> {
        cores(self).expect("explicit family cores")
    }
}

/// Separability test through the oracle interface: f,g are separable iff
/// some member uncovered by {f,g} splits an endpoint pair (s,t) of f x g.
pub fn separable_via_oracle(
    f: (NodeId, NodeId),
    g: (NodeId, NodeId),
    oracle: &dyn FamilyOracle,
) -> Result<bool> {
    if f == g || f == (g.1, g.0) {
        return Err(Error::InvalidPair(format!("f == g == ({},{})", f.0, f.1)));
    }
    let pair = [f, g];
    for s in [f.0, f.1] {
        for t in [g.0, g.1] {
            if s != t && oracle.uncovered_split(&pair, s, t).is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Nodes 0..cores.len() are the cores, then one node per edge of J.
#[derive(Debug, Clone)]
pub struct SeparabilityGraph {
    pub cores: Vec<NodeMask>,
    pub edges_j: Vec<(NodeId, NodeId)>,
    adj: Vec<BTreeSet<usize>>,
}

impl SeparabilityGraph {
    pub fn n(&self) -> usize {
        self.cores.len() + self.edges_j.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn cores_connected(&self) -> bool {
        let Some(first) = (0..self.cores.len()).next() else {
            return true;
        };
        let mut seen = vec![false; self.n()];
        seen[first] = true;
        let mut queue = VecDeque::from([first]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.cores.len()).all(|c| seen[c])
    }

    pub fn to_graph(&self) -> Graph {
        let mut pairs = Vec::new();
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                if i < j {
                    pairs.push((i, j));
                }
            }
        }
        Graph::unit(self.n(), &pairs).expect("separability adjacency is simple")
    }
}

fn build_sep_graph_inner(
    core_list: Vec<NodeMask>,
    j: &[(NodeId, NodeId)],
    mut inseparable: impl FnMut((NodeId, NodeId), (NodeId, NodeId)) -> Result<bool>,
) -> Result<SeparabilityGraph> {
    let nc = core_list.len();
    let mut adj = vec![BTreeSet::new(); nc + j.len()];
    for (ci, &c) in core_list.iter().enumerate() {
        for (fi, &f) in j.iter().enumerate() {
            if edge_covers(f, c) {
                adj[ci].insert(nc + fi);
                adj[nc + fi].insert(ci);
            }
        }
    }
    for fi in 0..j.len() {
        for gi in fi + 1..j.len() {
            if !inseparable(j[fi], j[gi])? {
                continue;
            }
            adj[nc + fi].insert(nc + gi);
            adj[nc + gi].insert(nc + fi);
        }
    }
    Ok(SeparabilityGraph {
        cores: core_list,
        edges_j: j.to_vec(),
        adj,
    })
}

/// The separability graph of (F, J): core-edge covering edges plus edge-edge
/// inseparability edges. Requires a validated symmetric crossing family.
pub fn build_separability_graph(
    fam: &SetFamily,
    j: &[(NodeId, NodeId)],
) -> Result<SeparabilityGraph> {
    let flags = validate_family(fam);
    if !flags.symmetric || !flags.crossing {
        return Err(Error::Unsupported(format!(
            "separability graph needs a symmetric crossing family (crossing={}, symmetric={})",
            flags.crossing, flags.symmetric
        )));
    }
    build_sep_graph_inner(cores(fam)?, j, |f, g| Ok(!separable(f, g, fam)?))
}

/// Oracle-backed construction for implicit families; `core_list` comes from
/// the oracle.
pub fn build_separability_graph_oracle(
    oracle: &dyn FamilyOracle,
    j: &[(NodeId, NodeId)],
) -> Result<SeparabilityGraph> {
    build_sep_graph_inner(oracle.core_list(), j, |f, g| {
        Ok(!separable_via_oracle(f, g, oracle)?)
    })
}

/// Construction requiring symmetry only. Only the one-way implication
/// (cores connected ⇒ covers) holds without the crossing property.
pub fn build_separability_graph_symmetric(
    fam: &SetFamily,
    j: &[(NodeId, NodeId)],
) -> Result<SeparabilityGraph> {
    if !validate_family(fam).symmetric {
        return Err(Error::Unsupported("family is not symmetric".into()));
    }
    build_sep_graph_inner(cores(fam)?, j, |f, g| Ok(!separable(f, g, fam)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverCheck {
    pub agree: bool,
    pub covers: bool,
    pub connected: bool,
}

/// J covers F vs all cores in one component of the separability graph.
pub fn check_cover_criterion(fam: &SetFamily, j: &[(NodeId, NodeId)]) -> Result<CoverCheck> {
    let (cov, _) = covers(j, fam);
    let connected = build_separability_graph(fam, j)?.cores_connected();
    Ok(CoverCheck {
        agree: cov == connected,
        covers: cov,
        connected,
    })
}

/// Every edge on exactly one simple cycle: connected, bridgeless, and every
/// block is a cycle.
pub fn is_cactus(g: &Graph) -> bool {
    if g.n() == 0 || !g.is_connected() {
        return false;
    }
    if g.n() == 1 {
        return g.m() == 0;
    }
    if !bridges(g).is_empty() {
        return false;
    }
    match crate::connectivity::block_cut_tree(g) {
        Ok(bct) => bct.blocks.iter().all(|block| {
            let nodes: BTreeSet<NodeId> = block.iter().copied().collect();
            let edge_count = g
                .edges()
                .iter()
                .filter(|e| nodes.contains(&e.u) && nodes.contains(&e.v))
                .count();
            edge_count == nodes.len() && nodes.len() >= 3
        }),
        Err(_) => false,
    }
}

fn boundary_degree(g: &Graph, a: NodeMask) -> usize {
    g.edges()
        .iter()
        .filter(|e| a.contains(e.u) != a.contains(e.v))
        .count()
}

fn all_cut_sides_with_degree(g: &Graph, d: usize) -> Result<Vec<NodeMask>> {
    if g.n() > 16 {
        return Err(Error::CapExceeded(format!(
            "cut enumeration over 2^{} subsets refused (n <= 16)",
            g.n()
        )));
    }
    let full = (1u64 << g.n()) - 1;
    let mut members = Vec::new();
    for mask in 1..full {
        if boundary_degree(g, NodeMask(mask)) == d {
            members.push(NodeMask(mask));
        }
    }
    Ok(members)
}

/// All sets with exactly two crossing cactus edges; symmetric by
/// construction since d(A) = d(V\A).
pub fn family_from_cactus_two_cuts(g: &Graph) -> Result<SetFamily> {
    if !is_cactus(g) {
        return Err(Error::NotACactus(
            "input is not a tree-of-cycles".into(),
        ));
    }
    SetFamily::new(g.n(), all_cut_sides_with_degree(g, 2)?)
}

/// All sides of minimum edge cuts; cap guards the 2^n enumeration.
pub fn family_from_min_edge_cuts(g: &Graph, cap_n: usize) -> Result<SetFamily> {
    if g.n() > cap_n {
        return Err(Error::CapExceeded(format!(
            "min cut enumeration needs n <= {cap_n}, got {}",
            g.n()
        )));
    }
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let lambda = (1..(1u64 << g.n()) - 1)
        .map(|mask| boundary_degree(g, NodeMask(mask)))
        .min()
        .expect("nonempty proper subsets exist");
    SetFamily::new(g.n(), all_cut_sides_with_degree(g, lambda)?)
}

/// Minimum-size cover by subset enumeration in increasing size.
pub fn exact_min_cover(
    fam: &SetFamily,
    e: &[(NodeId, NodeId)],
    cap: usize,
) -> Result<Vec<(NodeId, NodeId)>> {
    if e.len() > cap.min(60) {
        return Err(Error::CapExceeded(format!(
            "{} candidate edges exceeds cap {}",
            e.len(),
            cap.min(60)
        )));
    }
    if fam.is_empty() {
        return Ok(Vec::new());
    }
    let (full_cover, _) = covers(e, fam);
    if !full_cover {
        return Err(Error::Infeasible("E itself does not cover the family".into()));
    }
    // member -> bitmask of covering edges; minimize (popcount, mask) over
    // all edge subsets
    let needs: Vec<u64> = fam
        .members
        .iter()
        .map(|&m| {
            e.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &f)| {
                    if edge_covers(f, m) {
                        acc | (1 << i)
                    } else {
                        acc
                    }
                })
        })
        .collect();
    let mut best: Option<(u32, u64)> = None;
    for mask in 0..(1u64 << e.len()) {
        if let Some((bp, bm)) = best {
            if (mask.count_ones(), mask) >= (bp, bm) {
                continue;
            }
        }
        if needs.iter().all(|&need| need & mask != 0) {
            best = Some((mask.count_ones(), mask));
        }
    }
    let (_, mask) = best.expect("E covers the family, so the full mask is feasible");
    Ok((0..e.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| e[i])
        .collect())
}
