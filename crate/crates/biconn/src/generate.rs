//! Deterministic instance generators: pure functions of (kind, params, seed).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    RandomTree { n: usize },
    Gnp { n: usize, p: f64 },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    RandomCactus { n: usize },
    Complete { n: usize },
}

impl GenSpec {
    fn stream_tag(&self) -> u64 {
        match self {
            GenSpec::RandomTree { .. } => 1,
            GenSpec::Gnp { .. } => 2,
            GenSpec::Cycle { .. } => 3,
            GenSpec::Grid { .. } => 4,
            GenSpec::RandomCactus { .. } => 5,
            GenSpec::Complete { .. } => 6,
        }
    }
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(spec.stream_tag());
    match *spec {
        GenSpec::RandomTree { n } => random_tree(n, &mut rng),
        GenSpec::Gnp { n, p } => gnp(n, p, &mut rng),
        GenSpec::Cycle { n } => cycle(n),
        GenSpec::Grid { rows, cols } => grid(rows, cols),
        GenSpec::RandomCactus { n } => random_cactus(n, &mut rng),
        GenSpec::Complete { n } => complete(n),
    }
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n == 0 {
        return Err(Error::BadParams("random_tree needs n >= 1".into()));
    }
    if n == 1 {
        return Graph::unit(1, &[]);
    }
    if n == 2 {
        return Graph::unit(2, &[(0, 1)]);
    }
    // uniform random tree via Pruefer sequence decoding
    let seq: Vec<NodeId> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut leaves: std::collections::BTreeSet<NodeId> =
        (0..n).filter(|&v| degree[v] == 1).collect();
    let mut pairs = Vec::with_capacity(n - 1);
    for &x in &seq {
        let leaf = *leaves.iter().next().expect("a leaf always remains");
        leaves.remove(&leaf);
        pairs.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let mut last = leaves.into_iter();
    let (a, b) = (last.next().unwrap(), last.next().unwrap());
    pairs.push((a, b));
    Graph::unit(n, &pairs)
}

fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n == 0 {
        return Err(Error::BadParams("gnp needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("gnp needs 0 <= p <= 1, got {p}")));
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Graph::unit(n, &pairs)
}

fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::BadParams("cycle needs n >= 3".into()));
    }
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::unit(n, &pairs)
}

fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadParams("grid needs rows, cols >= 1".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::unit(rows * cols, &pairs)
}

fn complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::BadParams("complete needs n >= 1".into()));
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    Graph::unit(n, &pairs)
}

/// Tree-of-cycles: starts from one cycle and repeatedly attaches a new cycle
/// through an existing node, so every edge ends up on exactly one simple
/// cycle. Simple graphs force every cycle length >= 3, hence n >= 3 and the
/// attachment never leaves exactly one node unplaced.
fn random_cactus(n: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n < 3 {
        return Err(Error::BadParams("random_cactus needs n >= 3".into()));
    }
    let pick_len = |remaining: usize, min_len: usize, rng: &mut ChaCha8Rng| -> usize {
        // choose how many new nodes this cycle consumes; never strand 1 node
        let choices: Vec<usize> = (min_len..=remaining)
            .filter(|&t| remaining - t != 1)
            .collect();
        choices[rng.gen_range(0..choices.len())]
    };
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let first = pick_len(n, 3, rng);
    for i in 0..first {
        pairs.push((i, (i + 1) % first));
    }
    let mut used = first;
    while used < n {
        let hub = rng.gen_range(0..used);
        let fresh = pick_len(n - used, 2, rng);
        // cycle hub -> used -> used+1 -> ... -> used+fresh-1 -> hub
        pairs.push((hub, used));
        for i in 0..fresh - 1 {
            pairs.push((used + i, used + i + 1));
        }
        pairs.push((used + fresh - 1, hub));
        used += fresh;
    }
    Graph::unit(n, &pairs)
}

/// Assign deterministic integer costs in [lo, hi] to every edge.
pub fn randomize_costs(g: &Graph, lo: u32, hi: u32, seed: u64) -> Result<Graph> {
    if lo > hi {
        return Err(Error::BadParams(format!("cost range {lo}..{hi} empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(7);
    let raw = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, Rat::int(rng.gen_range(lo..=hi) as i64)))
        .collect();
    let g2 = Graph::new(g.n(), raw)?;
    match g.profits() {
        Some(p) => g2.with_profits(p.to_vec()),
        None => Ok(g2),
    }
}

/// Assign deterministic integer profits in [0, hi] to every node.
pub fn randomize_profits(g: &Graph, hi: u32, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(8);
    let profits = (0..g.n())
        .map(|_| Rat::int(rng.gen_range(0..=hi) as i64))
        .collect();
    g.clone().with_profits(profits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeId;

    #[test]
    fn cycle_c4() {
        let g = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn determinism() {
        let a = generate(&GenSpec::RandomTree { n: 6 }, 1).unwrap();
        let b = generate(&GenSpec::RandomTree { n: 6 }, 1).unwrap();
        let ea: Vec<_> = a.edges().iter().map(|e| (e.u, e.v)).collect();
        let eb: Vec<_> = b.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(ea, eb);
        let c = generate(&GenSpec::RandomTree { n: 6 }, 2).unwrap();
        let ec: Vec<_> = c.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_ne!(ea, ec, "different seeds should give different trees");
    }

    #[test]
    fn random_tree_is_tree() {
        for seed in 0..20 {
            for n in 1..12 {
                let g = generate(&GenSpec::RandomTree { n }, seed).unwrap();
                assert_eq!(g.m(), n - 1);
                assert!(g.is_connected(), "n={n} seed={seed}");
            }
        }
    }

    /// Enumerates all simple cycles and counts per-edge membership.
    fn edge_cycle_counts(g: &Graph) -> Vec<usize> {
        let mut counts = vec![0usize; g.m()];
        let mut cycles: Vec<Vec<EdgeId>> = Vec::new();
        // simple cycle enumeration: DFS from each start, only visiting nodes
        // >= start to avoid duplicates; closing edge back to start
        fn dfs(
            g: &Graph,
            start: NodeId,
            x: NodeId,
            visited: &mut Vec<bool>,
            edge_trail: &mut Vec<EdgeId>,
            cycles: &mut Vec<Vec<EdgeId>>,
        ) {
            for &(y, e) in g.adj(x) {
                if y == start && edge_trail.len() >= 2 && *edge_trail.first().unwrap() < e {
                    let mut c = edge_trail.clone();
                    c.push(e);
                    cycles.push(c);
                } else if y > start && !visited[y] {
                    visited[y] = true;
                    edge_trail.push(e);
                    dfs(g, start, y, visited, edge_trail, cycles);
                    edge_trail.pop();
                    visited[y] = false;
                }
            }
        }
        for start in 0..g.n() {
            let mut visited = vec![false; g.n()];
            visited[start] = true;
            let mut trail = Vec::new();
            dfs(g, start, start, &mut visited, &mut trail, &mut cycles);
        }
        for c in cycles {
            for e in c {
                counts[e] += 1;
            }
        }
        counts
    }

    #[test]
    fn random_cactus_every_edge_on_exactly_one_cycle() {
        let g = generate(&GenSpec::RandomCactus { n: 7 }, 3).unwrap();
        assert!(g.is_connected());
        let counts = edge_cycle_counts(&g);
        assert!(counts.iter().all(|&c| c == 1), "counts={counts:?}");
        for seed in 0..10 {
            for n in [3, 4, 5, 6, 8, 10] {
                let g = generate(&GenSpec::RandomCactus { n }, seed).unwrap();
                assert!(edge_cycle_counts(&g).iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn bad_params() {
        assert!(matches!(
            generate(&GenSpec::Cycle { n: 2 }, 0),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            generate(&GenSpec::Gnp { n: 4, p: 1.5 }, 0),
            Err(Error::BadParams(_))
        ));
    }
}
