//! Spanning-tree sampling and empirical stretch measurement.
//!
//! The pipelines only need a spanning tree T with a measured per-instance
//! stretch sigma = max_f c(T_f)/c(f); any sampler yields a correct (possibly
//! weaker) pipeline, so three simple samplers stand in for low-stretch
//! constructions and sigma is measured rather than guaranteed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{tree_path, Graph, NodeId, Tree};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    RandomWalkTree,
    PerturbedMst,
    BfsRandomRoot,
}

impl SampleMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SampleMethod::RandomWalkTree => "random_walk_tree",
            SampleMethod::PerturbedMst => "perturbed_mst",
            SampleMethod::BfsRandomRoot => "bfs_random_root",
        }
    }
}

impl std::str::FromStr for SampleMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<SampleMethod> {
        match s {
            "random_walk_tree" => Ok(SampleMethod::RandomWalkTree),
            "perturbed_mst" => Ok(SampleMethod::PerturbedMst),
            "bfs_random_root" => Ok(SampleMethod::BfsRandomRoot),
            other => Err(Error::BadParams(format!("unknown sampler method {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: SampleMethod,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> SamplerConfig {
        SamplerConfig {
            method: SampleMethod::PerturbedMst,
            samples: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeEmbedding {
    pub tree: Tree,
    /// c(T_f)/c(f) per edge id of the base graph; tree edges have stretch 1.
    pub per_edge_stretch: Vec<Rat>,
    pub sigma_max: Rat,
    pub sigma_avg: Rat,
    pub seed: Option<u64>,
    pub sample_index: Option<usize>,
    pub method: Option<SampleMethod>,
}

/// Deterministic per (config.seed, index).
pub fn sample_spanning_tree(g: &Graph, config: &SamplerConfig, index: usize) -> Result<Tree> {
    if g.n() == 0 {
        return Err(Error::EmptyTree);
    }
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0x100 + index as u64);
    let edge_ids = match config.method {
        SampleMethod::RandomWalkTree => wilson_ust(g, &mut rng),
        SampleMethod::PerturbedMst => perturbed_mst(g, &mut rng),
        SampleMethod::BfsRandomRoot => bfs_tree(g, rng.gen_range(0..g.n())),
    };
    Tree::new(g.edge_subgraph(&edge_ids))
}

/// Uniform spanning tree by Wilson's loop-erased random walks.
fn wilson_ust(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.n();
    let mut in_tree = vec![false; n];
    let mut next_edge = vec![usize::MAX; n];
    in_tree[0] = true;
    for start in 1..n {
        // random walk until the tree is hit, with loop erasure recorded in
        // next_edge, then commit the erased path
        let mut x = start;
        while !in_tree[x] {
            let (y, e) = g.adj(x)[rng.gen_range(0..g.degree(x))];
            next_edge[x] = e;
            x = y;
        }
        let mut x = start;
        while !in_tree[x] {
            in_tree[x] = true;
            x = g.edge(next_edge[x]).other(x);
        }
    }
    let mut edges: Vec<usize> = (1..n).map(|v| next_edge[v]).collect();
    edges.sort_unstable();
    edges
}

/// Kruskal on costs multiplied by an independent factor in [1,2).
fn perturbed_mst(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    const DENOM: i64 = 1 << 20;
    let mut keyed: Vec<(Rat, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let factor = Rat::one() + Rat::new(rng.gen_range(0..DENOM), DENOM);
            (e.cost * factor, e.id)
        })
        .collect();
    keyed.sort();
    let mut dsu: Vec<usize> = (0..g.n()).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            dsu[x] = find(dsu, dsu[x]);
        }
        dsu[x]
    }
    let mut chosen = Vec::with_capacity(g.n() - 1);
    for (_, id) in keyed {
        let e = g.edge(id);
        let (ru, rv) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
        if ru != rv {
            dsu[ru] = rv;
            chosen.push(id);
        }
    }
    chosen.sort_unstable();
    chosen
}

fn bfs_tree(g: &Graph, root: NodeId) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut edges = Vec::with_capacity(g.n() - 1);
    while let Some(x) = queue.pop_front() {
        for &(y, e) in g.adj(x) {
            if !seen[y] {
                seen[y] = true;
                edges.push(e);
                queue.push_back(y);
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Per-edge stretch c(T_f)/c(f) for every edge of g, with sigma_max/sigma_avg.
pub fn measure_stretch(g: &Graph, tree: &Tree) -> Result<TreeEmbedding> {
    if tree.n() != g.n() {
        return Err(Error::NotSpanning(format!(
            "tree has {} nodes, graph has {}",
            tree.n(),
            g.n()
        )));
    }
    for e in tree.edges() {
        match g.find_edge(e.u, e.v) {
            Some(id) if g.edge(id).cost == e.cost => {}
            Some(_) => {
                return Err(Error::NotSpanning(format!(
                    "tree edge ({},{}) cost differs from the graph's",
                    e.u, e.v
                )))
            }
            None => {
                return Err(Error::NotSpanning(format!(
                    "tree edge ({},{}) is not a graph edge",
                    e.u, e.v
                )))
            }
        }
    }
    let mut per_edge = Vec::with_capacity(g.m());
    for e in g.edges() {
        let path_cost: Rat = tree_path(tree, e.u, e.v)?
            .into_iter()
            .map(|te| tree.graph().edge(te).cost)
            .sum();
        let stretch = if e.cost.is_zero() {
            if path_cost.is_zero() {
                Rat::one()
            } else {
                return Err(Error::ZeroCostEdge(e.id));
            }
        } else {
            path_cost / e.cost
        };
        per_edge.push(stretch);
    }
    let sigma_max = per_edge.iter().copied().fold(Rat::one(), Rat::max);
    let sigma_avg = if per_edge.is_empty() {
        Rat::one()
    } else {
        per_edge.iter().copied().sum::<Rat>() / Rat::int(per_edge.len() as i64)
    };
    Ok(TreeEmbedding {
        tree: tree.clone(),
        per_edge_stretch: per_edge,
        sigma_max,
        sigma_avg,
        seed: None,
        sample_index: None,
        method: None,
    })
}

/// Samples `config.samples` trees and keeps the one minimizing sigma_max;
/// ties go to the lowest sample index.
pub fn best_embedding(g: &Graph, config: &SamplerConfig) -> Result<TreeEmbedding> {
    if config.samples == 0 {
        return Err(Error::BadParams("samples must be >= 1".into()));
    }
    let mut best: Option<TreeEmbedding> = None;
    for index in 0..config.samples {
        let tree = sample_spanning_tree(g, config, index)?;
        let mut emb = measure_stretch(g, &tree)?;
        emb.seed = Some(config.seed);
        emb.sample_index = Some(index);
        emb.method = Some(config.method);
        if best.as_ref().map_or(true, |b| emb.sigma_max < b.sigma_max) {
            best = Some(emb);
        }
    }
    Ok(best.expect("samples >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenSpec};

    fn all_methods() -> [SampleMethod; 3] {
        [
            SampleMethod::RandomWalkTree,
            SampleMethod::PerturbedMst,
            SampleMethod::BfsRandomRoot,
        ]
    }

    #[test]
    fn tree_input_returns_itself() {
        let g = generate(&GenSpec::RandomTree { n: 7 }, 11).unwrap();
        for method in all_methods() {
            let cfg = SamplerConfig {
                method,
                samples: 1,
                seed: 4,
            };
            let t = sample_spanning_tree(&g, &cfg, 0).unwrap();
            let mut got: Vec<_> = t.edges().iter().map(|e| (e.u, e.v)).collect();
            let mut want: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
            got.sort_unstable();
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn cycle_tree_is_a_path() {
        let g = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
        for method in all_methods() {
            let cfg = SamplerConfig {
                method,
                samples: 1,
                seed: 9,
            };
            let t = sample_spanning_tree(&g, &cfg, 0).unwrap();
            assert_eq!(t.edges().len(), 3);
            assert!((0..4).all(|v| t.graph().degree(v) <= 2));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = generate(&GenSpec::Gnp { n: 9, p: 0.5 }, 5).unwrap();
        assert!(g.is_connected());
        for method in all_methods() {
            let cfg = SamplerConfig {
                method,
                samples: 1,
                seed: 77,
            };
            let a = sample_spanning_tree(&g, &cfg, 3).unwrap();
            let b = sample_spanning_tree(&g, &cfg, 3).unwrap();
            let ea: Vec<_> = a.edges().iter().map(|e| (e.u, e.v)).collect();
            let eb: Vec<_> = b.edges().iter().map(|e| (e.u, e.v)).collect();
            assert_eq!(ea, eb);
        }
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::unit(4, &[(0, 1), (2, 3)]).unwrap();
        let cfg = SamplerConfig::default();
        assert!(matches!(
            sample_spanning_tree(&g, &cfg, 0),
            Err(Error::NotConnected)
        ));
    }

    #[test]
    fn triangle_stretch() {
        let g = generate(&GenSpec::Cycle { n: 3 }, 0).unwrap();
        let t = Tree::new(g.edge_subgraph(&[0, 1])).unwrap();
        let emb = measure_stretch(&g, &t).unwrap();
        assert_eq!(emb.sigma_max, Rat::int(2));
        assert_eq!(emb.per_edge_stretch[0], Rat::one());
        assert_eq!(emb.per_edge_stretch[1], Rat::one());
        assert_eq!(emb.per_edge_stretch[2], Rat::int(2));
    }

    #[test]
    fn cycle_stretch_is_n_minus_one() {
        for n in [4usize, 7, 16] {
            let g = generate(&GenSpec::Cycle { n }, 0).unwrap();
            for method in all_methods() {
                let cfg = SamplerConfig {
                    method,
                    samples: 2,
                    seed: 3,
                };
                let t = sample_spanning_tree(&g, &cfg, 0).unwrap();
                let emb = measure_stretch(&g, &t).unwrap();
                assert_eq!(emb.sigma_max, Rat::int(n as i64 - 1));
            }
        }
    }

    #[test]
    fn sigma_one_iff_tree() {
        let t = generate(&GenSpec::RandomTree { n: 8 }, 2).unwrap();
        let tree = Tree::new(t.clone()).unwrap();
        assert_eq!(measure_stretch(&t, &tree).unwrap().sigma_max, Rat::one());
    }

    #[test]
    fn best_of_c4_is_three_by_enumeration() {
        // all 4 spanning trees of C4 drop one edge; each leaves a 3-edge path
        let g = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
        for drop in 0..4 {
            let keep: Vec<_> = (0..4).filter(|&e| e != drop).collect();
            let t = Tree::new(g.edge_subgraph(&keep)).unwrap();
            assert_eq!(measure_stretch(&g, &t).unwrap().sigma_max, Rat::int(3));
        }
        let cfg = SamplerConfig {
            method: SampleMethod::RandomWalkTree,
            samples: 10,
            seed: 1,
        };
        assert_eq!(best_embedding(&g, &cfg).unwrap().sigma_max, Rat::int(3));
    }

    #[test]
    fn best_of_k_sigma_nonincreasing() {
        let g = generate(&GenSpec::Gnp { n: 10, p: 0.45 }, 8).unwrap();
        assert!(g.is_connected());
        let mut prev = None;
        for k in 1..=8 {
            let cfg = SamplerConfig {
                method: SampleMethod::RandomWalkTree,
                samples: k,
                seed: 21,
            };
            let sigma = best_embedding(&g, &cfg).unwrap().sigma_max;
            if let Some(p) = prev {
                assert!(sigma <= p);
            }
            prev = Some(sigma);
        }
    }

    #[test]
    fn nontree_stretch_at_least_one_on_unit_costs() {
        let g = generate(&GenSpec::Gnp { n: 9, p: 0.5 }, 13).unwrap();
        assert!(g.is_connected());
        let cfg = SamplerConfig::default();
        let emb = best_embedding(&g, &cfg).unwrap();
        assert!(emb.per_edge_stretch.iter().all(|s| *s >= Rat::one()));
        // equality with sigma_max for some edge
        assert!(emb.per_edge_stretch.contains(&emb.sigma_max));
    }
}
