use std::collections::BTreeSet;

use super::oracle::*;
use super::*;
use crate::generate::{generate, GenSpec};

fn path_tree(n: usize) -> Tree {
    let pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Tree::new(Graph::unit(n, &pairs).unwrap()).unwrap()
}

fn star_tree(leaves: usize) -> Tree {
    let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Tree::new(Graph::unit(leaves + 1, &pairs).unwrap()).unwrap()
}

fn cands(tree: &Tree, pairs: &[(usize, usize)]) -> EdgeSet {
    let raw: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, Rat::one())).collect();
    EdgeSet::new(tree, raw).unwrap().0
}

fn cands_costed(tree: &Tree, triples: &[(usize, usize, i64)]) -> EdgeSet {
    let raw: Vec<_> = triples
        .iter()
        .map(|&(u, v, c)| (u, v, Rat::int(c)))
        .collect();
    EdgeSet::new(tree, raw).unwrap().0
}

#[test]
fn lift_triangle() {
    // path a-b-c, F={ac} -> triangle, 2-connected
    let t = path_tree(3);
    let f = cands(&t, &[(0, 2)]);
    let lift = lift_solution(&t, f.members()).unwrap();
    assert_eq!(lift.nodes.len(), 3);
    assert_eq!(lift.graph.m(), 3);
    assert!(lift.tree_part_is_tree);
    assert!(is_two_connected(&lift.graph, ConnMode::Node));
}

#[test]
fn lift_four_cycle() {
    let t = path_tree(4);
    let f = cands(&t, &[(0, 3)]);
    let lift = lift_solution(&t, f.members()).unwrap();
    assert_eq!(lift.graph.m(), 4);
    assert!(is_two_connected(&lift.graph, ConnMode::Node));
}

#[test]
fn lift_star_chord() {
    // star leaves 1,2,3 center 0, F={(1,2)}: triangle on 1,0,2
    let t = star_tree(3);
    let f = cands(&t, &[(1, 2)]);
    let lift = lift_solution(&t, f.members()).unwrap();
    assert_eq!(lift.nodes, [0, 1, 2].into());
    assert_eq!(lift.graph.m(), 3);
    assert!(is_two_connected(&lift.graph, ConnMode::Node));
}

#[test]
fn lift_rejects_empty() {
    let t = path_tree(3);
    assert!(matches!(
        lift_solution(&t, &[]),
        Err(Error::EmptySolution)
    ));
}

#[test]
fn bta_path_chord() {
    let t = path_tree(3);
    let f = cands(&t, &[(0, 2)]);
    let r = solve_block_tree_aug(&t, &f, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::one());
    assert_eq!(r.chosen, vec![(0, 2)]);
    assert_eq!(r.exact_opt, Some(Rat::one()));
    assert_eq!(r.ratio, Some(Rat::one()));
}

#[test]
fn bta_star_needs_two_edges() {
    // star leaves 1,2,3: one chord never 2-connects, two always do
    let t = star_tree(3);
    let all = [(1, 2), (2, 3), (1, 3)];
    for single in &all {
        let f = cands(&t, &[*single]);
        let union = union_with_candidates(&t, f.members());
        assert!(!is_two_connected(&union, ConnMode::Node));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let f = cands(&t, &[all[i], all[j]]);
            let union = union_with_candidates(&t, f.members());
            assert!(is_two_connected(&union, ConnMode::Node));
        }
    }
    let f = cands(&t, &all);
    let r = solve_block_tree_aug(&t, &f, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::int(2));
    let oracle = oracle_block_tree_aug(&t, &f, 22).unwrap();
    assert_eq!(oracle.opt, Rat::int(2));
    assert_eq!(r.exact_opt, Some(Rat::int(2)));
}

#[test]
fn bta_path_long_chord() {
    let t = path_tree(4);
    let f = cands(&t, &[(0, 3)]);
    let r = solve_block_tree_aug(&t, &f, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.chosen, vec![(0, 3)]);
}

#[test]
fn bta_infeasible_reported() {
    let t = path_tree(4);
    let f = cands(&t, &[(0, 2)]);
    let r = solve_block_tree_aug(&t, &f, &SolveConfig::default()).unwrap();
    assert!(!r.feasible);
    assert!(r.note.is_some());
}

#[test]
fn taec_costed_examples() {
    // path a-b-c, E={ac cost 5} -> F={ac}, cost 5
    let t = path_tree(3);
    let f = cands_costed(&t, &[(0, 2, 5)]);
    let r = solve_tree_aug_ec(&t, &f, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::int(5));

    // a duplicate of a tree edge is filtered and changes nothing
    let (f2, warn) = EdgeSet::new(
        &t,
        vec![(0, 2, Rat::int(5)), (0, 1, Rat::int(1))],
    )
    .unwrap();
    assert_eq!(warn.len(), 1);
    let r2 = solve_tree_aug_ec(&t, &f2, &SolveConfig::default()).unwrap();
    assert_eq!(r2.cost, Rat::int(5));

    // path a-b-c-d: {ac,bd} cost 2 beats {ad} cost 3
    let t4 = path_tree(4);
    let f4 = cands_costed(&t4, &[(0, 2, 1), (1, 3, 1), (0, 3, 3)]);
    let r4 = solve_tree_aug_ec(&t4, &f4, &SolveConfig::default()).unwrap();
    assert!(r4.feasible);
    assert_eq!(r4.cost, Rat::int(2));
    assert_eq!(r4.chosen, vec![(0, 2), (1, 3)]);
    let oracle = oracle_tree_aug_ec(&t4, &f4, 22).unwrap();
    assert_eq!(oracle.opt, Rat::int(2));
}

#[test]
fn sscds_whole_tree_path() {
    // path a-b-c, E={ac}: T_ac covers the tree, dominates everything
    let t = path_tree(3);
    let f = cands(&t, &[(0, 2)]);
    let inst = build_sscds(&t, &f).unwrap();
    assert!(inst.groups_nonempty);
    assert!(inst.gst.groups.iter().all(|g| g == &BTreeSet::from([0])));
}

#[test]
fn sscds_disjoint_paths_no_conn_edge() {
    // path a-b-c-d-e, E={ac,ce}: T_ac={ab,bc}, T_ce={cd,de} share no edge
    let t = path_tree(5);
    let f = cands(&t, &[(0, 2), (2, 4)]);
    let inst = build_sscds(&t, &f).unwrap();
    assert_eq!(inst.gst.h.m(), 0);
    // with E={ac} only, node e has only tree neighbor d: not dominated by
    // V(T_ac)={a,b,c}
    let f1 = cands(&t, &[(0, 2)]);
    let inst1 = build_sscds(&t, &f1).unwrap();
    assert!(inst1.gst.groups[4].is_empty());
    assert!(!inst1.groups_nonempty);
    // but with the candidate ce present in G, e gains neighbor c and is
    // dominated by V(T_ac)
    assert!(inst.gst.groups[4].contains(&0));
}

#[test]
fn two_cds_c5_needs_all_five() {
    let g = generate(&GenSpec::Cycle { n: 5 }, 0).unwrap();
    let oracle = oracle_2cds(&g, 8).unwrap();
    assert_eq!(oracle.opt, Rat::int(5));
    // the pipeline needs a non-tree edge; C5 has exactly one per spanning
    // tree and it closes the cycle
    let cfg = SolveConfig::default();
    let r = solve_2cds(&g, &cfg).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::int(5));
    let lift = r.lift.unwrap();
    assert_eq!(lift.nodes.len(), 5);
}

#[test]
fn two_cds_k4_triangle() {
    let g = generate(&GenSpec::Complete { n: 4 }, 0).unwrap();
    let oracle = oracle_2cds(&g, 8).unwrap();
    assert_eq!(oracle.opt, Rat::int(3));
    assert_eq!(oracle.nodes.len(), 3);
    let r = solve_2cds(&g, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert!(r.cost >= oracle.opt);
}

#[test]
fn two_cds_output_always_verified() {
    for seed in 0..10 {
        let g = generate(&GenSpec::Gnp { n: 7, p: 0.55 }, seed).unwrap();
        if !g.is_connected() || g.n() < 3 {
            continue;
        }
        let cfg = SolveConfig {
            sampler: SamplerConfig {
                seed,
                ..SamplerConfig::default()
            },
            ..SolveConfig::default()
        };
        let r = solve_2cds(&g, &cfg).unwrap();
        if r.feasible {
            let lift = r.lift.as_ref().unwrap();
            let nodes: BTreeSet<NodeId> = lift.nodes.iter().copied().collect();
            assert!(dominates(&g, &nodes));
            assert!(lift.tree_part_is_tree);
            assert!(lift.bound_ok);
        }
    }
}

#[test]
fn quota_zero_is_empty() {
    let g = generate(&GenSpec::Cycle { n: 5 }, 0).unwrap();
    let r = solve_quota_family(
        &g,
        &QuotaFamilyMode::Quota { q: Rat::zero() },
        &SolveConfig::default(),
    )
    .unwrap();
    assert!(r.feasible);
    assert!(r.chosen.is_empty());
    assert_eq!(r.cost, Rat::zero());
}

#[test]
fn ksub_c5_whole_cycle() {
    let g = generate(&GenSpec::Cycle { n: 5 }, 0).unwrap();
    let r = solve_quota_family(
        &g,
        &QuotaFamilyMode::KSub { k: 5 },
        &SolveConfig::default(),
    )
    .unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::int(5));
    let oracle = oracle_subgraph(&g, SubgraphObjective::MinCostAtLeastK(5), 22).unwrap();
    assert_eq!(oracle.opt, Rat::int(5));
}

#[test]
fn budget_below_any_cycle_is_empty() {
    let g = generate(&GenSpec::Cycle { n: 5 }, 0).unwrap();
    // every non-tree edge costs 1; but the lift always costs >= 3 in
    // original costs, and ĉ(F) >= 1, so budget 0 affords nothing
    let r = solve_quota_family(
        &g,
        &QuotaFamilyMode::Budget { b: Rat::zero() },
        &SolveConfig::default(),
    )
    .unwrap();
    assert!(r.feasible);
    assert!(r.chosen.is_empty());
    assert_eq!(r.profit, Some(Rat::zero()));
}

#[test]
fn quota_pipeline_meets_target_and_accounting() {
    for seed in 0..8 {
        let g0 = generate(&GenSpec::Gnp { n: 7, p: 0.5 }, seed).unwrap();
        if !g0.is_connected() {
            continue;
        }
        let g = crate::generate::randomize_profits(&g0, 4, seed).unwrap();
        let q = Rat::int(5);
        let cfg = SolveConfig {
            sampler: SamplerConfig {
                seed,
                ..SamplerConfig::default()
            },
            ..SolveConfig::default()
        };
        let r = solve_quota_family(&g, &QuotaFamilyMode::Quota { q }, &cfg).unwrap();
        if r.feasible && !r.chosen.is_empty() {
            assert!(r.profit.unwrap() >= q);
            let lift = r.lift.as_ref().unwrap();
            assert!(lift.bound_ok, "seed {seed}: lift accounting violated");
            assert!(lift.tree_part_is_tree);
        }
    }
}

#[test]
fn crossing_aug_c4() {
    let c4 = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
    let fam = crate::crossing::family_from_cactus_two_cuts(&c4).unwrap();
    let e = [(0usize, 2usize), (1, 3)];
    let r = solve_crossing_aug(&fam, &e, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::int(2));
    assert_eq!(r.exact_opt, Some(Rat::int(2)));
}

#[test]
fn crossing_aug_single_pair_family() {
    use crate::crossing::{NodeMask, SetFamily};
    let fam = SetFamily::new(
        4,
        vec![NodeMask::from_nodes(&[0, 1]), NodeMask::from_nodes(&[2, 3])],
    )
    .unwrap();
    let e = [(1usize, 2usize), (0, 1)];
    let r = solve_crossing_aug(&fam, &e, &SolveConfig::default()).unwrap();
    assert!(r.feasible);
    assert_eq!(r.cost, Rat::one());
    assert_eq!(r.chosen, vec![(1, 2)]);
}

#[test]
fn crossing_aug_infeasible() {
    let c4 = generate(&GenSpec::Cycle { n: 4 }, 0).unwrap();
    let fam = crate::crossing::family_from_cactus_two_cuts(&c4).unwrap();
    let r = solve_crossing_aug(&fam, &[(0, 2)], &SolveConfig::default()).unwrap();
    assert!(!r.feasible);
}

/// Tree-edge-cut families reproduce the 2-edge-connectivity augmentation
/// answers on shared instances.
#[test]
fn cross_pipeline_tree_cuts_match_taec() {
    use crate::crossing::{NodeMask, SetFamily};
    for seed in 0..12 {
        let tg = generate(&GenSpec::RandomTree { n: 7 }, seed).unwrap();
        let tree = Tree::new(tg).unwrap();
        // random candidate pairs
        let mut rng_pairs = Vec::new();
        for u in 0..7usize {
            for v in u + 1..7 {
                if (u * 7 + v + seed as usize) % 3 == 0 {
                    rng_pairs.push((u, v));
                }
            }
        }
        let f = cands(&tree, &rng_pairs);
        if f.is_empty() {
            continue;
        }
        // family: both sides of every tree edge cut
        let mut members = Vec::new();
        for e in tree.edges() {
            let keep: Vec<usize> = (0..tree.n() - 1).filter(|&x| x != e.id).collect();
            let forest = tree.graph().edge_subgraph(&keep);
            let (comp, _) = forest.components();
            let side: Vec<NodeId> = (0..tree.n()).filter(|&v| comp[v] == comp[e.u]).collect();
            members.push(NodeMask::from_nodes(&side));
            members.push(NodeMask::from_nodes(&side).complement(tree.n()));
        }
        members.sort_unstable();
        members.dedup();
        let fam = SetFamily::new(tree.n(), members).unwrap();
        let flags = crate::crossing::validate_family(&fam);
        assert!(flags.symmetric && flags.crossing, "seed {seed}");

        let pairs: Vec<(NodeId, NodeId)> = f.members().iter().map(|c| (c.u, c.v)).collect();
        let cover_opt = crate::crossing::exact_min_cover(&fam, &pairs, 22);
        let aug_opt = oracle_tree_aug_ec(&tree, &f, 22);
        match (cover_opt, aug_opt) {
            (Ok(cover), Ok(aug)) => {
                assert_eq!(Rat::int(cover.len() as i64), aug.opt, "seed {seed}");
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
            (c, a) => panic!("seed {seed}: cover {c:?} aug {a:?}"),
        }
    }
}

/// For trees with leaf-leaf candidates only, the bundle family on the leaf
/// groundset reproduces the block-tree augmentation answers.
#[test]
fn cross_pipeline_leaf_bundles_match_bta() {
    use crate::crossing::{NodeMask, SetFamily};
    for seed in 0..15 {
        let tg = generate(&GenSpec::RandomTree { n: 7 }, seed + 100).unwrap();
        let tree = Tree::new(tg).unwrap();
        let leaves = tree.leaves();
        if leaves.len() < 3 {
            continue;
        }
        // candidates: all leaf pairs
        let mut pairs = Vec::new();
        for (i, &a) in leaves.iter().enumerate() {
            for &b in &leaves[i + 1..] {
                pairs.push((a, b));
            }
        }
        let f = cands(&tree, &pairs);
        // groundset = leaves, re-indexed densely
        let leaf_index: std::collections::BTreeMap<NodeId, usize> =
            leaves.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // members: leaf sets of x-bundles of internal nodes, plus edge cut
        // sides, all intersected with the leaf set
        let mut members = BTreeSet::new();
        for x in 0..tree.n() {
            if tree.is_leaf(x) {
                continue;
            }
            // components of T - x
            let keep: Vec<usize> = tree
                .edges()
                .iter()
                .filter(|e| !e.touches(x))
                .map(|e| e.id)
                .collect();
            let forest = tree.graph().edge_subgraph(&keep);
            let (comp, _) = forest.components();
            let branch_ids: BTreeSet<usize> = (0..tree.n())
                .filter(|&v| v != x)
                .map(|v| comp[v])
                .collect();
            let branches: Vec<Vec<NodeId>> = branch_ids
                .iter()
                .map(|&b| {
                    (0..tree.n())
                        .filter(|&v| v != x && comp[v] == b)
                        .collect()
                })
                .collect();
            // all proper nonempty unions of branches
            for mask in 1u64..(1 << branches.len()) - 1 {
                let mut leaf_nodes = Vec::new();
                for (bi, branch) in branches.iter().enumerate() {
                    if mask >> bi & 1 == 1 {
                        for &v in branch {
                            if let Some(&li) = leaf_index.get(&v) {
                                leaf_nodes.push(li);
                            }
                        }
                    }
                }
                if !leaf_nodes.is_empty() && leaf_nodes.len() < leaves.len() {
                    members.insert(NodeMask::from_nodes(&leaf_nodes));
                }
            }
        }
        for e in tree.edges() {
            let keep: Vec<usize> = (0..tree.n() - 1).filter(|&x| x != e.id).collect();
            let forest = tree.graph().edge_subgraph(&keep);
            let (comp, _) = forest.components();
            let leaf_nodes: Vec<usize> = leaves
                .iter()
                .filter(|&&v| comp[v] == comp[e.u])
                .map(|&v| leaf_index[&v])
                .collect();
            if !leaf_nodes.is_empty() && leaf_nodes.len() < leaves.len() {
                members.insert(NodeMask::from_nodes(&leaf_nodes));
                members.insert(NodeMask::from_nodes(&leaf_nodes).complement(leaves.len()));
            }
        }
        let fam = SetFamily::new(leaves.len(), members.into_iter().collect()).unwrap();
        let flags = crate::crossing::validate_family(&fam);
        assert!(
            flags.symmetric && flags.crossing,
            "seed {}: flags {:?}",
            seed,
            flags
        );

        // candidates re-indexed to the leaf groundset
        let fam_edges: Vec<(NodeId, NodeId)> = f
            .members()
            .iter()
            .map(|c| (leaf_index[&c.u], leaf_index[&c.v]))
            .collect();
        let cover_opt = crate::crossing::exact_min_cover(&fam, &fam_edges, 22);
        let aug_opt = oracle_block_tree_aug(&tree, &f, 22);
        match (cover_opt, aug_opt) {
            (Ok(cover), Ok(aug)) => {
                assert_eq!(Rat::int(cover.len() as i64), aug.opt, "seed {seed}");
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
            (c, a) => panic!("seed {seed}: cover {c:?} aug {a:?}"),
        }
    }
}

#[test]
fn oracle_star_bta() {
    let t = star_tree(3);
    let f = cands(&t, &[(1, 2), (2, 3), (1, 3)]);
    let r = oracle_block_tree_aug(&t, &f, 22).unwrap();
    assert_eq!(r.opt, Rat::int(2));
}

#[test]
fn oracle_leaf_lower_bound() {
    // unit block-tree augmentation: OPT >= ceil(L/2), L = leaf count
    for seed in 0..15 {
        let tg = generate(&GenSpec::RandomTree { n: 8 }, seed).unwrap();
        let tree = Tree::new(tg).unwrap();
        let mut pairs = Vec::new();
        for u in 0..8usize {
            for v in u + 1..8 {
                pairs.push((u, v));
            }
        }
        let f = cands(&tree, &pairs);
        let leaves = tree.leaves().len();
        let r = oracle_block_tree_aug(&tree, &f, 30).unwrap();
        let lower = Rat::int(((leaves + 1) / 2) as i64);
        assert!(r.opt >= lower, "seed {seed}: opt {} < {}", r.opt, lower);
    }
}
