//! Greatest fuzzy bisimulation (Gödel semantics) as a compact fuzzy
//! partition.
//!
//! The efficient strategy works level by level. Let `d1 < d2 < … < dk = 1`
//! be the positive degrees occurring in the graph together with 1. The pairs
//! with `Z(x, x') >= d` form a crisp equivalence, and it is the coarsest one
//! finer than the equivalence for the previous level in which related
//! vertices have equal labels once every value `>= d` is rounded up to 1,
//! and agree, for each edge label and block, on whether their best edge into
//! the block reaches `d`. Going from one level to the next only records with
//! a maximum exactly at the previous level change their verdict, so those
//! edges and labels seed the split, and refinement continues from there with
//! the constellations kept. Each split remembers the level at which it
//! happened; the tree of splits then folds into the compact partition.

use std::collections::HashMap;

use log::{debug, info};

use crate::crisp::Strategy;
use crate::degree::Degree;
use crate::graph::{model_to_flg, Flg};
use crate::model::Model;
use crate::oracle::gfp_fuzzy_bisim_flg;
use crate::partition::{cfp_from_relation, CfpTree, CompactFuzzyPartition};
use crate::refine::{Quantizer, Refiner};

#[derive(Debug, Clone, Copy, Default)]
pub struct FuzzyEngineConfig {
    pub strategy: Strategy,
    pub verbose: bool,
}

/// The compact fuzzy partition of `V` for the greatest fuzzy bisimulation.
pub fn greatest_fuzzy_bisim_cfp_flg(g: &Flg, cfg: &FuzzyEngineConfig) -> CompactFuzzyPartition {
    let b = match cfg.strategy {
        Strategy::Baseline => cfp_from_relation(&gfp_fuzzy_bisim_flg(g))
            .expect("the greatest fuzzy bisimulation is a fuzzy equivalence"),
        Strategy::Efficient => refine_fuzzy(g, cfg.verbose),
    };
    if cfg.verbose {
        info!("graph compact fuzzy partition: {}", b.to_text(g.vertex_names()));
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Lost {
    Label(u32),
    Edge(u32, u32),
}

fn cut_label(g: &Flg, x: usize, level: Degree) -> Vec<(u32, Degree)> {
    g.label(x)
        .iter()
        .map(|(p, v)| (p, if v >= level { Degree::ONE } else { v }))
        .collect()
}

fn refine_fuzzy(g: &Flg, verbose: bool) -> CompactFuzzyPartition {
    let n = g.vertex_count();
    let mut edges_by_degree: Vec<usize> = (0..g.edges().len()).collect();
    edges_by_degree.sort_by_key(|&e| g.edges()[e].degree);
    let mut labels_by_degree: Vec<(Degree, u32, u32)> = (0..n)
        .flat_map(|x| g.label(x).iter().map(move |(p, v)| (v, x as u32, p)))
        .collect();
    labels_by_degree.sort_unstable();

    let mut levels: Vec<Degree> = edges_by_degree
        .iter()
        .map(|&e| g.edges()[e].degree)
        .chain(labels_by_degree.iter().map(|l| l.0))
        .chain([Degree::ONE])
        .collect();
    levels.sort_unstable();
    levels.dedup();

    let mut rf = Refiner::new(g, Quantizer::AtLeast(levels[0]));
    let keyed = (0..n as u32)
        .map(|x| (x, (cut_label(g, x as usize, levels[0]), rf.signature_into_all(x as usize))))
        .collect();
    rf.split_by(keyed);
    rf.stabilize();
    let mut merges: Vec<(u32, u32, Degree)> =
        rf.take_splits().into_iter().map(|(new, old)| (new, old, Degree::ZERO)).collect();
    debug!("level {}: {} blocks", levels[0], rf.block_count());

    let (mut ei, mut li) = (0, 0);
    for w in levels.windows(2) {
        let (prev, level) = (w[0], w[1]);
        rf.set_quantizer(Quantizer::AtLeast(level));
        let mut lost: HashMap<u32, Vec<Lost>> = HashMap::new();
        while ei < edges_by_degree.len() && g.edges()[edges_by_degree[ei]].degree <= prev {
            let e = edges_by_degree[ei];
            let (label, max, cblock) = rf.edge_record(e);
            if max == prev {
                lost.entry(g.edges()[e].source).or_default().push(Lost::Edge(label, cblock));
            }
            ei += 1;
        }
        while li < labels_by_degree.len() && labels_by_degree[li].0 <= prev {
            let (_, x, p) = labels_by_degree[li];
            lost.entry(x).or_default().push(Lost::Label(p));
            li += 1;
        }
        let mut keyed: Vec<(u32, Vec<Lost>)> = lost
            .into_iter()
            .map(|(x, mut set)| {
                set.sort_unstable();
                set.dedup();
                (x, set)
            })
            .collect();
        keyed.sort_unstable_by_key(|(x, _)| *x);
        rf.split_by(keyed);
        rf.stabilize();
        merges.extend(rf.take_splits().into_iter().map(|(new, old)| (new, old, prev)));
        debug!("level {level}: {} blocks", rf.block_count());
    }
    if verbose {
        info!("{} levels, {} blocks, {} splitters", levels.len(), rf.block_count(), rf.splitter_count());
    }
    fold_splits(n, rf.blocks(), merges)
}

/// Builds the compact partition from the leaves and the split tree, joining
/// blocks in order of decreasing split level. Joins at the same level land in
/// the same fuzzy block.
fn fold_splits(universe: usize, leaves: Vec<Vec<usize>>, mut merges: Vec<(u32, u32, Degree)>) -> CompactFuzzyPartition {
    let mut trees: Vec<Option<CfpTree>> = leaves.into_iter().map(|b| Some(CfpTree::Crisp(b))).collect();
    let mut parent: Vec<usize> = (0..trees.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    merges.sort_by_key(|m| std::cmp::Reverse(m.2));
    for (a, b, z) in merges {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        let ta = trees[ra].take().expect("component root holds a tree");
        let tb = trees[rb].take().expect("component root holds a tree");
        let joined = match (ta, tb) {
            (CfpTree::Fuzzy(da, mut ca), CfpTree::Fuzzy(db, cb)) if da == z && db == z => {
                ca.extend(cb);
                CfpTree::Fuzzy(z, ca)
            }
            (CfpTree::Fuzzy(da, mut ca), other) | (other, CfpTree::Fuzzy(da, mut ca)) if da == z => {
                ca.push(other);
                CfpTree::Fuzzy(z, ca)
            }
            (ta, tb) => CfpTree::Fuzzy(z, vec![ta, tb]),
        };
        parent[rb] = ra;
        trees[ra] = Some(joined);
    }
    let root = trees.into_iter().flatten().next().expect("at least one block");
    CompactFuzzyPartition::from_tree(universe, root).expect("split tree folds into a well-formed partition")
}

/// Compact fuzzy partition of the states of `m` for its greatest fuzzy
/// bisimulation.
pub fn fuzzy_partition_system<M: Model + ?Sized>(m: &M, cfg: &FuzzyEngineConfig) -> CompactFuzzyPartition {
    let g = model_to_flg(m);
    let n = m.nfts().state_count();
    let b = greatest_fuzzy_bisim_cfp_flg(&g, cfg);
    if m.nfts().transitions().is_empty() {
        return b;
    }
    let mut kept: Vec<CfpTree> = b
        .subblocks(b.root())
        .iter()
        .filter(|&&c| b.any_element(c) < n)
        .map(|&c| b.subtree(c))
        .collect();
    let tree = if kept.len() == 1 { kept.pop().expect("one block") } else { CfpTree::Fuzzy(Degree::ZERO, kept) };
    CompactFuzzyPartition::from_tree(n, tree).expect("state blocks cover the states")
}
