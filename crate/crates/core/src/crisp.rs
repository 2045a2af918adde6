//! Greatest crisp bisimulation as a partition, for graphs and for systems.

use std::fmt;
use std::str::FromStr;

use log::info;

use crate::graph::{model_to_flg, Flg};
use crate::model::Model;
use crate::oracle::gfp_crisp_bisim_flg;
use crate::partition::CrispPartition;
use crate::refine::{Quantizer, Refiner};

/// Which implementation computes the greatest bisimulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// The definitional fixpoint from [`crate::oracle`].
    Baseline,
    /// Partition refinement.
    #[default]
    Efficient,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" | "oracle" => Ok(Strategy::Baseline),
            "efficient" => Ok(Strategy::Efficient),
            other => Err(format!("unknown strategy `{other}` (expected `efficient` or `oracle`)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Baseline => "oracle",
            Strategy::Efficient => "efficient",
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CrispEngineConfig {
    pub strategy: Strategy,
    pub verbose: bool,
}

/// The partition of `V` induced by the greatest crisp bisimulation of `g`.
pub fn greatest_crisp_bisim_partition_flg(g: &Flg, cfg: &CrispEngineConfig) -> CrispPartition {
    let p = match cfg.strategy {
        Strategy::Baseline => CrispPartition::from_equivalence(&gfp_crisp_bisim_flg(g))
            .expect("the greatest crisp bisimulation is an equivalence"),
        Strategy::Efficient => refine_crisp(g, cfg.verbose),
    };
    if cfg.verbose {
        info!("graph partition: {}", p.to_text(g.vertex_names()));
    }
    p
}

fn refine_crisp(g: &Flg, verbose: bool) -> CrispPartition {
    let mut rf = Refiner::new(g, Quantizer::Exact);
    let keyed = (0..g.vertex_count() as u32)
        .map(|x| (x, (g.label(x as usize).clone(), rf.signature_into_all(x as usize))))
        .collect();
    rf.split_by(keyed);
    if verbose {
        info!("initial partition: {} blocks", rf.block_count());
    }
    rf.stabilize();
    if verbose {
        info!("stable after {} splitters: {} blocks", rf.splitter_count(), rf.block_count());
    }
    CrispPartition::from_blocks_unchecked(g.vertex_count(), rf.blocks())
}

/// Partition of the states of `m` by its greatest crisp bisimulation: the
/// blocks of the graph partition that consist of states.
pub fn crisp_partition_system<M: Model + ?Sized>(m: &M, cfg: &CrispEngineConfig) -> CrispPartition {
    let g = model_to_flg(m);
    let n = m.nfts().state_count();
    greatest_crisp_bisim_partition_flg(&g, cfg).select_blocks(n, |x| x < n, |x| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Degree;
    use crate::fuzzy_set::FuzzySet;
    use crate::graph::{nfts_to_flg, FlgBuilder};
    use crate::model::{LabelId, Nflts, NftsBuilder};
    use crate::sample::example_nfts;

    fn both() -> [CrispEngineConfig; 2] {
        [
            CrispEngineConfig { strategy: Strategy::Baseline, verbose: false },
            CrispEngineConfig { strategy: Strategy::Efficient, verbose: false },
        ]
    }

    #[test]
    fn example_graph_partition() {
        let m = example_nfts();
        let g = nfts_to_flg(&m);
        for cfg in both() {
            let p = greatest_crisp_bisim_partition_flg(&g, &cfg);
            assert_eq!(p.to_text(g.vertex_names()), "{{s1},{s2,s5},{s3,s4},{µ1},{µ2},{µ3}}");
            assert_eq!(crisp_partition_system(&m, &cfg).to_text(m.states()), "{{s1},{s2,s5},{s3,s4}}");
        }
    }

    #[test]
    fn edgeless_uniform_graph_is_one_block() {
        let mut b = FlgBuilder::new(vec!["p".into()], vec!["r".into()]);
        for i in 0..4 {
            b.add_vertex(format!("v{i}"), FuzzySet::from_entries([(0u32, Degree::ONE)])).unwrap();
        }
        let g = b.build();
        for cfg in both() {
            assert_eq!(greatest_crisp_bisim_partition_flg(&g, &cfg).len(), 1);
        }
    }

    #[test]
    fn half_degree_loop_separates() {
        let mut b = FlgBuilder::new(vec![], vec!["r".into()]);
        b.add_vertex("x", FuzzySet::new()).unwrap();
        b.add_vertex("y", FuzzySet::new()).unwrap();
        b.add_edge(0, 0, 0, "0.5".parse().unwrap()).unwrap();
        let g = b.build();
        for cfg in both() {
            assert_eq!(greatest_crisp_bisim_partition_flg(&g, &cfg).len(), 2);
        }
    }

    #[test]
    fn empty_delta_is_one_block() {
        let mut b = NftsBuilder::new();
        for s in ["p", "q", "r"] {
            b.add_state(s).unwrap();
        }
        b.add_action("a").unwrap();
        let m = b.build().unwrap();
        for cfg in both() {
            assert_eq!(crisp_partition_system(&m, &cfg).len(), 1);
        }
    }

    #[test]
    fn label_splits_s2_and_s5() {
        let m = example_nfts();
        let s2 = m.state("s2").unwrap();
        let labeled = Nflts::new(m, vec!["p".into()], [(s2, FuzzySet::from_entries([(LabelId(0), Degree::ONE)]))]).unwrap();
        for cfg in both() {
            let p = crisp_partition_system(&labeled, &cfg);
            assert_eq!(p.to_text(labeled.nfts().states()), "{{s1},{s2},{s3,s4},{s5}}");
        }
    }
}
