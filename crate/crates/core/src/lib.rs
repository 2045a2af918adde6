//! Greatest crisp and fuzzy bisimulations of nondeterministic fuzzy
//! transition systems, computed through fuzzy labeled graphs.

pub mod bench;
pub mod crisp;
pub mod degree;
pub mod error;
pub mod fuzzy;
pub mod fuzzy_set;
pub mod io;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod relation;
pub mod sample;
pub mod simulation;

mod refine;

pub use degree::{biresiduum, godel_residuum, Degree, DegreePool, ParseDegreeError};
pub use crisp::{crisp_partition_system, greatest_crisp_bisim_partition_flg, CrispEngineConfig, Strategy};
pub use error::{Error, Result};
pub use fuzzy::{fuzzy_partition_system, greatest_fuzzy_bisim_cfp_flg, FuzzyEngineConfig};
pub use fuzzy_set::FuzzySet;
pub use graph::{model_to_flg, nflts_to_flg, nfts_to_flg, Edge, Flg, FlgBuilder, VertexId};
pub use model::{disjoint_union, ActionId, DistId, Injections, LabelId, Model, Nflts, Nfts, NftsBuilder, StateId, Transition};
pub use partition::{CompactFuzzyPartition, CrispPartition};
pub use simulation::{
    bisimulation_between_nflts, crisp_simulation_nflts, fuzzy_simulation_nflts, greatest_crisp_simulation_flg,
    greatest_fuzzy_simulation_flg, BetweenRelation, Mode,
};
pub use relation::{relation_laws, CrispRelation, FuzzyRelation, LawReport};
