//! Crisp partitions and compact fuzzy partitions.

mod cfp;
mod lca;

pub use cfp::{cfp_from_relation, cfp_to_relation, degree_query, CfpTree, CompactFuzzyPartition, JsonBlock, Node, NodeContent};
pub use lca::LcaIndex;

use crate::error::{Error, Result};
use crate::relation::CrispRelation;

/// A partition of `0..universe` into non-empty blocks. Blocks are sorted
/// internally and ordered by their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrispPartition {
    universe: usize,
    blocks: Vec<Vec<usize>>,
}

impl CrispPartition {
    pub fn new(universe: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; universe];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::MalformedPartition("empty block".into()));
            }
            for &x in b {
                if x >= universe {
                    return Err(Error::UnknownElement(format!("#{x}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::MalformedPartition(format!("element #{x} in two blocks")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|&s| !s) {
            return Err(Error::MalformedPartition(format!("element #{x} not covered")));
        }
        Ok(Self::canonical(universe, blocks))
    }

    fn canonical(universe: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        CrispPartition { universe, blocks }
    }

    /// Caller guarantees the blocks partition `0..universe`.
    pub(crate) fn from_blocks_unchecked(universe: usize, blocks: Vec<Vec<usize>>) -> Self {
        Self::canonical(universe, blocks)
    }

    pub fn from_equivalence(r: &CrispRelation) -> Result<Self> {
        let classes = r.classes().ok_or_else(|| Error::NotEquivalence {
            law: "crisp equivalence",
            witness: "relation".into(),
        })?;
        Ok(Self::canonical(r.rows(), classes))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.universe];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                idx[x] = i;
            }
        }
        idx
    }

    pub fn to_relation(&self) -> CrispRelation {
        CrispRelation::from_blocks(self.universe, &self.blocks)
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &CrispPartition) -> bool {
        let idx = other.block_index();
        self.universe == other.universe
            && self.blocks.iter().all(|b| b.iter().all(|&x| idx[x] == idx[b[0]]))
    }

    /// Keeps the blocks whose least element satisfies `keep` and renumbers
    /// the surviving elements through `renumber`.
    pub fn select_blocks<K, F>(&self, universe: usize, keep: K, renumber: F) -> CrispPartition
    where
        K: Fn(usize) -> bool,
        F: Fn(usize) -> usize,
    {
        let blocks = self
            .blocks
            .iter()
            .filter(|b| keep(b[0]))
            .map(|b| b.iter().map(|&x| renumber(x)).collect())
            .collect();
        Self::canonical(universe, blocks)
    }

    /// `{{s1},{s2,s5},{s3,s4}}`.
    pub fn to_text<S: AsRef<str>>(&self, names: &[S]) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let members: Vec<&str> = b.iter().map(|&x| names[x].as_ref()).collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }

    pub fn to_named_blocks<S: AsRef<str>>(&self, names: &[S]) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&x| names[x].as_ref().to_string()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_text() {
        let p = CrispPartition::new(5, vec![vec![4, 1], vec![3, 2], vec![0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1, 4], vec![2, 3]]);
        let names = ["s1", "s2", "s3", "s4", "s5"];
        assert_eq!(p.to_text(&names), "{{s1},{s2,s5},{s3,s4}}");
        assert!(p.to_relation().is_equivalence());
        assert_eq!(CrispPartition::from_equivalence(&p.to_relation()).unwrap(), p);
    }

    #[test]
    fn rejects_non_partitions() {
        assert!(CrispPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(CrispPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(CrispPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn refinement_order() {
        let fine = CrispPartition::new(4, vec![vec![0], vec![1], vec![2, 3]]).unwrap();
        let coarse = CrispPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }
}
