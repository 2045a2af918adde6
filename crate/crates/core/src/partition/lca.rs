//! Lowest-common-ancestor queries over a compact fuzzy partition, by Euler
//! tour plus a sparse table of range minima on depth. `O(k log k)`
//! preprocessing for `k` tree nodes, `O(1)` per query.

use super::cfp::CompactFuzzyPartition;
use crate::degree::Degree;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LcaIndex {
    degrees: Vec<Degree>,
    leaf_of: Vec<usize>,
    first: Vec<usize>,
    depth: Vec<u32>,
    // euler tour of node ids
    tour: Vec<u32>,
    // table[k][i]: position in `tour` of the shallowest node in tour[i .. i + 2^k]
    table: Vec<Vec<u32>>,
}

impl LcaIndex {
    pub fn new(b: &CompactFuzzyPartition) -> Self {
        let k = b.node_count();
        let mut depth = vec![0u32; k];
        let mut first = vec![usize::MAX; k];
        let mut tour = Vec::with_capacity(2 * k);
        // iterative dfs: (node, next child index)
        let mut stack: Vec<(usize, usize)> = vec![(b.root(), 0)];
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next == 0 {
                first[node] = tour.len();
            }
            tour.push(node as u32);
            let kids = b.subblocks(node);
            if *next < kids.len() {
                let child = kids[*next];
                *next += 1;
                depth[child] = depth[node] + 1;
                stack.push((child, 0));
            } else {
                stack.pop();
            }
        }
        let len = tour.len();
        let mut table: Vec<Vec<u32>> = vec![(0..len as u32).collect()];
        let mut width = 1;
        while 2 * width <= len {
            let prev = table.last().expect("non-empty table");
            let mut row = Vec::with_capacity(len - 2 * width + 1);
            for i in 0..=len - 2 * width {
                let (a, c) = (prev[i], prev[i + width]);
                row.push(if depth[tour[a as usize] as usize] <= depth[tour[c as usize] as usize] { a } else { c });
            }
            table.push(row);
            width *= 2;
        }
        LcaIndex {
            degrees: b.nodes().iter().map(|n| n.degree).collect(),
            leaf_of: (0..b.universe()).map(|x| b.leaf_of(x)).collect(),
            first,
            depth,
            tour,
            table,
        }
    }

    /// Lowest common ancestor of two tree nodes.
    pub fn lca_node(&self, u: usize, v: usize) -> usize {
        let (mut i, mut j) = (self.first[u], self.first[v]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let span = j - i + 1;
        let level = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let a = self.table[level][i];
        let c = self.table[level][j + 1 - (1 << level)];
        let pick = if self.depth[self.tour[a as usize] as usize] <= self.depth[self.tour[c as usize] as usize] {
            a
        } else {
            c
        };
        self.tour[pick as usize] as usize
    }

    /// Degree to which `x` and `y` are related.
    pub fn degree(&self, x: usize, y: usize) -> Result<Degree> {
        let n = self.leaf_of.len();
        if x >= n || y >= n {
            return Err(Error::UnknownElement(format!("#{}", x.max(y))));
        }
        let (u, v) = (self.leaf_of[x], self.leaf_of[y]);
        if u == v {
            return Ok(Degree::ONE);
        }
        Ok(self.degrees[self.lca_node(u, v)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{cfp_to_relation, CfpTree};

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    #[test]
    fn agrees_with_relation_on_all_pairs() {
        let tree = CfpTree::Fuzzy(
            Degree::ZERO,
            vec![
                CfpTree::Fuzzy(d("0.4"), vec![CfpTree::Crisp(vec![0]), CfpTree::Crisp(vec![1, 4])]),
                CfpTree::Crisp(vec![2, 3]),
                CfpTree::Fuzzy(
                    d("0.2"),
                    vec![
                        CfpTree::Crisp(vec![5]),
                        CfpTree::Fuzzy(d("0.9"), vec![CfpTree::Crisp(vec![6]), CfpTree::Crisp(vec![7])]),
                    ],
                ),
            ],
        );
        let b = CompactFuzzyPartition::from_tree(8, tree).unwrap();
        let idx = LcaIndex::new(&b);
        let r = cfp_to_relation(&b);
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(idx.degree(x, y).unwrap(), r.get(x, y), "({x},{y})");
            }
        }
        assert_eq!(idx.degree(0, 4).unwrap(), d("0.4"));
        assert!(idx.degree(0, 8).is_err());
    }

    #[test]
    fn single_block() {
        let b = CompactFuzzyPartition::crisp(3);
        let idx = LcaIndex::new(&b);
        assert_eq!(idx.degree(0, 2).unwrap(), Degree::ONE);
    }
}
