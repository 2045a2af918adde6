//! Compact fuzzy partitions: the linear-size tree form of a fuzzy
//! equivalence relation under the Gödel t-norm.
//!
//! A crisp block is a leaf of degree 1 holding elements. A fuzzy block of
//! degree `d < 1` holds at least two subblocks of strictly larger degree, and
//! two elements in different subblocks are related to degree `d`. The degree
//! of a pair is therefore the degree of the lowest common ancestor of the
//! leaves holding them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lca::LcaIndex;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::relation::{relation_laws, FuzzyRelation};

/// Owned nested form of a compact fuzzy partition, used for construction,
/// comparison and serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CfpTree {
    Crisp(Vec<usize>),
    Fuzzy(Degree, Vec<CfpTree>),
}

impl CfpTree {
    pub fn degree(&self) -> Degree {
        match self {
            CfpTree::Crisp(_) => Degree::ONE,
            CfpTree::Fuzzy(d, _) => *d,
        }
    }

    pub fn least_element(&self) -> usize {
        match self {
            CfpTree::Crisp(xs) => xs.iter().copied().min().unwrap_or(usize::MAX),
            CfpTree::Fuzzy(_, kids) => kids.iter().map(CfpTree::least_element).min().unwrap_or(usize::MAX),
        }
    }

    fn canonicalize(&mut self) {
        match self {
            CfpTree::Crisp(xs) => xs.sort_unstable(),
            CfpTree::Fuzzy(_, kids) => {
                for k in kids.iter_mut() {
                    k.canonicalize();
                }
                kids.sort_by_key(CfpTree::least_element);
            }
        }
    }

    pub fn map_elements<F: Fn(usize) -> usize + Copy>(&self, f: F) -> CfpTree {
        match self {
            CfpTree::Crisp(xs) => CfpTree::Crisp(xs.iter().map(|&x| f(x)).collect()),
            CfpTree::Fuzzy(d, kids) => CfpTree::Fuzzy(*d, kids.iter().map(|k| k.map_elements(f)).collect()),
        }
    }

    pub fn any_element(&self) -> Option<usize> {
        match self {
            CfpTree::Crisp(xs) => xs.first().copied(),
            CfpTree::Fuzzy(_, kids) => kids.first().and_then(CfpTree::any_element),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeContent {
    Elements(Vec<usize>),
    Subblocks(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub degree: Degree,
    pub parent: Option<usize>,
    pub content: NodeContent,
}

/// Arena form with parent links. Nodes are stored in preorder of the
/// canonical tree (subblocks ordered by least element), so equal partitions
/// have equal arenas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompactFuzzyPartition {
    universe: usize,
    nodes: Vec<Node>,
    leaf_of: Vec<usize>,
}

impl CompactFuzzyPartition {
    /// Validates and canonicalizes `tree` as a partition of `0..universe`.
    pub fn from_tree(universe: usize, mut tree: CfpTree) -> Result<Self> {
        tree.canonicalize();
        let mut cfp = CompactFuzzyPartition { universe, nodes: Vec::new(), leaf_of: vec![usize::MAX; universe] };
        cfp.push(&tree, None)?;
        if let Some(x) = cfp.leaf_of.iter().position(|&l| l == usize::MAX) {
            return Err(Error::MalformedPartition(format!("element #{x} not covered")));
        }
        Ok(cfp)
    }

    fn push(&mut self, tree: &CfpTree, parent: Option<usize>) -> Result<usize> {
        let id = self.nodes.len();
        if let Some(p) = parent {
            if self.nodes[p].degree >= tree.degree() {
                return Err(Error::MalformedPartition(format!(
                    "degree {} below parent degree {}",
                    tree.degree(),
                    self.nodes[p].degree
                )));
            }
        }
        match tree {
            CfpTree::Crisp(xs) => {
                if xs.is_empty() {
                    return Err(Error::MalformedPartition("empty crisp block".into()));
                }
                for &x in xs {
                    if x >= self.universe {
                        return Err(Error::UnknownElement(format!("#{x}")));
                    }
                    if self.leaf_of[x] != usize::MAX {
                        return Err(Error::MalformedPartition(format!("element #{x} in two blocks")));
                    }
                    self.leaf_of[x] = id;
                }
                self.nodes.push(Node { degree: Degree::ONE, parent, content: NodeContent::Elements(xs.clone()) });
            }
            CfpTree::Fuzzy(d, kids) => {
                if d.is_one() {
                    return Err(Error::MalformedPartition("fuzzy block of degree 1".into()));
                }
                if kids.len() < 2 {
                    return Err(Error::MalformedPartition("fuzzy block with fewer than two subblocks".into()));
                }
                self.nodes.push(Node { degree: *d, parent, content: NodeContent::Subblocks(Vec::new()) });
                let mut children = Vec::with_capacity(kids.len());
                for k in kids {
                    children.push(self.push(k, Some(id))?);
                }
                self.nodes[id].content = NodeContent::Subblocks(children);
            }
        }
        Ok(id)
    }

    /// The single crisp block `X₁`.
    pub fn crisp(universe: usize) -> Self {
        Self::from_tree(universe, CfpTree::Crisp((0..universe).collect())).expect("valid crisp block")
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// The crisp block containing `x`.
    pub fn leaf_of(&self, x: usize) -> usize {
        self.leaf_of[x]
    }

    pub fn subblocks(&self, id: usize) -> &[usize] {
        match &self.nodes[id].content {
            NodeContent::Subblocks(k) => k,
            NodeContent::Elements(_) => &[],
        }
    }

    pub fn any_element(&self, id: usize) -> usize {
        match &self.nodes[id].content {
            NodeContent::Elements(xs) => xs[0],
            NodeContent::Subblocks(k) => self.any_element(k[0]),
        }
    }

    pub fn all_elements(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            match &self.nodes[n].content {
                NodeContent::Elements(xs) => out.extend_from_slice(xs),
                NodeContent::Subblocks(k) => stack.extend(k.iter().rev()),
            }
        }
        out
    }

    pub fn subtree(&self, id: usize) -> CfpTree {
        match &self.nodes[id].content {
            NodeContent::Elements(xs) => CfpTree::Crisp(xs.clone()),
            NodeContent::Subblocks(k) => {
                CfpTree::Fuzzy(self.nodes[id].degree, k.iter().map(|&c| self.subtree(c)).collect())
            }
        }
    }

    pub fn to_tree(&self) -> CfpTree {
        self.subtree(self.root())
    }

    /// Leaves' element sets, ordered by least element.
    pub fn crisp_blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = self
            .nodes
            .iter()
            .filter_map(|n| match &n.content {
                NodeContent::Elements(xs) => Some(xs.clone()),
                NodeContent::Subblocks(_) => None,
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    pub fn lca_index(&self) -> LcaIndex {
        LcaIndex::new(self)
    }

    /// `{{{s1}:1,{s2,s5}:1}:0.4,{s3,s4}:1}:0`.
    pub fn to_text<S: AsRef<str>>(&self, names: &[S]) -> String {
        let mut out = String::new();
        self.write_text(self.root(), names, &mut out);
        out
    }

    fn write_text<S: AsRef<str>>(&self, id: usize, names: &[S], out: &mut String) {
        out.push('{');
        match &self.nodes[id].content {
            NodeContent::Elements(xs) => {
                for (i, &x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(names[x].as_ref());
                }
            }
            NodeContent::Subblocks(kids) => {
                for (i, &k) in kids.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_text(k, names, out);
                }
            }
        }
        out.push_str("}:");
        out.push_str(&self.nodes[id].degree.to_string());
    }

    /// Parses the brace notation produced by [`CompactFuzzyPartition::to_text`].
    pub fn parse_text<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Self> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_ref(), i)).collect();
        let mut p = TextParser { src: text.as_bytes(), pos: 0, index: &index };
        let tree = p.block()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Self::from_tree(names.len(), tree)
    }

    pub fn to_json<S: AsRef<str>>(&self, names: &[S]) -> JsonBlock {
        self.json_node(self.root(), names)
    }

    fn json_node<S: AsRef<str>>(&self, id: usize, names: &[S]) -> JsonBlock {
        let node = &self.nodes[id];
        match &node.content {
            NodeContent::Elements(xs) => JsonBlock {
                degree: node.degree,
                elements: Some(xs.iter().map(|&x| names[x].as_ref().to_string()).collect()),
                subblocks: None,
            },
            NodeContent::Subblocks(kids) => JsonBlock {
                degree: node.degree,
                elements: None,
                subblocks: Some(kids.iter().map(|&k| self.json_node(k, names)).collect()),
            },
        }
    }

    pub fn from_json<S: AsRef<str>>(block: &JsonBlock, names: &[S]) -> Result<Self> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_ref(), i)).collect();
        fn convert(b: &JsonBlock, index: &HashMap<&str, usize>) -> Result<CfpTree> {
            match (&b.elements, &b.subblocks) {
                (Some(xs), None) => {
                    if !b.degree.is_one() {
                        return Err(Error::MalformedPartition("crisp block with degree below 1".into()));
                    }
                    let ids = xs
                        .iter()
                        .map(|x| index.get(x.as_str()).copied().ok_or_else(|| Error::UnknownElement(x.clone())))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(CfpTree::Crisp(ids))
                }
                (None, Some(kids)) => Ok(CfpTree::Fuzzy(
                    b.degree,
                    kids.iter().map(|k| convert(k, index)).collect::<Result<Vec<_>>>()?,
                )),
                _ => Err(Error::MalformedPartition("block needs exactly one of elements/subblocks".into())),
            }
        }
        Self::from_tree(names.len(), convert(block, &index)?)
    }
}

/// JSON tree form of a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonBlock {
    pub degree: Degree,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elements: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subblocks: Option<Vec<JsonBlock>>,
}

struct TextParser<'a> {
    src: &'a [u8],
    pos: usize,
    index: &'a HashMap<&'a str, usize>,
}

impl TextParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::MalformedPartition(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn token(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && !matches!(self.src[self.pos], b',' | b'{' | b'}' | b':')
            && !self.src[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn block(&mut self) -> Result<CfpTree> {
        self.expect(b'{')?;
        let tree = if self.peek() == Some(b'{') {
            let mut kids = vec![self.block()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                kids.push(self.block()?);
            }
            self.expect(b'}')?;
            self.expect(b':')?;
            let d = self.degree()?;
            CfpTree::Fuzzy(d, kids)
        } else {
            let mut xs = Vec::new();
            loop {
                let name = self.token().to_string();
                let id = match self.index.get(name.as_str()) {
                    Some(&id) => id,
                    None => return Err(Error::UnknownElement(name)),
                };
                xs.push(id);
                if self.peek() == Some(b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect(b'}')?;
            self.expect(b':')?;
            let d = self.degree()?;
            if !d.is_one() {
                return Err(self.error("crisp block must have degree 1"));
            }
            CfpTree::Crisp(xs)
        };
        Ok(tree)
    }

    fn degree(&mut self) -> Result<Degree> {
        let tok = self.token().to_string();
        tok.parse().map_err(|e| Error::Degree { context: "partition".into(), source: e })
    }
}

/// Builds the compact fuzzy partition of a fuzzy equivalence relation by the
/// recursive definition: at each level take the least degree `d` of the
/// current set, group by `r(x, x') > d`, recurse into the groups.
pub fn cfp_from_relation(r: &FuzzyRelation) -> Result<CompactFuzzyPartition> {
    let report = relation_laws(r);
    if let Some((law, witness)) = report.first_failure(|x| format!("#{x}")) {
        return Err(Error::NotEquivalence { law, witness });
    }
    let all: Vec<usize> = (0..r.rows()).collect();
    if all.is_empty() {
        return Err(Error::MalformedPartition("empty universe".into()));
    }
    CompactFuzzyPartition::from_tree(r.rows(), build_block(r, &all))
}

fn build_block(r: &FuzzyRelation, xs: &[usize]) -> CfpTree {
    let mut d = Degree::ONE;
    for &x in xs {
        for &y in xs {
            d = d.min(r.get(x, y));
        }
    }
    if d.is_one() {
        return CfpTree::Crisp(xs.to_vec());
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &x in xs {
        match groups.iter_mut().find(|g| r.get(g[0], x) > d) {
            Some(g) => g.push(x),
            None => groups.push(vec![x]),
        }
    }
    CfpTree::Fuzzy(d, groups.iter().map(|g| build_block(r, g)).collect())
}

/// `r(x, y)` = degree of the lowest common ancestor of the leaves of `x`, `y`.
pub fn cfp_to_relation(b: &CompactFuzzyPartition) -> FuzzyRelation {
    let n = b.universe();
    let mut r = FuzzyRelation::zeros(n, n);
    for node in b.nodes() {
        match &node.content {
            NodeContent::Elements(xs) => {
                for &x in xs {
                    for &y in xs {
                        r.set(x, y, Degree::ONE);
                    }
                }
            }
            NodeContent::Subblocks(kids) => {
                let members: Vec<Vec<usize>> = kids.iter().map(|&k| b.all_elements(k)).collect();
                for (i, a) in members.iter().enumerate() {
                    for (j, c) in members.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        for &x in a {
                            for &y in c {
                                r.set(x, y, node.degree);
                            }
                        }
                    }
                }
            }
        }
    }
    r
}

/// Degree of `(x, y)` via a one-off LCA index. Build a [`LcaIndex`] directly
/// when answering many queries.
pub fn degree_query(b: &CompactFuzzyPartition, x: usize, y: usize) -> Result<Degree> {
    b.lca_index().degree(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    fn table(rows: &[&[&str]]) -> FuzzyRelation {
        FuzzyRelation::from_fn(rows.len(), rows.len(), |x, y| d(rows[x][y]))
    }

    pub(crate) fn seven_by_seven() -> FuzzyRelation {
        table(&[
            &["1", "0.4", "0.4", "0.4", "0.1", "0.1", "0"],
            &["0.4", "1", "0.6", "0.6", "0.1", "0.1", "0"],
            &["0.4", "0.6", "1", "1", "0.1", "0.1", "0"],
            &["0.4", "0.6", "1", "1", "0.1", "0.1", "0"],
            &["0.1", "0.1", "0.1", "0.1", "1", "0.3", "0"],
            &["0.1", "0.1", "0.1", "0.1", "0.3", "1", "0"],
            &["0", "0", "0", "0", "0", "0", "1"],
        ])
    }

    const X: [&str; 7] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7"];

    #[test]
    fn seven_element_table() {
        let b = cfp_from_relation(&seven_by_seven()).unwrap();
        assert_eq!(
            b.to_text(&X),
            "{{{{x1}:1,{{x2}:1,{x3,x4}:1}:0.6}:0.4,{{x5}:1,{x6}:1}:0.3}:0.1,{x7}:1}:0"
        );
        assert_eq!(cfp_to_relation(&b), seven_by_seven());
        assert_eq!(degree_query(&b, 1, 3).unwrap(), d("0.6"));
        assert!(b.node_count() < 2 * 7);
    }

    #[test]
    fn all_ones_is_single_crisp_block() {
        let b = cfp_from_relation(&FuzzyRelation::ones(3, 3)).unwrap();
        assert_eq!(b.to_tree(), CfpTree::Crisp(vec![0, 1, 2]));
        assert_eq!(cfp_to_relation(&b), FuzzyRelation::ones(3, 3));
    }

    #[test]
    fn identity_is_discrete() {
        let b = cfp_from_relation(&FuzzyRelation::identity(2)).unwrap();
        assert_eq!(b.to_text(&["a", "b"]), "{{a}:1,{b}:1}:0");
    }

    #[test]
    fn rejects_non_equivalence() {
        let mut r = FuzzyRelation::identity(2);
        r.set(0, 1, d("0.5"));
        assert!(matches!(cfp_from_relation(&r), Err(Error::NotEquivalence { law: "symmetry", .. })));
    }

    #[test]
    fn text_and_json_round_trip() {
        let names = ["s1", "s2", "s3", "s4", "s5"];
        let text = "{{{s1}:1,{s2,s5}:1}:0.4,{s3,s4}:1}:0";
        let b = CompactFuzzyPartition::parse_text(text, &names).unwrap();
        assert_eq!(b.to_text(&names), text);
        let r = cfp_to_relation(&b);
        assert_eq!(r.get(0, 1), d("0.4"));
        assert_eq!(r.get(1, 4), Degree::ONE);
        assert_eq!(r.get(0, 2), Degree::ZERO);
        let json = serde_json::to_string(&b.to_json(&names)).unwrap();
        let back: JsonBlock = serde_json::from_str(&json).unwrap();
        assert_eq!(CompactFuzzyPartition::from_json(&back, &names).unwrap(), b);
        // subblocks given in another order canonicalize to the same tree
        let shuffled = "{{s4,s3}:1,{{s5,s2}:1,{s1}:1}:0.4}:0";
        assert_eq!(CompactFuzzyPartition::parse_text(shuffled, &names).unwrap(), b);
    }

    #[test]
    fn malformed_trees_rejected() {
        let names = ["a", "b", "c"];
        for bad in [
            "{{a}:1}:0.5,{b,c}:1",
            "{{a}:1,{b}:1}:0",
            "{{a,b}:1,{c}:0.5}:0",
            "{{a}:1,{{b}:1,{c}:1}:0.2}:0.3",
            "{{a}:1,{b,c}:1}:1",
            "{{a}:1,{b,a,c}:1}:0",
            "{{a}:1,{z}:1}:0",
        ] {
            assert!(CompactFuzzyPartition::parse_text(bad, &names).is_err(), "{bad}");
        }
    }

    #[test]
    fn any_and_all_elements() {
        let b = cfp_from_relation(&seven_by_seven()).unwrap();
        let root = b.root();
        let mut all = b.all_elements(root);
        all.sort();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
        assert_eq!(b.any_element(root), 0);
        assert_eq!(b.subblocks(root).len(), 2);
    }
}
