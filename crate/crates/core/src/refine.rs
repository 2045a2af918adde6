//! Coarsest stable partition of a fuzzy labeled graph, Paige–Tarjan style.
//!
//! Two partitions are maintained: the fine partition of vertices into blocks
//! and a coarser partition of blocks into constellations. The fine partition
//! is kept stable with respect to every constellation: inside a block, all
//! vertices agree, for each edge label `r` and constellation `C`, on the
//! quantized maximum degree of their `r`-edges into `C`.
//!
//! Every edge points at a record keyed by (source, label, constellation of
//! the target) that counts the edge's degree. When a block `B` is carved out
//! of its constellation `C`, only the edges entering `B` are visited: they
//! move to fresh `(source, label, B)` records, and what stays behind in the
//! old record is exactly the multiset for `C \ B`. Because `B` is never the
//! largest block of `C`, each vertex is visited `O(log n)` times, and every
//! visit costs `O(log l)` in the ordered degree multiset.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::degree::Degree;
use crate::graph::Flg;

/// Per vertex: `(label, best degree into the splitter, best degree into the
/// rest)`, both quantized.
type Signature = Vec<(u32, Degree, Degree)>;

const NONE: u32 = u32::MAX;

/// How edge degrees are compared when deciding stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Quantizer {
    /// Degrees must match exactly.
    Exact,
    /// Only whether a degree reaches the threshold matters.
    AtLeast(Degree),
}

impl Quantizer {
    #[inline]
    fn apply(self, d: Degree) -> Degree {
        match self {
            Quantizer::Exact => d,
            Quantizer::AtLeast(t) if d >= t => Degree::ONE,
            Quantizer::AtLeast(_) => Degree::ZERO,
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    start: usize,
    end: usize,
    cblock: u32,
    pos_in_cblock: u32,
}

impl Block {
    fn len(&self) -> usize {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Default)]
struct Constellation {
    blocks: Vec<u32>,
    queued: bool,
}

#[derive(Debug, Clone)]
struct Record {
    source: u32,
    label: u32,
    cblock: u32,
    counts: BTreeMap<Degree, u32>,
}

impl Record {
    fn max(&self) -> Degree {
        self.counts.keys().next_back().copied().unwrap_or(Degree::ZERO)
    }
}

pub(crate) struct Refiner<'g> {
    g: &'g Flg,
    elems: Vec<u32>,
    pos: Vec<u32>,
    block_of: Vec<u32>,
    blocks: Vec<Block>,
    cblocks: Vec<Constellation>,
    work: Vec<u32>,
    edge_rec: Vec<u32>,
    records: Vec<Record>,
    rec_map: Vec<u32>,
    quant: Quantizer,
    splits: Vec<(u32, u32)>,
    splitters: usize,
}

impl<'g> Refiner<'g> {
    /// One block holding every vertex, one constellation holding that block.
    pub(crate) fn new(g: &'g Flg, quant: Quantizer) -> Self {
        let n = g.vertex_count();
        let mut edge_rec = vec![NONE; g.edges().len()];
        let mut records: Vec<Record> = Vec::new();
        for (i, e) in g.edges().iter().enumerate() {
            // edges are sorted by (source, label), so records of one
            // (source, label) pair are created consecutively
            let same = records.last().is_some_and(|r| r.source == e.source && r.label == e.label);
            if !same {
                records.push(Record { source: e.source, label: e.label, cblock: 0, counts: BTreeMap::new() });
            }
            let id = records.len() - 1;
            *records[id].counts.entry(e.degree).or_insert(0) += 1;
            edge_rec[i] = id as u32;
        }
        let rec_map = vec![NONE; records.len()];
        Refiner {
            g,
            elems: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            block_of: vec![0; n],
            blocks: vec![Block { start: 0, end: n, cblock: 0, pos_in_cblock: 0 }],
            cblocks: vec![Constellation { blocks: vec![0], queued: false }],
            work: Vec::new(),
            edge_rec,
            records,
            rec_map,
            quant,
            splits: Vec::new(),
            splitters: 0,
        }
    }

    pub(crate) fn set_quantizer(&mut self, quant: Quantizer) {
        self.quant = quant;
    }

    /// `(r, quantized max degree into V)` for every label `r` with a
    /// non-zero quantized value. Only meaningful before the first split of
    /// the initial constellation.
    pub(crate) fn signature_into_all(&self, x: usize) -> Vec<(u32, Degree)> {
        let mut out: Vec<(u32, Degree)> = Vec::new();
        let zero = self.quant.apply(Degree::ZERO);
        for e in self.g.out_edges(x) {
            let q = self.quant.apply(e.degree);
            match out.last_mut() {
                Some((r, best)) if *r == e.label => *best = (*best).max(q),
                _ => out.push((e.label, q)),
            }
        }
        out.retain(|&(_, q)| q != zero);
        out
    }

    pub(crate) fn edge_record(&self, edge: usize) -> (u32, Degree, u32) {
        let rec = &self.records[self.edge_rec[edge] as usize];
        (rec.label, rec.max(), rec.cblock)
    }

    pub(crate) fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub(crate) fn splitter_count(&self) -> usize {
        self.splitters
    }

    pub(crate) fn block_members(&self, b: usize) -> &[u32] {
        &self.elems[self.blocks[b].start..self.blocks[b].end]
    }

    /// `(new block, block it was carved from)` since the last call.
    pub(crate) fn take_splits(&mut self) -> Vec<(u32, u32)> {
        std::mem::take(&mut self.splits)
    }

    pub(crate) fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.blocks.len())
            .map(|b| self.block_members(b).iter().map(|&v| v as usize).collect())
            .collect()
    }

    /// Splits blocks so that two vertices stay together only if both carry
    /// the same key or both carry none.
    pub(crate) fn split_by<K: Hash + Eq>(&mut self, keyed: Vec<(u32, K)>) {
        type Groups<K> = (HashMap<K, usize>, Vec<Vec<u32>>);
        let mut order: Vec<u32> = Vec::new();
        let mut per_block: HashMap<u32, Groups<K>> = HashMap::new();
        for (v, key) in keyed {
            let b = self.block_of[v as usize];
            let (index, groups) = per_block.entry(b).or_insert_with(|| {
                order.push(b);
                (HashMap::new(), Vec::new())
            });
            let gi = *index.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[gi].push(v);
        }
        for b in order {
            let (_, mut groups) = per_block.remove(&b).expect("touched block");
            let covered: usize = groups.iter().map(Vec::len).sum();
            let rest = self.blocks[b as usize].len() - covered;
            if rest == 0 {
                if groups.len() == 1 {
                    continue;
                }
                let largest = (0..groups.len()).max_by_key(|&i| (groups[i].len(), std::cmp::Reverse(i))).unwrap_or(0);
                groups.swap_remove(largest);
            }
            for g in groups {
                self.carve(b, &g);
            }
        }
    }

    fn carve(&mut self, b: u32, members: &[u32]) {
        let bi = b as usize;
        let old_end = self.blocks[bi].end;
        for &v in members {
            let p = self.pos[v as usize] as usize;
            let last = self.blocks[bi].end - 1;
            let w = self.elems[last];
            self.elems.swap(p, last);
            self.pos[w as usize] = p as u32;
            self.pos[v as usize] = last as u32;
            self.blocks[bi].end -= 1;
        }
        let nb = self.blocks.len() as u32;
        let c = self.blocks[bi].cblock;
        let cb = &mut self.cblocks[c as usize];
        self.blocks.push(Block { start: self.blocks[bi].end, end: old_end, cblock: c, pos_in_cblock: cb.blocks.len() as u32 });
        cb.blocks.push(nb);
        for &v in members {
            self.block_of[v as usize] = nb;
        }
        if cb.blocks.len() >= 2 && !cb.queued {
            cb.queued = true;
            self.work.push(c);
        }
        self.splits.push((nb, b));
    }

    /// Refines until the blocks are stable with respect to single-block
    /// constellations.
    pub(crate) fn stabilize(&mut self) {
        while let Some(c) = self.work.pop() {
            let ci = c as usize;
            self.cblocks[ci].queued = false;
            if self.cblocks[ci].blocks.len() < 2 {
                continue;
            }
            let splitter = self.pick_splitter(ci);
            self.detach(splitter);
            if self.cblocks[ci].blocks.len() >= 2 {
                self.cblocks[ci].queued = true;
                self.work.push(c);
            }
            self.process_splitter(splitter);
        }
    }

    fn pick_splitter(&self, c: usize) -> u32 {
        let (b0, b1) = (self.cblocks[c].blocks[0], self.cblocks[c].blocks[1]);
        let (l0, l1) = (self.blocks[b0 as usize].len(), self.blocks[b1 as usize].len());
        if l0 != l1 {
            return if l0 < l1 { b0 } else { b1 };
        }
        let min0 = self.block_members(b0 as usize).iter().min();
        let min1 = self.block_members(b1 as usize).iter().min();
        if min0 <= min1 {
            b0
        } else {
            b1
        }
    }

    /// Moves block `b` out of its constellation into a new one of its own.
    fn detach(&mut self, b: u32) {
        let bi = b as usize;
        let c = self.blocks[bi].cblock as usize;
        let p = self.blocks[bi].pos_in_cblock as usize;
        let list = &mut self.cblocks[c].blocks;
        list.swap_remove(p);
        if p < list.len() {
            let moved = list[p];
            self.blocks[moved as usize].pos_in_cblock = p as u32;
        }
        let nc = self.cblocks.len() as u32;
        self.cblocks.push(Constellation { blocks: vec![b], queued: false });
        self.blocks[bi].cblock = nc;
        self.blocks[bi].pos_in_cblock = 0;
    }

    fn process_splitter(&mut self, b: u32) {
        self.splitters += 1;
        let g = self.g;
        let nc = self.blocks[b as usize].cblock;
        let mut touched: Vec<(u32, u32)> = Vec::new();
        let (start, end) = (self.blocks[b as usize].start, self.blocks[b as usize].end);
        for i in start..end {
            let y = self.elems[i] as usize;
            for &e in g.in_edge_ids(y) {
                let e = e as usize;
                let old = self.edge_rec[e];
                let mut new = self.rec_map[old as usize];
                if new == NONE {
                    let r = &self.records[old as usize];
                    let rec = Record { source: r.source, label: r.label, cblock: nc, counts: BTreeMap::new() };
                    new = self.records.len() as u32;
                    self.records.push(rec);
                    self.rec_map.push(NONE);
                    self.rec_map[old as usize] = new;
                    touched.push((old, new));
                }
                let degree = g.edges()[e].degree;
                let counts = &mut self.records[old as usize].counts;
                let slot = counts.get_mut(&degree).expect("edge counted in its record");
                *slot -= 1;
                if *slot == 0 {
                    counts.remove(&degree);
                }
                *self.records[new as usize].counts.entry(degree).or_insert(0) += 1;
                self.edge_rec[e] = new;
            }
        }

        let zero = self.quant.apply(Degree::ZERO);
        let mut sigs: HashMap<u32, Vec<(u32, Degree, Degree)>> = HashMap::new();
        for &(old, new) in &touched {
            self.rec_map[old as usize] = NONE;
            let into_b = self.quant.apply(self.records[new as usize].max());
            if into_b == zero {
                continue;
            }
            let rest = self.quant.apply(self.records[old as usize].max());
            let rec = &self.records[new as usize];
            sigs.entry(rec.source).or_default().push((rec.label, into_b, rest));
        }
        let mut keyed: Vec<(u32, Signature)> = sigs
            .into_iter()
            .map(|(x, mut sig)| {
                sig.sort_unstable();
                (x, sig)
            })
            .collect();
        keyed.sort_unstable_by_key(|(x, _)| *x);
        self.split_by(keyed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy_set::FuzzySet;
    use crate::graph::FlgBuilder;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    #[test]
    fn chain_splits_by_distance_to_end() {
        // 0 -> 1 -> 2 -> 3, all degree 1: every vertex is distinguishable
        let mut b = FlgBuilder::new(vec![], vec!["r".into()]);
        for i in 0..4 {
            b.add_vertex(format!("v{i}"), FuzzySet::new()).unwrap();
        }
        for i in 0..3 {
            b.add_edge(i, 0, i + 1, Degree::ONE).unwrap();
        }
        let g = b.build();
        let mut rf = Refiner::new(&g, Quantizer::Exact);
        let keyed = (0..4u32).map(|x| (x, rf.signature_into_all(x as usize))).collect();
        rf.split_by(keyed);
        rf.stabilize();
        assert_eq!(rf.block_count(), 4);
    }

    #[test]
    fn threshold_hides_weak_edges() {
        let mut b = FlgBuilder::new(vec![], vec!["r".into()]);
        for i in 0..2 {
            b.add_vertex(format!("v{i}"), FuzzySet::new()).unwrap();
        }
        b.add_edge(0, 0, 0, d("0.5")).unwrap();
        let g = b.build();
        let rf = Refiner::new(&g, Quantizer::AtLeast(d("0.6")));
        assert!(rf.signature_into_all(0).is_empty());
        let rf = Refiner::new(&g, Quantizer::Exact);
        assert_eq!(rf.signature_into_all(0), vec![(0, d("0.5"))]);
    }
}
