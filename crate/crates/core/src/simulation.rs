//! Greatest crisp and fuzzy simulations between two graphs or two labeled
//! systems, and bisimulations between two systems.

use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::crisp::{crisp_partition_system, CrispEngineConfig, Strategy};
use crate::degree::{godel_residuum, join, meet, Degree};
use crate::error::Result;
use crate::fuzzy::{fuzzy_partition_system, FuzzyEngineConfig};
use crate::graph::{nflts_to_flg, Flg};
use crate::model::{disjoint_union, Nflts};
use crate::relation::{CrispRelation, FuzzyRelation};

/// Greatest crisp simulation between `g` and `h`.
///
/// Each pair `(x, x')` keeps, for every edge `e` leaving `x`, the number of
/// edges of `x'` that still match `e`. Removing a pair decrements the
/// counters of the pairs of its predecessors; a counter reaching zero removes
/// that pair in turn.
pub fn greatest_crisp_simulation_flg(g: &Flg, h: &Flg) -> Result<CrispRelation> {
    g.same_signature(h)?;
    let (n, n2) = (g.vertex_count(), h.vertex_count());
    let mut z = CrispRelation::from_fn(n, n2, |x, y| g.label(x).is_subset_of(h.label(y)));
    let mut count = vec![0u32; g.edges().len() * n2];

    let mut work: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        for x2 in 0..n2 {
            if !z.contains(x, x2) {
                continue;
            }
            let mut dead = false;
            for ei in g.out_edge_range(x) {
                let e = &g.edges()[ei];
                let c = h
                    .out_edges(x2)
                    .iter()
                    .filter(|f| f.label == e.label && f.degree >= e.degree && z.contains(e.target as usize, f.target as usize))
                    .count();
                count[ei * n2 + x2] = c as u32;
                dead |= c == 0;
            }
            if dead {
                work.push((x, x2));
            }
        }
    }
    for &(x, x2) in &work {
        z.set(x, x2, false);
    }

    let mut removed = 0usize;
    while let Some((y, y2)) = work.pop() {
        removed += 1;
        for &ei in g.in_edge_ids(y) {
            let e = &g.edges()[ei as usize];
            let x = e.source as usize;
            for &fi in h.in_edge_ids(y2) {
                let f = &h.edges()[fi as usize];
                let x2 = f.source as usize;
                if f.label != e.label || f.degree < e.degree || !z.contains(x, x2) {
                    continue;
                }
                let slot = &mut count[ei as usize * n2 + x2];
                *slot -= 1;
                if *slot == 0 {
                    z.set(x, x2, false);
                    work.push((x, x2));
                }
            }
        }
    }
    debug!("crisp simulation: {removed} pairs removed, {} kept", z.len());
    Ok(z)
}

fn forward_bound(g: &Flg, h: &Flg, z: &FuzzyRelation, x: usize, x2: usize) -> Degree {
    meet(g.out_edges(x).iter().map(|e| {
        let best = join(
            h.out_edges(x2)
                .iter()
                .filter(|f| f.label == e.label)
                .map(|f| f.degree.min(z.get(e.target as usize, f.target as usize))),
        );
        godel_residuum(e.degree, best)
    }))
}

/// Greatest fuzzy simulation between `g` and `h` under Gödel semantics.
///
/// Chaotic iteration from the label bound: a pair is re-evaluated whenever
/// the degree of a pair of its successors drops.
pub fn greatest_fuzzy_simulation_flg(g: &Flg, h: &Flg) -> Result<FuzzyRelation> {
    g.same_signature(h)?;
    let (n, n2) = (g.vertex_count(), h.vertex_count());
    let mut z = FuzzyRelation::from_fn(n, n2, |x, y| {
        meet(g.label(x).iter().map(|(p, d)| godel_residuum(d, h.label(y).get(p))))
    });
    let mut queued = vec![false; n * n2];
    let mut work: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        for x2 in 0..n2 {
            let b = forward_bound(g, h, &z, x, x2);
            if b < z.get(x, x2) {
                z.set(x, x2, b);
                queued[x * n2 + x2] = true;
                work.push((x, x2));
            }
        }
    }
    let mut updates = 0usize;
    while let Some((y, y2)) = work.pop() {
        queued[y * n2 + y2] = false;
        for &ei in g.in_edge_ids(y) {
            let e = &g.edges()[ei as usize];
            for &fi in h.in_edge_ids(y2) {
                let f = &h.edges()[fi as usize];
                let (x, x2) = (e.source as usize, f.source as usize);
                if f.label != e.label || z.get(x, x2).is_zero() {
                    continue;
                }
                let b = forward_bound(g, h, &z, x, x2);
                if b < z.get(x, x2) {
                    z.set(x, x2, b);
                    updates += 1;
                    if !std::mem::replace(&mut queued[x * n2 + x2], true) {
                        work.push((x, x2));
                    }
                }
            }
        }
    }
    debug!("fuzzy simulation: {updates} propagated updates");
    Ok(z)
}

fn aligned_graphs(a: &Nflts, b: &Nflts) -> Result<(Flg, Flg)> {
    let b = b.realign(a.nfts().actions(), a.labels())?;
    Ok((nflts_to_flg(a), nflts_to_flg(&b)))
}

fn state_ranges(a: &Nflts, b: &Nflts) -> (Vec<usize>, Vec<usize>) {
    ((0..a.nfts().state_count()).collect(), (0..b.nfts().state_count()).collect())
}

/// Greatest crisp simulation between two labeled systems, on states.
pub fn crisp_simulation_nflts(a: &Nflts, b: &Nflts) -> Result<CrispRelation> {
    let (g, h) = aligned_graphs(a, b)?;
    let (rows, cols) = state_ranges(a, b);
    Ok(greatest_crisp_simulation_flg(&g, &h)?.restrict(&rows, &cols))
}

/// Greatest fuzzy simulation between two labeled systems, on states.
pub fn fuzzy_simulation_nflts(a: &Nflts, b: &Nflts) -> Result<FuzzyRelation> {
    let (g, h) = aligned_graphs(a, b)?;
    let (rows, cols) = state_ranges(a, b);
    Ok(greatest_fuzzy_simulation_flg(&g, &h)?.restrict(&rows, &cols))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Crisp,
    Fuzzy,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "crisp" => Ok(Mode::Crisp),
            "fuzzy" => Ok(Mode::Fuzzy),
            other => Err(format!("unknown mode `{other}` (expected `crisp` or `fuzzy`)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Crisp => "crisp",
            Mode::Fuzzy => "fuzzy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetweenRelation {
    Crisp(CrispRelation),
    Fuzzy(FuzzyRelation),
}

/// Greatest bisimulation between `a` and `b`, read off the greatest
/// bisimulation of their disjoint union.
pub fn bisimulation_between_nflts(a: &Nflts, b: &Nflts, mode: Mode, strategy: Strategy) -> Result<BetweenRelation> {
    let (union, inj) = disjoint_union(a, b)?;
    let (rows, cols) = (inj.left.len(), inj.right.len());
    Ok(match mode {
        Mode::Crisp => {
            let p = crisp_partition_system(&union, &CrispEngineConfig { strategy, verbose: false });
            let block = p.block_index();
            BetweenRelation::Crisp(CrispRelation::from_fn(rows, cols, |i, j| {
                block[inj.left[i].index()] == block[inj.right[j].index()]
            }))
        }
        Mode::Fuzzy => {
            let cfp = fuzzy_partition_system(&union, &FuzzyEngineConfig { strategy, verbose: false });
            let lca = cfp.lca_index();
            BetweenRelation::Fuzzy(FuzzyRelation::from_fn(rows, cols, |i, j| {
                lca.degree(inj.left[i].index(), inj.right[j].index()).expect("states of the union")
            }))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy_set::FuzzySet;
    use crate::graph::{nfts_to_flg, FlgBuilder};
    use crate::model::NftsBuilder;
    use crate::oracle::{gfp_crisp_sim_flg, gfp_fuzzy_sim_flg};
    use crate::sample::example_nfts;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    #[test]
    fn self_simulation_of_example() {
        let g = nfts_to_flg(&example_nfts());
        let z = greatest_crisp_simulation_flg(&g, &g).unwrap();
        assert!(CrispRelation::identity(g.vertex_count()).is_subset_of(&z));
        assert_eq!(z, gfp_crisp_sim_flg(&g, &g).unwrap());
        let fz = greatest_fuzzy_simulation_flg(&g, &g).unwrap();
        assert!((0..g.vertex_count()).all(|x| fz.get(x, x).is_one()));
        assert_eq!(fz, gfp_fuzzy_sim_flg(&g, &g).unwrap());
    }

    #[test]
    fn system_level_simulations() {
        let m: Nflts = example_nfts().into();
        let z = crisp_simulation_nflts(&m, &m).unwrap();
        assert!(z.contains(2, 3) && z.contains(3, 2));
        let fz = fuzzy_simulation_nflts(&m, &m).unwrap();
        assert!((0..5).all(|s| fz.get(s, s).is_one()));

        let mut b = NftsBuilder::new();
        b.add_state("t").unwrap();
        b.add_action("a").unwrap();
        b.add_action("b").unwrap();
        let idle: Nflts = b.build().unwrap().into();
        let z = crisp_simulation_nflts(&m, &idle).unwrap();
        assert!(!z.contains(0, 0));
        let z = crisp_simulation_nflts(&idle, &m).unwrap();
        assert_eq!(z, CrispRelation::full(1, 5));
    }

    #[test]
    fn chain_with_weaker_edge() {
        let chain = |deg: &str| {
            let mut b = FlgBuilder::new(vec![], vec!["r".into()]);
            b.add_vertex("x", FuzzySet::new()).unwrap();
            b.add_vertex("y", FuzzySet::new()).unwrap();
            b.add_edge(0, 0, 1, d(deg)).unwrap();
            b.build()
        };
        let z = greatest_crisp_simulation_flg(&chain("0.8"), &chain("0.5")).unwrap();
        assert!(!z.contains(0, 0) && z.contains(1, 1));
        let fz = greatest_fuzzy_simulation_flg(&chain("0.8"), &chain("0.5")).unwrap();
        assert_eq!(fz.get(0, 0), d("0.5"));
    }

    #[test]
    fn between_example_and_itself() {
        let m: Nflts = example_nfts().into();
        match bisimulation_between_nflts(&m, &m, Mode::Fuzzy, Strategy::Efficient).unwrap() {
            BetweenRelation::Fuzzy(r) => {
                assert_eq!(r.get(0, 1), d("0.4"));
                assert_eq!(r, crate::oracle::gfp_fuzzy_bisim_nfts(&m));
            }
            other => panic!("unexpected {other:?}"),
        }
        match bisimulation_between_nflts(&m, &m, Mode::Crisp, Strategy::Efficient).unwrap() {
            BetweenRelation::Crisp(r) => assert_eq!(r, crate::oracle::gfp_crisp_bisim_nfts(&m)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let m: Nflts = example_nfts().into();
        let mut b = NftsBuilder::new();
        b.add_state("t").unwrap();
        b.add_action("c").unwrap();
        let other: Nflts = b.build().unwrap().into();
        assert!(crisp_simulation_nflts(&m, &other).is_err());
        assert!(bisimulation_between_nflts(&m, &other, Mode::Crisp, Strategy::Efficient).is_err());
    }
}
