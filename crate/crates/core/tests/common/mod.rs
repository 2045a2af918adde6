#![allow(dead_code)]

use nfts_core::bench::{generate, GenSpec};
use nfts_core::partition::CfpTree;
use nfts_core::{Degree, Nflts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random small model: up to `max_states` states, one or two actions, up
/// to `max_values` distinct degrees and, for odd seeds, a couple of labels.
pub fn random_model(seed: u64, max_states: usize, max_values: usize) -> Nflts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let states = rng.gen_range(1..=max_states);
    let smax = rng.gen_range(0..=states.min(3));
    let labels = if seed % 2 == 1 { rng.gen_range(1..=2) } else { 0 };
    let spec = GenSpec {
        states,
        actions: rng.gen_range(1..=2),
        dists_per_pair: (rng.gen_range(0..=1), rng.gen_range(1..=2)),
        support: (rng.gen_range(0..=smax), smax),
        values: rng.gen_range(2..=max_values),
        labels,
        label_density: 0.4,
        seed,
    };
    generate(&spec).expect("feasible spec")
}

/// A random well-formed compact partition over `0..n`, with degrees in
/// tenths.
pub fn random_tree(seed: u64, n: usize) -> CfpTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        elems.swap(i, rng.gen_range(0..=i));
    }
    build(&mut rng, &elems, 0)
}

fn build(rng: &mut ChaCha8Rng, elems: &[usize], min_tenth: u64) -> CfpTree {
    if elems.len() == 1 || min_tenth > 9 || rng.gen_bool(0.3) {
        return CfpTree::Crisp(elems.to_vec());
    }
    let k = rng.gen_range(min_tenth..=9);
    let parts = rng.gen_range(2..=elems.len().min(4));
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, elems.len() - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut kids = Vec::new();
    let mut start = 0;
    for end in cuts.into_iter().chain([elems.len()]) {
        kids.push(build(rng, &elems[start..end], k + 1));
        start = end;
    }
    CfpTree::Fuzzy(Degree::from_decimal(k, 1).unwrap(), kids)
}

/// A random graph on up to `max_vertices` vertices with fuzzy labels over
/// `{p, q}` and edges over `{r, t}`.
pub fn random_flg(seed: u64, max_vertices: usize) -> nfts_core::Flg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf16);
    let n = rng.gen_range(1..=max_vertices);
    let pool = [0.2, 0.5, 0.7, 1.0].map(|v: f64| Degree::from_decimal((v * 10.0) as u64, 1).unwrap());
    let mut b = nfts_core::FlgBuilder::new(vec!["p".into(), "q".into()], vec!["r".into(), "t".into()]);
    for v in 0..n {
        let mut label = Vec::new();
        for p in 0..2u32 {
            if rng.gen_bool(0.3) {
                label.push((p, pool[rng.gen_range(0..pool.len())]));
            }
        }
        b.add_vertex(format!("v{v}"), nfts_core::FuzzySet::from_entries(label)).unwrap();
    }
    let edges = rng.gen_range(0..=2 * n);
    for _ in 0..edges {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        b.add_edge(x, rng.gen_range(0..2), y, pool[rng.gen_range(0..pool.len())]).unwrap();
    }
    b.build()
}

/// A second random model with at most `max_states` states over the same
/// actions and labels as `a`.
pub fn random_partner(a: &Nflts, seed: u64, max_states: usize) -> Nflts {
    (1u64..)
        .map(|k| random_model(seed.wrapping_add(2 * k), max_states, 5))
        .find_map(|b| b.realign(a.nfts().actions(), a.labels()).ok())
        .expect("some partner matches")
}
