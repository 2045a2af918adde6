//! Brute-force evaluation of every lifting, bisimulation and simulation
//! definition. Nothing here is clever: each function is a direct reading of
//! the defining clauses, iterated to a fixpoint where a greatest relation is
//! wanted. Fixpoint sweeps visit pairs in lexicographic order.

use std::fmt;

use log::trace;

use crate::degree::{godel_residuum, join, meet, Degree};
use crate::error::Result;
use crate::fuzzy_set::FuzzySet;
use crate::graph::{nflts_to_flg, Flg};
use crate::model::{Model, Nflts, StateId, Transition};
use crate::relation::{CrispRelation, FuzzyRelation};

/// The first violated clause of a definition, with the offending tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: &'static str,
    pub witness: String,
}

/// Outcome of checking a relation against a definition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WitnessReport {
    pub violation: Option<Violation>,
}

impl WitnessReport {
    fn ok() -> Self {
        WitnessReport { violation: None }
    }

    fn fail(clause: &'static str, witness: String) -> Self {
        WitnessReport { violation: Some(Violation { clause, witness }) }
    }

    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "holds"),
            Some(v) => write!(f, "fails clause {} at {}", v.clause, v.witness),
        }
    }
}

type Dist = FuzzySet<StateId>;

/// `µ R† µ'`, decided by `µ(s) <= µ'(R→s)` and `µ'(s') <= µ(R←s')`.
pub fn lifted_crisp(r: &CrispRelation, mu: &Dist, nu: &Dist) -> bool {
    let forward = mu
        .iter()
        .all(|(s, d)| d <= nu.value_of_set(|t| r.contains(s.index(), t.index())));
    let backward = nu
        .iter()
        .all(|(t, d)| d <= mu.value_of_set(|s| r.contains(s.index(), t.index())));
    forward && backward
}

/// `R‡(µ, µ')` under Gödel semantics.
pub fn lifted_fuzzy(r: &FuzzyRelation, mu: &Dist, nu: &Dist) -> Degree {
    let forward = meet(mu.iter().map(|(s, d)| {
        godel_residuum(d, join(nu.iter().map(|(t, e)| r.get(s.index(), t.index()).min(e))))
    }));
    let backward = meet(nu.iter().map(|(t, e)| {
        godel_residuum(e, join(mu.iter().map(|(s, d)| r.get(s.index(), t.index()).min(d))))
    }));
    forward.min(backward)
}

/// Materializes `e(s, s') = min(µ(s), µ'(s'))` on `R`, zero elsewhere, and
/// checks that it satisfies the three conditions defining `µ R† µ'`.
pub fn lifting_witness_realizes(r: &CrispRelation, mu: &Dist, nu: &Dist) -> bool {
    let n = r.rows();
    let e = FuzzyRelation::from_fn(n, n, |s, t| {
        if r.contains(s, t) {
            mu.get(StateId::from(s)).min(nu.get(StateId::from(t)))
        } else {
            Degree::ZERO
        }
    });
    let rows = (0..n).all(|s| mu.get(StateId::from(s)) == join((0..n).map(|t| e.get(s, t))));
    let cols = (0..n).all(|t| nu.get(StateId::from(t)) == join((0..n).map(|s| e.get(s, t))));
    let inside = (0..n).all(|s| (0..n).all(|t| r.contains(s, t) || e.get(s, t).is_zero()));
    rows && cols && inside
}

fn label_value<M: Model + ?Sized>(m: &M, s: usize, p: usize) -> Degree {
    m.state_label(StateId::from(s)).get(crate::model::LabelId::from(p))
}

fn label_bound<M: Model + ?Sized>(m: &M, s: usize, t: usize) -> Degree {
    meet((0..m.label_alphabet().len()).map(|p| label_value(m, s, p).biresiduum(label_value(m, t, p))))
}

fn same_action<'a>(ts: &'a [Transition], t: &'a Transition) -> impl Iterator<Item = &'a Transition> {
    ts.iter().filter(move |u| u.action == t.action)
}

fn pair_name<M: Model + ?Sized>(m: &M, s: usize, t: usize) -> String {
    let n = m.nfts();
    format!("({}, {})", n.state_name(StateId::from(s)), n.state_name(StateId::from(t)))
}

fn crisp_pair_violation<M: Model + ?Sized>(r: &CrispRelation, m: &M, s: usize, t: usize) -> Option<(&'static str, String)> {
    let nfts = m.nfts();
    if m.state_label(StateId::from(s)) != m.state_label(StateId::from(t)) {
        return Some(("labels", pair_name(m, s, t)));
    }
    let (out_s, out_t) = (nfts.outgoing(StateId::from(s)), nfts.outgoing(StateId::from(t)));
    for tr in out_s {
        let mu = nfts.distribution(tr.target);
        if !same_action(out_t, tr).any(|u| lifted_crisp(r, mu, nfts.distribution(u.target))) {
            let witness = format!("{} via {} µ{}", pair_name(m, s, t), nfts.action_name(tr.action), tr.target.0 + 1);
            return Some(("(a)", witness));
        }
    }
    for tr in out_t {
        let nu = nfts.distribution(tr.target);
        if !same_action(out_s, tr).any(|u| lifted_crisp(r, nfts.distribution(u.target), nu)) {
            let witness = format!("{} via {} µ{}", pair_name(m, s, t), nfts.action_name(tr.action), tr.target.0 + 1);
            return Some(("(b)", witness));
        }
    }
    None
}

/// Checks that `r` is a crisp bisimulation of `m`. For labeled systems the
/// two related states must also carry equal labels.
pub fn is_crisp_bisim_nfts<M: Model + ?Sized>(r: &CrispRelation, m: &M) -> WitnessReport {
    for (s, t) in r.pairs() {
        if let Some((clause, witness)) = crisp_pair_violation(r, m, s, t) {
            return WitnessReport::fail(clause, witness);
        }
    }
    WitnessReport::ok()
}

/// The largest value `R(s, t)` may take given the rest of `r`.
fn fuzzy_pair_bound<M: Model + ?Sized>(r: &FuzzyRelation, m: &M, s: usize, t: usize) -> (Degree, &'static str) {
    let nfts = m.nfts();
    let (out_s, out_t) = (nfts.outgoing(StateId::from(s)), nfts.outgoing(StateId::from(t)));
    let labels = label_bound(m, s, t);
    let forward = meet(out_s.iter().map(|tr| {
        let mu = nfts.distribution(tr.target);
        join(same_action(out_t, tr).map(|u| lifted_fuzzy(r, mu, nfts.distribution(u.target))))
    }));
    let backward = meet(out_t.iter().map(|tr| {
        let nu = nfts.distribution(tr.target);
        join(same_action(out_s, tr).map(|u| lifted_fuzzy(r, nfts.distribution(u.target), nu)))
    }));
    if labels <= forward && labels <= backward {
        (labels, "labels")
    } else if forward <= backward {
        (forward, "(a)")
    } else {
        (backward, "(b)")
    }
}

/// Checks that `r` is a fuzzy bisimulation of `m`: every pair with a
/// positive degree is bounded by its matched lifted degrees and, for labeled
/// systems, by the biresiduum of the labels.
pub fn is_fuzzy_bisim_nfts<M: Model + ?Sized>(r: &FuzzyRelation, m: &M) -> WitnessReport {
    for (s, t, d) in r.entries() {
        let (bound, clause) = fuzzy_pair_bound(r, m, s, t);
        if d > bound {
            return WitnessReport::fail(clause, format!("{} degree {d} > {bound}", pair_name(m, s, t)));
        }
    }
    WitnessReport::ok()
}

/// Greatest crisp bisimulation, by deleting violating pairs from `S × S`
/// until none remain.
pub fn gfp_crisp_bisim_nfts<M: Model + ?Sized>(m: &M) -> CrispRelation {
    let n = m.nfts().state_count();
    let mut r = CrispRelation::full(n, n);
    let mut sweep = 0;
    loop {
        let mut changed = 0;
        for s in 0..n {
            for t in 0..n {
                if r.contains(s, t) && crisp_pair_violation(&r, m, s, t).is_some() {
                    r.set(s, t, false);
                    changed += 1;
                }
            }
        }
        sweep += 1;
        trace!("crisp oracle sweep {sweep}: removed {changed} pairs");
        if changed == 0 {
            return r;
        }
    }
}

/// Greatest fuzzy bisimulation, by lowering every degree to its bound,
/// starting from the all-ones relation, until nothing moves.
pub fn gfp_fuzzy_bisim_nfts<M: Model + ?Sized>(m: &M) -> FuzzyRelation {
    let n = m.nfts().state_count();
    let mut r = FuzzyRelation::ones(n, n);
    let mut sweep = 0;
    loop {
        let mut changed = 0;
        for s in 0..n {
            for t in 0..n {
                let current = r.get(s, t);
                if current.is_zero() {
                    continue;
                }
                let (bound, _) = fuzzy_pair_bound(&r, m, s, t);
                if bound < current {
                    r.set(s, t, bound);
                    changed += 1;
                }
            }
        }
        sweep += 1;
        trace!("fuzzy oracle sweep {sweep}: lowered {changed} degrees");
        if changed == 0 {
            return r;
        }
    }
}

fn vertex_pair(g: &Flg, h: &Flg, x: usize, y: usize) -> String {
    format!("({}, {})", g.vertex_name(x), h.vertex_name(y))
}

/// Some `r`-edge of `x'` in `h` matches the edge `e` of `g`: its degree is
/// at least as large and its target is related to `e`'s.
fn crisp_edge_matched<F: Fn(usize, usize) -> bool>(h: &Flg, x2: usize, e: &crate::graph::Edge, related: F) -> bool {
    h.out_edges(x2)
        .iter()
        .any(|f| f.label == e.label && f.degree >= e.degree && related(e.target as usize, f.target as usize))
}

fn crisp_forward_violation(g: &Flg, h: &Flg, z: &CrispRelation, x: usize, x2: usize) -> Option<String> {
    g.out_edges(x)
        .iter()
        .find(|e| !crisp_edge_matched(h, x2, e, |y, y2| z.contains(y, y2)))
        .map(|e| format!("{} edge {} to {}", vertex_pair(g, h, x, x2), g.edge_alphabet()[e.label as usize], g.vertex_name(e.target as usize)))
}

fn crisp_backward_violation(g: &Flg, z: &CrispRelation, x: usize, x2: usize) -> Option<String> {
    g.out_edges(x2)
        .iter()
        .find(|e| !crisp_edge_matched(g, x, e, |y2, y| z.contains(y, y2)))
        .map(|e| format!("{} edge {} to {}", vertex_pair(g, g, x, x2), g.edge_alphabet()[e.label as usize], g.vertex_name(e.target as usize)))
}

fn crisp_fixpoint<F: Fn(&CrispRelation, usize, usize) -> bool>(mut z: CrispRelation, violates: F) -> CrispRelation {
    loop {
        let mut changed = false;
        for x in 0..z.rows() {
            for y in 0..z.cols() {
                if z.contains(x, y) && violates(&z, x, y) {
                    z.set(x, y, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return z;
        }
    }
}

fn fuzzy_fixpoint<F: Fn(&FuzzyRelation, usize, usize) -> Degree>(mut z: FuzzyRelation, bound: F) -> FuzzyRelation {
    loop {
        let mut changed = false;
        for x in 0..z.rows() {
            for y in 0..z.cols() {
                let current = z.get(x, y);
                if current.is_zero() {
                    continue;
                }
                let b = bound(&z, x, y);
                if b < current {
                    z.set(x, y, b);
                    changed = true;
                }
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Greatest crisp bisimulation of a graph.
pub fn gfp_crisp_bisim_flg(g: &Flg) -> CrispRelation {
    let n = g.vertex_count();
    let start = CrispRelation::from_fn(n, n, |x, y| g.label(x) == g.label(y));
    crisp_fixpoint(start, |z, x, y| {
        crisp_forward_violation(g, g, z, x, y).is_some() || crisp_backward_violation(g, z, x, y).is_some()
    })
}

/// Greatest crisp simulation between `g` and `h`; may be empty.
pub fn gfp_crisp_sim_flg(g: &Flg, h: &Flg) -> Result<CrispRelation> {
    g.same_signature(h)?;
    let start = CrispRelation::from_fn(g.vertex_count(), h.vertex_count(), |x, y| g.label(x).is_subset_of(h.label(y)));
    Ok(crisp_fixpoint(start, |z, x, y| crisp_forward_violation(g, h, z, x, y).is_some()))
}

/// `min over edges x -r-> y of (E(x,r,y) ⇒ max over x' -r-> y' of min(E'(x',r,y'), Z(y,y')))`.
fn fuzzy_forward_bound<F: Fn(usize, usize) -> Degree>(g: &Flg, h: &Flg, x: usize, x2: usize, z: F) -> Degree {
    meet(g.out_edges(x).iter().map(|e| {
        let best = join(
            h.out_edges(x2)
                .iter()
                .filter(|f| f.label == e.label)
                .map(|f| f.degree.min(z(e.target as usize, f.target as usize))),
        );
        godel_residuum(e.degree, best)
    }))
}

fn label_residuum_bound(g: &Flg, h: &Flg, x: usize, y: usize) -> Degree {
    meet(g.label(x).iter().map(|(p, d)| godel_residuum(d, h.label(y).get(p))))
}

fn label_biresiduum_bound(g: &Flg, x: usize, y: usize) -> Degree {
    label_residuum_bound(g, g, x, y).min(label_residuum_bound(g, g, y, x))
}

/// Greatest fuzzy bisimulation of a graph under Gödel semantics.
pub fn gfp_fuzzy_bisim_flg(g: &Flg) -> FuzzyRelation {
    let n = g.vertex_count();
    let start = FuzzyRelation::from_fn(n, n, |x, y| label_biresiduum_bound(g, x, y));
    fuzzy_fixpoint(start, |z, x, y| {
        let forward = fuzzy_forward_bound(g, g, x, y, |a, b| z.get(a, b));
        let backward = fuzzy_forward_bound(g, g, y, x, |b, a| z.get(a, b));
        forward.min(backward)
    })
}

/// Greatest fuzzy simulation between `g` and `h` under Gödel semantics.
pub fn gfp_fuzzy_sim_flg(g: &Flg, h: &Flg) -> Result<FuzzyRelation> {
    g.same_signature(h)?;
    let start = FuzzyRelation::from_fn(g.vertex_count(), h.vertex_count(), |x, y| label_residuum_bound(g, h, x, y));
    Ok(fuzzy_fixpoint(start, |z, x, y| fuzzy_forward_bound(g, h, x, y, |a, b| z.get(a, b))))
}

/// Checks the two clauses of a crisp simulation between `g` and `h`.
pub fn is_crisp_sim_flg(z: &CrispRelation, g: &Flg, h: &Flg) -> WitnessReport {
    for (x, y) in z.pairs() {
        if !g.label(x).is_subset_of(h.label(y)) {
            return WitnessReport::fail("labels", vertex_pair(g, h, x, y));
        }
        if let Some(w) = crisp_forward_violation(g, h, z, x, y) {
            return WitnessReport::fail("edges", w);
        }
    }
    WitnessReport::ok()
}

/// Checks the two clauses of a fuzzy simulation between `g` and `h`.
pub fn is_fuzzy_sim_flg(z: &FuzzyRelation, g: &Flg, h: &Flg) -> WitnessReport {
    for (x, y, d) in z.entries() {
        let labels = label_residuum_bound(g, h, x, y);
        if d > labels {
            return WitnessReport::fail("labels", format!("{} degree {d} > {labels}", vertex_pair(g, h, x, y)));
        }
        let edges = fuzzy_forward_bound(g, h, x, y, |a, b| z.get(a, b));
        if d > edges {
            return WitnessReport::fail("edges", format!("{} degree {d} > {edges}", vertex_pair(g, h, x, y)));
        }
    }
    WitnessReport::ok()
}

fn aligned(a: &Nflts, b: &Nflts) -> Result<(Flg, Flg)> {
    let b = b.realign(a.nfts().actions(), a.labels())?;
    Ok((nflts_to_flg(a), nflts_to_flg(&b)))
}

/// Whether `r` between the states of `a` and `b` is the state part of a crisp
/// simulation between their graphs. Distribution pairs are related whenever
/// their edges are matched through `r`, and then the whole relation is
/// checked.
pub fn is_crisp_sim_nflts(r: &CrispRelation, a: &Nflts, b: &Nflts) -> Result<WitnessReport> {
    let (g, h) = aligned(a, b)?;
    let (n, n2) = (a.nfts().state_count(), b.nfts().state_count());
    let z = CrispRelation::from_fn(g.vertex_count(), h.vertex_count(), |x, y| match (x < n, y < n2) {
        (true, true) => r.contains(x, y),
        (false, false) => g.out_edges(x).iter().all(|e| {
            h.out_edges(y)
                .iter()
                .any(|f| f.label == e.label && e.degree <= f.degree && r.contains(e.target as usize, f.target as usize))
        }),
        _ => false,
    });
    Ok(is_crisp_sim_flg(&z, &g, &h))
}

/// The fuzzy counterpart of [`is_crisp_sim_nflts`]: distribution pairs get
/// the largest degree their edge clause allows given `r`.
pub fn is_fuzzy_sim_nflts(r: &FuzzyRelation, a: &Nflts, b: &Nflts) -> Result<WitnessReport> {
    let (g, h) = aligned(a, b)?;
    let (n, n2) = (a.nfts().state_count(), b.nfts().state_count());
    let on_states = |x: usize, y: usize| if x < n && y < n2 { r.get(x, y) } else { Degree::ZERO };
    let z = FuzzyRelation::from_fn(g.vertex_count(), h.vertex_count(), |x, y| match (x < n, y < n2) {
        (true, true) => r.get(x, y),
        (false, false) => fuzzy_forward_bound(&g, &h, x, y, on_states),
        _ => Degree::ZERO,
    });
    Ok(is_fuzzy_sim_flg(&z, &g, &h))
}
