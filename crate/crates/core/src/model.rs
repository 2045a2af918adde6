//! Nondeterministic fuzzy transition systems, with and without state labels.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::degree::{Degree, DegreePool};
use crate::error::{Error, Result};
use crate::fuzzy_set::FuzzySet;

/// Edge symbol reserved for the distribution-to-state edges of a graph.
pub const EPSILON: &str = "ε";
/// Vertex label reserved for "being a state".
pub const STATE_MARKER: &str = "s";

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(StateId);
id_type!(ActionId);
id_type!(LabelId);
id_type!(
    /// Canonical identifier of a distinct distribution in `δ◦`.
    DistId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub action: ActionId,
    pub target: DistId,
}

/// `⟨S, A, δ⟩`. Distributions are deduplicated: `distributions()` is `δ◦`
/// and every distribution in it is the target of at least one transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfts {
    states: Vec<String>,
    actions: Vec<String>,
    distributions: Vec<FuzzySet<StateId>>,
    transitions: Vec<Transition>,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
}

impl Nfts {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId::from)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()]
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn action(&self, name: &str) -> Result<ActionId> {
        self.action_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// `δ◦`, indexed by [`DistId`].
    pub fn distributions(&self) -> &[FuzzySet<StateId>] {
        &self.distributions
    }

    pub fn distribution(&self, id: DistId) -> &FuzzySet<StateId> {
        &self.distributions[id.index()]
    }

    /// `δ`, sorted by source, action and target.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Transitions leaving `s`.
    pub fn outgoing(&self, s: StateId) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| t.source < s);
        let hi = self.transitions.partition_point(|t| t.source <= s);
        &self.transitions[lo..hi]
    }

    /// `size(δ) = |δ| + Σ_{µ∈δ◦} |support(µ)|`.
    pub fn size_of_delta(&self) -> usize {
        self.transitions.len() + self.distributions.iter().map(FuzzySet::len).sum::<usize>()
    }

    /// Distinct positive degrees used by the distributions, plus `0` and `1`.
    pub fn degree_pool(&self) -> DegreePool {
        DegreePool::new(self.distributions.iter().flat_map(|mu| mu.iter().map(|(_, d)| d)))
    }
}

/// Incremental construction of an [`Nfts`] with distribution interning.
#[derive(Debug, Default)]
pub struct NftsBuilder {
    states: Vec<String>,
    actions: Vec<String>,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
    distributions: Vec<FuzzySet<StateId>>,
    dist_index: HashMap<FuzzySet<StateId>, DistId>,
    transitions: BTreeSet<Transition>,
}

impl NftsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: &str) -> Result<StateId> {
        if self.state_index.contains_key(name) {
            return Err(Error::Duplicate { kind: "state", name: name.to_string() });
        }
        let id = StateId::from(self.states.len());
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_action(&mut self, name: &str) -> Result<ActionId> {
        if name == EPSILON {
            return Err(Error::ReservedSymbol(name.to_string()));
        }
        if self.action_index.contains_key(name) {
            return Err(Error::Duplicate { kind: "action", name: name.to_string() });
        }
        let id = ActionId::from(self.actions.len());
        self.actions.push(name.to_string());
        self.action_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn action(&self, name: &str) -> Result<ActionId> {
        self.action_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// Returns the canonical id of the distribution with the given entries.
    /// Zero degrees are dropped; equal support maps share one id.
    pub fn intern_distribution<I>(&mut self, entries: I) -> Result<DistId>
    where
        I: IntoIterator<Item = (StateId, Degree)>,
    {
        let mu = FuzzySet::from_entries(entries);
        if let Some(bad) = mu.support().find(|s| s.index() >= self.states.len()) {
            return Err(Error::UnknownState(format!("#{bad}")));
        }
        if let Some(&id) = self.dist_index.get(&mu) {
            return Ok(id);
        }
        let id = DistId::from(self.distributions.len());
        self.distributions.push(mu.clone());
        self.dist_index.insert(mu, id);
        Ok(id)
    }

    pub fn intern_named(&mut self, entries: &[(&str, Degree)]) -> Result<DistId> {
        let resolved = entries
            .iter()
            .map(|&(name, d)| Ok((self.state(name)?, d)))
            .collect::<Result<Vec<_>>>()?;
        self.intern_distribution(resolved)
    }

    /// Adds `⟨source, action, target⟩`; a transition already present is ignored.
    pub fn add_transition(&mut self, source: StateId, action: ActionId, target: DistId) -> Result<()> {
        if source.index() >= self.states.len() {
            return Err(Error::UnknownState(format!("#{source}")));
        }
        if action.index() >= self.actions.len() {
            return Err(Error::UnknownAction(format!("#{action}")));
        }
        if target.index() >= self.distributions.len() {
            return Err(Error::Document(format!("unknown distribution #{target}")));
        }
        self.transitions.insert(Transition { source, action, target });
        Ok(())
    }

    pub fn build(self) -> Result<Nfts> {
        if self.states.is_empty() {
            return Err(Error::NoStates);
        }
        if self.actions.is_empty() {
            return Err(Error::NoActions);
        }
        // number the reachable distributions by first use, with transitions
        // ordered by source, action and distribution content, so that the
        // result does not depend on the order of interning
        let mut order: Vec<Transition> = self.transitions.into_iter().collect();
        let dists = &self.distributions;
        order.sort_by(|a, b| {
            (a.source, a.action, dists[a.target.index()].entries())
                .cmp(&(b.source, b.action, dists[b.target.index()].entries()))
        });
        let mut new_ids = vec![None; dists.len()];
        let mut distributions = Vec::new();
        for t in &order {
            if new_ids[t.target.index()].is_none() {
                new_ids[t.target.index()] = Some(DistId::from(distributions.len()));
                distributions.push(dists[t.target.index()].clone());
            }
        }
        let mut transitions: Vec<Transition> = order
            .into_iter()
            .map(|t| Transition { target: new_ids[t.target.index()].expect("numbered above"), ..t })
            .collect();
        transitions.sort_unstable();
        Ok(Nfts {
            states: self.states,
            actions: self.actions,
            distributions,
            transitions,
            state_index: self.state_index,
            action_index: self.action_index,
        })
    }
}

/// An [`Nfts`] whose states carry fuzzy labels over an alphabet `Σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nflts {
    base: Nfts,
    labels: Vec<String>,
    label_index: HashMap<String, LabelId>,
    state_labels: Vec<FuzzySet<LabelId>>,
}

impl Nflts {
    /// `state_labels` may mention any subset of the states; unmentioned
    /// states get the empty label.
    pub fn new<I>(base: Nfts, labels: Vec<String>, state_labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, FuzzySet<LabelId>)>,
    {
        let mut label_index = HashMap::new();
        for (i, name) in labels.iter().enumerate() {
            if name == STATE_MARKER {
                return Err(Error::ReservedSymbol(name.clone()));
            }
            if label_index.insert(name.clone(), LabelId::from(i)).is_some() {
                return Err(Error::Duplicate { kind: "label", name: name.clone() });
            }
        }
        let mut table = vec![FuzzySet::new(); base.state_count()];
        for (s, set) in state_labels {
            if s.index() >= base.state_count() {
                return Err(Error::UnknownState(format!("#{s}")));
            }
            if let Some(bad) = set.support().find(|p| p.index() >= labels.len()) {
                return Err(Error::UnknownLabel(format!("#{bad}")));
            }
            table[s.index()] = set;
        }
        Ok(Nflts { base, labels, label_index, state_labels: table })
    }

    pub fn nfts(&self) -> &Nfts {
        &self.base
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Result<LabelId> {
        self.label_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn state_label(&self, s: StateId) -> &FuzzySet<LabelId> {
        &self.state_labels[s.index()]
    }

    /// The same system with its action and label ids renumbered to follow
    /// the given alphabets, which must be permutations of this system's.
    pub fn realign(&self, actions: &[String], labels: &[String]) -> Result<Nflts> {
        let same_set = |mine: &[String], theirs: &[String]| {
            let a: BTreeSet<&String> = mine.iter().collect();
            let b: BTreeSet<&String> = theirs.iter().collect();
            a == b && mine.len() == theirs.len()
        };
        if !same_set(self.base.actions(), actions) {
            return Err(Error::AlphabetMismatch(format!(
                "actions {:?} vs {:?}",
                self.base.actions(),
                actions
            )));
        }
        if !same_set(&self.labels, labels) {
            return Err(Error::AlphabetMismatch(format!("labels {:?} vs {:?}", self.labels, labels)));
        }
        if self.base.actions() == actions && self.labels == labels {
            return Ok(self.clone());
        }
        let mut b = NftsBuilder::new();
        for name in self.base.states() {
            b.add_state(name)?;
        }
        for name in actions {
            b.add_action(name)?;
        }
        let mut ids = Vec::with_capacity(self.base.distributions().len());
        for mu in self.base.distributions() {
            ids.push(b.intern_distribution(mu.iter())?);
        }
        for t in self.base.transitions() {
            let a = b.action(self.base.action_name(t.action))?;
            b.add_transition(t.source, a, ids[t.target.index()])?;
        }
        let base = b.build()?;
        let label_pos: HashMap<&str, LabelId> =
            labels.iter().enumerate().map(|(i, n)| (n.as_str(), LabelId::from(i))).collect();
        let relabeled = self.base.state_ids().map(|s| {
            let set = self.state_label(s).map_keys(|p| label_pos[self.labels[p.index()].as_str()]);
            (s, set)
        });
        Nflts::new(base, labels.to_vec(), relabeled)
    }
}

impl From<Nfts> for Nflts {
    fn from(base: Nfts) -> Self {
        let n = base.state_count();
        Nflts {
            base,
            labels: Vec::new(),
            label_index: HashMap::new(),
            state_labels: vec![FuzzySet::new(); n],
        }
    }
}

/// Read access shared by [`Nfts`] and [`Nflts`]; a plain `Nfts` has an empty
/// label alphabet and every state carries the empty label.
pub trait Model {
    fn nfts(&self) -> &Nfts;
    fn label_alphabet(&self) -> &[String];
    fn state_label(&self, s: StateId) -> &FuzzySet<LabelId>;
}

static EMPTY_LABEL: FuzzySet<LabelId> = FuzzySet::empty();

impl Model for Nfts {
    fn nfts(&self) -> &Nfts {
        self
    }

    fn label_alphabet(&self) -> &[String] {
        &[]
    }

    fn state_label(&self, _s: StateId) -> &FuzzySet<LabelId> {
        &EMPTY_LABEL
    }
}

impl Model for Nflts {
    fn nfts(&self) -> &Nfts {
        &self.base
    }

    fn label_alphabet(&self) -> &[String] {
        &self.labels
    }

    fn state_label(&self, s: StateId) -> &FuzzySet<LabelId> {
        Nflts::state_label(self, s)
    }
}

/// Where each side's states landed in a disjoint union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injections {
    pub left: Vec<StateId>,
    pub right: Vec<StateId>,
}

pub const LEFT_TAG: &str = "left.";
pub const RIGHT_TAG: &str = "right.";

/// Tagged disjoint union of two systems over the same actions and labels.
/// The right system is realigned to the left one's alphabets first.
pub fn disjoint_union(a: &Nflts, b: &Nflts) -> Result<(Nflts, Injections)> {
    let b = b.realign(a.nfts().actions(), a.labels())?;
    let (na, nb) = (a.nfts(), b.nfts());
    let mut builder = NftsBuilder::new();
    let mut left = Vec::with_capacity(na.state_count());
    let mut right = Vec::with_capacity(nb.state_count());
    for name in na.states() {
        left.push(builder.add_state(&format!("{LEFT_TAG}{name}"))?);
    }
    for name in nb.states() {
        right.push(builder.add_state(&format!("{RIGHT_TAG}{name}"))?);
    }
    for name in na.actions() {
        builder.add_action(name)?;
    }
    for (side, inj) in [(na, &left), (nb, &right)] {
        let ids = side
            .distributions()
            .iter()
            .map(|mu| builder.intern_distribution(mu.iter().map(|(s, d)| (inj[s.index()], d))))
            .collect::<Result<Vec<_>>>()?;
        for t in side.transitions() {
            builder.add_transition(inj[t.source.index()], t.action, ids[t.target.index()])?;
        }
    }
    let base = builder.build()?;
    let labels = left
        .iter()
        .zip(na.state_ids())
        .map(|(&u, s)| (u, a.state_label(s).clone()))
        .chain(right.iter().zip(nb.state_ids()).map(|(&u, s)| (u, b.state_label(s).clone())))
        .collect::<Vec<_>>();
    let union = Nflts::new(base, a.labels().to_vec(), labels)?;
    Ok((union, Injections { left, right }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::example_nfts;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    #[test]
    fn size_of_example() {
        let m = example_nfts();
        assert_eq!(m.transitions().len(), 6);
        assert_eq!(m.distributions().len(), 3);
        assert_eq!(m.size_of_delta(), 12);
    }

    #[test]
    fn size_of_small_cases() {
        let mut b = NftsBuilder::new();
        b.add_state("x").unwrap();
        b.add_action("a").unwrap();
        assert_eq!(b.build().unwrap().size_of_delta(), 0);

        let mut b = NftsBuilder::new();
        let s: Vec<_> = ["x", "y", "z"].iter().map(|n| b.add_state(n).unwrap()).collect();
        let a = b.add_action("a").unwrap();
        let mu = b.intern_distribution(s.iter().map(|&x| (x, d("0.5")))).unwrap();
        b.add_transition(s[0], a, mu).unwrap();
        assert_eq!(b.build().unwrap().size_of_delta(), 4);
    }

    #[test]
    fn shared_distribution_counted_once() {
        let mut b = NftsBuilder::new();
        let x = b.add_state("x").unwrap();
        let y = b.add_state("y").unwrap();
        let a = b.add_action("a").unwrap();
        let mu = b.intern_distribution([(x, d("0.3")), (y, d("0.6"))]).unwrap();
        b.add_transition(x, a, mu).unwrap();
        b.add_transition(y, a, mu).unwrap();
        assert_eq!(b.build().unwrap().size_of_delta(), 2 + 2);
    }

    #[test]
    fn interning_deduplicates() {
        let mut b = NftsBuilder::new();
        for n in ["s1", "s2", "s3"] {
            b.add_state(n).unwrap();
        }
        let m1 = b.intern_named(&[("s2", d("0.5")), ("s3", d("0.8"))]).unwrap();
        let m2 = b.intern_named(&[("s3", d("0.8")), ("s2", d("0.5"))]).unwrap();
        let m3 = b.intern_named(&[("s2", d("0.5")), ("s3", d("0.7"))]).unwrap();
        let m4 = b.intern_named(&[("s2", d("0.5")), ("s3", d("0.8")), ("s1", Degree::ZERO)]).unwrap();
        assert_eq!(m1, m2);
        assert_ne!(m1, m3);
        assert_eq!(m1, m4);
        assert!(matches!(b.intern_named(&[("s9", d("0.5"))]), Err(Error::UnknownState(_))));
        assert!(matches!(b.intern_distribution([(StateId(9), d("0.5"))]), Err(Error::UnknownState(_))));
    }

    #[test]
    fn duplicate_transitions_collapse() {
        let mut b = NftsBuilder::new();
        let x = b.add_state("x").unwrap();
        let a = b.add_action("a").unwrap();
        let mu = b.intern_distribution([(x, d("1"))]).unwrap();
        b.add_transition(x, a, mu).unwrap();
        b.add_transition(x, a, mu).unwrap();
        assert_eq!(b.build().unwrap().transitions().len(), 1);
    }

    #[test]
    fn empty_support_distribution_is_allowed() {
        let mut b = NftsBuilder::new();
        let x = b.add_state("x").unwrap();
        let a = b.add_action("a").unwrap();
        let mu = b.intern_distribution([]).unwrap();
        b.add_transition(x, a, mu).unwrap();
        let m = b.build().unwrap();
        assert_eq!(m.size_of_delta(), 1);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(NftsBuilder::new().build(), Err(Error::NoStates)));
        let mut b = NftsBuilder::new();
        b.add_state("x").unwrap();
        assert!(matches!(b.add_state("x"), Err(Error::Duplicate { .. })));
        assert!(matches!(b.add_action(EPSILON), Err(Error::ReservedSymbol(_))));
        assert!(matches!(b.build(), Err(Error::NoActions)));
        let m = example_nfts();
        assert!(matches!(
            Nflts::new(m, vec![STATE_MARKER.to_string()], []),
            Err(Error::ReservedSymbol(_))
        ));
    }

    #[test]
    fn union_with_itself_doubles() {
        let m = Nflts::from(example_nfts());
        let (u, inj) = disjoint_union(&m, &m).unwrap();
        assert_eq!(u.nfts().state_count(), 10);
        assert_eq!(u.nfts().transitions().len(), 12);
        assert_eq!(u.nfts().distributions().len(), 6);
        let mut all: Vec<_> = inj.left.iter().chain(&inj.right).copied().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 10);
        assert_eq!(u.nfts().state_name(inj.right[0]), "right.s1");
    }

    #[test]
    fn union_with_empty_delta_keeps_left() {
        let m = Nflts::from(example_nfts());
        let mut b = NftsBuilder::new();
        b.add_state("t").unwrap();
        b.add_action("b").unwrap();
        b.add_action("a").unwrap();
        let other = Nflts::from(b.build().unwrap());
        let (u, inj) = disjoint_union(&m, &other).unwrap();
        assert_eq!(u.nfts().transitions().len(), 6);
        for t in u.nfts().transitions() {
            assert!(inj.left.contains(&t.source));
        }
        let mut c = NftsBuilder::new();
        c.add_state("t").unwrap();
        c.add_action("c").unwrap();
        let bad = Nflts::from(c.build().unwrap());
        assert!(matches!(disjoint_union(&m, &bad), Err(Error::AlphabetMismatch(_))));
    }
}
