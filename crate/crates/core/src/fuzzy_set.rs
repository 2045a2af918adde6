use crate::degree::Degree;

/// A finite fuzzy set stored by its support.
///
/// Entries are kept sorted by key and only positive degrees are stored, so
/// two fuzzy sets are equal exactly when they are equal as functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuzzySet<K> {
    entries: Vec<(K, Degree)>,
}

impl<K> FuzzySet<K> {
    pub const fn empty() -> Self {
        FuzzySet { entries: Vec::new() }
    }
}

impl<K> Default for FuzzySet<K> {
    fn default() -> Self {
        FuzzySet { entries: Vec::new() }
    }
}

impl<K: Ord + Copy> FuzzySet<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a fuzzy set, dropping zero degrees. When a key repeats, the
    /// last occurrence wins.
    pub fn from_entries<I: IntoIterator<Item = (K, Degree)>>(entries: I) -> Self {
        let mut v: Vec<(usize, K, Degree)> = entries
            .into_iter()
            .enumerate()
            .map(|(i, (k, d))| (i, k, d))
            .collect();
        v.sort_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        v.dedup_by(|later, earlier| later.1 == earlier.1);
        FuzzySet {
            entries: v
                .into_iter()
                .filter(|(_, _, d)| !d.is_zero())
                .map(|(_, k, d)| (k, d))
                .collect(),
        }
    }

    pub fn get(&self, key: K) -> Degree {
        match self.entries.binary_search_by(|(k, _)| k.cmp(&key)) {
            Ok(i) => self.entries[i].1,
            Err(_) => Degree::ZERO,
        }
    }

    pub fn insert(&mut self, key: K, degree: Degree) {
        match self.entries.binary_search_by(|(k, _)| k.cmp(&key)) {
            Ok(i) if degree.is_zero() => {
                self.entries.remove(i);
            }
            Ok(i) => self.entries[i].1 = degree,
            Err(_) if degree.is_zero() => {}
            Err(i) => self.entries.insert(i, (key, degree)),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = K> + '_ {
        self.entries.iter().map(|&(k, _)| k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, Degree)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(K, Degree)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `µ(U)`: the largest degree of a member of `U`, `0` if there is none.
    pub fn value_of_set<F: Fn(K) -> bool>(&self, in_set: F) -> Degree {
        self.entries
            .iter()
            .filter(|(k, _)| in_set(*k))
            .map(|&(_, d)| d)
            .max()
            .unwrap_or(Degree::ZERO)
    }

    /// Pointwise `self <= other`.
    pub fn is_subset_of(&self, other: &FuzzySet<K>) -> bool {
        self.entries.iter().all(|&(k, d)| d <= other.get(k))
    }

    pub fn map_keys<K2: Ord + Copy, F: Fn(K) -> K2>(&self, f: F) -> FuzzySet<K2> {
        FuzzySet::from_entries(self.entries.iter().map(|&(k, d)| (f(k), d)))
    }
}
