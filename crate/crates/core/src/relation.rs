//! Dense crisp and fuzzy relations between finite universes `0..rows` and
//! `0..cols`.

use std::fmt;

use crate::degree::Degree;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuzzyRelation {
    rows: usize,
    cols: usize,
    data: Vec<Degree>,
}

impl FuzzyRelation {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FuzzyRelation { rows, cols, data: vec![Degree::ZERO; rows * cols] }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        FuzzyRelation { rows, cols, data: vec![Degree::ONE; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::zeros(n, n);
        for x in 0..n {
            r.set(x, x, Degree::ONE);
        }
        r
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Degree>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                data.push(f(x, y));
            }
        }
        FuzzyRelation { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Degree {
        self.data[x * self.cols + y]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, d: Degree) {
        self.data[x * self.cols + y] = d;
    }

    pub fn converse(&self) -> FuzzyRelation {
        FuzzyRelation::from_fn(self.cols, self.rows, |y, x| self.get(x, y))
    }

    /// The sub-relation on the listed row and column elements, renumbered
    /// by their position in the lists.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> FuzzyRelation {
        FuzzyRelation::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Pairs with degree at least `threshold`.
    pub fn cut(&self, threshold: Degree) -> CrispRelation {
        CrispRelation::from_fn(self.rows, self.cols, |x, y| self.get(x, y) >= threshold)
    }

    /// Pointwise `self <= other`.
    pub fn is_le(&self, other: &FuzzyRelation) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a <= b)
    }

    /// Positive entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Degree)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(move |(i, &d)| (i / self.cols, i % self.cols, d))
    }
}

impl fmt::Debug for FuzzyRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FuzzyRelation {}x{}", self.rows, self.cols)?;
        for x in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|y| self.get(x, y).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CrispRelation {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl CrispRelation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        CrispRelation { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        CrispRelation { rows, cols, data: vec![true; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |x, y| x == y)
    }

    pub fn from_fn<F: FnMut(usize, usize) -> bool>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                data.push(f(x, y));
            }
        }
        CrispRelation { rows, cols, data }
    }

    /// The equivalence relation whose classes are `blocks`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut class = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                class[x] = i;
            }
        }
        Self::from_fn(n, n, |x, y| class[x] == class[y] && class[x] != usize::MAX)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.data[x * self.cols + y]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[x * self.cols + y] = value;
    }

    pub fn len(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / self.cols, i % self.cols))
    }

    pub fn converse(&self) -> CrispRelation {
        CrispRelation::from_fn(self.cols, self.rows, |y, x| self.contains(x, y))
    }

    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> CrispRelation {
        CrispRelation::from_fn(rows.len(), cols.len(), |i, j| self.contains(rows[i], cols[j]))
    }

    pub fn is_subset_of(&self, other: &CrispRelation) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    pub fn is_equivalence(&self) -> bool {
        self.rows == self.cols && relation_laws(&self.to_fuzzy()).all_hold()
    }

    /// Classes of an equivalence relation, each sorted, ordered by least
    /// member. `None` if the relation is not an equivalence.
    pub fn classes(&self) -> Option<Vec<Vec<usize>>> {
        if !self.is_equivalence() {
            return None;
        }
        let mut seen = vec![false; self.rows];
        let mut out = Vec::new();
        for x in 0..self.rows {
            if seen[x] {
                continue;
            }
            let class: Vec<usize> = (0..self.rows).filter(|&y| self.contains(x, y)).collect();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        Some(out)
    }

    pub fn to_fuzzy(&self) -> FuzzyRelation {
        FuzzyRelation::from_fn(self.rows, self.cols, |x, y| {
            if self.contains(x, y) {
                Degree::ONE
            } else {
                Degree::ZERO
            }
        })
    }
}

impl fmt::Debug for CrispRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CrispRelation {}x{} ", self.rows, self.cols)?;
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Which fuzzy-equivalence laws (Gödel semantics) a relation satisfies,
/// with a witness for each failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub reflexive: Result<(), usize>,
    pub symmetric: Result<(), (usize, usize)>,
    pub transitive: Result<(), (usize, usize, usize)>,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.reflexive.is_ok() && self.symmetric.is_ok() && self.transitive.is_ok()
    }

    /// The first failing law and its witness, rendered with `name`.
    pub fn first_failure<F: Fn(usize) -> String>(&self, name: F) -> Option<(&'static str, String)> {
        if let Err(x) = self.reflexive {
            return Some(("reflexivity", format!("({})", name(x))));
        }
        if let Err((x, y)) = self.symmetric {
            return Some(("symmetry", format!("({}, {})", name(x), name(y))));
        }
        if let Err((x, y, z)) = self.transitive {
            return Some(("transitivity", format!("({}, {}, {})", name(x), name(y), name(z))));
        }
        None
    }
}

/// Checks `r(x,x) = 1`, `r(x,y) = r(y,x)` and `min(r(x,y), r(y,z)) <= r(x,z)`.
/// A non-square relation fails reflexivity at its first missing diagonal
/// element.
pub fn relation_laws(r: &FuzzyRelation) -> LawReport {
    let n = r.rows().min(r.cols());
    let reflexive = if r.rows() != r.cols() {
        Err(n)
    } else {
        match (0..n).find(|&x| !r.get(x, x).is_one()) {
            Some(x) => Err(x),
            None => Ok(()),
        }
    };
    let mut symmetric = Ok(());
    'sym: for x in 0..n {
        for y in x + 1..n {
            if r.get(x, y) != r.get(y, x) {
                symmetric = Err((x, y));
                break 'sym;
            }
        }
    }
    let mut transitive = Ok(());
    'tr: for x in 0..n {
        for y in 0..n {
            let xy = r.get(x, y);
            if xy.is_zero() {
                continue;
            }
            for z in 0..n {
                if xy.min(r.get(y, z)) > r.get(x, z) {
                    transitive = Err((x, y, z));
                    break 'tr;
                }
            }
        }
    }
    LawReport { reflexive, symmetric, transitive }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    #[test]
    fn transitivity_violation_has_witness() {
        let mut r = FuzzyRelation::identity(3);
        r.set(0, 1, d("0.5"));
        r.set(1, 0, d("0.5"));
        r.set(1, 2, d("0.5"));
        r.set(2, 1, d("0.5"));
        r.set(0, 2, d("0.3"));
        r.set(2, 0, d("0.3"));
        let report = relation_laws(&r);
        assert!(report.reflexive.is_ok());
        assert!(report.symmetric.is_ok());
        assert_eq!(report.transitive, Err((0, 1, 2)));
        assert_eq!(report.first_failure(|x| format!("x{x}")).unwrap().0, "transitivity");
    }

    #[test]
    fn identity_is_equivalence() {
        assert!(relation_laws(&FuzzyRelation::identity(4)).all_hold());
        assert!(CrispRelation::identity(4).is_equivalence());
    }

    #[test]
    fn classes_of_blocks() {
        let blocks = vec![vec![0, 3], vec![1], vec![2, 4]];
        let r = CrispRelation::from_blocks(5, &blocks);
        assert_eq!(r.classes().unwrap(), blocks);
        let mut broken = r.clone();
        broken.set(0, 1, true);
        assert!(broken.classes().is_none());
    }

    #[test]
    fn cut_and_converse() {
        let mut r = FuzzyRelation::zeros(2, 3);
        r.set(0, 2, d("0.7"));
        r.set(1, 0, Degree::ONE);
        let c = r.cut(Degree::ONE);
        assert_eq!(c.pairs().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(r.converse().get(2, 0), d("0.7"));
        assert_eq!(r.entries().count(), 2);
    }
}
