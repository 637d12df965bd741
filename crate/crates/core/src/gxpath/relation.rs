//! Dense bit-set and bit-matrix relations over node indices `0..n`.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut out = BitSet::empty(self.len);
        for i in 0..self.len {
            if !self.contains(i) {
                out.insert(i);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<BitSet>,
}

impl BitMatrix {
    pub fn empty(n: usize) -> Self {
        BitMatrix {
            n,
            rows: vec![BitSet::empty(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::empty(n);
        for i in 0..n {
            m.insert(i, i);
        }
        m
    }

    pub fn full(n: usize) -> Self {
        BitMatrix {
            n,
            rows: vec![BitSet::full(n); n],
        }
    }

    pub fn diagonal(s: &BitSet) -> Self {
        let mut m = BitMatrix::empty(s.len());
        for i in s.iter() {
            m.insert(i, i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(BitSet::is_empty)
    }

    pub fn is_full(&self) -> bool {
        self.rows.iter().all(BitSet::is_full)
    }

    pub fn union(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        out
    }

    pub fn intersect(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.intersect_with(b);
        }
        out
    }

    pub fn complement(&self) -> BitMatrix {
        BitMatrix {
            n: self.n,
            rows: self.rows.iter().map(BitSet::complement).collect(),
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::empty(self.n);
        for i in 0..self.n {
            for j in self.rows[i].iter() {
                out.insert(j, i);
            }
        }
        out
    }

    /// Relational composition `self ; other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::empty(self.n);
        for i in 0..self.n {
            let row = &mut out.rows[i];
            for k in self.rows[i].iter() {
                row.union_with(&other.rows[k]);
            }
        }
        out
    }

    /// Reflexive-transitive closure (Warshall).
    pub fn star(&self) -> BitMatrix {
        let mut m = self.clone();
        for k in 0..self.n {
            let row_k = m.rows[k].clone();
            for i in 0..self.n {
                if m.rows[i].contains(k) {
                    m.rows[i].union_with(&row_k);
                }
            }
        }
        for i in 0..self.n {
            m.insert(i, i);
        }
        m
    }

    /// Nodes with at least one outgoing pair (the first projection).
    pub fn domain(&self) -> BitSet {
        let mut out = BitSet::empty(self.n);
        for i in 0..self.n {
            if !self.rows[i].is_empty() {
                out.insert(i);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.rows[i].iter().map(move |j| (i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_path() {
        let mut m = BitMatrix::empty(3);
        m.insert(0, 1);
        m.insert(1, 2);
        let s = m.star();
        let pairs: Vec<_> = s.pairs().collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn wide_sets() {
        let mut s = BitSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.complement().count(), 127);
        assert!(BitSet::full(130).is_full());
    }

    #[test]
    fn compose_and_transpose() {
        let mut a = BitMatrix::empty(2);
        a.insert(0, 1);
        let t = a.transpose();
        assert!(t.contains(1, 0));
        assert!(a.compose(&t).contains(0, 0));
        assert!(!a.compose(&a).contains(0, 1));
    }
}
