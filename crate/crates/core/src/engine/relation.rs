use std::fmt;

use super::Universe;

/// A binary relation on universe indices, stored as a bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PairRelation {
    pub fn empty(n: usize) -> PairRelation {
        let words = n.div_ceil(64).max(1);
        PairRelation {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn identity(n: usize) -> PairRelation {
        let mut r = PairRelation::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn full(n: usize) -> PairRelation {
        let mut r = PairRelation::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> PairRelation {
        let mut r = PairRelation::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "pair out of range");
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn union(&self, other: &PairRelation) -> PairRelation {
        let mut r = self.clone();
        for (a, b) in r.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        r
    }

    pub fn inverse(&self) -> PairRelation {
        PairRelation::from_pairs(self.n, self.pairs().map(|(i, j)| (j, i)))
    }

    /// `self ; other`: pairs `(i, k)` with `i self j` and `j other k`.
    pub fn compose(&self, other: &PairRelation) -> PairRelation {
        let mut r = PairRelation::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.contains(i, j) {
                    let w = self.words;
                    for k in 0..w {
                        r.bits[i * w + k] |= other.bits[j * w + k];
                    }
                }
            }
        }
        r
    }

    /// Reflexive-transitive closure.
    pub fn star(&self) -> PairRelation {
        let mut r = self.union(&PairRelation::identity(self.n));
        let w = self.words;
        for k in 0..self.n {
            let row_k: Vec<u64> = r.row(k).to_vec();
            for i in 0..self.n {
                if r.contains(i, k) {
                    for (dst, src) in r.bits[i * w..(i + 1) * w].iter_mut().zip(&row_k) {
                        *dst |= src;
                    }
                }
            }
        }
        r
    }

    /// Paths of length at most `k`; the full closure when `k` is `None`.
    pub fn star_bounded(&self, k: Option<usize>) -> PairRelation {
        match k {
            Some(k) if k < self.n => {
                let step = self.union(&PairRelation::identity(self.n));
                let mut r = PairRelation::identity(self.n);
                for _ in 0..k {
                    let next = r.compose(&step);
                    if next == r {
                        break;
                    }
                    r = next;
                }
                r
            }
            _ => self.star(),
        }
    }

    pub fn is_subset(&self, other: &PairRelation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_preorder() && self.is_symmetric()
    }
}

impl fmt::Debug for PairRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Same-root pairs whose arguments are pairwise related, plus the identity.
pub fn lift(r: &PairRelation, u: &Universe) -> PairRelation {
    let n = u.len();
    let mut out = PairRelation::identity(n);
    for i in 0..n {
        for j in 0..n {
            if i == j || !u.terms[i].same_head(&u.terms[j]) {
                continue;
            }
            let related = u
                .children(i)
                .iter()
                .zip(u.children(j))
                .all(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => r.contains(*a, *b),
                    _ => false,
                });
            if related {
                out.insert(i, j);
            }
        }
    }
    out
}
