//! Chunked bitmasks over carrier elements, used to collapse the inner
//! `forall g` quantifier of the chain-style laws into word operations.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ElemMask {
    words: Vec<u64>,
}

impl ElemMask {
    pub(crate) fn empty(size: usize) -> Self {
        ElemMask {
            words: vec![0; size.div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Elements in `self & other` that are missing from `allowed`,
    /// ascending. Empty iff `self ∩ other ⊆ allowed`.
    pub(crate) fn intersection_outside(&self, other: &ElemMask, allowed: &ElemMask) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, ((a, b), c)) in self
            .words
            .iter()
            .zip(&other.words)
            .zip(&allowed.words)
            .enumerate()
        {
            let mut bad = (a & b) & !c;
            while bad != 0 {
                let bit = bad.trailing_zeros() as usize;
                out.push(w * 64 + bit);
                bad &= bad - 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_outside_finds_gaps() {
        let mut a = ElemMask::empty(130);
        let mut b = ElemMask::empty(130);
        let mut c = ElemMask::empty(130);
        for i in [0, 3, 65, 129] {
            a.insert(i);
            b.insert(i);
        }
        c.insert(3);
        c.insert(129);
        assert_eq!(a.intersection_outside(&b, &c), vec![0, 65]);
        c.insert(0);
        c.insert(65);
        assert!(a.intersection_outside(&b, &c).is_empty());
        assert!(a.contains(65) && !a.contains(64));
    }
}
