//! Finite carriers, operation tables, and exhaustive decision procedures
//! for the axioms and the relation/subset compatibility properties.
//!
//! Elements are `0..m` indices into the carrier; labels only exist at the
//! I/O boundary. All checks are pure scans over immutable tables and
//! report violations in lexicographic order of the substitution tuple.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::bits::ElemMask;
use crate::report::{laws, CheckConfig, CheckReport, ReportBuilder};
use crate::terms::{translations, TermError, TranslationSet};
use crate::tuples::{for_each_tuple, tuple_count};

/// Carrier of `size` elements with one total `(rank+1)`-ary operation.
///
/// The table is stored flat, indexed by `x . y1 .. yn` in radix `size`
/// (most significant first). Superassociativity is checked, never assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMengerAlgebra {
    rank: usize,
    size: usize,
    op: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("carrier must be non-empty")]
    EmptyCarrier,
    #[error("operation table has {got} entries, expected {expected}")]
    WrongTableSize { got: usize, expected: usize },
    #[error("table entry {value} at position {index} is outside the carrier 0..{size}")]
    EntryOutOfRange {
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("table for rank {rank} and size {size} would not fit in memory")]
    TooLarge { rank: usize, size: usize },
    #[error("zero element {zero} is outside the carrier 0..{size}")]
    ZeroOutOfRange { zero: usize, size: usize },
}

impl FiniteMengerAlgebra {
    pub fn new(rank: usize, size: usize, op: Vec<usize>) -> Result<Self, StructureError> {
        if rank == 0 {
            return Err(StructureError::ZeroRank);
        }
        if size == 0 {
            return Err(StructureError::EmptyCarrier);
        }
        let expected = size
            .checked_pow(rank as u32 + 1)
            .ok_or(StructureError::TooLarge { rank, size })?;
        if op.len() != expected {
            return Err(StructureError::WrongTableSize {
                got: op.len(),
                expected,
            });
        }
        if let Some((index, &value)) = op.iter().enumerate().find(|(_, &v)| v >= size) {
            return Err(StructureError::EntryOutOfRange { index, value, size });
        }
        Ok(FiniteMengerAlgebra { rank, size, op })
    }

    /// Builds the table by evaluating `f` on every `(x, ys)` input.
    pub fn from_fn(
        rank: usize,
        size: usize,
        mut f: impl FnMut(usize, &[usize]) -> usize,
    ) -> Result<Self, StructureError> {
        if rank == 0 {
            return Err(StructureError::ZeroRank);
        }
        if size == 0 {
            return Err(StructureError::EmptyCarrier);
        }
        size.checked_pow(rank as u32 + 1)
            .ok_or(StructureError::TooLarge { rank, size })?;
        let mut op = Vec::with_capacity(size.pow(rank as u32 + 1));
        for_each_tuple(rank + 1, size, |t| op.push(f(t[0], &t[1..])));
        Self::new(rank, size, op)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `x[y1..yn]` by table lookup.
    #[inline]
    pub fn op(&self, x: usize, ys: &[usize]) -> usize {
        debug_assert_eq!(ys.len(), self.rank);
        let mut idx = x;
        for &y in ys {
            idx = idx * self.size + y;
        }
        self.op[idx]
    }

    /// `u[w1 .. w(i-1) x w(i+1) .. wn]`: the i-th argument replaced by
    /// `x`, the others taken from `w` (whose i-th entry is ignored).
    #[inline]
    pub fn op_subst(&self, u: usize, w: &[usize], i: usize, x: usize) -> usize {
        debug_assert_eq!(w.len(), self.rank);
        let mut idx = u;
        for (j, &wj) in w.iter().enumerate() {
            idx = idx * self.size + if j == i { x } else { wj };
        }
        self.op[idx]
    }

    /// Hash over rank, size and the full table; used to detect stale
    /// translation sets.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.rank.hash(&mut h);
        self.size.hash(&mut h);
        self.op.hash(&mut h);
        h.finish()
    }
}

/// A Menger carrier together with a total binary subtraction and a zero.
///
/// Construction only validates shapes. Whether the tables satisfy the
/// subtraction and compatibility laws is decided by the checkers; the
/// [`VerifiedAlgebra`] wrapper certifies that they all passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtractionMengerAlgebra {
    menger: FiniteMengerAlgebra,
    sub: Vec<usize>,
    zero: usize,
}

impl SubtractionMengerAlgebra {
    pub fn new(
        menger: FiniteMengerAlgebra,
        sub: Vec<usize>,
        zero: usize,
    ) -> Result<Self, StructureError> {
        let m = menger.size();
        if sub.len() != m * m {
            return Err(StructureError::WrongTableSize {
                got: sub.len(),
                expected: m * m,
            });
        }
        if let Some((index, &value)) = sub.iter().enumerate().find(|(_, &v)| v >= m) {
            return Err(StructureError::EntryOutOfRange {
                index,
                value,
                size: m,
            });
        }
        if zero >= m {
            return Err(StructureError::ZeroOutOfRange { zero, size: m });
        }
        Ok(SubtractionMengerAlgebra { menger, sub, zero })
    }

    /// Builds both tables from closures.
    pub fn from_fns(
        rank: usize,
        size: usize,
        op: impl FnMut(usize, &[usize]) -> usize,
        mut sub: impl FnMut(usize, usize) -> usize,
        zero: usize,
    ) -> Result<Self, StructureError> {
        let menger = FiniteMengerAlgebra::from_fn(rank, size, op)?;
        let mut table = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                table.push(sub(x, y));
            }
        }
        Self::new(menger, table, zero)
    }

    pub fn menger(&self) -> &FiniteMengerAlgebra {
        &self.menger
    }

    pub fn rank(&self) -> usize {
        self.menger.rank()
    }

    pub fn size(&self) -> usize {
        self.menger.size()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.sub[x * self.menger.size() + y]
    }

    /// The induced order: `x <= y` iff `x - y = 0`.
    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.sub(x, y) == self.zero
    }

    /// The meet `x ^ y = x - (x - y)`.
    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.sub(x, self.sub(x, y))
    }

    #[inline]
    pub fn op(&self, x: usize, ys: &[usize]) -> usize {
        self.menger.op(x, ys)
    }

    #[inline]
    pub fn op_subst(&self, u: usize, w: &[usize], i: usize, x: usize) -> usize {
        self.menger.op_subst(u, w, i, x)
    }

    /// Masks of the down-sets `{g | g <= v}`, indexed by `v`.
    pub(crate) fn down_masks(&self) -> Vec<ElemMask> {
        let m = self.size();
        (0..m)
            .map(|v| {
                let mut mask = ElemMask::empty(m);
                for g in 0..m {
                    if self.leq(g, v) {
                        mask.insert(g);
                    }
                }
                mask
            })
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("translation set was computed for a different operation table")]
    TranslationMismatch,
}

fn guard_translations(
    m: &FiniteMengerAlgebra,
    t: &TranslationSet,
) -> Result<(), KernelError> {
    if t.fingerprint() != m.fingerprint() {
        return Err(KernelError::TranslationMismatch);
    }
    Ok(())
}

/// Membership matrix of a binary relation on the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRelation {
    size: usize,
    bits: Vec<bool>,
}

impl BinaryRelation {
    pub fn empty(size: usize) -> Self {
        BinaryRelation {
            size,
            bits: vec![false; size * size],
        }
    }

    pub fn full(size: usize) -> Self {
        BinaryRelation {
            size,
            bits: vec![true; size * size],
        }
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(size);
        for x in 0..size {
            for y in 0..size {
                if f(x, y) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(size);
        for &(x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits[x * self.size + y] = true;
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.size + y]
    }

    /// Related pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.size {
            for y in 0..self.size {
                if self.contains(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|x| self.contains(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|y| self.contains(x, y) == self.contains(y, x)))
    }

    pub fn is_transitive(&self) -> bool {
        self.first_transitivity_gap().is_none()
    }

    pub fn first_transitivity_gap(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.size {
            for y in 0..self.size {
                if !self.contains(x, y) {
                    continue;
                }
                for z in 0..self.size {
                    if self.contains(y, z) && !self.contains(x, z) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.size).all(|x| {
            (0..self.size).all(|y| x == y || !(self.contains(x, y) && self.contains(y, x)))
        })
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    pub fn is_quasiorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }
}

/// Checks superassociativity `x[y..][z..] = x[y1[z..] .. yn[z..]]` over
/// all `m^(2n+1)` substitutions. Witnesses are `[x, y1..yn, z1..zn]`.
pub fn check_superassociativity(m: &FiniteMengerAlgebra, cfg: &CheckConfig) -> CheckReport {
    let n = m.rank();
    let size = m.size();
    let mut b = ReportBuilder::new(cfg);
    b.checked(tuple_count(2 * n + 1, size));
    let mut inner = vec![0usize; n];
    for_each_tuple(n + 1, size, |xy| {
        let (x, ys) = (xy[0], &xy[1..]);
        let left_head = m.op(x, ys);
        for_each_tuple(n, size, |zs| {
            let lhs = m.op(left_head, zs);
            for (slot, &y) in inner.iter_mut().zip(ys) {
                *slot = m.op(y, zs);
            }
            let rhs = m.op(x, &inner);
            if lhs != rhs {
                let mut assignment = Vec::with_capacity(2 * n + 1);
                assignment.extend_from_slice(xy);
                assignment.extend_from_slice(zs);
                b.violate(laws::SUPERASSOC, assignment);
            }
        });
    });
    b.finish()
}

/// Checks the four subtraction axioms. Witnesses carry the elements in
/// the order the law quantifies them.
pub fn check_subtraction_axioms(s: &SubtractionMengerAlgebra, cfg: &CheckConfig) -> CheckReport {
    let m = s.size();
    let zero = s.zero();
    let mut b = ReportBuilder::new(cfg);

    for x in 0..m {
        for y in 0..m {
            b.require(laws::SUB_1, s.sub(x, s.sub(y, x)) == x, || vec![x, y]);
            b.require(laws::SUB_2, s.meet(x, y) == s.meet(y, x), || vec![x, y]);
        }
    }
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                b.require(
                    laws::SUB_3,
                    s.sub(s.sub(x, y), z) == s.sub(s.sub(x, z), y),
                    || vec![x, y, z],
                );
            }
        }
    }
    b.require(laws::SUB_4, s.sub(zero, zero) == zero, Vec::new);
    b.finish()
}

/// Checks the compatibility of subtraction with superposition:
/// distribution from the first argument, distribution of meets inside
/// an argument position, and the translation chain law. Witness layouts:
/// `[x, y, z1..zn]`, `[u, i, w(≠i).., x, y]`, `[x, y, z, t1, t2]` (the
/// last two being translation-set indices).
pub fn check_compat_axioms(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    cfg: &CheckConfig,
) -> Result<CheckReport, KernelError> {
    guard_translations(s.menger(), t)?;
    let m = s.size();
    let n = s.rank();
    let mut b = ReportBuilder::new(cfg);

    // (x-y)[z..] = x[z..] - y[z..]
    b.checked(tuple_count(n, m) * (m as u64) * (m as u64));
    for x in 0..m {
        for y in 0..m {
            let d = s.sub(x, y);
            for_each_tuple(n, m, |zs| {
                if s.op(d, zs) != s.sub(s.op(x, zs), s.op(y, zs)) {
                    let mut a = vec![x, y];
                    a.extend_from_slice(zs);
                    b.violate(laws::COMPAT_OUTER, a);
                }
            });
        }
    }

    // u[w..|i x^y] = u[w..|i x] - u[w..|i x-y]
    check_inner_meet_law(s, laws::COMPAT_INNER, &mut b);

    // x<=y & z<=t1(x) & z<=t2(y) -> z<=t2(x)
    b.checked(
        (m as u64).pow(3) * (t.len() as u64) * (t.len() as u64),
    );
    for x in 0..m {
        for y in 0..m {
            if !s.leq(x, y) {
                continue;
            }
            for z in 0..m {
                for (i1, t1) in t.maps().enumerate() {
                    if !s.leq(z, t1[x]) {
                        continue;
                    }
                    for (i2, t2) in t.maps().enumerate() {
                        if s.leq(z, t2[y]) && !s.leq(z, t2[x]) {
                            b.violate(laws::COMPAT_CHAIN, vec![x, y, z, i1, i2]);
                        }
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

/// Scan of `u[w..|i x^y] = u[w..|i x] - u[w..|i x-y]` shared by the
/// compatibility and equivalent-forms checkers.
fn check_inner_meet_law(s: &SubtractionMengerAlgebra, law: &'static str, b: &mut ReportBuilder) {
    let m = s.size();
    let n = s.rank();
    b.checked((m as u64) * (n as u64) * tuple_count(n - 1, m) * (m as u64) * (m as u64));
    for u in 0..m {
        for i in 0..n {
            for_each_tuple(n - 1, m, |wrest| {
                let mut w = vec![0usize; n];
                let mut k = 0;
                for (j, slot) in w.iter_mut().enumerate() {
                    if j != i {
                        *slot = wrest[k];
                        k += 1;
                    }
                }
                for x in 0..m {
                    for y in 0..m {
                        let lhs = s.op_subst(u, &w, i, s.meet(x, y));
                        let rhs = s.sub(
                            s.op_subst(u, &w, i, x),
                            s.op_subst(u, &w, i, s.sub(x, y)),
                        );
                        if lhs != rhs {
                            let mut a = vec![u, i];
                            a.extend_from_slice(wrest);
                            a.push(x);
                            a.push(y);
                            b.violate(law, a);
                        }
                    }
                }
            });
        }
    }
}

/// Checks every derived identity that must follow from the axioms: the
/// zero laws, the order monotonicity laws, the meet calculus, and the
/// translation-quantified consequences. A violation on an input that
/// passed the axiom checks signals a checker bug, not a bad input.
pub fn check_derived_identities(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    cfg: &CheckConfig,
) -> Result<CheckReport, KernelError> {
    guard_translations(s.menger(), t)?;
    let m = s.size();
    let n = s.rank();
    let zero = s.zero();
    let mut b = ReportBuilder::new(cfg);

    for x in 0..m {
        b.require(laws::ZERO_DIFF, s.sub(x, x) == zero, || vec![x]);
        b.require(laws::DIFF_ZERO, s.sub(x, zero) == x, || vec![x]);
        b.require(laws::ZERO_BELOW, s.sub(zero, x) == zero, || vec![x]);
        b.require(laws::ZERO_LEAST, s.leq(zero, x), || vec![x]);
    }

    for x in 0..m {
        for y in 0..m {
            b.require(laws::DIFF_DECREASES, s.leq(s.sub(x, y), x), || vec![x, y]);
            b.require(
                laws::LEQ_FIXPOINT,
                s.leq(x, y) == (s.meet(x, y) == x),
                || vec![x, y],
            );
            b.require(
                laws::MEET_BELOW_SND,
                s.sub(s.meet(x, y), y) == zero,
                || vec![x, y],
            );
            b.require(
                laws::DIFF_IDEMPOTENT,
                s.sub(s.sub(x, y), y) == s.sub(x, y),
                || vec![x, y],
            );
            b.require(
                laws::MEET_FIXPOINT,
                s.leq(x, y) == (s.meet(x, y) == x),
                || vec![x, y],
            );
            b.require(
                laws::DISJOINT_DIFF,
                s.meet(x, y) != zero || s.sub(x, y) == x,
                || vec![x, y],
            );
            b.require(
                laws::DIFF_MEET_ZERO,
                s.meet(s.sub(x, y), y) == zero,
                || vec![x, y],
            );
            b.require(
                laws::DIFF_VIA_MEET,
                s.sub(x, y) == s.sub(x, s.meet(x, y)),
                || vec![x, y],
            );
        }
    }

    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                b.require(
                    laws::TRIANGLE,
                    s.sub(s.sub(s.sub(x, y), s.sub(x, z)), s.sub(z, y)) == zero,
                    || vec![x, y, z],
                );
                b.require(
                    laws::MONO_LEFT,
                    !s.leq(x, y) || s.leq(s.sub(x, z), s.sub(y, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::ANTI_RIGHT,
                    !s.leq(x, y) || s.leq(s.sub(z, y), s.sub(z, x)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::DIFF_EXCHANGE,
                    s.sub(s.sub(x, y), z) == s.sub(s.sub(x, z), s.sub(y, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_GLB,
                    !(s.leq(x, y) && s.leq(x, z)) || s.leq(x, s.meet(y, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_MONO,
                    !s.leq(x, y) || s.leq(s.meet(x, z), s.meet(y, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_DIFF_DIST,
                    s.meet(x, s.sub(y, z)) == s.sub(s.meet(x, y), s.meet(x, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_DIFF_ABSORB,
                    s.sub(s.meet(x, y), s.sub(y, z)) == s.meet(s.meet(x, y), z),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_DIFF_BOTH,
                    s.sub(s.meet(x, y), z) == s.meet(s.sub(x, z), s.sub(y, z)),
                    || vec![x, y, z],
                );
                b.require(
                    laws::MEET_DIFF_LEFT,
                    s.sub(s.meet(x, y), z) == s.meet(s.sub(x, z), y),
                    || vec![x, y, z],
                );
            }
        }
    }

    for x in 0..m {
        for y in 0..m {
            for u in 0..m {
                for v in 0..m {
                    b.require(
                        laws::MONO_BOTH,
                        !(s.leq(x, y) && s.leq(u, v)) || s.leq(s.sub(x, v), s.sub(y, u)),
                        || vec![x, y, u, v],
                    );
                }
            }
        }
    }

    // zero is absorbing in every operation position
    b.checked(tuple_count(n, m));
    for_each_tuple(n, m, |xs| {
        if s.op(zero, xs) != zero {
            b.violate(laws::ZERO_OUTER, xs.to_vec());
        }
    });
    b.checked((m as u64) * (n as u64) * tuple_count(n - 1, m));
    for u in 0..m {
        for i in 0..n {
            for_each_tuple(n - 1, m, |wrest| {
                let mut w = vec![0usize; n];
                let mut k = 0;
                for (j, slot) in w.iter_mut().enumerate() {
                    if j != i {
                        *slot = wrest[k];
                        k += 1;
                    }
                }
                if s.op_subst(u, &w, i, zero) != zero {
                    let mut a = vec![u, i];
                    a.extend_from_slice(wrest);
                    b.violate(laws::ZERO_INNER, a);
                }
            });
        }
    }

    check_inner_meet_law(s, laws::MEET_INNER, &mut b);

    // meets distribute over superposition from the first argument
    b.checked((m as u64) * (m as u64) * tuple_count(n, m));
    for x in 0..m {
        for y in 0..m {
            let xy = s.meet(x, y);
            for_each_tuple(n, m, |zs| {
                if s.op(xy, zs) != s.meet(s.op(x, zs), s.op(y, zs)) {
                    let mut a = vec![x, y];
                    a.extend_from_slice(zs);
                    b.violate(laws::MEET_OUTER, a);
                }
            });
        }
    }

    // translation-quantified laws; witnesses end with translation indices
    let count = t.len() as u64;
    b.checked((m as u64) * (m as u64) * count * 3);
    for x in 0..m {
        for y in 0..m {
            let xy = s.meet(x, y);
            let d = s.sub(x, y);
            for (it, tm) in t.maps().enumerate() {
                if tm[xy] != s.sub(tm[x], tm[d]) {
                    b.violate(laws::MEET_POLY, vec![x, y, it]);
                }
                if tm[d] != s.sub(tm[x], tm[xy]) {
                    b.violate(laws::POLY_DIFF, vec![x, y, it]);
                }
                if !s.leq(s.sub(tm[x], tm[y]), tm[d]) {
                    b.violate(laws::POLY_SUBADDITIVE, vec![x, y, it]);
                }
            }
        }
    }

    b.checked((m as u64) * (m as u64) * count * count * 2);
    for x in 0..m {
        for y in 0..m {
            let xy = s.meet(x, y);
            let d = s.sub(x, y);
            for (i1, t1) in t.maps().enumerate() {
                let a1 = t1[xy];
                for (i2, t2) in t.maps().enumerate() {
                    if s.meet(a1, t2[d]) != zero {
                        b.violate(laws::POLY_ORTHOGONAL, vec![x, y, i1, i2]);
                    }
                    if s.meet(a1, t2[y]) != s.meet(a1, t2[xy]) {
                        b.violate(laws::POLY_MEET_SWAP, vec![x, y, i1, i2]);
                    }
                }
            }
        }
    }

    let down = s.down_masks();
    b.checked((m as u64).pow(3) * count * count * ((m as u64) + 2));
    for x in 0..m {
        for y in 0..m {
            let xy = s.meet(x, y);
            for z in 0..m {
                let yz = s.meet(y, z);
                let xyz = s.meet(xy, z);
                for (i1, t1) in t.maps().enumerate() {
                    let lhs_head = t1[xyz];
                    let rhs_head = t1[xy];
                    for (i2, t2) in t.maps().enumerate() {
                        let lhs = s.meet(lhs_head, t2[y]);
                        let rhs = s.meet(rhs_head, t2[yz]);
                        if !s.leq(lhs, rhs) {
                            b.violate(laws::POLY_MEET_SHIFT_LEQ, vec![x, y, z, i1, i2]);
                        }
                        if lhs != rhs {
                            b.violate(laws::POLY_MEET_SHIFT_EQ, vec![x, y, z, i1, i2]);
                        }
                        // forall g: g<=t1(x^y) & g<=t2(y^z) -> g<=t2(x^y^z)
                        for g in down[rhs_head].intersection_outside(&down[t2[yz]], &down[t2[xyz]])
                        {
                            b.violate(laws::POLY_MEET_BOUND, vec![x, y, z, i1, i2, g]);
                        }
                    }
                }
            }
        }
    }

    Ok(b.finish())
}

/// Substitution-compatibility flags of a binary relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationProperties {
    pub stable: bool,
    pub l_regular: bool,
    pub v_regular: bool,
    pub i_regular: Vec<bool>,
    pub weakly_steady: bool,
}

/// `(x,y) in r -> (x[z..], y[z..]) in r`.
pub fn relation_is_l_regular(m: &FiniteMengerAlgebra, r: &BinaryRelation) -> bool {
    let mut ok = true;
    for (x, y) in r.pairs() {
        for_each_tuple(m.rank(), m.size(), |zs| {
            if ok && !r.contains(m.op(x, zs), m.op(y, zs)) {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// `(x,y) in r -> (u[w..|i x], u[w..|i y]) in r` for the given position.
pub fn relation_is_i_regular(m: &FiniteMengerAlgebra, r: &BinaryRelation, i: usize) -> bool {
    let n = m.rank();
    let size = m.size();
    let mut w = vec![0usize; n];
    for (x, y) in r.pairs() {
        for u in 0..size {
            let mut ok = true;
            for_each_tuple(n - 1, size, |wrest| {
                if !ok {
                    return;
                }
                let mut k = 0;
                for (j, slot) in w.iter_mut().enumerate() {
                    if j != i {
                        *slot = wrest[k];
                        k += 1;
                    }
                }
                if !r.contains(m.op_subst(u, &w, i, x), m.op_subst(u, &w, i, y)) {
                    ok = false;
                }
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

/// `(x1,y1)..(xn,yn) in r -> (z[x..], z[y..]) in r`, by direct scan over
/// tuples of related pairs.
pub fn relation_is_v_regular(m: &FiniteMengerAlgebra, r: &BinaryRelation) -> bool {
    let n = m.rank();
    let size = m.size();
    let pairs = r.pairs();
    let mut xs = vec![0usize; n];
    let mut ys = vec![0usize; n];
    let mut ok = true;
    for_each_tuple(n, pairs.len(), |sel| {
        if !ok {
            return;
        }
        for (k, &p) in sel.iter().enumerate() {
            xs[k] = pairs[p].0;
            ys[k] = pairs[p].1;
        }
        for z in 0..size {
            if !r.contains(m.op(z, &xs), m.op(z, &ys)) {
                ok = false;
                return;
            }
        }
    });
    ok
}

/// Stability by direct scan: all of `(x,y)` and the argument pairs drawn
/// from `r` must map to a related pair.
pub fn relation_is_stable(m: &FiniteMengerAlgebra, r: &BinaryRelation) -> bool {
    let n = m.rank();
    let pairs = r.pairs();
    let mut xs = vec![0usize; n];
    let mut ys = vec![0usize; n];
    let mut ok = true;
    for &(x, y) in &pairs {
        for_each_tuple(n, pairs.len(), |sel| {
            if !ok {
                return;
            }
            for (k, &p) in sel.iter().enumerate() {
                xs[k] = pairs[p].0;
                ys[k] = pairs[p].1;
            }
            if !r.contains(m.op(x, &xs), m.op(y, &ys)) {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// `(x,y),(z,t1(x)),(z,t2(y)) in r -> (z,t2(x)) in r` over all pairs of
/// translation functions.
pub fn relation_is_weakly_steady(
    m: &FiniteMengerAlgebra,
    r: &BinaryRelation,
    t: &TranslationSet,
) -> Result<bool, KernelError> {
    guard_translations(m, t)?;
    let size = m.size();
    for (x, y) in r.pairs() {
        for z in 0..size {
            for t1 in t.maps() {
                if !r.contains(z, t1[x]) {
                    continue;
                }
                for t2 in t.maps() {
                    if r.contains(z, t2[y]) && !r.contains(z, t2[x]) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// Above this size the quadratic-in-pairs direct scans for stability and
// v-regularity are skipped on quasiorders (where the regularity
// decomposition decides them exactly) and only run as cross-checks.
const DIRECT_SCAN_BUDGET: u64 = 4_000_000;

/// Decides all substitution-compatibility flags of `r`, computing the
/// translation closure internally for weak steadiness.
pub fn relation_properties(
    m: &FiniteMengerAlgebra,
    r: &BinaryRelation,
) -> Result<RelationProperties, TermError> {
    let t = translations(m)?;
    Ok(relation_properties_with(m, r, &t))
}

/// As [`relation_properties`], reusing an already-computed translation
/// set.
///
/// On quasiorders, v-regularity is decided through the per-position
/// regularity flags and stability through `v-regular and l-regular`
/// (both decompositions are exact for quasiorders); the direct scans
/// are still run as cross-checks whenever the pair space is small.
pub fn relation_properties_with(
    m: &FiniteMengerAlgebra,
    r: &BinaryRelation,
    t: &TranslationSet,
) -> RelationProperties {
    assert_eq!(r.size(), m.size(), "relation must cover the carrier");
    let n = m.rank();
    let l_regular = relation_is_l_regular(m, r);
    let i_regular: Vec<bool> = (0..n).map(|i| relation_is_i_regular(m, r, i)).collect();
    let quasi = r.is_quasiorder();
    let pair_count = r.pairs().len() as u64;
    let v_cost = pair_count.pow(n as u32).saturating_mul(m.size() as u64);
    let v_regular = if quasi {
        let v = i_regular.iter().all(|&b| b);
        if v_cost <= DIRECT_SCAN_BUDGET {
            assert_eq!(
                v,
                relation_is_v_regular(m, r),
                "quasiorder v-regularity must match its per-position decomposition"
            );
        }
        v
    } else {
        relation_is_v_regular(m, r)
    };
    let stable_cost = v_cost.saturating_mul(pair_count);
    let stable = if quasi {
        let st = v_regular && l_regular;
        if stable_cost <= DIRECT_SCAN_BUDGET {
            assert_eq!(
                st,
                relation_is_stable(m, r),
                "quasiorder stability must match v-regular and l-regular"
            );
        }
        st
    } else {
        relation_is_stable(m, r)
    };
    let weakly_steady =
        relation_is_weakly_steady(m, r, t).expect("translation set fingerprint already matched");
    RelationProperties {
        stable,
        l_regular,
        v_regular,
        i_regular,
        weakly_steady,
    }
}

/// Absorption flags of a subset, given as a membership mask over the
/// carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetProperties {
    pub stable_subset: bool,
    pub l_ideal: bool,
    pub i_ideal: Vec<bool>,
}

pub fn subset_properties(m: &FiniteMengerAlgebra, members: &[bool]) -> SubsetProperties {
    assert_eq!(members.len(), m.size(), "mask must cover the carrier");
    let n = m.rank();
    let size = m.size();
    let elems: Vec<usize> = (0..size).filter(|&x| members[x]).collect();

    let mut stable_subset = true;
    let mut args = vec![0usize; n];
    for &g in &elems {
        for_each_tuple(n, elems.len(), |sel| {
            if !stable_subset {
                return;
            }
            for (k, &p) in sel.iter().enumerate() {
                args[k] = elems[p];
            }
            if !members[m.op(g, &args)] {
                stable_subset = false;
            }
        });
    }

    // any argument tuple touching the subset must land in the subset
    let mut l_ideal = true;
    for x in 0..size {
        for_each_tuple(n, size, |hs| {
            if l_ideal && hs.iter().any(|&h| members[h]) && !members[m.op(x, hs)] {
                l_ideal = false;
            }
        });
        if !l_ideal {
            break;
        }
    }

    let mut i_ideal = Vec::with_capacity(n);
    for i in 0..n {
        let mut ok = true;
        let mut w = vec![0usize; n];
        'outer: for &h in &elems {
            for u in 0..size {
                let mut local_ok = true;
                for_each_tuple(n - 1, size, |wrest| {
                    if !local_ok {
                        return;
                    }
                    let mut k = 0;
                    for (j, slot) in w.iter_mut().enumerate() {
                        if j != i {
                            *slot = wrest[k];
                            k += 1;
                        }
                    }
                    if !members[m.op_subst(u, &w, i, h)] {
                        local_ok = false;
                    }
                });
                if !local_ok {
                    ok = false;
                    break 'outer;
                }
            }
        }
        i_ideal.push(ok);
    }

    assert_eq!(
        l_ideal,
        i_ideal.iter().all(|&b| b),
        "a subset is an l-ideal exactly when it is an i-ideal in every position"
    );

    SubsetProperties {
        stable_subset,
        l_ideal,
        i_ideal,
    }
}

/// Evaluates the inner-position compatibility law and its three
/// equivalent forms independently and reports whether the four truth
/// values agree. When they disagree, the first witness of every failing
/// form is reported; when they agree (all true or all false) the report
/// holds with no witnesses.
pub fn check_prop4_equivalences(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    cfg: &CheckConfig,
) -> Result<CheckReport, KernelError> {
    guard_translations(s.menger(), t)?;
    let m = s.size();
    let n = s.rank();
    let mut b = ReportBuilder::new(cfg);

    let mut first_12: Option<Vec<usize>> = None;
    let mut first_22: Option<Vec<usize>> = None;
    let mut w = vec![0usize; n];
    b.checked((m as u64) * (n as u64) * tuple_count(n - 1, m) * (m as u64) * (m as u64) * 2);
    for u in 0..m {
        for i in 0..n {
            for_each_tuple(n - 1, m, |wrest| {
                if first_12.is_some() && first_22.is_some() {
                    return;
                }
                let mut k = 0;
                for (j, slot) in w.iter_mut().enumerate() {
                    if j != i {
                        *slot = wrest[k];
                        k += 1;
                    }
                }
                for x in 0..m {
                    for y in 0..m {
                        if first_12.is_none() {
                            let lhs = s.op_subst(u, &w, i, s.meet(x, y));
                            let rhs = s.sub(
                                s.op_subst(u, &w, i, x),
                                s.op_subst(u, &w, i, s.sub(x, y)),
                            );
                            if lhs != rhs {
                                let mut a = vec![u, i];
                                a.extend_from_slice(wrest);
                                a.push(x);
                                a.push(y);
                                first_12 = Some(a);
                            }
                        }
                        if first_22.is_none() && s.leq(x, y) {
                            let lhs = s.op_subst(u, &w, i, s.sub(y, x));
                            let rhs =
                                s.sub(s.op_subst(u, &w, i, y), s.op_subst(u, &w, i, x));
                            if lhs != rhs {
                                let mut a = vec![u, i];
                                a.extend_from_slice(wrest);
                                a.push(x);
                                a.push(y);
                                first_22 = Some(a);
                            }
                        }
                    }
                }
            });
        }
    }

    let mut first_23: Option<Vec<usize>> = None;
    let mut first_24: Option<Vec<usize>> = None;
    b.checked((m as u64) * (m as u64) * (t.len() as u64) * 2);
    'scan: for x in 0..m {
        for y in 0..m {
            for (it, tm) in t.maps().enumerate() {
                if first_23.is_none()
                    && s.leq(x, y)
                    && tm[s.sub(y, x)] != s.sub(tm[y], tm[x])
                {
                    first_23 = Some(vec![x, y, it]);
                }
                if first_24.is_none() && tm[s.meet(x, y)] != s.sub(tm[x], tm[s.sub(x, y)]) {
                    first_24 = Some(vec![x, y, it]);
                }
                if first_23.is_some() && first_24.is_some() {
                    break 'scan;
                }
            }
        }
    }

    let truths = [
        first_12.is_none(),
        first_22.is_none(),
        first_23.is_none(),
        first_24.is_none(),
    ];
    if truths.iter().any(|&v| v != truths[0]) {
        if let Some(a) = first_12 {
            b.violate(laws::COMPAT_INNER, a);
        }
        if let Some(a) = first_22 {
            b.violate(laws::INNER_DIFF_LEQ, a);
        }
        if let Some(a) = first_23 {
            b.violate(laws::POLY_DIFF_LEQ, a);
        }
        if let Some(a) = first_24 {
            b.violate(laws::POLY_MEET_DIFF, a);
        }
    }
    Ok(b.finish())
}

/// An algebra whose operation tables passed superassociativity, the
/// subtraction axioms, and all three compatibility laws. Produced only
/// by [`verify_algebra`]; the translation closure computed during
/// verification is kept for reuse.
#[derive(Debug, Clone)]
pub struct VerifiedAlgebra {
    algebra: SubtractionMengerAlgebra,
    translations: TranslationSet,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("axiom group `{group}` failed:\n{report}")]
    Axioms {
        group: &'static str,
        report: CheckReport,
    },
    #[error(transparent)]
    Terms(#[from] TermError),
}

/// Runs every axiom check and wraps the algebra on success.
pub fn verify_algebra(algebra: SubtractionMengerAlgebra) -> Result<VerifiedAlgebra, VerifyError> {
    let cfg = CheckConfig::default();
    let report = check_superassociativity(algebra.menger(), &cfg);
    if !report.holds {
        return Err(VerifyError::Axioms {
            group: "superassociativity",
            report,
        });
    }
    let report = check_subtraction_axioms(&algebra, &cfg);
    if !report.holds {
        return Err(VerifyError::Axioms {
            group: "subtraction",
            report,
        });
    }
    let translations = translations(algebra.menger())?;
    let report = check_compat_axioms(&algebra, &translations, &cfg)
        .expect("translations were computed for this table");
    if !report.holds {
        return Err(VerifyError::Axioms {
            group: "compatibility",
            report,
        });
    }
    Ok(VerifiedAlgebra {
        algebra,
        translations,
    })
}

impl VerifiedAlgebra {
    pub fn algebra(&self) -> &SubtractionMengerAlgebra {
        &self.algebra
    }

    pub fn translations(&self) -> &TranslationSet {
        &self.translations
    }
}
