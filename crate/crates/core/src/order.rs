//! The induced order of a subtraction Menger algebra and everything
//! built on top of it: meets, segment joins, filters, the maximal
//! filters separating a pair of elements, and the determining-pair data
//! (equivalence, ideal class, class partition) that seeds a simplest
//! representation.

use thiserror::Error;

use crate::kernel::{
    relation_is_i_regular, subset_properties, BinaryRelation, SubtractionMengerAlgebra,
};
use crate::report::{laws, CheckConfig, CheckReport, ReportBuilder};
use crate::terms::TranslationSet;
use crate::tuples::for_each_tuple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("induced relation violates `{law}` at {witness:?}; the algebra was not verified")]
    NotAnOrder {
        law: &'static str,
        witness: Vec<usize>,
    },
    #[error("elements {a} and {b} are not separable: {a} <= {b}")]
    NotSeparable { a: usize, b: usize },
    #[error("determining pair property `{property}` failed at {witness:?}")]
    DeterminingPairViolation {
        property: &'static str,
        witness: Vec<usize>,
    },
    #[error("order structure was built for a different algebra")]
    AlgebraMismatch,
}

/// The order `x <= y iff x - y = 0` with its meet table and the partial
/// join table (undefined where no common upper bound exists).
#[derive(Debug, Clone)]
pub struct OrderStructure {
    fingerprint: u64,
    size: usize,
    leq: BinaryRelation,
    meet: Vec<usize>,
    join: Vec<Option<usize>>,
}

impl OrderStructure {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq.contains(x, y)
    }

    pub fn leq_relation(&self) -> &BinaryRelation {
        &self.leq
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.size + y]
    }

    /// The segment join, or `None` when `x` and `y` have no common
    /// upper bound.
    #[inline]
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x * self.size + y]
    }

    /// Common upper bounds of `x` and `y`, ascending.
    pub fn upper_bounds(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.size)
            .filter(|&a| self.leq(x, a) && self.leq(y, a))
            .collect()
    }

    /// Ordered pairs `(a, b)` with `a` not below `b`, in lexicographic
    /// order; exactly the pairs a filter can separate.
    pub fn separable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            for b in 0..self.size {
                if !self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn algebra_fingerprint(s: &SubtractionMengerAlgebra) -> u64 {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let mut h = DefaultHasher::new();
    s.menger().fingerprint().hash(&mut h);
    for x in 0..s.size() {
        for y in 0..s.size() {
            s.sub(x, y).hash(&mut h);
        }
    }
    s.zero().hash(&mut h);
    h.finish()
}

fn guard_order(s: &SubtractionMengerAlgebra, o: &OrderStructure) -> Result<(), OrderError> {
    if o.fingerprint != algebra_fingerprint(s) {
        return Err(OrderError::AlgebraMismatch);
    }
    Ok(())
}

/// Builds the order structure from the subtraction table, validating
/// that the induced relation really is a partial order. Joins are
/// evaluated at the first common upper bound; agreement across bounds
/// is the subject of [`check_join_wellposed`].
pub fn build_order(s: &SubtractionMengerAlgebra) -> Result<OrderStructure, OrderError> {
    let m = s.size();
    let leq = BinaryRelation::from_fn(m, |x, y| s.leq(x, y));

    for x in 0..m {
        if !leq.contains(x, x) {
            return Err(OrderError::NotAnOrder {
                law: "reflexive",
                witness: vec![x],
            });
        }
    }
    for x in 0..m {
        for y in 0..m {
            if x != y && leq.contains(x, y) && leq.contains(y, x) {
                return Err(OrderError::NotAnOrder {
                    law: "antisymmetric",
                    witness: vec![x, y],
                });
            }
        }
    }
    if let Some((x, y, z)) = leq.first_transitivity_gap() {
        return Err(OrderError::NotAnOrder {
            law: "transitive",
            witness: vec![x, y, z],
        });
    }

    let mut meet = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            meet.push(s.meet(x, y));
        }
    }

    let mut join = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            let bound = (0..m).find(|&a| leq.contains(x, a) && leq.contains(y, a));
            join.push(bound.map(|a| join_within(s, a, x, y)));
        }
    }

    Ok(OrderStructure {
        fingerprint: algebra_fingerprint(s),
        size: m,
        leq,
        meet,
        join,
    })
}

/// `x v y` evaluated inside the segment below `a`.
#[inline]
fn join_within(s: &SubtractionMengerAlgebra, a: usize, x: usize, y: usize) -> usize {
    s.sub(a, s.meet(s.sub(a, x), s.sub(a, y)))
}

/// Checks that the join expression agrees across every pair of common
/// upper bounds. Witnesses are `[x, y, a, b]`.
pub fn check_join_wellposed(
    s: &SubtractionMengerAlgebra,
    o: &OrderStructure,
    cfg: &CheckConfig,
) -> Result<CheckReport, OrderError> {
    guard_order(s, o)?;
    let m = s.size();
    let mut b = ReportBuilder::new(cfg);
    for x in 0..m {
        for y in 0..m {
            let ubs = o.upper_bounds(x, y);
            for (k, &ua) in ubs.iter().enumerate() {
                for &ub in &ubs[k + 1..] {
                    b.require(
                        laws::JOIN_WELLPOSED,
                        join_within(s, ua, x, y) == join_within(s, ub, x, y),
                        || vec![x, y, ua, ub],
                    );
                }
            }
        }
    }
    Ok(b.finish())
}

/// Checks the join calculus: absorption, associativity, distributivity,
/// difference laws, and compatibility of joins with superposition and
/// with every translation, including the existence claims. Every law is
/// guarded by the existence of the joins it mentions.
pub fn check_join_identities(
    s: &SubtractionMengerAlgebra,
    o: &OrderStructure,
    t: &TranslationSet,
    cfg: &CheckConfig,
) -> Result<CheckReport, OrderError> {
    guard_order(s, o)?;
    if t.fingerprint() != s.menger().fingerprint() {
        return Err(OrderError::AlgebraMismatch);
    }
    let m = s.size();
    let n = s.rank();
    let mut b = ReportBuilder::new(cfg);

    for x in 0..m {
        for y in 0..m {
            if let Some(j) = o.join(x, y) {
                b.require(laws::JOIN_ABSORB, o.meet(x, j) == x, || vec![x, y]);
                b.require(
                    laws::JOIN_CANCEL,
                    s.sub(j, s.sub(y, x)) == x,
                    || vec![x, y],
                );
            }
            // x^y and x-y always share the upper bound x
            b.require(
                laws::MEET_ABSORB,
                o.join(x, o.meet(x, y)) == Some(x),
                || vec![x, y],
            );
            b.require(
                laws::MEET_DIFF_SPLIT,
                o.join(o.meet(x, y), s.sub(x, y)) == Some(x),
                || vec![x, y],
            );
            b.require(
                laws::JOIN_RESTORE,
                !o.leq(y, x) || o.join(s.sub(x, y), y) == Some(x),
                || vec![x, y],
            );
        }
    }

    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                // associativity inside a shared segment
                if (0..m).any(|a| o.leq(x, a) && o.leq(y, a) && o.leq(z, a)) {
                    let lhs = o.join(x, y).and_then(|xy| o.join(xy, z));
                    let rhs = o.join(y, z).and_then(|yz| o.join(x, yz));
                    b.require(
                        laws::JOIN_ASSOC,
                        lhs.is_some() && lhs == rhs,
                        || vec![x, y, z],
                    );
                    let lhs = o.join(x, o.meet(y, z));
                    let rhs = match (o.join(x, y), o.join(x, z)) {
                        (Some(xy), Some(xz)) => Some(o.meet(xy, xz)),
                        _ => None,
                    };
                    b.require(
                        laws::JOIN_MEET_DIST,
                        lhs.is_some() && lhs == rhs,
                        || vec![x, y, z],
                    );
                }
                if let Some(yz) = o.join(y, z) {
                    let rhs = o.join(o.meet(x, y), o.meet(x, z));
                    b.require(
                        laws::MEET_JOIN_DIST,
                        rhs == Some(o.meet(x, yz)),
                        || vec![x, y, z],
                    );
                }
                if let Some(xy) = o.join(x, y) {
                    let rhs = o.join(s.sub(x, z), s.sub(y, z));
                    b.require(
                        laws::JOIN_DIFF_DIST,
                        rhs == Some(s.sub(xy, z)),
                        || vec![x, y, z],
                    );
                }
                if o.leq(x, z) && o.leq(y, z) {
                    b.require(
                        laws::JOIN_LUB,
                        o.join(x, y).is_some_and(|j| o.leq(j, z)),
                        || vec![x, y, z],
                    );
                }
            }
        }
    }

    // joins propagate through superposition, through every argument
    // position, and through every translation
    for x in 0..m {
        for y in 0..m {
            let Some(xy) = o.join(x, y) else { continue };
            for_each_tuple(n, m, |zs| {
                let jx = s.op(x, zs);
                let jy = s.op(y, zs);
                match o.join(jx, jy) {
                    None => {
                        let mut a = vec![x, y];
                        a.extend_from_slice(zs);
                        b.violate(laws::JOIN_OUTER_EXISTS, a);
                    }
                    Some(j) => {
                        if s.op(xy, zs) != j {
                            let mut a = vec![x, y];
                            a.extend_from_slice(zs);
                            b.violate(laws::JOIN_OUTER, a);
                        }
                        b.checked(1);
                    }
                }
                b.checked(1);
            });

            let mut w = vec![0usize; n];
            for u in 0..m {
                for i in 0..n {
                    for_each_tuple(n - 1, m, |wrest| {
                        let mut k = 0;
                        for (j, slot) in w.iter_mut().enumerate() {
                            if j != i {
                                *slot = wrest[k];
                                k += 1;
                            }
                        }
                        let jx = s.op_subst(u, &w, i, x);
                        let jy = s.op_subst(u, &w, i, y);
                        match o.join(jx, jy) {
                            None => {
                                let mut a = vec![x, y, u, i];
                                a.extend_from_slice(wrest);
                                b.violate(laws::JOIN_INNER_EXISTS, a);
                            }
                            Some(j) => {
                                if s.op_subst(u, &w, i, xy) != j {
                                    let mut a = vec![x, y, u, i];
                                    a.extend_from_slice(wrest);
                                    b.violate(laws::JOIN_INNER, a);
                                }
                                b.checked(1);
                            }
                        }
                        b.checked(1);
                    });
                }
            }

            for (it, tm) in t.maps().enumerate() {
                b.require(
                    laws::JOIN_POLY,
                    o.join(tm[x], tm[y]) == Some(tm[xy]),
                    || vec![x, y, it],
                );
            }
        }
    }

    Ok(b.finish())
}

/// A filter: a non-empty upward-closed subset, closed under meets, not
/// containing zero. Finite filters are principal, so the generator (the
/// meet of all members) determines the member set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    generator: usize,
    members: Vec<bool>,
}

impl Filter {
    /// The principal filter of everything above `c`.
    pub fn principal(o: &OrderStructure, c: usize) -> Filter {
        Filter {
            generator: c,
            members: (0..o.size()).map(|x| o.leq(c, x)).collect(),
        }
    }

    pub fn generator(&self) -> usize {
        self.generator
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn members_mask(&self) -> &[bool] {
        &self.members
    }

    pub fn member_indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&x| self.members[x]).collect()
    }

    /// Checks the three filter laws against an order structure.
    pub fn is_valid(&self, s: &SubtractionMengerAlgebra, o: &OrderStructure) -> bool {
        let m = o.size();
        let members = &self.members;
        if members.len() != m || !members.iter().any(|&b| b) || members[s.zero()] {
            return false;
        }
        for x in 0..m {
            if !members[x] {
                continue;
            }
            for y in 0..m {
                if o.leq(x, y) && !members[y] {
                    return false;
                }
                if members[y] && !members[o.meet(x, y)] {
                    return false;
                }
            }
        }
        true
    }
}

/// How to pick among several minimal generators of a maximal filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LeastIndex,
    GreatestIndex,
}

/// A maximal filter containing `a` but not `b`: the principal filter of
/// a minimal element among `{c | c <= a, not c <= b}`. Ties between
/// incomparable minimal generators break by element index per the
/// chosen strategy.
pub fn maximal_filter(o: &OrderStructure, a: usize, b: usize) -> Result<Filter, OrderError> {
    maximal_filter_with(o, a, b, TieBreak::LeastIndex)
}

pub fn maximal_filter_with(
    o: &OrderStructure,
    a: usize,
    b: usize,
    tiebreak: TieBreak,
) -> Result<Filter, OrderError> {
    if o.leq(a, b) {
        return Err(OrderError::NotSeparable { a, b });
    }
    let m = o.size();
    let candidates: Vec<usize> = (0..m).filter(|&c| o.leq(c, a) && !o.leq(c, b)).collect();
    let minimal: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&c| !candidates.iter().any(|&d| d != c && o.leq(d, c)))
        .collect();
    let c = match tiebreak {
        TieBreak::LeastIndex => *minimal.first().expect("a itself is a candidate"),
        TieBreak::GreatestIndex => *minimal.last().expect("a itself is a candidate"),
    };
    let filter = Filter::principal(o, c);

    // maximality: every strictly smaller generator would admit b
    debug_assert!(filter.contains(a) && !filter.contains(b));
    debug_assert!((0..m)
        .filter(|&d| d != c && o.leq(d, c))
        .all(|d| o.leq(d, b)));
    Ok(filter)
}

/// The set of elements all of whose translations avoid the filter,
/// returned as a membership mask.
pub fn w_ideal(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    filter: &Filter,
) -> Vec<bool> {
    (0..s.size())
        .map(|x| t.maps().all(|tm| !filter.contains(tm[x])))
        .collect()
}

/// The determining-pair data built from a separating filter: the
/// equivalence, its class partition, and the excluded ideal class.
#[derive(Debug, Clone)]
pub struct DeterminingPairData {
    pub pair: (usize, usize),
    pub filter: Filter,
    pub w_members: Vec<bool>,
    pub eps: BinaryRelation,
    /// Class partition, ordered by least member.
    pub classes: Vec<Vec<usize>>,
    /// Index into `classes` of the ideal class, when it is non-empty.
    pub w_class: Option<usize>,
}

/// Builds the equivalence `x ~ y iff x^y not in W or x,y in W`,
/// partitions the carrier, and asserts every property a determining
/// pair must have: equivalence laws, per-position regularity (hence
/// v-regularity, the relation being a quasiorder), the ideal laws of
/// `W`, the filter laws of every other class, and closure of `W` under
/// existing joins. A violation on a verified algebra signals a bug.
pub fn epsilon_relation(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    o: &OrderStructure,
    pair: (usize, usize),
    filter: &Filter,
) -> Result<DeterminingPairData, OrderError> {
    guard_order(s, o)?;
    let m = s.size();
    let w = w_ideal(s, t, filter);
    let eps = BinaryRelation::from_fn(m, |x, y| {
        !w[s.meet(x, y)] || (w[x] && w[y])
    });

    for x in 0..m {
        if !eps.contains(x, x) {
            return Err(OrderError::DeterminingPairViolation {
                property: "reflexive",
                witness: vec![x],
            });
        }
        for y in 0..m {
            if eps.contains(x, y) != eps.contains(y, x) {
                return Err(OrderError::DeterminingPairViolation {
                    property: "symmetric",
                    witness: vec![x, y],
                });
            }
        }
    }
    if let Some((x, y, z)) = eps.first_transitivity_gap() {
        return Err(OrderError::DeterminingPairViolation {
            property: "transitive",
            witness: vec![x, y, z],
        });
    }

    let mut class_of = vec![usize::MAX; m];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..m {
        if class_of[x] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (x..m).filter(|&y| eps.contains(x, y)).collect();
        let idx = classes.len();
        for &y in &members {
            class_of[y] = idx;
        }
        classes.push(members);
    }

    // v-regularity through the per-position flags; an equivalence is a
    // quasiorder, where the two notions provably coincide
    for i in 0..s.rank() {
        if !relation_is_i_regular(s.menger(), &eps, i) {
            return Err(OrderError::DeterminingPairViolation {
                property: "v-regular",
                witness: vec![i],
            });
        }
    }

    let w_class = if w.iter().any(|&b| b) {
        let first = w.iter().position(|&b| b).expect("nonempty");
        let idx = class_of[first];
        let class_mask: Vec<bool> = {
            let mut mask = vec![false; m];
            for &y in &classes[idx] {
                mask[y] = true;
            }
            mask
        };
        if class_mask != w {
            return Err(OrderError::DeterminingPairViolation {
                property: "ideal-class-is-one-class",
                witness: vec![first],
            });
        }
        let props = subset_properties(s.menger(), &w);
        if !props.l_ideal {
            return Err(OrderError::DeterminingPairViolation {
                property: "ideal-class-absorbs",
                witness: vec![first],
            });
        }
        Some(idx)
    } else {
        None
    };

    for (idx, class) in classes.iter().enumerate() {
        if Some(idx) == w_class {
            continue;
        }
        let mask: Vec<bool> = {
            let mut mask = vec![false; m];
            for &y in class {
                mask[y] = true;
            }
            mask
        };
        let f = Filter {
            generator: class.iter().copied().fold(class[0], |acc, y| s.meet(acc, y)),
            members: mask,
        };
        if !f.is_valid(s, o) {
            return Err(OrderError::DeterminingPairViolation {
                property: "classes-are-filters",
                witness: vec![idx],
            });
        }
    }

    for x in 0..m {
        for y in 0..m {
            if w[x] && w[y] {
                if let Some(j) = o.join(x, y) {
                    if !w[j] {
                        return Err(OrderError::DeterminingPairViolation {
                            property: "ideal-class-join-closed",
                            witness: vec![x, y, j],
                        });
                    }
                }
            }
        }
    }

    Ok(DeterminingPairData {
        pair,
        filter: filter.clone(),
        w_members: w,
        eps,
        classes,
        w_class,
    })
}

/// Convenience pipeline step: maximal filter, ideal set, equivalence.
pub fn determining_pair(
    s: &SubtractionMengerAlgebra,
    t: &TranslationSet,
    o: &OrderStructure,
    a: usize,
    b: usize,
    tiebreak: TieBreak,
) -> Result<DeterminingPairData, OrderError> {
    let filter = maximal_filter_with(o, a, b, tiebreak)?;
    epsilon_relation(s, t, o, (a, b), &filter)
}
