//! Partial n-place functions on a finite base set: the concrete model.
//!
//! A partial n-place function maps tuples from `A^n` into `A` and is
//! identified with its graph, a set of `(n+1)`-tuples with at most one
//! output per input. Superposition composes an outer function with `n`
//! inner ones pointwise; subtraction is set-theoretic difference of
//! graphs. Sets of such functions containing the empty function and
//! closed under both operations concretize into abstract operation
//! tables via [`make_abstract`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernel::{FiniteMengerAlgebra, StructureError, SubtractionMengerAlgebra};
use crate::tuples::for_each_tuple;

/// Default bound on closure size.
pub const DEFAULT_FUNCTION_CAP: usize = 200;

const UNDEF: u32 = u32::MAX;

/// Dense graph of a partial map `A^n -> A`: one cell per input tuple,
/// holding either an output element or the undefined marker. Dense cells
/// keep superposition branch-free at the tiny base sizes this models.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialNFunction {
    base_size: usize,
    rank: usize,
    cells: Vec<u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfuncError {
    #[error("operands disagree on shape: base {base_a}^{rank_a} vs base {base_b}^{rank_b}")]
    ShapeMismatch {
        base_a: usize,
        rank_a: usize,
        base_b: usize,
        rank_b: usize,
    },
    #[error("closure exceeded the cap of {0} elements")]
    ClosureCapExceeded(usize),
    #[error("set is not closed: {0}")]
    NotClosed(String),
    #[error("graph table for base {base} and rank {rank} would not fit in memory")]
    TooLarge { base: usize, rank: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl PartialNFunction {
    /// The everywhere-undefined function.
    pub fn empty(base_size: usize, rank: usize) -> Self {
        assert!(rank >= 1, "rank must be at least 1");
        let cells = base_size.pow(rank as u32);
        PartialNFunction {
            base_size,
            rank,
            cells: vec![UNDEF; cells],
        }
    }

    /// The total identity on the base (rank 1).
    pub fn identity(base_size: usize) -> Self {
        let mut f = Self::empty(base_size, 1);
        for a in 0..base_size {
            f.set(&[a], a);
        }
        f
    }

    pub fn from_entries(
        base_size: usize,
        rank: usize,
        entries: &[(Vec<usize>, usize)],
    ) -> Self {
        let mut f = Self::empty(base_size, rank);
        for (args, value) in entries {
            f.set(args, *value);
        }
        f
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    fn cell_index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.rank);
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < self.base_size);
            idx = idx * self.base_size + a;
        }
        idx
    }

    #[inline]
    pub fn get(&self, args: &[usize]) -> Option<usize> {
        match self.cells[self.cell_index(args)] {
            UNDEF => None,
            v => Some(v as usize),
        }
    }

    pub fn set(&mut self, args: &[usize], value: usize) {
        assert!(value < self.base_size, "output outside the base set");
        let idx = self.cell_index(args);
        self.cells[idx] = value as u32;
    }

    pub fn unset(&mut self, args: &[usize]) {
        let idx = self.cell_index(args);
        self.cells[idx] = UNDEF;
    }

    pub fn defined_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != UNDEF).count()
    }

    pub fn is_empty_function(&self) -> bool {
        self.cells.iter().all(|&c| c == UNDEF)
    }

    /// Defined entries as `(input tuple, output)`, inputs in
    /// lexicographic order.
    pub fn iter_defined(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        let mut tuples = Vec::new();
        for_each_tuple(self.rank, self.base_size, |t| tuples.push(t.to_vec()));
        tuples
            .into_iter()
            .zip(self.cells.iter())
            .filter(|(_, &c)| c != UNDEF)
            .map(|(t, &c)| (t, c as usize))
    }

    fn same_shape(&self, other: &Self) -> Result<(), PfuncError> {
        if self.base_size != other.base_size || self.rank != other.rank {
            return Err(PfuncError::ShapeMismatch {
                base_a: other.base_size,
                rank_a: other.rank,
                base_b: self.base_size,
                rank_b: self.rank,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for PartialNFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (args, value)) in self.iter_defined().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{args:?}->{value}")?;
        }
        write!(f, "}}")
    }
}

/// Pointwise composition: defined at a tuple exactly when every inner
/// function is defined there and the outer function is defined at the
/// tuple of inner outputs.
pub fn superpose(
    f: &PartialNFunction,
    gs: &[&PartialNFunction],
) -> Result<PartialNFunction, PfuncError> {
    assert_eq!(gs.len(), f.rank, "one inner function per argument");
    for g in gs {
        f.same_shape(g)?;
    }
    let mut out = PartialNFunction::empty(f.base_size, f.rank);
    let mut inner = vec![0usize; f.rank];
    for_each_tuple(f.rank, f.base_size, |args| {
        for (slot, g) in inner.iter_mut().zip(gs) {
            match g.get(args) {
                Some(v) => *slot = v,
                None => return,
            }
        }
        if let Some(v) = f.get(&inner) {
            out.set(args, v);
        }
    });
    Ok(out)
}

/// Graph difference: keeps exactly the entries of `f` that are not also
/// entries of `g` (same input and same output).
pub fn difference(
    f: &PartialNFunction,
    g: &PartialNFunction,
) -> Result<PartialNFunction, PfuncError> {
    f.same_shape(g)?;
    let mut out = f.clone();
    for (i, (&fc, &gc)) in f.cells.iter().zip(&g.cells).enumerate() {
        if fc != UNDEF && fc == gc {
            out.cells[i] = UNDEF;
        }
    }
    Ok(out)
}

/// An indexed, duplicate-free set of partial n-place functions of one
/// shape. The flags record which closure properties were established at
/// construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionAlgebra {
    base_size: usize,
    rank: usize,
    elements: Vec<PartialNFunction>,
    pub closed_under_superposition: bool,
    pub closed_under_difference: bool,
    pub contains_empty: bool,
}

impl FunctionAlgebra {
    /// Wraps an explicit element list, deduplicating while preserving
    /// first occurrence, and decides all three flags exhaustively.
    pub fn from_elements(
        base_size: usize,
        rank: usize,
        elements: Vec<PartialNFunction>,
    ) -> Result<Self, PfuncError> {
        let empty = PartialNFunction::empty(base_size, rank);
        let mut unique: Vec<PartialNFunction> = Vec::new();
        for f in elements {
            empty.same_shape(&f)?;
            if !unique.contains(&f) {
                unique.push(f);
            }
        }
        let contains_empty = unique.contains(&empty);
        let closed_under_difference = {
            let mut ok = true;
            'scan: for f in &unique {
                for g in &unique {
                    if !unique.contains(&difference(f, g)?) {
                        ok = false;
                        break 'scan;
                    }
                }
            }
            ok
        };
        let closed_under_superposition = {
            let mut ok = true;
            let mut escape: Option<PfuncError> = None;
            for f in &unique {
                for_each_tuple(rank, unique.len(), |sel| {
                    if !ok || escape.is_some() {
                        return;
                    }
                    let gs: Vec<&PartialNFunction> = sel.iter().map(|&i| &unique[i]).collect();
                    match superpose(f, &gs) {
                        Ok(h) => {
                            if !unique.contains(&h) {
                                ok = false;
                            }
                        }
                        Err(e) => escape = Some(e),
                    }
                });
                if !ok || escape.is_some() {
                    break;
                }
            }
            if let Some(e) = escape {
                return Err(e);
            }
            ok
        };
        Ok(FunctionAlgebra {
            base_size,
            rank,
            elements: unique,
            closed_under_superposition,
            closed_under_difference,
            contains_empty,
        })
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, index: usize) -> &PartialNFunction {
        &self.elements[index]
    }

    pub fn elements(&self) -> &[PartialNFunction] {
        &self.elements
    }

    pub fn index_of(&self, f: &PartialNFunction) -> Option<usize> {
        self.elements.iter().position(|e| e == f)
    }

    pub fn is_closed(&self) -> bool {
        self.closed_under_superposition && self.closed_under_difference && self.contains_empty
    }
}

/// Least superset of the generators and the empty function closed under
/// superposition and difference. Insertion order (generators, the empty
/// function, then discoveries in scan order) defines element indices.
pub fn close(
    base_size: usize,
    rank: usize,
    generators: &[PartialNFunction],
    cap: usize,
) -> Result<FunctionAlgebra, PfuncError> {
    assert!(cap >= 1, "cap must admit at least the empty function");
    let empty = PartialNFunction::empty(base_size, rank);
    let mut elements: Vec<PartialNFunction> = Vec::new();
    for g in generators {
        empty.same_shape(g)?;
        if !elements.contains(g) {
            elements.push(g.clone());
        }
    }
    if !elements.contains(&empty) {
        elements.push(empty);
    }
    if elements.len() > cap {
        return Err(PfuncError::ClosureCapExceeded(cap));
    }

    loop {
        let snapshot = elements.len();
        let mut discovered: Vec<PartialNFunction> = Vec::new();
        let mut push = |h: PartialNFunction,
                        elements: &[PartialNFunction],
                        discovered: &mut Vec<PartialNFunction>|
         -> bool {
            if !elements.contains(&h) && !discovered.contains(&h) {
                discovered.push(h);
            }
            elements.len() + discovered.len() <= cap
        };

        let mut over_cap = false;
        for i in 0..snapshot {
            let mut sel_err = None;
            for_each_tuple(rank, snapshot, |sel| {
                if over_cap || sel_err.is_some() {
                    return;
                }
                let gs: Vec<&PartialNFunction> = sel.iter().map(|&k| &elements[k]).collect();
                match superpose(&elements[i], &gs) {
                    Ok(h) => {
                        if !push(h, &elements, &mut discovered) {
                            over_cap = true;
                        }
                    }
                    Err(e) => sel_err = Some(e),
                }
            });
            if let Some(e) = sel_err {
                return Err(e);
            }
            if over_cap {
                return Err(PfuncError::ClosureCapExceeded(cap));
            }
        }
        for i in 0..snapshot {
            for j in 0..snapshot {
                let h = difference(&elements[i], &elements[j])?;
                if !push(h, &elements, &mut discovered) {
                    return Err(PfuncError::ClosureCapExceeded(cap));
                }
            }
        }

        if discovered.is_empty() {
            break;
        }
        elements.extend(discovered);
    }

    Ok(FunctionAlgebra {
        base_size,
        rank,
        elements,
        closed_under_superposition: true,
        closed_under_difference: true,
        contains_empty: true,
    })
}

/// Every partial map `A^n -> A`, enumerated with the empty function
/// first. Errors out when the full count exceeds the default cap.
pub fn all_partial_functions(base_size: usize, rank: usize) -> Result<FunctionAlgebra, PfuncError> {
    all_partial_functions_capped(base_size, rank, DEFAULT_FUNCTION_CAP)
}

pub fn all_partial_functions_capped(
    base_size: usize,
    rank: usize,
    cap: usize,
) -> Result<FunctionAlgebra, PfuncError> {
    let cells = base_size
        .checked_pow(rank as u32)
        .ok_or(PfuncError::TooLarge {
            base: base_size,
            rank,
        })?;
    let mut count: usize = 1;
    for _ in 0..cells {
        count = count
            .checked_mul(base_size + 1)
            .filter(|&c| c <= cap)
            .ok_or(PfuncError::ClosureCapExceeded(cap))?;
    }

    let mut elements = Vec::with_capacity(count);
    // digit 0 is the undefined marker, digit v+1 the output v, with the
    // last cell varying fastest; the empty function comes first
    let mut digits = vec![0usize; cells];
    loop {
        let mut f = PartialNFunction::empty(base_size, rank);
        for (i, &d) in digits.iter().enumerate() {
            if d > 0 {
                f.cells[i] = (d - 1) as u32;
            }
        }
        elements.push(f);
        let mut i = cells;
        let mut done = true;
        while i > 0 {
            i -= 1;
            digits[i] += 1;
            if digits[i] <= base_size {
                done = false;
                break;
            }
            digits[i] = 0;
        }
        if done {
            break;
        }
    }

    Ok(FunctionAlgebra {
        base_size,
        rank,
        elements,
        closed_under_superposition: true,
        closed_under_difference: true,
        contains_empty: true,
    })
}

/// Reads off the abstract operation tables of a closed function set.
/// Element indices follow the set's own indexing; zero is the index of
/// the empty function.
pub fn make_abstract(f: &FunctionAlgebra) -> Result<SubtractionMengerAlgebra, PfuncError> {
    if !f.is_closed() {
        return Err(PfuncError::NotClosed(
            "all three closure flags must hold".into(),
        ));
    }
    let m = f.len();
    let n = f.rank();
    let mut op = Vec::with_capacity(m.pow(n as u32 + 1));
    let mut escape: Option<PfuncError> = None;
    for_each_tuple(n + 1, m, |t| {
        if escape.is_some() {
            return;
        }
        let gs: Vec<&PartialNFunction> = t[1..].iter().map(|&i| f.element(i)).collect();
        match superpose(f.element(t[0]), &gs) {
            Ok(h) => match f.index_of(&h) {
                Some(idx) => op.push(idx),
                None => {
                    escape = Some(PfuncError::NotClosed(format!(
                        "superposition of elements {t:?} escapes the set"
                    )))
                }
            },
            Err(e) => escape = Some(e),
        }
    });
    if let Some(e) = escape {
        return Err(e);
    }

    let mut sub = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            let d = difference(f.element(x), f.element(y))?;
            match f.index_of(&d) {
                Some(idx) => sub.push(idx),
                None => {
                    return Err(PfuncError::NotClosed(format!(
                        "difference of elements ({x}, {y}) escapes the set"
                    )))
                }
            }
        }
    }

    let zero = f
        .index_of(&PartialNFunction::empty(f.base_size(), n))
        .ok_or_else(|| PfuncError::NotClosed("the empty function is missing".into()))?;

    let menger = FiniteMengerAlgebra::new(n, m, op)?;
    Ok(SubtractionMengerAlgebra::new(menger, sub, zero)?)
}

/// Samples `generator_count` functions cell-by-cell (each cell uniform
/// over undefined and the base elements) and closes them. Deterministic
/// in the seed.
pub fn random_closed_algebra(
    base_size: usize,
    rank: usize,
    generator_count: usize,
    seed: u64,
    cap: usize,
) -> Result<FunctionAlgebra, PfuncError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = base_size.pow(rank as u32);
    let mut generators = Vec::with_capacity(generator_count);
    for _ in 0..generator_count {
        let mut f = PartialNFunction::empty(base_size, rank);
        for i in 0..cells {
            let d = rng.gen_range(0..=base_size);
            if d > 0 {
                f.cells[i] = (d - 1) as u32;
            }
        }
        generators.push(f);
    }
    close(base_size, rank, &generators, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_subtraction_axioms, check_superassociativity};
    use crate::report::CheckConfig;
    use proptest::prelude::*;

    fn f(entries: &[(&[usize], usize)]) -> PartialNFunction {
        let owned: Vec<(Vec<usize>, usize)> = entries
            .iter()
            .map(|(args, v)| (args.to_vec(), *v))
            .collect();
        PartialNFunction::from_entries(2, 1, &owned)
    }

    #[test]
    fn superpose_unary_example() {
        // f = {0 -> 1}, g total zero: f[g] is defined everywhere with value 1
        let outer = f(&[(&[0], 1)]);
        let g = f(&[(&[0], 0), (&[1], 0)]);
        let composed = superpose(&outer, &[&g]).unwrap();
        assert_eq!(composed.get(&[0]), Some(1));
        assert_eq!(composed.get(&[1]), Some(1));
    }

    #[test]
    fn superpose_with_empty_inner_is_empty() {
        let outer = f(&[(&[0], 1), (&[1], 1)]);
        let empty = PartialNFunction::empty(2, 1);
        assert!(superpose(&outer, &[&empty]).unwrap().is_empty_function());
    }

    #[test]
    fn identity_is_left_neutral() {
        let id = PartialNFunction::identity(2);
        let g = f(&[(&[1], 0)]);
        assert_eq!(superpose(&id, &[&g]).unwrap(), g);
    }

    #[test]
    fn difference_examples() {
        let a = f(&[(&[0], 1), (&[1], 0)]);
        let b = f(&[(&[0], 1)]);
        assert!(difference(&a, &a).unwrap().is_empty_function());
        assert_eq!(difference(&a, &b).unwrap(), f(&[(&[1], 0)]));
        let empty = PartialNFunction::empty(2, 1);
        assert_eq!(difference(&a, &empty).unwrap(), a);
    }

    #[test]
    fn difference_keeps_entries_with_other_outputs() {
        let a = f(&[(&[0], 1)]);
        let b = f(&[(&[0], 0)]);
        assert_eq!(difference(&a, &b).unwrap(), a);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = PartialNFunction::empty(2, 1);
        let b = PartialNFunction::empty(3, 1);
        assert!(matches!(
            difference(&a, &b),
            Err(PfuncError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn close_single_idempotent_generator() {
        // f = {0 -> 0}: f[f] = f and f \ f is the empty function
        let gen = f(&[(&[0], 0)]);
        let algebra = close(2, 1, &[gen.clone()], 10).unwrap();
        assert_eq!(algebra.len(), 2);
        assert_eq!(algebra.element(0), &gen);
        assert!(algebra.element(1).is_empty_function());
        assert!(algebra.is_closed());
    }

    #[test]
    fn close_of_nothing_is_the_empty_singleton() {
        let algebra = close(2, 1, &[], 10).unwrap();
        assert_eq!(algebra.len(), 1);
        assert!(algebra.element(0).is_empty_function());
    }

    #[test]
    fn full_unary_set_is_already_closed() {
        let all = all_partial_functions(2, 1).unwrap();
        assert_eq!(all.len(), 9);
        let closure = close(2, 1, all.elements(), 20).unwrap();
        assert_eq!(closure.len(), 9);
    }

    #[test]
    fn all_partial_functions_counts() {
        assert_eq!(all_partial_functions(1, 1).unwrap().len(), 2);
        assert_eq!(all_partial_functions(2, 1).unwrap().len(), 9);
        assert_eq!(all_partial_functions(2, 2).unwrap().len(), 81);
        assert!(matches!(
            all_partial_functions(3, 2),
            Err(PfuncError::ClosureCapExceeded(_))
        ));
    }

    #[test]
    fn closure_cap_is_enforced() {
        let id = PartialNFunction::identity(2);
        let swap = f(&[(&[0], 1), (&[1], 0)]);
        assert!(matches!(
            close(2, 1, &[id, swap], 2),
            Err(PfuncError::ClosureCapExceeded(2))
        ));
    }

    #[test]
    fn make_abstract_two_element_algebra() {
        let gen = f(&[(&[0], 0)]);
        let algebra = close(2, 1, &[gen], 10).unwrap();
        let s = make_abstract(&algebra).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.zero(), 1);
        // f[f] = f, everything involving the empty function collapses
        assert_eq!(s.op(0, &[0]), 0);
        assert_eq!(s.op(0, &[1]), 1);
        assert_eq!(s.op(1, &[0]), 1);
        assert_eq!(s.sub(0, 0), 1);
        assert_eq!(s.sub(0, 1), 0);
    }

    #[test]
    fn make_abstract_of_empty_singleton() {
        let algebra = close(3, 1, &[], 5).unwrap();
        let s = make_abstract(&algebra).unwrap();
        assert_eq!(s.size(), 1);
        assert_eq!(s.zero(), 0);
    }

    #[test]
    fn make_abstract_requires_closure() {
        let id = PartialNFunction::identity(2);
        let set = FunctionAlgebra::from_elements(2, 1, vec![id]).unwrap();
        assert!(!set.is_closed());
        assert!(matches!(make_abstract(&set), Err(PfuncError::NotClosed(_))));
    }

    #[test]
    fn full_unary_concretization_satisfies_the_axioms() {
        let all = all_partial_functions(2, 1).unwrap();
        let s = make_abstract(&all).unwrap();
        let cfg = CheckConfig::default();
        assert!(check_superassociativity(s.menger(), &cfg).holds);
        assert!(check_subtraction_axioms(&s, &cfg).holds);
    }

    #[test]
    fn random_closures_are_deterministic() {
        let a = random_closed_algebra(2, 1, 2, 7, 40).unwrap();
        let b = random_closed_algebra(2, 1, 2, 7, 40).unwrap();
        assert_eq!(a, b);
        let none = random_closed_algebra(2, 1, 0, 3, 40).unwrap();
        assert_eq!(none.len(), 1);
    }

    fn arb_function(base: usize, rank: usize) -> impl Strategy<Value = PartialNFunction> {
        let cells = base.pow(rank as u32);
        proptest::collection::vec(0..=base, cells).prop_map(move |digits| {
            let mut f = PartialNFunction::empty(base, rank);
            for (i, d) in digits.into_iter().enumerate() {
                if d > 0 {
                    f.cells[i] = (d - 1) as u32;
                }
            }
            f
        })
    }

    proptest! {
        // composition is superassociative on arbitrary, even non-closed,
        // function tuples
        #[test]
        fn superposition_is_superassociative(
            x in arb_function(2, 2),
            y1 in arb_function(2, 2),
            y2 in arb_function(2, 2),
            z1 in arb_function(2, 2),
            z2 in arb_function(2, 2),
        ) {
            let lhs = superpose(&superpose(&x, &[&y1, &y2]).unwrap(), &[&z1, &z2]).unwrap();
            let rhs = superpose(
                &x,
                &[
                    &superpose(&y1, &[&z1, &z2]).unwrap(),
                    &superpose(&y2, &[&z1, &z2]).unwrap(),
                ],
            )
            .unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        // difference distributes over superposition from the outer side
        #[test]
        fn difference_distributes_over_composition(
            f1 in arb_function(2, 1),
            g in arb_function(2, 1),
            h in arb_function(2, 1),
        ) {
            let lhs = superpose(&difference(&f1, &g).unwrap(), &[&h]).unwrap();
            let rhs = difference(
                &superpose(&f1, &[&h]).unwrap(),
                &superpose(&g, &[&h]).unwrap(),
            )
            .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
