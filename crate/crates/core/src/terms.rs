//! Unary polynomials over a Menger carrier and the finite monoid of
//! translation functions they induce.
//!
//! A polynomial is built from the single variable `x` by repeatedly
//! wrapping it into one argument position of the operation, with carrier
//! elements as the head and the remaining coefficients. Two polynomials
//! inducing the same map on the carrier are interchangeable in every
//! quantified law, so quantification "over all polynomials" is decided
//! over the finite set of induced maps.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::FiniteMengerAlgebra;
use crate::tuples::for_each_tuple;

/// Default bound on the size of the translation closure. Exceeding it
/// aborts with an error rather than approximating, since the laws
/// quantified over translations must be decided exactly or not at all.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

/// A unary polynomial: the variable, or an operation node with the
/// variable nested in exactly one argument position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var,
    Node {
        /// Head element applied to the argument tuple.
        head: usize,
        /// Position (0-based) holding the nested term.
        pos: usize,
        /// Coefficients at the other `rank - 1` positions, in ascending
        /// position order.
        coeffs: Vec<usize>,
        child: Box<Term>,
    },
}

impl Term {
    pub fn depth(&self) -> usize {
        match self {
            Term::Var => 0,
            Term::Node { child, .. } => 1 + child.depth(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var => write!(f, "x"),
            Term::Node {
                head,
                pos,
                coeffs,
                child,
            } => {
                write!(f, "g{head}[")?;
                let mut k = 0;
                let rank = coeffs.len() + 1;
                for j in 0..rank {
                    if j > 0 {
                        write!(f, " ")?;
                    }
                    if j == *pos {
                        write!(f, "{child}")?;
                    } else {
                        write!(f, "g{}", coeffs[k])?;
                        k += 1;
                    }
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("term references element {value}, carrier has {size}")]
    IndexOutOfRange { value: usize, size: usize },
    #[error("term nests at position {pos}, rank is {rank}")]
    PositionOutOfRange { pos: usize, rank: usize },
    #[error("term carries {got} coefficients, rank {rank} needs {expected}")]
    WrongCoefficientCount {
        got: usize,
        expected: usize,
        rank: usize,
    },
    #[error("translation closure exceeded the cap of {0} functions")]
    ClosureCapExceeded(usize),
}

/// Evaluates `t` at `x` by bottom-up table lookups.
pub fn eval_term(m: &FiniteMengerAlgebra, t: &Term, x: usize) -> Result<usize, TermError> {
    let size = m.size();
    if x >= size {
        return Err(TermError::IndexOutOfRange { value: x, size });
    }
    match t {
        Term::Var => Ok(x),
        Term::Node {
            head,
            pos,
            coeffs,
            child,
        } => {
            let rank = m.rank();
            if *head >= size {
                return Err(TermError::IndexOutOfRange { value: *head, size });
            }
            if *pos >= rank {
                return Err(TermError::PositionOutOfRange { pos: *pos, rank });
            }
            if coeffs.len() != rank - 1 {
                return Err(TermError::WrongCoefficientCount {
                    got: coeffs.len(),
                    expected: rank - 1,
                    rank,
                });
            }
            if let Some(&value) = coeffs.iter().find(|&&c| c >= size) {
                return Err(TermError::IndexOutOfRange { value, size });
            }
            let inner = eval_term(m, child, x)?;
            let mut args = vec![0usize; rank];
            let mut k = 0;
            for (j, slot) in args.iter_mut().enumerate() {
                if j == *pos {
                    *slot = inner;
                } else {
                    *slot = coeffs[k];
                    k += 1;
                }
            }
            Ok(m.op(*head, &args))
        }
    }
}

/// The closure of the induced translation maps, with one witness term
/// per map. Contains the identity (induced by the bare variable) and is
/// closed under post-composition with every elementary translation
/// `x -> u[w..|i x]`.
#[derive(Debug, Clone)]
pub struct TranslationSet {
    fingerprint: u64,
    maps: Vec<Vec<usize>>,
    witnesses: Vec<Term>,
}

impl TranslationSet {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Iterates the maps in closure-discovery order; index 0 is the
    /// identity.
    pub fn maps(&self) -> impl Iterator<Item = &[usize]> {
        self.maps.iter().map(|m| m.as_slice())
    }

    pub fn map(&self, index: usize) -> &[usize] {
        &self.maps[index]
    }

    pub fn apply(&self, index: usize, x: usize) -> usize {
        self.maps[index][x]
    }

    /// A term inducing the map at `index`; of minimal depth since the
    /// closure is explored breadth-first.
    pub fn witness(&self, index: usize) -> &Term {
        &self.witnesses[index]
    }
}

/// Descriptions of the elementary translations `x -> u[w..|i x]`,
/// deduplicated by induced map, in lexicographic `(u, i, w)` order.
fn elementary_translations(m: &FiniteMengerAlgebra) -> Vec<(Vec<usize>, usize, usize, Vec<usize>)> {
    let size = m.size();
    let n = m.rank();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut w = vec![0usize; n];
    for u in 0..size {
        for i in 0..n {
            for_each_tuple(n - 1, size, |wrest| {
                let mut k = 0;
                for (j, slot) in w.iter_mut().enumerate() {
                    if j != i {
                        *slot = wrest[k];
                        k += 1;
                    }
                }
                let map: Vec<usize> = (0..size).map(|x| m.op_subst(u, &w, i, x)).collect();
                if seen.insert(map.clone(), ()).is_none() {
                    out.push((map, u, i, wrest.to_vec()));
                }
            });
        }
    }
    out
}

/// Computes the translation closure by breadth-first fixpoint: start
/// from the identity and keep post-composing with every elementary
/// translation until no new map appears or the cap is exceeded.
pub fn translations(m: &FiniteMengerAlgebra) -> Result<TranslationSet, TermError> {
    translations_capped(m, DEFAULT_CLOSURE_CAP)
}

pub fn translations_capped(
    m: &FiniteMengerAlgebra,
    cap: usize,
) -> Result<TranslationSet, TermError> {
    let size = m.size();
    let elementary = elementary_translations(m);
    let identity: Vec<usize> = (0..size).collect();

    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut witnesses: Vec<Term> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();

    maps.push(identity.clone());
    witnesses.push(Term::Var);
    index.insert(identity, 0);

    let mut frontier = 0;
    while frontier < maps.len() {
        let current = frontier;
        frontier += 1;
        for (emap, u, i, wrest) in &elementary {
            let composed: Vec<usize> = (0..size).map(|x| emap[maps[current][x]]).collect();
            if !index.contains_key(&composed) {
                if maps.len() >= cap {
                    return Err(TermError::ClosureCapExceeded(cap));
                }
                let term = Term::Node {
                    head: *u,
                    pos: *i,
                    coeffs: wrest.clone(),
                    child: Box::new(witnesses[current].clone()),
                };
                index.insert(composed.clone(), maps.len());
                maps.push(composed);
                witnesses.push(term);
            }
        }
    }

    Ok(TranslationSet {
        fingerprint: m.fingerprint(),
        maps,
        witnesses,
    })
}

/// All terms of depth at most `depth_limit`, ordered by depth and then
/// by the `(head, pos, coeffs, child)` wrapping applied at each level.
pub fn enumerate_terms(m: &FiniteMengerAlgebra, depth_limit: usize) -> Vec<Term> {
    let size = m.size();
    let n = m.rank();
    let mut all = vec![Term::Var];
    let mut level = vec![Term::Var];
    for _ in 0..depth_limit {
        let mut next = Vec::new();
        for head in 0..size {
            for pos in 0..n {
                for_each_tuple(n - 1, size, |coeffs| {
                    for child in &level {
                        next.push(Term::Node {
                            head,
                            pos,
                            coeffs: coeffs.to_vec(),
                            child: Box::new(child.clone()),
                        });
                    }
                });
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// The set of maps induced by all terms of depth at most `depth_limit`,
/// each computed by evaluating a witness term pointwise. Since the map
/// induced by a term depends only on the map induced by its child,
/// per-level deduplication by induced map loses nothing. Used as the
/// syntax-driven oracle for [`translations`]: the results agree once
/// the depth is large enough to stabilize.
pub fn translations_by_depth(
    m: &FiniteMengerAlgebra,
    depth_limit: usize,
) -> std::collections::BTreeSet<Vec<usize>> {
    let size = m.size();
    let n = m.rank();
    let mut seen: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    let identity: Vec<usize> = (0..size).collect();
    seen.insert(identity);
    // witness term per distinct map found at the previous depth
    let mut level: Vec<Term> = vec![Term::Var];
    for _ in 0..depth_limit {
        let mut next_level = Vec::new();
        for head in 0..size {
            for pos in 0..n {
                for_each_tuple(n - 1, size, |coeffs| {
                    for child in &level {
                        let term = Term::Node {
                            head,
                            pos,
                            coeffs: coeffs.to_vec(),
                            child: Box::new(child.clone()),
                        };
                        let map: Vec<usize> = (0..size)
                            .map(|x| eval_term(m, &term, x).expect("indices in range"))
                            .collect();
                        if seen.insert(map) {
                            next_level.push(term);
                        }
                    }
                });
            }
        }
        level = next_level;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::FiniteMengerAlgebra;
    use std::collections::BTreeSet;

    fn left_projection(size: usize) -> FiniteMengerAlgebra {
        FiniteMengerAlgebra::from_fn(1, size, |x, _| x).unwrap()
    }

    #[test]
    fn bare_variable_is_identity() {
        let m = left_projection(3);
        for x in 0..3 {
            assert_eq!(eval_term(&m, &Term::Var, x).unwrap(), x);
        }
    }

    #[test]
    fn single_node_on_left_projection_is_constant() {
        let m = left_projection(2);
        let t = Term::Node {
            head: 0,
            pos: 0,
            coeffs: vec![],
            child: Box::new(Term::Var),
        };
        assert_eq!(eval_term(&m, &t, 1).unwrap(), 0);
    }

    #[test]
    fn nested_evaluation_composes() {
        // o(x, y) = x + y mod 3: a[b[x]] must evaluate a at b[x]
        let m = FiniteMengerAlgebra::from_fn(1, 3, |x, ys| (x + ys[0]) % 3).unwrap();
        let inner = Term::Node {
            head: 1,
            pos: 0,
            coeffs: vec![],
            child: Box::new(Term::Var),
        };
        let outer = Term::Node {
            head: 2,
            pos: 0,
            coeffs: vec![],
            child: Box::new(inner.clone()),
        };
        for x in 0..3 {
            let b_of_x = eval_term(&m, &inner, x).unwrap();
            assert_eq!(
                eval_term(&m, &outer, x).unwrap(),
                m.op(2, &[b_of_x]),
            );
        }
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let m = left_projection(2);
        assert_eq!(
            eval_term(&m, &Term::Var, 5),
            Err(TermError::IndexOutOfRange { value: 5, size: 2 })
        );
        let t = Term::Node {
            head: 7,
            pos: 0,
            coeffs: vec![],
            child: Box::new(Term::Var),
        };
        assert!(matches!(
            eval_term(&m, &t, 0),
            Err(TermError::IndexOutOfRange { value: 7, .. })
        ));
    }

    #[test]
    fn left_projection_closure_is_identity_plus_constants() {
        // u[x] = u, so every elementary translation is a constant map
        let m = left_projection(2);
        let t = translations(&m).unwrap();
        let maps: BTreeSet<Vec<usize>> = t.maps().map(|s| s.to_vec()).collect();
        let expected: BTreeSet<Vec<usize>> =
            [vec![0, 1], vec![0, 0], vec![1, 1]].into_iter().collect();
        assert_eq!(maps, expected);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn singleton_carrier_has_only_the_identity() {
        let m = left_projection(1);
        let t = translations(&m).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.map(0), &[0]);
    }

    #[test]
    fn witnesses_reproduce_their_maps() {
        let m = FiniteMengerAlgebra::from_fn(2, 3, |x, ys| (x + 2 * ys[0] + ys[1]) % 3).unwrap();
        let t = translations(&m).unwrap();
        for idx in 0..t.len() {
            let witness = t.witness(idx);
            for x in 0..3 {
                assert_eq!(eval_term(&m, witness, x).unwrap(), t.apply(idx, x));
            }
        }
    }

    #[test]
    fn closure_cap_is_an_error() {
        let m = FiniteMengerAlgebra::from_fn(1, 4, |x, ys| (x + ys[0]) % 4).unwrap();
        assert_eq!(
            translations_capped(&m, 2).unwrap_err(),
            TermError::ClosureCapExceeded(2)
        );
    }

    #[test]
    fn term_counts_by_depth() {
        let m1 = left_projection(2);
        assert_eq!(enumerate_terms(&m1, 0), vec![Term::Var]);
        // rank 1, m = 2: depth <= 1 gives the variable plus m wrappings
        assert_eq!(enumerate_terms(&m1, 1).len(), 1 + 2);

        let m2 = FiniteMengerAlgebra::from_fn(2, 3, |_, ys| ys[0]).unwrap();
        // rank 2, m = 3: each wrapping picks head, position, coefficient
        assert_eq!(enumerate_terms(&m2, 1).len(), 1 + 2 * 3 * 3);
    }

    #[test]
    fn by_depth_is_monotone_and_converges_to_closure() {
        let m = FiniteMengerAlgebra::from_fn(1, 3, |x, ys| (x * ys[0]) % 3).unwrap();
        let full: BTreeSet<Vec<usize>> =
            translations(&m).unwrap().maps().map(|s| s.to_vec()).collect();
        let mut previous = translations_by_depth(&m, 0);
        assert_eq!(previous.len(), 1);
        for d in 1..=6 {
            let current = translations_by_depth(&m, d);
            assert!(previous.is_subset(&current));
            if current == previous {
                assert_eq!(current, full);
                return;
            }
            previous = current;
        }
        panic!("no convergence by depth 6");
    }

    #[test]
    fn by_depth_matches_literal_term_enumeration() {
        let m = FiniteMengerAlgebra::from_fn(2, 2, |x, ys| ys[0] ^ (x & ys[1])).unwrap();
        for depth in 0..=2 {
            let literal: BTreeSet<Vec<usize>> = enumerate_terms(&m, depth)
                .iter()
                .map(|t| {
                    (0..2)
                        .map(|x| eval_term(&m, t, x).unwrap())
                        .collect::<Vec<_>>()
                })
                .collect();
            assert_eq!(translations_by_depth(&m, depth), literal);
        }
    }
}
