//! Violation reports produced by the exhaustive checkers.

use std::collections::HashMap;
use std::fmt;

/// Human-readable labels for every law the checkers can violate.
///
/// The labels spell the law itself (`^` is the meet `x-(x-y)`, `v` the
/// segment join, `t`/`t1`/`t2` range over translation functions). They
/// are stable enough to match on in tests but are not a machine
/// interface; exit codes are.
pub mod laws {
    pub const SUPERASSOC: &str = "x[y..][z..] = x[y1[z..] .. yn[z..]]";

    pub const SUB_1: &str = "x-(y-x) = x";
    pub const SUB_2: &str = "x-(x-y) = y-(y-x)";
    pub const SUB_3: &str = "(x-y)-z = (x-z)-y";
    pub const SUB_4: &str = "0-0 = 0";

    pub const COMPAT_OUTER: &str = "(x-y)[z..] = x[z..]-y[z..]";
    pub const COMPAT_INNER: &str = "u[w..|i x-(x-y)] = u[w..|i x]-u[w..|i x-y]";
    pub const COMPAT_CHAIN: &str = "x<=y & z<=t1(x) & z<=t2(y) -> z<=t2(x)";

    pub const ZERO_DIFF: &str = "x-x = 0";
    pub const DIFF_ZERO: &str = "x-0 = x";
    pub const ZERO_BELOW: &str = "0-x = 0";
    pub const TRIANGLE: &str = "((x-y)-(x-z))-(z-y) = 0";
    pub const MEET_BELOW_SND: &str = "(x-(x-y))-y = 0";
    pub const ZERO_LEAST: &str = "0 <= x";
    pub const DIFF_DECREASES: &str = "x-y <= x";
    pub const LEQ_FIXPOINT: &str = "x<=y <-> x-(x-y) = x";
    pub const MONO_LEFT: &str = "x<=y -> x-z <= y-z";
    pub const ANTI_RIGHT: &str = "x<=y -> z-y <= z-x";
    pub const MONO_BOTH: &str = "x<=y & u<=v -> x-v <= y-u";
    pub const DIFF_IDEMPOTENT: &str = "(x-y)-y = x-y";
    pub const DIFF_EXCHANGE: &str = "(x-y)-z = (x-z)-(y-z)";

    pub const ZERO_OUTER: &str = "0[x..] = 0";
    pub const ZERO_INNER: &str = "u[w..|i 0] = 0";

    pub const MEET_INNER: &str = "u[w..|i x^y] = u[w..|i x]-u[w..|i x-y]";
    pub const MEET_FIXPOINT: &str = "x<=y <-> x^y = x";
    pub const MEET_POLY: &str = "t(x^y) = t(x)-t(x-y)";
    pub const MEET_OUTER: &str = "(x^y)[z..] = x[z..]^y[z..]";
    pub const MEET_GLB: &str = "x<=y & x<=z -> x <= y^z";
    pub const MEET_MONO: &str = "x<=y -> x^z <= y^z";
    pub const DISJOINT_DIFF: &str = "x^y=0 -> x-y = x";
    pub const DIFF_MEET_ZERO: &str = "(x-y)^y = 0";
    pub const MEET_DIFF_DIST: &str = "x^(y-z) = (x^y)-(x^z)";
    pub const DIFF_VIA_MEET: &str = "x-y = x-(x^y)";
    pub const MEET_DIFF_ABSORB: &str = "(x^y)-(y-z) = x^y^z";
    pub const MEET_DIFF_BOTH: &str = "(x^y)-z = (x-z)^(y-z)";
    pub const MEET_DIFF_LEFT: &str = "(x^y)-z = (x-z)^y";
    pub const POLY_DIFF: &str = "t(x-y) = t(x)-t(x^y)";
    pub const POLY_SUBADDITIVE: &str = "t(x)-t(y) <= t(x-y)";
    pub const POLY_ORTHOGONAL: &str = "t1(x^y)^t2(x-y) = 0";
    pub const POLY_MEET_SWAP: &str = "t1(x^y)^t2(y) = t1(x^y)^t2(x^y)";
    pub const POLY_MEET_SHIFT_LEQ: &str = "t1(x^y^z)^t2(y) <= t1(x^y)^t2(y^z)";
    pub const POLY_MEET_BOUND: &str = "g<=t1(x^y) & g<=t2(y^z) -> g<=t2(x^y^z)";
    pub const POLY_MEET_SHIFT_EQ: &str = "t1(x^y^z)^t2(y) = t1(x^y)^t2(y^z)";

    pub const INNER_DIFF_LEQ: &str = "x<=y -> u[w..|i y-x] = u[w..|i y]-u[w..|i x]";
    pub const POLY_DIFF_LEQ: &str = "x<=y -> t(y-x) = t(y)-t(x)";
    pub const POLY_MEET_DIFF: &str = "t(x-(x-y)) = t(x)-t(x-y)";

    pub const JOIN_WELLPOSED: &str = "a-((a-x)^(a-y)) agrees for all upper bounds a";
    pub const JOIN_ABSORB: &str = "x^(x v y) = x";
    pub const MEET_ABSORB: &str = "x v (x^y) = x";
    pub const JOIN_ASSOC: &str = "(x v y) v z = x v (y v z)";
    pub const MEET_JOIN_DIST: &str = "x^(y v z) = (x^y) v (x^z)";
    pub const JOIN_MEET_DIST: &str = "x v (y^z) = (x v y)^(x v z)";
    pub const JOIN_DIFF_DIST: &str = "(x v y)-z = (x-z) v (y-z)";
    pub const JOIN_LUB: &str = "x<=z & y<=z -> x v y <= z";
    pub const JOIN_RESTORE: &str = "y<=x -> x = (x-y) v y";
    pub const JOIN_CANCEL: &str = "x = (x v y)-(y-x)";
    pub const MEET_DIFF_SPLIT: &str = "x = (x^y) v (x-y)";
    pub const JOIN_OUTER: &str = "(x v y)[z..] = x[z..] v y[z..]";
    pub const JOIN_OUTER_EXISTS: &str = "x v y exists -> x[z..] v y[z..] exists";
    pub const JOIN_INNER: &str = "u[w..|i x v y] = u[w..|i x] v u[w..|i y]";
    pub const JOIN_INNER_EXISTS: &str = "x v y exists -> u[w..|i x] v u[w..|i y] exists";
    pub const JOIN_POLY: &str = "x v y exists -> t(x) v t(y) exists & t(x v y) = t(x) v t(y)";

    pub const REPR_MENGER: &str = "P(x[y..]) = P(x)[P(y1)..P(yn)]";
    pub const REPR_SUB: &str = "P(x-y) = P(x)\\P(y)";
    pub const REPR_ZERO: &str = "P(0) = empty";
    pub const REPR_INJECTIVE: &str = "P(x) = P(y) -> x = y";
}

/// One violation of a law: the substitution (element indices, and for
/// laws quantified over translations, translation-set indices) at which
/// the two sides disagree. Layouts per law follow the loop order of the
/// checker that produced them and are documented there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub law: &'static str,
    pub assignment: Vec<usize>,
}

/// Outcome of an exhaustive check.
///
/// `holds` reflects the complete quantifier scan even when `witnesses`
/// is truncated by the per-law cap, so it is always exact. Witnesses
/// appear grouped by law, each group in lexicographic order of the
/// substitution tuple.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub checked_count: u64,
}

impl CheckReport {
    /// Witnesses recorded for one particular law.
    pub fn witnesses_for(&self, law: &str) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(move |w| w.law == law)
    }

    /// True when no witness (even a truncated one) names the given law.
    pub fn law_holds(&self, law: &str) -> bool {
        self.witnesses_for(law).next().is_none()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            write!(f, "ok ({} instantiations checked)", self.checked_count)?;
        } else {
            writeln!(
                f,
                "violated ({} instantiations checked, {} witness(es) kept)",
                self.checked_count,
                self.witnesses.len()
            )?;
            for w in &self.witnesses {
                writeln!(f, "  {}  at {:?}", w.law, w.assignment)?;
            }
        }
        Ok(())
    }
}

/// Knobs shared by all checkers.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Maximum number of witnesses kept per law. The scan itself always
    /// completes, so truncation never affects `holds`.
    pub witness_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { witness_cap: 10 }
    }
}

/// Accumulates witnesses during a scan, applying the per-law cap.
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    cap: usize,
    kept: HashMap<&'static str, usize>,
    witnesses: Vec<Witness>,
    violations: u64,
    checked: u64,
}

impl ReportBuilder {
    pub(crate) fn new(cfg: &CheckConfig) -> Self {
        ReportBuilder {
            cap: cfg.witness_cap,
            kept: HashMap::new(),
            witnesses: Vec::new(),
            violations: 0,
            checked: 0,
        }
    }

    pub(crate) fn checked(&mut self, count: u64) {
        self.checked += count;
    }

    pub(crate) fn violate(&mut self, law: &'static str, assignment: Vec<usize>) {
        self.violations += 1;
        let kept = self.kept.entry(law).or_insert(0);
        if *kept < self.cap {
            *kept += 1;
            self.witnesses.push(Witness { law, assignment });
        }
    }

    /// Record the outcome of one instantiation.
    pub(crate) fn require(&mut self, law: &'static str, ok: bool, assignment: impl FnOnce() -> Vec<usize>) {
        self.checked += 1;
        if !ok {
            self.violate(law, assignment());
        }
    }

    pub(crate) fn finish(self) -> CheckReport {
        CheckReport {
            holds: self.violations == 0,
            witnesses: self.witnesses,
            checked_count: self.checked,
        }
    }
}
