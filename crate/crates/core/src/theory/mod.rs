//! The three shipped theories and their canonical models.
//!
//! Every backend is ℵ₀-categorical-style: over a finite set of named
//! elements the automorphism orbits of single elements are finite in number
//! and have explicit representatives. Evaluation, type enumeration and
//! realization all run on those representatives.

mod eval;
mod qe;
mod types;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{self, midpoint, Elem, Formula, Signature, Sort, Var};

pub use eval::{fold_ground, holds, satisfies};
pub use qe::qe;
pub use types::{
    enumerate_types, is_algebraic, realize_type, solution_count, type_of, type_of_vars,
    SolutionCount, TypeDesc,
};

/// One of the shipped theories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    /// Pure equality on an infinite set; canonical model ℕ.
    Eq,
    /// Dense linear order without endpoints; canonical model ℚ.
    Dlo,
    /// An equivalence relation with infinitely many infinite classes,
    /// presented two-sorted with an explicit class sort.
    Erel,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eq" => Ok(Theory::Eq),
            "dlo" => Ok(Theory::Dlo),
            "erel" => Ok(Theory::Erel),
            other => Err(Error::Invalid(format!("unknown theory `{other}`"))),
        }
    }
}

impl Theory {
    pub const ALL: [Theory; 3] = [Theory::Eq, Theory::Dlo, Theory::Erel];

    pub fn key(self) -> &'static str {
        match self {
            Theory::Eq => "eq",
            Theory::Dlo => "dlo",
            Theory::Erel => "erel",
        }
    }

    pub fn signature(self) -> Signature {
        match self {
            Theory::Eq => Signature::equality(),
            Theory::Dlo => Signature::dense_order(),
            Theory::Erel => Signature::equivalence(),
        }
    }

    pub fn sorts(self) -> &'static [Sort] {
        match self {
            Theory::Erel => &[Sort::Element, Sort::Class],
            _ => &[Sort::Element],
        }
    }

    pub fn parse(self, text: &str) -> Result<Formula> {
        formula::parse(text, &self.signature())
    }

    pub fn parse_with(self, text: &str, hints: &[Var]) -> Result<Formula> {
        formula::parse_with_hints(text, &self.signature(), hints)
    }

    /// Parses a comma-separated literal list and checks it belongs to this model.
    pub fn parse_elems(self, text: &str) -> Result<Vec<Elem>> {
        let elems = formula::parse_elems(text)?;
        for e in &elems {
            self.check_elem(e)?;
        }
        Ok(elems)
    }

    pub fn check_elem(self, e: &Elem) -> Result<()> {
        let ok = matches!(
            (self, e),
            (Theory::Eq, Elem::Nat(_))
                | (Theory::Dlo, Elem::Rat(_))
                | (Theory::Erel, Elem::Pair(..))
                | (Theory::Erel, Elem::Class(_))
        );
        if ok {
            Ok(())
        } else {
            Err(Error::Signature { symbol: e.to_string(), theory: self.signature().name })
        }
    }

    /// Algebraic closure of a finite set: the set itself, plus the classes
    /// of its elements in the equivalence-relation model.
    pub fn acl(self, set: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        let mut out = set.clone();
        if self == Theory::Erel {
            out.extend(set.iter().filter_map(|e| e.class_of().map(Elem::Class)));
        }
        out
    }

    pub fn in_acl(self, e: &Elem, set: &BTreeSet<Elem>) -> bool {
        match e {
            Elem::Class(c) => set.iter().any(|n| n.class_of() == Some(*c)),
            _ => set.contains(e),
        }
    }

    /// Orbit representatives of one element of `sort` over `named`, in
    /// enumeration order: existing elements interleaved with one fresh
    /// element per orbit of new ones.
    pub fn reps(self, sort: Sort, named: &BTreeSet<Elem>) -> Vec<Elem> {
        match (self, sort) {
            (Theory::Eq, Sort::Element) => {
                let mut out: Vec<Elem> = named.iter().filter(|e| matches!(e, Elem::Nat(_))).cloned().collect();
                out.push(fresh_nat(named));
                out
            }
            (Theory::Dlo, Sort::Element) => {
                let pts = points(named);
                let mut out = Vec::with_capacity(2 * pts.len() + 1);
                for (i, gap) in gaps(&pts).into_iter().enumerate() {
                    out.push(Elem::Rat(gap));
                    if let Some(p) = pts.get(i) {
                        out.push(Elem::Rat(p.clone()));
                    }
                }
                out
            }
            (Theory::Erel, Sort::Element) => {
                let mut out = Vec::new();
                for c in named_classes(named) {
                    out.extend(named.iter().filter(|e| matches!(e, Elem::Pair(i, _) if *i == c)).cloned());
                    out.push(fresh_member(c, named));
                }
                out.push(Elem::Pair(fresh_class(named), 0));
                out
            }
            (Theory::Erel, Sort::Class) => {
                let mut out: Vec<Elem> = named_classes(named).into_iter().map(Elem::Class).collect();
                out.push(Elem::Class(fresh_class(named)));
                out
            }
            (_, Sort::Class) => Vec::new(),
        }
    }

    /// Same representatives, fresh ones first. This order drives realization,
    /// so realizations prefer new elements and the least-fresh rules apply.
    pub fn generic_reps(self, sort: Sort, named: &BTreeSet<Elem>) -> Vec<Elem> {
        let all = self.reps(sort, named);
        let (fresh, old): (Vec<Elem>, Vec<Elem>) = all.into_iter().partition(|e| !self.in_acl(e, named));
        let mut fresh = fresh;
        if self == Theory::Erel && sort == Sort::Element {
            // the fresh-class element is listed last in enumeration order
            if let Some(last) = fresh.pop() {
                fresh.insert(0, last);
            }
        }
        fresh.extend(old);
        fresh
    }

    /// One representative per orbit of tuples of the given sorts over `named`.
    pub fn tuple_reps(self, sorts: &[Sort], named: &BTreeSet<Elem>) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(sorts.len());
        let mut named = named.clone();
        self.tuple_reps_rec(sorts, &mut named, &mut cur, &mut out);
        out
    }

    fn tuple_reps_rec(
        self,
        sorts: &[Sort],
        named: &mut BTreeSet<Elem>,
        cur: &mut Vec<Elem>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        let Some((first, rest)) = sorts.split_first() else {
            out.push(cur.clone());
            return;
        };
        for e in self.reps(*first, named) {
            let added = named.insert(e.clone());
            cur.push(e.clone());
            self.tuple_reps_rec(rest, named, cur, out);
            cur.pop();
            if added {
                named.remove(&e);
            }
        }
    }

    /// Single-element representatives of every sort.
    pub fn all_reps(self, named: &BTreeSet<Elem>) -> Vec<Elem> {
        self.sorts().iter().flat_map(|s| self.reps(*s, named)).collect()
    }
}

fn fresh_nat(named: &BTreeSet<Elem>) -> Elem {
    let n = (0..).find(|n| !named.contains(&Elem::Nat(*n))).expect("unbounded");
    Elem::Nat(n)
}

fn points(named: &BTreeSet<Elem>) -> Vec<BigRational> {
    named.iter().filter_map(|e| e.as_rat().cloned()).collect()
}

/// One point in every open gap cut out by the sorted points: midpoints
/// inside, endpoint ∓ 1 at the ends, 0 for the empty set.
fn gaps(pts: &[BigRational]) -> Vec<BigRational> {
    let one = BigRational::one();
    let Some(first) = pts.first() else {
        return vec![BigRational::from_integer(0.into())];
    };
    let mut out = vec![first - &one];
    for w in pts.windows(2) {
        out.push(midpoint(&w[0], &w[1]));
    }
    out.push(pts.last().unwrap() + &one);
    out
}

pub(crate) fn named_classes(named: &BTreeSet<Elem>) -> BTreeSet<u64> {
    named.iter().filter_map(Elem::class_of).collect()
}

fn fresh_class(named: &BTreeSet<Elem>) -> u64 {
    let used = named_classes(named);
    (0..).find(|i| !used.contains(i)).expect("unbounded")
}

fn fresh_member(class: u64, named: &BTreeSet<Elem>) -> Elem {
    let j = (0..).find(|j| !named.contains(&Elem::Pair(class, *j))).expect("unbounded");
    Elem::Pair(class, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(theory: Theory, s: &str) -> BTreeSet<Elem> {
        theory.parse_elems(s).unwrap().into_iter().collect()
    }

    #[test]
    fn dlo_reps_interleave() {
        let reps = Theory::Dlo.reps(Sort::Element, &set(Theory::Dlo, "0,1"));
        let shown: Vec<String> = reps.iter().map(Elem::to_string).collect();
        assert_eq!(shown, ["-1", "0", "1/2", "1", "2"]);
        assert_eq!(Theory::Dlo.reps(Sort::Element, &BTreeSet::new()), vec![Elem::int(0)]);
    }

    #[test]
    fn erel_reps() {
        let named = set(Theory::Erel, "2.5");
        let shown: Vec<String> = Theory::Erel.reps(Sort::Element, &named).iter().map(Elem::to_string).collect();
        assert_eq!(shown, ["2.5", "2.0", "0.0"]);
        let generic: Vec<String> =
            Theory::Erel.generic_reps(Sort::Element, &named).iter().map(Elem::to_string).collect();
        assert_eq!(generic, ["0.0", "2.0", "2.5"]);
        let classes: Vec<String> = Theory::Erel.reps(Sort::Class, &named).iter().map(Elem::to_string).collect();
        assert_eq!(classes, ["@2", "@0"]);
    }

    #[test]
    fn tuple_reps_count_orbits() {
        // pairs over the empty set in EQ: equal or distinct
        assert_eq!(Theory::Eq.tuple_reps(&[Sort::Element; 2], &BTreeSet::new()).len(), 2);
        // pairs over the empty set in DLO: <, =, >
        assert_eq!(Theory::Dlo.tuple_reps(&[Sort::Element; 2], &BTreeSet::new()).len(), 3);
    }

    #[test]
    fn acl_adds_classes() {
        let s = set(Theory::Erel, "2.5");
        assert!(Theory::Erel.acl(&s).contains(&Elem::Class(2)));
        assert!(Theory::Erel.in_acl(&Elem::Class(2), &s));
        assert!(!Theory::Erel.in_acl(&Elem::Pair(2, 6), &s));
    }
}
