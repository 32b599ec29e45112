//! Multi-sorted first-order formulas shared by every backend.
//!
//! One AST serves all three theories; a [`Signature`] decides which atoms,
//! function symbols and literal shapes are legal. Element literals are
//! embedded directly in terms, so a formula "with parameters" is just a
//! formula containing literals.

mod parse;
mod render;
mod signature;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use parse::{parse, parse_with_hints};
pub use signature::{LiteralKind, Signature};

/// The two sorts used by the shipped theories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Element,
    Class,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Element => f.write_str("element"),
            Sort::Class => f.write_str("class"),
        }
    }
}

impl FromStr for Sort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "element" => Ok(Sort::Element),
            "class" => Ok(Sort::Class),
            other => Err(Error::Invalid(format!("unknown sort `{other}`"))),
        }
    }
}

/// A sorted variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Self {
        Var { name: Arc::from(name), sort }
    }

    pub fn elem(name: &str) -> Self {
        Var::new(name, Sort::Element)
    }

    pub fn class(name: &str) -> Self {
        Var::new(name, Sort::Class)
    }

    /// `name:sort`, the form used in serialized certificates.
    pub fn annotated(&self) -> String {
        format!("{}:{}", self.name, self.sort)
    }

    pub fn parse_annotated(s: &str) -> Result<Var> {
        match s.split_once(':') {
            Some((name, sort)) => Ok(Var::new(name, sort.parse()?)),
            None => Ok(Var::elem(s)),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// An element of one of the canonical models.
///
/// `Nat` lives in the pure-equality model on the naturals, `Rat` in the
/// rational order, `Pair`/`Class` in the two-sorted equivalence-relation
/// model where `cl((i, j)) = i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Nat(u64),
    Rat(BigRational),
    Pair(u64, u64),
    Class(u64),
}

impl Elem {
    pub fn rat(numer: i64, denom: i64) -> Elem {
        Elem::Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn int(n: i64) -> Elem {
        Elem::rat(n, 1)
    }

    pub fn sort(&self) -> Sort {
        match self {
            Elem::Class(_) => Sort::Class,
            _ => Sort::Element,
        }
    }

    /// The class of an element of the equivalence-relation model.
    pub fn class_of(&self) -> Option<u64> {
        match self {
            Elem::Pair(i, _) => Some(*i),
            Elem::Class(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Elem::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn kind(&self) -> LiteralKind {
        match self {
            Elem::Nat(_) => LiteralKind::Nat,
            Elem::Rat(_) => LiteralKind::Rational,
            Elem::Pair(..) => LiteralKind::Pair,
            Elem::Class(_) => LiteralKind::Class,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Nat(n) => write!(f, "#{n}"),
            Elem::Rat(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Elem::Pair(i, j) => write!(f, "{i}.{j}"),
            Elem::Class(i) => write!(f, "@{i}"),
        }
    }
}

impl FromStr for Elem {
    type Err = Error;

    /// Literal syntax is unambiguous across theories: `#n`, `@n`, `i.j`,
    /// and (possibly negative) integers or fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Syntax { pos: 0, msg: format!("bad literal `{s}`") };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('#') {
            return rest.parse().map(Elem::Nat).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('@') {
            return rest.parse().map(Elem::Class).map_err(|_| bad());
        }
        if let Some((i, j)) = s.split_once('.') {
            let i = i.parse().map_err(|_| bad())?;
            let j = j.parse().map_err(|_| bad())?;
            return Ok(Elem::Pair(i, j));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() || q.is_negative() {
                return Err(bad());
            }
            return Ok(Elem::Rat(BigRational::new(p, q)));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Elem::Rat(BigRational::from_integer(n)))
    }
}

/// Parses a comma-separated list of literals; the empty string is the empty list.
pub fn parse_elems(s: &str) -> Result<Vec<Elem>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(Elem::from_str)
        .collect()
}

pub fn render_elems(elems: &[Elem]) -> String {
    elems.iter().map(Elem::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Lit(Elem),
    /// The class projection `cl`.
    Cl(Box<Term>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn cl(t: Term) -> Term {
        Term::Cl(Box::new(t))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Lit(e) => e.sort(),
            Term::Cl(_) => Sort::Class,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Lit(_) => true,
            Term::Cl(t) => t.is_ground(),
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Lit(_) => false,
            Term::Cl(t) => t.mentions(v),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Lit(_) => {}
            Term::Cl(t) => t.collect_vars(out),
        }
    }

    fn collect_lits(&self, out: &mut BTreeSet<Elem>) {
        match self {
            Term::Var(_) => {}
            Term::Lit(e) => {
                out.insert(e.clone());
            }
            Term::Cl(t) => t.collect_lits(out),
        }
    }

    /// Folds `cl` of a literal element into a class literal.
    pub fn normalize(&self) -> Term {
        match self {
            Term::Cl(inner) => match inner.normalize() {
                Term::Lit(Elem::Pair(i, _)) => Term::Lit(Elem::Class(i)),
                t => Term::cl(t),
            },
            t => t.clone(),
        }
    }

    fn subst(&self, binding: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Lit(_) => self.clone(),
            Term::Cl(t) => Term::cl(t.subst(binding)),
        }
    }

    fn map_lits(&self, f: &mut impl FnMut(&Elem) -> Option<Term>) -> Term {
        match self {
            Term::Lit(e) => f(e).unwrap_or_else(|| self.clone()),
            Term::Var(_) => self.clone(),
            Term::Cl(t) => Term::cl(t.map_lits(f)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Eq(Term, Term),
    /// The dense order `<`.
    Lt(Term, Term),
    /// The equivalence relation `E`, i.e. `cl(s) = cl(t)`.
    Same(Term, Term),
}

impl Atom {
    pub fn terms(&self) -> (&Term, &Term) {
        match self {
            Atom::Eq(s, t) | Atom::Lt(s, t) | Atom::Same(s, t) => (s, t),
        }
    }

    fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Eq(s, t) => Atom::Eq(f(s), f(t)),
            Atom::Lt(s, t) => Atom::Lt(f(s), f(t)),
            Atom::Same(s, t) => Atom::Same(f(s), f(t)),
        }
    }
}

/// A first-order formula. `And`/`Or` are n-ary and hold at least two
/// operands when built through [`Formula::and`] / [`Formula::or`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn eq(s: Term, t: Term) -> Formula {
        Formula::Atom(Atom::Eq(s, t))
    }

    pub fn lt(s: Term, t: Term) -> Formula {
        Formula::Atom(Atom::Lt(s, t))
    }

    pub fn same(s: Term, t: Term) -> Formula {
        Formula::Atom(Atom::Same(s, t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn neq(s: Term, t: Term) -> Formula {
        Formula::not(Formula::eq(s, t))
    }

    /// Conjunction, flattening nested conjunctions.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction, flattening nested disjunctions.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                let (s, t) = a.terms();
                let mut vs = BTreeSet::new();
                s.collect_vars(&mut vs);
                t.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            let (s, t) = a.terms();
            let mut vs = BTreeSet::new();
            s.collect_vars(&mut vs);
            t.collect_vars(&mut vs);
            out.extend(vs.into_iter().map(|v| v.name));
        });
        self.visit_binders(&mut |v| {
            out.insert(v.name.clone());
        });
        out
    }

    /// Element literals occurring in the formula.
    pub fn literals(&self) -> BTreeSet<Elem> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            let (s, t) = a.terms();
            s.collect_lits(&mut out);
            t.collect_lits(&mut out);
        });
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(l, r) => l.is_quantifier_free() && r.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Implies(l, r) => {
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_binders(f)),
            Formula::Implies(l, r) => {
                l.visit_binders(f);
                r.visit_binders(f);
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(v);
                g.visit_binders(f);
            }
        }
    }

    /// Immediate subformulas, including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut Vec<Formula>) {
        out.push(self.clone());
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g) => g.collect_subformulas(out),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.collect_subformulas(out)),
            Formula::Implies(l, r) => {
                l.collect_subformulas(out);
                r.collect_subformulas(out);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.collect_subformulas(out),
        }
    }

    /// Capture-avoiding simultaneous substitution of terms for free variables.
    pub fn substitute(&self, binding: &BTreeMap<Var, Term>) -> Result<Formula> {
        for (v, t) in binding {
            if v.sort != t.sort() {
                return Err(Error::Sort {
                    term: t.to_string(),
                    msg: format!("cannot substitute a {} term for {} variable {}", t.sort(), v.sort, v),
                });
            }
        }
        Ok(self.subst_unchecked(binding))
    }

    pub(crate) fn subst_unchecked(&self, binding: &BTreeMap<Var, Term>) -> Formula {
        if binding.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(a.map_terms(|t| t.subst(binding))),
            Formula::Not(f) => Formula::not(f.subst_unchecked(binding)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst_unchecked(binding)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst_unchecked(binding)).collect()),
            Formula::Implies(l, r) => {
                Formula::implies(l.subst_unchecked(binding), r.subst_unchecked(binding))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = binding.clone();
                inner.remove(v);
                let body_free = body.free_vars();
                inner.retain(|k, _| body_free.contains(k));
                let captures = inner.values().any(|t| t.mentions(v));
                let (v2, body2) = if captures {
                    let mut avoid: BTreeSet<Arc<str>> = body.all_var_names();
                    for t in inner.values() {
                        let mut vs = BTreeSet::new();
                        t.collect_vars(&mut vs);
                        avoid.extend(vs.into_iter().map(|w| w.name));
                    }
                    avoid.extend(inner.keys().map(|k| k.name.clone()));
                    let fresh = Var::new(&fresh_name(&v.name, &avoid), v.sort);
                    let mut rename = BTreeMap::new();
                    rename.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.subst_unchecked(&rename))
                } else {
                    (v.clone(), (**body).clone())
                };
                let body3 = body2.subst_unchecked(&inner);
                match self {
                    Formula::Exists(..) => Formula::exists(v2, body3),
                    _ => Formula::forall(v2, body3),
                }
            }
        }
    }

    /// Substitutes the tuple `vals` for `vars` (which must be distinct).
    pub fn instantiate(&self, vars: &[Var], vals: &[Elem]) -> Formula {
        let binding: BTreeMap<Var, Term> = vars
            .iter()
            .cloned()
            .zip(vals.iter().cloned().map(Term::Lit))
            .collect();
        self.subst_unchecked(&binding)
    }

    /// Renames free variables to other variables of the same sort.
    pub fn rename(&self, pairs: &[(Var, Var)]) -> Formula {
        let binding: BTreeMap<Var, Term> = pairs
            .iter()
            .map(|(a, b)| (a.clone(), Term::Var(b.clone())))
            .collect();
        self.subst_unchecked(&binding)
    }

    /// Replaces literal occurrences using `f`; literals mapped to `None` stay.
    pub fn map_literals(&self, f: &mut impl FnMut(&Elem) -> Option<Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(a.map_terms(|t| t.map_lits(f))),
            Formula::Not(g) => Formula::not(g.map_literals(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_literals(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_literals(f)).collect()),
            Formula::Implies(l, r) => Formula::implies(l.map_literals(f), r.map_literals(f)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_literals(f)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.map_literals(f)),
        }
    }

    /// Folds `cl(i.j)` into `@i` everywhere.
    pub fn normalize_terms(&self) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(a.map_terms(Term::normalize)),
            Formula::Not(g) => Formula::not(g.normalize_terms()),
            Formula::And(gs) => Formula::And(gs.iter().map(Formula::normalize_terms).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(Formula::normalize_terms).collect()),
            Formula::Implies(l, r) => Formula::implies(l.normalize_terms(), r.normalize_terms()),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.normalize_terms()),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.normalize_terms()),
        }
    }

    /// Replaces free variable sorts by the sorts given in `hints` (matched by name).
    pub fn with_sorts(&self, hints: &[Var]) -> Formula {
        let pairs: Vec<(Var, Var)> = self
            .free_vars()
            .into_iter()
            .filter_map(|v| {
                hints
                    .iter()
                    .find(|h| h.name == v.name && h.sort != v.sort)
                    .map(|h| (v, h.clone()))
            })
            .collect();
        if pairs.is_empty() {
            self.clone()
        } else {
            self.rename(&pairs)
        }
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reads a rendered formula over the union of all signatures. Free variable
/// sorts are inferred; callers holding declared variables should follow up
/// with [`Formula::with_sorts`].
impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text, &Signature::universal()).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.annotated())
    }
}

impl<'de> serde::Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Var::parse_annotated(&text).map_err(serde::de::Error::custom)
    }
}

/// `base1`, `base2`, ...: the first numbered variant of `base` not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Arc<str>>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|n| format!("{stem}{n}"))
        .find(|cand| !avoid.contains(cand.as_str()))
        .expect("unbounded search")
}

/// Variables `stem1..stemN` of the given sorts (or just `stem` when there is one).
pub fn tuple_vars(stem: &str, sorts: &[Sort]) -> Vec<Var> {
    if sorts.len() == 1 {
        return vec![Var::new(stem, sorts[0])];
    }
    sorts
        .iter()
        .enumerate()
        .map(|(i, s)| Var::new(&format!("{stem}{}", i + 1), *s))
        .collect()
}

pub fn sorts_of(elems: &[Elem]) -> Vec<Sort> {
    elems.iter().map(Elem::sort).collect()
}

/// Midpoint of two rationals.
pub(crate) fn midpoint(a: &BigRational, b: &BigRational) -> BigRational {
    (a + b) / BigRational::from_integer(BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_syntax() {
        assert_eq!("#3".parse::<Elem>().unwrap(), Elem::Nat(3));
        assert_eq!("@4".parse::<Elem>().unwrap(), Elem::Class(4));
        assert_eq!("2.5".parse::<Elem>().unwrap(), Elem::Pair(2, 5));
        assert_eq!("-1/2".parse::<Elem>().unwrap(), Elem::rat(-1, 2));
        assert_eq!("4/2".parse::<Elem>().unwrap(), Elem::int(2));
        assert_eq!(Elem::rat(-3, 4).to_string(), "-3/4");
        assert_eq!(Elem::int(-3).to_string(), "-3");
        assert!("1/0".parse::<Elem>().is_err());
        assert!("x".parse::<Elem>().is_err());
    }

    #[test]
    fn free_vars_examples() {
        let x = Var::elem("x");
        let y = Var::elem("y");
        let f = Formula::eq(Term::var(&x), Term::Lit(Elem::Nat(3)));
        assert_eq!(f.free_vars(), BTreeSet::from([x.clone()]));
        let g = Formula::exists(y.clone(), Formula::lt(Term::var(&x), Term::var(&y)));
        assert_eq!(g.free_vars(), BTreeSet::from([x]));
        assert!(Formula::True.free_vars().is_empty());
    }

    #[test]
    fn substitution_examples() {
        let x = Var::elem("x");
        let y = Var::elem("y");
        let f = Formula::eq(Term::var(&x), Term::var(&y));
        let g = f
            .substitute(&BTreeMap::from([(y.clone(), Term::Lit(Elem::Nat(3)))]))
            .unwrap();
        assert_eq!(g, Formula::eq(Term::var(&x), Term::Lit(Elem::Nat(3))));

        let h = Formula::exists(y.clone(), Formula::lt(Term::var(&x), Term::var(&y)));
        let bound = h
            .substitute(&BTreeMap::from([(y.clone(), Term::Lit(Elem::int(0)))]))
            .unwrap();
        assert_eq!(bound, h);

        let captured = h
            .substitute(&BTreeMap::from([(x.clone(), Term::var(&y))]))
            .unwrap();
        let y1 = Var::elem("y1");
        assert_eq!(
            captured,
            Formula::exists(y1.clone(), Formula::lt(Term::var(&y), Term::var(&y1)))
        );
    }

    #[test]
    fn substitution_rejects_sort_mismatch() {
        let x = Var::elem("x");
        let f = Formula::eq(Term::var(&x), Term::var(&x));
        let err = f.substitute(&BTreeMap::from([(x, Term::Lit(Elem::Class(1)))]));
        assert!(matches!(err, Err(Error::Sort { .. })));
    }

    #[test]
    fn and_or_flatten() {
        let a = Formula::eq(Term::Lit(Elem::Nat(0)), Term::Lit(Elem::Nat(1)));
        let f = Formula::and([a.clone(), Formula::and([a.clone(), a.clone()])]);
        assert_eq!(f, Formula::And(vec![a.clone(), a.clone(), a.clone()]));
        assert_eq!(Formula::or([]), Formula::False);
        assert_eq!(Formula::and([a.clone()]), a);
    }

    #[test]
    fn normalize_folds_class_of_literal() {
        let t = Term::cl(Term::Lit(Elem::Pair(2, 5)));
        assert_eq!(t.normalize(), Term::Lit(Elem::Class(2)));
    }
}
