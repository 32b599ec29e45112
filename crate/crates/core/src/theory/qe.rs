//! Quantifier elimination.
//!
//! Innermost quantifiers go first. The matrix is put in disjunctive normal
//! form and the variable is removed from each conjunction of literals:
//!
//! * EQ: substitute along a positive equation, otherwise drop the
//!   disequalities (the domain is infinite).
//! * DLO: negated `<` is split into `>` or `=` up front; substitute along an
//!   equation, otherwise keep `l < u` for every lower bound `l` and upper
//!   bound `u` and drop disequalities (density, no endpoints).
//! * EREL: element variables are substituted along an equation, else along
//!   a class equation `cl(v) = κ` (each class is infinite, so remaining
//!   disequalities drop), else dropped outright; class variables are
//!   substituted along an equation or dropped (infinitely many classes).

use std::collections::BTreeSet;

use super::eval::eval_atom;
use super::Theory;
use crate::error::Result;
use crate::formula::{Atom, Formula, Sort, Term, Var};

type Lit = (Atom, bool);
type Conj = Vec<Lit>;
type Dnf = Vec<Conj>;

/// A quantifier-free equivalent of `f` in the canonical model.
pub fn qe(theory: Theory, f: &Formula) -> Result<Formula> {
    theory.signature().check(f)?;
    let g = eliminate_all(theory, f);
    Ok(to_formula(&dnf(theory, &g, true)))
}

fn eliminate_all(theory: Theory, f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate_all(theory, g)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| eliminate_all(theory, g)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| eliminate_all(theory, g)).collect()),
        Formula::Implies(l, r) => Formula::implies(eliminate_all(theory, l), eliminate_all(theory, r)),
        Formula::Exists(v, body) => {
            let matrix = eliminate_all(theory, body);
            to_formula(&exists_dnf(theory, v, dnf(theory, &matrix, true)))
        }
        Formula::Forall(v, body) => {
            let matrix = eliminate_all(theory, body);
            Formula::not(to_formula(&exists_dnf(theory, v, dnf(theory, &matrix, false))))
        }
    }
}

fn exists_dnf(theory: Theory, v: &Var, d: Dnf) -> Dnf {
    let mut out = Dnf::new();
    for conj in d {
        for c in eliminate(theory, v, conj) {
            push_disjunct(&mut out, c);
        }
    }
    out
}

fn to_formula(d: &Dnf) -> Formula {
    Formula::or(d.iter().map(|conj| {
        Formula::and(conj.iter().map(|(a, pos)| {
            let atom = Formula::Atom(a.clone());
            if *pos {
                atom
            } else {
                Formula::not(atom)
            }
        }))
    }))
}

fn push_disjunct(d: &mut Dnf, c: Conj) {
    if c.is_empty() {
        d.clear();
        d.push(c);
        return;
    }
    if d.first().is_some_and(|x| x.is_empty()) {
        return;
    }
    if !d.contains(&c) {
        d.push(c);
    }
}

/// Normal form of `f` (if `pos`) or of its negation.
fn dnf(theory: Theory, f: &Formula, pos: bool) -> Dnf {
    match (f, pos) {
        (Formula::True, true) | (Formula::False, false) => vec![vec![]],
        (Formula::True, false) | (Formula::False, true) => vec![],
        (Formula::Atom(a), _) => literal(theory, a, pos),
        (Formula::Not(g), _) => dnf(theory, g, !pos),
        (Formula::And(gs), true) | (Formula::Or(gs), false) => {
            let mut acc: Dnf = vec![vec![]];
            for g in gs {
                let part = dnf(theory, g, pos);
                acc = product(&acc, &part);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        (Formula::Or(gs), true) | (Formula::And(gs), false) => {
            let mut acc = Dnf::new();
            for g in gs {
                for c in dnf(theory, g, pos) {
                    push_disjunct(&mut acc, c);
                }
            }
            acc
        }
        (Formula::Implies(l, r), true) => {
            let mut acc = dnf(theory, l, false);
            for c in dnf(theory, r, true) {
                push_disjunct(&mut acc, c);
            }
            acc
        }
        (Formula::Implies(l, r), false) => product(&dnf(theory, l, true), &dnf(theory, r, false)),
        (Formula::Exists(..) | Formula::Forall(..), _) => {
            dnf(theory, &eliminate_all(theory, f), pos)
        }
    }
}

fn product(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for x in a {
        for y in b {
            let mut c = x.clone();
            let mut dead = false;
            for l in y {
                if !add_lit(&mut c, l.clone()) {
                    dead = true;
                    break;
                }
            }
            if !dead {
                push_disjunct(&mut out, c);
            }
        }
    }
    out
}

/// Adds a literal to a conjunction; false when it contradicts one already there.
fn add_lit(c: &mut Conj, l: Lit) -> bool {
    if c.iter().any(|(a, p)| *a == l.0 && *p != l.1) {
        return false;
    }
    if !c.contains(&l) {
        c.push(l);
        c.sort();
    }
    true
}

/// Canonical argument order for symmetric atoms: open terms before ground ones.
fn orient(s: Term, t: Term) -> (Term, Term) {
    if (s.is_ground(), &s) <= (t.is_ground(), &t) {
        (s, t)
    } else {
        (t, s)
    }
}

/// Normalizes one literal into a (tiny) DNF.
fn literal(theory: Theory, a: &Atom, pos: bool) -> Dnf {
    let a = match a {
        Atom::Eq(s, t) => {
            let (s, t) = orient(s.normalize(), t.normalize());
            Atom::Eq(s, t)
        }
        Atom::Lt(s, t) => Atom::Lt(s.normalize(), t.normalize()),
        Atom::Same(s, t) => {
            let (s, t) = orient(Term::cl(s.clone()).normalize(), Term::cl(t.clone()).normalize());
            Atom::Eq(s, t)
        }
    };
    let (s, t) = a.terms();
    if s.is_ground() && t.is_ground() {
        let v = eval_atom(&a, &Default::default()).unwrap_or(false);
        return if v == pos { vec![vec![]] } else { vec![] };
    }
    if s == t {
        let v = matches!(a, Atom::Eq(..));
        return if v == pos { vec![vec![]] } else { vec![] };
    }
    match (&a, pos, theory) {
        (Atom::Lt(s, t), false, _) => {
            let (l, r) = orient(s.clone(), t.clone());
            vec![vec![(Atom::Lt(t.clone(), s.clone()), true)], vec![(Atom::Eq(l, r), true)]]
        }
        _ => vec![vec![(a, pos)]],
    }
}

fn subst_term(t: &Term, from: &Term, to: &Term) -> Term {
    if t == from {
        return to.clone();
    }
    match t {
        Term::Cl(inner) => Term::cl(subst_term(inner, from, to)),
        _ => t.clone(),
    }
}

/// Replaces `from` by `to` throughout a conjunction, renormalizing.
fn subst_conj(theory: Theory, c: &Conj, from: &Term, to: &Term) -> Dnf {
    let mut acc: Dnf = vec![vec![]];
    for (a, pos) in c {
        let (s, t) = a.terms();
        let (s, t) = (subst_term(s, from, to), subst_term(t, from, to));
        let a2 = match a {
            Atom::Eq(..) => Atom::Eq(s, t),
            Atom::Lt(..) => Atom::Lt(s, t),
            Atom::Same(..) => Atom::Same(s, t),
        };
        acc = product(&acc, &literal(theory, &a2, *pos));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn other_side<'a>(a: &'a Atom, x: &Term) -> Option<&'a Term> {
    match a {
        Atom::Eq(s, t) if s == x => Some(t),
        Atom::Eq(s, t) if t == x => Some(s),
        _ => None,
    }
}

fn eliminate(theory: Theory, v: &Var, conj: Conj) -> Dnf {
    let vt = Term::Var(v.clone());
    let (with, without): (Conj, Conj) = conj.into_iter().partition(|(a, _)| {
        let (s, t) = a.terms();
        s.mentions(v) || t.mentions(v)
    });
    if with.is_empty() {
        return vec![without];
    }
    // positive equation v = t
    if let Some(t) = with
        .iter()
        .filter(|(_, pos)| *pos)
        .find_map(|(a, _)| other_side(a, &vt).filter(|t| !t.mentions(v)))
    {
        let t = t.clone();
        let mut all = without;
        all.extend(with);
        return subst_conj(theory, &all, &vt, &t);
    }
    let mut kept = without;
    match (theory, v.sort) {
        (Theory::Dlo, _) => {
            let mut lower = BTreeSet::new();
            let mut upper = BTreeSet::new();
            for (a, pos) in &with {
                if let (Atom::Lt(s, t), true) = (a, pos) {
                    if *s == vt {
                        upper.insert(t.clone());
                    } else {
                        lower.insert(s.clone());
                    }
                }
            }
            let mut acc: Dnf = vec![kept];
            for l in &lower {
                for u in &upper {
                    acc = product(&acc, &literal(theory, &Atom::Lt(l.clone(), u.clone()), true));
                }
            }
            acc
        }
        (Theory::Erel, Sort::Element) => {
            let cv = Term::cl(vt.clone());
            let class_eq = with
                .iter()
                .filter(|(_, pos)| *pos)
                .find_map(|(a, _)| other_side(a, &cv).filter(|k| !k.mentions(v)))
                .cloned();
            match class_eq {
                Some(k) => {
                    let mut out = Dnf::new();
                    for c in subst_conj(theory, &with, &cv, &k) {
                        let rest: Conj = c
                            .into_iter()
                            .filter(|(a, _)| {
                                let (s, t) = a.terms();
                                !(s.mentions(v) || t.mentions(v))
                            })
                            .collect();
                        for c2 in product(&vec![kept.clone()], &vec![rest]) {
                            push_disjunct(&mut out, c2);
                        }
                    }
                    out
                }
                None => vec![kept],
            }
        }
        _ => {
            kept.sort();
            vec![kept]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::holds;

    fn q(theory: Theory, s: &str) -> String {
        qe(theory, &theory.parse(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(q(Theory::Dlo, "exists y. x < y & y < z"), "x < z");
        assert_eq!(q(Theory::Eq, "exists y. y != x & y != z"), "true");
        assert_eq!(q(Theory::Erel, "exists y. cl(y) = C & y != 2.5"), "true");
    }

    #[test]
    fn sentences_reduce_to_constants() {
        assert_eq!(q(Theory::Dlo, "forall x. exists y. y < x"), "true");
        assert_eq!(q(Theory::Eq, "exists x. forall y. x = y"), "false");
        assert_eq!(q(Theory::Erel, "forall x. exists c. !(cl(x) = c)"), "true");
        assert_eq!(q(Theory::Dlo, "exists x. 0 < x & x < 0"), "false");
    }

    #[test]
    fn substitution_through_class() {
        let f = Theory::Erel.parse("exists y. E(x, y) & y = 2.5").unwrap();
        let g = qe(Theory::Erel, &f).unwrap();
        assert_eq!(g.to_string(), "cl(x) = @2");
    }

    #[test]
    fn qe_agrees_with_evaluation_on_sentences() {
        for (theory, s) in [
            (Theory::Dlo, "forall x. x < 1 -> exists y. x < y & y < 1"),
            (Theory::Dlo, "exists x, y. x < y & !(exists z. x < z & z < y)"),
            (Theory::Eq, "forall x, y. x = y | !(x = y)"),
            (Theory::Erel, "exists x, y. E(x, y) & !(x = y) & cl(x) = @3"),
            (Theory::Erel, "forall c. exists x. cl(x) = c & !(x = 1.1)"),
        ] {
            let f = theory.parse(s).unwrap();
            let g = qe(theory, &f).unwrap();
            assert!(g.is_quantifier_free());
            assert_eq!(holds(theory, &f).unwrap(), holds(theory, &g).unwrap(), "{s}");
        }
    }
}
