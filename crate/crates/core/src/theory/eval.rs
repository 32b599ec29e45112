//! Truth in the canonical models.
//!
//! Quantifiers range over orbit representatives relative to the literals of
//! the formula plus the current assignment, which is exact because truth is
//! invariant under automorphisms fixing those elements. This path never goes
//! through quantifier elimination, so it can be used to test it.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};

use super::Theory;
use crate::error::{Error, Result};
use crate::formula::{Atom, Elem, Formula, Term, Var};

pub(crate) fn eval_term(t: &Term, env: &BTreeMap<Var, Elem>) -> Option<Elem> {
    match t {
        Term::Var(v) => env.get(v).cloned(),
        Term::Lit(e) => Some(e.clone()),
        Term::Cl(inner) => eval_term(inner, env)?.class_of().map(Elem::Class),
    }
}

pub(crate) fn eval_atom(a: &Atom, env: &BTreeMap<Var, Elem>) -> Option<bool> {
    let (s, t) = a.terms();
    let (s, t) = (eval_term(s, env)?, eval_term(t, env)?);
    Some(match a {
        Atom::Eq(..) => s == t,
        Atom::Lt(..) => match (s.as_rat(), t.as_rat()) {
            (Some(p), Some(q)) => p < q,
            _ => false,
        },
        Atom::Same(..) => s.class_of().is_some() && s.class_of() == t.class_of(),
    })
}

struct Evaluator<'a> {
    theory: Theory,
    formula: &'a Formula,
    lits: OnceCell<BTreeSet<Elem>>,
}

impl Evaluator<'_> {
    fn new(theory: Theory, formula: &Formula) -> Evaluator<'_> {
        Evaluator { theory, formula, lits: OnceCell::new() }
    }

    fn eval(&self, f: &Formula, env: &mut BTreeMap<Var, Elem>) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => eval_atom(a, env).ok_or_else(|| {
                Error::NotClosed(a.to_string())
            })?,
            Formula::Not(g) => !self.eval(g, env)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(l, r) => !self.eval(l, env)? || self.eval(r, env)?,
            Formula::Exists(v, body) => self.quantify(v, body, env, true)?,
            Formula::Forall(v, body) => !self.quantify(v, body, env, false)?,
        })
    }

    /// Is there a value for `v` making `body` equal to `want`?
    fn quantify(&self, v: &Var, body: &Formula, env: &mut BTreeMap<Var, Elem>, want: bool) -> Result<bool> {
        let mut named = self.lits.get_or_init(|| self.formula.literals()).clone();
        named.extend(env.values().cloned());
        let saved = env.remove(v);
        let mut found = false;
        for e in self.theory.reps(v.sort, &named) {
            env.insert(v.clone(), e);
            if self.eval(body, env)? == want {
                found = true;
                break;
            }
        }
        env.remove(v);
        if let Some(old) = saved {
            env.insert(v.clone(), old);
        }
        Ok(found)
    }
}

/// Truth of a closed formula in the canonical model.
pub fn holds(theory: Theory, f: &Formula) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        let names: Vec<String> = free.iter().map(|v| v.name.to_string()).collect();
        return Err(Error::NotClosed(names.join(", ")));
    }
    Evaluator::new(theory, f).eval(f, &mut BTreeMap::new())
}

/// Truth of `f` under the assignment `vars ↦ vals`; other free variables are an error.
pub fn satisfies(theory: Theory, f: &Formula, vars: &[Var], vals: &[Elem]) -> Result<bool> {
    if vars.len() != vals.len() {
        return Err(Error::Invalid(format!(
            "{} variables but {} values",
            vars.len(),
            vals.len()
        )));
    }
    if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::NotClosed(v.name.to_string()));
    }
    satisfies_checked(theory, f, vars, vals)
}

/// [`satisfies`] for callers that have already checked the free variables.
pub(crate) fn satisfies_checked(theory: Theory, f: &Formula, vars: &[Var], vals: &[Elem]) -> Result<bool> {
    let mut env: BTreeMap<Var, Elem> = vars.iter().cloned().zip(vals.iter().cloned()).collect();
    Evaluator::new(theory, f).eval(f, &mut env)
}

/// `f` with every variable-free atom replaced by its truth value and the
/// resulting constants folded away.
pub fn fold_ground(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => match eval_atom(a, &BTreeMap::new()) {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => f.clone(),
        },
        Formula::Not(g) => match fold_ground(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            g => Formula::not(g),
        },
        Formula::And(gs) => {
            let parts: Vec<Formula> = gs.iter().map(fold_ground).collect();
            if parts.contains(&Formula::False) {
                Formula::False
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(gs) => {
            let parts: Vec<Formula> = gs.iter().map(fold_ground).collect();
            if parts.contains(&Formula::True) {
                Formula::True
            } else {
                Formula::or(parts)
            }
        }
        Formula::Implies(l, r) => match (fold_ground(l), fold_ground(r)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, r) => r,
            (l, Formula::False) => Formula::not(l),
            (l, r) => Formula::implies(l, r),
        },
        Formula::Exists(v, body) => match fold_ground(body) {
            c @ (Formula::True | Formula::False) => c,
            body => Formula::exists(v.clone(), body),
        },
        Formula::Forall(v, body) => match fold_ground(body) {
            c @ (Formula::True | Formula::False) => c,
            body => Formula::forall(v.clone(), body),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(theory: Theory, s: &str) -> bool {
        holds(theory, &theory.parse(s).unwrap()).unwrap()
    }

    #[test]
    fn ground_examples() {
        assert!(check(Theory::Dlo, "0 < 1"));
        assert!(!check(Theory::Eq, "#0 = #1"));
        assert!(check(Theory::Erel, "E(2.5, 2.7)"));
        assert!(!check(Theory::Erel, "E(2.5, 3.5)"));
        assert!(check(Theory::Erel, "cl(2.5) = @2"));
    }

    #[test]
    fn quantified_examples() {
        assert!(check(Theory::Dlo, "forall x. exists y. x < y"));
        assert!(check(Theory::Dlo, "forall x, z. x < z -> exists y. x < y & y < z"));
        assert!(!check(Theory::Dlo, "exists x. forall y. x < y | x = y"));
        assert!(check(Theory::Eq, "forall x. exists y. !(x = y)"));
        assert!(!check(Theory::Eq, "exists x. forall y. x = y"));
        assert!(check(Theory::Erel, "forall c. exists x, y. cl(x) = c & cl(y) = c & !(x = y)"));
        assert!(check(Theory::Erel, "exists c. !(c = @0) & !(c = @1)"));
        assert!(!check(Theory::Erel, "exists x. cl(x) = @0 & forall y. cl(y) = @0 -> y = x"));
    }

    #[test]
    fn ground_atoms_fold() {
        let f = Theory::Dlo.parse("2 < 3 | x = 0").unwrap();
        assert_eq!(fold_ground(&f), Formula::True);
        let f = Theory::Dlo.parse("3 < 2 | x = 0").unwrap();
        assert_eq!(fold_ground(&f).to_string(), "x = 0");
        let f = Theory::Erel.parse("exists y. E(2.2, 1.0) & E(x, y)").unwrap();
        assert_eq!(fold_ground(&f), Formula::False);
    }

    #[test]
    fn open_formula_rejected() {
        let f = Theory::Eq.parse("x = #0").unwrap();
        assert!(matches!(holds(Theory::Eq, &f), Err(Error::NotClosed(_))));
        assert!(satisfies(Theory::Eq, &f, &[Var::elem("x")], &[Elem::Nat(0)]).unwrap());
    }
}
