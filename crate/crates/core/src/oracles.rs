//! Closed-form answers for independence and rank, computed without the
//! forking or rank searches. They serve as ground truth for those searches.
//!
//! EREL rank table. Write `A` for the base together with the coordinates
//! already placed. An element coordinate `e` has rank
//!
//! * 0 when `e ∈ A` (algebraic, nothing can fork);
//! * 1 when its class is named by `A` but `e ∉ A`: the only forking
//!   extension fixes `e` itself, after which the type is algebraic;
//! * 2 when its class is new: fixing the class (by naming it or naming
//!   another member) forks and leaves the rank-1 case, so the longest
//!   chain has two links.
//!
//! A class coordinate has rank 0 when named by `A` and 1 otherwise (only
//! naming it forks). Ranks of tuples add coordinate by coordinate, as the
//! structure is superstable of finite rank and Lascar's equality holds for
//! these one-based types.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Elem, Formula, Term, Var};
use crate::theory::{holds, qe, realize_type, solution_count, SolutionCount, Theory, TypeDesc};

/// An oracle verdict with the rule that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub query: String,
    pub verdict: String,
    pub rule: String,
}

/// Closed-form rank contribution of each coordinate of `a` over `base`.
pub fn coordinate_ranks(theory: Theory, a: &[Elem], base: &[Elem]) -> Vec<usize> {
    let mut known: BTreeSet<Elem> = base.iter().cloned().collect();
    let mut out = Vec::with_capacity(a.len());
    for e in a {
        let r = match (theory, e) {
            (Theory::Erel, Elem::Pair(..)) if known.contains(e) => 0,
            (Theory::Erel, Elem::Pair(..)) if theory.in_acl(&Elem::Class(e.class_of().unwrap()), &known) => 1,
            (Theory::Erel, Elem::Pair(..)) => 2,
            (Theory::Erel, Elem::Class(_)) => usize::from(!theory.in_acl(e, &known)),
            _ => usize::from(!known.contains(e)),
        };
        out.push(r);
        known.insert(e.clone());
    }
    out
}

/// Closed-form rank of `tp(a/base)`: the sum of the coordinate ranks.
/// In EQ and DLO this is the number of distinct coordinates outside the
/// base.
pub fn closed_rank(theory: Theory, a: &[Elem], base: &[Elem]) -> usize {
    coordinate_ranks(theory, a, base).into_iter().sum()
}

/// Closed-form independence of `a` from `b` over `base`.
pub fn oracle_indep(theory: Theory, a: &[Elem], b: &[Elem], base: &[Elem]) -> bool {
    match theory {
        Theory::Eq => {
            let base: BTreeSet<&Elem> = base.iter().collect();
            a.iter().all(|e| base.contains(e) || !b.contains(e))
        }
        Theory::Dlo | Theory::Erel => {
            let mut over = base.to_vec();
            over.extend(b.iter().cloned());
            closed_rank(theory, a, &over) == closed_rank(theory, a, base)
        }
    }
}

pub fn oracle_indep_report(theory: Theory, a: &[Elem], b: &[Elem], base: &[Elem]) -> OracleReport {
    let rule = match theory {
        Theory::Eq => "acl-disjointness",
        Theory::Dlo => "dimension preservation",
        Theory::Erel => "closed-form U-rank preservation",
    };
    OracleReport {
        query: format!("indep({:?}, {:?}, {:?})", show(a), show(b), show(base)),
        verdict: oracle_indep(theory, a, b, base).to_string(),
        rule: rule.into(),
    }
}

fn show(v: &[Elem]) -> String {
    crate::formula::render_elems(v)
}

/// Dimension of the set defined by a DLO formula in `vars`, by projecting
/// away the last variable: the set has dimension `d + 1` over the points
/// whose fibre contains an interval, and otherwise the dimension of its
/// projection.
pub fn oracle_dim(f: &Formula, vars: &[Var]) -> Result<usize> {
    Theory::Dlo.signature().check(f)?;
    if solution_count(Theory::Dlo, f, vars)? == SolutionCount::Finite(0, vec![]) {
        return Err(Error::Inconsistent(f.to_string()));
    }
    dim(f, vars)
}

fn dim(f: &Formula, vars: &[Var]) -> Result<usize> {
    let Some((last, rest)) = vars.split_last() else {
        return Ok(0);
    };
    let mut avoid = f.all_var_names();
    avoid.extend(vars.iter().map(|v| v.name.clone()));
    let fresh = |stem: &str, avoid: &mut BTreeSet<std::sync::Arc<str>>| {
        let name = crate::formula::fresh_name(stem, avoid);
        avoid.insert(std::sync::Arc::from(name.as_str()));
        Var::elem(&name)
    };
    let (u, v, t) = (fresh("u", &mut avoid), fresh("v", &mut avoid), fresh("t", &mut avoid));
    let (ut, vt, tt) = (Term::var(&u), Term::var(&v), Term::var(&t));
    let moved = f.rename(&[(last.clone(), t.clone())]);
    let interval = Formula::exists_all(
        &[u, v],
        Formula::and([
            Formula::lt(ut.clone(), vt.clone()),
            Formula::forall(
                t,
                Formula::implies(Formula::and([Formula::lt(ut, tt.clone()), Formula::lt(tt, vt)]), moved),
            ),
        ]),
    );
    let thick = qe(Theory::Dlo, &interval)?;
    let projection = qe(Theory::Dlo, &Formula::exists(last.clone(), f.clone()))?;
    let mut best = dim(&projection, rest)?;
    if is_consistent(&thick, rest)? {
        best = best.max(dim(&thick, rest)? + 1);
    }
    Ok(best)
}

fn is_consistent(f: &Formula, vars: &[Var]) -> Result<bool> {
    if vars.is_empty() {
        return holds(Theory::Dlo, f);
    }
    Ok(solution_count(Theory::Dlo, f, vars)? != SolutionCount::Finite(0, vec![]))
}

/// Closed-form Uþ-rank of a complete type.
pub fn oracle_uth(t: &TypeDesc) -> Result<usize> {
    match t.theory {
        Theory::Dlo => oracle_dim(&t.formula, &t.vars),
        theory => {
            let a = realize_type(t, &[])?;
            Ok(closed_rank(theory, &a, &t.base))
        }
    }
}
