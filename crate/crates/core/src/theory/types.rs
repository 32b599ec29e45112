//! Complete types over finite sets, solution counting, and realization.

use std::collections::BTreeSet;
use std::fmt;

use super::eval::{satisfies, satisfies_checked};
use super::qe::qe;
use super::Theory;
use crate::error::{Error, Result};
use crate::formula::{render_elems, sorts_of, tuple_vars, Elem, Formula, Sort, Term, Var};

/// A complete type over a finite base, presented by an isolating
/// quantifier-free formula whose free variables are `vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeDesc {
    pub theory: Theory,
    pub vars: Vec<Var>,
    pub base: Vec<Elem>,
    pub formula: Formula,
}

impl TypeDesc {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn sorts(&self) -> Vec<Sort> {
        self.vars.iter().map(|v| v.sort).collect()
    }

    pub fn base_set(&self) -> BTreeSet<Elem> {
        self.base.iter().cloned().collect()
    }

    pub fn is_realized_by(&self, a: &[Elem]) -> bool {
        a.len() == self.vars.len()
            && a.iter().zip(&self.vars).all(|(e, v)| e.sort() == v.sort)
            && satisfies(self.theory, &self.formula, &self.vars, a).unwrap_or(false)
    }

    pub fn is_algebraic(&self) -> bool {
        matches!(
            solution_count(self.theory, &self.formula, &self.vars),
            Ok(SolutionCount::Finite(..))
        )
    }

    /// The same type with its variables renamed.
    pub fn with_vars(&self, vars: &[Var]) -> TypeDesc {
        let pairs: Vec<(Var, Var)> = self.vars.iter().cloned().zip(vars.iter().cloned()).collect();
        TypeDesc {
            theory: self.theory,
            vars: vars.to_vec(),
            base: self.base.clone(),
            formula: self.formula.rename(&pairs),
        }
    }
}

impl fmt::Display for TypeDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tp over {{{}}}: {}", render_elems(&self.base), self.formula)
    }
}

/// Number of solutions of a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionCount {
    Finite(usize, Vec<Vec<Elem>>),
    Infinite,
}

impl SolutionCount {
    pub fn is_infinite(&self) -> bool {
        matches!(self, SolutionCount::Infinite)
    }
}

/// Isolating formula of `tp(a/base)` in the variables `x` or `x1..xn`.
pub fn type_of(theory: Theory, a: &[Elem], base: &[Elem]) -> TypeDesc {
    let vars = tuple_vars("x", &sorts_of(a));
    type_of_vars(theory, &vars, a, base)
}

/// Isolating formula of `tp(a/base)` in the given variables.
pub fn type_of_vars(theory: Theory, vars: &[Var], a: &[Elem], base: &[Elem]) -> TypeDesc {
    let base: Vec<Elem> = base.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut refs: Vec<(Term, Elem)> = base.iter().map(|e| (Term::Lit(e.clone()), e.clone())).collect();
    let mut parts = Vec::new();
    for (v, val) in vars.iter().zip(a) {
        parts.push(coordinate(theory, v, val, &refs));
        refs.push((Term::Var(v.clone()), val.clone()));
    }
    TypeDesc { theory, vars: vars.to_vec(), base, formula: Formula::and(parts) }
}

fn class_refs(refs: &[(Term, Elem)]) -> Vec<(Term, u64)> {
    let mut out: Vec<(Term, u64)> = Vec::new();
    for (t, e) in refs {
        let (term, c) = match e {
            Elem::Pair(c, _) => (Term::cl(t.clone()), *c),
            Elem::Class(c) => (t.clone(), *c),
            _ => continue,
        };
        if !out.iter().any(|(_, d)| *d == c) {
            out.push((term, c));
        }
    }
    out
}

fn coordinate(theory: Theory, x: &Var, val: &Elem, refs: &[(Term, Elem)]) -> Formula {
    let xt = Term::Var(x.clone());
    let mut same_sort: Vec<&(Term, Elem)> = Vec::new();
    for r in refs.iter().filter(|(_, e)| e.sort() == x.sort) {
        if !same_sort.iter().any(|(_, e)| *e == r.1) {
            same_sort.push(r);
        }
    }
    if let Some((t, _)) = same_sort.iter().find(|(_, e)| e == val) {
        return Formula::eq(xt, t.clone());
    }
    let trivial = Formula::eq(xt.clone(), xt.clone());
    let parts: Vec<Formula> = match (theory, x.sort) {
        (Theory::Dlo, _) => {
            let q = val.as_rat().expect("rational coordinate");
            let lower = same_sort
                .iter()
                .filter(|(_, e)| e.as_rat().is_some_and(|r| r < q))
                .max_by(|a, b| a.1.as_rat().cmp(&b.1.as_rat()));
            let upper = same_sort
                .iter()
                .filter(|(_, e)| e.as_rat().is_some_and(|r| r > q))
                .min_by(|a, b| a.1.as_rat().cmp(&b.1.as_rat()));
            let mut v = Vec::new();
            if let Some((t, _)) = lower {
                v.push(Formula::lt(t.clone(), xt.clone()));
            }
            if let Some((t, _)) = upper {
                v.push(Formula::lt(xt.clone(), t.clone()));
            }
            v
        }
        (Theory::Erel, Sort::Element) => {
            let classes = class_refs(refs);
            let c = val.class_of().expect("element of a class");
            match classes.iter().find(|(_, d)| *d == c) {
                Some((k, _)) => {
                    let mut v = vec![Formula::eq(Term::cl(xt.clone()), k.clone())];
                    for (t, e) in &same_sort {
                        if e.class_of() == Some(c) {
                            v.push(Formula::neq(xt.clone(), t.clone()));
                        }
                    }
                    v
                }
                None => classes
                    .iter()
                    .map(|(k, _)| Formula::neq(Term::cl(xt.clone()), k.clone()))
                    .collect(),
            }
        }
        (Theory::Erel, Sort::Class) => {
            let classes = class_refs(refs);
            let c = val.class_of().expect("class");
            match classes.iter().find(|(_, d)| *d == c) {
                Some((k, _)) => vec![Formula::eq(xt.clone(), k.clone())],
                None => classes.iter().map(|(k, _)| Formula::neq(xt.clone(), k.clone())).collect(),
            }
        }
        _ => same_sort.iter().map(|(t, _)| Formula::neq(xt.clone(), t.clone())).collect(),
    };
    if parts.is_empty() {
        trivial
    } else {
        Formula::and(parts)
    }
}

/// All complete types of `vars` over `base`, one per orbit, in enumeration order.
pub fn enumerate_types(theory: Theory, vars: &[Var], base: &[Elem]) -> Vec<TypeDesc> {
    let named: BTreeSet<Elem> = base.iter().cloned().collect();
    let sorts: Vec<Sort> = vars.iter().map(|v| v.sort).collect();
    theory
        .tuple_reps(&sorts, &named)
        .into_iter()
        .map(|a| type_of_vars(theory, vars, &a, base))
        .collect()
}

fn check_vars(f: &Formula, vars: &[Var]) -> Result<()> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::Invalid(format!(
            "free variable {} is not among the designated variables",
            v.annotated()
        )));
    }
    Ok(())
}

/// Exact count of the tuples `vars` satisfying `f`.
pub fn solution_count(theory: Theory, f: &Formula, vars: &[Var]) -> Result<SolutionCount> {
    check_vars(f, vars)?;
    let g = if f.is_quantifier_free() { f.clone() } else { qe(theory, f)? };
    let lits = g.literals();
    let sorts: Vec<Sort> = vars.iter().map(|v| v.sort).collect();
    // a solution with a coordinate outside acl(lits) has infinitely many
    // conjugates, so those orbits are tried first
    let (open, closed): (Vec<Vec<Elem>>, Vec<Vec<Elem>>) =
        theory.tuple_reps(&sorts, &lits).into_iter().partition(|r| r.iter().any(|e| !theory.in_acl(e, &lits)));
    for rep in &open {
        if satisfies_checked(theory, &g, vars, rep)? {
            return Ok(SolutionCount::Infinite);
        }
    }
    let mut found = Vec::new();
    for rep in closed {
        if satisfies_checked(theory, &g, vars, &rep)? {
            found.push(rep);
        }
    }
    Ok(SolutionCount::Finite(found.len(), found))
}

/// Whether `tp(a/base)` has finitely many realizations.
pub fn is_algebraic(theory: Theory, a: &[Elem], base: &[Elem]) -> bool {
    type_of(theory, a, base).is_algebraic()
}

/// A realization of `t` that uses no element of `avoid` outside the base.
///
/// Coordinates are chosen left to right among orbit representatives, new
/// elements first, so the result follows the least-fresh rules: least unused
/// natural, midpoint of the leftmost admissible gap, least fresh class.
pub fn realize_type(t: &TypeDesc, avoid: &[Elem]) -> Result<Vec<Elem>> {
    check_vars(&t.formula, &t.vars)?;
    let parts: Vec<Formula> = match &t.formula {
        Formula::And(ps) => ps.clone(),
        f => vec![f.clone()],
    };
    let mut staged: Vec<Vec<Formula>> = vec![Vec::new(); t.vars.len().max(1)];
    for p in parts {
        let idx = p
            .free_vars()
            .iter()
            .filter_map(|v| t.vars.iter().position(|w| w == v))
            .max()
            .unwrap_or(0);
        staged[idx].push(p);
    }
    let base = t.base_set();
    let forbidden: BTreeSet<Elem> = avoid.iter().filter(|e| !base.contains(*e)).cloned().collect();
    let mut named = base.clone();
    named.extend(avoid.iter().cloned());
    named.extend(t.formula.literals());
    let mut cur = Vec::new();
    if search(t, &staged, &forbidden, &mut named, &mut cur)? {
        return Ok(cur);
    }
    if forbidden.is_empty() || !search(t, &staged, &BTreeSet::new(), &mut named, &mut Vec::new())? {
        return Err(Error::Inconsistent(t.formula.to_string()));
    }
    Err(Error::AlgebraicExhausted)
}

fn search(
    t: &TypeDesc,
    staged: &[Vec<Formula>],
    forbidden: &BTreeSet<Elem>,
    named: &mut BTreeSet<Elem>,
    cur: &mut Vec<Elem>,
) -> Result<bool> {
    let i = cur.len();
    if i == t.vars.len() {
        if i == 0 {
            for p in &staged[0] {
                if !satisfies(t.theory, p, &[], &[])? {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    for e in t.theory.generic_reps(t.vars[i].sort, named) {
        if forbidden.contains(&e) {
            continue;
        }
        cur.push(e.clone());
        let mut ok = true;
        for p in &staged[i] {
            if !satisfies(t.theory, p, &t.vars[..=i], cur)? {
                ok = false;
                break;
            }
        }
        if ok {
            let added = named.insert(e.clone());
            if search(t, staged, forbidden, named, cur)? {
                return Ok(true);
            }
            if added {
                named.remove(&e);
            }
        }
        cur.pop();
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elems(theory: Theory, s: &str) -> Vec<Elem> {
        theory.parse_elems(s).unwrap()
    }

    fn shown(ts: &[TypeDesc]) -> Vec<String> {
        ts.iter().map(|t| t.formula.to_string()).collect()
    }

    #[test]
    fn enumerate_examples() {
        let x = [Var::elem("x")];
        assert_eq!(
            shown(&enumerate_types(Theory::Eq, &x, &elems(Theory::Eq, "#0,#1"))),
            ["x = #0", "x = #1", "!(x = #0) & !(x = #1)"]
        );
        assert_eq!(
            shown(&enumerate_types(Theory::Dlo, &x, &elems(Theory::Dlo, "0,1"))),
            ["x < 0", "x = 0", "0 < x & x < 1", "x = 1", "1 < x"]
        );
        assert_eq!(
            shown(&enumerate_types(Theory::Erel, &x, &elems(Theory::Erel, "2.5"))),
            ["x = 2.5", "cl(x) = cl(2.5) & !(x = 2.5)", "!(cl(x) = cl(2.5))"]
        );
    }

    #[test]
    fn realize_examples() {
        let t = type_of(Theory::Eq, &elems(Theory::Eq, "#5"), &elems(Theory::Eq, "#0,#1"));
        assert_eq!(t.formula.to_string(), "!(x = #0) & !(x = #1)");
        assert_eq!(realize_type(&t, &elems(Theory::Eq, "#2")).unwrap(), elems(Theory::Eq, "#3"));

        let t = type_of(Theory::Dlo, &elems(Theory::Dlo, "1/3"), &elems(Theory::Dlo, "0,1"));
        assert_eq!(realize_type(&t, &elems(Theory::Dlo, "1/2")).unwrap(), elems(Theory::Dlo, "1/4"));

        let t = type_of(Theory::Erel, &elems(Theory::Erel, "3.0"), &elems(Theory::Erel, "2.5"));
        assert_eq!(t.formula.to_string(), "!(cl(x) = cl(2.5))");
        assert_eq!(realize_type(&t, &[]).unwrap(), elems(Theory::Erel, "0.0"));
        assert_eq!(realize_type(&t, &elems(Theory::Erel, "0.0")).unwrap(), elems(Theory::Erel, "1.0"));
    }

    #[test]
    fn algebraic_exhaustion() {
        let t = type_of(Theory::Erel, &[Elem::Class(2)], &elems(Theory::Erel, "2.5"));
        assert_eq!(realize_type(&t, &[]).unwrap(), vec![Elem::Class(2)]);
        assert_eq!(realize_type(&t, &[Elem::Class(2)]), Err(Error::AlgebraicExhausted));
        let bad = TypeDesc { formula: Formula::False, ..t };
        assert!(matches!(realize_type(&bad, &[]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn counting_examples() {
        let x = [Var::elem("x")];
        let f = Theory::Eq.parse("x = #3").unwrap();
        assert_eq!(
            solution_count(Theory::Eq, &f, &x).unwrap(),
            SolutionCount::Finite(1, vec![vec![Elem::Nat(3)]])
        );
        let f = Theory::Dlo.parse("0 < x & x < 1").unwrap();
        assert_eq!(solution_count(Theory::Dlo, &f, &x).unwrap(), SolutionCount::Infinite);
        let f = Theory::Dlo.parse("x = 0 | x = 1").unwrap();
        assert_eq!(
            solution_count(Theory::Dlo, &f, &x).unwrap(),
            SolutionCount::Finite(2, vec![vec![Elem::int(0)], vec![Elem::int(1)]])
        );
        let f = Theory::Erel.parse("exists y. y = 2.5 & cl(y) = c").unwrap();
        let c = [Var::class("c")];
        assert_eq!(
            solution_count(Theory::Erel, &f, &c).unwrap(),
            SolutionCount::Finite(1, vec![vec![Elem::Class(2)]])
        );
    }

    #[test]
    fn algebraicity_examples() {
        assert!(is_algebraic(Theory::Eq, &elems(Theory::Eq, "#0"), &elems(Theory::Eq, "#0")));
        assert!(!is_algebraic(Theory::Eq, &elems(Theory::Eq, "#5"), &elems(Theory::Eq, "#0")));
        assert!(!is_algebraic(Theory::Dlo, &elems(Theory::Dlo, "0,1"), &elems(Theory::Dlo, "0")));
        assert!(is_algebraic(Theory::Erel, &[Elem::Class(2)], &elems(Theory::Erel, "2.5")));
    }

    #[test]
    fn tuple_type_mentions_earlier_coordinates() {
        let t = type_of(Theory::Eq, &elems(Theory::Eq, "#0,#0"), &[]);
        assert_eq!(t.formula.to_string(), "x1 = x1 & x2 = x1");
        let t = type_of(Theory::Dlo, &elems(Theory::Dlo, "0,1"), &[]);
        assert_eq!(t.formula.to_string(), "x1 = x1 & x1 < x2");
    }
}
