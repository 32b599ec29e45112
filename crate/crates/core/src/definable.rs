//! Definable families `{δ(x, a′)}_{a′ ⊨ π}` and the exact checks built on them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{fresh_name, tuple_vars, Elem, Formula, Sort, Term, Var};
use crate::theory::{solution_count, type_of_vars, SolutionCount, Theory};

/// `δ(x; y)` together with a formula `π(y)` bounding the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub theory: Theory,
    pub x: Vec<Var>,
    pub y: Vec<Var>,
    pub delta: Formula,
    pub pi: Formula,
}

/// Least `k` for which a family is `k`-inconsistent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinK {
    Found(usize),
    /// Some instance has infinitely many consistent partners: never k-inconsistent.
    Never,
    /// k-inconsistent, but only for k beyond the configured maximum.
    ExceedsKMax,
}

impl Family {
    pub fn new(theory: Theory, x: Vec<Var>, y: Vec<Var>, delta: Formula, pi: Formula) -> Result<Family> {
        let fam = Family { theory, x, y, delta, pi };
        fam.validate()?;
        Ok(fam)
    }

    /// Restores declared sorts after deserialization.
    pub fn fix_sorts(&mut self) {
        let hints: Vec<Var> = self.x.iter().chain(&self.y).cloned().collect();
        self.delta = self.delta.with_sorts(&hints);
        self.pi = self.pi.with_sorts(&self.y);
    }

    pub fn validate(&self) -> Result<()> {
        let xy: BTreeSet<&Var> = self.x.iter().chain(&self.y).collect();
        if self.x.iter().any(|v| self.y.contains(v)) {
            return Err(Error::Invalid("object and parameter variables overlap".into()));
        }
        if let Some(v) = self.delta.free_vars().iter().find(|v| !xy.contains(v)) {
            return Err(Error::Invalid(format!("delta has stray free variable {}", v.annotated())));
        }
        if let Some(v) = self.pi.free_vars().iter().find(|v| !self.y.contains(v)) {
            return Err(Error::Invalid(format!("pi has stray free variable {}", v.annotated())));
        }
        let count = solution_count(self.theory, &self.pi, &self.y)?;
        if count == SolutionCount::Finite(0, vec![]) {
            return Err(Error::Inconsistent(self.pi.to_string()));
        }
        Ok(())
    }

    /// The instance `δ(x, a)`.
    pub fn instance(&self, a: &[Elem]) -> Formula {
        self.delta.instantiate(&self.y, a)
    }

    /// Largest number of distinct parameters `a ⊨ π` whose instances share a
    /// common solution; `None` when that number is infinite. The family is
    /// `k`-inconsistent exactly when this is below `k`.
    ///
    /// Candidate common solutions `b` range over orbit representatives of
    /// `x` over the literals of `δ` and `π`; the count of `a` with
    /// `π(a) ∧ δ(b, a)` is the same throughout an orbit.
    pub fn max_joint(&self) -> Result<Option<usize>> {
        let mut lits = self.delta.literals();
        lits.extend(self.pi.literals());
        let sorts: Vec<Sort> = self.x.iter().map(|v| v.sort).collect();
        let mut reps = self.theory.tuple_reps(&sorts, &lits);
        // generic points are the likeliest to meet infinitely many instances
        reps.sort_by_key(|b| std::cmp::Reverse(b.iter().filter(|e| !self.theory.in_acl(e, &lits)).count()));
        let mut best = 0;
        for b in reps {
            let f = Formula::and([self.pi.clone(), self.delta.instantiate(&self.x, &b)]);
            match solution_count(self.theory, &f, &self.y)? {
                SolutionCount::Infinite => return Ok(None),
                SolutionCount::Finite(n, _) => best = best.max(n),
            }
        }
        Ok(Some(best))
    }

    pub fn min_k(&self, k_max: usize) -> Result<MinK> {
        Ok(match self.max_joint()? {
            None => MinK::Never,
            Some(m) if (m + 1).max(2) <= k_max => MinK::Found((m + 1).max(2)),
            Some(_) => MinK::ExceedsKMax,
        })
    }

    /// The closed sentence `∃y₁…y_k (distinct ∧ ⋀π(yᵢ) ∧ ∃x ⋀δ(x, yᵢ))`;
    /// the family is `k`-inconsistent exactly when it is false.
    pub fn k_inconsistency_sentence(&self, k: usize) -> Formula {
        let mut avoid: BTreeSet<Arc<str>> = self.delta.all_var_names();
        avoid.extend(self.pi.all_var_names());
        avoid.extend(self.x.iter().map(|v| v.name.clone()));
        let mut copies: Vec<Vec<Var>> = Vec::new();
        for i in 1..=k {
            let mut copy = Vec::new();
            for v in &self.y {
                let name = fresh_name(&format!("{}_{}_", v.name, i), &avoid);
                avoid.insert(Arc::from(name.as_str()));
                copy.push(Var::new(&name, v.sort));
            }
            copies.push(copy);
        }
        let rename = |f: &Formula, copy: &[Var]| {
            let binding: BTreeMap<Var, Term> =
                self.y.iter().cloned().zip(copy.iter().map(Term::var)).collect();
            f.subst_unchecked(&binding)
        };
        let mut parts = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                parts.push(Formula::or(
                    copies[i]
                        .iter()
                        .zip(&copies[j])
                        .map(|(u, v)| Formula::neq(Term::var(u), Term::var(v))),
                ));
            }
        }
        for copy in &copies {
            parts.push(rename(&self.pi, copy));
        }
        let joint = Formula::and(copies.iter().map(|c| rename(&self.delta, c)));
        parts.push(Formula::exists_all(&self.x, joint));
        let all: Vec<Var> = copies.into_iter().flatten().collect();
        Formula::exists_all(&all, Formula::and(parts))
    }
}

/// Whether every `k` pairwise-distinct parameters satisfying `π` give jointly
/// inconsistent instances.
pub fn k_inconsistent(fam: &Family, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    Ok(matches!(fam.max_joint()?, Some(m) if m < k))
}

/// The family `{δ(x, a′)}_{a′ ⊨ tp(a/base)}`.
pub fn family_of_conjugates(
    theory: Theory,
    delta: &Formula,
    x: &[Var],
    y: &[Var],
    a: &[Elem],
    base: &[Elem],
) -> Result<Family> {
    if y.len() != a.len() {
        return Err(Error::Invalid(format!("{} parameter variables but {} values", y.len(), a.len())));
    }
    let pi = type_of_vars(theory, y, a, base).formula;
    Family::new(theory, x.to_vec(), y.to_vec(), delta.clone(), pi)
}

/// Splits a formula with parameters into `δ(x; y)` and the parameter tuple.
///
/// Class-of-literal terms are folded first, so `cl(3.0)` becomes the class
/// parameter `@3`. Literals algebraic over `keep` stay in place.
pub fn abstract_parameters(theory: Theory, psi: &Formula, keep: &BTreeSet<Elem>) -> (Formula, Vec<Var>, Vec<Elem>) {
    let norm = psi.normalize_terms();
    let params: Vec<Elem> = norm
        .literals()
        .into_iter()
        .filter(|e| !theory.in_acl(e, keep))
        .collect();
    let avoid = norm.all_var_names();
    let mut names: BTreeSet<Arc<str>> = avoid.clone();
    let stem_vars = tuple_vars("y", &params.iter().map(Elem::sort).collect::<Vec<_>>());
    let mut y = Vec::new();
    for v in stem_vars {
        let name = if names.contains(&v.name) { fresh_name(&v.name, &names) } else { v.name.to_string() };
        names.insert(Arc::from(name.as_str()));
        y.push(Var::new(&name, v.sort));
    }
    let lookup: BTreeMap<Elem, Term> = params.iter().cloned().zip(y.iter().map(Term::var)).collect();
    let delta = norm.map_literals(&mut |e| lookup.get(e).cloned());
    (delta, y, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::holds;

    fn fam(theory: Theory, delta: &str, pi: &str, y: Var) -> Family {
        let x = Var::elem("x");
        let d = theory.parse_with(delta, &[x.clone(), y.clone()]).unwrap();
        let p = theory.parse_with(pi, &[y.clone()]).unwrap();
        Family::new(theory, vec![x], vec![y], d, p).unwrap()
    }

    #[test]
    fn documented_families() {
        let singletons = fam(Theory::Dlo, "x = y", "true", Var::elem("y"));
        assert!(k_inconsistent(&singletons, 2).unwrap());
        let rays = fam(Theory::Dlo, "y < x", "true", Var::elem("y"));
        for k in 1..=6 {
            assert!(!k_inconsistent(&rays, k).unwrap());
        }
        let classes = fam(Theory::Erel, "cl(x) = C", "true", Var::class("C"));
        assert!(k_inconsistent(&classes, 2).unwrap());
    }

    #[test]
    fn sentence_agrees_with_counting() {
        let cases = [
            fam(Theory::Dlo, "x = y", "true", Var::elem("y")),
            fam(Theory::Dlo, "y < x", "true", Var::elem("y")),
            fam(Theory::Eq, "!(x = y)", "y = y", Var::elem("y")),
            fam(Theory::Eq, "x = y", "y = #0 | y = #1", Var::elem("y")),
            fam(Theory::Erel, "cl(x) = C", "true", Var::class("C")),
            fam(Theory::Erel, "E(x, y)", "true", Var::elem("y")),
        ];
        for f in &cases {
            for k in 1..=3 {
                let by_count = k_inconsistent(f, k).unwrap();
                let by_sentence = !holds(f.theory, &f.k_inconsistency_sentence(k)).unwrap();
                assert_eq!(by_count, by_sentence, "{} k={k}", f.delta);
            }
        }
    }

    #[test]
    fn conjugate_families() {
        let x = [Var::elem("x")];
        let y = [Var::elem("y")];
        let d = Theory::Eq.parse("x = y").unwrap();
        let f = family_of_conjugates(Theory::Eq, &d, &x, &y, &[Elem::Nat(5)], &[]).unwrap();
        assert_eq!(f.pi.to_string(), "y = y");
        let d = Theory::Dlo.parse("x = y").unwrap();
        let f = family_of_conjugates(Theory::Dlo, &d, &x, &y, &[Elem::rat(1, 2)], &[Elem::int(0), Elem::int(1)])
            .unwrap();
        assert_eq!(f.pi.to_string(), "0 < y & y < 1");
        let d = Theory::Erel.parse("cl(x) = cl(y)").unwrap();
        let f = family_of_conjugates(Theory::Erel, &d, &x, &y, &[Elem::Pair(3, 0)], &[Elem::Pair(2, 5)]).unwrap();
        assert_eq!(f.pi.to_string(), "!(cl(y) = cl(2.5))");
    }

    #[test]
    fn algebraic_pi_is_vacuously_inconsistent() {
        let f = fam(Theory::Eq, "x = x", "y = #0", Var::elem("y"));
        assert!(k_inconsistent(&f, 2).unwrap());
        assert!(!k_inconsistent(&f, 1).unwrap());
    }

    #[test]
    fn abstraction_folds_classes() {
        let psi = Theory::Erel.parse("cl(x) = cl(3.0)").unwrap();
        let (d, y, a) = abstract_parameters(Theory::Erel, &psi, &BTreeSet::new());
        assert_eq!(d.to_string(), "cl(x) = y");
        assert_eq!(y, vec![Var::class("y")]);
        assert_eq!(a, vec![Elem::Class(3)]);
        let keep = BTreeSet::from([Elem::Pair(3, 1)]);
        let (_, y, _) = abstract_parameters(Theory::Erel, &psi, &keep);
        assert!(y.is_empty());
    }
}
