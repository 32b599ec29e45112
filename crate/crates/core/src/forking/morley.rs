//! Morley sequences and the consistency criterion for non-forking formulas.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{thorn_indep, SearchBudget};
use crate::definable::abstract_parameters;
use crate::error::Result;
use crate::formula::{Elem, Formula, Sort, Var};
use crate::theory::{fold_ground, realize_type, satisfies, solution_count, type_of, type_of_vars, SolutionCount, Theory, TypeDesc};

/// Same type over `base` for every member and for every increasing pair.
///
/// All relations in the shipped signatures are at most binary, so this
/// already pins down the type of every increasing subsequence.
pub fn indiscernible(theory: Theory, seq: &[Vec<Elem>], base: &[Elem]) -> bool {
    let single: BTreeSet<_> = seq.iter().map(|a| type_of(theory, a, base).formula).collect();
    if single.len() > 1 {
        return false;
    }
    let mut pairs = BTreeSet::new();
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let ab: Vec<Elem> = seq[i].iter().chain(&seq[j]).cloned().collect();
            pairs.insert(type_of(theory, &ab, base).formula);
            if pairs.len() > 1 {
                return false;
            }
        }
    }
    true
}

/// `Some(true)` when `seq` is indiscernible over `base` and every member is
/// þ-independent from the earlier ones; `None` when an independence check
/// ran out of budget.
pub fn is_morley(theory: Theory, seq: &[Vec<Elem>], base: &[Elem], budget: &SearchBudget) -> Result<Option<bool>> {
    if !indiscernible(theory, seq, base) {
        return Ok(Some(false));
    }
    let mut unknown = false;
    for i in 1..seq.len() {
        let earlier: Vec<Elem> = seq[..i].iter().flatten().cloned().collect();
        match thorn_indep(theory, &seq[i], &earlier, base, budget)?.decided() {
            Some(true) => {}
            Some(false) => return Ok(Some(false)),
            None => unknown = true,
        }
    }
    Ok(if unknown { None } else { Some(true) })
}

/// `length` realizations of `t`, each avoiding the elements of the earlier
/// ones, starting with `first` when given.
pub fn morley_sequence(t: &TypeDesc, length: usize, first: Option<&[Elem]>) -> Result<Vec<Vec<Elem>>> {
    let mut seq: Vec<Vec<Elem>> = first.into_iter().map(<[Elem]>::to_vec).collect();
    while seq.len() < length {
        let avoid: Vec<Elem> = seq.iter().flatten().cloned().collect();
        seq.push(realize_type(t, &avoid)?);
    }
    Ok(seq)
}

/// A common solution `b` of `δ(x, aᵢ)` along a Morley sequence starting at `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorleyWitness {
    pub delta: Formula,
    pub y: Vec<Var>,
    pub b: Vec<Elem>,
    pub sequence: Vec<Vec<Elem>>,
}

/// `ψ = δ(x, a)` with `a` the parameters outside `base` that survive
/// folding the variable-free atoms.
fn split(theory: Theory, psi: &Formula, base: &[Elem]) -> (Formula, Vec<Var>, Vec<Elem>) {
    let keep: BTreeSet<Elem> = base.iter().cloned().collect();
    abstract_parameters(theory, &fold_ground(psi), &keep)
}

fn solutions(theory: Theory, psi: &Formula, x: &[Var], named: &BTreeSet<Elem>) -> Result<Vec<Vec<Elem>>> {
    let sorts: Vec<Sort> = x.iter().map(|v| v.sort).collect();
    let mut out = Vec::new();
    for b in theory.tuple_reps(&sorts, named) {
        if satisfies(theory, psi, x, &b)? {
            out.push(b);
        }
    }
    Ok(out)
}

fn sequence_over(theory: Theory, y: &[Var], a: &[Elem], base: &[Elem], b: &[Elem], length: usize) -> Result<Vec<Vec<Elem>>> {
    let mut over = base.to_vec();
    over.extend(b.iter().cloned());
    let t = type_of_vars(theory, y, a, &over);
    morley_sequence(&t, length, Some(a))
}

fn jointly_satisfied(theory: Theory, delta: &Formula, x: &[Var], y: &[Var], seq: &[Vec<Elem>], b: &[Elem]) -> Result<bool> {
    for ai in seq {
        if !satisfies(theory, &delta.instantiate(y, ai), x, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For a formula `ψ(x) = δ(x, a)` that does not þ-fork over `base`: a
/// solution `b` þ-independent from `a`, and a Morley sequence `a = a₀, a₁, …`
/// of realizations of `tp(a / base ∪ b)`, so that `b` satisfies every
/// `δ(x, aᵢ)`. `None` when no candidate `b` works.
pub fn morley_witness(
    theory: Theory,
    psi: &Formula,
    x: &[Var],
    base: &[Elem],
    length: usize,
    budget: &SearchBudget,
) -> Result<Option<MorleyWitness>> {
    let (delta, y, a) = split(theory, psi, base);
    let mut named: BTreeSet<Elem> = base.iter().cloned().collect();
    named.extend(delta.literals());
    named.extend(a.iter().cloned());
    for b in solutions(theory, psi, x, &named)? {
        if !thorn_indep(theory, &b, &a, base, budget)?.is_independent() {
            continue;
        }
        let Ok(seq) = sequence_over(theory, &y, &a, base, &b, length) else { continue };
        if is_morley(theory, &seq, base, budget)? == Some(true) && jointly_satisfied(theory, &delta, x, &y, &seq, &b)? {
            return Ok(Some(MorleyWitness { delta, y, b, sequence: seq }));
        }
    }
    Ok(None)
}

/// For a formula `ψ(x) = δ(x, a)`: true when no Morley sequence starting at
/// `a` among the generated candidates has `⋀ δ(x, aᵢ)` consistent.
///
/// Candidates are the sequences over `base ∪ b` for every solution orbit
/// `b`, and a sequence of fresh realizations of `tp(a / base)`.
pub fn no_consistent_morley_sequence(
    theory: Theory,
    psi: &Formula,
    x: &[Var],
    base: &[Elem],
    length: usize,
    budget: &SearchBudget,
) -> Result<bool> {
    let (delta, y, a) = split(theory, psi, base);
    let mut named: BTreeSet<Elem> = base.iter().cloned().collect();
    named.extend(delta.literals());
    named.extend(a.iter().cloned());
    let mut candidates = Vec::new();
    for b in solutions(theory, psi, x, &named)? {
        if let Ok(seq) = sequence_over(theory, &y, &a, base, &b, length) {
            candidates.push(seq);
        }
    }
    if let Ok(seq) = sequence_over(theory, &y, &a, base, &[], length) {
        candidates.push(seq);
    }
    for seq in candidates {
        let joint = Formula::and(seq.iter().map(|ai| delta.instantiate(&y, ai)));
        let consistent = solution_count(theory, &joint, x)? != SolutionCount::Finite(0, vec![]);
        if consistent && is_morley(theory, &seq, base, budget)? == Some(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forking::thorn_forks;

    #[test]
    fn fresh_realizations_form_morley_sequences() {
        let budget = SearchBudget::default();
        let base = Theory::Dlo.parse_elems("0,1").unwrap();
        let t = type_of(Theory::Dlo, &Theory::Dlo.parse_elems("1/2").unwrap(), &base);
        let seq = morley_sequence(&t, 3, None).unwrap();
        assert_eq!(seq.len(), 3);
        assert!(indiscernible(Theory::Dlo, &seq, &base));
        assert_eq!(is_morley(Theory::Dlo, &seq, &base, &budget).unwrap(), Some(true));
    }

    #[test]
    fn constant_sequence_is_not_morley() {
        let budget = SearchBudget::default();
        let seq = vec![vec![Elem::int(0)]; 3];
        assert!(indiscernible(Theory::Dlo, &seq, &[]));
        assert_eq!(is_morley(Theory::Dlo, &seq, &[], &budget).unwrap(), Some(false));
    }

    #[test]
    fn both_directions_on_small_formulas() {
        let budget = SearchBudget::default();
        let x = vec![Var::elem("x")];
        let free = Theory::Dlo.parse("0 < x").unwrap();
        assert!(thorn_forks(Theory::Dlo, &free, &x, &[], &budget).unwrap().is_no());
        let w = morley_witness(Theory::Dlo, &free, &x, &[], 3, &budget).unwrap().unwrap();
        assert_eq!(w.sequence[0], vec![Elem::int(0)]);
        let forking = Theory::Dlo.parse("x = 0").unwrap();
        assert!(no_consistent_morley_sequence(Theory::Dlo, &forking, &x, &[], 3, &budget).unwrap());
        let forking = Theory::Erel.parse("E(x, 2.5)").unwrap();
        assert!(no_consistent_morley_sequence(Theory::Erel, &forking, &x, &[], 3, &budget).unwrap());
    }
}
