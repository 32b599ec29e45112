//! Uþ-rank, the alternative Uþ*-rank, and Lascar's inequalities.
//!
//! Extensions are explored one element at a time: for a type `tp(a/A)`
//! every one-element extension `tp(a / A ∪ {e})` is reached, up to
//! conjugacy over `A`, by letting `e` run over the orbit representatives
//! over `A ∪ a` of every sort.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forking::{thorn_forks, Decision, ForkCert, SearchBudget};
use crate::formula::{render_elems, Elem, Formula, Term, Var};
use crate::theory::{realize_type, satisfies, solution_count, type_of, type_of_vars, SolutionCount, Theory, TypeDesc};

/// One link of a þ-forking chain: `tp(a / base ∪ {extension})` þ-forks
/// over `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub base: Vec<Elem>,
    pub extension: Elem,
    pub fork: ForkCert,
}

/// One step of a Uþ* chain: the extension by `extension`, the set
/// `B = base ∪ extra`, and the `k` for which unions of conjugates fork.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarLink {
    pub base: Vec<Elem>,
    pub extension: Elem,
    pub extra: Option<Elem>,
    pub k: usize,
}

/// A rank value with the chain realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UthValue {
    pub value: usize,
    /// A realization of the type.
    pub a: Vec<Elem>,
    pub base: Vec<Elem>,
    pub chain: Vec<ChainLink>,
    pub star_chain: Vec<StarLink>,
}

impl UthValue {
    pub fn fix_sorts(&mut self) {
        for link in &mut self.chain {
            link.fork.fix_sorts();
        }
    }

    /// Rechecks a Uþ chain: its length and every forking certificate.
    pub fn verify(&self, theory: Theory) -> Result<()> {
        if !self.star_chain.is_empty() {
            return self.verify_star(theory);
        }
        if self.chain.len() != self.value {
            return Err(Error::Certificate("chain length differs from the rank".into()));
        }
        let mut base = sorted(&self.base);
        for link in &self.chain {
            if link.base != base || link.fork.base != base {
                return Err(Error::Certificate("chain links are not nested".into()));
            }
            let mut next = base.clone();
            next.push(link.extension.clone());
            let next = sorted(&next);
            let t = type_of(theory, &self.a, &next);
            if link.fork.phi != t.formula || link.fork.x != t.vars {
                return Err(Error::Certificate(format!("link formula is not tp over {{{}}}", render_elems(&next))));
            }
            link.fork.verify()?;
            base = next;
        }
        Ok(())
    }

    fn verify_star(&self, theory: Theory) -> Result<()> {
        if self.star_chain.len() != self.value {
            return Err(Error::Certificate("chain length differs from the rank".into()));
        }
        let budget = SearchBudget::default();
        let mut base = sorted(&self.base);
        for link in &self.star_chain {
            if link.base != base {
                return Err(Error::Certificate("chain links are not nested".into()));
            }
            if !star_step_holds(theory, &self.a, &base, &link.extension, link.extra.as_ref(), link.k, &budget)? {
                return Err(Error::Certificate(format!("no {}-fold forking at {}", link.k, link.extension)));
            }
            base.push(link.extension.clone());
            base = sorted(&base);
        }
        Ok(())
    }
}

fn sorted(v: &[Elem]) -> Vec<Elem> {
    v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

fn memo() -> &'static Mutex<HashMap<String, Vec<ChainLink>>> {
    static MEMO: OnceLock<Mutex<HashMap<String, Vec<ChainLink>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn star_memo() -> &'static Mutex<HashMap<String, Vec<StarLink>>> {
    static MEMO: OnceLock<Mutex<HashMap<String, Vec<StarLink>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn memo_key(theory: Theory, a: &[Elem], base: &[Elem], limit: usize, budget: &SearchBudget) -> String {
    // chains name the realization, so it is part of the key
    format!("{theory}|{}|{}|{limit}|{budget:?}", render_elems(a), render_elems(base))
}

/// Candidate extensions of `base` for a type realized by `a`.
fn extensions(theory: Theory, a: &[Elem], base: &[Elem]) -> Vec<Elem> {
    let mut named: BTreeSet<Elem> = base.iter().cloned().collect();
    named.extend(a.iter().cloned());
    let base_set: BTreeSet<Elem> = base.iter().cloned().collect();
    theory.all_reps(&named).into_iter().filter(|e| !base_set.contains(e)).collect()
}

/// Longest þ-forking chain from `tp(a/base)`, cut at `limit` links.
fn chain(theory: Theory, a: &[Elem], base: &[Elem], limit: usize, budget: &SearchBudget) -> Result<Vec<ChainLink>> {
    if limit == 0 {
        return Ok(Vec::new());
    }
    let key = memo_key(theory, a, base, limit, budget);
    if let Some(hit) = memo().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let mut best: Vec<ChainLink> = Vec::new();
    let mut undecided = None;
    for e in extensions(theory, a, base) {
        let mut next = base.to_vec();
        next.push(e.clone());
        let next = sorted(&next);
        let t = type_of(theory, a, &next);
        let fork = match thorn_forks(theory, &t.formula, &t.vars, base, budget)? {
            Decision::Yes(cert) => cert,
            Decision::No => continue,
            Decision::Unknown(why) => {
                undecided = Some(why);
                continue;
            }
        };
        let rest = chain(theory, a, &next, limit - 1, budget)?;
        if rest.len() + 1 > best.len() {
            best = std::iter::once(ChainLink { base: base.to_vec(), extension: e, fork }).chain(rest).collect();
            if best.len() == limit {
                break;
            }
        }
    }
    if best.len() < limit {
        if let Some(why) = undecided {
            return Err(Error::Undecided(why));
        }
    }
    memo().lock().unwrap().insert(key, best.clone());
    Ok(best)
}

fn check_type(t: &TypeDesc) -> Result<Vec<Elem>> {
    match solution_count(t.theory, &t.formula, &t.vars)? {
        SolutionCount::Finite(0, _) => Err(Error::Inconsistent(t.formula.to_string())),
        _ => realize_type(t, &[]),
    }
}

/// Uþ-rank of a complete type, with a chain of þ-forking extensions of
/// that length. `cap` defaults to [`default_cap`].
pub fn uth_rank(t: &TypeDesc, cap: Option<usize>, budget: &SearchBudget) -> Result<UthValue> {
    let a = check_type(t)?;
    uth_rank_of(t.theory, &a, &t.base, cap, budget)
}

/// One more than the largest rank a tuple like `a` can have: EREL
/// elements contribute up to two (class, then element), everything else
/// up to one.
pub fn default_cap(a: &[Elem]) -> usize {
    a.iter().map(|e| if matches!(e, Elem::Pair(..)) { 2 } else { 1 }).sum::<usize>() + 1
}

/// Uþ-rank of `tp(a/base)`.
pub fn uth_rank_of(theory: Theory, a: &[Elem], base: &[Elem], cap: Option<usize>, budget: &SearchBudget) -> Result<UthValue> {
    budget.validate()?;
    for e in a.iter().chain(base) {
        theory.check_elem(e)?;
    }
    let cap = cap.unwrap_or_else(|| default_cap(a));
    let base = sorted(base);
    let links = chain(theory, a, &base, cap + 1, budget)?;
    if links.len() > cap {
        return Err(Error::CapReached { cap });
    }
    Ok(UthValue { value: links.len(), a: a.to_vec(), base, chain: links, star_chain: Vec::new() })
}

/// Replaces the literal `e` by the variable `w`.
fn abstract_elem(f: &Formula, e: &Elem, w: &Var) -> Formula {
    f.map_literals(&mut |lit| (lit == e).then(|| Term::var(w)))
}

/// Does the Uþ* successor condition hold for the extension by `e`, with
/// `B = base ∪ extra` and the given `k`?
fn star_step_holds(
    theory: Theory,
    a: &[Elem],
    base: &[Elem],
    e: &Elem,
    extra: Option<&Elem>,
    k: usize,
    budget: &SearchBudget,
) -> Result<bool> {
    let mut b = base.to_vec();
    b.extend(extra.cloned());
    let b = sorted(&b);
    let te = type_of(theory, std::slice::from_ref(e), &b);
    if te.is_algebraic() {
        return Ok(false);
    }
    let mut with_e = base.to_vec();
    with_e.push(e.clone());
    let with_e = sorted(&with_e);
    let q = type_of(theory, a, &with_e);
    let w = Var::new("w__", e.sort());
    let p = abstract_elem(&q.formula, e, &w);
    let mut named: BTreeSet<Elem> = b.iter().cloned().collect();
    named.insert(e.clone());
    let sorts = vec![e.sort(); k - 1];
    for others in theory.tuple_reps(&sorts, &named) {
        let distinct: BTreeSet<&Elem> = others.iter().chain(std::iter::once(e)).collect();
        if distinct.len() != k {
            continue;
        }
        let mut realizes = true;
        for o in &others {
            if !satisfies(theory, &te.formula, &te.vars, std::slice::from_ref(o))? {
                realizes = false;
                break;
            }
        }
        if !realizes {
            continue;
        }
        let union = Formula::and(
            std::iter::once(q.formula.clone()).chain(others.iter().map(|o| p.instantiate(&[w.clone()], &[o.clone()]))),
        );
        if solution_count(theory, &union, &q.vars)? == SolutionCount::Finite(0, vec![]) {
            continue;
        }
        match thorn_forks(theory, &union, &q.vars, &with_e, budget)? {
            Decision::Yes(_) => {}
            Decision::No => return Ok(false),
            Decision::Unknown(why) => return Err(Error::Undecided(why)),
        }
    }
    Ok(true)
}

fn star_chain(theory: Theory, a: &[Elem], base: &[Elem], limit: usize, budget: &SearchBudget) -> Result<Vec<StarLink>> {
    if limit == 0 {
        return Ok(Vec::new());
    }
    let key = memo_key(theory, a, base, limit, budget);
    if let Some(hit) = star_memo().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let mut best: Vec<StarLink> = Vec::new();
    'outer: for e in extensions(theory, a, base) {
        let mut named: BTreeSet<Elem> = base.iter().cloned().collect();
        named.insert(e.clone());
        let extras = std::iter::once(None).chain(
            theory.all_reps(&named).into_iter().filter(|c| !named.contains(c)).map(Some),
        );
        for extra in extras {
            for k in 2..=3 {
                if !star_step_holds(theory, a, base, &e, extra.as_ref(), k, budget)? {
                    continue;
                }
                let mut next = base.to_vec();
                next.push(e.clone());
                let rest = star_chain(theory, a, &sorted(&next), limit - 1, budget)?;
                if rest.len() + 1 > best.len() {
                    let link = StarLink { base: base.to_vec(), extension: e.clone(), extra: extra.clone(), k };
                    best = std::iter::once(link).chain(rest).collect();
                    if best.len() == limit {
                        break 'outer;
                    }
                }
                // a larger k or another B cannot lengthen the chain below e
                continue 'outer;
            }
        }
    }
    star_memo().lock().unwrap().insert(key, best.clone());
    Ok(best)
}

/// Uþ*-rank of a complete type, with the chain of extensions realizing it.
pub fn uth_star_rank(t: &TypeDesc, cap: Option<usize>, budget: &SearchBudget) -> Result<UthValue> {
    let a = check_type(t)?;
    uth_star_rank_of(t.theory, &a, &t.base, cap, budget)
}

/// Uþ*-rank of `tp(a/base)`.
pub fn uth_star_rank_of(
    theory: Theory,
    a: &[Elem],
    base: &[Elem],
    cap: Option<usize>,
    budget: &SearchBudget,
) -> Result<UthValue> {
    budget.validate()?;
    for e in a.iter().chain(base) {
        theory.check_elem(e)?;
    }
    let cap = cap.unwrap_or_else(|| default_cap(a));
    let base = sorted(base);
    let links = star_chain(theory, a, &base, cap + 1, budget)?;
    if links.len() > cap {
        return Err(Error::CapReached { cap });
    }
    Ok(UthValue { value: links.len(), a: a.to_vec(), base, chain: Vec::new(), star_chain: links })
}

/// The three sides of Lascar's inequalities for `a`, `b` over `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LascarReport {
    /// `Uþ(a / base ∪ b)`
    pub a_over_b: usize,
    /// `Uþ(b / base)`
    pub b_over_base: usize,
    /// `Uþ(a ⌢ b / base)`
    pub ab_over_base: usize,
    pub lhs: usize,
    pub mid: usize,
    /// Natural sum of the two parts; ordinary addition at finite values.
    pub rhs: usize,
    pub holds: bool,
}

pub fn lascar_check(
    theory: Theory,
    a: &[Elem],
    b: &[Elem],
    base: &[Elem],
    budget: &SearchBudget,
) -> Result<LascarReport> {
    let mut over = base.to_vec();
    over.extend(b.iter().cloned());
    let a_over_b = uth_rank_of(theory, a, &over, None, budget)?.value;
    let b_over_base = uth_rank_of(theory, b, base, None, budget)?.value;
    let ab: Vec<Elem> = a.iter().chain(b).cloned().collect();
    let ab_over_base = uth_rank_of(theory, &ab, base, None, budget)?.value;
    let sum = a_over_b + b_over_base;
    Ok(LascarReport {
        a_over_b,
        b_over_base,
        ab_over_base,
        lhs: sum,
        mid: ab_over_base,
        rhs: sum,
        holds: sum <= ab_over_base && ab_over_base <= sum,
    })
}

/// Type of `a` over `base` in fresh variables; used by callers building
/// types from tuples.
pub fn type_for(theory: Theory, a: &[Elem], base: &[Elem]) -> TypeDesc {
    type_of_vars(theory, &crate::forking::object_vars(a), a, base)
}
