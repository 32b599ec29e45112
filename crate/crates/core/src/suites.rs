//! Named, seeded verification suites.
//!
//! Every suite draws `count` instances from a ChaCha stream keyed by the
//! seed and the instance index, cycles through the three theories, and
//! checks one or more properties per instance. Instances are independent,
//! so they can run on several threads; results are collected in instance
//! order.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forking::{
    indiscernible, is_morley, morley_witness, no_consistent_morley_sequence, thorn_forks, thorn_indep,
    Decision, Independence, SearchBudget,
};
use crate::formula::{render_elems, tuple_vars, Elem, Formula, Sort, Term, Var};
use crate::oracles::{oracle_dim, oracle_indep, oracle_uth};
use crate::rank::{lascar_check, local_rank, uth_rank, uth_rank_of, uth_star_rank, RankParams, RankValue};
use crate::theory::{fold_ground, qe, satisfies, solution_count, type_of, SolutionCount, Theory};

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "symmetry",
    "transitivity",
    "extension",
    "axioms",
    "rank-laws",
    "rank-characterization",
    "morley",
    "lascar",
    "uth-star",
    "oracle-agreement",
    "qe-fuzz",
];

/// Pass/fail counts of one property.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub unknown: usize,
    /// Instances where the property's premise did not apply.
    pub vacuous: usize,
}

/// Outcome of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    /// Instances whose checks all passed.
    pub passed: usize,
    pub failed: usize,
    pub unknown: usize,
    pub properties: BTreeMap<String, Tally>,
    pub first_failure: Option<Value>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.unknown == 0
    }
}

#[derive(Clone, Debug)]
enum Verdict {
    Pass,
    Fail(Value),
    Unknown(Value),
    Vacuous,
}

type Checks = Vec<(&'static str, Verdict)>;

fn check(ok: bool, detail: impl FnOnce() -> Value) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(detail())
    }
}

/// Runs a suite.
pub fn run_suite(name: &str, seed: u64, count: usize, budget: &SearchBudget, jobs: usize) -> Result<SuiteReport> {
    if !SUITES.contains(&name) {
        return Err(Error::Invalid(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", "))));
    }
    if count == 0 {
        return Err(Error::Invalid("count must be at least 1".into()));
    }
    budget.validate()?;
    let run_one = |i: usize| -> Checks {
        let mut g = Gen::new(seed, i);
        match instance(name, &mut g, budget) {
            Ok(checks) => checks,
            Err(e) => vec![("error", Verdict::Fail(json!({ "theory": g.theory, "error": e.to_string() })))],
        }
    };
    let results: Vec<Checks> = if jobs <= 1 {
        (0..count).map(run_one).collect()
    } else {
        let mut slots: Vec<Option<Checks>> = vec![None; count];
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let run_one = &run_one;
                    s.spawn(move || (j..count).step_by(jobs).map(|i| (i, run_one(i))).collect::<Vec<_>>())
                })
                .collect();
            for h in handles {
                for (i, c) in h.join().expect("suite worker panicked") {
                    slots[i] = Some(c);
                }
            }
        });
        slots.into_iter().map(|c| c.expect("every instance ran")).collect()
    };
    let mut report = SuiteReport {
        suite: name.to_string(),
        seed,
        count,
        passed: 0,
        failed: 0,
        unknown: 0,
        properties: BTreeMap::new(),
        first_failure: None,
    };
    for (i, checks) in results.into_iter().enumerate() {
        let mut failed = false;
        let mut unknown = false;
        for (prop, v) in checks {
            let t = report.properties.entry(prop.to_string()).or_default();
            match v {
                Verdict::Pass => t.passed += 1,
                Verdict::Vacuous => t.vacuous += 1,
                Verdict::Fail(detail) => {
                    t.failed += 1;
                    failed = true;
                    if report.first_failure.is_none() {
                        report.first_failure = Some(json!({ "instance": i, "property": prop, "detail": detail }));
                    }
                }
                Verdict::Unknown(detail) => {
                    t.unknown += 1;
                    unknown = true;
                    if report.first_failure.is_none() {
                        report.first_failure = Some(json!({ "instance": i, "property": prop, "unknown": detail }));
                    }
                }
            }
        }
        if failed {
            report.failed += 1;
        } else if unknown {
            report.unknown += 1;
        } else {
            report.passed += 1;
        }
    }
    Ok(report)
}

fn instance(name: &str, g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    match name {
        "symmetry" => symmetry(g, budget),
        "transitivity" => Ok(vec![("transitivity", transitivity(g, budget)?)]),
        "extension" => extension(g, budget),
        "axioms" => axioms(g, budget),
        "rank-laws" => rank_laws(g),
        "rank-characterization" => rank_characterization(g, budget),
        "morley" => morley(g, budget),
        "lascar" => lascar(g, budget),
        "uth-star" => uth_star(g, budget),
        "oracle-agreement" => oracle_agreement(g, budget),
        "qe-fuzz" => qe_fuzz(g),
        _ => unreachable!("suite names are checked up front"),
    }
}

/// Instance generator: small literal pools make collisions, and so
/// dependence, common.
pub(crate) struct Gen {
    rng: ChaCha8Rng,
    theory: Theory,
    index: usize,
}

const DLO_POOL: [(i64, i64); 6] = [(0, 1), (1, 1), (2, 1), (3, 1), (1, 2), (3, 2)];

impl Gen {
    fn new(seed: u64, index: usize) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        Gen { rng, theory: Theory::ALL[index % 3], index }
    }

    fn element(&mut self) -> Elem {
        match self.theory {
            Theory::Eq => Elem::Nat(self.rng.gen_range(0..4)),
            Theory::Dlo => {
                let (p, q) = DLO_POOL[self.rng.gen_range(0..DLO_POOL.len())];
                Elem::rat(p, q)
            }
            Theory::Erel => Elem::Pair(self.rng.gen_range(0..3), self.rng.gen_range(0..3)),
        }
    }

    /// An element, or in EREL sometimes a class.
    fn elem(&mut self) -> Elem {
        if self.theory == Theory::Erel && self.rng.gen_ratio(1, 6) {
            Elem::Class(self.rng.gen_range(0..3))
        } else {
            self.element()
        }
    }

    fn tuple(&mut self, lo: usize, hi: usize) -> Vec<Elem> {
        let n = self.rng.gen_range(lo..=hi);
        (0..n).map(|_| self.elem()).collect()
    }

    fn set(&mut self, max: usize) -> Vec<Elem> {
        let n = self.rng.gen_range(0..=max);
        let s: BTreeSet<Elem> = (0..n).map(|_| self.elem()).collect();
        s.into_iter().collect()
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(&mut self.rng).expect("non-empty").clone()
    }

    /// A term of the given sort over `vars` and the literal pool.
    fn term(&mut self, sort: Sort, vars: &[Var]) -> Term {
        let of_sort: Vec<&Var> = vars.iter().filter(|v| v.sort == sort).collect();
        let elems: Vec<&Var> = vars.iter().filter(|v| v.sort == Sort::Element).collect();
        match sort {
            Sort::Element => {
                if !of_sort.is_empty() && self.rng.gen_ratio(2, 3) {
                    Term::var(self.pick(&of_sort))
                } else {
                    Term::Lit(self.element())
                }
            }
            Sort::Class => match self.rng.gen_range(0..3) {
                0 if !of_sort.is_empty() => Term::var(self.pick(&of_sort)),
                1 if !elems.is_empty() => Term::cl(Term::var(self.pick(&elems))),
                _ => Term::Lit(Elem::Class(self.rng.gen_range(0..3))),
            },
        }
    }

    fn atom(&mut self, vars: &[Var]) -> Formula {
        let sort = if self.theory == Theory::Erel && self.rng.gen_ratio(1, 3) { Sort::Class } else { Sort::Element };
        let s = self.term(sort, vars);
        let t = self.term(sort, vars);
        match (self.theory, sort, self.rng.gen_range(0..2)) {
            (Theory::Dlo, _, 1) => Formula::lt(s, t),
            (Theory::Erel, Sort::Element, 1) => Formula::same(s, t),
            _ => Formula::eq(s, t),
        }
    }

    fn literal(&mut self, vars: &[Var]) -> Formula {
        let a = self.atom(vars);
        if self.rng.gen_ratio(1, 3) {
            Formula::not(a)
        } else {
            a
        }
    }

    /// A quantifier-free formula with up to `max` literals.
    fn qf(&mut self, vars: &[Var], max: usize) -> Formula {
        let n = self.rng.gen_range(1..=max);
        let lits: Vec<Formula> = (0..n).map(|_| self.literal(vars)).collect();
        if self.rng.gen_bool(0.5) {
            Formula::and(lits)
        } else {
            Formula::or(lits)
        }
    }

    /// A formula with at most `depth` nested quantifiers.
    fn quantified(&mut self, vars: &mut Vec<Var>, depth: usize, size: usize) -> Formula {
        if size <= 1 {
            return self.literal(vars);
        }
        match self.rng.gen_range(0..4) {
            0 | 1 if depth > 0 => {
                let sort = if self.theory == Theory::Erel && self.rng.gen_ratio(1, 3) { Sort::Class } else { Sort::Element };
                let v = Var::new(&format!("q{}", vars.len()), sort);
                vars.push(v.clone());
                let body = self.quantified(vars, depth - 1, size - 1);
                vars.pop();
                if self.rng.gen_bool(0.5) {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
            2 => Formula::not(self.quantified(vars, depth, size - 1)),
            _ => {
                let left = size / 2;
                let l = self.quantified(vars, depth, left.max(1));
                let r = self.quantified(vars, depth, (size - left).max(1));
                match self.rng.gen_range(0..3) {
                    0 => Formula::and([l, r]),
                    1 => Formula::or([l, r]),
                    _ => Formula::implies(l, r),
                }
            }
        }
    }

    /// A formula tying `x` to the parameters: equality, a class, or a
    /// disjunction of such.
    fn pinning(&mut self, x: &Var, params: &[Var]) -> Formula {
        let pins: Vec<Formula> = params
            .iter()
            .map(|p| {
                if p.sort == Sort::Class {
                    Formula::eq(Term::cl(Term::var(x)), Term::var(p))
                } else if self.theory == Theory::Erel && self.rng.gen_bool(0.5) {
                    Formula::same(Term::var(x), Term::var(p))
                } else {
                    Formula::eq(Term::var(x), Term::var(p))
                }
            })
            .collect();
        match pins.len() {
            0 => self.qf(&[x.clone()], 2),
            2.. if self.rng.gen_bool(0.5) => Formula::or(pins),
            _ => self.pick(&pins),
        }
    }

    fn k(&mut self) -> usize {
        self.rng.gen_range(2..=3)
    }
}

fn show(v: &[Elem]) -> String {
    render_elems(v)
}

fn indep(theory: Theory, a: &[Elem], b: &[Elem], base: &[Elem], budget: &SearchBudget) -> Result<Option<bool>> {
    Ok(thorn_indep(theory, a, b, base, budget)?.decided())
}

fn joined(a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter().chain(b).cloned().collect()
}

fn symmetry(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 2), g.set(2));
    let ab = indep(t, &a, &b, &base, budget)?;
    let ba = indep(t, &b, &a, &base, budget)?;
    let oracle = oracle_indep(t, &a, &b, &base);
    let detail = || json!({ "theory": t, "a": show(&a), "b": show(&b), "base": show(&base), "ab": ab, "ba": ba, "oracle": oracle });
    let (Some(ab), Some(ba)) = (ab, ba) else {
        return Ok(vec![("symmetry", Verdict::Unknown(detail()))]);
    };
    Ok(vec![("symmetry", check(ab == ba, detail)), ("oracle", check(ab == oracle, detail))])
}

fn transitivity(g: &mut Gen, budget: &SearchBudget) -> Result<Verdict> {
    let t = g.theory;
    let b = g.tuple(1, 2);
    let small = g.set(1);
    let mut mid = small.clone();
    mid.extend(g.set(1));
    let mut big = mid.clone();
    big.extend(g.set(2));
    let (mid, big) = (dedup(&mid), dedup(&big));
    let whole = indep(t, &b, &big, &small, budget)?;
    let first = indep(t, &b, &mid, &small, budget)?;
    let second = indep(t, &b, &big, &mid, budget)?;
    let detail = || json!({ "theory": t, "b": show(&b), "A": show(&small), "B": show(&mid), "C": show(&big) });
    Ok(match (whole, first, second) {
        (Some(w), Some(f), Some(s)) => check(w == (f && s), detail),
        _ => Verdict::Unknown(detail()),
    })
}

fn dedup(v: &[Elem]) -> Vec<Elem> {
    v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Non-forking extension of a complete type to a larger base.
fn extension_axiom(g: &mut Gen, budget: &SearchBudget) -> Result<Verdict> {
    let t = g.theory;
    let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 2), g.set(2));
    let p = type_of(t, &a, &base);
    let mut named: BTreeSet<Elem> = base.iter().cloned().collect();
    named.extend(b.iter().cloned());
    for r in t.tuple_reps(&p.sorts(), &named) {
        if p.is_realized_by(&r) && thorn_indep(t, &r, &b, &base, budget)?.is_independent() {
            return Ok(Verdict::Pass);
        }
    }
    Ok(Verdict::Fail(json!({ "theory": t, "a": show(&a), "b": show(&b), "base": show(&base) })))
}

/// Local rank of a formula is attained by one of its completions.
fn rank_extension(g: &mut Gen) -> Result<Verdict> {
    let t = g.theory;
    let x = vec![Var::elem("x")];
    let phi = g.qf(&x, 2);
    let params = rank_params(g, &x)?;
    let whole = local_rank(t, &phi, &params, 4)?.value;
    if whole == RankValue::MinusInfinity {
        return Ok(Verdict::Vacuous);
    }
    let mut named = phi.literals();
    named.extend(params.delta.iter().chain(&params.pi).flat_map(Formula::literals));
    let base: Vec<Elem> = named.iter().cloned().collect();
    let mut best = RankValue::MinusInfinity;
    for r in t.tuple_reps(&[Sort::Element], &named) {
        if satisfies(t, &phi, &x, &r)? {
            let q = type_of(t, &r, &base);
            best = best.max(local_rank(t, &q.formula, &params, 4)?.value);
        }
    }
    Ok(check(best == whole, || json!({ "theory": t, "phi": phi.to_string(), "rank": whole, "best": best })))
}

fn extension(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    Ok(vec![("type extension", extension_axiom(g, budget)?), ("rank extension", rank_extension(g)?)])
}

/// The independence axioms, one per instance in rotation.
/// Draws instances of one axiom until its hypotheses hold, giving up as
/// vacuous after a few tries.
fn axioms(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let which = (g.index / 3) % 9;
    for _ in 0..12 {
        let checks = axiom(g, which, budget)?;
        if checks.iter().any(|(_, v)| !matches!(v, Verdict::Vacuous)) {
            return Ok(checks);
        }
    }
    Ok(vec![(AXIOMS[which], Verdict::Vacuous)])
}

fn axiom(g: &mut Gen, which: usize, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let unknown = |d: Value| Ok(vec![(AXIOMS[which], Verdict::Unknown(d))]);
    let v = match which {
        0 => {
            let (a, base) = (g.tuple(1, 2), g.set(3));
            let r = indep(t, &a, &[], &base, budget)?;
            check(r == Some(true), || json!({ "theory": t, "a": show(&a), "base": show(&base) }))
        }
        1 => extension_axiom(g, budget)?,
        2 => {
            let base = g.set(2);
            let mut b = g.tuple(1, 2);
            if !base.is_empty() && g.rng.gen_bool(0.5) {
                b[0] = g.pick(&base);
            }
            let r = indep(t, &b, &b, &base, budget)?;
            let named: BTreeSet<Elem> = base.iter().cloned().collect();
            let in_acl = b.iter().all(|e| t.in_acl(e, &named));
            let detail = || json!({ "theory": t, "b": show(&b), "base": show(&base) });
            match r {
                Some(r) => check(r == in_acl, detail),
                None => return unknown(detail()),
            }
        }
        3 => {
            let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 2), g.set(2));
            let mut over = base.clone();
            over.extend(b.iter().cloned());
            let p = type_of(t, &a, &over);
            let full = thorn_forks(t, &p.formula, &p.vars, &base, budget)?;
            if !full.is_no() {
                Verdict::Vacuous
            } else {
                let parts: Vec<Formula> = match &p.formula {
                    Formula::And(ps) => ps.clone(),
                    f => vec![f.clone()],
                };
                let keep: Vec<Formula> = parts.into_iter().filter(|_| g.rng.gen_bool(0.5)).collect();
                let q = Formula::and(keep);
                let r = thorn_forks(t, &q, &p.vars, &base, budget)?;
                check(r.is_no(), || json!({ "theory": t, "p": p.formula.to_string(), "q": q.to_string(), "base": show(&base) }))
            }
        }
        4 => {
            let (c, b, base) = (g.tuple(2, 3), g.tuple(1, 2), g.set(2));
            let whole = indep(t, &c, &b, &base, budget)?;
            let mut parts = Vec::new();
            for mask in 1..(1usize << c.len()) {
                let sub: Vec<Elem> = c.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone()).collect();
                parts.push(indep(t, &sub, &b, &base, budget)?);
            }
            let detail = || json!({ "theory": t, "c": show(&c), "b": show(&b), "base": show(&base) });
            match (whole, parts.iter().copied().collect::<Option<Vec<bool>>>()) {
                (Some(w), Some(ps)) => check(w == ps.iter().all(|p| *p), detail),
                _ => return unknown(detail()),
            }
        }
        5 => return symmetry(g, budget).map(|cs| cs.into_iter().map(|(p, v)| (if p == "symmetry" { AXIOMS[5] } else { p }, v)).collect()),
        6 => transitivity(g, budget)?,
        7 => {
            let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 2), g.set(2));
            let x = vec![Var::elem("x")];
            let mut terms: Vec<Var> = x.clone();
            let avars = object_vars_named("p", &a);
            terms.extend(avars.iter().cloned());
            let delta = if g.rng.gen_bool(0.5) { g.qf(&terms, 2) } else { g.pinning(&x[0], &avars) }.instantiate(&avars, &a);
            let named: BTreeSet<Elem> = base.iter().cloned().collect();
            let params: Vec<Elem> = delta.literals().into_iter().filter(|e| !named.contains(e)).collect();
            if params.is_empty() || indep(t, &params, &b, &base, budget)? != Some(true) {
                Verdict::Vacuous
            } else if !consistent(t, &delta, &x)? || !thorn_forks(t, &delta, &x, &base, budget)?.is_yes() {
                Verdict::Vacuous
            } else {
                let over = joined(&base, &b);
                let r = thorn_forks(t, &delta, &x, &over, budget)?;
                check(r.is_yes(), || json!({ "theory": t, "delta": delta.to_string(), "a": show(&a), "b": show(&b), "base": show(&base) }))
            }
        }
        _ => {
            let (a, base) = (g.tuple(1, 2), g.set(1));
            let big = dedup(&joined(&base, &g.set(2)));
            let named: BTreeSet<Elem> = big.iter().cloned().collect();
            let closure: Vec<Elem> = t.acl(&named).into_iter().collect();
            let r = indep(t, &a, &big, &base, budget)?;
            if r != Some(true) {
                Verdict::Vacuous
            } else {
                let r = indep(t, &a, &closure, &base, budget)?;
                check(r == Some(true), || json!({ "theory": t, "a": show(&a), "B": show(&big), "base": show(&base) }))
            }
        }
    };
    Ok(vec![(AXIOMS[which], v)])
}

const AXIOMS: [&str; 9] = [
    "existence",
    "extension",
    "reflexivity",
    "monotonicity",
    "finite character",
    "symmetry",
    "transitivity",
    "forking persists",
    "algebraic closure",
];

fn object_vars_named(stem: &str, a: &[Elem]) -> Vec<Var> {
    tuple_vars(stem, &a.iter().map(Elem::sort).collect::<Vec<_>>())
}

fn consistent(t: Theory, f: &Formula, x: &[Var]) -> Result<bool> {
    Ok(solution_count(t, f, x)? != SolutionCount::Finite(0, vec![]))
}

/// Atomic `δ(x; y)` for one object variable and one parameter variable.
fn atomic_deltas(t: Theory, x: &Var) -> Vec<(Formula, Var)> {
    let xt = Term::var(x);
    let ye = Var::elem("y");
    let yt = Term::var(&ye);
    let mut out = vec![(Formula::eq(xt.clone(), yt.clone()), ye.clone())];
    match (t, x.sort) {
        (Theory::Dlo, _) => {
            out.push((Formula::lt(xt.clone(), yt.clone()), ye.clone()));
            out.push((Formula::lt(yt, xt), ye));
        }
        (Theory::Erel, Sort::Element) => {
            let yc = Var::class("y");
            out.push((Formula::same(xt.clone(), yt), ye));
            out.push((Formula::eq(Term::cl(xt), Term::var(&yc)), yc));
        }
        (Theory::Erel, Sort::Class) => {
            let yc = Var::class("y");
            out[0] = (Formula::eq(xt, Term::var(&yc)), yc);
        }
        _ => {}
    }
    out
}

/// Atomic `π(y; z)` for one parameter variable.
fn atomic_pis(t: Theory, y: &Var) -> Vec<(Formula, Option<Var>)> {
    let yt = Term::var(y);
    let z = Var::new("z", y.sort);
    let zt = Term::var(&z);
    let mut out = vec![(Formula::eq(yt.clone(), yt.clone()), None)];
    match (t, y.sort) {
        (Theory::Dlo, _) => out.push((Formula::lt(zt, yt), Some(z))),
        (Theory::Erel, Sort::Element) => out.push((Formula::same(yt, zt), Some(z))),
        _ => out.push((Formula::not(Formula::eq(yt, zt)), Some(z))),
    }
    out
}

fn rank_params_from(x: &[Var], y: &Var, deltas: Vec<Formula>, pi: Formula, z: Option<Var>, k: usize) -> RankParams {
    RankParams { x: x.to_vec(), y: vec![y.clone()], z: z.into_iter().collect(), delta: deltas, pi: vec![pi], k }
}

fn rank_params(g: &mut Gen, x: &[Var]) -> Result<RankParams> {
    let t = g.theory;
    let xv = g.pick(x);
    let deltas = atomic_deltas(t, &xv);
    let (delta, y) = g.pick(&deltas);
    let pis = atomic_pis(t, &y);
    let (pi, z) = g.pick(&pis);
    let k = g.k();
    Ok(rank_params_from(x, &y, vec![delta], pi, z, k))
}

fn rank_laws(g: &mut Gen) -> Result<Checks> {
    let t = g.theory;
    let x = vec![Var::elem("x")];
    let cap = 4;
    // nested Δ ⊆ Δ′ sharing one parameter variable, Π ⊆ Π′
    let all = atomic_deltas(t, &x[0]);
    let (d0, y) = g.pick(&all);
    let same_y: Vec<Formula> = all.iter().filter(|(_, v)| *v == y).map(|(d, _)| d.clone()).collect();
    let mut wide = vec![d0.clone()];
    wide.extend(same_y.into_iter().filter(|d| *d != d0 && g.rng.gen_bool(0.5)));
    let pis = atomic_pis(t, &y);
    let (p0, z0) = g.pick(&pis);
    let k = g.k();
    let narrow = rank_params_from(&x, &y, vec![d0.clone()], p0.clone(), z0.clone(), k);
    let mut broad = rank_params_from(&x, &y, wide, p0.clone(), z0.clone(), k);
    if z0.is_none() {
        let (p1, z1) = g.pick(&pis);
        if p1 != p0 {
            broad.pi.push(p1);
            broad.z = z1.into_iter().collect();
        }
    }
    let (f1, f2, f3) = (g.qf(&x, 2), g.qf(&x, 2), g.qf(&x, 2));
    let p = f1.clone();
    let q = Formula::and([f1.clone(), f2.clone()]);
    let r = Formula::and([f1.clone(), f2.clone(), f3.clone()]);
    let rk = |f: &Formula, ps: &RankParams| -> Result<RankValue> { Ok(local_rank(t, f, ps, cap)?.value) };
    let detail = |what: &str, vals: Value| {
        json!({ "theory": t, "law": what, "p": p.to_string(), "q": q.to_string(), "r": r.to_string(),
                "delta": narrow.delta[0].to_string(), "pi": narrow.pi[0].to_string(), "k": k, "values": vals })
    };
    let (rp, rq, rr) = (rk(&p, &narrow)?, rk(&q, &narrow)?, rk(&r, &narrow)?);
    let rq_broad = rk(&q, &broad)?;
    let mono = rq_broad >= rq && rp >= rq && rq >= rr;
    let trans = (rr == rp) == (rr == rq && rq == rp);
    let union = rk(&Formula::or([f2.clone(), f3.clone()]), &narrow)?;
    let parts = rk(&f2, &narrow)?.max(rk(&f3, &narrow)?);
    Ok(vec![
        ("monotonicity", check(mono, || detail("monotonicity", json!([rp, rq, rr, rq_broad])))),
        ("transitivity", check(trans, || detail("transitivity", json!([rp, rq, rr])))),
        ("additivity", check(union == parts, || detail("additivity", json!([union, parts])))),
    ])
}

fn rank_grid(t: Theory, x: &[Var]) -> Vec<RankParams> {
    let mut out = Vec::new();
    for xv in x {
        for (d, y) in atomic_deltas(t, xv) {
            for (p, z) in atomic_pis(t, &y) {
                for k in 2..=3 {
                    out.push(rank_params_from(x, &y, vec![d.clone()], p.clone(), z.clone(), k));
                }
            }
        }
    }
    out
}

fn rank_characterization(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 2), g.set(2));
    let Some(ind) = indep(t, &a, &b, &base, budget)? else {
        return Ok(vec![("characterization", Verdict::Unknown(json!({ "a": show(&a), "b": show(&b) })))]);
    };
    let small = type_of(t, &a, &base);
    let large = type_of(t, &a, &joined(&base, &b));
    let mut preserved = true;
    let mut dropped_at = Value::Null;
    for params in rank_grid(t, &small.vars) {
        let r0 = local_rank(t, &small.formula, &params, 4)?.value;
        let r1 = local_rank(t, &large.formula, &params, 4)?.value;
        if r0 != r1 {
            preserved = false;
            dropped_at = json!({ "delta": params.delta[0].to_string(), "pi": params.pi[0].to_string(), "k": params.k, "ranks": [r0, r1] });
            break;
        }
    }
    Ok(vec![(
        "characterization",
        check(ind == preserved, || {
            json!({ "theory": t, "a": show(&a), "b": show(&b), "base": show(&base), "independent": ind, "preserved": preserved, "drop": dropped_at })
        }),
    )])
}

fn morley(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let x = vec![Var::elem("x")];
    let base = g.set(1);
    let a = g.tuple(1, 2);
    let avars = object_vars_named("p", &a);
    let mut vars = x.clone();
    vars.extend(avars.iter().cloned());
    let mut psi = Formula::False;
    for _ in 0..20 {
        psi = if g.rng.gen_bool(0.75) { g.qf(&vars, 2) } else { g.pinning(&x[0], &avars) }.instantiate(&avars, &a);
        if fold_ground(&psi).free_vars().contains(&x[0]) && consistent(t, &psi, &x)? {
            break;
        }
    }
    if !consistent(t, &psi, &x)? {
        return Ok(vec![("morley", Verdict::Vacuous)]);
    }
    let detail = || json!({ "theory": t, "psi": psi.to_string(), "base": show(&base) });
    Ok(match thorn_forks(t, &psi, &x, &base, budget)? {
        Decision::No => match morley_witness(t, &psi, &x, &base, 5, budget)? {
            Some(w) => {
                let independent = is_morley(t, &w.sequence, &base, budget)? == Some(true);
                let indisc = indiscernible(t, &w.sequence, &base);
                let mut joint = true;
                for ai in &w.sequence {
                    joint &= satisfies(t, &w.delta.instantiate(&w.y, ai), &x, &w.b)?;
                }
                vec![("non-forking has sequence", check(independent && indisc && joint && w.sequence.len() == 5, detail))]
            }
            None => vec![("non-forking has sequence", Verdict::Fail(detail()))],
        },
        Decision::Yes(_) => {
            let none = no_consistent_morley_sequence(t, &psi, &x, &base, 5, budget)?;
            vec![("forking has none", check(none, detail))]
        }
        Decision::Unknown(_) => vec![("morley", Verdict::Unknown(detail()))],
    })
}

fn lascar(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let (a, b, base) = (g.tuple(1, 2), g.tuple(1, 1), g.set(1));
    let r = lascar_check(t, &a, &b, &base, budget)?;
    let mut checks = vec![(
        "inequalities",
        check(r.lhs <= r.mid && r.mid <= r.rhs, || json!({ "theory": t, "a": show(&a), "b": show(&b), "base": show(&base), "report": r })),
    )];
    if t == Theory::Dlo {
        checks.push(("equality", check(r.lhs == r.mid && r.mid == r.rhs, || json!({ "a": show(&a), "b": show(&b), "report": r }))));
    }
    Ok(checks)
}

fn corpus_type(g: &mut Gen) -> (Vec<Elem>, Vec<Elem>) {
    (g.tuple(1, 2), g.set(2))
}

fn uth_star(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    let (a, base) = corpus_type(g);
    let ty = type_of(t, &a, &base);
    let u = uth_rank(&ty, None, budget)?;
    let s = uth_star_rank(&ty, None, budget)?;
    u.verify(t)?;
    s.verify(t)?;
    Ok(vec![("uth = uth*", check(u.value == s.value, || json!({ "theory": t, "type": ty.to_string(), "uth": u.value, "uth_star": s.value })))])
}

fn oracle_agreement(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let t = g.theory;
    if t == Theory::Dlo {
        return dlo_dimension(g, budget);
    }
    let (a, base) = corpus_type(g);
    let b = g.tuple(1, 2);
    let ty = type_of(t, &a, &base);
    let u = uth_rank(&ty, None, budget)?;
    u.verify(t)?;
    let o = oracle_uth(&ty)?;
    let ind = thorn_indep(t, &a, &b, &base, budget)?;
    let oi = oracle_indep(t, &a, &b, &base);
    let detail = || json!({ "theory": t, "a": show(&a), "b": show(&b), "base": show(&base) });
    let indep_check = match ind {
        Independence::Unknown(_) => Verdict::Unknown(detail()),
        other => check(other.decided() == Some(oi), detail),
    };
    Ok(vec![
        ("uth = oracle", check(u.value == o, || json!({ "theory": t, "type": ty.to_string(), "uth": u.value, "oracle": o }))),
        ("indep = oracle", indep_check),
    ])
}

/// Uþ of a DLO definable set, as the largest Uþ of a complete type over
/// its parameters containing it, against the o-minimal dimension.
fn dlo_dimension(g: &mut Gen, budget: &SearchBudget) -> Result<Checks> {
    let n = g.rng.gen_range(1..=3);
    let x = tuple_vars("x", &vec![Sort::Element; n]);
    let mut f = g.qf(&x, 3);
    for _ in 0..12 {
        if consistent(Theory::Dlo, &f, &x)? {
            break;
        }
        f = g.qf(&x, 3);
    }
    if !consistent(Theory::Dlo, &f, &x)? {
        return Ok(vec![("uth = dim", Verdict::Vacuous)]);
    }
    let params = f.literals();
    let base: Vec<Elem> = params.iter().cloned().collect();
    // most independent coordinates first; no type of an n-tuple goes past n
    let mut reps = Theory::Dlo.tuple_reps(&vec![Sort::Element; n], &params);
    reps.sort_by_key(|r| std::cmp::Reverse(r.iter().filter(|e| !params.contains(e)).collect::<BTreeSet<_>>().len()));
    let mut best = 0;
    for r in reps {
        if best >= n {
            break;
        }
        if satisfies(Theory::Dlo, &f, &x, &r)? {
            best = best.max(uth_rank_of(Theory::Dlo, &r, &base, None, budget)?.value);
        }
    }
    let d = oracle_dim(&f, &x)?;
    Ok(vec![("uth = dim", check(best == d, || json!({ "formula": f.to_string(), "uth": best, "dim": d })))])
}

fn qe_fuzz(g: &mut Gen) -> Result<Checks> {
    let t = g.theory;
    let n = g.rng.gen_range(0..=3);
    let mut vars: Vec<Var> = (1..=n)
        .map(|i| {
            let sort = if t == Theory::Erel && g.rng.gen_ratio(1, 4) { Sort::Class } else { Sort::Element };
            Var::new(&format!("x{i}"), sort)
        })
        .collect();
    let free = vars.clone();
    let size = g.rng.gen_range(2..=6);
    let f = g.quantified(&mut vars, 3, size);
    let reduced = qe(t, &f)?;
    if !reduced.is_quantifier_free() {
        return Ok(vec![("qe", Verdict::Fail(json!({ "theory": t, "formula": f.to_string(), "qe": reduced.to_string() })))]);
    }
    for _ in 0..5 {
        let vals: Vec<Elem> = free
            .iter()
            .map(|v| if v.sort == Sort::Class { Elem::Class(g.rng.gen_range(0..3)) } else { g.element() })
            .collect();
        let l = satisfies(t, &f, &free, &vals)?;
        let r = satisfies(t, &reduced, &free, &vals)?;
        if l != r {
            return Ok(vec![(
                "qe",
                Verdict::Fail(json!({ "theory": t, "formula": f.to_string(), "qe": reduced.to_string(), "at": show(&vals) })),
            )]);
        }
    }
    Ok(vec![("qe", Verdict::Pass)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let mut a = Gen::new(7, 5);
        let mut b = Gen::new(7, 5);
        for _ in 0..20 {
            assert_eq!(a.elem(), b.elem());
        }
        let mut c = Gen::new(7, 6);
        let xs: Vec<Elem> = (0..20).map(|_| a.elem()).collect();
        let ys: Vec<Elem> = (0..20).map(|_| c.elem()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1, 1, &SearchBudget::default(), 1).is_err());
    }

    #[test]
    fn small_runs_pass() {
        let budget = SearchBudget::default();
        for name in ["symmetry", "qe-fuzz", "lascar"] {
            let r = run_suite(name, 3, 6, &budget, 1).unwrap();
            assert!(r.ok(), "{name}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn jobs_do_not_change_results() {
        let budget = SearchBudget::default();
        let one = run_suite("qe-fuzz", 11, 9, &budget, 1).unwrap();
        let many = run_suite("qe-fuzz", 11, 9, &budget, 3).unwrap();
        assert_eq!(one, many);
    }
}
