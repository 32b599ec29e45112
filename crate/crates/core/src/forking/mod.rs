//! Strong dividing, þ-dividing, þ-forking and þ-independence.
//!
//! The unbounded existential searches of the definitions (a witness tuple
//! `c`; a finite disjunction of dividing formulas) are run over finite,
//! deterministic pools. Positive answers carry certificates that are checked
//! again before they leave this module.

mod morley;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::definable::{abstract_parameters, family_of_conjugates, k_inconsistent, Family, MinK};
use crate::error::{Error, Result};
use crate::formula::{render_elems, tuple_vars, Elem, Formula, Sort, Term, Var};
use crate::theory::{holds, is_algebraic, satisfies, solution_count, type_of, type_of_vars, Theory};

pub use morley::{
    indiscernible, is_morley, morley_sequence, morley_witness, no_consistent_morley_sequence, MorleyWitness,
};

/// Bounds for the witness and disjunction searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Longest witness tuple `c` tried in þ-dividing.
    pub witness_len: usize,
    /// Most disjuncts tried in þ-forking.
    pub disjuncts: usize,
    /// Rounds of fresh-element generation for the witness pool.
    pub pool_depth: usize,
    /// Largest `k` tried for `k`-inconsistency.
    pub k_max: usize,
    /// Report exhausted searches as unknown instead of no.
    pub strict: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { witness_len: 2, disjuncts: 4, pool_depth: 1, k_max: 6, strict: false }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.witness_len == 0 || self.disjuncts == 0 || self.pool_depth == 0 || self.k_max < 2 {
            return Err(Error::Invalid("search budgets must be at least 1 (k_max at least 2)".into()));
        }
        Ok(())
    }

    fn key(&self) -> String {
        format!("{}/{}/{}/{}/{}", self.witness_len, self.disjuncts, self.pool_depth, self.k_max, self.strict)
    }
}

/// Verdict of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision<C> {
    Yes(C),
    No,
    /// The bounds were exhausted without a verdict; the payload says which.
    Unknown(String),
}

impl<C> Decision<C> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Decision::Unknown(_))
    }
}

/// Outcome of a strong-dividing check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrongDivision {
    Yes { k: usize },
    /// `tp(a/base)` is algebraic.
    Algebraic,
    /// The conjugate family is never `k`-inconsistent.
    Never,
    /// Only `k`-inconsistent beyond `k_max`.
    ExceedsKMax,
}

impl StrongDivision {
    /// `(divides, least k)`.
    pub fn as_pair(self) -> (bool, Option<usize>) {
        match self {
            StrongDivision::Yes { k } => (true, Some(k)),
            _ => (false, None),
        }
    }
}

/// Evidence that `δ(x, a)` strongly divides over `base ∪ witness`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivideCert {
    pub theory: Theory,
    pub base: Vec<Elem>,
    pub witness: Vec<Elem>,
    /// `δ(x; y)` with `π = tp(a / base ∪ witness)`.
    pub family: Family,
    pub a: Vec<Elem>,
    pub k: usize,
    /// Most parameters sharing a solution; below `k`.
    pub max_joint: usize,
    /// The parameter type has infinitely many realizations.
    pub non_algebraic: bool,
}

impl DivideCert {
    pub fn instance(&self) -> Formula {
        self.family.instance(&self.a)
    }

    pub fn fix_sorts(&mut self) {
        self.family.fix_sorts();
    }

    /// The closed sentence whose falsity is the `k`-inconsistency claim.
    pub fn k_sentence(&self) -> Formula {
        self.family.k_inconsistency_sentence(self.k)
    }

    /// Rechecks every claim from scratch.
    pub fn verify(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Certificate(format!("{m} for {}", self.instance())));
        let fam = &self.family;
        fam.validate()?;
        let mut over = self.base.clone();
        over.extend(self.witness.iter().cloned());
        let expected = type_of_vars(self.theory, &fam.y, &self.a, &over).formula;
        if expected != fam.pi {
            return bad("parameter formula is not the type of the parameters");
        }
        if !solution_count(self.theory, &fam.pi, &fam.y)?.is_infinite() || !self.non_algebraic {
            return bad("parameter type is algebraic");
        }
        if self.k < 2 || self.max_joint >= self.k || !k_inconsistent(fam, self.k)? {
            return bad("family is not k-inconsistent");
        }
        if fam.max_joint()? != Some(self.max_joint) {
            return bad("joint-consistency count does not match");
        }
        // the sentence form is cheap enough to evaluate for small families
        if fam.y.len() * self.k + fam.x.len() <= 4 && holds(self.theory, &self.k_sentence())? {
            return bad("k-inconsistency sentence holds");
        }
        Ok(())
    }
}

/// One disjunct of a þ-forking certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disjunct {
    pub psi: Formula,
    pub cert: DivideCert,
}

/// Evidence that `φ(x)` þ-forks over `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForkCert {
    pub theory: Theory,
    pub x: Vec<Var>,
    pub base: Vec<Elem>,
    pub phi: Formula,
    pub disjuncts: Vec<Disjunct>,
    /// `∀x (φ → ⋁ψᵢ)`, true in the canonical model.
    pub implication: Formula,
}

impl ForkCert {
    fn implication_for(x: &[Var], phi: &Formula, disjuncts: &[Disjunct]) -> Formula {
        Formula::forall_all(
            x,
            Formula::implies(phi.clone(), Formula::or(disjuncts.iter().map(|d| d.psi.clone()))),
        )
    }

    pub fn fix_sorts(&mut self) {
        self.phi = self.phi.with_sorts(&self.x);
        for d in &mut self.disjuncts {
            d.psi = d.psi.with_sorts(&self.x);
            d.cert.fix_sorts();
        }
        self.implication = Self::implication_for(&self.x, &self.phi, &self.disjuncts);
    }

    pub fn verify(&self) -> Result<()> {
        let expected = Self::implication_for(&self.x, &self.phi, &self.disjuncts);
        if expected != self.implication {
            return Err(Error::Certificate("implication does not match the disjuncts".into()));
        }
        if !holds(self.theory, &self.implication)? {
            return Err(Error::Certificate(format!("implication fails: {}", self.implication)));
        }
        for d in &self.disjuncts {
            if d.cert.base != self.base || d.cert.family.x != self.x {
                return Err(Error::Certificate("disjunct certificate is over another base".into()));
            }
            if d.cert.instance().normalize_terms() != d.psi.normalize_terms() {
                return Err(Error::Certificate(format!("certificate is not about {}", d.psi)));
            }
            d.cert.verify()?;
        }
        Ok(())
    }
}

/// þ-independence verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Independence {
    Independent,
    Dependent(Box<ForkCert>),
    Unknown(String),
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }

    pub fn is_dependent(&self) -> bool {
        matches!(self, Independence::Dependent(_))
    }

    /// `Some(true)` for independent, `Some(false)` for dependent.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Independence::Independent => Some(true),
            Independence::Dependent(_) => Some(false),
            Independence::Unknown(_) => None,
        }
    }
}

/// Does `δ(x, a)` strongly divide over `base`?
pub fn strongly_divides(
    theory: Theory,
    delta: &Formula,
    x: &[Var],
    y: &[Var],
    a: &[Elem],
    base: &[Elem],
    k_max: usize,
) -> Result<StrongDivision> {
    if is_algebraic(theory, a, base) {
        return Ok(StrongDivision::Algebraic);
    }
    let fam = family_of_conjugates(theory, delta, x, y, a, base)?;
    Ok(match fam.min_k(k_max)? {
        MinK::Found(k) => StrongDivision::Yes { k },
        MinK::Never => StrongDivision::Never,
        MinK::ExceedsKMax => StrongDivision::ExceedsKMax,
    })
}

fn divide_cert(
    theory: Theory,
    delta: &Formula,
    x: &[Var],
    y: &[Var],
    a: &[Elem],
    base: &[Elem],
    witness: &[Elem],
    k: usize,
) -> Result<DivideCert> {
    let mut over = base.to_vec();
    over.extend(witness.iter().cloned());
    let family = family_of_conjugates(theory, delta, x, y, a, &over)?;
    let max_joint = family.max_joint()?.ok_or_else(|| Error::Certificate("family is not k-inconsistent".into()))?;
    let cert = DivideCert {
        theory,
        base: base.to_vec(),
        witness: witness.to_vec(),
        family,
        a: a.to_vec(),
        k,
        max_joint,
        non_algebraic: true,
    };
    cert.verify()?;
    Ok(cert)
}

/// Certificate for a strong division found by [`strongly_divides`].
pub fn strong_division_cert(
    theory: Theory,
    delta: &Formula,
    x: &[Var],
    y: &[Var],
    a: &[Elem],
    base: &[Elem],
    k: usize,
) -> Result<DivideCert> {
    divide_cert(theory, delta, x, y, a, base, &[], k)
}

/// Instance elements and base, plus per round one new element of every
/// one-element orbit over what is there so far.
pub fn witness_pool(theory: Theory, seeds: &BTreeSet<Elem>, depth: usize) -> BTreeSet<Elem> {
    let mut pool = seeds.clone();
    for _ in 0..depth {
        let fresh: Vec<Elem> = theory.all_reps(&pool);
        pool.extend(fresh);
    }
    pool
}

/// Witness tuples: subsets of the pool outside the base, shortest first.
fn witness_sets(pool: &BTreeSet<Elem>, base: &BTreeSet<Elem>, max_len: usize) -> Vec<Vec<Elem>> {
    let items: Vec<Elem> = pool.iter().filter(|e| !base.contains(*e)).cloned().collect();
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<Elem>)> = vec![(0, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (start, set) in &frontier {
            for i in *start..items.len() {
                let mut s = set.clone();
                s.push(items[i].clone());
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        frontier = next;
    }
    out
}

fn divide_memo() -> &'static Mutex<HashMap<String, Decision<DivideCert>>> {
    static MEMO: OnceLock<Mutex<HashMap<String, Decision<DivideCert>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Does the formula `psi(x)` (parameters as literals) þ-divide over `base`?
///
/// For each witness tuple `c` from the pool the parameters of `psi` not
/// algebraic over `base ∪ c` are abstracted to variables and strong
/// dividing of the resulting family is decided exactly.
pub fn thorn_divides_formula(
    theory: Theory,
    psi: &Formula,
    x: &[Var],
    base: &[Elem],
    budget: &SearchBudget,
) -> Result<Decision<DivideCert>> {
    thorn_divides_impl(theory, psi, None, x, base, budget)
}

/// Does `δ(x, a)` þ-divide over `base`? The given split into `δ(x; y)` and
/// `a` is tried first, then the canonical split of the instance.
pub fn thorn_divides(
    theory: Theory,
    delta: &Formula,
    x: &[Var],
    y: &[Var],
    a: &[Elem],
    base: &[Elem],
    budget: &SearchBudget,
) -> Result<Decision<DivideCert>> {
    let psi = delta.instantiate(y, a);
    thorn_divides_impl(theory, &psi, Some((delta, y, a)), x, base, budget)
}

fn thorn_divides_impl(
    theory: Theory,
    psi: &Formula,
    given: Option<(&Formula, &[Var], &[Elem])>,
    x: &[Var],
    base: &[Elem],
    budget: &SearchBudget,
) -> Result<Decision<DivideCert>> {
    budget.validate()?;
    let base_set: BTreeSet<Elem> = base.iter().cloned().collect();
    let given_key = given.map(|(d, y, a)| format!("{d}|{}|{}", annotate(y), render_elems(a)));
    let key = format!(
        "{theory}|{psi}|{}|{}|{}|{}",
        annotate(x),
        render_elems(&base_set.iter().cloned().collect::<Vec<_>>()),
        given_key.unwrap_or_default(),
        budget.key()
    );
    if let Some(hit) = divide_memo().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let result = search_witness(theory, psi, given, x, &base_set, budget)?;
    divide_memo().lock().unwrap().insert(key, result.clone());
    Ok(result)
}

fn annotate(vars: &[Var]) -> String {
    vars.iter().map(Var::annotated).collect::<Vec<_>>().join(",")
}

fn search_witness(
    theory: Theory,
    psi: &Formula,
    given: Option<(&Formula, &[Var], &[Elem])>,
    x: &[Var],
    base: &BTreeSet<Elem>,
    budget: &SearchBudget,
) -> Result<Decision<DivideCert>> {
    let base_vec: Vec<Elem> = base.iter().cloned().collect();
    let (_, _, params) = abstract_parameters(theory, psi, base);
    let given_alg = given.map_or(true, |(_, _, a)| is_algebraic(theory, a, &base_vec));
    if params.is_empty() && given_alg {
        // every parameter is algebraic over the base, and stays so over any witness
        return Ok(Decision::No);
    }
    let mut seeds = base.clone();
    seeds.extend(psi.normalize_terms().literals());
    let pool = witness_pool(theory, &seeds, budget.pool_depth);
    let mut unknown = false;
    for c in witness_sets(&pool, base, budget.witness_len) {
        let mut keep = base.clone();
        keep.extend(c.iter().cloned());
        let mut over = base_vec.clone();
        over.extend(c.iter().cloned());
        let mut splits: Vec<(Formula, Vec<Var>, Vec<Elem>)> = Vec::new();
        if let Some((d, y, a)) = given {
            splits.push((d.clone(), y.to_vec(), a.to_vec()));
        }
        let canonical = abstract_parameters(theory, psi, &keep);
        if !canonical.2.is_empty() && !splits.iter().any(|s| *s == canonical) {
            splits.push(canonical);
        }
        for (delta, y, a) in splits {
            match strongly_divides(theory, &delta, x, &y, &a, &over, budget.k_max)? {
                StrongDivision::Yes { k } => {
                    let cert = divide_cert(theory, &delta, x, &y, &a, &base_vec, &c, k)?;
                    return Ok(Decision::Yes(cert));
                }
                StrongDivision::ExceedsKMax => unknown = true,
                StrongDivision::Algebraic | StrongDivision::Never => {}
            }
        }
    }
    Ok(if unknown {
        Decision::Unknown(format!("k-inconsistency needs k > {}", budget.k_max))
    } else if budget.strict {
        Decision::Unknown("witness pool exhausted (strict)".into())
    } else {
        Decision::No
    })
}

/// Atomic and negated atomic formulas in `x` with parameters from `params`.
fn atomic_candidates(theory: Theory, x: &[Var], params: &BTreeSet<Elem>) -> Vec<Formula> {
    let mut open: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
    let mut closed: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
    for v in x {
        open.entry(v.sort).or_default().push(Term::var(v));
        if theory == Theory::Erel && v.sort == Sort::Element {
            open.entry(Sort::Class).or_default().push(Term::cl(Term::var(v)));
        }
    }
    for e in theory.acl(params) {
        closed.entry(e.sort()).or_default().push(Term::Lit(e));
    }
    let mut atoms = Vec::new();
    for (sort, terms) in &open {
        let others: Vec<&Term> = terms.iter().chain(closed.get(sort).into_iter().flatten()).collect();
        for (i, s) in terms.iter().enumerate() {
            for t in others.iter().skip(i + 1) {
                atoms.push(Formula::eq(s.clone(), (*t).clone()));
                if theory == Theory::Dlo {
                    atoms.push(Formula::lt(s.clone(), (*t).clone()));
                    atoms.push(Formula::lt((*t).clone(), s.clone()));
                }
            }
        }
    }
    let negated: Vec<Formula> = atoms.iter().cloned().map(Formula::not).collect();
    atoms.extend(negated);
    atoms
}

/// Does `φ(x)` þ-fork over `base`?
///
/// The solutions of `φ` split into finitely many orbits over
/// `B = base ∪ params(φ)`. A candidate disjunct (a subformula of `φ` or an
/// atomic or negated atomic formula over `B`) is true on whole orbits, so
/// `φ` implies a disjunction of candidates exactly when every orbit inside
/// `φ` satisfies one of them; the smallest such cover of þ-dividing
/// candidates is searched up to the disjunct cap.
pub fn thorn_forks(theory: Theory, phi: &Formula, x: &[Var], base: &[Elem], budget: &SearchBudget) -> Result<Decision<ForkCert>> {
    budget.validate()?;
    theory.signature().check(phi)?;
    if let Some(v) = phi.free_vars().into_iter().find(|v| !x.contains(v)) {
        return Err(Error::Invalid(format!("free variable {} is not among the object variables", v.annotated())));
    }
    let base_set: BTreeSet<Elem> = base.iter().cloned().collect();
    let base_vec: Vec<Elem> = base_set.iter().cloned().collect();
    let mut b = base_set.clone();
    b.extend(phi.literals());
    let sorts: Vec<Sort> = x.iter().map(|v| v.sort).collect();
    let mut completions = Vec::new();
    for r in theory.tuple_reps(&sorts, &b) {
        if satisfies(theory, phi, x, &r)? {
            completions.push(r);
        }
    }
    if completions.is_empty() {
        return Err(Error::Inconsistent(phi.to_string()));
    }

    let mut candidates: Vec<Formula> = Vec::new();
    let mut seen = BTreeSet::new();
    let subs = phi.subformulas().into_iter().filter(|f| {
        !matches!(f, Formula::True | Formula::False) && f.free_vars().iter().all(|v| x.contains(v))
    });
    for f in subs.chain(atomic_candidates(theory, x, &b)) {
        let norm = f.normalize_terms();
        let has_param = norm.literals().iter().any(|e| !theory.in_acl(e, &base_set));
        if has_param && seen.insert(norm) {
            candidates.push(f);
        }
    }

    let mut verdicts: Vec<Option<Decision<DivideCert>>> = vec![None; candidates.len()];
    let mut options: Vec<Vec<usize>> = Vec::with_capacity(completions.len());
    let mut unknown: Option<String> = None;
    for r in &completions {
        let mut opts = Vec::new();
        for (i, cand) in candidates.iter().enumerate() {
            if !satisfies(theory, cand, x, r)? {
                continue;
            }
            if verdicts[i].is_none() {
                verdicts[i] = Some(thorn_divides_formula(theory, cand, x, &base_vec, budget)?);
            }
            match verdicts[i].as_ref().unwrap() {
                Decision::Yes(_) => {
                    opts.push(i);
                    if completions.len() == 1 {
                        // a single orbit: the first dividing candidate is the cover
                        break;
                    }
                }
                Decision::Unknown(why) => unknown = Some(why.clone()),
                Decision::No => {}
            }
        }
        if opts.is_empty() {
            return Ok(match unknown {
                Some(why) => Decision::Unknown(why),
                None if budget.strict => Decision::Unknown("candidate pool exhausted (strict)".into()),
                None => Decision::No,
            });
        }
        options.push(opts);
    }

    let covers: Vec<BTreeSet<usize>> = (0..candidates.len())
        .map(|i| (0..completions.len()).filter(|j| options[*j].contains(&i)).collect())
        .collect();
    let all: BTreeSet<usize> = (0..completions.len()).collect();
    let chosen = (1..=budget.disjuncts).find_map(|n| cover(&all, &options, &covers, n));
    let Some(chosen) = chosen else {
        return Ok(Decision::Unknown(format!("needs more than {} disjuncts", budget.disjuncts)));
    };
    let disjuncts: Vec<Disjunct> = chosen
        .into_iter()
        .map(|i| match verdicts[i].clone() {
            Some(Decision::Yes(cert)) => Disjunct { psi: candidates[i].clone(), cert },
            _ => unreachable!("only dividing candidates are chosen"),
        })
        .collect();
    let cert = ForkCert {
        theory,
        x: x.to_vec(),
        base: base_vec,
        phi: phi.clone(),
        implication: ForkCert::implication_for(x, phi, &disjuncts),
        disjuncts,
    };
    cert.verify()?;
    Ok(Decision::Yes(cert))
}

/// Exact set cover of `uncovered` with at most `left` candidates.
fn cover(
    uncovered: &BTreeSet<usize>,
    options: &[Vec<usize>],
    covers: &[BTreeSet<usize>],
    left: usize,
) -> Option<Vec<usize>> {
    if uncovered.is_empty() {
        return Some(Vec::new());
    }
    if left == 0 {
        return None;
    }
    let pivot = *uncovered.iter().min_by_key(|j| (options[**j].len(), **j))?;
    for &i in &options[pivot] {
        let rest: BTreeSet<usize> = uncovered.difference(&covers[i]).cloned().collect();
        if let Some(mut tail) = cover(&rest, options, covers, left - 1) {
            tail.insert(0, i);
            return Some(tail);
        }
    }
    None
}

/// Is `a` þ-independent from `b` over `base`, i.e. does `tp(a / base ∪ b)`
/// not þ-fork over `base`?
pub fn thorn_indep(theory: Theory, a: &[Elem], b: &[Elem], base: &[Elem], budget: &SearchBudget) -> Result<Independence> {
    for e in a.iter().chain(b).chain(base) {
        theory.check_elem(e)?;
    }
    let mut over = base.to_vec();
    over.extend(b.iter().cloned());
    let t = type_of(theory, a, &over);
    Ok(match thorn_forks(theory, &t.formula, &t.vars, base, budget)? {
        Decision::Yes(cert) => Independence::Dependent(Box::new(cert)),
        Decision::No => Independence::Independent,
        Decision::Unknown(why) => Independence::Unknown(why),
    })
}

/// Variables `x` / `x1..xn` matching the sorts of a tuple.
pub fn object_vars(a: &[Elem]) -> Vec<Var> {
    tuple_vars("x", &a.iter().map(Elem::sort).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(theory: Theory, s: &str) -> Vec<Elem> {
        theory.parse_elems(s).unwrap()
    }

    fn xy() -> (Vec<Var>, Vec<Var>) {
        (vec![Var::elem("x")], vec![Var::elem("y")])
    }

    #[test]
    fn strong_dividing_examples() {
        let (x, y) = xy();
        let d = Theory::Dlo.parse("x = y").unwrap();
        let r = strongly_divides(Theory::Dlo, &d, &x, &y, &el(Theory::Dlo, "0"), &[], 6).unwrap();
        assert_eq!(r.as_pair(), (true, Some(2)));
        let r = strongly_divides(Theory::Dlo, &d, &x, &y, &el(Theory::Dlo, "0"), &el(Theory::Dlo, "0"), 6).unwrap();
        assert_eq!(r, StrongDivision::Algebraic);
        let d = Theory::Eq.parse("x != y").unwrap();
        let r = strongly_divides(Theory::Eq, &d, &x, &y, &el(Theory::Eq, "#0"), &[], 6).unwrap();
        assert_eq!(r.as_pair(), (false, None));
    }

    #[test]
    fn thorn_dividing_examples() {
        let (x, y) = xy();
        let budget = SearchBudget::default();
        let d = Theory::Dlo.parse("x = y").unwrap();
        match thorn_divides(Theory::Dlo, &d, &x, &y, &el(Theory::Dlo, "0"), &[], &budget).unwrap() {
            Decision::Yes(c) => {
                assert!(c.witness.is_empty());
                assert_eq!(c.k, 2);
            }
            other => panic!("{other:?}"),
        }
        let d = Theory::Eq.parse("x != y").unwrap();
        assert!(thorn_divides(Theory::Eq, &d, &x, &y, &el(Theory::Eq, "#0"), &[], &budget).unwrap().is_no());
        let d = Theory::Erel.parse("cl(x) = cl(y)").unwrap();
        match thorn_divides(Theory::Erel, &d, &x, &y, &el(Theory::Erel, "3.0"), &[], &budget).unwrap() {
            Decision::Yes(c) => {
                assert!(c.witness.is_empty());
                assert_eq!(c.k, 2);
                assert_eq!(c.family.y[0].sort, Sort::Class);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thorn_forking_examples() {
        let x = vec![Var::elem("x")];
        let budget = SearchBudget::default();
        let phi = Theory::Dlo.parse("x = 0 | x = 1").unwrap();
        match thorn_forks(Theory::Dlo, &phi, &x, &[], &budget).unwrap() {
            Decision::Yes(c) => {
                let shown: Vec<String> = c.disjuncts.iter().map(|d| d.psi.to_string()).collect();
                assert_eq!(shown, ["x = 0", "x = 1"]);
                assert!(c.disjuncts.iter().all(|d| d.cert.k == 2));
            }
            other => panic!("{other:?}"),
        }
        let phi = Theory::Dlo.parse("0 < x").unwrap();
        assert!(thorn_forks(Theory::Dlo, &phi, &x, &[], &budget).unwrap().is_no());
        let phi = Theory::Eq.parse("x = x").unwrap();
        assert!(thorn_forks(Theory::Eq, &phi, &x, &[], &budget).unwrap().is_no());
        let phi = Theory::Eq.parse("x = #0 & x = #1").unwrap();
        assert!(matches!(thorn_forks(Theory::Eq, &phi, &x, &[], &budget), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn independence_examples() {
        let budget = SearchBudget::default();
        let dlo = |s: &str| el(Theory::Dlo, s);
        assert!(thorn_indep(Theory::Dlo, &dlo("0"), &dlo("1"), &[], &budget).unwrap().is_independent());
        assert!(thorn_indep(Theory::Dlo, &dlo("0"), &dlo("0"), &[], &budget).unwrap().is_dependent());
        let erel = |s: &str| el(Theory::Erel, s);
        assert!(thorn_indep(Theory::Erel, &erel("2.5"), &erel("2.7"), &[], &budget).unwrap().is_dependent());
        assert!(thorn_indep(Theory::Erel, &erel("2.5"), &erel("3.7"), &[], &budget).unwrap().is_independent());
    }

    #[test]
    fn witness_sets_are_ordered() {
        let pool: BTreeSet<Elem> = el(Theory::Eq, "#0,#1,#2").into_iter().collect();
        let base: BTreeSet<Elem> = el(Theory::Eq, "#0").into_iter().collect();
        let sets = witness_sets(&pool, &base, 2);
        let shown: Vec<String> = sets.iter().map(|s| render_elems(s)).collect();
        assert_eq!(shown, ["", "#1", "#2", "#1,#2"]);
    }

    #[test]
    fn strict_downgrades_no() {
        let budget = SearchBudget { strict: true, ..SearchBudget::default() };
        let x = vec![Var::elem("x")];
        let phi = Theory::Dlo.parse("0 < x").unwrap();
        assert!(thorn_forks(Theory::Dlo, &phi, &x, &[], &budget).unwrap().is_unknown());
    }
}
