//! Local þ-ranks `þ(φ, Δ, Π, k)` and the global Uþ-ranks.

mod uth;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::definable::Family;
use crate::error::{Error, Result};
use crate::formula::{Elem, Formula, Sort, Var};
use crate::theory::{qe, satisfies, solution_count, type_of_vars, SolutionCount, Theory, TypeDesc};

pub use uth::{
    lascar_check, type_for, uth_rank, uth_rank_of, uth_star_rank, uth_star_rank_of, ChainLink, LascarReport, StarLink,
    UthValue,
};

/// `Δ` in the variables `x; y`, `Π` in `y; z`, and `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankParams {
    pub x: Vec<Var>,
    pub y: Vec<Var>,
    pub z: Vec<Var>,
    pub delta: Vec<Formula>,
    pub pi: Vec<Formula>,
    pub k: usize,
}

impl RankParams {
    /// Reads `Δ` and `Π` from text; `y` is whatever `Δ` mentions besides
    /// `x`, and `z` whatever `Π` mentions besides `y`.
    pub fn parse(theory: Theory, x: &[Var], delta: &[&str], pi: &[&str], k: usize) -> Result<RankParams> {
        let mut ds = Vec::new();
        let mut y: Vec<Var> = Vec::new();
        for text in delta {
            let d = theory.parse_with(text, x)?;
            for v in d.free_vars() {
                if !x.contains(&v) && !y.contains(&v) {
                    y.push(v);
                }
            }
            ds.push(d);
        }
        let mut ps = Vec::new();
        let mut z: Vec<Var> = Vec::new();
        for text in pi {
            let p = theory.parse_with(text, &y)?;
            for v in p.free_vars() {
                if !y.contains(&v) && !z.contains(&v) {
                    z.push(v);
                }
            }
            ps.push(p);
        }
        let params = RankParams { x: x.to_vec(), y, z, delta: ds, pi: ps, k };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Invalid("k must be at least 2".into()));
        }
        if self.delta.is_empty() || self.pi.is_empty() {
            return Err(Error::Invalid("delta and pi must be non-empty".into()));
        }
        let names: BTreeSet<_> = self.x.iter().chain(&self.y).chain(&self.z).map(|v| v.name.clone()).collect();
        if names.len() != self.x.len() + self.y.len() + self.z.len() {
            return Err(Error::Invalid("x, y and z must be disjoint".into()));
        }
        for d in &self.delta {
            if d.free_vars().iter().any(|v| !self.x.contains(v) && !self.y.contains(v)) {
                return Err(Error::Invalid(format!("{d} is not a formula in x; y")));
            }
        }
        for p in &self.pi {
            if p.free_vars().iter().any(|v| !self.y.contains(v) && !self.z.contains(v)) {
                return Err(Error::Invalid(format!("{p} is not a formula in y; z")));
            }
        }
        Ok(())
    }

    pub fn fix_sorts(&mut self) {
        let xy: Vec<Var> = self.x.iter().chain(&self.y).cloned().collect();
        let yz: Vec<Var> = self.y.iter().chain(&self.z).cloned().collect();
        self.delta = self.delta.iter().map(|d| d.with_sorts(&xy)).collect();
        self.pi = self.pi.iter().map(|p| p.with_sorts(&yz)).collect();
    }

    fn fixed_literals(&self) -> BTreeSet<Elem> {
        self.delta.iter().chain(&self.pi).flat_map(Formula::literals).collect()
    }

    fn key(&self) -> String {
        let show = |fs: &[Formula]| fs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";");
        let vars = |vs: &[Var]| vs.iter().map(Var::annotated).collect::<Vec<_>>().join(",");
        format!("{}|{}|{}|{}|{}|{}", vars(&self.x), vars(&self.y), vars(&self.z), show(&self.delta), show(&self.pi), self.k)
    }
}

/// Value of a local rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankValue {
    /// The formula is inconsistent.
    MinusInfinity,
    Finite(usize),
    /// The search reached the cap.
    AtLeast(usize),
}

impl RankValue {
    /// `-1` for an inconsistent formula.
    pub fn as_i64(self) -> i64 {
        match self {
            RankValue::MinusInfinity => -1,
            RankValue::Finite(n) | RankValue::AtLeast(n) => n as i64,
        }
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::MinusInfinity => write!(f, "-1"),
            RankValue::Finite(n) => write!(f, "{n}"),
            RankValue::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RankRepr {
    Exact(i64),
    AtLeast { at_least: usize },
}

impl Serialize for RankValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RankValue::AtLeast(n) => RankRepr::AtLeast { at_least: *n },
            other => RankRepr::Exact(other.as_i64()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match RankRepr::deserialize(d)? {
            RankRepr::Exact(-1) => RankValue::MinusInfinity,
            RankRepr::Exact(n) if n >= 0 => RankValue::Finite(n as usize),
            RankRepr::Exact(n) => return Err(serde::de::Error::custom(format!("bad rank {n}"))),
            RankRepr::AtLeast { at_least } => RankValue::AtLeast(at_least),
        })
    }
}

/// A node `φ` of a rank tree and, when its rank is positive, the splitting
/// that raises it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTree {
    pub formula: Formula,
    pub rank: i64,
    pub step: Option<Box<RankStep>>,
}

/// One level: the family `{δ(x, a′)}_{a′ ⊨ π(y; c)}` is `k`-inconsistent,
/// `q = tp(a / params ∪ c)` is non-algebraic and contains `π(y; c)`, and
/// the child node is `φ ∧ δ(x, a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankStep {
    pub delta: Formula,
    pub pi: Formula,
    pub c: Vec<Elem>,
    pub q: Formula,
    pub a: Vec<Elem>,
    /// Most distinct parameters with a common solution; below `k`.
    pub max_joint: usize,
    pub child: RankTree,
}

impl RankTree {
    pub fn height(&self) -> usize {
        self.step.as_ref().map_or(0, |s| 1 + s.child.height())
    }

    pub fn fix_sorts(&mut self, params: &RankParams) {
        self.formula = self.formula.with_sorts(&params.x);
        if let Some(step) = &mut self.step {
            let xy: Vec<Var> = params.x.iter().chain(&params.y).cloned().collect();
            step.delta = step.delta.with_sorts(&xy);
            step.pi = step.pi.with_sorts(&params.y);
            step.q = step.q.with_sorts(&params.y);
            step.child.fix_sorts(params);
        }
    }

    /// Rechecks every node: consistency, the level families, the
    /// parameter types and the parent-child links.
    pub fn verify(&self, theory: Theory, params: &RankParams) -> Result<()> {
        let bad = |m: String| Err(Error::Certificate(format!("rank tree at {}: {m}", self.formula)));
        let count = solution_count(theory, &self.formula, &params.x)?;
        let consistent = count != SolutionCount::Finite(0, vec![]);
        if self.rank == -1 {
            return if consistent || self.step.is_some() { bad("wrongly marked inconsistent".into()) } else { Ok(()) };
        }
        if !consistent {
            return bad("node is inconsistent".into());
        }
        let Some(step) = &self.step else {
            return if self.rank == 0 { Ok(()) } else { bad(format!("rank {} without a splitting", self.rank)) };
        };
        if !params.delta.contains(&step.delta) {
            return bad(format!("{} is not in delta", step.delta));
        }
        if !params.pi.iter().any(|p| p.instantiate(&params.z, &step.c) == step.pi) {
            return bad(format!("{} is no instance of pi", step.pi));
        }
        let fam = Family::new(theory, params.x.clone(), params.y.clone(), step.delta.clone(), step.pi.clone())?;
        if fam.max_joint()? != Some(step.max_joint) || step.max_joint >= params.k {
            return bad("level family is not k-inconsistent".into());
        }
        let mut named = self.formula.literals();
        named.extend(params.fixed_literals());
        named.extend(step.c.iter().cloned());
        let named: Vec<Elem> = named.into_iter().collect();
        let q = type_of_vars(theory, &params.y, &step.a, &named);
        if q.formula != step.q || q.is_algebraic() {
            return bad("parameter type is wrong or algebraic".into());
        }
        if !satisfies(theory, &step.pi, &params.y, &step.a)? {
            return bad("parameter does not satisfy pi".into());
        }
        let expected = Formula::and([self.formula.clone(), step.delta.instantiate(&params.y, &step.a)]);
        if step.child.formula != expected || step.child.rank != self.rank - 1 {
            return bad("child does not match".into());
        }
        step.child.verify(theory, params)
    }
}

/// Result of a local rank computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRank {
    pub value: RankValue,
    pub tree: RankTree,
}

struct Search<'a> {
    theory: Theory,
    params: &'a RankParams,
    fixed: BTreeSet<Elem>,
    ranks: HashMap<(String, usize), RankTree>,
    families: HashMap<String, Option<usize>>,
}

impl Search<'_> {
    fn family_joint(&mut self, delta: &Formula, pi: &Formula) -> Result<Option<usize>> {
        let key = format!("{delta}|{pi}");
        if let Some(hit) = self.families.get(&key) {
            return Ok(*hit);
        }
        let p = self.params;
        let joint = match Family::new(self.theory, p.x.clone(), p.y.clone(), delta.clone(), pi.clone()) {
            Ok(fam) => fam.max_joint()?.filter(|m| *m < p.k),
            Err(Error::Inconsistent(_)) => None,
            Err(e) => return Err(e),
        };
        self.families.insert(key, joint);
        Ok(joint)
    }

    /// The tree of `φ` with height capped at `limit`.
    fn rank(&mut self, phi: &Formula, limit: usize) -> Result<RankTree> {
        let key = (phi.to_string(), limit);
        if let Some(hit) = self.ranks.get(&key) {
            return Ok(hit.clone());
        }
        let tree = self.compute(phi, limit)?;
        self.ranks.insert(key, tree.clone());
        Ok(tree)
    }

    fn compute(&mut self, phi: &Formula, limit: usize) -> Result<RankTree> {
        let p = self.params;
        let leaf = |rank| RankTree { formula: phi.clone(), rank, step: None };
        if solution_count(self.theory, phi, &p.x)? == SolutionCount::Finite(0, vec![]) {
            return Ok(leaf(-1));
        }
        if limit == 0 {
            return Ok(leaf(0));
        }
        let mut named = phi.literals();
        named.extend(self.fixed.iter().cloned());
        let z_sorts: Vec<Sort> = p.z.iter().map(|v| v.sort).collect();
        let y_sorts: Vec<Sort> = p.y.iter().map(|v| v.sort).collect();
        let mut best = leaf(0);
        for delta in &p.delta {
            for pi in &p.pi {
                for c in self.theory.tuple_reps(&z_sorts, &named) {
                    let pic = pi.instantiate(&p.z, &c);
                    let Some(max_joint) = self.family_joint(delta, &pic)? else { continue };
                    let mut over = named.clone();
                    over.extend(c.iter().cloned());
                    let over_vec: Vec<Elem> = over.iter().cloned().collect();
                    for a in self.theory.tuple_reps(&y_sorts, &over) {
                        if !satisfies(self.theory, &pic, &p.y, &a)? {
                            continue;
                        }
                        let q = type_of_vars(self.theory, &p.y, &a, &over_vec);
                        if q.is_algebraic() {
                            continue;
                        }
                        let child_phi = Formula::and([phi.clone(), delta.instantiate(&p.y, &a)]);
                        let child = self.rank(&child_phi, limit - 1)?;
                        if child.rank + 1 > best.rank {
                            best = RankTree {
                                formula: phi.clone(),
                                rank: child.rank + 1,
                                step: Some(Box::new(RankStep {
                                    delta: delta.clone(),
                                    pi: pic.clone(),
                                    c: c.clone(),
                                    q: q.formula,
                                    a,
                                    max_joint,
                                    child,
                                })),
                            };
                            if best.rank as usize == limit {
                                return Ok(best);
                            }
                        }
                    }
                }
            }
        }
        Ok(best)
    }
}

fn rank_memo() -> &'static std::sync::Mutex<HashMap<String, LocalRank>> {
    static MEMO: std::sync::OnceLock<std::sync::Mutex<HashMap<String, LocalRank>>> = std::sync::OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `þ(φ, Δ, Π, k)` with its witness tree. Quantifiers in `φ` are eliminated
/// first; the tree is over the quantifier-free form.
///
/// Splitting parameters `c` range over orbit representatives, and each
/// level recurses on one realization of each non-algebraic completion of
/// `π(y; c)`; all realizations of such a completion are conjugate over the
/// parameters in play, so this is exact.
pub fn local_rank(theory: Theory, phi: &Formula, params: &RankParams, cap: usize) -> Result<LocalRank> {
    params.validate()?;
    theory.signature().check(phi)?;
    for f in params.delta.iter().chain(&params.pi) {
        theory.signature().check(f)?;
    }
    if let Some(v) = phi.free_vars().into_iter().find(|v| !params.x.contains(v)) {
        return Err(Error::Invalid(format!("free variable {} is not among x", v.annotated())));
    }
    let phi = if phi.is_quantifier_free() { phi.clone() } else { qe(theory, phi)? };
    let key = format!("{theory}|{phi}|{}|{cap}", params.key());
    if let Some(hit) = rank_memo().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let mut search = Search {
        theory,
        params,
        fixed: params.fixed_literals(),
        ranks: HashMap::new(),
        families: HashMap::new(),
    };
    let tree = search.rank(&phi, cap + 1)?;
    let value = match tree.rank {
        -1 => RankValue::MinusInfinity,
        r if r as usize > cap => RankValue::AtLeast(cap),
        r => RankValue::Finite(r as usize),
    };
    let out = LocalRank { value, tree };
    rank_memo().lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Local rank of a complete type: the rank of its isolating formula, which
/// is the least rank among the formulas of the type.
pub fn local_rank_of_type(t: &TypeDesc, params: &RankParams, cap: usize) -> Result<LocalRank> {
    if t.vars != params.x {
        return Err(Error::Invalid("type variables differ from the rank variables".into()));
    }
    local_rank(t.theory, &t.formula, params, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::tuple_vars;

    fn rank(theory: Theory, phi: &str, x: &[Var], delta: &[&str], pi: &[&str], k: usize) -> LocalRank {
        let params = RankParams::parse(theory, x, delta, pi, k).unwrap();
        let f = theory.parse_with(phi, x).unwrap();
        let r = local_rank(theory, &f, &params, 6).unwrap();
        r.tree.verify(theory, &params).unwrap();
        r
    }

    #[test]
    fn documented_ranks() {
        let x = [Var::elem("x")];
        assert_eq!(rank(Theory::Eq, "x = x", &x, &["x = y"], &["y = y"], 2).value, RankValue::Finite(1));
        assert_eq!(rank(Theory::Eq, "x = #0", &x, &["x = y"], &["y = y"], 2).value, RankValue::Finite(0));
        let xs = tuple_vars("x", &[Sort::Element, Sort::Element]);
        let r = rank(Theory::Dlo, "true", &xs, &["x1 = y", "x2 = y"], &["y = y"], 2);
        assert_eq!(r.value, RankValue::Finite(2));
        assert_eq!(r.tree.height(), 2);
    }

    #[test]
    fn inconsistent_is_minus_infinity() {
        let x = [Var::elem("x")];
        let r = rank(Theory::Dlo, "x < 0 & 1 < x", &x, &["x = y"], &["y = y"], 2);
        assert_eq!(r.value, RankValue::MinusInfinity);
        assert_eq!(serde_json::to_string(&r.value).unwrap(), "-1");
    }

    #[test]
    fn parameters_from_pi() {
        let x = [Var::elem("x")];
        let r = rank(Theory::Dlo, "x = x", &x, &["x = y"], &["z < y"], 2);
        assert_eq!(r.value, RankValue::Finite(1));
        assert_eq!(r.tree.step.as_ref().unwrap().c.len(), 1);
        let r = rank(Theory::Erel, "x = x", &x, &["cl(x) = y"], &["y = y"], 2);
        assert_eq!(r.value, RankValue::Finite(1));
        let r = rank(Theory::Erel, "x = x", &x, &["x = y"], &["E(y, z)"], 2);
        assert_eq!(r.value, RankValue::Finite(1));
    }

    #[test]
    fn cap_gives_lower_bound() {
        let xs = tuple_vars("x", &[Sort::Element, Sort::Element]);
        let params = RankParams::parse(Theory::Dlo, &xs, &["x1 = y", "x2 = y"], &["y = y"], 2).unwrap();
        let r = local_rank(Theory::Dlo, &Formula::True, &params, 1).unwrap();
        assert_eq!(r.value, RankValue::AtLeast(1));
    }

    #[test]
    fn rank_values_round_trip() {
        for v in [RankValue::MinusInfinity, RankValue::Finite(3), RankValue::AtLeast(2)] {
            let s = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<RankValue>(&s).unwrap(), v);
        }
    }
}
