use std::collections::BTreeMap;

use super::{Atom, Formula, Sort, Term};
use crate::error::{Error, Result};

/// Shapes of element literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiteralKind {
    /// `#n`
    Nat,
    /// `p/q` or an integer
    Rational,
    /// `i.j`
    Pair,
    /// `@n`
    Class,
}

/// Which sorts, symbols and literal shapes a theory admits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub sorts: Vec<Sort>,
    pub relations: BTreeMap<String, Vec<Sort>>,
    pub functions: BTreeMap<String, (Vec<Sort>, Sort)>,
    pub literals: Vec<(LiteralKind, Sort)>,
}

impl Signature {
    pub fn equality() -> Self {
        Signature {
            name: "EQ".into(),
            sorts: vec![Sort::Element],
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
            literals: vec![(LiteralKind::Nat, Sort::Element)],
        }
    }

    pub fn dense_order() -> Self {
        Signature {
            name: "DLO".into(),
            sorts: vec![Sort::Element],
            relations: BTreeMap::from([("<".to_string(), vec![Sort::Element, Sort::Element])]),
            functions: BTreeMap::new(),
            literals: vec![(LiteralKind::Rational, Sort::Element)],
        }
    }

    pub fn equivalence() -> Self {
        Signature {
            name: "EREL".into(),
            sorts: vec![Sort::Element, Sort::Class],
            relations: BTreeMap::from([("E".to_string(), vec![Sort::Element, Sort::Element])]),
            functions: BTreeMap::from([("cl".to_string(), (vec![Sort::Element], Sort::Class))]),
            literals: vec![(LiteralKind::Pair, Sort::Element), (LiteralKind::Class, Sort::Class)],
        }
    }

    /// Every symbol and literal shape of the shipped theories; used when
    /// reading formulas back from serialized reports.
    pub fn universal() -> Self {
        let mut sig = Signature::equivalence();
        sig.name = "ANY".into();
        sig.relations.insert("<".to_string(), vec![Sort::Element, Sort::Element]);
        sig.literals.push((LiteralKind::Nat, Sort::Element));
        sig.literals.push((LiteralKind::Rational, Sort::Element));
        sig
    }

    /// Checks the declaration invariants: distinct sorts, declared argument sorts.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(format!("signature {}: {m}", self.name)));
        for (i, s) in self.sorts.iter().enumerate() {
            if self.sorts[..i].contains(s) {
                return bad(format!("sort {s} declared twice"));
            }
        }
        let declared = |s: &Sort| self.sorts.contains(s);
        for (name, args) in &self.relations {
            if !args.iter().all(declared) {
                return bad(format!("relation {name} uses an undeclared sort"));
            }
        }
        for (name, (args, res)) in &self.functions {
            if !args.iter().all(declared) || !declared(res) {
                return bad(format!("function {name} uses an undeclared sort"));
            }
        }
        for (_, s) in &self.literals {
            if !declared(s) {
                return bad("literal of undeclared sort".into());
            }
        }
        Ok(())
    }

    fn reject(&self, symbol: impl Into<String>) -> Error {
        Error::Signature { symbol: symbol.into(), theory: self.name.clone() }
    }

    fn check_term(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(v) => {
                if self.sorts.contains(&v.sort) {
                    Ok(())
                } else {
                    Err(self.reject(format!("{}:{}", v.name, v.sort)))
                }
            }
            Term::Lit(e) => {
                if self.literals.iter().any(|(k, _)| *k == e.kind()) {
                    Ok(())
                } else {
                    Err(self.reject(e.to_string()))
                }
            }
            Term::Cl(inner) => {
                if !self.functions.contains_key("cl") {
                    return Err(self.reject("cl"));
                }
                self.check_term(inner)
            }
        }
    }

    /// Rejects symbols, sorts and literals outside this signature.
    pub fn check(&self, f: &Formula) -> Result<()> {
        let mut res = Ok(());
        f.visit_atoms(&mut |a| {
            if res.is_err() {
                return;
            }
            let symbol = match a {
                Atom::Eq(..) => None,
                Atom::Lt(..) => Some("<"),
                Atom::Same(..) => Some("E"),
            };
            if let Some(sym) = symbol {
                if !self.relations.contains_key(sym) {
                    res = Err(self.reject(sym));
                    return;
                }
            }
            let (s, t) = a.terms();
            res = self.check_term(s).and_then(|_| self.check_term(t));
        });
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_signatures_are_valid() {
        for sig in [Signature::equality(), Signature::dense_order(), Signature::equivalence()] {
            sig.validate().unwrap();
        }
    }

    #[test]
    fn duplicate_sort_is_rejected() {
        let mut sig = Signature::equality();
        sig.sorts.push(Sort::Element);
        assert!(sig.validate().is_err());
    }
}
