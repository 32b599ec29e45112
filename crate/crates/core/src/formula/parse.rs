//! Recursive-descent parser with sort inference.
//!
//! Parsing runs in two passes: the text is read into an untyped tree, then
//! variable sorts are inferred with a union-find over binding sites. Sorts
//! left undetermined fall back to the caller's hints, then to `element`.

use std::collections::BTreeMap;

use super::{Elem, Formula, Signature, Sort, Term, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Lit(Elem),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Neq,
    Lt,
    Bang,
    Amp,
    Pipe,
    Arrow,
    End,
}

const KEYWORDS: [&str; 6] = ["exists", "forall", "true", "false", "cl", "E"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| Error::Syntax { pos, msg: msg.to_string() };
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            '<' => Tok::Lt,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            '!' => Tok::Bang,
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            '#' | '@' => {
                let end = digits(i + 1);
                if end == i + 1 {
                    return Err(err(i, "expected digits after literal prefix"));
                }
                let lit: Elem = src[i..end].parse().map_err(|_| err(i, "bad literal"))?;
                i = end;
                out.push((Tok::Lit(lit), start));
                continue;
            }
            '-' | '0'..='9' => {
                let num_start = if c == '-' { i + 1 } else { i };
                let mut end = digits(num_start);
                if end == num_start {
                    return Err(err(i, "unexpected `-`"));
                }
                let follows_digit = |j: usize| bytes.get(j).is_some_and(u8::is_ascii_digit);
                match bytes.get(end) {
                    Some(b'/') if follows_digit(end + 1) => end = digits(end + 1),
                    Some(b'.') if follows_digit(end + 1) => {
                        if c == '-' {
                            return Err(err(i, "element pairs cannot be negative"));
                        }
                        end = digits(end + 1);
                    }
                    _ => {}
                }
                let lit: Elem = src[i..end].parse().map_err(|_| err(i, "bad literal"))?;
                i = end;
                out.push((Tok::Lit(lit), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i + 1;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                let word = src[i..end].to_string();
                i = end;
                out.push((Tok::Ident(word), start));
                continue;
            }
            other => return Err(err(i, &format!("unexpected character `{other}`"))),
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

#[derive(Debug)]
enum RTerm {
    Var(String),
    Lit(Elem),
    Cl(Box<RTerm>),
}

#[derive(Debug)]
enum RFormula {
    True,
    False,
    Eq(RTerm, RTerm),
    Lt(RTerm, RTerm),
    Same(RTerm, RTerm),
    Not(Box<RFormula>),
    And(Vec<RFormula>),
    Or(Vec<RFormula>),
    Implies(Box<RFormula>, Box<RFormula>),
    Exists(String, Box<RFormula>),
    Forall(String, Box<RFormula>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn formula(&mut self) -> Result<RFormula> {
        if self.is_keyword("exists") || self.is_keyword("forall") {
            self.quant()
        } else {
            self.implication()
        }
    }

    fn quant(&mut self) -> Result<RFormula> {
        let universal = self.is_keyword("forall");
        self.bump();
        let mut vars = vec![self.var_name()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.var_name()?);
        }
        self.expect(Tok::Dot, "`.` after quantified variables")?;
        let body = self.formula()?;
        Ok(vars.into_iter().rev().fold(body, |acc, v| {
            if universal {
                RFormula::Forall(v, Box::new(acc))
            } else {
                RFormula::Exists(v, Box::new(acc))
            }
        }))
    }

    fn var_name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok(w)
            }
            _ => self.fail("expected a variable"),
        }
    }

    fn implication(&mut self) -> Result<RFormula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication_or_quant()?;
            return Ok(RFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication_or_quant(&mut self) -> Result<RFormula> {
        if self.is_keyword("exists") || self.is_keyword("forall") {
            self.quant()
        } else {
            self.implication()
        }
    }

    fn disjunction(&mut self) -> Result<RFormula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RFormula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<RFormula> {
        let mut parts = vec![self.literal()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.literal()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RFormula::And(parts) })
    }

    fn literal(&mut self) -> Result<RFormula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(RFormula::Not(Box::new(self.literal()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(RFormula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(RFormula::False)
            }
            Tok::Ident(w) if w == "exists" || w == "forall" => self.quant(),
            Tok::Ident(w) if w == "E" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after E")?;
                let s = self.term()?;
                self.expect(Tok::Comma, "`,` in E(s, t)")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RFormula::Same(s, t))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<RFormula> {
        let s = self.term()?;
        let op = self.bump();
        let t = self.term()?;
        match op {
            Tok::Eq => Ok(RFormula::Eq(s, t)),
            Tok::Neq => Ok(RFormula::Not(Box::new(RFormula::Eq(s, t)))),
            Tok::Lt => Ok(RFormula::Lt(s, t)),
            _ => Err(Error::Syntax { pos: self.toks[self.at.saturating_sub(2)].1, msg: "expected `=`, `!=` or `<`".into() }),
        }
    }

    fn term(&mut self) -> Result<RTerm> {
        match self.peek().clone() {
            Tok::Lit(e) => {
                self.bump();
                Ok(RTerm::Lit(e))
            }
            Tok::Ident(w) if w == "cl" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after cl")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RTerm::Cl(Box::new(t)))
            }
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok(RTerm::Var(w))
            }
            _ => self.fail("expected a term"),
        }
    }
}

/// Union-find over variable binding sites, each carrying an optional sort.
struct Sorts {
    parent: Vec<usize>,
    sort: Vec<Option<Sort>>,
}

#[derive(Clone, Copy)]
enum TSort {
    Known(Sort),
    Slot(usize),
}

impl Sorts {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.sort.push(None);
        self.parent.len() - 1
    }

    fn find(&mut self, i: usize) -> usize {
        let p = self.parent[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.parent[i] = r;
        r
    }

    fn unify(&mut self, a: TSort, b: TSort, ctx: &dyn Fn() -> String) -> Result<()> {
        let conflict = |x: Sort, y: Sort| Error::Sort {
            term: ctx(),
            msg: format!("{x} used where {y} is required"),
        };
        match (a, b) {
            (TSort::Known(x), TSort::Known(y)) => {
                if x == y {
                    Ok(())
                } else {
                    Err(conflict(x, y))
                }
            }
            (TSort::Slot(i), TSort::Known(s)) | (TSort::Known(s), TSort::Slot(i)) => {
                let r = self.find(i);
                match self.sort[r] {
                    Some(t) if t != s => Err(conflict(t, s)),
                    _ => {
                        self.sort[r] = Some(s);
                        Ok(())
                    }
                }
            }
            (TSort::Slot(i), TSort::Slot(j)) => {
                let (ri, rj) = (self.find(i), self.find(j));
                if ri == rj {
                    return Ok(());
                }
                match (self.sort[ri], self.sort[rj]) {
                    (Some(x), Some(y)) if x != y => Err(conflict(x, y)),
                    (x, y) => {
                        self.parent[ri] = rj;
                        self.sort[rj] = y.or(x);
                        Ok(())
                    }
                }
            }
        }
    }
}

fn show_term(t: &RTerm) -> String {
    match t {
        RTerm::Var(n) => n.clone(),
        RTerm::Lit(e) => e.to_string(),
        RTerm::Cl(t) => format!("cl({})", show_term(t)),
    }
}

struct Inference {
    sorts: Sorts,
    free: BTreeMap<String, usize>,
    scope: Vec<(String, usize)>,
    /// Binding-site slot for every variable occurrence / binder, in traversal order.
    occurrences: Vec<usize>,
}

impl Inference {
    fn lookup(&mut self, name: &str) -> usize {
        if let Some((_, slot)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return *slot;
        }
        if let Some(slot) = self.free.get(name) {
            return *slot;
        }
        let slot = self.sorts.fresh();
        self.free.insert(name.to_string(), slot);
        slot
    }

    fn term(&mut self, t: &RTerm) -> Result<TSort> {
        match t {
            RTerm::Var(name) => {
                let slot = self.lookup(name);
                self.occurrences.push(slot);
                Ok(TSort::Slot(slot))
            }
            RTerm::Lit(e) => Ok(TSort::Known(e.sort())),
            RTerm::Cl(inner) => {
                let s = self.term(inner)?;
                self.sorts
                    .unify(s, TSort::Known(Sort::Element), &|| format!("cl({})", show_term(inner)))?;
                Ok(TSort::Known(Sort::Class))
            }
        }
    }

    fn both_elements(&mut self, s: &RTerm, t: &RTerm, what: &str) -> Result<()> {
        let a = self.term(s)?;
        let b = self.term(t)?;
        self.sorts.unify(a, TSort::Known(Sort::Element), &|| format!("{what}: {}", show_term(s)))?;
        self.sorts.unify(b, TSort::Known(Sort::Element), &|| format!("{what}: {}", show_term(t)))
    }

    fn formula(&mut self, f: &RFormula) -> Result<()> {
        match f {
            RFormula::True | RFormula::False => Ok(()),
            RFormula::Eq(s, t) => {
                let a = self.term(s)?;
                let b = self.term(t)?;
                self.sorts
                    .unify(a, b, &|| format!("{} = {}", show_term(s), show_term(t)))
            }
            RFormula::Lt(s, t) => self.both_elements(s, t, "<"),
            RFormula::Same(s, t) => self.both_elements(s, t, "E"),
            RFormula::Not(g) => self.formula(g),
            RFormula::And(gs) | RFormula::Or(gs) => gs.iter().try_for_each(|g| self.formula(g)),
            RFormula::Implies(l, r) => {
                self.formula(l)?;
                self.formula(r)
            }
            RFormula::Exists(v, body) | RFormula::Forall(v, body) => {
                let slot = self.sorts.fresh();
                self.occurrences.push(slot);
                self.scope.push((v.clone(), slot));
                let res = self.formula(body);
                self.scope.pop();
                res
            }
        }
    }
}

struct Builder<'a> {
    sorts: &'a mut Sorts,
    occurrences: std::vec::IntoIter<usize>,
}

impl Builder<'_> {
    fn sort_of(&mut self) -> Sort {
        let slot = self.occurrences.next().expect("occurrence list out of step");
        let r = self.sorts.find(slot);
        self.sorts.sort[r].unwrap_or(Sort::Element)
    }

    fn term(&mut self, t: &RTerm) -> Term {
        match t {
            RTerm::Var(name) => Term::Var(Var::new(name, self.sort_of())),
            RTerm::Lit(e) => Term::Lit(e.clone()),
            RTerm::Cl(inner) => Term::cl(self.term(inner)),
        }
    }

    fn formula(&mut self, f: &RFormula) -> Formula {
        match f {
            RFormula::True => Formula::True,
            RFormula::False => Formula::False,
            RFormula::Eq(s, t) => {
                let s = self.term(s);
                Formula::eq(s, self.term(t))
            }
            RFormula::Lt(s, t) => {
                let s = self.term(s);
                Formula::lt(s, self.term(t))
            }
            RFormula::Same(s, t) => {
                let s = self.term(s);
                Formula::same(s, self.term(t))
            }
            RFormula::Not(g) => Formula::not(self.formula(g)),
            RFormula::And(gs) => Formula::And(gs.iter().map(|g| self.formula(g)).collect()),
            RFormula::Or(gs) => Formula::Or(gs.iter().map(|g| self.formula(g)).collect()),
            RFormula::Implies(l, r) => {
                let l = self.formula(l);
                Formula::implies(l, self.formula(r))
            }
            RFormula::Exists(v, body) => {
                let var = Var::new(v, self.sort_of());
                Formula::exists(var, self.formula(body))
            }
            RFormula::Forall(v, body) => {
                let var = Var::new(v, self.sort_of());
                Formula::forall(var, self.formula(body))
            }
        }
    }
}

/// Parses `text` over `sig`, inferring variable sorts (default `element`).
pub fn parse(text: &str, sig: &Signature) -> Result<Formula> {
    parse_with_hints(text, sig, &[])
}

/// Like [`parse`], with declared sorts for some free variables.
pub fn parse_with_hints(text: &str, sig: &Signature, hints: &[Var]) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let raw = p.formula()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    let mut inf = Inference {
        sorts: Sorts { parent: Vec::new(), sort: Vec::new() },
        free: BTreeMap::new(),
        scope: Vec::new(),
        occurrences: Vec::new(),
    };
    for h in hints {
        let slot = inf.sorts.fresh();
        inf.sorts.sort[slot] = Some(h.sort);
        inf.free.insert(h.name.to_string(), slot);
    }
    inf.formula(&raw)?;
    let mut b = Builder {
        sorts: &mut inf.sorts,
        occurrences: inf.occurrences.into_iter(),
    };
    let f = b.formula(&raw);
    sig.check(&f)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Atom;

    fn dlo(s: &str) -> Formula {
        parse(s, &Signature::dense_order()).unwrap()
    }

    #[test]
    fn exists_conjunction() {
        let f = dlo("exists y. x < y & y < z");
        match f {
            Formula::Exists(v, body) => {
                assert_eq!(&*v.name, "y");
                assert!(matches!(*body, Formula::And(ref parts) if parts.len() == 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equality_with_literal() {
        let f = parse("x = #3", &Signature::equality()).unwrap();
        assert_eq!(f, Formula::eq(Term::var(&Var::elem("x")), Term::Lit(Elem::Nat(3))));
    }

    #[test]
    fn order_rejected_in_equality_signature() {
        let err = parse("x < y", &Signature::equality()).unwrap_err();
        assert!(matches!(err, Error::Signature { ref symbol, .. } if symbol == "<"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse("x = = y", &Signature::equality()).unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 4, .. }), "{err:?}");
        assert!(parse("x = #1 &", &Signature::equality()).is_err());
        assert!(parse("(x = #1", &Signature::equality()).is_err());
    }

    #[test]
    fn class_sort_is_inferred() {
        let f = parse("exists y. cl(y) = C & y != 2.5", &Signature::equivalence()).unwrap();
        let free = f.free_vars();
        assert_eq!(free.into_iter().collect::<Vec<_>>(), vec![Var::class("C")]);
    }

    #[test]
    fn sort_conflict_names_subterm() {
        let err = parse("cl(x) = x", &Signature::equivalence()).unwrap_err();
        assert!(matches!(err, Error::Sort { .. }), "{err:?}");
        let err = parse("x = @1 & E(x, y)", &Signature::equivalence()).unwrap_err();
        assert!(matches!(err, Error::Sort { .. }), "{err:?}");
    }

    #[test]
    fn hints_fix_free_sorts() {
        let sig = Signature::equivalence();
        let f = parse_with_hints("y = y", &sig, &[Var::class("y")]).unwrap();
        assert_eq!(f.free_vars().into_iter().next().unwrap().sort, Sort::Class);
        assert!(parse_with_hints("cl(y) = z", &sig, &[Var::class("y")]).is_err());
    }

    #[test]
    fn literals_lex() {
        let f = dlo("x < -3/4 | x = 2");
        let lits: Vec<_> = f.literals().into_iter().collect();
        assert_eq!(lits, vec![Elem::rat(-3, 4), Elem::int(2)]);
        let g = parse("x = 2.5 & cl(x) = @2", &Signature::equivalence()).unwrap();
        assert_eq!(g.literals().len(), 2);
    }

    #[test]
    fn bound_variables_shadow() {
        let f = parse("x = #0 & exists x. x = #1", &Signature::equality()).unwrap();
        assert_eq!(f.free_vars().len(), 1);
        let mut atoms = Vec::new();
        f.visit_atoms(&mut |a: &Atom| atoms.push(a.clone()));
        assert_eq!(atoms.len(), 2);
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("true -> false -> true", &Signature::equality()).unwrap();
        match f {
            Formula::Implies(l, r) => {
                assert_eq!(*l, Formula::True);
                assert!(matches!(*r, Formula::Implies(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
