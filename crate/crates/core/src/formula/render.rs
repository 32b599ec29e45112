//! Canonical text form. Precedence is `!` > `&` > `|` > `->`; parentheses are
//! emitted only where re-parsing would otherwise build a different tree.

use std::fmt::{self, Display, Formatter, Write};

use super::{Atom, Formula, Term};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&v.name),
            Term::Lit(e) => write!(f, "{e}"),
            Term::Cl(t) => write!(f, "cl({t})"),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(s, t) => write!(f, "{s} = {t}"),
            Atom::Lt(s, t) => write!(f, "{s} < {t}"),
            Atom::Same(s, t) => write!(f, "E({s}, {t})"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Implication,
    Disjunction,
    Conjunction,
    Literal,
}

fn level(f: &Formula) -> Level {
    match f {
        Formula::Implies(..) | Formula::Exists(..) | Formula::Forall(..) => Level::Implication,
        Formula::Or(v) if v.len() >= 2 => Level::Disjunction,
        Formula::And(v) if v.len() >= 2 => Level::Conjunction,
        _ => Level::Literal,
    }
}

fn write_wrapped(out: &mut Formatter<'_>, f: &Formula, wrap: bool) -> fmt::Result {
    if wrap {
        out.write_char('(')?;
        write_formula(out, f)?;
        out.write_char(')')
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(g) => {
            out.write_char('!')?;
            let bare = matches!(**g, Formula::True | Formula::False | Formula::Not(_));
            write_wrapped(out, g, !bare)
        }
        Formula::And(parts) | Formula::Or(parts) if parts.len() < 2 => match parts.first() {
            None if matches!(f, Formula::And(_)) => out.write_str("true"),
            None => out.write_str("false"),
            Some(g) => write_formula(out, g),
        },
        Formula::And(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.write_str(" & ")?;
                }
                write_wrapped(out, p, level(p) < Level::Literal)?;
            }
            Ok(())
        }
        Formula::Or(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.write_str(" | ")?;
                }
                write_wrapped(out, p, level(p) < Level::Conjunction)?;
            }
            Ok(())
        }
        Formula::Implies(l, r) => {
            write_wrapped(out, l, level(l) == Level::Implication)?;
            out.write_str(" -> ")?;
            write_formula(out, r)
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            let universal = matches!(f, Formula::Forall(..));
            out.write_str(if universal { "forall " } else { "exists " })?;
            let mut cur = f;
            let mut first = true;
            loop {
                match (cur, universal) {
                    (Formula::Exists(v, body), false) | (Formula::Forall(v, body), true) => {
                        if !first {
                            out.write_str(", ")?;
                        }
                        out.write_str(&v.name)?;
                        first = false;
                        cur = body;
                    }
                    _ => break,
                }
            }
            out.write_str(". ")?;
            write_formula(out, cur)
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::{parse, Signature};

    fn round(s: &str, sig: &Signature) {
        let f = parse(s, sig).unwrap();
        assert_eq!(f.to_string(), s);
        assert_eq!(parse(&f.to_string(), sig).unwrap(), f);
    }

    #[test]
    fn canonical_forms_round_trip() {
        let dlo = Signature::dense_order();
        round("exists y. x < y & y < z", &dlo);
        round("x < 0 | 0 < x & x < 1/2", &dlo);
        round("(x < 0 | x = 1) & !(x = 2)", &dlo);
        round("x = 0 -> x < 1 -> false", &dlo);
        round("(x = 0 -> x < 1) -> false", &dlo);
        round("forall y, z. y < z -> exists w. y < w & w < z", &dlo);
        round("x = 0 & (exists y. y < x)", &dlo);
        round("!!true", &dlo);
        let erel = Signature::equivalence();
        round("E(x, 2.5) & cl(x) = @3", &erel);
    }

    #[test]
    fn not_equal_sugar_renders_negated() {
        let f = parse("x != #0", &Signature::equality()).unwrap();
        assert_eq!(f.to_string(), "!(x = #0)");
    }
}
