use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use thornlab::definable::{k_inconsistent, Family};
use thornlab::theory::{enumerate_types, holds, qe, satisfies};
use thornlab::{Elem, Formula, Sort, Term, Theory, Var};

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn element(theory: Theory) -> BoxedStrategy<Elem> {
    match theory {
        Theory::Eq => (0u64..4).prop_map(Elem::Nat).boxed(),
        Theory::Dlo => (-2i64..4, prop_oneof![Just(1i64), Just(2)]).prop_map(|(p, q)| Elem::rat(p, q)).boxed(),
        Theory::Erel => (0u64..3, 0u64..3).prop_map(|(i, j)| Elem::Pair(i, j)).boxed(),
    }
}

fn elem_term(theory: Theory) -> BoxedStrategy<Term> {
    prop_oneof![
        2 => prop::sample::select(&NAMES[..]).prop_map(|n| Term::var(&Var::elem(n))),
        1 => element(theory).prop_map(Term::Lit),
    ]
    .boxed()
}

fn class_term() -> BoxedStrategy<Term> {
    prop_oneof![
        prop::sample::select(&NAMES[..]).prop_map(|n| Term::cl(Term::var(&Var::elem(n)))),
        (0u64..3).prop_map(|c| Term::Lit(Elem::Class(c))),
    ]
    .boxed()
}

fn atom(theory: Theory) -> BoxedStrategy<Formula> {
    let pair = (elem_term(theory), elem_term(theory));
    match theory {
        Theory::Eq => pair.prop_map(|(s, t)| Formula::eq(s, t)).boxed(),
        Theory::Dlo => prop_oneof![
            pair.clone().prop_map(|(s, t)| Formula::eq(s, t)),
            pair.prop_map(|(s, t)| Formula::lt(s, t)),
        ]
        .boxed(),
        Theory::Erel => prop_oneof![
            pair.clone().prop_map(|(s, t)| Formula::eq(s, t)),
            pair.prop_map(|(s, t)| Formula::same(s, t)),
            (class_term(), class_term()).prop_map(|(s, t)| Formula::eq(s, t)),
        ]
        .boxed(),
    }
}

/// Formulas in `x, y, z, w` with quantifier depth at most three.
fn formula(theory: Theory) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![8 => atom(theory), 1 => Just(Formula::True), 1 => Just(Formula::False)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        let var = prop::sample::select(&NAMES[..]).prop_map(Var::elem);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and([a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or([a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (var, inner).prop_map(|(v, b)| Formula::forall(v, b)),
        ]
    })
    .boxed()
}

fn theory() -> impl Strategy<Value = Theory> {
    prop::sample::select(&Theory::ALL[..])
}

fn with_formula() -> impl Strategy<Value = (Theory, Formula, Vec<Elem>)> {
    theory().prop_flat_map(|t| (Just(t), formula(t), prop::collection::vec(element(t), 4)))
}

fn free_in_order(f: &Formula) -> Vec<Var> {
    f.free_vars().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rendering_round_trips((t, f, _) in with_formula()) {
        let text = f.to_string();
        let back = t.parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, f);
    }

    #[test]
    fn qe_is_quantifier_free_and_equivalent((t, f, vals) in with_formula()) {
        let g = qe(t, &f).unwrap();
        prop_assert!(g.is_quantifier_free(), "{}", g);
        prop_assert!(g.free_vars().is_subset(&f.free_vars()));
        let vars = free_in_order(&f);
        let vals = &vals[..vars.len()];
        prop_assert_eq!(satisfies(t, &f, &vars, vals).unwrap(), satisfies(t, &g, &vars, vals).unwrap());
    }

    #[test]
    fn ground_instances_agree_with_assignments((t, f, vals) in with_formula()) {
        let vars = free_in_order(&f);
        let vals = &vals[..vars.len()];
        let ground = f.instantiate(&vars, vals);
        prop_assert!(ground.free_vars().is_empty());
        prop_assert_eq!(holds(t, &ground).unwrap(), satisfies(t, &f, &vars, vals).unwrap());
    }

    #[test]
    fn substitution_composes((t, f, vals) in with_formula()) {
        // [x := y] then [y := c] is [x := c, y := c]
        let (x, y) = (Var::elem("x"), Var::elem("y"));
        let c = Term::Lit(vals[0].clone());
        let step = f
            .substitute(&BTreeMap::from([(x.clone(), Term::var(&y))]))
            .unwrap()
            .substitute(&BTreeMap::from([(y.clone(), c.clone())]))
            .unwrap();
        let both = f.substitute(&BTreeMap::from([(x.clone(), c.clone()), (y.clone(), c)])).unwrap();
        prop_assert!(!step.free_vars().contains(&x) && !step.free_vars().contains(&y));
        prop_assert_eq!(step.free_vars(), both.free_vars());
        let rest = free_in_order(&step);
        let vals = &vals[1..1 + rest.len()];
        prop_assert_eq!(satisfies(t, &step, &rest, vals).unwrap(), satisfies(t, &both, &rest, vals).unwrap());
    }

    #[test]
    fn substitution_removes_exactly_the_replaced_variable((t, f, vals) in with_formula()) {
        let x = Var::elem("x");
        let g = f.substitute(&BTreeMap::from([(x.clone(), Term::Lit(vals[0].clone()))])).unwrap();
        let mut expected = f.free_vars();
        expected.remove(&x);
        prop_assert_eq!(g.free_vars(), expected);
        let _ = t;
    }

    #[test]
    fn types_partition_the_tuples(
        t in theory(),
        arity in 1usize..3,
        base_size in 0usize..3,
        seed in prop::collection::vec(0u64..3, 6),
        class_first in any::<bool>(),
    ) {
        let base: Vec<Elem> = seed[..base_size]
            .iter()
            .zip(&seed[3..])
            .map(|(i, j)| match t {
                Theory::Eq => Elem::Nat(*i + *j),
                Theory::Dlo => Elem::rat(*i as i64 - *j as i64, 1),
                Theory::Erel => Elem::Pair(*i, *j),
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut sorts = vec![Sort::Element; arity];
        if t == Theory::Erel && class_first {
            sorts[0] = Sort::Class;
        }
        let vars = thornlab::formula::tuple_vars("x", &sorts);
        let types = enumerate_types(t, &vars, &base);
        let named: BTreeSet<Elem> = base.iter().cloned().collect();
        for rep in t.tuple_reps(&sorts, &named) {
            let hits = types.iter().filter(|p| satisfies(t, &p.formula, &vars, &rep).unwrap()).count();
            prop_assert_eq!(hits, 1, "{:?}", rep);
        }
        for p in &types {
            prop_assert!(types.iter().filter(|q| *q == p).count() == 1);
        }
    }

    #[test]
    fn k_inconsistency_is_monotone_and_matches_its_sentence(
        (t, delta, pi) in theory().prop_flat_map(|t| (Just(t), atom(t), atom(t))),
    ) {
        let (x, y) = (Var::elem("x"), Var::elem("y"));
        let onto = |f: &Formula, from: &[&str], to: &Var| {
            let map = from.iter().map(|n| (Var::elem(n), Term::var(to))).collect::<BTreeMap<_, _>>();
            f.substitute(&map).unwrap()
        };
        let delta = onto(&delta, &["z", "w"], &y);
        let pi = onto(&pi, &["x", "z", "w"], &y);
        // inconsistent Π is rejected up front
        let fam = Family::new(t, vec![x], vec![y], delta, pi);
        prop_assume!(fam.is_ok());
        let fam = fam.unwrap();
        let mut before = false;
        for k in 1..=4 {
            let now = k_inconsistent(&fam, k).unwrap();
            prop_assert!(!before || now, "k-inconsistent at {} but not at {}", k - 1, k);
            before = now;
        }
        for k in 1..=3 {
            let sentence = fam.k_inconsistency_sentence(k);
            prop_assert_eq!(k_inconsistent(&fam, k).unwrap(), !holds(t, &sentence).unwrap());
        }
    }
}
