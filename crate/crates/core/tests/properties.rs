use std::cmp::Ordering;

use abrd_core::brauer::{normal_form, same_class, scalar_power};
use abrd_core::fp;
use abrd_core::valgroup::{lattice_canonicalize, lattice_index, lattice_intersect, lex_compare, q};
use abrd_core::{Lattice, SymbolSum, ValueVector};
use proptest::prelude::*;

const N: usize = 3;

fn vector() -> impl Strategy<Value = ValueVector> {
    prop::collection::vec((-6i64..=6, prop::sample::select(vec![1i64, 2, 3, 4, 9])), N)
        .prop_map(|cs| ValueVector::new(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
}

fn lattice() -> impl Strategy<Value = Lattice> {
    prop::collection::vec(vector(), 0..4).prop_map(|g| lattice_canonicalize(N, &g).unwrap())
}

fn monomial(vars: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::collection::vec(-3i32..=3, vars.len()).prop_map(move |es| {
        let parts: Vec<String> = vars
            .iter()
            .zip(es)
            .filter(|(_, e)| *e != 0)
            .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        if parts.is_empty() { "1".into() } else { parts.join("*") }
    })
}

const VARS: &[&str] = &["a", "b", "c"];

/// Random Artin–Schreier symbol sums over `F_p(a, b, c)`.
fn symbol_sum(p: u32) -> impl Strategy<Value = SymbolSum> {
    let slot1 = prop::collection::vec((1..p, monomial(VARS)), 1..3)
        .prop_map(|ts| ts.into_iter().map(|(c, m)| format!("{c}*{m}")).collect::<Vec<_>>().join(" + "));
    let term = (1..p, slot1, monomial(VARS)).prop_map(|(k, s1, s2)| format!("{k}*[{s1}, {s2})"));
    prop::collection::vec(term, 1..4).prop_map(move |ts| SymbolSum::parse(p, &ts.join(" + ")).unwrap())
}

proptest! {
    #[test]
    fn canonical_form_ignores_generator_order(mut g in prop::collection::vec(vector(), 0..4)) {
        let a = lattice_canonicalize(N, &g).unwrap();
        g.reverse();
        prop_assert_eq!(&a, &lattice_canonicalize(N, &g).unwrap());
        prop_assert_eq!(&a, &lattice_canonicalize(N, a.basis()).unwrap());
    }

    #[test]
    fn intersection_is_contained_and_maximal(l in lattice(), m in lattice()) {
        let i = lattice_intersect(&l, &m).unwrap();
        prop_assert!(l.contains_lattice(&i) && m.contains_lattice(&i));
        prop_assert_eq!(&i, &lattice_intersect(&m, &l).unwrap());
        // every generator of l lying in m lies in the intersection
        for b in l.basis() {
            if m.contains(b) {
                prop_assert!(i.contains(b));
            }
        }
    }

    #[test]
    fn index_is_multiplicative(l in lattice(), m in lattice()) {
        let s = l.sum(&m).unwrap();
        let z = Lattice::integer(N);
        let whole = lattice_index(&s, &z).unwrap();
        prop_assert_eq!(whole, lattice_index(&s, &l).unwrap() * lattice_index(&l, &z).unwrap());
    }

    #[test]
    fn index_matches_determinant(l in lattice()) {
        let idx = lattice_index(&l, &Lattice::integer(N)).unwrap();
        let d = l.determinant();
        let d = if d < q(0, 1) { -d } else { d };
        prop_assert_eq!(q(1, 1) / d, q(idx as i64, 1));
    }

    #[test]
    fn lex_order_is_total_and_translation_invariant(u in vector(), v in vector(), w in vector()) {
        let o = lex_compare(&u, &v).unwrap();
        prop_assert_eq!(o.reverse(), lex_compare(&v, &u).unwrap());
        prop_assert_eq!(o == Ordering::Equal, u == v);
        prop_assert_eq!(o, lex_compare(&(&u + &w), &(&v + &w)).unwrap());
    }

    #[test]
    fn lex_order_reads_outermost_coordinate_first(u in vector(), v in vector()) {
        let last = u.coords()[N - 1].cmp(&v.coords()[N - 1]);
        if last != Ordering::Equal {
            prop_assert_eq!(lex_compare(&u, &v).unwrap(), last);
        }
    }

    #[test]
    fn fp_inverse(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), a in 1u32..1000) {
        let a = a % p;
        prop_assume!(a != 0);
        let b = fp::inv(a, p).unwrap();
        prop_assert_eq!(fp::mul(a, b, p), 1);
        prop_assert_eq!(fp::pow(a, (p - 1) as u64, p), 1);
    }

    #[test]
    fn normal_form_is_idempotent(s in symbol_sum(3)) {
        let nf = normal_form(&s).unwrap();
        prop_assert_eq!(&nf, &normal_form(&nf).unwrap());
        prop_assert!(same_class(&s, &nf).unwrap());
    }

    #[test]
    fn display_round_trips(s in symbol_sum(5)) {
        prop_assert_eq!(&SymbolSum::parse(5, &s.to_string()).unwrap(), &s);
    }

    #[test]
    fn exponent_divides_p(s in symbol_sum(3)) {
        prop_assert!(scalar_power(&s, 3).unwrap().is_empty());
        let inv = scalar_power(&s, -1).unwrap();
        prop_assert!(normal_form(&s.plus(&inv)).unwrap().is_empty());
    }

    #[test]
    fn scalar_powers_add(s in symbol_sum(5), a in 0i64..5, b in 0i64..5) {
        let lhs = scalar_power(&s, a).unwrap().plus(&scalar_power(&s, b).unwrap());
        prop_assert!(same_class(&lhs, &scalar_power(&s, a + b).unwrap()).unwrap());
    }

    #[test]
    fn class_sum_commutes(s in symbol_sum(3), t in symbol_sum(3)) {
        prop_assert!(same_class(&s.plus(&t), &t.plus(&s)).unwrap());
    }
}
