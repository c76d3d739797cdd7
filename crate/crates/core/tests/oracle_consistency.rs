mod common;

use common::{fragment_net, index_map};
use gaugeforge_core::index::{check_morphism, compose_morphisms, preservation_suite, sampled_big_o, symbolic_big_o, IndexMorphism, IndexSet, Statement};
use gaugeforge_core::netlang::{eval_big, fragment_terms, normalize, parse, Expr, SamplingSchedule};
use gaugeforge_core::verdict::Tag;
use proptest::prelude::*;

fn contradicts(a: Tag, b: Tag) -> bool {
    matches!((a, b), (Tag::Holds, Tag::Fails) | (Tag::Fails, Tag::Holds))
}

fn pointwise_equal(a: &Expr, b: &Expr, sched: &SamplingSchedule) -> bool {
    sched.points().iter().all(|p| {
        let (x, y) = (eval_big(a, p, 40).unwrap(), eval_big(b, p, 40).unwrap());
        (x.ln_abs_f64() - y.ln_abs_f64()).abs() < 1e-25
    })
}

fn morphism(map: Expr) -> IndexMorphism {
    IndexMorphism::new(IndexSet::Is, IndexSet::Is, map)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn symbolic_never_contradicts_sampled(x in fragment_net(), y in fragment_net()) {
        let sched = SamplingSchedule::default();
        let pts = sched.points();
        let sym = symbolic_big_o(&x, &y);
        prop_assert!(sym.is_some(), "fragment pair not decided symbolically: {} {}", x, y);
        let sym = sym.unwrap();
        let smp = sampled_big_o(&x, &y, &IndexSet::Is, &pts, sched.digits, pts.len() / 2);
        prop_assert!(!contradicts(sym.tag, smp.tag), "{} = O({}): symbolic {:?}, sampled {:?}", x, y, sym, smp);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn composition_is_associative(f in index_map(), g in index_map(), h in index_map()) {
        let sched = SamplingSchedule::default();
        let (f, g, h) = (morphism(f), morphism(g), morphism(h));
        for m in [&f, &g, &h] {
            prop_assert!(check_morphism(m, &sched).unwrap().is_holds(), "{}", m.map);
        }
        let left = compose_morphisms(&compose_morphisms(&f, &g).unwrap(), &h).unwrap();
        let right = compose_morphisms(&f, &compose_morphisms(&g, &h).unwrap()).unwrap();
        // outside the growth fragment equal maps need not share a normal form
        if [&f, &g, &h].iter().all(|m| fragment_terms(&m.map).is_some()) {
            prop_assert_eq!(normalize(&left.map), normalize(&right.map));
        }
        prop_assert!(pointwise_equal(&left.map, &right.map, &sched));
    }

    #[test]
    fn identity_is_neutral(f in index_map()) {
        let sched = SamplingSchedule::default();
        let f = morphism(f);
        let id = IndexMorphism::identity(IndexSet::Is);
        let a = compose_morphisms(&id, &f).unwrap();
        let b = compose_morphisms(&f, &id).unwrap();
        prop_assert!(pointwise_equal(&a.map, &f.map, &sched));
        prop_assert!(pointwise_equal(&b.map, &f.map, &sched));
    }

    #[test]
    fn symbolic_holds_survive_transport(x in fragment_net(), y in fragment_net(), f in index_map()) {
        let sched = SamplingSchedule::default();
        let f = morphism(f);
        let st = Statement::BigO { x, y };
        let (before, _) = st.run(&IndexSet::Is, &sched);
        prop_assume!(before.is_holds() && before.is_symbolic());
        let rep = preservation_suite(&f, &[("bigo".into(), st)], &sched);
        prop_assert!(rep.verdict.is_holds(), "{:?}", rep);
    }
}

#[test]
fn lambda_and_eta_are_inverse() {
    let sched = SamplingSchedule::default();
    let lam = IndexMorphism::lambda();
    let eta = IndexMorphism::eta();
    for (a, b) in [(&lam, &eta), (&eta, &lam)] {
        let c = compose_morphisms(a, b).unwrap();
        for p in sched.points() {
            let v = eval_big(&c.map, &p, 50).unwrap();
            let diff = v.sub(&gaugeforge_core::bigfloat::BigFloat::from_q(&p, gaugeforge_core::bigfloat::Ctx::from_digits(60)), gaugeforge_core::bigfloat::Ctx::from_digits(60));
            assert!(diff.is_zero() || diff.ln_abs_f64() < -30.0 * core::f64::consts::LN_10, "{}", c.map);
        }
    }
    assert_eq!(normalize(&compose_morphisms(&lam, &eta).unwrap().map), parse("eps").unwrap());
}
