mod common;

use common::fragment_net;
use gaugeforge_core::gauge::{gauges_equivalent, interleave, moderate_in, pullback, verify_gauge_axioms, Gauge};
use gaugeforge_core::index::{compose_morphisms, IndexMorphism, IndexSet};
use gaugeforge_core::netlang::{eval_big, parse, SamplingSchedule};
use gaugeforge_core::verdict::Tag;
use proptest::prelude::*;

fn interval_zoo() -> Vec<Gauge> {
    vec![Gauge::pol(), Gauge::exp(), Gauge::sharp(), Gauge::pol_even(), Gauge::const1(), Gauge::pol().moderate_closure()]
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let s = SamplingSchedule::default();
    let zoo = interval_zoo();
    let n = zoo.len();
    let mut tag = vec![vec![Tag::Inconclusive; n]; n];
    for i in 0..n {
        for j in 0..n {
            tag[i][j] = gauges_equivalent(&zoo[i], &zoo[j], &s).unwrap().tag;
        }
    }
    for i in 0..n {
        assert_eq!(tag[i][i], Tag::Holds, "{} not equivalent to itself", zoo[i].name);
        for j in 0..n {
            assert_ne!(tag[i][j], Tag::Inconclusive, "{} vs {}", zoo[i].name, zoo[j].name);
            assert_eq!(tag[i][j], tag[j][i], "{} vs {}", zoo[i].name, zoo[j].name);
            for k in 0..n {
                if tag[i][j] == Tag::Holds && tag[j][k] == Tag::Holds {
                    assert_eq!(tag[i][k], Tag::Holds, "{} ~ {} ~ {}", zoo[i].name, zoo[j].name, zoo[k].name);
                }
            }
        }
    }
    assert_eq!(tag[0][2], Tag::Holds);
    assert_eq!(tag[0][1], Tag::Fails);
}

#[test]
fn pullback_preserves_gauges() {
    let s = SamplingSchedule::default();
    let m = |e: &str| IndexMorphism::new(IndexSet::Is, IndexSet::Is, parse(e).unwrap());
    let maps = [IndexMorphism::identity(IndexSet::Is), m("eps*eps"), m("eps/2"), m("pow(eps,1/2)"), IndexMorphism::lambda(), IndexMorphism::eta()];
    for g in [Gauge::pol(), Gauge::exp(), Gauge::sharp()] {
        for f in &maps {
            let pb = pullback(&g, f).unwrap();
            let v = verify_gauge_axioms(&pb, &s);
            assert!(v.is_holds(), "{} along {}: {:?}", g.name, f.map, v);
        }
    }
}

#[test]
fn nbar_pullback_is_a_gauge() {
    let s = SamplingSchedule::default();
    let f = IndexMorphism::new(IndexSet::Is, IndexSet::NBar, parse("1/(n+1)").unwrap());
    let pb = pullback(&Gauge::pol(), &f).unwrap();
    assert_eq!(pb.index, IndexSet::NBar);
    assert!(verify_gauge_axioms(&pb, &s).is_holds());
}

#[test]
fn isomorphic_but_not_equivalent() {
    let s = SamplingSchedule::default();
    let (l, e) = (IndexMorphism::lambda(), IndexMorphism::eta());
    for c in [compose_morphisms(&l, &e).unwrap(), compose_morphisms(&e, &l).unwrap()] {
        for p in s.points() {
            let v = eval_big(&c.map, &p, 50).unwrap();
            let err = v.ln_abs_f64() - eval_big(&parse("eps").unwrap(), &p, 50).unwrap().ln_abs_f64();
            assert!(err.abs() < 1e-30, "{} at {}", c.map, p);
        }
    }
    let pb = pullback(&Gauge::exp(), &l).unwrap();
    assert!(gauges_equivalent(&pb, &Gauge::pol(), &s).unwrap().is_holds());
    let v = gauges_equivalent(&Gauge::pol(), &Gauge::exp(), &s).unwrap();
    assert!(v.is_fails());
    let failing: Vec<String> = v.leaves().into_iter().filter(|(_, l)| l.is_fails()).map(|(p, _)| p).collect();
    assert!(failing.iter().any(|p| p.contains("exp(1/eps)") || p.contains("m=1")), "{failing:?}");
}

#[test]
fn interleaving_switches_and_strictness() {
    let s = SamplingSchedule::default();
    let il = interleave(&parse("pow(eps,-1)").unwrap(), &parse("exp(1/eps)").unwrap(), 6, &s).unwrap();
    assert_eq!(il.witnesses.len(), 5);
    assert_eq!(il.switches[1], gaugeforge_core::netlang::qr(1, 10));
    assert!(il.strict.is_holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn moderate_in_is_idempotent(x in fragment_net()) {
        let s = SamplingSchedule::default();
        for g in [Gauge::pol(), Gauge::exp(), Gauge::sharp()] {
            let once = g.moderate_closure();
            let twice = once.moderate_closure();
            let a = moderate_in(&x, &g, &s).tag;
            prop_assert_eq!(a, moderate_in(&x, &once, &s).tag);
            prop_assert_eq!(a, moderate_in(&x, &twice, &s).tag);
        }
    }
}
