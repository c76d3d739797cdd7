use gaugeforge_core::cgf::{functor_action, functor_laws, functor_zoo, gf_add, gf_derive, gf_mul, zoo_domain, FunctionNet, GenFuncRep};
use gaugeforge_core::gauge::{check_ag1, Gauge, GaugePair};
use gaugeforge_core::index::{IndexMorphism, IndexSet};
use gaugeforge_core::netlang::{normalize, parse_with, ParseOptions, SamplingSchedule};

fn p(s: &str) -> gaugeforge_core::netlang::Expr {
    parse_with(s, ParseOptions::extended()).unwrap()
}

#[test]
fn functor_laws_on_the_zoo() {
    let s = SamplingSchedule::default();
    let zoo = functor_zoo(&s).unwrap();
    assert!(zoo.len() >= 20);
    assert!(zoo.iter().any(|c| c.name.starts_with("lambda then eta")));
    for c in &zoo {
        let v = functor_laws(c, &s).unwrap();
        assert!(v.is_holds(), "{}: {:?}", c.name, v);
    }
}

#[test]
fn sums_and_products_stay_moderate() {
    let s = SamplingSchedule::default();
    let (omega, ks) = zoo_domain();
    let reps = ["sin(x)*pow(eps,-2)", "exp(x)/eps + x*x", "x", "cos(x/eps)", "log(1 + x)*pow(eps,-1/2)"];
    for g in [Gauge::pol(), Gauge::exp()] {
        let pair = GaugePair::diagonal(g);
        let all: Vec<GenFuncRep> = reps.iter().map(|r| GenFuncRep::new(FunctionNet::new(p(r), omega.clone()), pair.clone(), ks.clone(), 2, &s).unwrap()).collect();
        for a in &all {
            for b in &all {
                assert!(gf_add(a, b, &s).unwrap().moderate.is_holds());
                assert!(gf_mul(a, b, &s).unwrap().moderate.is_holds());
            }
        }
    }
}

#[test]
fn derivative_commutes_with_inclusions() {
    let s = SamplingSchedule::default();
    let pol = Gauge::pol();
    let id = check_ag1(&IndexMorphism::identity(IndexSet::Is), &pol, &pol, &s).unwrap();
    let (omega, ks) = zoo_domain();
    for r in ["x*x", "sin(x)*pow(eps,-2)", "exp(x)/eps + x"] {
        let u = GenFuncRep::new(FunctionNet::new(p(r), omega.clone()), GaugePair::diagonal(pol.clone()), ks.clone(), 2, &s).unwrap();
        let a = gf_derive(&functor_action(&id, &p("x"), omega.clone(), ks.clone(), &u, &s).unwrap(), &s).unwrap();
        let b = functor_action(&id, &p("x"), omega.clone(), ks.clone(), &gf_derive(&u, &s).unwrap(), &s).unwrap();
        assert_eq!(normalize(&a.net.u), normalize(&b.net.u), "{r}");
    }
}
