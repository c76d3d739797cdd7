//! The acceptance battery. Criterion 8 (byte-identical suite output) needs two
//! runs of the binary and lives in the acceptance test.

use std::collections::BTreeMap;

use gaugeforge_core::bigfloat::{BigFloat, Ctx};
use gaugeforge_core::cgf::{functor_action, functor_laws, functor_zoo, gf_derive, zoo_domain, Compact, Domain, FunctionNet, GenFuncRep};
use gaugeforge_core::embed::{approximation_order, check_embedding_diagrams, check_mollifier, fit_schedule, representative, Mollifier, MomentQuad, TestDistribution};
use gaugeforge_core::gauge::{
    check_ag1, gauges_equivalent, interleave, moderate_in_at, pullback, verify_gauge_axioms, Gauge, GaugePair,
};
use gaugeforge_core::index::{compose_morphisms, preservation_suite, sampled_big_o, symbolic_big_o, IndexMorphism, IndexSet, Statement};
use gaugeforge_core::netlang::{eval, eval_big, normalize, parse, parse_with, q, qr, Env, Expr, ParseOptions, SamplingSchedule};
use gaugeforge_core::ode::{self, Method, OdeProblem, SolutionNet, DEFAULT_STEP};
use gaugeforge_core::verdict::{Tag, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{Record, Report};

/// Seed of the random net pairs in the oracle-consistency criterion.
pub const ORACLE_SEED: u64 = 0x6761_7567_6566_6f72;
pub const ORACLE_PAIRS: usize = 500;

pub type Criterion = fn(&SamplingSchedule) -> Record;

pub const CRITERIA: [(usize, &str, Criterion); 7] = [
    (1, "gauge axioms", gauge_axioms),
    (2, "isomorphic but not equivalent", isomorphism),
    (3, "ODE transfer", ode_transfer),
    (4, "interleaving", interleaving),
    (5, "embedding", embedding),
    (6, "functor laws", functor),
    (7, "oracle consistency", oracle_consistency),
];

fn p(s: &str) -> Expr {
    parse_with(s, ParseOptions::extended()).expect("built-in expression parses")
}

fn check(name: &str, ok: bool, note: impl Into<String>) -> (String, Verdict) {
    (name.into(), Verdict::exact(ok, note))
}

pub fn gauge_axioms(sched: &SamplingSchedule) -> Record {
    let mut parts = Vec::new();
    for g in [Gauge::pol(), Gauge::exp(), Gauge::sharp(), Gauge::nbar()] {
        parts.push((format!("{} satisfies the axioms", g.name), verify_gauge_axioms(&g, sched)));
    }
    let c = verify_gauge_axioms(&Gauge::const1(), sched);
    let ii: Vec<_> = c.leaves().into_iter().filter(|(k, _)| k.starts_with("ii.")).collect();
    let fails = !ii.is_empty() && ii.iter().all(|(_, v)| v.is_fails());
    parts.push(check("{1} fails axiom (ii)", fails, "no generator of {1} tends to infinity"));
    Record::new("gauge axioms", "asymptotic gauge axioms", Verdict::all(parts))
}

fn close_to_identity(map: &Expr, sched: &SamplingSchedule) -> (bool, f64) {
    let digits = 50;
    let ctx = Ctx::from_digits(digits);
    let mut worst = f64::NEG_INFINITY;
    for pt in sched.points() {
        let Ok(v) = eval_big(map, &pt, digits) else { return (false, f64::INFINITY) };
        let e = BigFloat::from_q(&pt, ctx);
        let d = v.sub(&e, ctx);
        if !d.is_zero() {
            worst = worst.max(d.ln_abs_f64() - e.ln_abs_f64());
        }
    }
    (worst < (1e-30f64).ln(), worst)
}

pub fn isomorphism(sched: &SamplingSchedule) -> Record {
    let mut parts = Vec::new();
    let (lambda, eta) = (IndexMorphism::lambda(), IndexMorphism::eta());
    let pb = pullback(&Gauge::exp(), &lambda).expect("B_exp lives on Is");
    let members = pb.tested();
    let ok = members.len() == 6
        && members.iter().enumerate().all(|(n, m)| m.net == normalize(&Expr::eps().powi(-(n as i64 + 1))));
    parts.push(check("B_exp o lambda = {eps^-n}", ok, "normal forms of the first six generators"));
    let mut worst = f64::NEG_INFINITY;
    for (name, c) in [("lambda o eta", compose_morphisms(&lambda, &eta)), ("eta o lambda", compose_morphisms(&eta, &lambda))] {
        let (ok, w) = match c {
            Ok(c) => close_to_identity(&c.map, sched),
            Err(_) => (false, f64::INFINITY),
        };
        worst = worst.max(w);
        parts.push(check(&format!("{name} = id"), ok, "relative error below 1e-30 at 50 digits"));
    }
    let eq = gauges_equivalent(&Gauge::pol(), &Gauge::exp(), sched).expect("same index set");
    let failing: Vec<String> = eq.leaves().into_iter().filter(|(_, l)| l.is_fails()).map(|(path, _)| path).collect();
    let e1 = normalize(&p("exp(1/eps)"));
    let witness = Gauge::exp().tested().into_iter().find(|m| m.net == e1).map(|m| format!("B_exp in B_pol.{}", m.label));
    let ok = eq.is_fails() && witness.as_ref().is_some_and(|w| failing.contains(w));
    parts.push(check("R_M(B_pol) != R_M(B_exp)", ok, "exp(1/eps) is not moderate in B_pol"));
    Record::new("isomorphic but not equivalent", "isomorphism of B_pol and B_exp", Verdict::all(parts))
        .with("worst_log_relative_error", crate::report::num(worst))
        .with("failing", json!(failing))
}

pub fn ode_transfer(sched: &SamplingSchedule) -> Record {
    let mut parts = Vec::new();
    let anchor = "solvability transfer along lambda";
    let prob = OdeProblem::linear(p("1/eps"), Expr::zero(), Expr::one(), (q(-1), q(2))).expect("valid problem");
    let k = Compact::new(q(0), q(1)).expect("ordered");
    let sol = match ode::solve(&prob, sched, Method::ClosedFormLinear) {
        Ok(s) => s,
        Err(e) => return Record::caused("ODE transfer", anchor, &e, e.verdict()),
    };
    let closed = sol.closed_form().cloned();
    parts.push(check("x = exp(t/eps)", closed == Some(normalize(&p("exp(t/eps)"))), "closed form"));
    let cls = |g: Gauge, want: Tag| -> bool { ode::classify(&sol, &prob, &g, &k, sched).is_ok_and(|v| v.tag == want) };
    parts.push(check("not moderate in B_pol", cls(Gauge::pol(), Tag::Fails), "classification"));
    parts.push(check("moderate in B_exp", cls(Gauge::exp(), Tag::Holds), "classification"));
    let lam = match check_ag1(&IndexMorphism::lambda(), &Gauge::exp(), &Gauge::pol(), sched) {
        Ok(m) => m,
        Err(e) => return Record::caused("ODE transfer", anchor, &e, e.verdict()),
    };
    let moved = ode::transform(&prob, &lam);
    let ok = moved.as_ref().is_ok_and(|m| m.rhs == normalize(&p("-log(eps)*x")) && m.x0 == Expr::one() && m.t0 == Expr::zero());
    parts.push(check("transformed equation x' = -log(eps) x", ok, "substitution of lambda"));
    let tr = ode::transfer_solution(&sol, &prob, &lam, &k, sched);
    let ok = tr.as_ref().is_ok_and(|t| t.solution.closed_form() == Some(&normalize(&p("powg(eps,-t)"))) && t.target.is_holds());
    parts.push(check("transferred solution eps^-t moderate in B_pol", ok, "transfer"));
    let rk = moved.ok().and_then(|m| ode::solve(&m, sched, Method::Rk4 { h: DEFAULT_STEP }).ok());
    let at = match &rk {
        Some(SolutionNet::Numeric(ts)) => ts.iter().find(|t| t.eps == qr(1, 10)).and_then(|t| t.value_at(1.0)),
        _ => None,
    };
    let ok = at.is_some_and(|v| (v - 10.0).abs() < 1e-6);
    parts.push(check("RK4 at eps = 0.1, t = 1 gives 10", ok, "numeric cross-check"));
    Record::new("ODE transfer", anchor, Verdict::all(parts)).with("rk4_value", at.map_or(serde_json::Value::Null, crate::report::num))
}

pub fn interleaving(sched: &SamplingSchedule) -> Record {
    let anchor = "ordering of asymptotic gauges by interleaving";
    let (b1, b2) = (p("pow(eps,-1)"), p("exp(1/eps)"));
    let il = match interleave(&b1, &b2, 6, sched) {
        Ok(il) => il,
        Err(e) => return Record::caused("interleaving", anchor, &e, e.verdict()),
    };
    let mut parts = Vec::new();
    parts.push(check("five certified switch witnesses", il.witnesses.len() == 5, "directed-rounding enclosures"));
    parts.push(check("second switch at 1/10", il.switches.get(1) == Some(&qr(1, 10)), "200 < e^10"));
    parts.push(("strict inclusions".into(), il.strict.clone()));
    let ag1 = Gauge::principal("AG(b1)", b1);
    let ag3 = Gauge::principal("AG(b3)", il.net.clone());
    // past the last switch b3 = b2, so whole-schedule sampling cannot see strictness
    parts.push(("b3 not moderate in AG(b1)".into(), moderate_in_at(&il.net, &ag1, &il.high_points(), sched.digits)));
    parts.push(("b2 not moderate in AG(b3)".into(), moderate_in_at(&b2, &ag3, &il.low_points(), sched.digits)));
    let parts = parts
        .into_iter()
        .map(|(n, v)| if n.contains("not moderate") { (n, v.negate()) } else { (n, v) })
        .collect();
    let rows: Vec<_> = il.witnesses.iter().map(|w| json!({ "n": w.n, "eps": crate::report::rat(&w.eps) })).collect();
    Record::new("interleaving", anchor, Verdict::all(parts)).with("witnesses", json!(rows))
}

pub fn embedding(base: &SamplingSchedule) -> Record {
    let anchor = "embedding of distributions with hermite(3)";
    let sched = &fit_schedule().with_digits(base.digits.min(30));
    let rho = Mollifier::hermite(3);
    let b = p("1/eps");
    let k = vec![Compact::new(q(-1), q(1)).expect("ordered")];
    let mut parts = Vec::new();
    let ok = check_mollifier(&rho.rho, 3, &MomentQuad::default()).is_ok_and(|m| {
        m.moments.len() >= 4
            && m.moments.iter().all(|x| if x.k == 0 { (x.value - 1.0).abs() <= 1e-8 } else { x.k > 3 || x.value.abs() <= 1e-8 })
    });
    parts.push(check("unit mass, moments 1-3 vanish", ok, "quadrature within 1e-8"));
    for f in ["1", "x", "x*x - x", "pow(x,3) + 2*x"] {
        let ok = approximation_order(&p(f), &b, &rho, &k, sched).is_ok_and(|r| r.reproduced);
        parts.push(check(&format!("i({f}) = {f}"), ok, "reproduced within 1e-8"));
    }
    let quartic = approximation_order(&p("pow(x,4)"), &b, &rho, &k, sched);
    let exponent = quartic.as_ref().ok().and_then(|r| r.exponent);
    parts.push(check("x^4 converges with exponent >= 3.75", exponent.is_some_and(|e| e >= 3.75), "least-squares exponent"));
    let h = representative(&TestDistribution::Heaviside, &b, &rho);
    let ok = sched.points().iter().all(|pt| {
        eval(&h, &Env::<f64>::at(pt, ()).with_x(0.0), ()).is_ok_and(|v| (v - 0.5).abs() <= 1e-8)
    });
    parts.push(check("i(H)(0) = 1/2", ok, "even mollifier"));
    let sample = [TestDistribution::Delta, TestDistribution::Heaviside, TestDistribution::Smooth(p("sin(x)"))];
    match check_embedding_diagrams(&sample, &b, &rho, None, &k, sched) {
        Ok(d) => {
            let delta_exact = d.checks.iter().any(|c| c.name == "derivation[delta]" && c.exact && c.verdict.is_holds());
            parts.push(check("derivation square exact for delta", delta_exact, "symbolic equality"));
            parts.push(("derivation squares and i(f) = f".into(), d.verdict));
        }
        Err(e) => parts.push(check("derivation squares", false, e.to_string())),
    }
    Record::new("embedding", anchor, Verdict::all(parts)).with("x4_exponent", exponent.map_or(serde_json::Value::Null, crate::report::num))
}

pub fn functor(sched: &SamplingSchedule) -> Record {
    let anchor = "functoriality of the algebra construction";
    let zoo = match functor_zoo(sched) {
        Ok(z) => z,
        Err(e) => return Record::caused("functor laws", anchor, &e, e.verdict()),
    };
    let mut parts = vec![check("zoo has at least 20 cases", zoo.len() >= 20, format!("{} cases", zoo.len()))];
    parts.push(check("zoo includes lambda/eta", zoo.iter().any(|c| c.name.starts_with("lambda then eta")), "composable pair"));
    for c in &zoo {
        let v = functor_laws(c, sched).unwrap_or_else(|e| Verdict::exact(false, e.to_string()));
        parts.push((c.name.clone(), v));
    }
    let pol = Gauge::pol();
    let (omega, ks) = zoo_domain();
    let square = check_ag1(&IndexMorphism::identity(IndexSet::Is), &pol, &pol, sched).ok().and_then(|id| {
        let big = Domain::interval(q(0), q(2));
        let u = GenFuncRep::new(FunctionNet::new(p("x*x"), big), GaugePair::diagonal(pol.clone()), vec![Compact::new(qr(1, 2), qr(3, 2)).ok()?], 2, sched).ok()?;
        let a = gf_derive(&functor_action(&id, &Expr::x(), omega.clone(), ks.clone(), &u, sched).ok()?, sched).ok()?;
        let b = functor_action(&id, &Expr::x(), omega, ks, &gf_derive(&u, sched).ok()?, sched).ok()?;
        Some(normalize(&a.net.u) == normalize(&b.net.u))
    });
    parts.push(check("derivation square for (0,1) in (0,2)", square == Some(true), "exact after normalization"));
    Record::new("functor laws", anchor, Verdict::all(parts)).with("cases", json!(zoo.len()))
}

fn random_monomial(rng: &mut ChaCha8Rng) -> Expr {
    let c = qr(rng.random_range(1..=4), rng.random_range(1..=3));
    let a = qr(rng.random_range(-4..=4), rng.random_range(1..=2));
    let b: i64 = rng.random_range(-2..=2);
    let e: i64 = rng.random_range(-2..=2);
    let mut m = Expr::constant(c).mul(Expr::eps().pow(a));
    if b != 0 {
        m = m.mul(Expr::eps().log().neg().pow(q(b)));
    }
    if e != 0 {
        m = m.mul(Expr::int(e).div(Expr::eps()).exp());
    }
    m
}

/// Sums of one to three monomials `C·ε^a·(−log ε)^b·e^{c/ε}`.
pub fn random_fragment_net(rng: &mut ChaCha8Rng) -> Expr {
    let n = rng.random_range(1..=3);
    let mut e = random_monomial(rng);
    for _ in 1..n {
        e = e.add(random_monomial(rng));
    }
    e
}

/// Index maps of the example zoo.
pub fn zoo_morphisms() -> Vec<(&'static str, IndexMorphism)> {
    let m = |s: &str| IndexMorphism::new(IndexSet::Is, IndexSet::Is, parse(s).expect("zoo map parses"));
    vec![
        ("identity", IndexMorphism::identity(IndexSet::Is)),
        ("eps^2", m("eps*eps")),
        ("eps^3", m("pow(eps,3)")),
        ("eps/2", m("eps/2")),
        ("eps^(1/2)", m("pow(eps,1/2)")),
        ("lambda", IndexMorphism::lambda()),
        ("eta", IndexMorphism::eta()),
    ]
}

pub fn oracle_consistency(sched: &SamplingSchedule) -> Record {
    let anchor = "preservation of asymptotic statements by index morphisms";
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let pts = sched.points();
    let mut contradictions = Vec::new();
    let mut undecided = 0usize;
    let mut stored = Vec::new();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..ORACLE_PAIRS {
        let (x, y) = (random_fragment_net(&mut rng), random_fragment_net(&mut rng));
        let Some(sym) = symbolic_big_o(&x, &y) else {
            undecided += 1;
            continue;
        };
        let smp = sampled_big_o(&x, &y, &IndexSet::Is, &pts, sched.digits, pts.len() / 2);
        *counts.entry(smp.tag.as_str()).or_default() += 1;
        if matches!((sym.tag, smp.tag), (Tag::Holds, Tag::Fails) | (Tag::Fails, Tag::Holds)) {
            contradictions.push(format!("{x} = O({y})"));
        }
        if sym.is_holds() {
            stored.push((format!("pair {i}"), Statement::BigO { x, y }));
        }
    }
    let mut parts = vec![
        check("every pair decided symbolically", undecided == 0, format!("{undecided} undecided")),
        check("symbolic never contradicts sampled", contradictions.is_empty(), format!("{} contradictions", contradictions.len())),
    ];
    for (name, f) in zoo_morphisms() {
        let rep = preservation_suite(&f, &stored, sched);
        parts.push((format!("Holds-verdicts transported along {name}"), rep.verdict));
    }
    Record::new("oracle consistency", anchor, Verdict::all(parts))
        .with("pairs", json!(ORACLE_PAIRS))
        .with("stored_holds", json!(stored.len()))
        .with("sampled_tags", json!(counts))
        .with("contradictions", json!(contradictions))
}

/// Runs criteria 1-7 on the default schedule.
pub fn run(digits: u32) -> Report {
    let sched = SamplingSchedule::default().with_digits(digits);
    let mut config = BTreeMap::new();
    config.insert("precision".into(), digits.to_string());
    config.insert("oracle_seed".into(), ORACLE_SEED.to_string());
    let mut rep = Report::new("suite", config);
    for (n, title, f) in CRITERIA {
        let mut r = f(&sched);
        r.name = format!("criterion {n}: {title}");
        rep.push(r);
    }
    rep
}
