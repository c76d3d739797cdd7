//! One function per subcommand; each returns a report or a usage/config error.

use std::collections::BTreeMap;
use std::path::Path;

use gaugeforge_core::cgf::{Compact, Domain};
use gaugeforge_core::embed::{
    approximation_order, check_embedding_diagrams, check_mollifier, embed, fit_schedule, EmbedOptions, Mollifier, MomentQuad, TestDistribution,
};
use gaugeforge_core::gauge::{check_ag1, gauges_equivalent, interleave, verify_gauge_axioms, Gauge, GaugeError, GaugeMorphism};
use gaugeforge_core::index::{check_morphism, IndexMorphism, IndexSet};
use gaugeforge_core::netlang::print::rational_string;
use gaugeforge_core::netlang::{Expr, SamplingSchedule};
use gaugeforge_core::ode::{self, Method, OdeError, OdeProblem, SolutionNet, DEFAULT_STEP};
use gaugeforge_core::verdict::{Evidence, Verdict};
use serde_json::{json, Value};

use crate::config::{expr, index_set, rational, ProblemFile, RunConfig};
use crate::error::CliError;
use crate::report::{num, rat, Record, Report};

/// Resolved configuration shared by every command.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: RunConfig,
    pub sched: SamplingSchedule,
    /// Set when the schedule came from a flag or the config file.
    pub explicit_schedule: bool,
}

impl Context {
    pub fn new(config: RunConfig, sched: SamplingSchedule, explicit_schedule: bool) -> Self {
        Context { config, sched, explicit_schedule }
    }

    fn report(&self, command: &str, extra: &[(&str, String)]) -> Report {
        let mut echo = BTreeMap::new();
        echo.insert("schedule.eps0".into(), rational_string(&self.sched.eps0));
        echo.insert("schedule.ratio".into(), rational_string(&self.sched.ratio));
        echo.insert("schedule.count".into(), self.sched.count.to_string());
        echo.insert("precision".into(), self.sched.digits.to_string());
        for (k, v) in extra {
            echo.insert((*k).into(), v.clone());
        }
        Report::new(command, echo)
    }
}

/// Errors that come from the user's input become exit code 2; the rest are verdicts.
fn gauge_error(name: &str, anchor: &str, e: GaugeError) -> Result<Record, CliError> {
    Ok(match e {
        GaugeError::Mismatch(s) => return Err(CliError::Usage(format!("index-set mismatch: {s}"))),
        GaugeError::DepthLimit(_) => Record::new(name, anchor, Verdict::inconclusive(Evidence::Exact { note: e.to_string() })),
        _ => Record::caused(name, anchor, &e, e.verdict()),
    })
}

fn compact(s: &str) -> Result<Compact, CliError> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| CliError::Usage(format!("compact set `{s}` must be lo,hi")))?;
    Compact::new(rational(lo)?, rational(hi)?).map_err(|e| CliError::Usage(e.to_string()))
}

fn members(g: &Gauge) -> Value {
    Value::Array(g.tested().into_iter().map(|m| json!({ "label": m.label, "net": m.net.to_string() })).collect())
}

pub fn check_gauge(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let g = ctx.config.gauge(name)?;
    let mut rep = ctx.report("check-gauge", &[("gauge", name.into())]);
    let v = verify_gauge_axioms(&g, &ctx.sched);
    rep.push(Record::new(format!("axioms of {}", g.name), "gauge axioms (i)-(v)", v).with("index", json!(g.index.name())).with("generators", members(&g)));
    Ok(rep)
}

pub fn morphism(ctx: &Context, map: &str, from: &str, to: &str, gauges: Option<(&str, &str)>) -> Result<Report, CliError> {
    let f = IndexMorphism::new(index_set(from)?, index_set(to)?, named_map(map)?);
    let mut extra = vec![("map", map.to_string()), ("from", from.to_string()), ("to", to.to_string())];
    if let Some((a, b)) = gauges {
        extra.push(("source-gauge", a.into()));
        extra.push(("target-gauge", b.into()));
    }
    let mut rep = ctx.report("morphism", &extra);
    let name = format!("{} : {} -> {}", f.map, f.source.name(), f.target.name());
    match check_morphism(&f, &ctx.sched) {
        Ok(v) => rep.push(Record::new(name, "index morphism criterion", v)),
        Err(e) => rep.push(Record::caused(name, "index morphism criterion", &e, None)),
    }
    if let Some((a, b)) = gauges {
        let (ga, gb) = (ctx.config.gauge(a)?, ctx.config.gauge(b)?);
        let name = format!("{} in Ag1({}, {})", f.map, ga.name, gb.name);
        let anchor = "asymptotic gauge morphism";
        match check_ag1(&f, &ga, &gb, &ctx.sched) {
            Ok(gm) => rep.push(Record::new(name, anchor, gm.record)),
            Err(e) => rep.push(gauge_error(&name, anchor, e)?),
        }
    }
    Ok(rep)
}

fn named_map(s: &str) -> Result<Expr, CliError> {
    Ok(match s {
        "lambda" => IndexMorphism::lambda().map,
        "eta" => IndexMorphism::eta().map,
        "id" | "identity" => Expr::eps(),
        _ => expr(s)?,
    })
}

pub fn equiv(ctx: &Context, b1: &str, b2: &str) -> Result<Report, CliError> {
    let (g1, g2) = (ctx.config.gauge(b1)?, ctx.config.gauge(b2)?);
    let mut rep = ctx.report("equiv", &[("b1", b1.into()), ("b2", b2.into())]);
    let name = format!("R_M({}) = R_M({})", g1.name, g2.name);
    let anchor = "equivalence of gauges";
    match gauges_equivalent(&g1, &g2, &ctx.sched) {
        Ok(v) => {
            let witnesses: Vec<Value> = v.leaves().into_iter().filter(|(_, l)| l.is_fails()).map(|(p, _)| json!(p)).collect();
            rep.push(Record::new(name, anchor, v).with("failing", Value::Array(witnesses)));
        }
        Err(e) => rep.push(gauge_error(&name, anchor, e)?),
    }
    Ok(rep)
}

pub fn interleave_cmd(ctx: &Context, b1: &str, b2: &str, depth: usize) -> Result<Report, CliError> {
    let (e1, e2) = (expr(b1)?, expr(b2)?);
    let mut rep = ctx.report("interleave", &[("b1", b1.into()), ("b2", b2.into()), ("depth", depth.to_string())]);
    let anchor = "ordering of asymptotic gauges by interleaving";
    match interleave(&e1, &e2, depth, &ctx.sched) {
        Ok(il) => {
            let rows: Vec<Value> = il
                .witnesses
                .iter()
                .map(|w| json!({ "n": w.n, "eps": rat(&w.eps), "lhs_upper": w.lhs_hi, "rhs_lower": w.rhs_lo }))
                .collect();
            let switches: Vec<Value> = il.switches.iter().map(rat).collect();
            let exact = Verdict::exact(true, "n*b1(e_n)^n < b2(e_n) certified with directed rounding");
            rep.push(Record::new("switch witnesses", anchor, exact).with("witnesses", Value::Array(rows)).with("switches", Value::Array(switches)));
            rep.push(Record::new("strict inclusions AG(b1) < AG(b3) < AG(b2)", anchor, il.strict));
        }
        Err(e) => rep.push(gauge_error("interleaving", anchor, e)?),
    }
    Ok(rep)
}

pub struct EmbedArgs<'a> {
    pub dist: &'a str,
    pub generator: &'a str,
    pub mollifier: Option<&'a str>,
    pub k: Option<&'a str>,
    pub max_order: usize,
}

pub fn embed_cmd(ctx: &Context, a: &EmbedArgs) -> Result<Report, CliError> {
    let t = TestDistribution::parse(a.dist).ok_or_else(|| CliError::Usage(format!("unknown distribution `{}`", a.dist)))?;
    let b = expr(a.generator)?;
    let rho = ctx.config.mollifier(a.mollifier)?;
    // exponent fits need a finer schedule than the decade default
    let fit = if ctx.explicit_schedule { ctx.sched.clone() } else { fit_schedule().with_digits(ctx.sched.digits) };
    let mut opts = EmbedOptions { max_order: a.max_order, sched: ctx.sched.clone(), ..EmbedOptions::default() };
    if let Some(k) = a.k {
        opts.ks = vec![compact(k)?];
    }
    let mut rep = ctx.report(
        "embed",
        &[("distribution", t.label()), ("generator", b.to_string()), ("mollifier", a.mollifier.unwrap_or("config/default").into()), ("K", opts.ks[0].label())],
    );
    rep.push(mollifier_record(&rho)?);

    let anchor = "embedding of distributions";
    match embed(&t, &b, &rho, Domain::real_line(), &opts) {
        Ok(u) => rep.push(Record::new(format!("i({})", t.label()), anchor, u.moderate.clone()).with("representative", json!(u.net.u.to_string()))),
        Err(e) => rep.push(Record::caused(format!("i({})", t.label()), anchor, &e, e.verdict())),
    }
    match check_embedding_diagrams(std::slice::from_ref(&t), &b, &rho, None, &opts.ks, &fit) {
        Ok(d) => {
            let exact: Vec<Value> = d.checks.iter().map(|c| json!({ "name": c.name, "exact": c.exact })).collect();
            rep.push(Record::new("embedding diagrams", "derivation square and i(f) = f", d.verdict).with("checks", Value::Array(exact)));
        }
        Err(e) => rep.push(Record::caused("embedding diagrams", "derivation square and i(f) = f", &e, e.verdict())),
    }
    if let TestDistribution::Smooth(f) = &t {
        match approximation_order(f, &b, &rho, &opts.ks, &fit) {
            Ok(r) => {
                let sups: Vec<Value> = r.sups.iter().map(|(e, s)| json!({ "eps": num(*e), "sup": num(*s) })).collect();
                let exponent = r.exponent.map_or(Value::Null, num);
                rep.push(
                    Record::new(format!("i({f}) -> {f}"), "approximation order of the embedding", r.verdict)
                        .with("sups", Value::Array(sups))
                        .with("exponent", exponent)
                        .with("reproduced", json!(r.reproduced)),
                );
            }
            Err(e) => rep.push(Record::caused(format!("i({f}) -> {f}"), "approximation order of the embedding", &e, e.verdict())),
        }
    }
    Ok(rep)
}

fn mollifier_record(rho: &Mollifier) -> Result<Record, CliError> {
    let anchor = "mollifier moment conditions";
    let quad = MomentQuad::default();
    Ok(match check_mollifier(&rho.rho, rho.order, &quad) {
        Ok(m) => {
            let ok = m.decay_ok && m.order.is_some_and(|o| o >= rho.order);
            let moments: Vec<Value> =
                m.moments.iter().map(|x| json!({ "k": x.k, "value": num(x.value), "error": num(x.error), "tail": num(x.tail) })).collect();
            let note = if ok { format!("moments 1..{} vanish, unit mass", rho.order) } else { "moment conditions not met".into() };
            Record::new("mollifier", anchor, Verdict::exact(ok, note)).with("rho", json!(rho.rho.to_string())).with("moments", Value::Array(moments))
        }
        Err(e) => Record::caused("mollifier", anchor, &e, None),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdeAction {
    Solve,
    Transform,
    Transfer,
    Classify,
}

impl OdeAction {
    fn as_str(self) -> &'static str {
        match self {
            OdeAction::Solve => "solve",
            OdeAction::Transform => "transform",
            OdeAction::Transfer => "transfer",
            OdeAction::Classify => "classify",
        }
    }
}

pub struct OdeArgs<'a> {
    pub problem: &'a Path,
    pub morphism: Option<&'a str>,
    pub gauges: Option<(&'a str, &'a str)>,
    pub gauge: &'a str,
    pub k: &'a str,
    pub method: Option<&'a str>,
    pub emit: Option<&'a Path>,
}

const ODE_ANCHOR: &str = "generalized ODE and solvability transfer";

/// λ runs from `B_exp` to `B_pol`, η back; other maps default to `B_pol` on both sides.
fn ode_morphism(ctx: &Context, name: &str, gauges: Option<(&str, &str)>) -> Result<Result<GaugeMorphism, GaugeError>, CliError> {
    let (a, b) = match (gauges, name) {
        (Some(g), _) => g,
        (None, "lambda") => ("B_exp", "B_pol"),
        (None, "eta") => ("B_pol", "B_exp"),
        (None, _) => ("B_pol", "B_pol"),
    };
    let f = IndexMorphism::new(IndexSet::Is, IndexSet::Is, named_map(name)?);
    Ok(check_ag1(&f, &ctx.config.gauge(a)?, &ctx.config.gauge(b)?, &ctx.sched))
}

fn method_for(p: &OdeProblem, m: Option<&str>) -> Result<Method, CliError> {
    match m {
        Some("closed") => Ok(Method::ClosedFormLinear),
        Some("rk4") => Ok(Method::Rk4 { h: DEFAULT_STEP }),
        Some(other) => Err(CliError::Usage(format!("unknown method `{other}` (closed or rk4)"))),
        None if p.linear_coefficient().is_some() => Ok(Method::ClosedFormLinear),
        None => Ok(Method::Rk4 { h: DEFAULT_STEP }),
    }
}

fn solution_json(s: &SolutionNet) -> Value {
    match s {
        SolutionNet::ClosedForm(e) => json!({ "closed_form": e.to_string() }),
        SolutionNet::Numeric(ts) => Value::Array(
            ts.iter()
                .map(|t| {
                    json!({
                        "eps": rat(&t.eps),
                        "step": num(t.step),
                        "error_estimate": num(t.error_estimate),
                        "max_residual": num(t.max_residual),
                        "residual_ok": t.residual_ok,
                        "end": json!({ "t": num(*t.times.last().unwrap_or(&f64::NAN)), "x": num(*t.values.last().unwrap_or(&f64::NAN)) }),
                    })
                })
                .collect(),
        ),
    }
}

fn problem_json(p: &OdeProblem) -> Value {
    let f = ProblemFile::from_problem(p);
    json!({ "rhs": f.rhs, "t0": f.t0, "x0": f.x0, "interval": f.interval })
}

fn ode_error(name: &str, e: OdeError) -> Record {
    Record::caused(name, ODE_ANCHOR, &e, e.verdict())
}

fn solve_record(ctx: &Context, p: &OdeProblem, method: Method, k: &Compact) -> (Record, Option<SolutionNet>) {
    let sol = match ode::solve(p, &ctx.sched, method) {
        Ok(s) => s,
        Err(e) => return (ode_error("solution", e), None),
    };
    let v = match &sol {
        SolutionNet::ClosedForm(x) => match ode::satisfies(p, x, k, &ctx.sched) {
            Ok(ok) => Verdict::exact(ok, if ok { "closed form satisfies the equation on K" } else { "closed form residual too large" }),
            Err(e) => return (ode_error("solution", e), Some(sol)),
        },
        SolutionNet::Numeric(ts) => {
            let ok = ts.iter().all(|t| t.residual_ok);
            Verdict::exact(ok, if ok { "residuals within the RK4 error bound" } else { "residual exceeds the RK4 error bound" })
        }
    };
    (Record::new("solution", ODE_ANCHOR, v).with("solution", solution_json(&sol)), Some(sol))
}

pub fn ode_cmd(ctx: &Context, action: OdeAction, a: &OdeArgs) -> Result<Report, CliError> {
    let p = ProblemFile::load(a.problem)?.to_problem()?;
    let k = compact(a.k)?;
    let method = method_for(&p, a.method)?;
    let mut extra = vec![("problem", p.describe()), ("K", k.label())];
    if let Some(m) = a.morphism {
        extra.push(("morphism", m.into()));
    }
    if matches!(action, OdeAction::Classify) {
        extra.push(("gauge", a.gauge.into()));
    }
    let mut rep = ctx.report(&format!("ode {}", action.as_str()), &extra);
    let need_morphism = || a.morphism.ok_or_else(|| CliError::Usage(format!("ode {} needs --morphism", action.as_str())));
    match action {
        OdeAction::Solve => {
            rep.push(solve_record(ctx, &p, method, &k).0);
        }
        OdeAction::Classify => {
            let g = ctx.config.gauge(a.gauge)?;
            let (rec, sol) = solve_record(ctx, &p, method, &k);
            let solved = rec.verdict.is_holds();
            rep.push(rec);
            if let (Some(sol), true) = (sol, solved) {
                let name = format!("solution moderate in {}", g.name);
                match ode::classify(&sol, &p, &g, &k, &ctx.sched) {
                    Ok(v) => rep.push(Record::new(name, ODE_ANCHOR, v)),
                    Err(e) => rep.push(ode_error(&name, e)),
                }
            }
        }
        OdeAction::Transform => {
            let m = need_morphism()?;
            match ode_morphism(ctx, m, a.gauges)? {
                Ok(gm) => {
                    rep.push(Record::new(format!("morphism {}", gm.morphism.map), "asymptotic gauge morphism", gm.record.clone()));
                    match ode::transform(&p, &gm) {
                        Ok(t) => {
                            if let Some(path) = a.emit {
                                std::fs::write(path, ProblemFile::from_problem(&t).to_toml()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                            }
                            rep.push(Record::new("transformed problem", ODE_ANCHOR, Verdict::exact(true, "eps replaced by the morphism")).with("problem", problem_json(&t)));
                        }
                        Err(e) => rep.push(ode_error("transformed problem", e)),
                    }
                }
                Err(e) => rep.push(gauge_error("morphism", "asymptotic gauge morphism", e)?),
            }
        }
        OdeAction::Transfer => {
            let m = need_morphism()?;
            let gm = match ode_morphism(ctx, m, a.gauges)? {
                Ok(gm) => gm,
                Err(e) => {
                    rep.push(gauge_error("morphism", "asymptotic gauge morphism", e)?);
                    return Ok(rep);
                }
            };
            rep.push(Record::new(format!("morphism {}", gm.morphism.map), "asymptotic gauge morphism", gm.record.clone()));
            let (rec, sol) = solve_record(ctx, &p, method, &k);
            let solved = rec.verdict.is_holds();
            rep.push(rec);
            if let (Some(sol), true) = (sol, solved) {
                match ode::transfer_solution(&sol, &p, &gm, &k, &ctx.sched) {
                    Ok(t) => rep.push(
                        Record::new("transferred solution", ODE_ANCHOR, Verdict::all(vec![("source".into(), t.source), ("target".into(), t.target)]))
                            .with("solution", solution_json(&t.solution))
                            .with("problem", problem_json(&t.problem))
                            .with("residual", num(t.residual)),
                    ),
                    Err(e) => rep.push(ode_error("transferred solution", e)),
                }
            }
        }
    }
    Ok(rep)
}

