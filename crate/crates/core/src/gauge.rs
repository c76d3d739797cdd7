//! Asymptotic gauges, their moderate classes and morphisms.
//!
//! A gauge is finitely presented; its moderate class `ℝ_M(B)` is only ever
//! queried through [`moderate_in`]. Inclusions between moderate classes are
//! checked generator by generator.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::bigfloat::{self, BigFloat, Interval};
use crate::index::{
    big_o, check_morphism, eventually, limit, order_gt, sampled_big_o, IndexError, IndexMorphism, IndexSet,
};
use crate::netlang::growth::{growth_key, Growth, GrowthKey};
use crate::netlang::normal::{instantiate, normalize, substitute_var};
use crate::netlang::print::rational_string;
use crate::netlang::{eval, parse, q, qr, Env, EvalError, Expr, ExtLimit, HybridNet, SamplingSchedule, Var};
use crate::verdict::{Evidence, Verdict};
use crate::Q;

/// Largest tested parameter or power.
pub const TEST_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum GaugeError {
    Mismatch(String),
    Index(IndexError),
    /// `μ(b)² <_𝕀 μ(c)` has no witness `c` for the named generator.
    MuSquare(String),
    /// `μ` is not admissible (not nondecreasing or bounded).
    Mu(String),
    Precondition(String, Verdict),
    /// No admissible `ε̄_n` on the decimal grid.
    DepthLimit(usize),
    /// A generator-level inclusion failed.
    Inclusion { which: String, generator: String, verdict: Verdict },
}

impl GaugeError {
    /// The verdict behind a failed precondition or inclusion.
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            GaugeError::Precondition(_, v) | GaugeError::Inclusion { verdict: v, .. } => Some(v),
            _ => None,
        }
    }
}

impl From<IndexError> for GaugeError {
    fn from(e: IndexError) -> Self {
        GaugeError::Index(e)
    }
}

impl From<EvalError> for GaugeError {
    fn from(e: EvalError) -> Self {
        GaugeError::Index(IndexError::Eval(e))
    }
}

impl fmt::Display for GaugeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeError::Mismatch(s) => write!(f, "index-set mismatch: {s}"),
            GaugeError::Index(e) => write!(f, "{e}"),
            GaugeError::MuSquare(s) => write!(f, "no c with mu(b)^2 < mu(c) for b = {s}"),
            GaugeError::Mu(s) => write!(f, "inadmissible mu: {s}"),
            GaugeError::Precondition(s, v) => write!(f, "precondition failed: {s} ({})", v.tag.as_str()),
            GaugeError::DepthLimit(n) => write!(f, "no admissible switch point found for n = {n}"),
            GaugeError::Inclusion { which, generator, .. } => write!(f, "inclusion {which} fails at generator {generator}"),
        }
    }
}

/// Range of the formal parameter `m` of a parametric presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamRange {
    Naturals,
    PositiveReals,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Presentation {
    /// `{b^m | m ∈ ℕ}`.
    Principal(Expr),
    FiniteFamily(Vec<Expr>),
    /// One net with the formal parameter `m`.
    Parametric(Expr, ParamRange),
    /// `{μ(H·b) | H > 0, b ∈ inner}` with `μ` written in `x`; `hs` are the tested `H`.
    Mu { mu: Expr, inner: Box<Presentation>, hs: Vec<Q> },
    /// `ℝ_M` of the inner presentation, queried through it.
    Moderate(Box<Presentation>),
}

/// A presented generator with a label.
#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub label: String,
    pub net: Expr,
}

impl Presentation {
    /// Generators used when quantifying over the gauge.
    pub fn tested(&self) -> Vec<Member> {
        self.members(TEST_DEPTH)
    }

    /// Generators searched when an existential over the gauge is needed.
    pub fn candidates(&self) -> Vec<Member> {
        self.members(2 * TEST_DEPTH + 1)
    }

    fn params(range: ParamRange, depth: usize) -> Vec<Q> {
        match range {
            ParamRange::Naturals => (1..=depth as i64).map(q).collect(),
            ParamRange::PositiveReals => {
                let mut v: Vec<Q> = alloc::vec![qr(1, 3)];
                v.extend((1..=2 * depth as i64).map(|k| qr(k, 2)));
                v
            }
        }
    }

    pub fn members(&self, depth: usize) -> Vec<Member> {
        match self {
            Presentation::Principal(b) => (1..=depth as i64)
                .map(|m| Member { label: format!("b^{m}"), net: normalize(&b.clone().powi(m)) })
                .collect(),
            Presentation::FiniteFamily(v) => {
                v.iter().enumerate().map(|(i, e)| Member { label: format!("#{i}"), net: normalize(e) }).collect()
            }
            Presentation::Parametric(t, r) => Presentation::params(*r, depth)
                .into_iter()
                .map(|m| Member { label: format!("m={}", rational_string(&m)), net: instantiate(t, &m) })
                .collect(),
            Presentation::Mu { mu, inner, hs } => {
                let mut out = Vec::new();
                for b in inner.members(depth) {
                    for h in hs {
                        let arg = Expr::Const(h.clone()).mul(b.net.clone());
                        out.push(Member {
                            label: format!("mu({}*{})", rational_string(h), b.label),
                            net: substitute_var(mu, Var::X, &arg),
                        });
                    }
                }
                out
            }
            Presentation::Moderate(inner) => inner.members(depth),
        }
    }

    /// `(k₀, k₁)` with `key(b_m) = k₀ + m·k₁`, when the family is linear in the fragment.
    fn linear_keys(&self) -> Option<(GrowthKey, GrowthKey, ParamRange)> {
        let (at, range): (Box<dyn Fn(i64) -> Expr>, ParamRange) = match self {
            Presentation::Principal(b) => {
                let b = b.clone();
                (Box::new(move |m| normalize(&b.clone().powi(m))), ParamRange::Naturals)
            }
            Presentation::Parametric(t, r) => {
                let t = t.clone();
                (Box::new(move |m| instantiate(&t, &q(m))), *r)
            }
            Presentation::Moderate(inner) => return inner.linear_keys(),
            _ => return None,
        };
        let key = |m| match growth_key(&at(m)) {
            Growth::Key(k) => Some(k),
            _ => None,
        };
        let (k1, k2, k3) = (key(1)?, key(2)?, key(3)?);
        let step = GrowthKey::new(&k2.c - &k1.c, &k2.a - &k1.a, &k2.b - &k1.b);
        let base = GrowthKey::new(&k1.c - &step.c, &k1.a - &step.a, &k1.b - &step.b);
        (k3 == base.mul(&step.scale(&q(3)))).then_some((base, step, range))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    pub name: String,
    pub index: IndexSet,
    pub presentation: Presentation,
}

impl Gauge {
    pub fn new(name: impl Into<String>, index: IndexSet, presentation: Presentation) -> Self {
        Gauge { name: name.into(), index, presentation }
    }

    fn template(s: &str) -> Expr {
        parse(s).expect("built-in template parses")
    }

    /// `B_pol = {ε^{−m} | m ∈ ℕ}`.
    pub fn pol() -> Gauge {
        Gauge::new("B_pol", IndexSet::Is, Presentation::Parametric(Gauge::template("powg(eps,-m)"), ParamRange::Naturals))
    }

    /// `B_exp = {e^{m/ε} | m ∈ ℕ}`.
    pub fn exp() -> Gauge {
        Gauge::new("B_exp", IndexSet::Is, Presentation::Parametric(Gauge::template("exp(m/eps)"), ParamRange::Naturals))
    }

    /// `B^s = {ε^{−a} | a > 0}`.
    pub fn sharp() -> Gauge {
        Gauge::new("B_s", IndexSet::Is, Presentation::Parametric(Gauge::template("powg(eps,-m)"), ParamRange::PositiveReals))
    }

    /// `{ε^{−2m} | m ∈ ℕ}`.
    pub fn pol_even() -> Gauge {
        Gauge::new("B_pol2", IndexSet::Is, Presentation::Parametric(Gauge::template("powg(eps,-2*m)"), ParamRange::Naturals))
    }

    /// `{n^m | m ∈ ℕ}` on `ℕ̄`.
    pub fn nbar() -> Gauge {
        Gauge::new("B_nbar", IndexSet::NBar, Presentation::Parametric(Gauge::template("powg(n,m)"), ParamRange::Naturals))
    }

    /// `{1}`: not a gauge.
    pub fn const1() -> Gauge {
        Gauge::new("B_const1", IndexSet::Is, Presentation::FiniteFamily(alloc::vec![Expr::one()]))
    }

    pub fn principal(name: impl Into<String>, b: Expr) -> Gauge {
        Gauge::new(name, IndexSet::Is, Presentation::Principal(b))
    }

    /// The built-in zoo by name.
    pub fn zoo(name: &str) -> Option<Gauge> {
        Some(match name {
            "B_pol" | "pol" => Gauge::pol(),
            "B_exp" | "exp" => Gauge::exp(),
            "B_s" | "s" => Gauge::sharp(),
            "B_pol2" | "pol2" => Gauge::pol_even(),
            "B_nbar" | "nbar" => Gauge::nbar(),
            "B_const1" | "const1" => Gauge::const1(),
            _ => return None,
        })
    }

    pub fn zoo_names() -> &'static [&'static str] {
        &["B_pol", "B_exp", "B_s", "B_pol2", "B_nbar", "B_const1"]
    }

    /// `ℝ_M(B)` presented as a gauge; taking it twice changes nothing.
    pub fn moderate_closure(&self) -> Gauge {
        let presentation = match &self.presentation {
            p @ Presentation::Moderate(_) => p.clone(),
            p => Presentation::Moderate(Box::new(p.clone())),
        };
        Gauge { name: format!("R_M({})", self.name), index: self.index.clone(), presentation }
    }

    pub fn tested(&self) -> Vec<Member> {
        self.presentation.tested()
    }
}

fn sym_note(lhs: impl ToString, rhs: impl ToString, note: impl Into<String>) -> Evidence {
    Evidence::Symbolic { lhs: lhs.to_string(), rhs: rhs.to_string(), note: note.into() }
}

fn key_str(k: &GrowthKey) -> String {
    crate::index::key_string(k)
}

/// Smallest admissible parameter `m` with `key ≤ k₀ + m·k₁`, if any.
fn family_bound(key: &GrowthKey, k0: &GrowthKey, k1: &GrowthKey, range: ParamRange) -> Option<Q> {
    let tx = key.triple();
    let t0 = k0.triple();
    let t1 = k1.triple();
    let tx = [tx.0, tx.1, tx.2];
    let t0 = [t0.0, t0.1, t0.2];
    let t1 = [t1.0, t1.1, t1.2];
    let ok = |m: &Q| {
        let d: Vec<Q> = (0..3).map(|i| &t0[i] + m * &t1[i] - &tx[i]).collect();
        for v in &d {
            match v.cmp(&Q::zero()) {
                Ordering::Greater => return true,
                Ordering::Less => return false,
                Ordering::Equal => {}
            }
        }
        true
    };
    let m_min = match range {
        ParamRange::Naturals => Q::one(),
        ParamRange::PositiveReals => qr(1, 1_000_000),
    };
    let Some(i) = (0..3).find(|&i| !t1[i].is_zero()) else {
        return ok(&m_min).then_some(m_min);
    };
    if t1[i].is_negative() {
        return ok(&m_min).then_some(m_min);
    }
    let m_eq = (&tx[i] - &t0[i]) / &t1[i];
    let mut cands = Vec::new();
    match range {
        ParamRange::Naturals => {
            cands.push(m_eq.ceil());
            cands.push(m_eq.floor() + Q::one());
        }
        ParamRange::PositiveReals => {
            cands.push(m_eq.clone());
            cands.push(&m_eq + Q::one());
        }
    }
    cands.push(m_min.clone());
    cands.sort();
    cands.into_iter().filter(|m| *m >= m_min).find(|m| ok(m))
}

/// `x ∈ ℝ_M(B)`: `x = O(b)` for some presented generator `b`.
pub fn moderate_in(x: &Expr, g: &Gauge, sched: &SamplingSchedule) -> Verdict {
    if let (Growth::Key(kx), Some((k0, k1, range))) = (growth_key(&g.index.eps_net(x)), g.presentation.linear_keys()) {
        if g.index != IndexSet::NBar || !x.mentions(Var::Eps) {
            return match family_bound(&kx, &k0, &k1, range) {
                Some(m) => Verdict::holds(sym_note(
                    key_str(&kx),
                    key_str(&k0.mul(&k1.scale(&m))),
                    format!("x = O(b) for the generator at m = {}", rational_string(&m)),
                )),
                None => Verdict::fails(sym_note(
                    key_str(&kx),
                    format!("{} + m*{}", key_str(&k0), key_str(&k1)),
                    "key(x) exceeds the key of every generator",
                )),
            };
        }
    }
    let mut parts = Vec::new();
    for b in g.presentation.candidates() {
        let v = big_o(x, &b.net, &g.index, sched);
        if v.is_holds() {
            return Verdict::any(alloc::vec![(b.label, v)]);
        }
        parts.push((b.label, v));
    }
    Verdict::any(parts)
}

/// `moderate_in` decided by sampling on an explicit list of points, without the symbolic shortcut.
pub fn moderate_in_at(x: &Expr, g: &Gauge, points: &[Q], digits: u32) -> Verdict {
    search(g, |b| sampled_big_o(x, &b.net, &g.index, points, digits, 0))
}

/// Existential search over the candidates for a generator satisfying `pred`.
fn search<F: FnMut(&Member) -> Verdict>(g: &Gauge, mut pred: F) -> Verdict {
    let mut parts = Vec::new();
    for c in g.presentation.candidates() {
        let v = pred(&c);
        if v.is_holds() {
            return Verdict::any(alloc::vec![(c.label.clone(), v)]);
        }
        parts.push((c.label.clone(), v));
    }
    Verdict::any(parts)
}

fn pairs(ms: &[Member]) -> Vec<(&Member, &Member)> {
    let mut out = Vec::new();
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i..] {
            out.push((a, b));
        }
    }
    out
}

/// Checks the five gauge axioms on the tested generators.
pub fn verify_gauge_axioms(g: &Gauge, sched: &SamplingSchedule) -> Verdict {
    let tested = g.tested();
    let set = &g.index;
    let points = set.sample(sched);

    // (i) nets into ℝ
    let mut nets = Vec::new();
    for m in &tested {
        // overflow means beyond the big-float range, not a non-real value
        let mut beyond = 0;
        let mut bad = None;
        for p in &points {
            match set.eval_at(&m.net, p, sched.digits) {
                Ok(_) => {}
                Err(EvalError::Overflow) => beyond += 1,
                Err(e) => {
                    bad = Some(format!("evaluation fails at {}: {e}", rational_string(p)));
                    break;
                }
            }
        }
        let v = match bad {
            Some(note) => Verdict::fails(Evidence::Exact { note }),
            None if beyond == points.len() => Verdict::inconclusive(Evidence::Exact { note: "beyond range at every sample".into() }),
            None if beyond > 0 => Verdict::holds(Evidence::Exact { note: format!("evaluates at every sample within range ({beyond} beyond range)") }),
            None => Verdict::holds(Evidence::Exact { note: "evaluates at every sample".into() }),
        };
        nets.push((m.label.clone(), v));
    }

    // (ii) some generator tends to infinity
    let infinite = search(g, |c| {
        let r = limit(&c.net, set, sched);
        let note = format!("lim = {}", r.describe());
        match r.value {
            Some(ExtLimit::PosInf) => Verdict::holds(Evidence::Exact { note }),
            Some(_) => Verdict::fails(Evidence::Exact { note }),
            None => Verdict::inconclusive(Evidence::Exact { note }),
        }
    });

    // (iii) products
    let mut products = Vec::new();
    for (a, b) in pairs(&tested) {
        let prod = normalize(&a.net.clone().mul(b.net.clone()));
        products.push((format!("{}*{}", a.label, b.label), search(g, |c| big_o(&prod, &c.net, set, sched))));
    }

    // (iv) scalar multiples
    let mut scalars = Vec::new();
    for a in &tested {
        for r in [q(-3), qr(1, 2), q(10)] {
            let x = normalize(&Expr::Const(r.clone()).mul(a.net.clone()));
            scalars.push((format!("{}*{}", rational_string(&r), a.label), search(g, |c| big_o(&x, &c.net, set, sched))));
        }
    }

    // (v) sums of absolute values under a positive generator
    let mut sums = Vec::new();
    for (a, b) in pairs(&tested) {
        let s = normalize(&a.net.clone().abs().add(b.net.clone().abs()));
        let v = search(g, |c| {
            let pos = order_gt(&c.net, &Expr::zero(), set, sched);
            let bound = big_o(&s, &c.net, set, sched);
            Verdict::all(alloc::vec![("positive".into(), pos), ("bound".into(), bound)])
        });
        sums.push((format!("|{}|+|{}|", a.label, b.label), v));
    }

    Verdict::all(alloc::vec![
        ("i".into(), Verdict::all(nets)),
        ("ii".into(), infinite),
        ("iii".into(), Verdict::all(products)),
        ("iv".into(), Verdict::all(scalars)),
        ("v".into(), Verdict::all(sums)),
    ])
}

/// `B ∘ f`, a gauge on the target of `f`.
pub fn pullback(g: &Gauge, f: &IndexMorphism) -> Result<Gauge, GaugeError> {
    if g.index != f.source {
        return Err(GaugeError::Mismatch(format!("gauge on {} pulled back along a morphism from {}", g.index.name(), f.source.name())));
    }
    let presentation = pull_presentation(&g.presentation, f);
    Ok(Gauge { name: format!("{}∘f", g.name), index: f.target.clone(), presentation })
}

fn pull_presentation(p: &Presentation, f: &IndexMorphism) -> Presentation {
    let t = |e: &Expr| crate::index::transport(e, f);
    match p {
        Presentation::Principal(b) => Presentation::Principal(t(b)),
        Presentation::FiniteFamily(v) => Presentation::FiniteFamily(v.iter().map(t).collect()),
        Presentation::Parametric(e, r) => Presentation::Parametric(t(e), *r),
        Presentation::Mu { mu, inner, hs } => {
            Presentation::Mu { mu: mu.clone(), inner: Box::new(pull_presentation(inner, f)), hs: hs.clone() }
        }
        Presentation::Moderate(inner) => Presentation::Moderate(Box::new(pull_presentation(inner, f))),
    }
}

/// `ℝ_M(B₁) ⊆ ℝ_M(B₂)`, checked on the tested generators of `B₁`.
pub fn included(b1: &Gauge, b2: &Gauge, sched: &SamplingSchedule) -> Result<Verdict, GaugeError> {
    if b1.index != b2.index {
        return Err(GaugeError::Mismatch(format!("{} vs {}", b1.index.name(), b2.index.name())));
    }
    let parts = b1.tested().into_iter().map(|m| (m.label, moderate_in(&m.net, b2, sched))).collect();
    Ok(Verdict::all(parts))
}

/// `ℝ_M(B₁) = ℝ_M(B₂)`.
pub fn gauges_equivalent(b1: &Gauge, b2: &Gauge, sched: &SamplingSchedule) -> Result<Verdict, GaugeError> {
    let fwd = included(b1, b2, sched)?;
    let bwd = included(b2, b1, sched)?;
    Ok(Verdict::all(alloc::vec![(format!("{} in {}", b1.name, b2.name), fwd), (format!("{} in {}", b2.name, b1.name), bwd)]))
}

/// The first generator whose inclusion fails, if any.
fn failing_generator(v: &Verdict) -> Option<String> {
    v.leaves().into_iter().find(|(_, l)| l.is_fails()).map(|(p, _)| p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    Ag1,
    Ag2,
    /// Arrows of `Ag_≤`; the defining condition coincides with `Ag₁`.
    AgLe,
}

impl MorphismKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismKind::Ag1 => "Ag1",
            MorphismKind::Ag2 => "Ag2",
            MorphismKind::AgLe => "Ag_le",
        }
    }
}

/// A moderate gauge together with the gauge defining negligibility.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePair {
    pub b: Gauge,
    pub z: Gauge,
}

impl GaugePair {
    pub fn diagonal(b: Gauge) -> Self {
        GaugePair { z: b.clone(), b }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeMorphism {
    pub morphism: IndexMorphism,
    pub source: GaugePair,
    pub target: GaugePair,
    pub kind: MorphismKind,
    /// Every check performed, by name.
    pub record: Verdict,
}

impl GaugeMorphism {
    pub fn verified(&self) -> bool {
        self.record.is_holds()
    }
}

/// Verifies `f` as an arrow of `Ag₂` (pairs) or `Ag₁`/`Ag_≤` (diagonal pairs).
pub fn check_ag_morphism(
    f: &IndexMorphism,
    source: &GaugePair,
    target: &GaugePair,
    kind: MorphismKind,
    sched: &SamplingSchedule,
) -> Result<GaugeMorphism, GaugeError> {
    let ind = check_morphism(f, sched)?;
    let mut parts = alloc::vec![("index morphism".to_string(), ind.clone())];
    if ind.is_fails() {
        return Err(GaugeError::Inclusion { which: "index morphism".into(), generator: String::new(), verdict: ind });
    }
    let b1f = pullback(&source.b, f)?;
    let checks: Vec<(String, Gauge, Gauge)> = match kind {
        MorphismKind::Ag2 => {
            let z1f = pullback(&source.z, f)?;
            alloc::vec![
                ("R_M(B1 o f) in R_M(B2)".into(), b1f, target.b.clone()),
                ("R_M(Z2) in R_M(Z1 o f)".into(), target.z.clone(), z1f),
            ]
        }
        MorphismKind::Ag1 | MorphismKind::AgLe => alloc::vec![
            ("R_M(B1 o f) in R_M(B2)".into(), b1f.clone(), target.b.clone()),
            ("R_M(B2) in R_M(B1 o f)".into(), target.b.clone(), b1f),
        ],
    };
    for (name, a, b) in checks {
        let v = included(&a, &b, sched)?;
        if v.is_fails() {
            let generator = failing_generator(&v).unwrap_or_default();
            return Err(GaugeError::Inclusion { which: name, generator, verdict: v });
        }
        parts.push((name, v));
    }
    Ok(GaugeMorphism {
        morphism: f.clone(),
        source: source.clone(),
        target: target.clone(),
        kind,
        record: Verdict::all(parts),
    })
}

/// `Ag₁` arrow between single gauges.
pub fn check_ag1(f: &IndexMorphism, b1: &Gauge, b2: &Gauge, sched: &SamplingSchedule) -> Result<GaugeMorphism, GaugeError> {
    check_ag_morphism(f, &GaugePair::diagonal(b1.clone()), &GaugePair::diagonal(b2.clone()), MorphismKind::Ag1, sched)
}

/// `Ag_≤` arrow between single gauges.
pub fn check_agle_morphism(
    f: &IndexMorphism,
    b1: &Gauge,
    b2: &Gauge,
    sched: &SamplingSchedule,
) -> Result<GaugeMorphism, GaugeError> {
    check_ag_morphism(f, &GaugePair::diagonal(b1.clone()), &GaugePair::diagonal(b2.clone()), MorphismKind::AgLe, sched)
}

/// Default tested multipliers `H` in `μ(H·b)`.
pub fn default_hs() -> Vec<Q> {
    alloc::vec![qr(1, 2), q(1), q(2)]
}

/// Checks that `μ` is nondecreasing on a grid and unbounded.
fn check_mu(mu: &Expr, digits: u32) -> Result<(), GaugeError> {
    let ctx = bigfloat::Ctx::from_digits(digits);
    let at = |x: &Q| -> Result<BigFloat, GaugeError> {
        let env: Env<BigFloat> = Env::default().with_x(BigFloat::from_q(x, ctx));
        Ok(eval(mu, &env, ctx)?)
    };
    let grid: Vec<Q> = (-40..=40).map(|k| qr(k, 4)).chain((1..=6).map(|k| Q::from_integer(num_bigint::BigInt::from(10).pow(k)))).collect();
    let mut prev: Option<BigFloat> = None;
    for x in &grid {
        let v = at(x)?;
        if v.is_negative() {
            return Err(GaugeError::Mu(format!("negative at x = {}", rational_string(x))));
        }
        if let Some(p) = &prev {
            if v.cmp_total(p) == Ordering::Less {
                return Err(GaugeError::Mu(format!("decreasing at x = {}", rational_string(x))));
            }
        }
        prev = Some(v);
    }
    let big = at(&Q::from_integer(num_bigint::BigInt::from(10).pow(6)))?;
    if big.ln_abs_f64() < 10.0 {
        return Err(GaugeError::Mu("not unbounded on the tested range".into()));
    }
    Ok(())
}

/// `μ(B)`, after checking `μ` and the condition `μ(b)² <_𝕀 μ(c)`.
pub fn mu_gauge(g: &Gauge, mu: &Expr, hs: &[Q], sched: &SamplingSchedule) -> Result<Gauge, GaugeError> {
    check_mu(mu, sched.digits)?;
    for b in g.tested() {
        let mub = substitute_var(mu, Var::X, &b.net);
        let sq = normalize(&mub.clone().mul(mub));
        let v = search(g, |c| order_gt(&substitute_var(mu, Var::X, &c.net), &sq, &g.index, sched));
        if !v.is_holds() {
            return Err(GaugeError::MuSquare(b.label));
        }
    }
    let presentation = Presentation::Mu { mu: mu.clone(), inner: Box::new(g.presentation.clone()), hs: hs.to_vec() };
    Ok(Gauge { name: format!("mu({})", g.name), index: g.index.clone(), presentation })
}

/// `e^B`.
pub fn exp_gauge(g: &Gauge, sched: &SamplingSchedule) -> Result<Gauge, GaugeError> {
    mu_gauge(g, &Expr::x().exp(), &default_hs(), sched)
}

/// `E_μ(f)`: the same index morphism between `μ(B₁)` and `μ(B₂)`, re-verified.
pub fn functor_e_mu(gm: &GaugeMorphism, mu: &Expr, hs: &[Q], sched: &SamplingSchedule) -> Result<GaugeMorphism, GaugeError> {
    let b1 = mu_gauge(&gm.source.b, mu, hs, sched)?;
    let b2 = mu_gauge(&gm.target.b, mu, hs, sched)?;
    check_agle_morphism(&gm.morphism, &b1, &b2, sched)
}

/// An exactly verified `n·b₁(ε̄_n)^n < b₂(ε̄_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchWitness {
    pub n: usize,
    pub eps: Q,
    /// Upper end of the enclosure of `n·b₁^n`.
    pub lhs_hi: String,
    /// Lower end of the enclosure of `b₂`.
    pub rhs_lo: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interleaving {
    pub net: Expr,
    pub switches: Vec<Q>,
    pub witnesses: Vec<SwitchWitness>,
    /// `ℝ_M(AG(b₁)) ⊊ ℝ_M(AG(b₃)) ⊊ ℝ_M(AG(b₂))` on the witness points.
    pub strict: Verdict,
}

impl Interleaving {
    /// Switch points that start a segment where `b₃ = b₁`.
    pub fn low_points(&self) -> Vec<Q> {
        every_other(&self.switches, 0)
    }

    /// Switch points that start a segment where `b₃ = b₂`.
    pub fn high_points(&self) -> Vec<Q> {
        every_other(&self.switches, 1)
    }
}

fn every_other(switches: &[Q], start: usize) -> Vec<Q> {
    switches.iter().skip(start).step_by(2).cloned().collect()
}

fn enclose(e: &Expr, eps: &Q, bits: u32) -> Result<Interval, EvalError> {
    eval(e, &Env::at(eps, bits), bits)
}

fn pow10(k: u32) -> Q {
    Q::new(num_bigint::BigInt::one(), num_bigint::BigInt::from(10).pow(k))
}

/// Largest grid point `10^{−k}` below `bound` with `n·b₁^n < b₂` certified by interval arithmetic.
fn switch_point(b1: &Expr, b2: &Expr, n: usize, bound: &Q, bits: u32, max_k: u32) -> Result<Option<SwitchWitness>, EvalError> {
    let nb = normalize(&Expr::int(n as i64).mul(b1.clone().powi(n as i64)));
    let mut k = 0;
    while pow10(k) >= *bound {
        k += 1;
    }
    while k <= max_k {
        let e = pow10(k);
        if let (Ok(l), Ok(r)) = (enclose(&nb, &e, bits), enclose(b2, &e, bits)) {
            if l.certainly_cmp(&r) == Some(Ordering::Less) {
                return Ok(Some(SwitchWitness { n, eps: e, lhs_hi: l.hi.to_sci_string(20), rhs_lo: r.lo.to_sci_string(20) }));
            }
        }
        k += 1;
    }
    Ok(None)
}

/// Builds a principal gauge strictly between `AG(b₁)` and `AG(b₂)` as a hybrid of depth `depth`.
pub fn interleave(b1: &Expr, b2: &Expr, depth: usize, sched: &SamplingSchedule) -> Result<Interleaving, GaugeError> {
    let set = IndexSet::Is;
    let digits = sched.digits;
    for (name, b) in [("b1 > 1", b1), ("b2 > 1", b2)] {
        let v = eventually(|p| Ok(set.eval_at(b, p, digits)?.cmp_total(&BigFloat::one()) == Ordering::Greater), &set, sched)?;
        if !v.is_holds() {
            return Err(GaugeError::Precondition(name.into(), v));
        }
    }
    let v = big_o(b1, b2, &set, sched);
    if !v.is_holds() {
        return Err(GaugeError::Precondition("b1 = O(b2)".into(), v));
    }
    let ag1 = Gauge::principal("AG(b1)", b1.clone());
    let v = moderate_in(b2, &ag1, sched);
    if !v.is_fails() {
        return Err(GaugeError::Precondition("b2 outside R_M(AG(b1))".into(), v));
    }

    let bits = bigfloat::bits_for_digits(digits);
    let max_k = 4 * digits.max(depth as u32);
    let mut switches = alloc::vec![Q::one()];
    let mut witnesses = Vec::new();
    for n in 2..=depth {
        let prev = switches.last().unwrap().clone();
        let bound = prev.min(qr(1, n as i64));
        match switch_point(b1, b2, n, &bound, bits, max_k)? {
            Some(w) => {
                switches.push(w.eps.clone());
                witnesses.push(w);
            }
            None => return Err(GaugeError::DepthLimit(n)),
        }
    }
    let net = Expr::Hybrid(Arc::new(HybridNet { low: b1.clone(), high: b2.clone(), switches: switches.clone() }));
    let (odd, even) = (every_other(&switches, 0), every_other(&switches, 1));
    let powers = (depth / 2).clamp(1, 3) as i64;
    let mut parts = alloc::vec![
        ("b1 = O(b3)".to_string(), big_o(b1, &net, &set, sched)),
        ("b3 = O(b2)".to_string(), big_o(&net, b2, &set, sched)),
    ];
    for m in 1..=powers {
        let v = sampled_big_o(&net, &normalize(&b1.clone().powi(m)), &set, &even, digits, 0).negate();
        parts.push((format!("b3 not O(b1^{m})"), v));
        let v = sampled_big_o(b2, &net.clone().powi(m), &set, &odd, digits, 0).negate();
        parts.push((format!("b2 not O(b3^{m})"), v));
    }
    Ok(Interleaving { net, switches, witnesses, strict: Verdict::all(parts) })
}

/// Strictness of a chain `b₁ ⊊ a₁ ⊊ … ⊊ b₂` built by repeated interleaving towards `b₁`.
pub fn interleave_chain(b1: &Expr, b2: &Expr, length: usize, depth: usize, sched: &SamplingSchedule) -> Result<(Vec<Interleaving>, Verdict), GaugeError> {
    let mut out = Vec::new();
    let mut upper = b2.clone();
    let mut parts = Vec::new();
    for i in 0..length {
        let il = interleave(b1, &upper, depth, sched)?;
        parts.push((format!("level {}", i + 1), il.strict.clone()));
        upper = il.net.clone();
        out.push(il);
    }
    Ok((out, Verdict::all(parts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::{parse_with, ParseOptions};

    fn p(s: &str) -> Expr {
        parse_with(s, ParseOptions::extended()).unwrap()
    }

    fn s() -> SamplingSchedule {
        SamplingSchedule::default()
    }

    #[test]
    fn axioms() {
        assert!(verify_gauge_axioms(&Gauge::pol(), &s()).is_holds());
        assert!(verify_gauge_axioms(&Gauge::exp(), &s()).is_holds());
        let c = verify_gauge_axioms(&Gauge::const1(), &s());
        let ii = c.leaves().into_iter().filter(|(k, _)| k.starts_with("ii.")).all(|(_, v)| v.is_fails());
        assert!(ii && c.is_fails());
    }

    #[test]
    fn moderate_classes() {
        assert!(moderate_in(&p("pow(eps,-3)"), &Gauge::pol(), &s()).is_holds());
        assert!(moderate_in(&p("exp(1/eps)"), &Gauge::exp(), &s()).is_holds());
        assert!(moderate_in(&p("exp(1/eps)"), &Gauge::pol(), &s()).is_fails());
        let x = p("pow(eps,-3)");
        let g = Gauge::pol();
        assert_eq!(moderate_in(&x, &g, &s()).tag, moderate_in(&x, &g.moderate_closure().moderate_closure(), &s()).tag);
    }

    #[test]
    fn pullbacks() {
        let pb = pullback(&Gauge::exp(), &IndexMorphism::lambda()).unwrap();
        for (m, b) in pb.tested().iter().enumerate() {
            assert_eq!(b.net, normalize(&Expr::eps().powi(-(m as i64 + 1))));
        }
        let id = pullback(&Gauge::pol(), &IndexMorphism::identity(IndexSet::Is)).unwrap();
        assert_eq!(id.tested(), Gauge::pol().tested());
        let pe = pullback(&Gauge::pol(), &IndexMorphism::eta()).unwrap();
        assert_eq!(pe.tested()[1].net, normalize(&p("exp(2/eps)")));
    }

    #[test]
    fn equivalence() {
        assert!(gauges_equivalent(&Gauge::sharp(), &Gauge::pol(), &s()).unwrap().is_holds());
        let v = gauges_equivalent(&Gauge::pol(), &Gauge::exp(), &s()).unwrap();
        assert!(v.is_fails());
        assert!(gauges_equivalent(&Gauge::pol(), &Gauge::pol().moderate_closure(), &s()).unwrap().is_holds());
        assert!(gauges_equivalent(&Gauge::pol(), &Gauge::nbar(), &s()).is_err());
    }

    #[test]
    fn ag_morphisms() {
        assert!(check_ag1(&IndexMorphism::lambda(), &Gauge::exp(), &Gauge::pol(), &s()).unwrap().verified());
        assert!(check_ag1(&IndexMorphism::eta(), &Gauge::pol(), &Gauge::exp(), &s()).unwrap().verified());
        let f = IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("eps + pow(eps,2)*sin(1/eps)"));
        let gm = check_ag1(&f, &Gauge::sharp(), &Gauge::sharp(), &s()).unwrap();
        assert!(gm.verified(), "{:?}", gm.record);
        let sq = IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("pow(eps,2)"));
        assert!(check_ag1(&sq, &Gauge::pol(), &Gauge::pol_even(), &s()).unwrap().verified());
        let to_nbar = IndexMorphism::new(IndexSet::Is, IndexSet::NBar, p("1/(n+1)"));
        assert!(check_ag1(&to_nbar, &Gauge::pol(), &Gauge::nbar(), &s()).unwrap().verified());
        assert!(check_ag1(&crate::index::nbar_floor(), &Gauge::nbar(), &Gauge::pol(), &s()).unwrap().verified());
        assert!(check_ag1(&IndexMorphism::lambda(), &Gauge::pol(), &Gauge::pol(), &s()).is_err());
    }

    #[test]
    fn mu_images() {
        let e = exp_gauge(&Gauge::pol(), &s()).unwrap();
        assert_eq!(e.tested()[0].net, normalize(&p("exp(1/2*pow(eps,-1))")));
        let relu = p("max(x, 0)");
        let mp = mu_gauge(&Gauge::pol(), &relu, &default_hs(), &s()).unwrap();
        assert!(gauges_equivalent(&mp, &Gauge::pol(), &s()).unwrap().is_holds());
        let two = Gauge::new("two", IndexSet::Is, Presentation::FiniteFamily(alloc::vec![Expr::int(2)]));
        assert!(matches!(mu_gauge(&two, &relu, &default_hs(), &s()), Err(GaugeError::MuSquare(_))));
        let lam = check_agle_morphism(&IndexMorphism::lambda(), &Gauge::exp(), &Gauge::pol(), &s()).unwrap();
        let mapped = functor_e_mu(&lam, &Expr::x().exp(), &default_hs(), &s()).unwrap();
        assert!(mapped.verified());
    }

    #[test]
    fn interleaving() {
        let (b1, b2) = (p("1/eps"), p("exp(1/eps)"));
        let il = interleave(&b1, &b2, 8, &s()).unwrap();
        assert_eq!(il.switches[1], qr(1, 10));
        assert_eq!(il.switches[3], qr(1, 1000));
        assert!(il.strict.is_holds(), "{:?}", il.strict);
        assert!(interleave(&b1, &b1, 8, &s()).is_err());
        let (_, chain) = interleave_chain(&b1, &b2, 3, 8, &s()).unwrap();
        assert!(chain.is_holds(), "{chain:?}");
    }
}
