//! Representatives of Colombeau AG algebras `G(B, Z, Ω)` over intervals.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::ToPrimitive;

use crate::gauge::{check_ag_morphism, included, Gauge, GaugeError, GaugeMorphism, GaugePair, MorphismKind};
use crate::index::{compose_morphisms, ratio_verdict, IndexSet, RatioSample};
use crate::netlang::normal::{normalize, substitute_var};
use crate::netlang::print::rational_string;
use crate::netlang::{derive_n, eval, DiffError, Env, EvalError, Expr, SamplingSchedule, Var};
use crate::verdict::{Evidence, Verdict};
use crate::wide::Wide;
use crate::Q;

/// Base grid size for sup estimates.
pub const SUP_GRID: usize = 1000;
/// Derivative orders checked by default.
pub const DEFAULT_MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CgfError {
    #[error("domain: {0}")]
    Domain(String),
    #[error("evaluation failed: {0:?}")]
    Eval(EvalError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("{0}")]
    Gauge(GaugeError),
    #[error("representative is not moderate ({})", .0.tag.as_str())]
    NotModerate(Verdict),
    #[error("moderate class of B is not inside that of Z ({})", .0.tag.as_str())]
    NotAg2(Verdict),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("only nets on the interval index set are supported")]
    Unsupported,
}

impl CgfError {
    /// The verdict that made the construction fail, if it came from one.
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            CgfError::NotModerate(v) | CgfError::NotAg2(v) => Some(v),
            CgfError::Gauge(g) => g.verdict(),
            _ => None,
        }
    }
}

impl From<EvalError> for CgfError {
    fn from(e: EvalError) -> Self {
        CgfError::Eval(e)
    }
}

impl From<GaugeError> for CgfError {
    fn from(e: GaugeError) -> Self {
        CgfError::Gauge(e)
    }
}

/// An open interval `(lo, hi)`; `None` is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub lo: Option<Q>,
    pub hi: Option<Q>,
}

impl Domain {
    pub fn new(lo: Option<Q>, hi: Option<Q>) -> Self {
        Domain { lo, hi }
    }

    pub fn real_line() -> Self {
        Domain { lo: None, hi: None }
    }

    pub fn interval(lo: Q, hi: Q) -> Self {
        Domain { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo.as_ref().is_none_or(|l| l < x) && self.hi.as_ref().is_none_or(|h| x < h)
    }

    pub fn contains_compact(&self, k: &Compact) -> bool {
        self.contains(&k.lo) && self.contains(&k.hi)
    }
}

/// A closed interval `[lo, hi]` with rational ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compact {
    pub lo: Q,
    pub hi: Q,
}

impl Compact {
    pub fn new(lo: Q, hi: Q) -> Result<Self, CgfError> {
        if lo > hi {
            return Err(CgfError::Domain(format!("empty interval [{}, {}]", rational_string(&lo), rational_string(&hi))));
        }
        Ok(Compact { lo, hi })
    }

    pub fn label(&self) -> String {
        format!("[{}, {}]", rational_string(&self.lo), rational_string(&self.hi))
    }

    /// `n + 1` equally spaced points.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.lo.to_f64().unwrap_or(0.0), self.hi.to_f64().unwrap_or(0.0));
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }
}

/// A net of smooth functions `u(ε, x)` on `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionNet {
    pub u: Expr,
    pub omega: Domain,
}

impl FunctionNet {
    pub fn new(u: Expr, omega: Domain) -> Self {
        FunctionNet { u: normalize(&u), omega }
    }

    pub fn derivative(&self, k: usize) -> Result<Expr, CgfError> {
        Ok(derive_n(&self.u, Var::X, k)?)
    }
}

fn eval_wide(e: &Expr, eps: &Q, x: f64) -> Result<Wide, EvalError> {
    let env: Env<Wide> = Env::at(eps, ()).with_x(Wide::from_f64(x));
    eval(e, &env, ())
}

/// `ln sup_{x∈K} |e(ε, x)|` on a grid with one refinement around the argmax.
pub fn ln_sup(e: &Expr, k: &Compact, eps: &Q) -> Result<f64, EvalError> {
    ln_sup_grid(e, k, eps, SUP_GRID)
}

/// [`ln_sup`] with `n` base intervals.
pub fn ln_sup_grid(e: &Expr, k: &Compact, eps: &Q, n: usize) -> Result<f64, EvalError> {
    let grid = k.grid(n);
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, x) in grid.iter().enumerate() {
        let v = eval_wide(e, eps, *x)?.ln_abs();
        if v > best || i == 0 {
            best = v;
            arg = i;
        }
    }
    if grid.len() > 1 {
        let lo = grid[arg.saturating_sub(1)];
        let hi = grid[(arg + 1).min(grid.len() - 1)];
        for j in 0..=20 {
            let x = lo + (hi - lo) * j as f64 / 20.0;
            let v = eval_wide(e, eps, x)?.ln_abs();
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// `ln` of the sup-net of `∂^α u` over `K` at the schedule points.
fn sup_samples(e: &Expr, k: &Compact, points: &[Q]) -> Result<Vec<(Q, f64)>, EvalError> {
    points.iter().map(|p| Ok((p.clone(), ln_sup(e, k, p)?))).collect()
}

fn ln_net(set: &IndexSet, b: &Expr, p: &Q, digits: u32) -> Result<f64, EvalError> {
    Ok(set.eval_at(b, p, digits)?.ln_abs_f64())
}

/// `s = O(b)` for some generator `b`, with `s` given by samples of `ln s`.
pub fn moderate_samples(ln_s: &[(Q, f64)], g: &Gauge, sched: &SamplingSchedule) -> Verdict {
    let mut parts = Vec::new();
    for b in g.presentation.candidates() {
        let mut rs = Vec::with_capacity(ln_s.len());
        for (p, l) in ln_s {
            match ln_net(&g.index, &b.net, p, sched.digits) {
                Ok(lb) => rs.push(RatioSample::new(p.clone(), l - lb)),
                Err(_) => break,
            }
        }
        let v = if rs.len() == ln_s.len() {
            ratio_verdict(&rs, rs.len() / 2)
        } else {
            Verdict::inconclusive(Evidence::Trend { slope: 0.0, points: rs.len(), note: "generator not evaluable".into() })
        };
        if v.is_holds() {
            return Verdict::any(alloc::vec![(b.label, v)]);
        }
        parts.push((b.label, v));
    }
    Verdict::any(parts)
}

/// `s = O(z^{-1})` for every positive tested `z`.
pub fn negligible_samples(ln_s: &[(Q, f64)], z: &Gauge, sched: &SamplingSchedule) -> Verdict {
    let mut parts = Vec::new();
    for m in z.tested() {
        let mut rs = Vec::with_capacity(ln_s.len());
        let mut positive = true;
        for (p, l) in ln_s {
            match z.index.eval_at(&m.net, p, sched.digits) {
                Ok(v) if v.is_positive() => rs.push(RatioSample::new(p.clone(), l + v.ln_abs_f64())),
                _ => {
                    positive = false;
                    break;
                }
            }
        }
        if positive {
            parts.push((m.label, ratio_verdict(&rs, rs.len() / 2)));
        }
    }
    Verdict::all(parts)
}

fn check_ks(omega: &Domain, ks: &[Compact]) -> Result<(), CgfError> {
    if ks.is_empty() {
        return Err(CgfError::Domain("no compact sets given".into()));
    }
    for k in ks {
        if !omega.contains_compact(k) {
            return Err(CgfError::Domain(format!("{} is not inside the domain", k.label())));
        }
    }
    Ok(())
}

fn per_k_alpha<F>(u: &FunctionNet, ks: &[Compact], max_order: usize, sched: &SamplingSchedule, mut f: F) -> Result<Verdict, CgfError>
where
    F: FnMut(&[(Q, f64)]) -> Verdict,
{
    check_ks(&u.omega, ks)?;
    let points = sched.points();
    let mut parts = Vec::new();
    for k in ks {
        for alpha in 0..=max_order {
            let d = u.derivative(alpha)?;
            let s = sup_samples(&d, k, &points)?;
            parts.push((format!("K={} alpha={alpha}", k.label()), f(&s)));
        }
    }
    Ok(Verdict::all(parts))
}

/// `u ∈ E_M(B, Ω)` on the given compact sets and derivative orders.
pub fn is_moderate_fn(u: &FunctionNet, b: &Gauge, ks: &[Compact], max_order: usize, sched: &SamplingSchedule) -> Result<Verdict, CgfError> {
    require_interval(b)?;
    per_k_alpha(u, ks, max_order, sched, |s| moderate_samples(s, b, sched))
}

/// `u ∈ N(Z, Ω)` on the given compact sets and derivative orders.
pub fn is_negligible_fn(u: &FunctionNet, z: &Gauge, ks: &[Compact], max_order: usize, sched: &SamplingSchedule) -> Result<Verdict, CgfError> {
    require_interval(z)?;
    per_k_alpha(u, ks, max_order, sched, |s| negligible_samples(s, z, sched))
}

fn require_interval(g: &Gauge) -> Result<(), CgfError> {
    if g.index == IndexSet::Is {
        Ok(())
    } else {
        Err(CgfError::Unsupported)
    }
}

/// A representative `[u_ε]` of `G(B, Z, Ω)` with its moderateness record.
#[derive(Clone, Debug, PartialEq)]
pub struct GenFuncRep {
    pub net: FunctionNet,
    pub pair: GaugePair,
    pub ks: Vec<Compact>,
    pub max_order: usize,
    pub moderate: Verdict,
}

impl GenFuncRep {
    /// Checks `ℝ_M(B) ⊆ ℝ_M(Z)` and the moderateness of `u`.
    pub fn new(net: FunctionNet, pair: GaugePair, ks: Vec<Compact>, max_order: usize, sched: &SamplingSchedule) -> Result<Self, CgfError> {
        let inc = included(&pair.b, &pair.z, sched)?;
        if !inc.is_holds() {
            return Err(CgfError::NotAg2(inc));
        }
        GenFuncRep::with_pair(net, pair, ks, max_order, sched)
    }

    fn with_pair(net: FunctionNet, pair: GaugePair, ks: Vec<Compact>, max_order: usize, sched: &SamplingSchedule) -> Result<Self, CgfError> {
        let moderate = is_moderate_fn(&net, &pair.b, &ks, max_order, sched)?;
        if !moderate.is_holds() {
            return Err(CgfError::NotModerate(moderate));
        }
        Ok(GenFuncRep { net, pair, ks, max_order, moderate })
    }

    fn sibling(&self, u: Expr, sched: &SamplingSchedule) -> Result<Self, CgfError> {
        GenFuncRep::with_pair(FunctionNet::new(u, self.net.omega.clone()), self.pair.clone(), self.ks.clone(), self.max_order, sched)
    }

    fn same_algebra(&self, o: &GenFuncRep) -> Result<(), CgfError> {
        if self.pair != o.pair || self.net.omega != o.net.omega {
            return Err(CgfError::Mismatch("representatives live in different algebras".into()));
        }
        Ok(())
    }
}

pub fn gf_add(u: &GenFuncRep, v: &GenFuncRep, sched: &SamplingSchedule) -> Result<GenFuncRep, CgfError> {
    u.same_algebra(v)?;
    u.sibling(u.net.u.clone().add(v.net.u.clone()), sched)
}

pub fn gf_mul(u: &GenFuncRep, v: &GenFuncRep, sched: &SamplingSchedule) -> Result<GenFuncRep, CgfError> {
    u.same_algebra(v)?;
    u.sibling(u.net.u.clone().mul(v.net.u.clone()), sched)
}

pub fn gf_derive(u: &GenFuncRep, sched: &SamplingSchedule) -> Result<GenFuncRep, CgfError> {
    u.sibling(u.net.derivative(1)?, sched)
}

/// `[u] = [v]` in `G(B, Z, Ω)`: `u − v` is `Z`-negligible.
pub fn gf_equal(u: &GenFuncRep, v: &GenFuncRep, ks: &[Compact], max_order: usize, sched: &SamplingSchedule) -> Result<Verdict, CgfError> {
    u.same_algebra(v)?;
    let d = FunctionNet::new(u.net.u.clone().sub(v.net.u.clone()), u.net.omega.clone());
    is_negligible_fn(&d, &u.pair.z, ks, max_order, sched)
}

/// `u_{i(ε)} ∘ h` as an expression.
pub fn act(i: &GaugeMorphism, h: &Expr, u: &Expr) -> Expr {
    let moved = substitute_var(u, Var::Eps, &i.morphism.map);
    substitute_var(&moved, Var::X, h)
}

/// `G(i, h)[u] = [u_{i(ε)} ∘ h]` over `Ω₂`, with moderateness re-verified in the target.
pub fn functor_action(
    i: &GaugeMorphism,
    h: &Expr,
    omega2: Domain,
    ks2: Vec<Compact>,
    u: &GenFuncRep,
    sched: &SamplingSchedule,
) -> Result<GenFuncRep, CgfError> {
    if !i.verified() {
        return Err(CgfError::Gauge(GaugeError::Inclusion {
            which: "morphism".into(),
            generator: String::new(),
            verdict: i.record.clone(),
        }));
    }
    if i.source.pair_eq(&u.pair) {
        // fine
    } else {
        return Err(CgfError::Mismatch("representative is not over the source pair".into()));
    }
    if i.morphism.source != IndexSet::Is || i.morphism.target != IndexSet::Is {
        return Err(CgfError::Unsupported);
    }
    check_ks(&omega2, &ks2)?;
    // h must carry every tested compact set of Ω₂ into Ω₁
    for k in &ks2 {
        for x in k.grid(64) {
            let v = eval(h, &Env::<f64>::default().with_x(x), ()).map_err(CgfError::Eval)?;
            let inside = u.net.omega.lo.as_ref().is_none_or(|l| l.to_f64().unwrap_or(f64::NEG_INFINITY) < v)
                && u.net.omega.hi.as_ref().is_none_or(|hh| v < hh.to_f64().unwrap_or(f64::INFINITY));
            if !inside {
                return Err(CgfError::Domain(format!("h maps {x} outside the source domain")));
            }
        }
    }
    let net = FunctionNet::new(act(i, h, &u.net.u), omega2);
    GenFuncRep::with_pair(net, i.target.clone(), ks2, u.max_order, sched)
}

impl GaugePair {
    fn pair_eq(&self, o: &GaugePair) -> bool {
        self.b.presentation == o.b.presentation
            && self.z.presentation == o.z.presentation
            && self.b.index == o.b.index
    }
}

/// `f ∘ g` in `Ag₂`, re-verified.
pub fn compose_ag2(f: &GaugeMorphism, g: &GaugeMorphism, sched: &SamplingSchedule) -> Result<GaugeMorphism, CgfError> {
    let m = compose_morphisms(&f.morphism, &g.morphism).map_err(|e| CgfError::Gauge(GaugeError::Index(e)))?;
    Ok(check_ag_morphism(&m, &f.source, &g.target, MorphismKind::Ag2, sched)?)
}

/// Pointwise agreement of two nets on schedule × grid, with relative tolerance `tol`.
pub fn agree_on_grid(a: &Expr, b: &Expr, ks: &[Compact], sched: &SamplingSchedule, grid: usize, tol: f64) -> Result<bool, CgfError> {
    for p in sched.points() {
        for k in ks {
            for x in k.grid(grid) {
                let (va, vb) = (eval_wide(a, &p, x)?, eval_wide(b, &p, x)?);
                let (la, lb) = (va.ln_abs(), vb.ln_abs());
                if va.is_zero() && vb.is_zero() {
                    continue;
                }
                if va.signum() != vb.signum() && !(va.is_zero() || vb.is_zero()) {
                    return Ok(false);
                }
                let scale = la.max(lb);
                let diff = va.sub(vb).ln_abs();
                if diff.partial_cmp(&(scale + libm::log(tol))) == Some(Ordering::Greater) && diff > libm::log(tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Label for a representative, used in reports.
pub fn describe(u: &GenFuncRep) -> String {
    format!("{} over {}", u.net.u, domain_label(&u.net.omega))
}

pub fn domain_label(d: &Domain) -> String {
    let lo = d.lo.as_ref().map_or("-inf".to_string(), rational_string);
    let hi = d.hi.as_ref().map_or("+inf".to_string(), rational_string);
    format!("({lo}, {hi})")
}

/// A composable pair of morphisms with point maps and a representative over the first source.
#[derive(Clone, Debug)]
pub struct FunctorCase {
    pub name: String,
    pub f: GaugeMorphism,
    pub g: GaugeMorphism,
    pub h1: Expr,
    pub h2: Expr,
    pub u: GenFuncRep,
}

/// Domain and compact set shared by the functor zoo.
pub fn zoo_domain() -> (Domain, Vec<Compact>) {
    let k = Compact::new(crate::netlang::qr(1, 4), crate::netlang::qr(3, 4)).expect("ordered endpoints");
    (Domain::interval(crate::netlang::q(0), crate::netlang::q(1)), alloc::vec![k])
}

/// At least twenty (morphism pair, representative) cases over `B_pol` and `B_exp`, including λ and η.
pub fn functor_zoo(sched: &SamplingSchedule) -> Result<Vec<FunctorCase>, CgfError> {
    use crate::index::IndexMorphism;
    let p = |s: &str| crate::netlang::parse(s).expect("zoo expression parses");
    let (pol, exp) = (Gauge::pol(), Gauge::exp());
    let map = |s: &str| IndexMorphism::new(IndexSet::Is, IndexSet::Is, p(s));
    let ag1 = |f: &IndexMorphism, a: &Gauge, b: &Gauge| check_ag_morphism(f, &GaugePair::diagonal(a.clone()), &GaugePair::diagonal(b.clone()), MorphismKind::Ag1, sched);
    let id_pol = ag1(&IndexMorphism::identity(IndexSet::Is), &pol, &pol)?;
    let sq = ag1(&map("eps*eps"), &pol, &pol)?;
    let cube = ag1(&map("pow(eps,3)"), &pol, &pol)?;
    let half = ag1(&map("eps/2"), &pol, &pol)?;
    let root = ag1(&map("pow(eps,1/2)"), &pol, &pol)?;
    let half_exp = ag1(&map("eps/2"), &exp, &exp)?;
    let lambda = ag1(&IndexMorphism::lambda(), &exp, &pol)?;
    let eta = ag1(&IndexMorphism::eta(), &pol, &exp)?;

    let pairs: Vec<(&str, &GaugeMorphism, &GaugeMorphism)> = alloc::vec![
        ("eps^2 then eps/2", &sq, &half),
        ("eps/2 then eps^2", &half, &sq),
        ("eps^(1/2) then eps^3", &root, &cube),
        ("id then eps^2", &id_pol, &sq),
        ("eps^2 then id", &sq, &id_pol),
        ("lambda then eta", &lambda, &eta),
        ("eta then lambda", &eta, &lambda),
        ("lambda then eps^2", &lambda, &sq),
        ("eps/2 on B_exp then lambda", &half_exp, &lambda),
        ("eta then eps/2 on B_exp", &eta, &half_exp),
        ("eps^3 then eta", &cube, &eta),
    ];
    let reps_pol = ["exp(x)/eps + x*x", "sin(x)*pow(eps,-2)"];
    let reps_exp = ["exp(x/eps)", "x*exp(2/eps) + cos(x)"];
    let points = ["x", "x/2 + 1/4", "1 - x"];
    let (omega, ks) = zoo_domain();
    let mut out = Vec::new();
    for (n, (name, f, g)) in pairs.into_iter().enumerate() {
        let reps = if f.source.b.presentation == exp.presentation { reps_exp } else { reps_pol };
        for (j, r) in reps.iter().enumerate() {
            let net = FunctionNet::new(crate::netlang::parse_with(r, crate::netlang::ParseOptions::extended()).expect("zoo expression parses"), omega.clone());
            let u = GenFuncRep::new(net, f.source.clone(), ks.clone(), 1, sched)?;
            out.push(FunctorCase {
                name: format!("{name}: {r}"),
                f: f.clone(),
                g: g.clone(),
                h1: p(points[(n + j) % points.len()]),
                h2: p(points[(n + 2 * j + 1) % points.len()]),
                u,
            });
        }
    }
    Ok(out)
}

/// Identity and composition laws of `G(−)` on one case: structural equality after
/// normalization together with agreement on schedule × grid.
pub fn functor_laws(c: &FunctorCase, sched: &SamplingSchedule) -> Result<Verdict, CgfError> {
    let (omega, ks) = zoo_domain();
    let id = check_ag_morphism(&crate::index::IndexMorphism::identity(IndexSet::Is), &c.u.pair, &c.u.pair, MorphismKind::Ag1, sched)?;
    let same = functor_action(&id, &Expr::x(), omega.clone(), ks.clone(), &c.u, sched)?;
    let identity = normalize(&same.net.u) == normalize(&c.u.net.u);

    let step = functor_action(&c.f, &c.h1, omega.clone(), ks.clone(), &c.u, sched)?;
    let two = functor_action(&c.g, &c.h2, omega.clone(), ks.clone(), &step, sched)?;
    let fg = compose_ag2(&c.f, &c.g, sched)?;
    let h12 = substitute_var(&c.h1, Var::X, &c.h2);
    let one = functor_action(&fg, &h12, omega, ks.clone(), &c.u, sched)?;
    let structural = normalize(&one.net.u) == normalize(&two.net.u);
    let pointwise = agree_on_grid(&one.net.u, &two.net.u, &ks, sched, 50, 1e-12)?;
    let note = |ok: bool, what: &str| Verdict::exact(ok, if ok { format!("{what} agree") } else { format!("{what} differ") });
    Ok(Verdict::all(alloc::vec![
        ("identity".into(), note(identity, "G(id)u and u")),
        ("composition normal form".into(), note(structural, "normal forms")),
        ("composition pointwise".into(), note(pointwise, "values on schedule x grid")),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::check_ag1;
    use crate::index::IndexMorphism;
    use crate::netlang::{parse_with, q, qr, ParseOptions};

    fn p(s: &str) -> Expr {
        parse_with(s, ParseOptions::extended()).unwrap()
    }

    fn unit() -> Vec<Compact> {
        alloc::vec![Compact::new(q(0), q(1)).unwrap()]
    }

    fn fnet(s: &str) -> FunctionNet {
        FunctionNet::new(p(s), Domain::real_line())
    }

    #[test]
    fn moderateness() {
        let s = SamplingSchedule::default();
        assert!(is_moderate_fn(&fnet("sin(x/eps)"), &Gauge::pol(), &unit(), 2, &s).unwrap().is_holds());
        assert!(is_moderate_fn(&fnet("exp(1/eps)*x"), &Gauge::pol(), &unit(), 0, &s).unwrap().is_fails());
        assert!(is_moderate_fn(&fnet("cos(x)"), &Gauge::exp(), &unit(), 3, &s).unwrap().is_holds());
    }

    #[test]
    fn negligibility() {
        let s = SamplingSchedule::default();
        assert!(is_negligible_fn(&fnet("exp(-1/eps)"), &Gauge::pol(), &unit(), 2, &s).unwrap().is_holds());
        assert!(is_negligible_fn(&fnet("eps"), &Gauge::pol(), &unit(), 2, &s).unwrap().is_fails());
        assert!(is_negligible_fn(&fnet("0"), &Gauge::pol(), &unit(), 2, &s).unwrap().is_holds());
    }

    #[test]
    fn algebra() {
        let s = SamplingSchedule::default();
        let pair = GaugePair::diagonal(Gauge::pol());
        let rep = |e: &str| GenFuncRep::new(fnet(e), pair.clone(), unit(), 2, &s).unwrap();
        let u = rep("sin(x/eps)");
        assert_eq!(gf_derive(&u, &s).unwrap().net.u, normalize(&p("cos(x/eps)/eps")));
        assert_eq!(gf_add(&u, &rep("0"), &s).unwrap().net.u, u.net.u);
        assert_eq!(gf_mul(&rep("x"), &rep("x"), &s).unwrap().net.u, normalize(&p("pow(x,2)")));
        let k = unit();
        assert!(gf_equal(&u, &rep("sin(x/eps) + exp(-1/eps)"), &k, 2, &s).unwrap().is_holds());
        assert!(gf_equal(&u, &u, &k, 2, &s).unwrap().is_holds());
        assert!(gf_equal(&rep("x"), &rep("x + eps"), &k, 2, &s).unwrap().is_fails());
        let (a, b) = (rep("sin(x/eps)"), rep("x*x + eps"));
        let lhs = gf_derive(&gf_mul(&a, &b, &s).unwrap(), &s).unwrap();
        let rhs = gf_add(&gf_mul(&gf_derive(&a, &s).unwrap(), &b, &s).unwrap(), &gf_mul(&a, &gf_derive(&b, &s).unwrap(), &s).unwrap(), &s).unwrap();
        assert_eq!(lhs.net.u, rhs.net.u);
    }

    #[test]
    fn functor_laws() {
        let s = SamplingSchedule::default();
        let pol = Gauge::pol();
        let sq = check_ag1(&IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("eps*eps")), &pol, &pol, &s).unwrap();
        let half = check_ag1(&IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("eps/2")), &pol, &pol, &s).unwrap();
        let both = compose_ag2(&sq, &half, &s).unwrap();
        assert!(both.verified());
        let o1 = Domain::interval(q(0), q(4));
        let o2 = Domain::interval(q(0), q(2));
        let o3 = Domain::interval(q(0), q(1));
        let k2 = alloc::vec![Compact::new(qr(1, 2), qr(3, 2)).unwrap()];
        let k3 = alloc::vec![Compact::new(qr(1, 4), qr(3, 4)).unwrap()];
        let u = GenFuncRep::new(FunctionNet::new(p("exp(x)/eps + x*x"), o1), GaugePair::diagonal(pol.clone()), alloc::vec![Compact::new(qr(1, 2), q(3)).unwrap()], 1, &s).unwrap();
        let h1 = p("2*x");
        let h2 = p("x + 1/2");
        let step = functor_action(&sq, &h1, o2, k2, &u, &s).unwrap();
        let two = functor_action(&half, &h2, o3.clone(), k3.clone(), &step, &s).unwrap();
        let h12 = substitute_var(&h1, Var::X, &h2);
        let one = functor_action(&both, &h12, o3, k3.clone(), &u, &s).unwrap();
        assert!(agree_on_grid(&one.net.u, &two.net.u, &k3, &s, 50, 1e-12).unwrap());
    }

    #[test]
    fn derivation_square() {
        let s = SamplingSchedule::default();
        let pol = Gauge::pol();
        let id = check_ag1(&IndexMorphism::identity(IndexSet::Is), &pol, &pol, &s).unwrap();
        let u = GenFuncRep::new(FunctionNet::new(p("x*x"), Domain::interval(q(0), q(2))), GaugePair::diagonal(pol), alloc::vec![Compact::new(qr(1, 2), qr(3, 2)).unwrap()], 2, &s).unwrap();
        let inc = Expr::x();
        let small = Domain::interval(q(0), q(1));
        let k = alloc::vec![Compact::new(qr(1, 4), qr(3, 4)).unwrap()];
        let a = gf_derive(&functor_action(&id, &inc, small.clone(), k.clone(), &u, &s).unwrap(), &s).unwrap();
        let b = functor_action(&id, &inc, small, k, &gf_derive(&u, &s).unwrap(), &s).unwrap();
        assert_eq!(a.net.u, b.net.u);
        assert_eq!(a.net.u, normalize(&p("2*x")));
    }

    #[test]
    fn functor() {
        let s = SamplingSchedule::default();
        let lam = check_ag1(&IndexMorphism::lambda(), &Gauge::exp(), &Gauge::pol(), &s).unwrap();
        let src = GaugePair::diagonal(Gauge::exp());
        let ks = alloc::vec![Compact::new(qr(1, 4), qr(3, 4)).unwrap()];
        let omega = Domain::interval(q(0), q(1));
        let u = GenFuncRep::new(FunctionNet::new(p("exp(x/eps)"), omega.clone()), src, ks.clone(), 2, &s).unwrap();
        let moved = functor_action(&lam, &Expr::x(), omega.clone(), ks.clone(), &u, &s).unwrap();
        assert_eq!(moved.net.u, normalize(&p("powg(eps, -x)")));
        let id = check_ag1(&IndexMorphism::identity(IndexSet::Is), &Gauge::exp(), &Gauge::exp(), &s).unwrap();
        assert_eq!(functor_action(&id, &Expr::x(), omega, ks, &u, &s).unwrap().net.u, u.net.u);
    }
}
