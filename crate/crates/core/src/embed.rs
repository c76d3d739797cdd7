//! Mollifiers and the embedding of distributions into `G(B, Ω)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::cgf::{agree_on_grid, gf_equal, ln_sup_grid, CgfError, Compact, Domain, FunctionNet, GenFuncRep};
use crate::gauge::{check_ag1, Gauge, GaugeError, GaugeMorphism, GaugePair};
use crate::index::{limit, ls_slope, IndexMorphism, IndexSet};
use crate::netlang::normal::{normalize, substitute_var};
use crate::netlang::{derive, eval, ConvolveNode, Env, EvalError, Expr, ExtLimit, PrimitiveNode, SamplingSchedule, Var};
use crate::quad::{integrate, QuadError, QuadSpec};
use crate::verdict::{Evidence, Verdict};
use crate::Q;

/// Quadrature tolerance for moments and convolutions.
pub const QUAD_TOL: f64 = 1e-10;
/// Truncation radius in standard widths of the Gaussian factor.
pub const RADIUS_WIDTHS: u32 = 12;
/// Differences below this are quadrature noise.
pub const NOISE_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("unknown mollifier family `{0}`")]
    Family(String),
    #[error("quadrature did not converge (error estimate {0:e})")]
    Quadrature(f64),
    #[error("evaluation failed: {0:?}")]
    Eval(EvalError),
    #[error("{0}")]
    Cgf(CgfError),
    #[error("generator must be eventually positive and tend to +inf: {0}")]
    Generator(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl EmbedError {
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            EmbedError::Cgf(c) => c.verdict(),
            _ => None,
        }
    }
}

impl From<EvalError> for EmbedError {
    fn from(e: EvalError) -> Self {
        EmbedError::Eval(e)
    }
}

impl From<CgfError> for EmbedError {
    fn from(e: CgfError) -> Self {
        EmbedError::Cgf(e)
    }
}

impl From<GaugeError> for EmbedError {
    fn from(e: GaugeError) -> Self {
        EmbedError::Cgf(CgfError::Gauge(e))
    }
}

impl From<QuadError<EvalError>> for EmbedError {
    fn from(e: QuadError<EvalError>) -> Self {
        match e {
            QuadError::Integrand(e) => EmbedError::Eval(e),
            QuadError::NoConvergence(err) => EmbedError::Quadrature(err),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    /// Polynomial times `e^{−x²}`.
    Gaussian,
    /// Decay only checked numerically.
    Numeric,
}

/// Integration settings for moment checks.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentQuad {
    pub tol: f64,
    pub radius: Q,
}

impl Default for MomentQuad {
    fn default() -> Self {
        // 12 widths of e^{-x^2}, whose standard width is 1/sqrt(2)
        MomentQuad { tol: QUAD_TOL, radius: Q::new(BigInt::from(17), BigInt::from(2)) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mollifier {
    pub rho: Expr,
    pub decay: DecayClass,
    /// Largest `M` with unit mass and vanishing moments `1..=M`.
    pub order: usize,
    pub radius: Q,
}

fn gaussian() -> Expr {
    Expr::Pi.pow(Q::new(BigInt::from(-1), BigInt::from(2))).mul(Expr::x().powi(2).neg().exp())
}

/// `∫ x^{2k} π^{−1/2} e^{−x²} dx = (2k−1)!!/2^k`.
fn gauss_moment(k: usize) -> Q {
    let mut m = Q::one();
    for j in 1..=k {
        m *= Q::new(BigInt::from(2 * j - 1), BigInt::from(2));
    }
    m
}

/// Solves `a x = rhs` over the rationals; `a` must be nonsingular.
fn solve(mut a: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Vec<Q> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("moment matrix is nonsingular");
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &rhs[col];
                rhs[r] -= v;
            }
        }
    }
    (0..n).map(|i| &rhs[i] / &a[i][i]).collect()
}

impl Mollifier {
    /// Even polynomial times the unit Gaussian with moments `2, 4, …, 2⌊M/2⌋` cancelled.
    pub fn hermite(m: usize) -> Mollifier {
        let j = m / 2;
        let a = (0..=j).map(|r| (0..=j).map(|c| gauss_moment(r + c)).collect()).collect();
        let mut rhs = alloc::vec![Q::zero(); j + 1];
        rhs[0] = Q::one();
        let coeffs = solve(a, rhs);
        let mut poly = Expr::zero();
        for (i, c) in coeffs.into_iter().enumerate() {
            poly = poly.add(Expr::constant(c).mul(Expr::x().powi(2 * i as i64)));
        }
        Mollifier { rho: normalize(&poly.mul(gaussian())), decay: DecayClass::Gaussian, order: 2 * j + 1, radius: MomentQuad::default().radius }
    }

    /// `hermite(M)`, the configuration syntax for mollifier families.
    pub fn from_spec(s: &str) -> Result<Mollifier, EmbedError> {
        let t = s.trim();
        let inner = t.strip_prefix("hermite(").and_then(|r| r.strip_suffix(')')).ok_or_else(|| EmbedError::Family(t.to_string()))?;
        let m = inner.trim().parse::<usize>().map_err(|_| EmbedError::Family(t.to_string()))?;
        if m > 16 {
            return Err(EmbedError::Family(t.to_string()));
        }
        Ok(Mollifier::hermite(m))
    }

    /// A user-supplied `ρ`, with its order taken from [`check_mollifier`].
    pub fn custom(rho: Expr, m_target: usize, quad: &MomentQuad) -> Result<(Mollifier, MomentReport), EmbedError> {
        let report = check_mollifier(&rho, m_target, quad)?;
        let order = report.order.ok_or_else(|| EmbedError::Unsupported("mollifier does not have unit mass".into()))?;
        Ok((Mollifier { rho: normalize(&rho), decay: DecayClass::Numeric, order, radius: quad.radius.clone() }, report))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Moment {
    pub k: usize,
    pub value: f64,
    pub error: f64,
    /// Bound on the mass beyond the truncation radius.
    pub tail: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub moments: Vec<Moment>,
    /// `None` when the mass is not 1.
    pub order: Option<usize>,
    pub decay_ok: bool,
}

fn f64_at(e: &Expr, x: f64) -> Result<f64, EvalError> {
    eval(e, &Env::<f64>::default().with_x(x), ())
}

/// Moments `∫ x^k ρ` for `k = 0..=m_target` and the verified order.
pub fn check_mollifier(rho: &Expr, m_target: usize, quad: &MomentQuad) -> Result<MomentReport, EmbedError> {
    let r = quad.radius.to_f64().unwrap_or(0.0);
    let spec = QuadSpec { tol: quad.tol, max_intervals: 4000 };
    let edge = f64_at(rho, r)?.abs().max(f64_at(rho, -r)?.abs());
    let mut moments = Vec::new();
    for k in 0..=m_target {
        let res = integrate(|x| Ok::<f64, EvalError>(libm::pow(x, k as f64) * f64_at(rho, x)?), -r, r, spec)?;
        // Gaussian-type tails: ∫_R^∞ x^k |ρ| ≲ R^k |ρ(R)| / R on each side
        let tail = 2.0 * libm::pow(r, k as f64) * edge / r.max(1.0);
        moments.push(Moment { k, value: res.value, error: res.error, tail });
    }
    let small = |m: &Moment, target: f64| (m.value - target).abs() <= 10.0 * quad.tol + m.error + m.tail;
    let order = if moments.first().is_some_and(|m| small(m, 1.0)) {
        Some(moments.iter().skip(1).take_while(|m| small(m, 0.0)).count())
    } else {
        None
    };
    // |ρ|·x⁸ must stay bounded and be small at the truncation radius
    let mut peak = 0.0f64;
    let mut end = 0.0f64;
    for i in 0..=400 {
        let x = -r + 2.0 * r * i as f64 / 400.0;
        let v = f64_at(rho, x)?.abs() * libm::pow(x, 8.0);
        if !v.is_finite() {
            peak = f64::INFINITY;
        }
        peak = peak.max(v);
        if i == 0 || i == 400 {
            end = end.max(v);
        }
    }
    let decay_ok = peak.is_finite() && end <= 1e-6 * peak.max(1.0);
    Ok(MomentReport { moments, order, decay_ok })
}

/// `r ⊙ ρ = x ↦ (1/r) ρ(x/r)`.
pub fn scale(rho: &Expr, r: &Expr) -> Expr {
    substitute_var(rho, Var::X, &Expr::x().div(r.clone())).div(r.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestDistribution {
    Smooth(Expr),
    Delta,
    Heaviside,
    DeltaPrime,
}

impl TestDistribution {
    pub fn label(&self) -> String {
        match self {
            TestDistribution::Smooth(f) => format!("smooth({f})"),
            TestDistribution::Delta => "delta".into(),
            TestDistribution::Heaviside => "heaviside".into(),
            TestDistribution::DeltaPrime => "delta'".into(),
        }
    }

    /// The distributional derivative, when it is one of the variants.
    pub fn derivative(&self) -> Option<TestDistribution> {
        match self {
            TestDistribution::Smooth(f) => derive(f, Var::X).ok().map(|d| TestDistribution::Smooth(normalize(&d))),
            TestDistribution::Heaviside => Some(TestDistribution::Delta),
            TestDistribution::Delta => Some(TestDistribution::DeltaPrime),
            TestDistribution::DeltaPrime => None,
        }
    }

    /// Whether the distribution is carried by the origin.
    pub fn singular(&self) -> bool {
        !matches!(self, TestDistribution::Smooth(_))
    }

    /// Parses `delta`, `heaviside`, `delta'` or `smooth(<expr in x>)`.
    pub fn parse(s: &str) -> Option<TestDistribution> {
        let t = s.trim();
        match t {
            "delta" => Some(TestDistribution::Delta),
            "heaviside" | "H" => Some(TestDistribution::Heaviside),
            "delta'" | "delta_prime" => Some(TestDistribution::DeltaPrime),
            _ => {
                let inner = t.strip_prefix("smooth(")?.strip_suffix(')')?;
                crate::netlang::parse_with(inner, crate::netlang::ParseOptions::extended()).ok().map(TestDistribution::Smooth)
            }
        }
    }
}

/// `T * (1/b_ε) ⊙ ρ` as an expression in `eps` and `x`.
pub fn representative(t: &TestDistribution, b: &Expr, rho: &Mollifier) -> Expr {
    let bx = b.clone().mul(Expr::x());
    let e = match t {
        TestDistribution::Delta => b.clone().mul(substitute_var(&rho.rho, Var::X, &bx)),
        TestDistribution::DeltaPrime => {
            let d = derive(&rho.rho, Var::X).expect("mollifier is differentiable in x");
            b.clone().powi(2).mul(substitute_var(&d, Var::X, &bx))
        }
        TestDistribution::Heaviside => Expr::Primitive(Arc::new(PrimitiveNode { rho: rho.rho.clone(), upper: bx, radius: rho.radius.clone() })),
        TestDistribution::Smooth(f) => {
            let f = normalize(f);
            if f.is_zero_const() {
                return Expr::zero();
            }
            Expr::Convolve(Arc::new(ConvolveNode { f, rho: rho.rho.clone(), scale: b.clone(), at: Expr::x(), radius: rho.radius.clone() }))
        }
    };
    normalize(&e)
}

/// Representative of `Σ c_i T_i`.
pub fn representative_comb(terms: &[(Q, TestDistribution)], b: &Expr, rho: &Mollifier) -> Expr {
    let mut e = Expr::zero();
    for (c, t) in terms {
        e = e.add(Expr::constant(c.clone()).mul(representative(t, b, rho)));
    }
    normalize(&e)
}

/// Compact sets, derivative orders and schedule used when verifying embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbedOptions {
    pub ks: Vec<Compact>,
    pub max_order: usize,
    pub sched: SamplingSchedule,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        EmbedOptions { ks: alloc::vec![Compact { lo: -half.clone(), hi: half }], max_order: 1, sched: SamplingSchedule::default() }
    }
}

fn check_generator(b: &Expr, sched: &SamplingSchedule) -> Result<(), EmbedError> {
    match limit(b, &IndexSet::Is, sched).value {
        Some(ExtLimit::PosInf) => Ok(()),
        other => Err(EmbedError::Generator(format!("{b} has limit {other:?}"))),
    }
}

/// `AG(b)`, the gauge generated by powers of `b`.
pub fn generated_gauge(b: &Expr) -> Gauge {
    Gauge::principal(format!("AG({b})"), b.clone())
}

/// `i_b^ρ(T)` in `G(AG(b), Ω)` with moderateness verified.
pub fn embed(t: &TestDistribution, b: &Expr, rho: &Mollifier, omega: Domain, opts: &EmbedOptions) -> Result<GenFuncRep, EmbedError> {
    check_generator(b, &opts.sched)?;
    if t.singular() && !omega.contains(&Q::zero()) {
        return Err(EmbedError::Unsupported(format!("{} needs 0 in the domain", t.label())));
    }
    let u = representative(t, b, rho);
    let pair = GaugePair::diagonal(generated_gauge(b));
    Ok(GenFuncRep::new(FunctionNet::new(u, omega), pair, opts.ks.clone(), opts.max_order, &opts.sched)?)
}

/// Outcome of one diagram check.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramCheck {
    pub name: String,
    /// Expressions agree after normalization, with no numerics involved.
    pub exact: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagramReport {
    pub checks: Vec<DiagramCheck>,
    pub verdict: Verdict,
}

impl DiagramReport {
    fn new(checks: Vec<DiagramCheck>) -> Self {
        let verdict = Verdict::all(checks.iter().map(|c| (c.name.clone(), c.verdict.clone())).collect());
        DiagramReport { checks, verdict }
    }
}

/// Exact structural equality, else pointwise agreement within `tol` on the grid.
fn same(a: &Expr, b: &Expr, ks: &[Compact], sched: &SamplingSchedule, tol: f64) -> Result<(bool, Verdict), EmbedError> {
    let (a, b) = (normalize(a), normalize(b));
    if a == b {
        return Ok((true, Verdict::exact(true, "identical after normalization")));
    }
    let ok = agree_on_grid(&a, &b, ks, sched, 40, tol)?;
    Ok((false, Verdict::exact(ok, if ok { "agree on schedule x grid" } else { "differ on schedule x grid" })))
}

/// `sup_K |i(f) − f|` and the fitted exponent in `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxReport {
    pub sups: Vec<(f64, f64)>,
    pub exponent: Option<f64>,
    pub reproduced: bool,
    pub verdict: Verdict,
}

/// `ε_k = 2^{-k}`, `k = 1..10`: enough points above the noise floor for exponent fits.
pub fn fit_schedule() -> SamplingSchedule {
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    SamplingSchedule { eps0: half.clone(), ratio: half, count: 10, digits: 30 }
}

/// Convergence of `f * (1/b)⊙ρ` to `f`; the claim is order `M + 1` or exact reproduction.
pub fn approximation_order(f: &Expr, b: &Expr, rho: &Mollifier, ks: &[Compact], sched: &SamplingSchedule) -> Result<ApproxReport, EmbedError> {
    let u = representative(&TestDistribution::Smooth(f.clone()), b, rho);
    let diff = u.sub(f.clone());
    let mut sups = Vec::new();
    for p in sched.points() {
        let mut s = f64::NEG_INFINITY;
        for k in ks {
            s = s.max(ln_sup_grid(&diff, k, &p, 100)?);
        }
        sups.push((p.to_f64().unwrap_or(0.0), libm::exp(s)));
    }
    let above: Vec<&(f64, f64)> = sups.iter().filter(|(_, s)| *s > NOISE_FLOOR).collect();
    let reproduced = above.is_empty();
    let need = rho.order as f64 + 1.0 - 0.25;
    let (exponent, verdict) = if reproduced {
        (None, Verdict::exact(true, "reproduced within quadrature tolerance"))
    } else if above.len() < 3 {
        (None, Verdict::inconclusive(Evidence::Trend { slope: 0.0, points: above.len(), note: "too few points above the noise floor".into() }))
    } else {
        let xs: Vec<f64> = above.iter().map(|(e, _)| libm::log(*e)).collect();
        let ys: Vec<f64> = above.iter().map(|(_, s)| libm::log(*s)).collect();
        let slope = ls_slope(&xs, &ys);
        let note = format!("fitted exponent {slope:.3}, needed {need:.2}");
        let v = if slope >= need {
            Verdict::holds(Evidence::Trend { slope, points: above.len(), note })
        } else {
            Verdict::fails(Evidence::Trend { slope, points: above.len(), note })
        };
        (Some(slope), v)
    };
    Ok(ApproxReport { sups, exponent, reproduced, verdict })
}

/// `b₁ ∘ f = b₂` after normalization.
pub fn preserves_generator(f: &IndexMorphism, b1: &Expr, b2: &Expr) -> bool {
    normalize(&substitute_var(b1, Var::Eps, &f.map)) == normalize(b2)
}

/// Derivation squares, `i(f) = f` and the generator-preserving triangle.
pub fn check_embedding_diagrams(
    sample: &[TestDistribution],
    b: &Expr,
    rho: &Mollifier,
    triangle: Option<(&IndexMorphism, &Expr)>,
    ks: &[Compact],
    sched: &SamplingSchedule,
) -> Result<DiagramReport, EmbedError> {
    check_generator(b, sched)?;
    let mut checks = Vec::new();
    for t in sample {
        if let Some(dt) = t.derivative() {
            let lhs = derive(&representative(t, b, rho), Var::X).map_err(|e| EmbedError::Cgf(e.into()))?;
            let rhs = representative(&dt, b, rho);
            let (exact, verdict) = same(&lhs, &rhs, ks, sched, 1e-8)?;
            checks.push(DiagramCheck { name: format!("derivation[{}]", t.label()), exact, verdict });
        }
        if let TestDistribution::Smooth(f) = t {
            let r = approximation_order(f, b, rho, ks, sched)?;
            checks.push(DiagramCheck { name: format!("identity[{}]", t.label()), exact: false, verdict: r.verdict });
        }
    }
    if let Some((f, b1)) = triangle {
        let b2 = normalize(&substitute_var(b1, Var::Eps, &f.map));
        let arrow = check_ag1(f, &generated_gauge(b1), &generated_gauge(&b2), sched)?;
        checks.push(DiagramCheck { name: "triangle[arrow]".into(), exact: false, verdict: arrow.record.clone() });
        for t in sample {
            let moved = substitute_var(&representative(t, b1, rho), Var::Eps, &f.map);
            let direct = representative(t, &b2, rho);
            let exact = normalize(&moved) == direct;
            let verdict = Verdict::exact(exact, if exact { "substitution identity" } else { "expressions differ" });
            checks.push(DiagramCheck { name: format!("triangle[{}]", t.label()), exact, verdict });
        }
    }
    Ok(DiagramReport::new(checks))
}

/// Linearity on the representative level and injectivity on distinct pairs.
pub fn check_linearity_and_injectivity(
    pairs: &[(TestDistribution, TestDistribution)],
    b: &Expr,
    rho: &Mollifier,
    opts: &EmbedOptions,
) -> Result<DiagramReport, EmbedError> {
    let two = Q::from_integer(BigInt::from(2));
    let omega = Domain::real_line();
    let mut checks = Vec::new();
    for (s, t) in pairs {
        let comb = representative_comb(&[(two.clone(), s.clone()), (Q::one(), t.clone())], b, rho);
        let sum = normalize(&Expr::constant(two.clone()).mul(representative(s, b, rho)).add(representative(t, b, rho)));
        let exact = comb == sum;
        checks.push(DiagramCheck {
            name: format!("linear[2 {} + {}]", s.label(), t.label()),
            exact,
            verdict: Verdict::exact(exact, "representative of the combination equals the combination of representatives"),
        });
        if s != t {
            let us = embed(s, b, rho, omega.clone(), opts)?;
            let ut = embed(t, b, rho, omega.clone(), opts)?;
            let eq = gf_equal(&us, &ut, &opts.ks, opts.max_order, &opts.sched)?;
            checks.push(DiagramCheck { name: format!("injective[{} vs {}]", s.label(), t.label()), exact: false, verdict: eq.negate() });
        }
    }
    Ok(DiagramReport::new(checks))
}

/// `i_b^ρ` transported along a generator-preserving morphism.
pub fn transport_embedding(u: &GenFuncRep, f: &GaugeMorphism) -> Expr {
    normalize(&substitute_var(&u.net.u, Var::Eps, &f.morphism.map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::{parse_with, q, qr, ParseOptions};

    fn p(s: &str) -> Expr {
        parse_with(s, ParseOptions::extended()).unwrap()
    }

    fn inv_eps() -> Expr {
        p("1/eps")
    }

    #[test]
    fn hermite_moments() {
        let quad = MomentQuad::default();
        let g = check_mollifier(&Mollifier::hermite(0).rho, 4, &quad).unwrap();
        assert_eq!(g.order, Some(1));
        assert!((g.moments[2].value - 0.5).abs() < 1e-10);
        assert!(g.decay_ok);
        let h = Mollifier::hermite(2);
        assert_eq!(normalize(&h.rho), normalize(&p("(3/2 - x*x) * pow(pi, -1/2) * exp(-x*x)")));
        let r = check_mollifier(&h.rho, 5, &quad).unwrap();
        assert_eq!(r.order, Some(3));
        assert!((r.moments[4].value + 0.75).abs() < 1e-10);
        for m in [4, 6] {
            let rep = check_mollifier(&Mollifier::hermite(m).rho, m + 2, &quad).unwrap();
            assert_eq!(rep.order, Some(m + 1));
        }
        assert_eq!(Mollifier::from_spec("hermite(2)").unwrap(), h);
        assert!(Mollifier::from_spec("bump(2)").is_err());
    }

    #[test]
    fn scaling_keeps_mass() {
        let rho = Mollifier::hermite(2).rho;
        assert_eq!(normalize(&scale(&rho, &Expr::one())), rho);
        for r in ["1/2", "1/10", "1/100", "1/1000", "10"] {
            let s = scale(&rho, &p(r));
            let rv = p(r).as_const().unwrap().to_f64().unwrap();
            let m = integrate(|x| f64_at(&s, x), -9.0 * rv, 9.0 * rv, QuadSpec { tol: 1e-12, max_intervals: 4000 }).unwrap();
            assert!((m.value - 1.0).abs() < 1e-9, "{r}: {}", m.value);
            assert!((f64_at(&s, 0.0).unwrap() - f64_at(&rho, 0.0).unwrap() / rv).abs() < 1e-9 / rv);
        }
    }

    #[test]
    fn embeddings() {
        let rho = Mollifier::hermite(2);
        let b = inv_eps();
        assert_eq!(representative(&TestDistribution::Delta, &b, &rho), normalize(&scale(&rho.rho, &p("eps"))));
        let h = representative(&TestDistribution::Heaviside, &b, &rho);
        for e in [qr(1, 10), qr(1, 1000), qr(1, 1_000_000)] {
            let v: f64 = eval(&h, &Env::at(&e, ()).with_x(0.0), ()).unwrap();
            assert!((v - 0.5).abs() < 1e-10);
        }
        let opts = EmbedOptions::default();
        let u = embed(&TestDistribution::Delta, &b, &rho, Domain::real_line(), &opts).unwrap();
        assert!(u.moderate.is_holds());
        assert!(embed(&TestDistribution::Delta, &b, &rho, Domain::interval(q(1), q(2)), &opts).is_err());
        assert!(embed(&TestDistribution::Delta, &p("eps"), &rho, Domain::real_line(), &opts).is_err());
    }

    #[test]
    fn approximation() {
        let sched = SamplingSchedule::new(qr(1, 2), qr(1, 2), 10, 30).unwrap();
        let ks = alloc::vec![Compact::new(qr(-1, 2), qr(1, 2)).unwrap()];
        let rho = Mollifier::hermite(2);
        let quad = approximation_order(&p("x*x"), &inv_eps(), &rho, &ks, &sched).unwrap();
        assert!(quad.reproduced && quad.verdict.is_holds());
        let quartic = approximation_order(&p("pow(x,4)"), &inv_eps(), &rho, &ks, &sched).unwrap();
        let k = quartic.exponent.unwrap();
        assert!(k >= 3.75 && quartic.verdict.is_holds(), "{k}");
        let gauss = approximation_order(&p("x*x"), &inv_eps(), &Mollifier::hermite(0), &ks, &sched).unwrap();
        assert!((gauss.exponent.unwrap() - 2.0).abs() < 0.05);
    }

    #[test]
    fn diagrams() {
        let rho = Mollifier::hermite(2);
        let sched = SamplingSchedule::new(qr(1, 2), qr(1, 2), 10, 30).unwrap();
        let ks = alloc::vec![Compact::new(qr(-1, 2), qr(1, 2)).unwrap()];
        let sample = [TestDistribution::Delta, TestDistribution::Heaviside, TestDistribution::DeltaPrime, TestDistribution::Smooth(p("x*x"))];
        let eta = IndexMorphism::eta();
        let rep = check_embedding_diagrams(&sample, &inv_eps(), &rho, Some((&eta, &inv_eps())), &ks, &sched).unwrap();
        assert!(rep.verdict.is_holds(), "{:?}", rep.checks);
        let delta = rep.checks.iter().find(|c| c.name == "derivation[delta]").unwrap();
        assert!(delta.exact);
        assert!(preserves_generator(&eta, &inv_eps(), &p("exp(1/eps)")));
    }

    #[test]
    fn linearity_injectivity() {
        let rho = Mollifier::hermite(2);
        let opts = EmbedOptions { max_order: 0, ..EmbedOptions::default() };
        let pairs = [
            (TestDistribution::Delta, TestDistribution::Heaviside),
            (TestDistribution::Delta, TestDistribution::Smooth(Expr::zero())),
        ];
        let rep = check_linearity_and_injectivity(&pairs, &inv_eps(), &rho, &opts).unwrap();
        assert!(rep.verdict.is_holds(), "{:?}", rep.checks);
        assert_eq!(representative(&TestDistribution::Smooth(Expr::zero()), &inv_eps(), &rho), Expr::zero());
    }
}
