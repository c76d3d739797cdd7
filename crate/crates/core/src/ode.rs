//! Cauchy problems with net coefficients, solved per `ε` and classified in gauges.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::cgf::{ln_sup, moderate_samples, Compact};
use crate::gauge::{Gauge, GaugeMorphism};
use crate::index::IndexSet;
use crate::netlang::normal::{normalize, substitute_var};
use crate::netlang::{derive, eval, DiffError, Env, EvalError, Expr, SamplingSchedule, Var};
use crate::verdict::Verdict;
use crate::wide::Wide;
use crate::Q;

/// Smallest `ε` integrated numerically; stiffness rules out smaller ones.
pub const NUMERIC_EPS_MIN: f64 = 1e-2;
/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Relative tolerance of closed-form residual checks.
pub const CLOSED_FORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("evaluation failed: {0:?}")]
    Eval(EvalError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("right-hand side is not a(eps)*x with a constant in t")]
    NotLinear,
    #[error("solution blows up at eps = {eps}, t = {t}")]
    BlowUp { eps: f64, t: f64 },
    #[error("initial time {0} is outside the interval at eps = {1}")]
    InitialTime(f64, f64),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("morphism is not verified")]
    Unverified,
    #[error("precondition: {msg} ({})", .verdict.tag.as_str())]
    Precondition { msg: String, verdict: Verdict },
    #[error("solution is not moderate after transfer ({})", .0.tag.as_str())]
    TransferFailed(Verdict),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl OdeError {
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            OdeError::Precondition { verdict, .. } | OdeError::TransferFailed(verdict) => Some(verdict),
            _ => None,
        }
    }
}

impl From<EvalError> for OdeError {
    fn from(e: EvalError) -> Self {
        OdeError::Eval(e)
    }
}

/// `x′ = F(ε, x, t)`, `x(t̄(ε)) = x̄(ε)` on `(t₁, t₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeProblem {
    pub rhs: Expr,
    pub t0: Expr,
    pub x0: Expr,
    pub interval: (Q, Q),
}

impl OdeProblem {
    pub fn new(rhs: Expr, t0: Expr, x0: Expr, interval: (Q, Q)) -> Result<Self, OdeError> {
        if interval.0 >= interval.1 {
            return Err(OdeError::Invalid("empty time interval".into()));
        }
        for (name, e) in [("t0", &t0), ("x0", &x0)] {
            if e.mentions(Var::X) || e.mentions(Var::T) || e.mentions(Var::N) {
                return Err(OdeError::Invalid(format!("{name} may only depend on eps")));
            }
        }
        if rhs.mentions(Var::N) || rhs.mentions_param() {
            return Err(OdeError::Invalid("right-hand side may only use eps, x and t".into()));
        }
        Ok(OdeProblem { rhs: normalize(&rhs), t0: normalize(&t0), x0: normalize(&x0), interval })
    }

    /// `x′ = a(ε)·x`, `x(t̄) = x̄`.
    pub fn linear(a: Expr, t0: Expr, x0: Expr, interval: (Q, Q)) -> Result<Self, OdeError> {
        OdeProblem::new(a.mul(Expr::x()), t0, x0, interval)
    }

    /// The coefficient `a(ε)` when `F = a(ε)·x`.
    pub fn linear_coefficient(&self) -> Option<Expr> {
        if self.rhs.mentions(Var::T) {
            return None;
        }
        let a = normalize(&derive(&self.rhs, Var::X).ok()?);
        if a.mentions(Var::X) {
            return None;
        }
        let rest = normalize(&self.rhs.clone().sub(a.clone().mul(Expr::x())));
        rest.is_zero_const().then_some(a)
    }

    pub fn describe(&self) -> String {
        format!(
            "x' = {}, x({}) = {}, t in ({}, {})",
            self.rhs,
            self.t0,
            self.x0,
            crate::netlang::print::rational_string(&self.interval.0),
            crate::netlang::print::rational_string(&self.interval.1)
        )
    }

    fn interval_f64(&self) -> (f64, f64) {
        (self.interval.0.to_f64().unwrap_or(f64::NAN), self.interval.1.to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    ClosedFormLinear,
    Rk4 { h: f64 },
}

/// One `ε` of a numeric solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub eps: Q,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
    /// Richardson estimate of the global error, `|x_h − x_{h/2}| / 15`.
    pub error_estimate: f64,
    pub max_residual: f64,
    pub residual_ok: bool,
    /// Set when `∂F/∂x` could not be formed symbolically.
    pub lipschitz_warning: bool,
}

impl Trajectory {
    /// Linear interpolation in the tabulated values.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let i = self.times.iter().position(|s| *s >= t)?;
        if i == 0 {
            return (self.times[0] == t).then(|| self.values[0]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        Some(self.values[i - 1] * (1.0 - w) + self.values[i] * w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionNet {
    /// `x(ε, t)` written with `eps` and `t`.
    ClosedForm(Expr),
    Numeric(Vec<Trajectory>),
}

impl SolutionNet {
    pub fn closed_form(&self) -> Option<&Expr> {
        match self {
            SolutionNet::ClosedForm(e) => Some(e),
            SolutionNet::Numeric(_) => None,
        }
    }
}

fn wide_at(e: &Expr, eps: &Q, t: f64, x: Option<Wide>) -> Result<Wide, EvalError> {
    let mut env: Env<Wide> = Env::at(eps, ()).with_t(Wide::from_f64(t));
    if let Some(x) = x {
        env = env.with_x(x);
    }
    eval(e, &env, ())
}

fn f64_at(e: &Expr, eps: &Q, t: f64, x: f64) -> Result<f64, EvalError> {
    let env: Env<f64> = Env::at(eps, ()).with_t(t).with_x(x);
    eval(e, &env, ())
}

/// Solves `p` per `ε`; closed form for linear problems, fixed-step RK4 otherwise.
pub fn solve(p: &OdeProblem, sched: &SamplingSchedule, method: Method) -> Result<SolutionNet, OdeError> {
    match method {
        Method::ClosedFormLinear => {
            let a = p.linear_coefficient().ok_or(OdeError::NotLinear)?;
            let shift = Expr::t().sub(p.t0.clone());
            Ok(SolutionNet::ClosedForm(normalize(&p.x0.clone().mul(a.mul(shift).exp()))))
        }
        Method::Rk4 { h } => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(OdeError::Invalid("step must be positive".into()));
            }
            let dfdx = derive(&p.rhs, Var::X).ok().map(|d| normalize(&d));
            let mut out = Vec::new();
            for eps in sched.points() {
                if eps.to_f64().unwrap_or(0.0) < NUMERIC_EPS_MIN {
                    continue;
                }
                out.push(integrate_rk4(p, &eps, h, dfdx.is_none())?);
            }
            Ok(SolutionNet::Numeric(out))
        }
    }
}

fn rk4_step(f: &Expr, eps: &Q, t: f64, x: f64, h: f64) -> Result<f64, EvalError> {
    let k1 = f64_at(f, eps, t, x)?;
    let k2 = f64_at(f, eps, t + h / 2.0, x + h / 2.0 * k1)?;
    let k3 = f64_at(f, eps, t + h / 2.0, x + h / 2.0 * k2)?;
    let k4 = f64_at(f, eps, t + h, x + h * k3)?;
    Ok(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Integrates from `from` to `to` in `n` equal steps, returning all nodes.
fn sweep(f: &Expr, eps: &Q, from: f64, to: f64, x0: f64, n: usize) -> Result<Vec<(f64, f64)>, OdeError> {
    let h = (to - from) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push((from, x));
    for i in 0..n {
        let t = from + h * i as f64;
        let blow = || OdeError::BlowUp { eps: eps.to_f64().unwrap_or(f64::NAN), t: t + h };
        x = match rk4_step(f, eps, t, x, h) {
            Err(EvalError::Overflow) => return Err(blow()),
            r => r?,
        };
        if !x.is_finite() || x.abs() > 1e300 {
            return Err(blow());
        }
        out.push((from + h * (i + 1) as f64, x));
    }
    Ok(out)
}

/// Both directions from `t̄(ε)`, merged in increasing time.
fn two_sided(p: &OdeProblem, eps: &Q, x0: f64, t0: f64, h: f64) -> Result<(Vec<f64>, Vec<f64>), OdeError> {
    let (t1, t2) = p.interval_f64();
    let steps = |len: f64| libm::ceil(len / h).max(1.0) as usize;
    let fwd = if t2 > t0 { sweep(&p.rhs, eps, t0, t2, x0, steps(t2 - t0))? } else { alloc::vec![(t0, x0)] };
    let bwd = if t0 > t1 { sweep(&p.rhs, eps, t0, t1, x0, steps(t0 - t1))? } else { alloc::vec![(t0, x0)] };
    let mut pts: Vec<(f64, f64)> = bwd.into_iter().skip(1).rev().collect();
    pts.extend(fwd);
    Ok(pts.into_iter().unzip())
}

fn integrate_rk4(p: &OdeProblem, eps: &Q, h: f64, lipschitz_warning: bool) -> Result<Trajectory, OdeError> {
    let e = eps.to_f64().unwrap_or(f64::NAN);
    let t0 = eval(&p.t0, &Env::<f64>::at(eps, ()), ())?;
    let x0 = eval(&p.x0, &Env::<f64>::at(eps, ()), ())?;
    let (t1, t2) = p.interval_f64();
    if !(t1 <= t0 && t0 <= t2) {
        return Err(OdeError::InitialTime(t0, e));
    }
    let (times, values) = two_sided(p, eps, x0, t0, h)?;
    let (_, fine) = two_sided(p, eps, x0, t0, h / 2.0)?;
    // every other fine node sits on a coarse node
    let mut error_estimate = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        if let Some(w) = fine.get(2 * i) {
            error_estimate = error_estimate.max((v - w).abs() / 15.0);
        }
    }
    let (max_residual, residual_ok) = residual_check(p, eps, &times, &values)?;
    Ok(Trajectory { eps: eps.clone(), times, values, step: h, error_estimate, max_residual, residual_ok, lipschitz_warning })
}

/// Five-point derivative against `F`, bounded by ten times the per-step local error over `h`.
fn residual_check(p: &OdeProblem, eps: &Q, times: &[f64], values: &[f64]) -> Result<(f64, bool), OdeError> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for i in 2..times.len().saturating_sub(2) {
        let h = times[i + 1] - times[i];
        if (times[i] - times[i - 1] - h).abs() > 1e-12 * h.abs().max(1.0) || (times[i + 2] - times[i + 1] - h).abs() > 1e-12 {
            continue;
        }
        let d = (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h);
        let f = f64_at(&p.rhs, eps, times[i], values[i])?;
        let res = (d - f).abs();
        let one = rk4_step(&p.rhs, eps, times[i], values[i], h)?;
        let half = rk4_step(&p.rhs, eps, times[i], values[i], h / 2.0)?;
        let two = rk4_step(&p.rhs, eps, times[i] + h / 2.0, half, h / 2.0)?;
        let local = (one - two).abs() * 16.0 / 15.0;
        let bound = 10.0 * local / h.abs() + 64.0 * f64::EPSILON * (values[i].abs() / h.abs() + f.abs());
        worst = worst.max(res);
        if res > bound {
            ok = false;
        }
    }
    Ok((worst, ok))
}

/// Largest relative residual of a closed form over the schedule and `n + 1` times in `K`.
pub fn closed_form_residual(p: &OdeProblem, x: &Expr, k: &Compact, sched: &SamplingSchedule, n: usize) -> Result<f64, OdeError> {
    let dx = normalize(&derive(x, Var::T)?);
    let f = normalize(&substitute_var(&p.rhs, Var::X, x));
    let mut worst = 0.0f64;
    for eps in sched.points() {
        let t0 = eval(&p.t0, &Env::<Wide>::at(&eps, ()), ())?;
        let x0 = eval(&p.x0, &Env::<Wide>::at(&eps, ()), ())?;
        let start = wide_at(x, &eps, t0.to_f64(), None)?;
        worst = worst.max(rel(&start, &x0));
        for t in k.grid(n) {
            let (a, b) = (wide_at(&dx, &eps, t, None)?, wide_at(&f, &eps, t, None)?);
            worst = worst.max(rel(&a, &b));
        }
    }
    Ok(worst)
}

fn rel(a: &Wide, b: &Wide) -> f64 {
    let d = a.sub(*b);
    if d.is_zero() {
        return 0.0;
    }
    let scale = a.ln_abs().max(b.ln_abs()).max(0.0);
    libm::exp(d.ln_abs() - scale)
}

/// Whether `x` solves `p` to [`CLOSED_FORM_TOL`].
pub fn satisfies(p: &OdeProblem, x: &Expr, k: &Compact, sched: &SamplingSchedule) -> Result<bool, OdeError> {
    Ok(closed_form_residual(p, x, k, sched, 20)? <= CLOSED_FORM_TOL)
}

fn check_k(p: &OdeProblem, k: &Compact) -> Result<(), OdeError> {
    if !(p.interval.0 < k.lo && k.hi < p.interval.1) {
        return Err(OdeError::Invalid(format!("{} is not inside the time interval", k.label())));
    }
    Ok(())
}

/// Moderateness of the solution and of `x′ = F(x, t)` over `K`.
pub fn classify(sol: &SolutionNet, p: &OdeProblem, g: &Gauge, k: &Compact, sched: &SamplingSchedule) -> Result<Verdict, OdeError> {
    check_k(p, k)?;
    if g.index != IndexSet::Is {
        return Err(OdeError::Unsupported("solutions are nets on (0,1]".into()));
    }
    match sol {
        SolutionNet::ClosedForm(x) => {
            let d1 = normalize(&substitute_var(&p.rhs, Var::X, x));
            let mut parts = Vec::new();
            for (alpha, e) in [(0, x.clone()), (1, d1)] {
                let in_x = substitute_var(&e, Var::T, &Expr::x());
                let mut samples = Vec::new();
                for eps in sched.points() {
                    samples.push((eps.clone(), ln_sup(&in_x, k, &eps)?));
                }
                parts.push((format!("alpha={alpha}"), moderate_samples(&samples, g, sched)));
            }
            Ok(Verdict::all(parts))
        }
        SolutionNet::Numeric(ts) => {
            let (lo, hi) = (k.lo.to_f64().unwrap_or(f64::NAN), k.hi.to_f64().unwrap_or(f64::NAN));
            let mut s0 = Vec::new();
            let mut s1 = Vec::new();
            for tr in ts {
                let mut m0 = f64::NEG_INFINITY;
                let mut m1 = f64::NEG_INFINITY;
                for (t, v) in tr.times.iter().zip(&tr.values) {
                    if *t >= lo && *t <= hi {
                        m0 = m0.max(libm::log(v.abs()));
                        m1 = m1.max(libm::log(f64_at(&p.rhs, &tr.eps, *t, *v)?.abs()));
                    }
                }
                s0.push((tr.eps.clone(), m0));
                s1.push((tr.eps.clone(), m1));
            }
            Ok(Verdict::all(alloc::vec![
                ("alpha=0".into(), moderate_samples(&s0, g, sched)),
                ("alpha=1".into(), moderate_samples(&s1, g, sched)),
            ]))
        }
    }
}

/// `ε ← m(ε)` in `F`, `t̄` and `x̄`.
pub fn transform(p: &OdeProblem, m: &GaugeMorphism) -> Result<OdeProblem, OdeError> {
    if !m.verified() {
        return Err(OdeError::Unverified);
    }
    let map = &m.morphism.map;
    let sub = |e: &Expr| normalize(&substitute_var(e, Var::Eps, map));
    OdeProblem::new(sub(&p.rhs), sub(&p.t0), sub(&p.x0), p.interval.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transfer {
    pub solution: SolutionNet,
    pub problem: OdeProblem,
    pub source: Verdict,
    pub target: Verdict,
    pub residual: f64,
}

/// `y = [x_{m(ε)}]`, checked moderate in the target gauge and against the transformed problem.
pub fn transfer_solution(sol: &SolutionNet, p: &OdeProblem, m: &GaugeMorphism, k: &Compact, sched: &SamplingSchedule) -> Result<Transfer, OdeError> {
    if !m.verified() {
        return Err(OdeError::Unverified);
    }
    let x = sol.closed_form().ok_or_else(|| OdeError::Unsupported("numeric solutions are transferred by solving the transformed problem".into()))?;
    let source = classify(sol, p, &m.source.b, k, sched)?;
    if !source.is_holds() {
        return Err(OdeError::Precondition { msg: "solution is not moderate in the source gauge".into(), verdict: source });
    }
    let y = SolutionNet::ClosedForm(normalize(&substitute_var(x, Var::Eps, &m.morphism.map)));
    let problem = transform(p, m)?;
    let target = classify(&y, &problem, &m.target.b, k, sched)?;
    if !target.is_holds() {
        return Err(OdeError::TransferFailed(target));
    }
    let residual = closed_form_residual(&problem, y.closed_form().expect("closed form"), k, sched, 20)?;
    Ok(Transfer { solution: y, problem, source, target, residual })
}

/// Linear problems used to exercise solvability transfer.
pub fn zoo_problems() -> Vec<(&'static str, OdeProblem)> {
    let iv = || (Q::from_integer((-1).into()), Q::from_integer(2.into()));
    let p = |s: &str| crate::netlang::parse(s).expect("zoo expression parses");
    alloc::vec![
        ("growth", OdeProblem::linear(p("1/eps"), Expr::zero(), Expr::one(), iv()).expect("valid")),
        ("constant", OdeProblem::linear(Expr::zero(), Expr::zero(), Expr::one(), iv()).expect("valid")),
        ("decay", OdeProblem::linear(p("-1/eps"), Expr::zero(), p("2"), iv()).expect("valid")),
        ("double", OdeProblem::linear(p("2/eps"), Expr::zero(), Expr::one(), iv()).expect("valid")),
        ("shifted", OdeProblem::linear(p("1/eps"), p("1/2"), p("3"), iv()).expect("valid")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{check_ag1, GaugePair, MorphismKind};
    use crate::index::IndexMorphism;
    use crate::netlang::{parse, q, qr};

    fn unit() -> Compact {
        Compact::new(q(0), q(1)).unwrap()
    }

    fn ode() -> OdeProblem {
        OdeProblem::linear(parse("1/eps").unwrap(), Expr::zero(), Expr::one(), (q(-1), q(2))).unwrap()
    }

    fn lambda(s: &SamplingSchedule) -> GaugeMorphism {
        check_ag1(&IndexMorphism::lambda(), &Gauge::exp(), &Gauge::pol(), s).unwrap()
    }

    #[test]
    fn closed_forms() {
        let s = SamplingSchedule::default();
        let sol = solve(&ode(), &s, Method::ClosedFormLinear).unwrap();
        assert_eq!(sol.closed_form().unwrap(), &normalize(&parse("exp(t/eps)").unwrap()));
        assert!(satisfies(&ode(), sol.closed_form().unwrap(), &unit(), &s).unwrap());
        let flat = OdeProblem::linear(Expr::zero(), Expr::zero(), parse("eps").unwrap(), (q(-1), q(2))).unwrap();
        assert_eq!(solve(&flat, &s, Method::ClosedFormLinear).unwrap().closed_form().unwrap(), &Expr::eps());
        let nonlinear = OdeProblem::new(parse("pow(x,2)").unwrap(), Expr::zero(), Expr::one(), (q(-1), q(2))).unwrap();
        assert_eq!(solve(&nonlinear, &s, Method::ClosedFormLinear), Err(OdeError::NotLinear));
    }

    #[test]
    fn classification() {
        let s = SamplingSchedule::default();
        let sol = solve(&ode(), &s, Method::ClosedFormLinear).unwrap();
        assert!(classify(&sol, &ode(), &Gauge::pol(), &unit(), &s).unwrap().is_fails());
        assert!(classify(&sol, &ode(), &Gauge::exp(), &unit(), &s).unwrap().is_holds());
        let tr = transform(&ode(), &lambda(&s)).unwrap();
        let y = solve(&tr, &s, Method::ClosedFormLinear).unwrap();
        assert!(classify(&y, &tr, &Gauge::pol(), &unit(), &s).unwrap().is_holds());
    }

    #[test]
    fn transform_and_transfer() {
        let s = SamplingSchedule::default();
        let lam = lambda(&s);
        let tr = transform(&ode(), &lam).unwrap();
        let expected = OdeProblem::linear(parse("-log(eps)").unwrap(), Expr::zero(), Expr::one(), (q(-1), q(2))).unwrap();
        assert_eq!(tr, expected);
        let id = check_ag1(&IndexMorphism::identity(IndexSet::Is), &Gauge::pol(), &Gauge::pol(), &s).unwrap();
        assert_eq!(transform(&ode(), &id).unwrap(), ode());
        let eta = check_ag1(&IndexMorphism::eta(), &Gauge::pol(), &Gauge::exp(), &s).unwrap();
        assert_eq!(transform(&tr, &eta).unwrap(), ode());

        let sol = solve(&ode(), &s, Method::ClosedFormLinear).unwrap();
        let t = transfer_solution(&sol, &ode(), &lam, &unit(), &s).unwrap();
        assert_eq!(t.solution.closed_form().unwrap(), &normalize(&parse("powg(eps,-t)").unwrap()));
        assert!(t.target.is_holds() && t.residual <= CLOSED_FORM_TOL);
        let back = transfer_solution(&t.solution, &tr, &eta, &unit(), &s).unwrap();
        assert_eq!(back.solution.closed_form().unwrap(), sol.closed_form().unwrap());
        let flat = OdeProblem::linear(Expr::zero(), Expr::zero(), parse("7").unwrap(), (q(-1), q(2))).unwrap();
        let c = solve(&flat, &s, Method::ClosedFormLinear).unwrap();
        assert_eq!(transfer_solution(&c, &flat, &lam, &unit(), &s).unwrap().solution, c);
        let unverified = GaugeMorphism { record: Verdict::exact(false, "x"), ..lam.clone() };
        assert_eq!(transform(&ode(), &unverified), Err(OdeError::Unverified));
        assert_eq!(lam.kind, MorphismKind::Ag1);
        let _ = GaugePair::diagonal(Gauge::pol());
    }

    #[test]
    fn rk4_cross_check() {
        let s = SamplingSchedule::default();
        let tr = transform(&ode(), &lambda(&s)).unwrap();
        let num = solve(&tr, &s, Method::Rk4 { h: DEFAULT_STEP }).unwrap();
        let SolutionNet::Numeric(ts) = &num else { panic!() };
        assert_eq!(ts.len(), 2);
        let at = ts.iter().find(|t| t.eps == qr(1, 10)).unwrap();
        assert!((at.value_at(1.0).unwrap() - 10.0).abs() < 1e-6);
        let closed = solve(&tr, &s, Method::ClosedFormLinear).unwrap();
        for tr_ in ts {
            assert!(tr_.residual_ok, "{}", tr_.max_residual);
            for t in [0.0, 0.25, 0.5, 1.0] {
                let exact = wide_at(closed.closed_form().unwrap(), &tr_.eps, t, None).unwrap().to_f64();
                assert!((tr_.value_at(t).unwrap() - exact).abs() <= 1e-6 * exact.abs());
            }
        }
        let stiff = solve(&ode(), &s, Method::Rk4 { h: DEFAULT_STEP }).unwrap();
        let SolutionNet::Numeric(ts) = stiff else { panic!() };
        assert!(ts.iter().all(|t| t.residual_ok && t.error_estimate.is_finite()));
        let blow = OdeProblem::new(parse("x*x").unwrap(), Expr::zero(), Expr::one(), (q(0), q(2))).unwrap();
        let r = solve(&blow, &s, Method::Rk4 { h: DEFAULT_STEP });
        assert!(matches!(r, Err(OdeError::BlowUp { .. })), "{r:?}");
    }

    #[test]
    fn solvability_transfer() {
        let s = SamplingSchedule::default();
        let lam = lambda(&s);
        for (name, p) in zoo_problems() {
            let sol = solve(&p, &s, Method::ClosedFormLinear).unwrap();
            let moved = transfer_solution(&sol, &p, &lam, &unit(), &s).unwrap();
            let direct = solve(&transform(&p, &lam).unwrap(), &s, Method::ClosedFormLinear).unwrap();
            let (a, b) = (moved.solution.closed_form().unwrap(), direct.closed_form().unwrap());
            for eps in s.points() {
                for t in unit().grid(10) {
                    let (va, vb) = (wide_at(a, &eps, t, None).unwrap(), wide_at(b, &eps, t, None).unwrap());
                    assert!(rel(&va, &vb) < 1e-12, "{name}");
                }
            }
        }
    }
}
