//! Evaluation over interchangeable number systems.
//!
//! [`Scalar`] is implemented by `f64` (fast, narrow range), [`Wide`] (binary64
//! significand with a 64-bit exponent), [`BigFloat`] (arbitrary precision) and
//! [`Interval`] (outward-rounded enclosures). Evaluation never yields NaN or
//! infinities; anything undefined is an [`EvalError`].

use core::cmp::Ordering;
use core::fmt::Debug;

use num_traits::{Signed, ToPrimitive, Zero};

use super::expr::{BinaryOp, Expr, UnaryOp, Var};
use crate::bigfloat::{self, BigFloat, FloatError, Interval, Round};
use crate::quad::{integrate, QuadError, QuadSpec};
use crate::wide::Wide;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("division by zero")]
    DivByZero,
    #[error("overflow")]
    Overflow,
    #[error("variable `{0}` is not bound")]
    Unbound(&'static str),
    #[error("unsupported in this number system: {0}")]
    Unsupported(&'static str),
    #[error("quadrature did not converge")]
    Quadrature,
    #[error("precision limit exceeded")]
    Precision,
}

impl From<FloatError> for EvalError {
    fn from(e: FloatError) -> Self {
        match e {
            FloatError::Domain => EvalError::Domain("argument outside domain"),
            FloatError::DivByZero => EvalError::DivByZero,
            FloatError::Overflow => EvalError::Overflow,
            FloatError::Precision => EvalError::Precision,
        }
    }
}

pub trait Scalar: Clone + Debug + Sized {
    type Ctx: Copy + Debug;

    fn from_q(q: &Q, c: Self::Ctx) -> Self;
    /// Converts an approximate binary64 result carrying absolute error `tol`.
    fn from_approx(v: f64, tol: f64, c: Self::Ctx) -> Result<Self, EvalError>;
    fn pi(c: Self::Ctx) -> Result<Self, EvalError>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn add(&self, o: &Self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn sub(&self, o: &Self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn mul(&self, o: &Self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn div(&self, o: &Self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn exp(&self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn ln(&self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn sin(&self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn cos(&self, c: Self::Ctx) -> Result<Self, EvalError>;
    fn floor(&self) -> Self;
    fn pow_q(&self, q: &Q, c: Self::Ctx) -> Result<Self, EvalError>;
    fn min(&self, o: &Self) -> Self;
    fn max(&self, o: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// `ln|v|` without overflow; `-inf` for zero.
    fn ln_abs(&self) -> f64;
    /// Comparison with a rational when it can be decided.
    fn cmp_q(&self, q: &Q, c: Self::Ctx) -> Option<Ordering>;
}

fn check(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Overflow)
    }
}

impl Scalar for f64 {
    type Ctx = ();

    fn from_q(q: &Q, _: ()) -> f64 {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn from_approx(v: f64, _: f64, _: ()) -> Result<f64, EvalError> {
        check(v)
    }
    fn pi(_: ()) -> Result<f64, EvalError> {
        Ok(core::f64::consts::PI)
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn abs(&self) -> f64 {
        libm::fabs(*self)
    }
    fn add(&self, o: &f64, _: ()) -> Result<f64, EvalError> {
        check(self + o)
    }
    fn sub(&self, o: &f64, _: ()) -> Result<f64, EvalError> {
        check(self - o)
    }
    fn mul(&self, o: &f64, _: ()) -> Result<f64, EvalError> {
        check(self * o)
    }
    fn div(&self, o: &f64, _: ()) -> Result<f64, EvalError> {
        if *o == 0.0 {
            return Err(EvalError::DivByZero);
        }
        check(self / o)
    }
    fn exp(&self, _: ()) -> Result<f64, EvalError> {
        check(libm::exp(*self))
    }
    fn ln(&self, _: ()) -> Result<f64, EvalError> {
        if *self <= 0.0 {
            return Err(EvalError::Domain("log of a non-positive value"));
        }
        Ok(libm::log(*self))
    }
    fn sin(&self, _: ()) -> Result<f64, EvalError> {
        Ok(libm::sin(*self))
    }
    fn cos(&self, _: ()) -> Result<f64, EvalError> {
        Ok(libm::cos(*self))
    }
    fn floor(&self) -> f64 {
        libm::floor(*self)
    }
    fn pow_q(&self, q: &Q, _: ()) -> Result<f64, EvalError> {
        if let Some(k) = q.to_integer().to_i32().filter(|_| q.is_integer()) {
            if *self == 0.0 && k < 0 {
                return Err(EvalError::DivByZero);
            }
            return check(libm::pow(*self, k as f64));
        }
        let qf = q.to_f64().unwrap_or(f64::NAN);
        if *self < 0.0 {
            let den_odd = q.denom().to_i64().is_some_and(|d| d % 2 == 1);
            if !den_odd {
                return Err(EvalError::Domain("even root of a negative value"));
            }
            let mag = libm::pow(-self, qf);
            let odd_num = q.numer().to_i64().is_some_and(|n| n % 2 != 0);
            return check(if odd_num { -mag } else { mag });
        }
        if *self == 0.0 && q.is_negative() {
            return Err(EvalError::DivByZero);
        }
        check(libm::pow(*self, qf))
    }
    fn min(&self, o: &f64) -> f64 {
        f64::min(*self, *o)
    }
    fn max(&self, o: &f64) -> f64 {
        f64::max(*self, *o)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ln_abs(&self) -> f64 {
        libm::log(libm::fabs(*self))
    }
    fn cmp_q(&self, q: &Q, _: ()) -> Option<Ordering> {
        let b = BigFloat::from_f64(*self)?;
        Some(b.to_q().cmp(q))
    }
}

impl Scalar for Wide {
    type Ctx = ();

    fn from_q(q: &Q, _: ()) -> Wide {
        // exact num/den ratio even for huge rationals
        let n = BigFloat::from_bigint(q.numer());
        let d = BigFloat::from_bigint(q.denom());
        match n.div(&d, bigfloat::Ctx::new(60)) {
            Ok(v) => wide_from_big(&v),
            Err(_) => Wide::ZERO,
        }
    }
    fn from_approx(v: f64, _: f64, _: ()) -> Result<Wide, EvalError> {
        check(v).map(Wide::from_f64)
    }
    fn pi(_: ()) -> Result<Wide, EvalError> {
        Ok(Wide::from_f64(core::f64::consts::PI))
    }
    fn neg(&self) -> Wide {
        Wide::neg(*self)
    }
    fn abs(&self) -> Wide {
        Wide::abs(*self)
    }
    fn add(&self, o: &Wide, _: ()) -> Result<Wide, EvalError> {
        wide_ok(Wide::add(*self, *o))
    }
    fn sub(&self, o: &Wide, _: ()) -> Result<Wide, EvalError> {
        wide_ok(Wide::sub(*self, *o))
    }
    fn mul(&self, o: &Wide, _: ()) -> Result<Wide, EvalError> {
        wide_ok(Wide::mul(*self, *o))
    }
    fn div(&self, o: &Wide, _: ()) -> Result<Wide, EvalError> {
        Wide::div(*self, *o).ok_or(EvalError::DivByZero).and_then(wide_ok)
    }
    fn exp(&self, _: ()) -> Result<Wide, EvalError> {
        wide_ok(Wide::exp(*self))
    }
    fn ln(&self, _: ()) -> Result<Wide, EvalError> {
        Wide::ln(*self).ok_or(EvalError::Domain("log of a non-positive value"))
    }
    fn sin(&self, _: ()) -> Result<Wide, EvalError> {
        let v = self.to_f64();
        if !v.is_finite() || libm::fabs(v) > 1e15 {
            return Err(EvalError::Precision);
        }
        Ok(Wide::from_f64(libm::sin(v)))
    }
    fn cos(&self, _: ()) -> Result<Wide, EvalError> {
        let v = self.to_f64();
        if !v.is_finite() || libm::fabs(v) > 1e15 {
            return Err(EvalError::Precision);
        }
        Ok(Wide::from_f64(libm::cos(v)))
    }
    fn floor(&self) -> Wide {
        Wide::floor(*self)
    }
    fn pow_q(&self, q: &Q, _: ()) -> Result<Wide, EvalError> {
        if self.is_zero() {
            return if q.is_positive() {
                Ok(Wide::ZERO)
            } else if q.is_zero() {
                Ok(Wide::from_f64(1.0))
            } else {
                Err(EvalError::DivByZero)
            };
        }
        let qf = q.to_f64().unwrap_or(f64::NAN);
        let neg = self.signum() < 0.0;
        if neg && !q.is_integer() && !q.denom().to_i64().is_some_and(|d| d % 2 == 1) {
            return Err(EvalError::Domain("even root of a negative value"));
        }
        let odd_num = q.numer().to_i64().is_some_and(|n| n % 2 != 0);
        let sign = if neg && odd_num { -1.0 } else { 1.0 };
        wide_ok(Wide::from_ln(self.ln_abs() * qf, sign))
    }
    fn min(&self, o: &Wide) -> Wide {
        Wide::min(*self, *o)
    }
    fn max(&self, o: &Wide) -> Wide {
        Wide::max(*self, *o)
    }
    fn to_f64(&self) -> f64 {
        Wide::to_f64(self)
    }
    fn ln_abs(&self) -> f64 {
        Wide::ln_abs(self)
    }
    fn cmp_q(&self, q: &Q, _: ()) -> Option<Ordering> {
        let w = <Wide as Scalar>::from_q(q, ());
        Some(self.cmp_total(&w))
    }
}

fn wide_ok(w: Wide) -> Result<Wide, EvalError> {
    if w.is_finite() {
        Ok(w)
    } else {
        Err(EvalError::Overflow)
    }
}

/// Nearest `Wide` to a big float.
pub fn wide_from_big(v: &BigFloat) -> Wide {
    if v.is_zero() {
        return Wide::ZERO;
    }
    let top = v.top();
    let scaled = v.mul_pow2(-top).to_f64();
    Wide::from_f64(scaled).mul_pow2(top)
}

impl Scalar for BigFloat {
    type Ctx = bigfloat::Ctx;

    fn from_q(q: &Q, c: bigfloat::Ctx) -> BigFloat {
        BigFloat::from_q(q, c)
    }
    fn from_approx(v: f64, _: f64, _: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        BigFloat::from_f64(v).ok_or(EvalError::Overflow)
    }
    fn pi(c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::pi(c)?)
    }
    fn neg(&self) -> BigFloat {
        BigFloat::neg(self)
    }
    fn abs(&self) -> BigFloat {
        BigFloat::abs(self)
    }
    fn add(&self, o: &BigFloat, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::add(self, o, c))
    }
    fn sub(&self, o: &BigFloat, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::sub(self, o, c))
    }
    fn mul(&self, o: &BigFloat, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::mul(self, o, c))
    }
    fn div(&self, o: &BigFloat, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::div(self, o, c)?)
    }
    fn exp(&self, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::exp(self, c)?)
    }
    fn ln(&self, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        BigFloat::ln(self, c).map_err(|e| match e {
            FloatError::Domain => EvalError::Domain("log of a non-positive value"),
            e => e.into(),
        })
    }
    fn sin(&self, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::sin(self, c)?)
    }
    fn cos(&self, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::cos(self, c)?)
    }
    fn floor(&self) -> BigFloat {
        BigFloat::floor(self)
    }
    fn pow_q(&self, q: &Q, c: bigfloat::Ctx) -> Result<BigFloat, EvalError> {
        Ok(BigFloat::pow_q(self, q, c)?)
    }
    fn min(&self, o: &BigFloat) -> BigFloat {
        BigFloat::min(self, o).clone()
    }
    fn max(&self, o: &BigFloat) -> BigFloat {
        BigFloat::max(self, o).clone()
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn ln_abs(&self) -> f64 {
        self.ln_abs_f64()
    }
    fn cmp_q(&self, q: &Q, _: bigfloat::Ctx) -> Option<Ordering> {
        Some(self.to_q().cmp(q))
    }
}

impl Scalar for Interval {
    type Ctx = u32;

    fn from_q(q: &Q, prec: u32) -> Interval {
        Interval::from_q(q, prec)
    }
    fn from_approx(_: f64, _: f64, _: u32) -> Result<Interval, EvalError> {
        Err(EvalError::Unsupported("quadrature has no certified enclosure"))
    }
    fn pi(prec: u32) -> Result<Interval, EvalError> {
        let c = bigfloat::Ctx::new(prec);
        Ok(Interval { lo: BigFloat::pi(c.with_round(Round::Down))?, hi: BigFloat::pi(c.with_round(Round::Up))? })
    }
    fn neg(&self) -> Interval {
        Interval::neg(self)
    }
    fn abs(&self) -> Interval {
        Interval::abs(self)
    }
    fn add(&self, o: &Interval, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::add(self, o, p))
    }
    fn sub(&self, o: &Interval, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::sub(self, o, p))
    }
    fn mul(&self, o: &Interval, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::mul(self, o, p))
    }
    fn div(&self, o: &Interval, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::div(self, o, p)?)
    }
    fn exp(&self, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::exp(self, p)?)
    }
    fn ln(&self, p: u32) -> Result<Interval, EvalError> {
        Interval::ln(self, p).map_err(|e| match e {
            FloatError::Domain => EvalError::Domain("log of a possibly non-positive value"),
            e => e.into(),
        })
    }
    fn sin(&self, p: u32) -> Result<Interval, EvalError> {
        Ok(self.sin_cos(p)?.0)
    }
    fn cos(&self, p: u32) -> Result<Interval, EvalError> {
        Ok(self.sin_cos(p)?.1)
    }
    fn floor(&self) -> Interval {
        Interval::floor(self)
    }
    fn pow_q(&self, q: &Q, p: u32) -> Result<Interval, EvalError> {
        Ok(Interval::pow_q(self, q, p)?)
    }
    fn min(&self, o: &Interval) -> Interval {
        Interval::min(self, o)
    }
    fn max(&self, o: &Interval) -> Interval {
        Interval::max(self, o)
    }
    fn to_f64(&self) -> f64 {
        let c = bigfloat::Ctx::new(64);
        self.lo.add(&self.hi, c).mul_pow2(-1).to_f64()
    }
    fn ln_abs(&self) -> f64 {
        let c = bigfloat::Ctx::new(64);
        self.lo.add(&self.hi, c).mul_pow2(-1).ln_abs_f64()
    }
    fn cmp_q(&self, q: &Q, prec: u32) -> Option<Ordering> {
        let other = Interval::from_q(q, prec);
        if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            return Some(Ordering::Equal);
        }
        self.certainly_cmp(&other)
    }
}

/// Values bound to the free variables.
#[derive(Clone, Debug)]
pub struct Env<S> {
    pub eps: Option<S>,
    pub n: Option<S>,
    pub x: Option<S>,
    pub t: Option<S>,
    pub param: Option<S>,
    /// Exact value of `eps` when known; hybrid switches compare against it.
    pub eps_q: Option<Q>,
}

impl<S> Default for Env<S> {
    fn default() -> Self {
        Env { eps: None, n: None, x: None, t: None, param: None, eps_q: None }
    }
}

impl<S: Clone> Env<S> {
    pub fn eps(v: S) -> Self {
        Env { eps: Some(v), ..Env::default() }
    }

    /// Binds `eps` to the rational `q`, rounded into the number system.
    pub fn at(q: &Q, c: S::Ctx) -> Self
    where
        S: Scalar,
    {
        Env { eps: Some(S::from_q(q, c)), eps_q: Some(q.clone()), ..Env::default() }
    }

    pub fn with_x(mut self, v: S) -> Self {
        self.x = Some(v);
        self
    }

    pub fn with_t(mut self, v: S) -> Self {
        self.t = Some(v);
        self
    }

    pub fn with_n(mut self, v: S) -> Self {
        self.n = Some(v);
        self
    }

    pub fn with_param(mut self, v: S) -> Self {
        self.param = Some(v);
        self
    }

    fn get(&self, v: Var) -> Result<&S, EvalError> {
        let slot = match v {
            Var::Eps => &self.eps,
            Var::N => &self.n,
            Var::X => &self.x,
            Var::T => &self.t,
        };
        slot.as_ref().ok_or(EvalError::Unbound(v.name()))
    }
}

/// Absolute tolerance used for the quadrature-backed nodes.
pub const NODE_QUAD_TOL: f64 = 1e-13;

/// Evaluates `e` under `env`.
pub fn eval<S: Scalar>(e: &Expr, env: &Env<S>, c: S::Ctx) -> Result<S, EvalError> {
    match e {
        Expr::Var(v) => Ok(env.get(*v)?.clone()),
        Expr::Param => env.param.clone().ok_or(EvalError::Unbound("m")),
        Expr::Const(q) => Ok(S::from_q(q, c)),
        Expr::Pi => S::pi(c),
        Expr::Unary(op, a) => {
            let v = eval(a, env, c)?;
            match op {
                UnaryOp::Neg => Ok(v.neg()),
                UnaryOp::Abs => Ok(v.abs()),
                UnaryOp::Exp => v.exp(c),
                UnaryOp::Log => v.ln(c),
                UnaryOp::Floor => Ok(v.floor()),
                UnaryOp::Sin => v.sin(c),
                UnaryOp::Cos => v.cos(c),
            }
        }
        Expr::Binary(op, a, b) => {
            let (x, y) = (eval(a, env, c)?, eval(b, env, c)?);
            match op {
                BinaryOp::Add => x.add(&y, c),
                BinaryOp::Sub => x.sub(&y, c),
                BinaryOp::Mul => x.mul(&y, c),
                BinaryOp::Div => x.div(&y, c),
                BinaryOp::Min => Ok(x.min(&y)),
                BinaryOp::Max => Ok(x.max(&y)),
            }
        }
        Expr::Pow(a, q) => eval(a, env, c)?.pow_q(q, c),
        Expr::PowGeneral(a, b) => {
            let base = eval(a, env, c)?;
            let ex = eval(b, env, c)?;
            if base.cmp_q(&Q::zero(), c) != Some(Ordering::Greater) {
                return Err(EvalError::Domain("general power needs a positive base"));
            }
            ex.mul(&base.ln(c)?, c)?.exp(c)
        }
        Expr::Compose(body, f) => {
            let inner = eval(f, env, c)?;
            let mut env2 = env.clone();
            env2.eps = Some(inner);
            env2.eps_q = None;
            eval(body, &env2, c)
        }
        Expr::Hybrid(h) => {
            let eps = env.get(Var::Eps)?;
            let undecided = core::cell::Cell::new(false);
            let exact = env.eps_q.as_ref();
            let block = h.block_of(|s| match exact.map(|q| q.cmp(s)).or_else(|| eps.cmp_q(s, c)) {
                Some(Ordering::Greater) => false,
                Some(_) => true,
                None => {
                    undecided.set(true);
                    false
                }
            });
            if undecided.get() {
                return Err(EvalError::Precision);
            }
            eval(h.branch(block), env, c)
        }
        Expr::Primitive(p) => {
            let u = eval(&p.upper, env, c)?.to_f64();
            let r = p.radius.to_f64().unwrap_or(0.0);
            let hi = u.min(r);
            if hi <= -r {
                return S::from_approx(0.0, NODE_QUAD_TOL, c);
            }
            let v = quad_f64(&p.rho, -r, hi)?;
            S::from_approx(v, NODE_QUAD_TOL, c)
        }
        Expr::Convolve(node) => {
            let at = eval(&node.at, env, c)?.to_f64();
            let b = eval(&node.scale, env, c)?.to_f64();
            if b == 0.0 || !b.is_finite() {
                return Err(EvalError::Overflow);
            }
            let r = node.radius.to_f64().unwrap_or(0.0);
            let f = &node.f;
            let rho = &node.rho;
            let res = integrate(
                |s: f64| -> Result<f64, EvalError> {
                    let fx: f64 = eval(f, &Env::default().with_x(at - s / b), ())?;
                    let rs: f64 = eval(rho, &Env::default().with_x(s), ())?;
                    Ok(fx * rs)
                },
                -r,
                r,
                QuadSpec { tol: NODE_QUAD_TOL, max_intervals: 4000 },
            )
            .map_err(quad_err)?;
            S::from_approx(res.value, NODE_QUAD_TOL, c)
        }
    }
}

fn quad_f64(rho: &Expr, a: f64, b: f64) -> Result<f64, EvalError> {
    integrate(
        |s: f64| eval::<f64>(rho, &Env::default().with_x(s), ()),
        a,
        b,
        QuadSpec { tol: NODE_QUAD_TOL, max_intervals: 4000 },
    )
    .map(|r| r.value)
    .map_err(quad_err)
}

fn quad_err(e: QuadError<EvalError>) -> EvalError {
    match e {
        QuadError::Integrand(e) => e,
        QuadError::NoConvergence(_) => EvalError::Quadrature,
    }
}

/// Binary64 evaluation at `ε`.
pub fn eval_f64(e: &Expr, eps: f64) -> Result<f64, EvalError> {
    eval(e, &Env::eps(eps), ())
}

/// Big-float evaluation at a rational `ε` with `digits` significant digits.
pub fn eval_big(e: &Expr, eps: &Q, digits: u32) -> Result<BigFloat, EvalError> {
    let ctx = bigfloat::Ctx::from_digits(digits + 10);
    let v: BigFloat = eval(e, &Env::at(eps, ctx), ctx)?;
    Ok(v.round_to(bigfloat::Ctx::from_digits(digits)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::expr::{q, qr};
    use crate::netlang::parse::parse;

    #[test]
    fn reference_values() {
        assert_eq!(eval_f64(&parse("pow(eps, 2)").unwrap(), 0.5).unwrap(), 0.25);
        let inv_e = libm::exp(-1.0);
        assert!((eval_f64(&Expr::lambda(), inv_e).unwrap() - 1.0).abs() < 1e-15);
        let v = eval_big(&parse("exp(1/eps)").unwrap(), &qr(1, 1000), 50).unwrap();
        assert!(v.to_sci_string(50).starts_with("1.97007111401704699388887935224332312531693798532"));
        assert!(eval_f64(&parse("log(eps - 1)").unwrap(), 0.5).is_err());
        assert!(matches!(eval_f64(&parse("1 / (eps - eps)").unwrap(), 0.5), Err(EvalError::DivByZero)));
        assert!(matches!(eval_f64(&parse("exp(1/eps)").unwrap(), 1e-3), Err(EvalError::Overflow)));
    }

    #[test]
    fn wide_reaches_tiny_eps() {
        let e = parse("exp(1/eps)").unwrap();
        let v: Wide = eval(&e, &Env::eps(Wide::from_f64(1e-6)), ()).unwrap();
        assert!((v.ln_abs() - 1e6).abs() < 1e-6);
        let w: Wide = <Wide as Scalar>::from_q(&q(3), ());
        assert_eq!(w.to_f64(), 3.0);
    }

    #[test]
    fn intervals_enclose() {
        let e = parse("exp(10) - 200").unwrap();
        let v: Interval = eval(&e, &Env::default(), 128).unwrap();
        assert!(v.lo.to_f64() > 21826.0 && v.hi.to_f64() < 21827.0);
        assert_eq!(v.cmp_q(&q(0), 128), Some(Ordering::Greater));
    }
}
