//! Canonical sum-of-monomials normal form.
//!
//! A [`Poly`] is a finite sum `Σ c_i · M_i` with rational coefficients. A
//! [`Mono`] is a product of atom powers times `exp(R)` where the residual `R`
//! is again a `Poly`. The atoms `ε`, `L = −log ε` and `E = e^{1/ε}` carry the
//! growth fragment; everything the rewriting cannot see through becomes an
//! `Opaque` atom wrapping an already-normalized expression.
//!
//! Rewrites applied while building the form:
//! * `exp(q·L) = ε^{−q}`, `exp(q/ε) = E^q`, `exp(q·log u) = u^q`;
//! * `log` of a single positive monomial splits into its parts;
//! * fractional powers distribute only over atoms known to be positive;
//! * integer powers of sums expand while the result stays small;
//! * compositions are inlined by substitution.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{BinaryOp, ConvolveNode, Expr, HybridNet, PrimitiveNode, UnaryOp, Var};
use crate::Q;

const MAX_TERMS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Eps,
    /// `−log ε`
    NegLog,
    /// `exp(1/ε)`
    ExpInv,
    N,
    X,
    T,
    Param,
    Pi,
    /// Positive rational base carrying a fractional exponent, e.g. `2^{1/2}`.
    Rad(Q),
    Opaque(Expr),
}

impl Atom {
    /// Strictly positive wherever defined on the index domain.
    pub fn positive(&self) -> bool {
        matches!(self, Atom::Eps | Atom::NegLog | Atom::ExpInv | Atom::N | Atom::Pi | Atom::Rad(_))
            || matches!(self, Atom::Opaque(Expr::Unary(UnaryOp::Exp, _)))
    }

    /// Atoms whose powers are constants.
    pub fn is_constant(&self) -> bool {
        matches!(self, Atom::Pi | Atom::Rad(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub factors: BTreeMap<Atom, Q>,
    pub exp_arg: Poly,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

impl Mono {
    pub fn one() -> Mono {
        Mono::default()
    }

    pub fn atom(a: Atom, e: Q) -> Mono {
        let mut m = Mono::default();
        if !e.is_zero() {
            m.factors.insert(a, e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp_arg.is_zero()
    }

    /// Product of two monomials plus the rational factor split off radicals.
    fn mul(&self, o: &Mono) -> (Mono, Q) {
        let mut factors = self.factors.clone();
        for (a, e) in &o.factors {
            let entry = factors.entry(a.clone()).or_insert_with(Q::zero);
            *entry += e;
        }
        factors.retain(|_, e| !e.is_zero());
        let mut coef = Q::one();
        fold_radicals(&mut factors, &mut coef);
        (Mono { factors, exp_arg: self.exp_arg.add(&o.exp_arg) }, coef)
    }
}

// Canonical radicals: each remaining prime sits in exactly one `Rad(base)^f`,
// grouped by its fractional exponent `f`, with integer parts moved into the coefficient.
fn fold_radicals(factors: &mut BTreeMap<Atom, Q>, coef: &mut Q) {
    let rads: Vec<(Q, Q)> = factors
        .iter()
        .filter_map(|(a, e)| match a {
            Atom::Rad(r) => Some((r.clone(), e.clone())),
            _ => None,
        })
        .collect();
    if rads.is_empty() {
        return;
    }
    let Some(primes) = radical_primes(&rads) else {
        return;
    };
    for (r, _) in &rads {
        factors.remove(&Atom::Rad(r.clone()));
    }
    let mut groups: BTreeMap<Q, BigInt> = BTreeMap::new();
    for (p, e) in primes {
        let k = e.floor();
        if let Some(kk) = k.to_integer().to_i32() {
            *coef *= Q::from_integer(p.clone()).pow(kk);
        }
        let rest = &e - &k;
        if rest.is_zero() {
            continue;
        }
        *groups.entry(rest).or_insert_with(BigInt::one) *= p;
    }
    for (f, base) in groups {
        factors.insert(Atom::Rad(Q::from_integer(base)), f);
    }
}

/// `Π r^e` as prime powers with rational exponents; `None` when the bases are too large to factor.
fn radical_primes(rads: &[(Q, Q)]) -> Option<BTreeMap<BigInt, Q>> {
    let mut out: BTreeMap<BigInt, Q> = BTreeMap::new();
    for (r, e) in rads {
        if !r.is_positive() || r.numer().bits() > 128 || r.denom().bits() > 128 {
            return None;
        }
        for (n, sign) in [(r.numer(), 1i64), (r.denom(), -1i64)] {
            for (p, k) in factor(n)? {
                *out.entry(p).or_insert_with(Q::zero) += e * Q::from_integer(BigInt::from(k * sign));
            }
        }
    }
    out.retain(|_, e| !e.is_zero());
    Some(out)
}

/// Trial division below 2^16; a leftover cofactor below 2^32 is prime.
fn factor(n: &BigInt) -> Option<Vec<(BigInt, i64)>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1u32 << 16);
    while d < limit && &d * &d <= n {
        let mut k = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += 1;
    }
    if n > BigInt::one() {
        if n.bits() > 32 {
            return None;
        }
        out.push((n, 1));
    }
    Some(out)
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Q) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn mono(m: Mono, c: Q) -> Poly {
        let mut p = Poly::default();
        p.add_term(m, c);
        p
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::mono(Mono::atom(a, Q::one()), Q::one())
    }

    pub fn opaque(e: Expr) -> Poly {
        Poly::atom(Atom::Opaque(e))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next()?;
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn single(&self) -> Option<(&Mono, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.terms.len() * o.terms.len() > MAX_TERMS {
            let a = Poly::opaque(render(self));
            let b = Poly::opaque(render(o));
            return a.mul(&b);
        }
        let mut r = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let (m, k) = ma.mul(mb);
                r.add_term(m, ca * cb * k);
            }
        }
        r
    }

    pub fn pow(&self, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::one();
        }
        if q.is_one() {
            return self.clone();
        }
        if self.is_zero() {
            return if q.is_positive() { Poly::zero() } else { Poly::opaque(Expr::zero().pow(q.clone())) };
        }
        if let Some((m, c)) = self.single() {
            if let Some(p) = mono_pow(m, c, q) {
                return p;
            }
            return Poly::mono(Mono::atom(Atom::Opaque(render(self)), q.clone()), Q::one());
        }
        if q.is_integer() && q.is_positive() {
            let k = q.to_integer().to_usize().unwrap_or(usize::MAX);
            if k <= 12 && estimated_terms(self.len(), k) <= MAX_TERMS {
                let mut acc = Poly::one();
                for _ in 0..k {
                    acc = acc.mul(self);
                }
                return acc;
            }
        }
        Poly::mono(Mono::atom(Atom::Opaque(render(self)), q.clone()), Q::one())
    }

    pub fn recip(&self) -> Poly {
        self.pow(&-Q::one())
    }

    pub fn exp(&self) -> Poly {
        let mut factors: BTreeMap<Atom, Q> = BTreeMap::new();
        let mut residual = Poly::zero();
        let mut extra = Poly::one();
        for (m, c) in &self.terms {
            if m.exp_arg.is_zero() && m.factors.len() == 1 {
                let (a, e) = m.factors.iter().next().unwrap();
                match a {
                    Atom::NegLog if e.is_one() => {
                        *factors.entry(Atom::Eps).or_insert_with(Q::zero) -= c;
                        continue;
                    }
                    Atom::Eps if *e == -Q::one() => {
                        *factors.entry(Atom::ExpInv).or_insert_with(Q::zero) += c;
                        continue;
                    }
                    Atom::Opaque(Expr::Unary(UnaryOp::Log, u)) if e.is_one() => {
                        extra = extra.mul(&to_poly(u).pow(c));
                        continue;
                    }
                    _ => {}
                }
            }
            residual.add_term(m.clone(), c.clone());
        }
        factors.retain(|_, e| !e.is_zero());
        let base = Poly::mono(Mono { factors, exp_arg: residual }, Q::one());
        base.mul(&extra)
    }

    pub fn log(&self) -> Poly {
        if let Some((m, c)) = self.single() {
            if c.is_positive() {
                let mut r = Poly::zero();
                if !c.is_one() {
                    r = r.add(&Poly::opaque(Expr::Const(c.clone()).log()));
                }
                // c > 0 and the known-positive atoms force the rest to be positive too
                let mut rest: BTreeMap<Atom, Q> = m.factors.iter().filter(|(a, _)| !a.positive()).map(|(a, e)| (a.clone(), e.clone())).collect();
                // fractional powers are nonnegative where defined; so is a lone odd power
                let unknown = rest.values().filter(|e| e.is_integer()).count();
                let lone_odd = unknown == 1 && rest.values().any(|e| e.is_integer() && e.to_integer().is_odd());
                let split: Vec<(Atom, Q)> = rest.iter().filter(|(_, e)| lone_odd || !e.is_integer()).map(|(a, e)| (a.clone(), e.clone())).collect();
                for (a, e) in &split {
                    rest.remove(a);
                    let base = render(&Poly::mono(Mono::atom(a.clone(), Q::one()), Q::one()));
                    r = r.add(&Poly::opaque(base.log()).scale(e));
                }
                if !rest.is_empty() {
                    let p = Poly::mono(Mono { factors: rest, exp_arg: Poly::zero() }, Q::one());
                    r = r.add(&Poly::opaque(render(&p).log()));
                }
                for (a, e) in m.factors.iter().filter(|(a, _)| a.positive()) {
                    let part = match a {
                        Atom::Eps => Poly::atom(Atom::NegLog).scale(&-e),
                        Atom::ExpInv => Poly::mono(Mono::atom(Atom::Eps, -Q::one()), e.clone()),
                        Atom::NegLog => Poly::opaque(neg_log_expr().log()).scale(e),
                        Atom::N => Poly::opaque(Expr::n().log()).scale(e),
                        Atom::Pi => Poly::opaque(Expr::Pi.log()).scale(e),
                        Atom::Rad(b) => Poly::opaque(Expr::Const(b.clone()).log()).scale(e),
                        Atom::Opaque(Expr::Unary(UnaryOp::Exp, u)) => to_poly(u).scale(e),
                        _ => unreachable!("non-positive atom"),
                    };
                    r = r.add(&part);
                }
                return r.add(&m.exp_arg);
            }
        }
        Poly::opaque(render(self).log())
    }

    pub fn abs(&self) -> Poly {
        if let Some(c) = self.as_constant() {
            return Poly::constant(c.abs());
        }
        if let Some((m, c)) = self.single() {
            let nonneg = m.factors.iter().all(|(a, e)| {
                a.positive() || (e.is_integer() && e.to_integer().is_even())
            });
            if nonneg {
                return Poly::mono(m.clone(), c.abs());
            }
        }
        Poly::opaque(render(self).abs())
    }
}

fn estimated_terms(n: usize, k: usize) -> usize {
    // multinomial count C(n+k-1, k), saturating
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n + i) / (i + 1);
    }
    r
}

fn mono_pow(m: &Mono, c: &Q, q: &Q) -> Option<Poly> {
    let integer = q.is_integer();
    let mut factors: BTreeMap<Atom, Q> = BTreeMap::new();
    let mut coef = Q::one();
    if integer {
        let k = q.to_integer().to_i32()?;
        coef = c.pow(k);
        factors.extend(m.factors.iter().map(|(a, e)| (a.clone(), e * q)));
    } else {
        if !c.is_positive() {
            return None;
        }
        // atoms of unknown sign under an integer power
        let unknown: BTreeMap<Atom, Q> = m.factors.iter().filter(|(a, e)| !a.positive() && e.is_integer()).map(|(a, e)| (a.clone(), e.clone())).collect();
        // c > 0 and the other atoms are nonnegative, so the unknown part is positive
        let lone_odd = unknown.len() == 1 && unknown.values().all(|e| e.to_integer().is_odd());
        for (a, e) in &m.factors {
            if lone_odd || !unknown.contains_key(a) {
                factors.insert(a.clone(), e * q);
            }
        }
        if !lone_odd && !unknown.is_empty() {
            let rest = render(&Poly::mono(Mono { factors: unknown, exp_arg: Poly::zero() }, Q::one()));
            *factors.entry(Atom::Opaque(rest)).or_insert_with(Q::zero) += q;
        }
        match rational_root(c, q) {
            Some(v) => coef = v,
            None => {
                *factors.entry(Atom::Rad(c.clone())).or_insert_with(Q::zero) += q;
            }
        }
    }
    factors.retain(|_, e| !e.is_zero());
    fold_radicals(&mut factors, &mut coef);
    Some(Poly::mono(Mono { factors, exp_arg: m.exp_arg.scale(q) }, coef))
}

/// `c^q` when it is rational, for positive `c`.
fn rational_root(c: &Q, q: &Q) -> Option<Q> {
    let t = q.denom().to_u32()?;
    let s = q.numer().to_i32()?;
    let n = int_root(c.numer(), t)?;
    let d = int_root(c.denom(), t)?;
    Some(Q::new(n, d).pow(s))
}

fn int_root(v: &BigInt, t: u32) -> Option<BigInt> {
    let r = v.nth_root(t);
    if num_traits::pow(r.clone(), t as usize) == *v {
        Some(r)
    } else {
        None
    }
}

pub fn neg_log_expr() -> Expr {
    Expr::eps().log().neg()
}

/// Normal form of an expression as a `Poly`.
pub fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Var(Var::Eps) => Poly::atom(Atom::Eps),
        Expr::Var(Var::N) => Poly::atom(Atom::N),
        Expr::Var(Var::X) => Poly::atom(Atom::X),
        Expr::Var(Var::T) => Poly::atom(Atom::T),
        Expr::Param => Poly::atom(Atom::Param),
        Expr::Pi => Poly::atom(Atom::Pi),
        Expr::Const(c) => Poly::constant(c.clone()),
        Expr::Unary(op, a) => {
            let p = to_poly(a);
            match op {
                UnaryOp::Neg => p.scale(&-Q::one()),
                UnaryOp::Abs => p.abs(),
                UnaryOp::Exp => p.exp(),
                UnaryOp::Log => p.log(),
                UnaryOp::Floor => match p.as_constant() {
                    Some(c) => Poly::constant(Q::from_integer(c.floor().to_integer())),
                    None => Poly::opaque(render(&p).floor()),
                },
                UnaryOp::Sin | UnaryOp::Cos => match p.as_constant() {
                    Some(c) if c.is_zero() => {
                        if *op == UnaryOp::Sin {
                            Poly::zero()
                        } else {
                            Poly::one()
                        }
                    }
                    _ => Poly::opaque(Expr::unary(*op, render(&p))),
                },
            }
        }
        Expr::Binary(op, a, b) => {
            let (pa, pb) = (to_poly(a), to_poly(b));
            match op {
                BinaryOp::Add => pa.add(&pb),
                BinaryOp::Sub => pa.add(&pb.scale(&-Q::one())),
                BinaryOp::Mul => pa.mul(&pb),
                BinaryOp::Div => pa.mul(&pb.recip()),
                BinaryOp::Min | BinaryOp::Max => {
                    if let (Some(x), Some(y)) = (pa.as_constant(), pb.as_constant()) {
                        let v = if *op == BinaryOp::Min { x.min(y) } else { x.max(y) };
                        return Poly::constant(v);
                    }
                    if pa == pb {
                        return pa;
                    }
                    let (ra, rb) = (render(&pa), render(&pb));
                    let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
                    Poly::opaque(Expr::binary(*op, lo, hi))
                }
            }
        }
        Expr::Pow(a, q) => to_poly(a).pow(q),
        Expr::PowGeneral(a, b) => to_poly(&Expr::unary(UnaryOp::Exp, (**b).clone().mul((**a).clone().log()))),
        Expr::Compose(body, f) => match body.as_ref() {
            Expr::Hybrid(h) => {
                let inner = render(&to_poly(f));
                if inner == Expr::eps() {
                    to_poly(body)
                } else {
                    Poly::opaque(Expr::Hybrid(Arc::new(normalize_hybrid(h))).compose(inner))
                }
            }
            _ => to_poly(&body.subst_var(Var::Eps, f)),
        },
        Expr::Hybrid(h) => Poly::opaque(Expr::Hybrid(Arc::new(normalize_hybrid(h)))),
        Expr::Primitive(p) => Poly::opaque(Expr::Primitive(Arc::new(PrimitiveNode {
            rho: normalize(&p.rho),
            upper: normalize(&p.upper),
            radius: p.radius.clone(),
        }))),
        Expr::Convolve(c) => Poly::opaque(Expr::Convolve(Arc::new(ConvolveNode {
            f: normalize(&c.f),
            rho: normalize(&c.rho),
            scale: normalize(&c.scale),
            at: normalize(&c.at),
            radius: c.radius.clone(),
        }))),
    }
}

fn normalize_hybrid(h: &HybridNet) -> HybridNet {
    HybridNet { low: normalize(&h.low), high: normalize(&h.high), switches: h.switches.clone() }
}

/// Renders a `Poly` back to a canonical expression tree.
pub fn render(p: &Poly) -> Expr {
    let mut acc: Option<Expr> = None;
    for (m, c) in &p.terms {
        acc = Some(match acc {
            None => render_term(m, c),
            Some(prev) => {
                if c.is_negative() {
                    prev.sub(render_term(m, &-c))
                } else {
                    prev.add(render_term(m, c))
                }
            }
        });
    }
    acc.unwrap_or_else(Expr::zero)
}

fn render_term(m: &Mono, c: &Q) -> Expr {
    match render_mono(m) {
        None => Expr::Const(c.clone()),
        Some(body) => {
            if c.is_one() {
                body
            } else if *c == -Q::one() {
                body.neg()
            } else {
                Expr::Const(c.clone()).mul(body)
            }
        }
    }
}

fn render_mono(m: &Mono) -> Option<Expr> {
    let mut acc: Option<Expr> = None;
    let mut push = |f: Expr| {
        acc = Some(match acc.take() {
            None => f,
            Some(prev) => prev.mul(f),
        });
    };
    for (a, e) in &m.factors {
        let f = match a {
            Atom::ExpInv => Expr::Const(e.clone()).div(Expr::eps()).exp(),
            _ => {
                let base = match a {
                    Atom::Eps => Expr::eps(),
                    Atom::NegLog => neg_log_expr(),
                    Atom::N => Expr::n(),
                    Atom::X => Expr::x(),
                    Atom::T => Expr::t(),
                    Atom::Param => Expr::Param,
                    Atom::Pi => Expr::Pi,
                    Atom::Rad(r) => Expr::Const(r.clone()),
                    Atom::Opaque(u) => u.clone(),
                    Atom::ExpInv => unreachable!(),
                };
                if e.is_one() && !matches!(a, Atom::Rad(_)) {
                    base
                } else {
                    base.pow(e.clone())
                }
            }
        };
        push(f);
    }
    if !m.exp_arg.is_zero() {
        push(render(&m.exp_arg).exp());
    }
    acc
}

/// Canonical form: equal values on the common domain give equal trees for the fragment.
pub fn normalize(e: &Expr) -> Expr {
    let mut cur = render(&to_poly(e));
    // opaque powers can combine to integer exponents that only expand on a later pass
    for _ in 0..4 {
        let next = render(&to_poly(&cur));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// `ε ↦ e(f(ε))`, normalized.
pub fn substitute(e: &Expr, f: &Expr) -> Expr {
    normalize(&e.subst_var(Var::Eps, f))
}

/// Replaces a free variable by an expression and normalizes.
pub fn substitute_var(e: &Expr, v: Var, by: &Expr) -> Expr {
    normalize(&e.subst_var(v, by))
}

/// Instantiates the family parameter `m`.
pub fn instantiate(e: &Expr, m: &Q) -> Expr {
    normalize(&e.subst_param(&Expr::Const(m.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::expr::{q, qr};
    use alloc::string::ToString;
    use crate::netlang::parse::parse;

    fn n(s: &str) -> Expr {
        normalize(&parse(s).unwrap())
    }

    #[test]
    fn lambda_turns_exponential_scale_into_powers() {
        for k in 1..=6 {
            let e = Expr::int(k).div(Expr::eps()).exp();
            assert_eq!(substitute(&e, &Expr::lambda()), Expr::eps().pow(q(-k)));
        }
    }

    #[test]
    fn eta_turns_powers_into_exponentials() {
        assert_eq!(substitute(&Expr::eps().pow(q(-3)), &Expr::eta()), n("exp(3/eps)"));
        assert_eq!(substitute(&neg_log_expr(), &Expr::eta()), Expr::eps().pow(q(-1)));
        assert_eq!(substitute(&Expr::lambda(), &Expr::eta()), Expr::eps());
        assert_eq!(substitute(&Expr::eta(), &Expr::lambda()), Expr::eps());
    }

    #[test]
    fn identity_substitution_and_idempotence() {
        for s in ["eps * exp(2/eps) + pow(eps, 1/2)", "abs(x - eps) / (1 + eps)", "log(2 * eps)", "powg(eps, -x)"] {
            let e = n(s);
            assert_eq!(substitute(&e, &Expr::eps()), e);
            assert_eq!(normalize(&e), e);
        }
    }

    #[test]
    fn arithmetic_collapses() {
        assert_eq!(n("eps * eps / eps"), Expr::eps());
        assert_eq!(n("x + 0"), Expr::x());
        assert_eq!(n("pow(4, 1/2)"), Expr::int(2));
        assert_eq!(n("pow(2, 1/2) * pow(2, 1/2)"), Expr::int(2));
        assert_eq!(n("pow(2, 1/3) * pow(2, 1/3)"), Expr::int(2).pow(qr(2, 3)));
        assert_eq!(n("exp(x) * exp(-x)"), Expr::one());
        assert_eq!(n("log(exp(x))"), Expr::x());
        assert_eq!(n("(x + 1) * (x - 1)"), n("pow(x, 2) - 1"));
        assert_eq!(n("exp(x / eps)").to_string(), "exp(pow(eps, -1) * x)");
    }
}
