//! Dominant-term analysis beyond the fragment.
//!
//! Monomials built from `ε`, iterated logarithms `log^k(−log ε)` and `e^{1/ε}`
//! compare by an extended exponent vector. Anything else is compared through
//! the logarithm of the ratio, recursively, down to a fixed depth where the
//! plain limit calculus takes over.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, ToPrimitive, Zero};

use super::expr::{Expr, UnaryOp};
use super::growth::{as_eps_net, mono_mag, Mag};
use super::limit::{limit_at_zero, ExtLimit, Side};
use super::normal::{neg_log_expr, render, to_poly, Atom, Mono, Poly};
use crate::Q;

const DEPTH: usize = 5;

/// Asymptotic comparison of two positive monomials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rel {
    /// `m₁/m₂ → 0`.
    Less,
    /// `m₁/m₂ → r` with `0 < r < ∞`.
    Equal(f64),
    /// `m₁/m₂ → ∞`.
    Greater,
}

/// Dominant term of a sum: `e ~ lead · mono`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dominant {
    pub mono: Mono,
    pub lead: f64,
}

fn log_level(e: &Expr) -> Option<usize> {
    if *e == neg_log_expr() {
        return Some(0);
    }
    match e {
        Expr::Unary(UnaryOp::Log, inner) => log_level(inner).map(|k| k + 1),
        _ => None,
    }
}

/// `(c, −a, b₀, b₁, …)` for monomials in `e^{1/ε}`, `ε` and iterated logs.
fn ext_key(m: &Mono) -> Option<(Vec<Q>, f64)> {
    if !m.exp_arg.is_zero() {
        return None;
    }
    let mut v: Vec<Q> = alloc::vec![Q::zero(), Q::zero()];
    let mut constant = 1.0;
    let bump = |v: &mut Vec<Q>, i: usize, e: &Q| {
        if v.len() <= i {
            v.resize(i + 1, Q::zero());
        }
        v[i] += e;
    };
    for (a, e) in &m.factors {
        match a {
            Atom::ExpInv => bump(&mut v, 0, e),
            Atom::Eps => bump(&mut v, 1, &-e),
            Atom::NegLog => bump(&mut v, 2, e),
            Atom::Opaque(u) => bump(&mut v, 2 + log_level(u)?, e),
            Atom::Pi => constant *= libm::pow(core::f64::consts::PI, e.to_f64()?),
            Atom::Rad(r) => constant *= libm::pow(r.to_f64()?, e.to_f64()?),
            _ => return None,
        }
    }
    Some((v, constant))
}

fn cmp_keys(a: &[Q], b: &[Q]) -> Ordering {
    let n = a.len().max(b.len());
    let zero = Q::zero();
    for i in 0..n {
        let (x, y) = (a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero));
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `ln m` as a polynomial, up to an additive `o(1)`; `None` if a factor may change sign.
fn ln_mono(m: &Mono) -> Option<Poly> {
    let mut r = m.exp_arg.clone();
    for (a, e) in &m.factors {
        let part = match a {
            Atom::Eps => Poly::atom(Atom::NegLog).scale(&-e),
            Atom::ExpInv => Poly::mono(Mono::atom(Atom::Eps, -Q::one()), e.clone()),
            Atom::NegLog => Poly::opaque(neg_log_expr().log()).scale(e),
            Atom::Pi => Poly::opaque(Expr::Pi.log()).scale(e),
            Atom::Rad(b) => Poly::opaque(Expr::Const(b.clone()).log()).scale(e),
            Atom::Opaque(Expr::Unary(UnaryOp::Exp, u)) => to_poly(u).scale(e),
            Atom::Opaque(u) if log_level(u).is_some() => Poly::opaque(u.clone().log()).scale(e),
            Atom::Opaque(u) => match mono_mag(&Mono::atom(a.clone(), Q::one())) {
                // eventually of constant sign
                Mag::Exact { .. } => Poly::opaque(u.clone().abs().log()).scale(e),
                _ => return None,
            },
            _ => return None,
        };
        r = r.add(&part);
    }
    Some(r)
}

/// Compares two monomials assumed eventually nonzero.
pub fn compare(m1: &Mono, m2: &Mono) -> Option<Rel> {
    compare_at(m1, m2, DEPTH)
}

fn compare_at(m1: &Mono, m2: &Mono, depth: usize) -> Option<Rel> {
    if m1 == m2 {
        return Some(Rel::Equal(1.0));
    }
    if let (Some((k1, c1)), Some((k2, c2))) = (ext_key(m1), ext_key(m2)) {
        return Some(match cmp_keys(&k1, &k2) {
            Ordering::Less => Rel::Less,
            Ordering::Greater => Rel::Greater,
            Ordering::Equal => Rel::Equal(c1 / c2),
        });
    }
    match (mono_mag(m1), mono_mag(m2)) {
        (Mag::Exact { key: a, lead: la }, Mag::Exact { key: b, lead: lb }) => {
            return Some(match a.cmp(&b) {
                Ordering::Less => Rel::Less,
                Ordering::Greater => Rel::Greater,
                Ordering::Equal => Rel::Equal((la / lb).abs()),
            });
        }
        (Mag::Exact { key: a, .. }, Mag::AtMost { key: b }) if a > b => return Some(Rel::Greater),
        (Mag::AtMost { key: a }, Mag::Exact { key: b, .. }) if a < b => return Some(Rel::Less),
        _ => {}
    }
    if depth == 0 {
        return None;
    }
    let d = ln_mono(m1)?.add(&ln_mono(m2)?.scale(&-Q::one()));
    Some(match poly_limit_at(&d, depth - 1)? {
        ExtLimit::PosInf => Rel::Greater,
        ExtLimit::NegInf => Rel::Less,
        ExtLimit::Finite(v, _) => Rel::Equal(libm::exp(v)),
    })
}

/// Dominant term of a polynomial; `None` when terms cannot be ordered or the
/// leading group cancels numerically.
pub fn dominant(p: &Poly) -> Option<Dominant> {
    dominant_at(p, DEPTH)
}

fn dominant_at(p: &Poly, depth: usize) -> Option<Dominant> {
    let mut best: Option<(&Mono, Vec<(f64, f64)>)> = None;
    for (m, c) in &p.terms {
        let cf = c.to_f64()?;
        match &mut best {
            None => best = Some((m, alloc::vec![(cf, 1.0)])),
            Some((rep, group)) => match compare_at(m, rep, depth)? {
                Rel::Less => {}
                Rel::Greater => best = Some((m, alloc::vec![(cf, 1.0)])),
                Rel::Equal(r) => group.push((cf, r)),
            },
        }
    }
    let (rep, group) = best?;
    let lead: f64 = group.iter().map(|(c, r)| c * r).sum();
    let scale: f64 = group.iter().map(|(c, r)| (c * r).abs()).sum();
    if !(lead.abs() > 1e-12 * scale) || !lead.is_finite() {
        return None;
    }
    Some(Dominant { mono: rep.clone(), lead })
}

/// `lim_{ε→0⁺}` of a polynomial.
pub fn poly_limit(p: &Poly) -> Option<ExtLimit> {
    poly_limit_at(p, DEPTH)
}

fn poly_limit_at(p: &Poly, depth: usize) -> Option<ExtLimit> {
    if let Some(c) = p.as_constant() {
        return Some(ExtLimit::Finite(c.to_f64()?, Side::Exact));
    }
    let fallback = || limit_at_zero(&render(p));
    let Some(d) = dominant_at(p, depth) else {
        return fallback();
    };
    let sign = if d.lead > 0.0 { Ordering::Greater } else { Ordering::Less };
    let rel = if d.mono.is_one() { Some(Rel::Equal(1.0)) } else { compare_at(&d.mono, &Mono::one(), depth) };
    match rel {
        Some(Rel::Greater) => Some(if sign == Ordering::Greater { ExtLimit::PosInf } else { ExtLimit::NegInf }),
        Some(Rel::Less) => Some(ExtLimit::Finite(0.0, if sign == Ordering::Greater { Side::Above } else { Side::Below })),
        Some(Rel::Equal(r)) => {
            let side = if p.len() == 1 && d.mono.is_one() { Side::Exact } else { Side::Unknown };
            Some(ExtLimit::Finite(d.lead * r, side))
        }
        None => fallback(),
    }
}

/// Dominant term of a net as `ε → 0⁺`.
pub fn dominant_term(e: &Expr) -> Option<Dominant> {
    let p = to_poly(&as_eps_net(e));
    if p.is_zero() {
        return None;
    }
    dominant(&p)
}

/// `lim x/y` decided by dominant terms: `Less` means `x = o(y)`.
pub fn compare_nets(x: &Expr, y: &Expr) -> Option<Rel> {
    let (dx, dy) = (dominant_term(x)?, dominant_term(y)?);
    Some(match compare(&dx.mono, &dy.mono)? {
        Rel::Equal(r) => Rel::Equal((r * dx.lead / dy.lead).abs()),
        o => o,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::normal::substitute;
    use crate::netlang::parse::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn fragment_order() {
        assert_eq!(compare_nets(&p("pow(eps,-5)"), &p("exp(1/eps)")), Some(Rel::Less));
        assert_eq!(compare_nets(&p("2*pow(eps,-2) + eps"), &p("pow(eps,-2)")), Some(Rel::Equal(2.0)));
        assert_eq!(compare_nets(&p("-log(eps)"), &p("1")), Some(Rel::Greater));
    }

    #[test]
    fn transported_nets() {
        // along eta, exponentials become double exponentials
        let x = substitute(&p("pow(eps,-3) * exp(1/eps)"), &Expr::eta());
        let y = substitute(&p("exp(2/eps)"), &Expr::eta());
        assert_eq!(compare_nets(&x, &y), Some(Rel::Less));
        // along lambda, logarithms become iterated logarithms
        let x = substitute(&p("pow(eps, 2) * pow(-log(eps), 3)"), &Expr::lambda());
        let y = substitute(&p("eps * pow(-log(eps), 5)"), &Expr::lambda());
        assert_eq!(compare_nets(&x, &y), Some(Rel::Less));
        let x = substitute(&p("exp(1/eps)"), &Expr::eps().powi(2));
        let y = substitute(&p("pow(eps,-7)"), &Expr::eps().powi(2));
        assert_eq!(compare_nets(&x, &y), Some(Rel::Greater));
    }

    #[test]
    fn limits() {
        assert_eq!(poly_limit(&to_poly(&p("3*pow(eps,-1) - exp(1/eps)"))), Some(ExtLimit::NegInf));
        assert_eq!(poly_limit(&to_poly(&p("2 + eps"))), Some(ExtLimit::Finite(2.0, Side::Unknown)));
    }
}
