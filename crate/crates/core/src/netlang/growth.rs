//! Growth keys on the fragment `C·ε^a·(−log ε)^b·exp(c/ε)` and a coarser
//! magnitude analysis that also sees through bounded opaque factors.
//!
//! All statements concern `ε → 0⁺`. Nets on the reversed naturals are
//! analysed after the change of variable `n = 1/ε`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{BinaryOp, Expr, UnaryOp, Var};
use super::normal::{to_poly, Atom, Mono, Poly};
use crate::Q;

/// Dominant monomial exponents; ordered by `(c, −a, b)`, larger grows faster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrowthKey {
    pub c: Q,
    pub a: Q,
    pub b: Q,
}

impl GrowthKey {
    pub fn new(c: Q, a: Q, b: Q) -> Self {
        GrowthKey { c, a, b }
    }

    pub fn unit() -> Self {
        GrowthKey { c: Q::zero(), a: Q::zero(), b: Q::zero() }
    }

    /// The ordered triple `(c, −a, b)`.
    pub fn triple(&self) -> (Q, Q, Q) {
        (self.c.clone(), -self.a.clone(), self.b.clone())
    }

    pub fn mul(&self, o: &GrowthKey) -> GrowthKey {
        GrowthKey { c: &self.c + &o.c, a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn scale(&self, k: &Q) -> GrowthKey {
        GrowthKey { c: &self.c * k, a: &self.a * k, b: &self.b * k }
    }

    /// Sign of the growth: `Greater` tends to infinity, `Less` to zero.
    pub fn direction(&self) -> Ordering {
        self.cmp(&GrowthKey::unit())
    }
}

impl Ord for GrowthKey {
    fn cmp(&self, o: &Self) -> Ordering {
        self.c.cmp(&o.c).then_with(|| o.a.cmp(&self.a)).then_with(|| self.b.cmp(&o.b))
    }
}

impl PartialOrd for GrowthKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Growth {
    Zero,
    Key(GrowthKey),
    OutOfFragment,
}

impl Growth {
    pub fn is_in_fragment(&self) -> bool {
        !matches!(self, Growth::OutOfFragment)
    }

    pub fn key(&self) -> Option<&GrowthKey> {
        match self {
            Growth::Key(k) => Some(k),
            _ => None,
        }
    }
}

/// One fragment monomial: its key and its constant prefactor.
#[derive(Clone, Debug)]
pub struct FragmentTerm {
    pub key: GrowthKey,
    pub coef: Q,
    /// Product of constant atoms such as `π^{1/2}`; 1 when there are none.
    pub constant: f64,
}

impl FragmentTerm {
    pub fn value(&self) -> f64 {
        self.coef.to_f64().unwrap_or(f64::NAN) * self.constant
    }
}

/// Rewrites a net on the reversed naturals as a net in `ε = 1/n`.
pub fn as_eps_net(e: &Expr) -> Expr {
    if e.mentions(Var::N) {
        e.subst_var(Var::N, &Expr::one().div(Expr::eps()))
    } else {
        e.clone()
    }
}

/// Fragment terms of `e`, or `None` when some term leaves the fragment.
pub fn fragment_terms(e: &Expr) -> Option<Vec<FragmentTerm>> {
    poly_fragment_terms(&to_poly(&as_eps_net(e)))
}

pub fn poly_fragment_terms(p: &Poly) -> Option<Vec<FragmentTerm>> {
    let mut out = Vec::new();
    for (m, c) in &p.terms {
        out.push(FragmentTerm { key: mono_key(m)?, coef: c.clone(), constant: constant_part(m)? });
    }
    Some(out)
}

fn mono_key(m: &Mono) -> Option<GrowthKey> {
    if !m.exp_arg.is_zero() {
        return None;
    }
    let mut k = GrowthKey::unit();
    for (a, e) in &m.factors {
        match a {
            Atom::Eps => k.a += e,
            Atom::NegLog => k.b += e,
            Atom::ExpInv => k.c += e,
            Atom::Pi | Atom::Rad(_) => {}
            _ => return None,
        }
    }
    Some(k)
}

fn constant_part(m: &Mono) -> Option<f64> {
    let mut v = 1.0;
    for (a, e) in &m.factors {
        let ef = e.to_f64()?;
        match a {
            Atom::Pi => v *= libm::pow(core::f64::consts::PI, ef),
            Atom::Rad(r) => v *= libm::pow(r.to_f64()?, ef),
            _ => {}
        }
    }
    Some(v)
}

/// The growth key of the dominant monomial.
pub fn growth_key(e: &Expr) -> Growth {
    match fragment_terms(e) {
        None => Growth::OutOfFragment,
        Some(terms) => dominant(&terms),
    }
}

fn dominant(terms: &[FragmentTerm]) -> Growth {
    let Some(top) = terms.iter().map(|t| &t.key).max() else {
        return Growth::Zero;
    };
    // distinct constant atoms can cancel numerically inside one key class
    let group: f64 = terms.iter().filter(|t| t.key == *top).map(FragmentTerm::value).sum();
    let scale: f64 = terms.iter().filter(|t| t.key == *top).map(|t| t.value().abs()).sum();
    if group.abs() <= 1e-12 * scale {
        return Growth::OutOfFragment;
    }
    Growth::Key(top.clone())
}

/// Coarse size of a net as `ε → 0⁺`.
#[derive(Clone, Debug, PartialEq)]
pub enum Mag {
    Zero,
    /// `|e| ~ |lead|·key`, with the sign of `lead` eventually the sign of `e`.
    Exact { key: GrowthKey, lead: f64 },
    /// `|e| = O(key)`.
    AtMost { key: GrowthKey },
    Unknown,
}

impl Mag {
    pub fn key(&self) -> Option<&GrowthKey> {
        match self {
            Mag::Exact { key, .. } | Mag::AtMost { key } => Some(key),
            _ => None,
        }
    }

    fn mul(&self, o: &Mag) -> Mag {
        match (self, o) {
            (Mag::Zero, _) | (_, Mag::Zero) => Mag::Zero,
            (Mag::Unknown, _) | (_, Mag::Unknown) => Mag::Unknown,
            (Mag::Exact { key: a, lead: la }, Mag::Exact { key: b, lead: lb }) => {
                Mag::Exact { key: a.mul(b), lead: la * lb }
            }
            (x, y) => Mag::AtMost { key: x.key().unwrap().mul(y.key().unwrap()) },
        }
    }

    fn pow(&self, q: &Q) -> Mag {
        let qf = q.to_f64().unwrap_or(f64::NAN);
        match self {
            Mag::Zero => {
                if q.is_positive() {
                    Mag::Zero
                } else {
                    Mag::Unknown
                }
            }
            Mag::Exact { key, lead } => {
                let l = if *lead < 0.0 {
                    if q.is_integer() {
                        libm::pow(*lead, qf)
                    } else if q.denom().to_i64().is_some_and(|d| d % 2 == 1) {
                        let v = libm::pow(-lead, qf);
                        if q.numer().to_i64().is_some_and(|n| n % 2 != 0) {
                            -v
                        } else {
                            v
                        }
                    } else {
                        return Mag::Unknown;
                    }
                } else {
                    libm::pow(*lead, qf)
                };
                Mag::Exact { key: key.scale(q), lead: l }
            }
            Mag::AtMost { key } if q.is_positive() => Mag::AtMost { key: key.scale(q) },
            _ => Mag::Unknown,
        }
    }
}

/// Magnitude of `e` as `ε → 0⁺`.
pub fn magnitude(e: &Expr) -> Mag {
    poly_mag(&to_poly(&as_eps_net(e)))
}

pub fn poly_mag(p: &Poly) -> Mag {
    let mut exact: Vec<(GrowthKey, f64)> = Vec::new();
    let mut bounded: Vec<GrowthKey> = Vec::new();
    for (m, c) in &p.terms {
        let cm = Mag::Exact { key: GrowthKey::unit(), lead: c.to_f64().unwrap_or(f64::NAN) };
        match cm.mul(&mono_mag(m)) {
            Mag::Zero => {}
            Mag::Exact { key, lead } => exact.push((key, lead)),
            Mag::AtMost { key } => bounded.push(key),
            Mag::Unknown => return Mag::Unknown,
        }
    }
    if exact.is_empty() && bounded.is_empty() {
        return Mag::Zero;
    }
    let top_exact = exact.iter().map(|t| &t.0).max().cloned();
    let top_bounded = bounded.iter().max().cloned();
    if let Some(k) = top_exact {
        if top_bounded.as_ref().is_none_or(|b| *b < k) {
            let group: f64 = exact.iter().filter(|t| t.0 == k).map(|t| t.1).sum();
            let scale: f64 = exact.iter().filter(|t| t.0 == k).map(|t| t.1.abs()).sum();
            if group.abs() > 1e-12 * scale && group.is_finite() {
                return Mag::Exact { key: k, lead: group };
            }
            return Mag::Unknown;
        }
    }
    let all = exact.iter().map(|t| t.0.clone()).chain(bounded);
    Mag::AtMost { key: all.max().unwrap() }
}

pub(crate) fn mono_mag(m: &Mono) -> Mag {
    let mut acc = Mag::Exact { key: GrowthKey::unit(), lead: 1.0 };
    for (a, e) in &m.factors {
        let f = match a {
            Atom::Eps => Mag::Exact { key: GrowthKey::new(Q::zero(), e.clone(), Q::zero()), lead: 1.0 },
            Atom::NegLog => Mag::Exact { key: GrowthKey::new(Q::zero(), Q::zero(), e.clone()), lead: 1.0 },
            Atom::ExpInv => Mag::Exact { key: GrowthKey::new(e.clone(), Q::zero(), Q::zero()), lead: 1.0 },
            Atom::Pi => Mag::Exact {
                key: GrowthKey::unit(),
                lead: libm::pow(core::f64::consts::PI, e.to_f64().unwrap_or(f64::NAN)),
            },
            Atom::Rad(r) => Mag::Exact {
                key: GrowthKey::unit(),
                lead: libm::pow(r.to_f64().unwrap_or(f64::NAN), e.to_f64().unwrap_or(f64::NAN)),
            },
            Atom::Opaque(u) => opaque_mag(u).pow(e),
            Atom::N | Atom::X | Atom::T | Atom::Param => Mag::Unknown,
        };
        acc = acc.mul(&f);
    }
    if !m.exp_arg.is_zero() {
        acc = acc.mul(&exp_mag(&poly_mag(&m.exp_arg)));
    }
    acc
}

fn exp_mag(arg: &Mag) -> Mag {
    match arg {
        Mag::Zero => Mag::Exact { key: GrowthKey::unit(), lead: 1.0 },
        Mag::Exact { key, lead } if key.direction() != Ordering::Greater => {
            if key.direction() == Ordering::Equal {
                Mag::Exact { key: GrowthKey::unit(), lead: libm::exp(*lead) }
            } else {
                Mag::Exact { key: GrowthKey::unit(), lead: 1.0 }
            }
        }
        _ => Mag::Unknown,
    }
}

fn opaque_mag(u: &Expr) -> Mag {
    match u {
        Expr::Unary(UnaryOp::Abs, a) => match magnitude_normal(a) {
            Mag::Exact { key, lead } => Mag::Exact { key, lead: lead.abs() },
            m => m,
        },
        Expr::Unary(UnaryOp::Sin, a) | Expr::Unary(UnaryOp::Cos, a) => {
            let inner = magnitude_normal(a);
            match (&inner, u) {
                (Mag::Exact { key, .. }, Expr::Unary(UnaryOp::Sin, _)) if key.direction() == Ordering::Less => inner,
                (Mag::Exact { key, .. } | Mag::AtMost { key }, Expr::Unary(UnaryOp::Cos, _))
                    if key.direction() == Ordering::Less =>
                {
                    Mag::Exact { key: GrowthKey::unit(), lead: 1.0 }
                }
                (Mag::Zero, Expr::Unary(UnaryOp::Cos, _)) => Mag::Exact { key: GrowthKey::unit(), lead: 1.0 },
                _ => Mag::AtMost { key: GrowthKey::unit() },
            }
        }
        Expr::Unary(UnaryOp::Log, a) => match magnitude_normal(a) {
            Mag::Exact { key, lead } if lead > 0.0 => {
                if !key.c.is_zero() {
                    Mag::Exact { key: GrowthKey::new(Q::zero(), -Q::one(), Q::zero()), lead: key.c.to_f64().unwrap_or(0.0) }
                } else if !key.a.is_zero() {
                    Mag::Exact { key: GrowthKey::new(Q::zero(), Q::zero(), Q::one()), lead: -key.a.to_f64().unwrap_or(0.0) }
                } else if key.b.is_zero() && (lead - 1.0).abs() > 1e-12 {
                    Mag::Exact { key: GrowthKey::unit(), lead: libm::log(lead) }
                } else {
                    Mag::Unknown
                }
            }
            _ => Mag::Unknown,
        },
        Expr::Unary(UnaryOp::Floor, a) => match magnitude_normal(a) {
            Mag::Exact { key, lead } if key.direction() == Ordering::Greater => Mag::Exact { key, lead },
            Mag::Exact { key, .. } | Mag::AtMost { key } if key.direction() != Ordering::Greater => {
                Mag::AtMost { key: GrowthKey::unit() }
            }
            Mag::Zero => Mag::Zero,
            _ => Mag::Unknown,
        },
        Expr::Binary(BinaryOp::Min | BinaryOp::Max, a, b) => {
            match (magnitude_normal(a).key().cloned(), magnitude_normal(b).key().cloned()) {
                (Some(x), Some(y)) => Mag::AtMost { key: x.max(y) },
                _ => Mag::Unknown,
            }
        }
        Expr::Binary(_, _, _) | Expr::Unary(UnaryOp::Neg, _) | Expr::Const(_) | Expr::Var(_) => magnitude_normal(u),
        _ => Mag::Unknown,
    }
}

fn magnitude_normal(e: &Expr) -> Mag {
    poly_mag(&to_poly(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::normal::{neg_log_expr, substitute};
    use crate::netlang::parse::{parse, parse_with, ParseOptions};

    // takes the ordered triple (c, -a, b)
    fn key(c: i64, neg_a: i64, b: i64) -> Growth {
        Growth::Key(GrowthKey::new(Q::from_integer(c.into()), Q::from_integer((-neg_a).into()), Q::from_integer(b.into())))
    }

    #[test]
    fn reference_keys() {
        assert_eq!(growth_key(&parse("pow(eps,-3)").unwrap()), key(0, 3, 0));
        assert_eq!(growth_key(&parse("exp(2/eps) * eps").unwrap()), key(2, -1, 0));
        assert_eq!(growth_key(&substitute(&neg_log_expr(), &Expr::eta())), key(0, 1, 0));
        assert_eq!(growth_key(&parse("0 * eps").unwrap()), Growth::Zero);
        assert_eq!(growth_key(&parse("exp(exp(1/eps))").unwrap()), Growth::OutOfFragment);
        assert_eq!(growth_key(&parse("log(-log(eps))").unwrap()), Growth::OutOfFragment);
    }

    #[test]
    fn order_and_sums() {
        let a = GrowthKey::new(Q::zero(), Q::from_integer((-5).into()), Q::zero());
        let b = GrowthKey::new(Q::one(), Q::zero(), Q::zero());
        assert!(a < b);
        assert_eq!(growth_key(&parse("pow(eps,-5) + exp(1/eps)").unwrap()), Growth::Key(b));
        assert_eq!(growth_key(&parse("n * n").unwrap()), key(0, 2, 0));
    }

    #[test]
    fn magnitude_sees_bounded_factors() {
        let e = parse_with("eps + pow(eps,2)*sin(1/eps)", ParseOptions::extended()).unwrap();
        match magnitude(&e) {
            Mag::Exact { key, lead } => {
                assert_eq!(key, GrowthKey::new(Q::zero(), Q::one(), Q::zero()));
                assert_eq!(lead, 1.0);
            }
            m => panic!("{:?}", m),
        }
        let s = parse_with("sin(1/eps)", ParseOptions::extended()).unwrap();
        assert_eq!(magnitude(&s), Mag::AtMost { key: GrowthKey::unit() });
        match magnitude(&Expr::lambda()) {
            Mag::Exact { key, lead } => {
                assert_eq!(key.direction(), Ordering::Less);
                assert!(lead > 0.0);
            }
            m => panic!("{:?}", m),
        }
    }
}
