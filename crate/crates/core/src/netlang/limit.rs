//! Limits as `ε → 0⁺` by propagation through continuous and monotone operations.
//!
//! The calculus refuses indeterminate forms (`∞ − ∞`, `0·∞`, `0/0`, ...) rather
//! than guessing; callers then fall back to growth keys or sampling.

use core::cmp::Ordering;

use num_traits::{Signed, ToPrimitive, Zero};

use super::expr::{BinaryOp, Expr, UnaryOp, Var};
use super::growth::as_eps_net;
use super::normal::normalize;
use crate::Q;

/// Side from which a finite limit is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Eventually equal to the limit.
    Exact,
    Above,
    Below,
    Unknown,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
            s => s,
        }
    }

    fn join(self, o: Side) -> Side {
        match (self, o) {
            (Side::Exact, s) | (s, Side::Exact) => s,
            (a, b) if a == b => a,
            _ => Side::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtLimit {
    Finite(f64, Side),
    PosInf,
    NegInf,
}

impl ExtLimit {
    pub fn is_zero_from_above(&self) -> bool {
        matches!(self, ExtLimit::Finite(v, Side::Above) if *v == 0.0)
    }

    fn sign(&self) -> Option<Ordering> {
        match *self {
            ExtLimit::PosInf => Some(Ordering::Greater),
            ExtLimit::NegInf => Some(Ordering::Less),
            ExtLimit::Finite(v, s) => {
                if v > 0.0 {
                    Some(Ordering::Greater)
                } else if v < 0.0 {
                    Some(Ordering::Less)
                } else {
                    match s {
                        Side::Above => Some(Ordering::Greater),
                        Side::Below => Some(Ordering::Less),
                        Side::Exact => Some(Ordering::Equal),
                        Side::Unknown => None,
                    }
                }
            }
        }
    }

    fn neg(self) -> ExtLimit {
        match self {
            ExtLimit::PosInf => ExtLimit::NegInf,
            ExtLimit::NegInf => ExtLimit::PosInf,
            ExtLimit::Finite(v, s) => ExtLimit::Finite(-v, s.flip()),
        }
    }
}

fn inf(sign: Ordering) -> Option<ExtLimit> {
    match sign {
        Ordering::Greater => Some(ExtLimit::PosInf),
        Ordering::Less => Some(ExtLimit::NegInf),
        Ordering::Equal => None,
    }
}

fn fin(v: f64, s: Side) -> Option<ExtLimit> {
    if v.is_finite() {
        Some(ExtLimit::Finite(v, s))
    } else {
        None
    }
}

/// `lim_{ε→0⁺} e`, or `None` when the calculus cannot decide it.
pub fn limit_at_zero(e: &Expr) -> Option<ExtLimit> {
    let e = as_eps_net(e);
    lim(&e).or_else(|| lim(&normalize(&e)))
}

fn lim(e: &Expr) -> Option<ExtLimit> {
    match e {
        Expr::Var(Var::Eps) => Some(ExtLimit::Finite(0.0, Side::Above)),
        Expr::Var(_) | Expr::Param => None,
        Expr::Const(q) => fin(q.to_f64()?, Side::Exact),
        Expr::Pi => Some(ExtLimit::Finite(core::f64::consts::PI, Side::Exact)),
        Expr::Unary(op, a) => unary(*op, lim(a)?),
        Expr::Binary(op, a, b) => binary(*op, lim(a)?, lim(b)?),
        Expr::Pow(a, q) => pow(lim(a)?, q),
        Expr::PowGeneral(a, b) => {
            let base = lim(a)?;
            if base.sign()? != Ordering::Greater {
                return None;
            }
            unary(UnaryOp::Exp, binary(BinaryOp::Mul, lim(b)?, unary(UnaryOp::Log, base)?)?)
        }
        Expr::Compose(..) => lim(&e.expand_compose()),
        Expr::Hybrid(h) => {
            let (l, r) = (lim(&h.low)?, lim(&h.high)?);
            match (l, r) {
                (ExtLimit::Finite(a, s), ExtLimit::Finite(b, t)) if a == b => Some(ExtLimit::Finite(a, s.join(t))),
                (a, b) if a == b => Some(a),
                _ => None,
            }
        }
        Expr::Primitive(_) | Expr::Convolve(_) => None,
    }
}

fn unary(op: UnaryOp, a: ExtLimit) -> Option<ExtLimit> {
    use ExtLimit::*;
    match op {
        UnaryOp::Neg => Some(a.neg()),
        UnaryOp::Abs => match a {
            PosInf | NegInf => Some(PosInf),
            Finite(v, s) if v > 0.0 => Some(Finite(v, s)),
            Finite(v, s) if v < 0.0 => Some(Finite(-v, s.flip())),
            Finite(_, Side::Exact) => Some(Finite(0.0, Side::Exact)),
            Finite(_, Side::Above | Side::Below) => Some(Finite(0.0, Side::Above)),
            Finite(_, Side::Unknown) => Some(Finite(0.0, Side::Unknown)),
        },
        UnaryOp::Exp => match a {
            PosInf => Some(PosInf),
            NegInf => Some(Finite(0.0, Side::Above)),
            Finite(v, s) => fin(libm::exp(v), s),
        },
        UnaryOp::Log => match a {
            PosInf => Some(PosInf),
            Finite(v, s) if v > 0.0 => fin(libm::log(v), s),
            Finite(v, Side::Above) if v == 0.0 => Some(NegInf),
            _ => None,
        },
        UnaryOp::Floor => match a {
            PosInf => Some(PosInf),
            NegInf => Some(NegInf),
            Finite(v, s) => {
                let f = libm::floor(v);
                if f != v {
                    Some(Finite(f, Side::Exact))
                } else {
                    match s {
                        Side::Exact | Side::Above => Some(Finite(v, Side::Exact)),
                        Side::Below => Some(Finite(v - 1.0, Side::Exact)),
                        Side::Unknown => None,
                    }
                }
            }
        },
        UnaryOp::Sin | UnaryOp::Cos => match a {
            Finite(v, Side::Exact) => {
                let r = if op == UnaryOp::Sin { libm::sin(v) } else { libm::cos(v) };
                fin(r, Side::Exact)
            }
            Finite(v, _) => {
                let r = if op == UnaryOp::Sin { libm::sin(v) } else { libm::cos(v) };
                fin(r, Side::Unknown)
            }
            _ => None,
        },
    }
}

fn recip(a: ExtLimit) -> Option<ExtLimit> {
    use ExtLimit::*;
    match a {
        PosInf => Some(Finite(0.0, Side::Above)),
        NegInf => Some(Finite(0.0, Side::Below)),
        Finite(v, s) if v != 0.0 => fin(1.0 / v, s.flip()),
        Finite(_, Side::Above) => Some(PosInf),
        Finite(_, Side::Below) => Some(NegInf),
        Finite(..) => None,
    }
}

fn binary(op: BinaryOp, a: ExtLimit, b: ExtLimit) -> Option<ExtLimit> {
    use ExtLimit::*;
    match op {
        BinaryOp::Add => match (a, b) {
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
            (Finite(x, s), Finite(y, t)) => fin(x + y, s.join(t)),
        },
        BinaryOp::Sub => binary(BinaryOp::Add, a, b.neg()),
        BinaryOp::Mul => match (a, b) {
            (Finite(x, s), Finite(y, t)) => {
                let side = match (x == 0.0, y == 0.0) {
                    (false, false) => {
                        if s == Side::Exact && t == Side::Exact {
                            Side::Exact
                        } else {
                            Side::Unknown
                        }
                    }
                    (true, false) => {
                        if y > 0.0 {
                            s
                        } else {
                            s.flip()
                        }
                    }
                    (false, true) => {
                        if x > 0.0 {
                            t
                        } else {
                            t.flip()
                        }
                    }
                    (true, true) => match (a.sign(), b.sign()) {
                        (Some(Ordering::Equal), _) | (_, Some(Ordering::Equal)) => Side::Exact,
                        (Some(p), Some(q)) => {
                            if p == q {
                                Side::Above
                            } else {
                                Side::Below
                            }
                        }
                        _ => Side::Unknown,
                    },
                };
                fin(x * y, side)
            }
            (x, y) => {
                let (sx, sy) = (x.sign()?, y.sign()?);
                if sx == Ordering::Equal || sy == Ordering::Equal {
                    return None;
                }
                if let Finite(v, _) = x {
                    if v == 0.0 {
                        return None;
                    }
                }
                if let Finite(v, _) = y {
                    if v == 0.0 {
                        return None;
                    }
                }
                inf(if sx == sy { Ordering::Greater } else { Ordering::Less })
            }
        },
        BinaryOp::Div => {
            if let (Finite(x, _), Finite(y, _)) = (a, b) {
                if x == 0.0 && y == 0.0 {
                    return None;
                }
            }
            binary(BinaryOp::Mul, a, recip(b)?)
        }
        BinaryOp::Min | BinaryOp::Max => {
            let is_min = op == BinaryOp::Min;
            match (a, b) {
                (Finite(x, s), Finite(y, t)) => {
                    if x == y {
                        Some(Finite(x, if is_min { min_side(s, t) } else { min_side(s.flip(), t.flip()).flip() }))
                    } else if (x < y) == is_min {
                        Some(a)
                    } else {
                        Some(b)
                    }
                }
                (PosInf, o) | (o, PosInf) => Some(if is_min { o } else { PosInf }),
                (NegInf, o) | (o, NegInf) => Some(if is_min { NegInf } else { o }),
            }
        }
    }
}

fn min_side(s: Side, t: Side) -> Side {
    match (s, t) {
        (Side::Below, _) | (_, Side::Below) => Side::Below,
        (Side::Unknown, _) | (_, Side::Unknown) => Side::Unknown,
        (Side::Exact, _) | (_, Side::Exact) => Side::Exact,
        _ => Side::Above,
    }
}

fn pow(a: ExtLimit, q: &Q) -> Option<ExtLimit> {
    use ExtLimit::*;
    if q.is_zero() {
        return Some(Finite(1.0, Side::Exact));
    }
    let qf = q.to_f64()?;
    let pos = q.is_positive();
    match a {
        PosInf => Some(if pos { PosInf } else { Finite(0.0, Side::Above) }),
        NegInf => {
            if !q.is_integer() {
                return None;
            }
            let even = q.numer().to_i64()? % 2 == 0;
            Some(match (pos, even) {
                (true, true) => PosInf,
                (true, false) => NegInf,
                (false, true) => Finite(0.0, Side::Above),
                (false, false) => Finite(0.0, Side::Below),
            })
        }
        Finite(v, s) if v > 0.0 => fin(libm::pow(v, qf), if pos { s } else { s.flip() }),
        Finite(v, Side::Above) if v == 0.0 => Some(if pos { Finite(0.0, Side::Above) } else { PosInf }),
        Finite(v, s) if v < 0.0 && q.is_integer() => {
            let k = q.to_integer().to_i32()?;
            let r = libm::pow(v, k as f64);
            let side = if s == Side::Exact { Side::Exact } else { Side::Unknown };
            fin(r, side)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::parse::parse;

    #[test]
    fn reference_limits() {
        assert_eq!(limit_at_zero(&parse("eps").unwrap()), Some(ExtLimit::Finite(0.0, Side::Above)));
        assert!(limit_at_zero(&Expr::lambda()).unwrap().is_zero_from_above());
        assert_eq!(limit_at_zero(&parse("exp(1/eps)").unwrap()), Some(ExtLimit::PosInf));
        let ll = Expr::lambda().compose(Expr::lambda());
        assert!(limit_at_zero(&ll).unwrap().is_zero_from_above());
        assert_eq!(limit_at_zero(&parse("1 + eps").unwrap()), Some(ExtLimit::Finite(1.0, Side::Above)));
        assert_eq!(limit_at_zero(&parse("floor(1/eps)").unwrap()), Some(ExtLimit::PosInf));
        assert_eq!(limit_at_zero(&parse("n").unwrap()), Some(ExtLimit::PosInf));
    }

    #[test]
    fn refuses_indeterminate_forms() {
        assert_eq!(lim(&parse("1/eps - 1/eps").unwrap()), None);
        assert_eq!(lim(&parse("eps * (1/eps)").unwrap()), None);
        // the normal form resolves what the raw tree cannot
        assert_eq!(limit_at_zero(&parse("eps * (1/eps)").unwrap()), Some(ExtLimit::Finite(1.0, Side::Exact)));
    }
}
