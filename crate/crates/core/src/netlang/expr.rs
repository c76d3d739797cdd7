use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::Q;

/// Free variables a net expression may mention.
///
/// `Eps` is the index of nets on `(0,1]`, `N` the index of nets on the
/// reversed naturals, `X` the space variable of function nets and `T` the
/// time variable of ODE problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Eps,
    N,
    X,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Eps => "eps",
            Var::N => "n",
            Var::X => "x",
            Var::T => "t",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    Neg,
    Abs,
    Exp,
    Log,
    Floor,
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

/// Closed-form net expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(Var),
    /// The formal parameter `m` of a parametric family such as `eps^-m`.
    Param,
    Const(Q),
    Pi,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Power with a constant rational exponent.
    Pow(Box<Expr>, Q),
    /// `a^b` for a general exponent, read as `exp(b log a)`. Never in the fragment.
    PowGeneral(Box<Expr>, Box<Expr>),
    /// `ε ↦ e(f(ε))`.
    Compose(Box<Expr>, Box<Expr>),
    Hybrid(Arc<HybridNet>),
    Primitive(Arc<PrimitiveNode>),
    Convolve(Arc<ConvolveNode>),
}

/// A net switching between `low` and `high` on the blocks cut by `switches`.
///
/// `switches` is strictly decreasing with `switches[0]` the largest cut.
/// On `(s[n], s[n-1]]` (1-based block `n`) the value is `low` for odd `n` and
/// `high` for even `n`; below the last cut the parity rule continues with the
/// final block. Above `s[0]` the value is `low`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HybridNet {
    pub low: Expr,
    pub high: Expr,
    pub switches: Vec<Q>,
}

impl HybridNet {
    /// 1-based block number containing `eps`, given a comparison oracle.
    pub fn block_of(&self, below_or_at: impl Fn(&Q) -> bool) -> usize {
        // below_or_at(s) is true when eps <= s
        let mut block = 0;
        for (i, s) in self.switches.iter().enumerate() {
            if below_or_at(s) {
                block = i + 1;
            } else {
                break;
            }
        }
        block.max(1)
    }

    pub fn branch(&self, block: usize) -> &Expr {
        if block % 2 == 1 {
            &self.low
        } else {
            &self.high
        }
    }
}

/// `∫_{-∞}^{upper} ρ(s) ds` with `ρ` written in `x`; `ρ` is negligible beyond `radius`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimitiveNode {
    pub rho: Expr,
    pub upper: Expr,
    pub radius: Q,
}

/// `∫ f(at − s/scale) ρ(s) ds` over `|s| ≤ radius`, with `f` and `ρ` written in `x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConvolveNode {
    pub f: Expr,
    pub rho: Expr,
    pub scale: Expr,
    pub at: Expr,
    pub radius: Q,
}

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

impl Expr {
    pub fn eps() -> Expr {
        Expr::Var(Var::Eps)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn n() -> Expr {
        Expr::Var(Var::N)
    }

    pub fn int(v: i64) -> Expr {
        Expr::Const(q(v))
    }

    pub fn constant(v: Q) -> Expr {
        Expr::Const(v)
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }

    pub fn abs(self) -> Expr {
        Expr::unary(UnaryOp::Abs, self)
    }

    pub fn exp(self) -> Expr {
        Expr::unary(UnaryOp::Exp, self)
    }

    pub fn log(self) -> Expr {
        Expr::unary(UnaryOp::Log, self)
    }

    pub fn floor(self) -> Expr {
        Expr::unary(UnaryOp::Floor, self)
    }

    pub fn sin(self) -> Expr {
        Expr::unary(UnaryOp::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::unary(UnaryOp::Cos, self)
    }

    pub fn add(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, self, o)
    }

    pub fn sub(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, self, o)
    }

    pub fn mul(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, self, o)
    }

    pub fn div(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, self, o)
    }

    pub fn min(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Min, self, o)
    }

    pub fn max(self, o: Expr) -> Expr {
        Expr::binary(BinaryOp::Max, self, o)
    }

    pub fn pow(self, e: Q) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn powi(self, e: i64) -> Expr {
        self.pow(q(e))
    }

    pub fn pow_general(self, e: Expr) -> Expr {
        Expr::PowGeneral(Box::new(self), Box::new(e))
    }

    pub fn compose(self, f: Expr) -> Expr {
        Expr::Compose(Box::new(self), Box::new(f))
    }

    /// `λ(ε) = −1/log ε`.
    pub fn lambda() -> Expr {
        Expr::int(-1).div(Expr::eps().log())
    }

    /// `η(ε) = exp(−1/ε)`.
    pub fn eta() -> Expr {
        Expr::int(-1).div(Expr::eps()).exp()
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// Whether `v` occurs free. Hybrid nets and `Compose` bodies only see `Eps`.
    pub fn mentions(&self, v: Var) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            Expr::Param | Expr::Const(_) | Expr::Pi => false,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.mentions(v),
            Expr::Binary(_, a, b) | Expr::PowGeneral(a, b) => a.mentions(v) || b.mentions(v),
            Expr::Compose(e, f) => {
                if v == Var::Eps {
                    e.mentions(Var::Eps) && f.mentions(Var::Eps)
                } else {
                    e.mentions(v) || (e.mentions(Var::Eps) && f.mentions(v))
                }
            }
            Expr::Hybrid(_) => v == Var::Eps,
            Expr::Primitive(p) => p.upper.mentions(v),
            Expr::Convolve(c) => c.scale.mentions(v) || c.at.mentions(v),
        }
    }

    pub fn mentions_param(&self) -> bool {
        match self {
            Expr::Param => true,
            Expr::Var(_) | Expr::Const(_) | Expr::Pi | Expr::Hybrid(_) => false,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.mentions_param(),
            Expr::Binary(_, a, b) | Expr::PowGeneral(a, b) | Expr::Compose(a, b) => {
                a.mentions_param() || b.mentions_param()
            }
            Expr::Primitive(p) => p.upper.mentions_param(),
            Expr::Convolve(c) => c.scale.mentions_param() || c.at.mentions_param(),
        }
    }

    /// Replaces every free occurrence of `v` by `by`, without simplifying.
    pub fn subst_var(&self, v: Var, by: &Expr) -> Expr {
        match self {
            Expr::Var(w) if *w == v => by.clone(),
            Expr::Var(_) | Expr::Param | Expr::Const(_) | Expr::Pi => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.subst_var(v, by)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.subst_var(v, by), b.subst_var(v, by)),
            Expr::Pow(a, e) => a.subst_var(v, by).pow(e.clone()),
            Expr::PowGeneral(a, b) => a.subst_var(v, by).pow_general(b.subst_var(v, by)),
            Expr::Compose(e, f) => {
                let inner = f.subst_var(v, by);
                if v == Var::Eps {
                    // e is read at f(ε); only f sees the outer ε
                    Expr::Compose(e.clone(), Box::new(inner))
                } else {
                    Expr::Compose(Box::new(e.subst_var(v, by)), Box::new(inner))
                }
            }
            Expr::Hybrid(_) => {
                if v == Var::Eps {
                    Expr::Compose(Box::new(self.clone()), Box::new(by.clone()))
                } else {
                    self.clone()
                }
            }
            Expr::Primitive(p) => Expr::Primitive(Arc::new(PrimitiveNode {
                rho: p.rho.clone(),
                upper: p.upper.subst_var(v, by),
                radius: p.radius.clone(),
            })),
            Expr::Convolve(c) => Expr::Convolve(Arc::new(ConvolveNode {
                f: c.f.clone(),
                rho: c.rho.clone(),
                scale: c.scale.subst_var(v, by),
                at: c.at.subst_var(v, by),
                radius: c.radius.clone(),
            })),
        }
    }

    pub fn subst_param(&self, by: &Expr) -> Expr {
        match self {
            Expr::Param => by.clone(),
            Expr::Var(_) | Expr::Const(_) | Expr::Pi | Expr::Hybrid(_) => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.subst_param(by)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.subst_param(by), b.subst_param(by)),
            Expr::Pow(a, e) => a.subst_param(by).pow(e.clone()),
            Expr::PowGeneral(a, b) => a.subst_param(by).pow_general(b.subst_param(by)),
            Expr::Compose(e, f) => e.subst_param(by).compose(f.subst_param(by)),
            Expr::Primitive(p) => Expr::Primitive(Arc::new(PrimitiveNode {
                rho: p.rho.clone(),
                upper: p.upper.subst_param(by),
                radius: p.radius.clone(),
            })),
            Expr::Convolve(c) => Expr::Convolve(Arc::new(ConvolveNode {
                f: c.f.clone(),
                rho: c.rho.clone(),
                scale: c.scale.subst_param(by),
                at: c.at.subst_param(by),
                radius: c.radius.clone(),
            })),
        }
    }

    /// Inlines every `Compose` whose inner body is not a hybrid net.
    pub fn expand_compose(&self) -> Expr {
        match self {
            Expr::Compose(e, f) => {
                let f = f.expand_compose();
                match e.as_ref() {
                    Expr::Hybrid(_) => Expr::Compose(e.clone(), Box::new(f)),
                    Expr::Compose(_, _) => e.expand_compose().subst_var(Var::Eps, &f).expand_compose(),
                    body => body.expand_compose().subst_var(Var::Eps, &f),
                }
            }
            Expr::Var(_) | Expr::Param | Expr::Const(_) | Expr::Pi | Expr::Hybrid(_) => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.expand_compose()),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.expand_compose(), b.expand_compose()),
            Expr::Pow(a, e) => a.expand_compose().pow(e.clone()),
            Expr::PowGeneral(a, b) => a.expand_compose().pow_general(b.expand_compose()),
            Expr::Primitive(p) => Expr::Primitive(Arc::new(PrimitiveNode {
                rho: p.rho.clone(),
                upper: p.upper.expand_compose(),
                radius: p.radius.clone(),
            })),
            Expr::Convolve(c) => Expr::Convolve(Arc::new(ConvolveNode {
                f: c.f.clone(),
                rho: c.rho.clone(),
                scale: c.scale.expand_compose(),
                at: c.at.expand_compose(),
                radius: c.radius.clone(),
            })),
        }
    }

    /// Node count, used to bound work in generators and expansions.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Param | Expr::Const(_) | Expr::Pi => 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Binary(_, a, b) | Expr::PowGeneral(a, b) | Expr::Compose(a, b) => 1 + a.size() + b.size(),
            Expr::Hybrid(h) => 1 + h.low.size() + h.high.size(),
            Expr::Primitive(p) => 1 + p.rho.size() + p.upper.size(),
            Expr::Convolve(c) => 1 + c.f.size() + c.rho.size() + c.scale.size() + c.at.size(),
        }
    }
}
