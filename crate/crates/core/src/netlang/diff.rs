//! Symbolic derivatives with respect to `x` or `t`.

use alloc::sync::Arc;

use num_traits::One;

use super::expr::{BinaryOp, ConvolveNode, Expr, UnaryOp, Var};
use super::normal::normalize;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("`{0}` is not differentiable in the requested variable")]
    NotDifferentiable(&'static str),
    #[error("only x and t derivatives are supported")]
    Variable,
}

/// `∂e/∂v`, normalized.
pub fn derive(e: &Expr, v: Var) -> Result<Expr, DiffError> {
    Ok(normalize(&d(e, v)?))
}

/// `∂^k e/∂v^k`, normalized after each step.
pub fn derive_n(e: &Expr, v: Var, k: usize) -> Result<Expr, DiffError> {
    let mut cur = normalize(e);
    for _ in 0..k {
        cur = derive(&cur, v)?;
    }
    Ok(cur)
}

fn d(e: &Expr, v: Var) -> Result<Expr, DiffError> {
    if v == Var::Eps || v == Var::N {
        return Err(DiffError::Variable);
    }
    if !e.mentions(v) {
        return Ok(Expr::zero());
    }
    Ok(match e {
        Expr::Var(_) => Expr::one(),
        Expr::Param | Expr::Const(_) | Expr::Pi | Expr::Hybrid(_) => Expr::zero(),
        Expr::Unary(op, a) => {
            let da = d(a, v)?;
            let a = (**a).clone();
            match op {
                UnaryOp::Neg => da.neg(),
                UnaryOp::Exp => a.exp().mul(da),
                UnaryOp::Log => da.div(a),
                UnaryOp::Sin => a.cos().mul(da),
                UnaryOp::Cos => a.sin().neg().mul(da),
                UnaryOp::Abs => a.clone().div(a.abs()).mul(da),
                UnaryOp::Floor => return Err(DiffError::NotDifferentiable("floor")),
            }
        }
        Expr::Binary(op, a, b) => {
            let (da, db) = (d(a, v)?, d(b, v)?);
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinaryOp::Add => da.add(db),
                BinaryOp::Sub => da.sub(db),
                BinaryOp::Mul => da.mul(b).add(a.mul(db)),
                BinaryOp::Div => da.mul(b.clone()).sub(a.mul(db)).div(b.powi(2)),
                BinaryOp::Min => return Err(DiffError::NotDifferentiable("min")),
                BinaryOp::Max => return Err(DiffError::NotDifferentiable("max")),
            }
        }
        Expr::Pow(a, q) => {
            let da = d(a, v)?;
            Expr::Const(q.clone()).mul((**a).clone().pow(q - Q::one())).mul(da)
        }
        Expr::PowGeneral(a, b) => {
            // a^b (b' log a + b a'/a)
            let (da, db) = (d(a, v)?, d(b, v)?);
            let (a, b) = ((**a).clone(), (**b).clone());
            let inner = db.mul(a.clone().log()).add(b.clone().mul(da).div(a.clone()));
            a.pow_general(b).mul(inner)
        }
        Expr::Compose(body, f) => {
            if f.mentions(v) {
                return Err(DiffError::NotDifferentiable("compose"));
            }
            d(body, v)?.compose((**f).clone())
        }
        Expr::Primitive(p) => {
            let du = d(&p.upper, v)?;
            p.rho.subst_var(Var::X, &p.upper).mul(du)
        }
        Expr::Convolve(c) => {
            if c.scale.mentions(v) {
                return Err(DiffError::NotDifferentiable("convolve"));
            }
            let dat = d(&c.at, v)?;
            let df = d(&c.f, Var::X)?;
            let node = Expr::Convolve(Arc::new(ConvolveNode {
                f: normalize(&df),
                rho: c.rho.clone(),
                scale: c.scale.clone(),
                at: c.at.clone(),
                radius: c.radius.clone(),
            }));
            node.mul(dat)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::parse::{parse, parse_with, ParseOptions};

    fn p(s: &str) -> Expr {
        normalize(&parse_with(s, ParseOptions::extended()).unwrap())
    }

    #[test]
    fn chain_rule_on_oscillation() {
        let u = p("sin(x/eps)");
        assert_eq!(derive(&u, Var::X).unwrap(), p("pow(eps,-1) * cos(x/eps)"));
        assert_eq!(derive_n(&u, Var::X, 2).unwrap(), p("-pow(eps,-2) * sin(x/eps)"));
    }

    #[test]
    fn leibniz_rule() {
        let u = p("exp(x) * x");
        let v = p("pow(x,3) + eps");
        let lhs = derive(&u.clone().mul(v.clone()), Var::X).unwrap();
        let rhs = normalize(&derive(&u, Var::X).unwrap().mul(v.clone()).add(u.mul(derive(&v, Var::X).unwrap())));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn non_differentiable_nodes() {
        assert!(derive(&parse("floor(x)").unwrap(), Var::X).is_err());
        assert_eq!(derive(&parse("floor(eps)").unwrap(), Var::X).unwrap(), Expr::zero());
        assert!(derive(&parse("x").unwrap(), Var::Eps).is_err());
    }
}
