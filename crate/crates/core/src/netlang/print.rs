//! Pretty printer emitting the DSL; `parse(print(e)) == e` structurally.

use core::fmt::{self, Write};

use super::expr::{BinaryOp, Expr, UnaryOp};
use crate::Q;

/// Rational literal as accepted by the parser: `3`, `-3`, `1/2`, `-7/4`.
pub fn write_rational(out: &mut impl Write, q: &Q) -> fmt::Result {
    if q.is_integer() {
        write!(out, "{}", q.numer())
    } else {
        write!(out, "{}/{}", q.numer(), q.denom())
    }
}

// Binding levels: 0 sum, 1 product, 2 operand of a product or prefix minus.
fn write_expr(out: &mut impl Write, e: &Expr, level: u8) -> fmt::Result {
    match e {
        Expr::Binary(op @ (BinaryOp::Add | BinaryOp::Sub), a, b) => {
            let paren = level > 0;
            if paren {
                out.write_char('(')?;
            }
            write_expr(out, a, 0)?;
            out.write_str(if *op == BinaryOp::Add { " + " } else { " - " })?;
            write_expr(out, b, 1)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Expr::Binary(op @ (BinaryOp::Mul | BinaryOp::Div), a, b) => {
            let paren = level > 1;
            if paren {
                out.write_char('(')?;
            }
            write_expr(out, a, 1)?;
            out.write_str(if *op == BinaryOp::Mul { " * " } else { " / " })?;
            write_expr(out, b, 2)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Expr::Unary(UnaryOp::Neg, a) => {
            out.write_char('-')?;
            if let Expr::Const(_) = a.as_ref() {
                // keeps `-(3)` distinct from the literal `-3`
                out.write_char('(')?;
                write_expr(out, a, 0)?;
                out.write_char(')')
            } else {
                write_expr(out, a, 2)
            }
        }
        Expr::Const(c) => write_rational(out, c),
        Expr::Var(v) => out.write_str(v.name()),
        Expr::Param => out.write_str("m"),
        Expr::Pi => out.write_str("pi"),
        Expr::Unary(op, a) => {
            let name = match op {
                UnaryOp::Abs => "abs",
                UnaryOp::Exp => "exp",
                UnaryOp::Log => "log",
                UnaryOp::Floor => "floor",
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::Neg => unreachable!(),
            };
            write!(out, "{}(", name)?;
            write_expr(out, a, 0)?;
            out.write_char(')')
        }
        Expr::Binary(op, a, b) => {
            out.write_str(if *op == BinaryOp::Min { "min(" } else { "max(" })?;
            write_expr(out, a, 0)?;
            out.write_str(", ")?;
            write_expr(out, b, 0)?;
            out.write_char(')')
        }
        Expr::Pow(a, q) => {
            out.write_str("pow(")?;
            write_expr(out, a, 0)?;
            out.write_str(", ")?;
            write_rational(out, q)?;
            out.write_char(')')
        }
        Expr::PowGeneral(a, b) => {
            out.write_str("powg(")?;
            write_expr(out, a, 0)?;
            out.write_str(", ")?;
            write_expr(out, b, 0)?;
            out.write_char(')')
        }
        Expr::Compose(a, b) => {
            out.write_str("compose(")?;
            write_expr(out, a, 0)?;
            out.write_str(", ")?;
            write_expr(out, b, 0)?;
            out.write_char(')')
        }
        Expr::Hybrid(h) => {
            out.write_str("hybrid(")?;
            write_expr(out, &h.low, 0)?;
            out.write_str(", ")?;
            write_expr(out, &h.high, 0)?;
            out.write_str(", [")?;
            for (i, s) in h.switches.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write_rational(out, s)?;
            }
            out.write_str("])")
        }
        Expr::Primitive(p) => {
            out.write_str("primitive(")?;
            write_expr(out, &p.rho, 0)?;
            out.write_str(", ")?;
            write_expr(out, &p.upper, 0)?;
            out.write_str(", ")?;
            write_rational(out, &p.radius)?;
            out.write_char(')')
        }
        Expr::Convolve(c) => {
            out.write_str("convolve(")?;
            for (i, part) in [&c.f, &c.rho, &c.scale, &c.at].into_iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write_expr(out, part, 0)?;
            }
            out.write_str(", ")?;
            write_rational(out, &c.radius)?;
            out.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

/// Compact human-oriented rendering of a rational: `1/2` or `-3`.
pub fn rational_string(q: &Q) -> alloc::string::String {
    let mut s = alloc::string::String::new();
    let _ = write_rational(&mut s, q);
    s
}
