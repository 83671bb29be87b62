//! Total evaluation: division by zero yields 0, NaN becomes 0 and infinities
//! saturate to the largest finite magnitude, after every operation.

use super::ast::{BinOp, Expr};
use crate::constructive::Features;

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(f64::MIN, f64::MAX)
    }
}

pub(crate) fn apply(op: BinOp, a: f64, b: f64) -> f64 {
    clean(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div if b == 0.0 => 0.0,
        BinOp::Div => a / b,
        BinOp::Min => a.min(b),
        BinOp::Max => a.max(b),
    })
}

pub(crate) fn eval(e: &Expr, f: &Features) -> f64 {
    match e {
        Expr::Const(c) => clean(*c),
        Expr::Feature(x) => clean(f.get(*x)),
        Expr::Binary(op, a, b) => apply(*op, eval(a, f), eval(b, f)),
        Expr::Abs(a) => eval(a, f).abs(),
        Expr::If { cmp, lhs, rhs, then, otherwise } => {
            if cmp.holds(eval(lhs, f), eval(rhs, f)) {
                eval(then, f)
            } else {
                eval(otherwise, f)
            }
        }
    }
}
