//! Expression trees and their canonical text form.

use std::fmt;

use crate::constructive::Feature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    pub const ALL: [Cmp; 5] = [Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt];

    pub fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Eq => a == b,
            Cmp::Ge => a >= b,
            Cmp::Gt => a > b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Feature(Feature),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    If { cmp: Cmp, lhs: Box<Expr>, rhs: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
}

impl Expr {
    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Feature(_))
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Feature(_) => vec![],
            Expr::Binary(_, a, b) => vec![a, b],
            Expr::Abs(a) => vec![a],
            Expr::If { lhs, rhs, then, otherwise, .. } => vec![lhs, rhs, then, otherwise],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Const(_) | Expr::Feature(_) => vec![],
            Expr::Binary(_, a, b) => vec![a, b],
            Expr::Abs(a) => vec![a],
            Expr::If { lhs, rhs, then, otherwise, .. } => vec![lhs, rhs, then, otherwise],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().into_iter().map(Expr::node_count).sum::<usize>()
    }

    /// A leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Expr::depth).max().unwrap_or(0)
    }

    /// Node at pre-order index `i`.
    pub fn subtree(&self, i: usize) -> Option<&Expr> {
        if i == 0 {
            return Some(self);
        }
        let mut offset = 1;
        for c in self.children() {
            let n = c.node_count();
            if i < offset + n {
                return c.subtree(i - offset);
            }
            offset += n;
        }
        None
    }

    pub fn subtree_mut(&mut self, i: usize) -> Option<&mut Expr> {
        if i == 0 {
            return Some(self);
        }
        let mut offset = 1;
        for c in self.children_mut() {
            let n = c.node_count();
            if i < offset + n {
                return c.subtree_mut(i - offset);
            }
            offset += n;
        }
        None
    }

    /// Pre-order indices of nodes satisfying `pred`.
    pub fn positions(&self, pred: impl Fn(&Expr) -> bool) -> Vec<usize> {
        fn walk(e: &Expr, pred: &dyn Fn(&Expr) -> bool, next: &mut usize, out: &mut Vec<usize>) {
            if pred(e) {
                out.push(*next);
            }
            *next += 1;
            for c in e.children() {
                walk(c, pred, next, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &pred, &mut 0, &mut out);
        out
    }
}

/// Fully parenthesized form; parsing it yields an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Feature(x) => f.write_str(x.name()),
            Expr::Binary(op, a, b) => match op {
                BinOp::Add => write!(f, "({a} + {b})"),
                BinOp::Sub => write!(f, "({a} - {b})"),
                BinOp::Mul => write!(f, "({a} * {b})"),
                BinOp::Div => write!(f, "({a} / {b})"),
                BinOp::Min => write!(f, "min({a}, {b})"),
                BinOp::Max => write!(f, "max({a}, {b})"),
            },
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::If { cmp, lhs, rhs, then, otherwise } => {
                write!(f, "(if {lhs} {} {rhs} then {then} else {otherwise})", cmp.symbol())
            }
        }
    }
}
