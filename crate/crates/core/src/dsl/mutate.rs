//! Seeded random programs and structural mutations.

use rand::seq::SliceRandom;
use rand::Rng;

use super::ast::{BinOp, Cmp, Expr};
use super::eval::apply;
use super::{ScoreProgram, MAX_DEPTH, MAX_NODES};
use crate::constructive::Feature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationOp {
    /// A fresh random program unlike the parent.
    Diversify,
    /// Graft a subtree of a second parent into the first.
    Synthesize,
    /// Replace one subtree with a random one.
    Improve,
    /// Perturb one constant.
    Tune,
    /// Fold constants and identities, or prune one subtree to a leaf.
    Simplify,
}

const BIN_OPS: [BinOp; 6] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Min, BinOp::Max];

fn random_const<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (rng.gen_range(-1.0..2.0f64) * 100.0).round() / 100.0
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R) -> Expr {
    if rng.gen_bool(0.7) {
        Expr::Feature(*Feature::ALL.choose(rng).expect("non-empty"))
    } else {
        Expr::Const(random_const(rng))
    }
}

/// Random tree of depth at most `max_depth` (at least 1).
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, max_depth: usize) -> Expr {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return random_leaf(rng);
    }
    let d = max_depth - 1;
    match rng.gen_range(0..20) {
        0 => Expr::Abs(Box::new(random_expr(rng, d))),
        1 if max_depth >= 3 => Expr::If {
            cmp: *Cmp::ALL.choose(rng).expect("non-empty"),
            lhs: Box::new(random_expr(rng, d.min(2))),
            rhs: Box::new(random_expr(rng, d.min(2))),
            then: Box::new(random_expr(rng, d)),
            otherwise: Box::new(random_expr(rng, d)),
        },
        k => {
            // Favour sums and products, the shape of useful weighted scores.
            let op = match k % 8 {
                0..=2 => BinOp::Add,
                3..=4 => BinOp::Mul,
                5 => BinOp::Sub,
                6 => *BIN_OPS[3..].choose(rng).expect("non-empty"),
                _ => *BIN_OPS.choose(rng).expect("non-empty"),
            };
            Expr::binary(op, random_expr(rng, d), random_expr(rng, d))
        }
    }
}

pub fn random_program<R: Rng + ?Sized>(rng: &mut R) -> ScoreProgram {
    ScoreProgram::from_ast(random_expr(rng, 5)).expect("depth 5 is within limits")
}

fn within_limits(e: &Expr) -> bool {
    e.depth() <= MAX_DEPTH && e.node_count() <= MAX_NODES
}

fn replace_at(e: &Expr, i: usize, new: Expr) -> Expr {
    let mut out = e.clone();
    *out.subtree_mut(i).expect("index in range") = new;
    out
}

/// Applies one bottom-up pass of constant folding and identity rules.
pub fn fold(e: &Expr) -> Expr {
    use Expr::*;
    let zero = |e: &Expr| matches!(e, Const(c) if *c == 0.0);
    let one = |e: &Expr| matches!(e, Const(c) if *c == 1.0);
    match e {
        Const(_) | Feature(_) => e.clone(),
        Abs(a) => match fold(a) {
            Const(c) => Const(c.abs()),
            inner @ Abs(_) => inner,
            inner => Abs(Box::new(inner)),
        },
        Binary(op, a, b) => {
            let (a, b) = (fold(a), fold(b));
            if let (Const(x), Const(y)) = (&a, &b) {
                return Const(apply(*op, *x, *y));
            }
            match op {
                BinOp::Add if zero(&b) => a,
                BinOp::Add if zero(&a) => b,
                BinOp::Sub if zero(&b) => a,
                BinOp::Sub if a == b => Const(0.0),
                BinOp::Mul if one(&b) => a,
                BinOp::Mul if one(&a) => b,
                BinOp::Mul if zero(&a) || zero(&b) => Const(0.0),
                BinOp::Div if one(&b) => a,
                BinOp::Div if zero(&a) || zero(&b) => Const(0.0),
                BinOp::Min | BinOp::Max if a == b => a,
                _ => Expr::binary(*op, a, b),
            }
        }
        If { cmp, lhs, rhs, then, otherwise } => {
            let (lhs, rhs, then, otherwise) = (fold(lhs), fold(rhs), fold(then), fold(otherwise));
            if let (Const(x), Const(y)) = (&lhs, &rhs) {
                return if cmp.holds(*x, *y) { then } else { otherwise };
            }
            if then == otherwise {
                return then;
            }
            If { cmp: *cmp, lhs: Box::new(lhs), rhs: Box::new(rhs), then: Box::new(then), otherwise: Box::new(otherwise) }
        }
    }
}

fn fold_fixpoint(e: &Expr) -> Expr {
    let mut cur = e.clone();
    loop {
        let next = fold(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn leaves(e: &Expr) -> Vec<&Expr> {
    if e.is_leaf() {
        return vec![e];
    }
    e.children().into_iter().flat_map(leaves).collect()
}

fn diversify<R: Rng + ?Sized>(parent: &Expr, rng: &mut R) -> Expr {
    for _ in 0..64 {
        let e = random_expr(rng, 5);
        if e != *parent {
            return e;
        }
    }
    // A parent that keeps being redrawn is a single leaf; nest it.
    Expr::Abs(Box::new(parent.clone()))
}

fn synthesize<R: Rng + ?Sized>(a: &Expr, b: &Expr, rng: &mut R) -> Expr {
    let donor = b.subtree(rng.gen_range(0..b.node_count())).expect("index in range").clone();
    replace_at(a, rng.gen_range(0..a.node_count()), donor)
}

fn improve<R: Rng + ?Sized>(e: &Expr, rng: &mut R) -> Expr {
    replace_at(e, rng.gen_range(0..e.node_count()), random_expr(rng, 3))
}

fn tune<R: Rng + ?Sized>(e: &Expr, rng: &mut R) -> Expr {
    let consts = e.positions(|n| matches!(n, Expr::Const(_)));
    if let Some(&i) = consts.choose(rng) {
        let Some(Expr::Const(c)) = e.subtree(i) else { unreachable!("position of a constant") };
        let c = if rng.gen_bool(0.5) { c * rng.gen_range(0.5..=2.0) } else { c + rng.gen_range(-1.0..=1.0) };
        return replace_at(e, i, Expr::Const(c));
    }
    // No constant to perturb: weight one feature instead.
    let feats = e.positions(|n| matches!(n, Expr::Feature(_)));
    let &i = feats.choose(rng).expect("a tree without constants has a feature leaf");
    let leaf = e.subtree(i).expect("index in range").clone();
    replace_at(e, i, Expr::binary(BinOp::Mul, Expr::Const(rng.gen_range(0.5..=2.0)), leaf))
}

fn simplify<R: Rng + ?Sized>(e: &Expr, rng: &mut R) -> Expr {
    let folded = fold_fixpoint(e);
    if folded != *e {
        return folded;
    }
    let internal: Vec<usize> = e.positions(|n| !n.is_leaf()).into_iter().filter(|&i| i != 0).collect();
    let Some(&i) = internal.choose(rng) else { return folded };
    let sub = e.subtree(i).expect("index in range");
    let leaf = (*leaves(sub).choose(rng).expect("a subtree has leaves")).clone();
    replace_at(e, i, leaf)
}

/// Applies `op`. `other` is the second parent for [`MutationOp::Synthesize`];
/// a random program stands in when absent. Results over the size limits fall
/// back to the parent.
pub fn mutate<R: Rng + ?Sized>(p: &ScoreProgram, op: MutationOp, other: Option<&ScoreProgram>, rng: &mut R) -> ScoreProgram {
    let e = p.ast();
    let out = match op {
        MutationOp::Diversify => diversify(e, rng),
        MutationOp::Synthesize => {
            let fallback;
            let b = match other {
                Some(o) => o.ast(),
                None => {
                    fallback = random_expr(rng, 4);
                    &fallback
                }
            };
            synthesize(e, b, rng)
        }
        MutationOp::Improve => improve(e, rng),
        MutationOp::Tune => tune(e, rng),
        MutationOp::Simplify => simplify(e, rng),
    };
    if within_limits(&out) {
        ScoreProgram::from_ast(out).expect("limits checked")
    } else {
        p.clone()
    }
}
