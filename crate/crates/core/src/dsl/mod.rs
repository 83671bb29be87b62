//! A small expression language for placement scores.
//!
//! Programs are arithmetic over the placement [`Features`], so evolved
//! heuristics stay plain data: parseable, comparable and safe to evaluate.
//! See `parser` for the grammar. Evaluation is total; `x / 0` is 0.

mod ast;
mod eval;
mod mutate;
mod parser;

use std::fmt;
use std::str::FromStr;

use crate::constructive::{Features, Scorer};

pub use ast::{BinOp, Cmp, Expr};
pub use mutate::{fold, mutate, random_expr, random_program, MutationOp};
pub use parser::{DiagnosticKind, ParseDiagnostic, SourcePos};

pub const MAX_DEPTH: usize = 32;
pub const MAX_NODES: usize = 512;

/// A validated scoring expression and the text it came from.
#[derive(Debug, Clone)]
pub struct ScoreProgram {
    source: String,
    ast: Expr,
}

/// Programs compare by tree, not by source text.
impl PartialEq for ScoreProgram {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl ScoreProgram {
    pub fn parse(source: &str) -> Result<Self, ParseDiagnostic> {
        let ast = parser::parse_expr(source)?;
        check_limits(&ast)?;
        Ok(Self { source: source.to_string(), ast })
    }

    pub fn from_ast(ast: Expr) -> Result<Self, ParseDiagnostic> {
        check_limits(&ast)?;
        Ok(Self { source: ast.to_string(), ast })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_ast(Expr::Const(c)).expect("a leaf is within limits")
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Canonical fully parenthesized text.
    pub fn serialize(&self) -> String {
        self.ast.to_string()
    }

    pub fn evaluate(&self, f: &Features) -> f64 {
        eval::eval(&self.ast, f)
    }
}

fn check_limits(ast: &Expr) -> Result<(), ParseDiagnostic> {
    let (depth, nodes) = (ast.depth(), ast.node_count());
    if depth > MAX_DEPTH || nodes > MAX_NODES {
        return Err(ParseDiagnostic {
            kind: DiagnosticKind::Limit,
            pos: SourcePos { offset: 0, line: 1, column: 1 },
            message: format!("tree has depth {depth} and {nodes} nodes; limits are {MAX_DEPTH} and {MAX_NODES}"),
        });
    }
    Ok(())
}

impl FromStr for ScoreProgram {
    type Err = ParseDiagnostic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for ScoreProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.ast, f)
    }
}

impl Scorer for ScoreProgram {
    fn score(&self, f: &Features) -> f64 {
        self.evaluate(f)
    }

    fn name(&self) -> String {
        self.serialize()
    }
}
