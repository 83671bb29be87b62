//! Tokenizer and recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | '-' factor | feature | '(' expr ')'
//!         | ('min' | 'max') '(' expr (',' expr)+ ')'
//!         | 'abs' '(' expr ')'
//!         | 'if' expr cmp expr 'then' expr 'else' expr
//! cmp    := '<' | '<=' | '=' | '==' | '>=' | '>' | '≤' | '≥'
//! ```

use std::fmt;

use super::ast::{BinOp, Cmp, Expr};
use crate::constructive::Feature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lex,
    Syntax,
    UnknownIdentifier,
    Limit,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Lex => "lex error",
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::UnknownIdentifier => "unknown identifier",
            DiagnosticKind::Limit => "limit exceeded",
        })
    }
}

/// Byte offset plus 1-based line and character column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourcePos {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub kind: DiagnosticKind,
    pub pos: SourcePos,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.pos.line, self.pos.column, self.kind, self.message)
    }
}

impl std::error::Error for ParseDiagnostic {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Cmp(Cmp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Cmp(_) => f.write_str("comparison"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn diag(kind: DiagnosticKind, pos: SourcePos, message: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic { kind, pos, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, SourcePos)>, ParseDiagnostic> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let end_pos = |line, col| SourcePos { offset: src.len(), line, column: col };
    while i < chars.len() {
        let (offset, c) = chars[i];
        let pos = SourcePos { offset, line, column: col };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '≤' => Tok::Cmp(Cmp::Le),
            '≥' => Tok::Cmp(Cmp::Ge),
            '<' | '>' | '=' => {
                let eq_next = chars.get(i + 1).is_some_and(|&(_, n)| n == '=');
                if eq_next {
                    i += 1;
                }
                Tok::Cmp(match (c, eq_next) {
                    ('<', false) => Cmp::Lt,
                    ('<', true) => Cmp::Le,
                    ('>', false) => Cmp::Gt,
                    ('>', true) => Cmp::Ge,
                    _ => Cmp::Eq,
                })
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                let digits = |j: &mut usize| {
                    while chars.get(*j).is_some_and(|&(_, d)| d.is_ascii_digit()) {
                        *j += 1;
                    }
                };
                digits(&mut j);
                if chars.get(j).is_some_and(|&(_, d)| d == '.') {
                    j += 1;
                    digits(&mut j);
                }
                if chars.get(j).is_some_and(|&(_, d)| d == 'e' || d == 'E') {
                    let mut k = j + 1;
                    if chars.get(k).is_some_and(|&(_, d)| d == '+' || d == '-') {
                        k += 1;
                    }
                    if chars.get(k).is_some_and(|&(_, d)| d.is_ascii_digit()) {
                        j = k;
                        digits(&mut j);
                    }
                }
                let end = chars.get(j).map_or(src.len(), |&(o, _)| o);
                let text = &src[offset..end];
                let value: f64 =
                    text.parse().map_err(|_| diag(DiagnosticKind::Lex, pos, format!("malformed number `{text}`")))?;
                if !value.is_finite() {
                    return Err(diag(DiagnosticKind::Lex, pos, format!("number `{text}` is out of range")));
                }
                i = j - 1;
                Tok::Num(value)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while chars.get(j).is_some_and(|&(_, d)| d.is_alphanumeric() || d == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(src.len(), |&(o, _)| o);
                i = j - 1;
                Tok::Ident(src[offset..end].to_string())
            }
            other => return Err(diag(DiagnosticKind::Lex, pos, format!("unexpected character `{other}`"))),
        };
        i += 1;
        col += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, end_pos(line, col)));
    Ok(out)
}

/// Nesting bound while parsing, well above the tree depth cap, so hostile
/// input cannot exhaust the stack before the cap is checked.
const MAX_NESTING: usize = 256;

struct Parser {
    toks: Vec<(Tok, SourcePos)>,
    at: usize,
    nesting: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> SourcePos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, SourcePos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, context: &str) -> Result<(), ParseDiagnostic> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(diag(DiagnosticKind::Syntax, self.pos(), format!("expected {want} {context}, found {}", self.peek())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseDiagnostic> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(diag(DiagnosticKind::Syntax, self.pos(), format!("expected `{kw}`, found {other}"))),
        }
    }

    fn enter(&mut self) -> Result<(), ParseDiagnostic> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(diag(DiagnosticKind::Limit, self.pos(), format!("nesting deeper than {MAX_NESTING}")));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseDiagnostic> {
        self.enter()?;
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            e = Expr::binary(op, e, self.term()?);
        }
        self.nesting -= 1;
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, ParseDiagnostic> {
        let mut e = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            e = Expr::binary(op, e, self.factor()?);
        }
        Ok(e)
    }

    fn args(&mut self, name: &str) -> Result<Vec<Expr>, ParseDiagnostic> {
        self.expect(Tok::LParen, &format!("after `{name}`"))?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, &format!("to close `{name}(`"))?;
        Ok(args)
    }

    fn factor(&mut self) -> Result<Expr, ParseDiagnostic> {
        self.enter()?;
        let (tok, pos) = self.bump();
        let e = match tok {
            Tok::Num(n) => Expr::Const(n),
            Tok::Minus => match self.peek().clone() {
                Tok::Num(n) => {
                    self.bump();
                    Expr::Const(-n)
                }
                _ => Expr::binary(BinOp::Sub, Expr::Const(0.0), self.factor()?),
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "to close `(`")?;
                e
            }
            Tok::Ident(name) => match name.as_str() {
                "min" | "max" => {
                    let op = if name == "min" { BinOp::Min } else { BinOp::Max };
                    let args = self.args(&name)?;
                    if args.len() < 2 {
                        return Err(diag(DiagnosticKind::Syntax, pos, format!("`{name}` takes at least two arguments")));
                    }
                    let mut it = args.into_iter();
                    let first = it.next().expect("two or more");
                    it.fold(first, |acc, a| Expr::binary(op, acc, a))
                }
                "abs" => {
                    let mut args = self.args("abs")?;
                    if args.len() != 1 {
                        return Err(diag(DiagnosticKind::Syntax, pos, "`abs` takes exactly one argument"));
                    }
                    Expr::Abs(Box::new(args.remove(0)))
                }
                "if" => {
                    let lhs = self.expr()?;
                    let cmp = match self.peek() {
                        Tok::Cmp(c) => *c,
                        other => {
                            return Err(diag(
                                DiagnosticKind::Syntax,
                                self.pos(),
                                format!("expected a comparison after the `if` operand, found {other}"),
                            ))
                        }
                    };
                    self.bump();
                    let rhs = self.expr()?;
                    self.expect_keyword("then")?;
                    let then = self.expr()?;
                    self.expect_keyword("else")?;
                    let otherwise = self.expr()?;
                    Expr::If {
                        cmp,
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                        then: Box::new(then),
                        otherwise: Box::new(otherwise),
                    }
                }
                "then" | "else" => {
                    return Err(diag(DiagnosticKind::Syntax, pos, format!("unexpected `{name}` without `if`")))
                }
                _ => match name.parse::<Feature>() {
                    Ok(f) => Expr::Feature(f),
                    Err(()) => {
                        let known: Vec<&str> = Feature::ALL.iter().map(|f| f.name()).collect();
                        return Err(diag(
                            DiagnosticKind::UnknownIdentifier,
                            pos,
                            format!("`{name}` is not a feature (known: {})", known.join(", ")),
                        ));
                    }
                },
            },
            other => {
                return Err(diag(DiagnosticKind::Syntax, pos, format!("expected an expression, found {other}")));
            }
        };
        self.nesting -= 1;
        Ok(e)
    }
}

/// Parses one expression; limits on the tree are checked by the caller.
pub(crate) fn parse_expr(src: &str) -> Result<Expr, ParseDiagnostic> {
    let mut p = Parser { toks: lex(src)?, at: 0, nesting: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(diag(DiagnosticKind::Syntax, p.pos(), format!("unexpected {} after expression", p.peek())));
    }
    Ok(e)
}
