//! Candidates, diagnostics and failure classes.

use std::fmt;

use serde::{Serialize, Serializer};
use stowage_core::dsl::ScoreProgram;

/// The five generator request styles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    /// Explore: a child unlike its parents.
    E1,
    /// Explore: combine two parents.
    E2,
    /// Modify: improve one parent.
    M1,
    /// Modify: retune one parent's parameters.
    M2,
    /// Modify: strip redundant parts of one parent.
    M3,
}

impl Operator {
    pub const ALL: [Operator; 5] = [Operator::E1, Operator::E2, Operator::M1, Operator::M2, Operator::M3];
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::E1 => "E1",
            Operator::E2 => "E2",
            Operator::M1 => "M1",
            Operator::M2 => "M2",
            Operator::M3 => "M3",
        })
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    SyntaxError,
    ConstraintViolation,
    Timeout,
}

/// Why a candidate failed, in a form that can be shown to the generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Never empty.
    pub detail: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        let detail = if detail.trim().is_empty() { format!("{kind:?}") } else { detail };
        Self { kind, detail }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::SyntaxError => "syntax error",
            DiagnosticKind::ConstraintViolation => "constraint violation",
            DiagnosticKind::Timeout => "timeout",
        };
        write!(f, "{kind}: {}", self.detail)
    }
}

/// Coarse outcome used by the robustness report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Valid,
    Timeout,
    CodeError,
}

/// Syntax errors and constraint violations are both code errors.
pub fn classify_failure(d: Option<&Diagnostic>) -> Outcome {
    match d.map(|d| d.kind) {
        None => Outcome::Valid,
        Some(DiagnosticKind::Timeout) => Outcome::Timeout,
        Some(DiagnosticKind::SyntaxError | DiagnosticKind::ConstraintViolation) => Outcome::CodeError,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Untested,
    Valid,
    Timeout,
    CodeError(DiagnosticKind),
}

impl Status {
    pub fn from_diagnostic(d: Option<&Diagnostic>) -> Status {
        match d {
            None => Status::Valid,
            Some(d) if d.kind == DiagnosticKind::Timeout => Status::Timeout,
            Some(d) => Status::CodeError(d.kind),
        }
    }

    /// `None` while untested.
    pub fn outcome(self) -> Option<Outcome> {
        match self {
            Status::Untested => None,
            Status::Valid => Some(Outcome::Valid),
            Status::Timeout => Some(Outcome::Timeout),
            Status::CodeError(_) => Some(Outcome::CodeError),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Untested => f.write_str("untested"),
            Status::Valid => f.write_str("valid"),
            Status::Timeout => f.write_str("timeout"),
            Status::CodeError(DiagnosticKind::SyntaxError) => f.write_str("code_error(syntax)"),
            Status::CodeError(_) => f.write_str("code_error(constraint)"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How a candidate came to be. Initial candidates are E1 without parents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lineage {
    pub operator: Operator,
    pub parents: Vec<u64>,
}

pub const MAX_CORRECTIONS: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Creation order; smaller ids are older.
    pub id: u64,
    pub thought: String,
    pub source: String,
    pub program: Option<ScoreProgram>,
    /// Mean containers on the training set; lower is better.
    pub fitness: Option<f64>,
    pub status: Status,
    pub lineage: Lineage,
    pub correction_attempts: u8,
    /// The last failure, cleared once valid.
    pub diagnostic: Option<Diagnostic>,
    /// Status after the first evaluation and after each correction.
    pub history: Vec<Status>,
}

impl Candidate {
    pub fn untested(id: u64, thought: String, source: String, lineage: Lineage) -> Self {
        Self {
            id,
            thought,
            source,
            program: None,
            fitness: None,
            status: Status::Untested,
            lineage,
            correction_attempts: 0,
            diagnostic: None,
            history: Vec::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    /// Checks the structural invariants; panics on violation.
    pub fn assert_invariants(&self) {
        assert!(self.correction_attempts <= MAX_CORRECTIONS, "candidate {} exceeded the correction cap", self.id);
        if self.is_valid() {
            assert!(self.fitness.is_some() && self.program.is_some(), "valid candidate {} lacks fitness or program", self.id);
        }
    }

    /// Status after `iteration` corrections; the last known status once the
    /// candidate stopped being corrected.
    pub fn status_after(&self, iteration: usize) -> Status {
        self.history.get(iteration).or(self.history.last()).copied().unwrap_or(self.status)
    }
}
