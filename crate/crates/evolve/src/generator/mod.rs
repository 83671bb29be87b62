//! Generator backends that turn requests into (thought, program) replies.

mod mock;
mod prompt;
mod remote;

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::candidate::{Diagnostic, Operator};

pub use mock::{FaultModel, MockGenerator, UTILIZATION_SOURCE};
pub use prompt::{extract_reply, render_prompt, RenderedPrompt};
pub use remote::{RemoteConfig, RemoteGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequestKind {
    Operator(Operator),
    Correction,
}

impl fmt::Display for RequestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequestKind::Operator(op) => op.fmt(f),
            RequestKind::Correction => f.write_str("correction"),
        }
    }
}

impl Serialize for RequestKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parent {
    pub thought: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorRequest {
    pub kind: RequestKind,
    pub parents: Vec<Parent>,
    pub diagnostic: Option<Diagnostic>,
    pub template_id: &'static str,
}

impl GeneratorRequest {
    /// E1 takes any number of parents (none when seeding the population),
    /// E2 at least one, M1-M3 exactly one.
    pub fn operator(op: Operator, parents: Vec<Parent>) -> Result<Self, GeneratorError> {
        let ok = match op {
            Operator::E1 => true,
            Operator::E2 => !parents.is_empty(),
            Operator::M1 | Operator::M2 | Operator::M3 => parents.len() == 1,
        };
        if !ok {
            return Err(GeneratorError::InvalidRequest(format!("{op} cannot take {} parent(s)", parents.len())));
        }
        let template_id = match op {
            Operator::E1 if parents.is_empty() => "init",
            Operator::E1 => "e1",
            Operator::E2 => "e2",
            Operator::M1 => "m1",
            Operator::M2 => "m2",
            Operator::M3 => "m3",
        };
        Ok(Self { kind: RequestKind::Operator(op), parents, diagnostic: None, template_id })
    }

    /// Repair request for one failing candidate.
    pub fn correction(failing: Parent, diagnostic: Diagnostic) -> Self {
        Self { kind: RequestKind::Correction, parents: vec![failing], diagnostic: Some(diagnostic), template_id: "correction" }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reply {
    pub thought: String,
    pub source: String,
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("generator unreachable after {attempts} attempt(s): {last}")]
    Unreachable { attempts: u32, last: String },
    #[error("generator rejected the request (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },
    #[error("invalid generator request: {0}")]
    InvalidRequest(String),
    #[error("generator configuration: {0}")]
    Config(String),
    #[error("journal: {0}")]
    Journal(#[from] std::io::Error),
}

/// A source of candidate programs. Requests to one backend are serialized.
pub trait Generator {
    fn generate(&mut self, req: &GeneratorRequest) -> Result<Reply, GeneratorError>;

    fn name(&self) -> String;
}

impl<G: Generator + ?Sized> Generator for &mut G {
    fn generate(&mut self, req: &GeneratorRequest) -> Result<Reply, GeneratorError> {
        (**self).generate(req)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<G: Generator + ?Sized> Generator for Box<G> {
    fn generate(&mut self, req: &GeneratorRequest) -> Result<Reply, GeneratorError> {
        (**self).generate(req)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::DiagnosticKind;

    fn parent() -> Parent {
        Parent { thought: "t".into(), source: "vol_util".into() }
    }

    #[test]
    fn parent_counts_are_enforced() {
        assert!(GeneratorRequest::operator(Operator::E1, vec![]).is_ok());
        assert!(GeneratorRequest::operator(Operator::E2, vec![]).is_err());
        assert!(GeneratorRequest::operator(Operator::E2, vec![parent(), parent()]).is_ok());
        assert!(GeneratorRequest::operator(Operator::M2, vec![parent(), parent()]).is_err());
        assert_eq!(GeneratorRequest::operator(Operator::M3, vec![parent()]).unwrap().template_id, "m3");
        let c = GeneratorRequest::correction(parent(), Diagnostic::new(DiagnosticKind::Timeout, "slow"));
        assert_eq!(c.kind.to_string(), "correction");
    }
}
