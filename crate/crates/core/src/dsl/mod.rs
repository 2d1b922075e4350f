//! Front end for the three input file kinds: domains (`.dom`), policies
//! (`.pol`) and problems (`.prb`).
//!
//! Parsing validates as it goes, so declarations must precede their use
//! (sorts before the schemas that mention them, schemas before laws).

mod ast;
mod lexer;
mod parser;
mod typing;

pub use ast::*;
pub use parser::{parse_action_term, parse_domain, parse_policy, parse_problem};
pub use typing::{infer_variable_sorts, TypeIssue, VarSorts};

use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared sort '{0}'")]
    UndeclaredSort(String),
    #[error("undeclared constant '{0}'")]
    UndeclaredConstant(String),
    #[error("undeclared fluent '{0}'")]
    UndeclaredFluent(String),
    #[error("undeclared action '{0}'")]
    UndeclaredAction(String),
    #[error("duplicate declaration of '{0}'")]
    Duplicate(String),
    #[error("untyped variable '{0}'")]
    UntypedVariable(String),
    #[error("{0}")]
    Type(TypeIssue),
    #[error("penalty out of range 1-3: {0}")]
    PenaltyOutOfRange(u64),
    #[error("unknown rule id '{0}'")]
    UnknownRuleId(String),
    #[error("preference must name defeasible rules, '{0}' is strict")]
    StrictPreference(String),
    #[error("inconsistent init: {0} and its complement")]
    InconsistentInit(String),
    #[error("negative horizon")]
    NegativeHorizon,
}

/// A diagnostic with the position it refers to.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: DslErrorKind,
}

impl DslError {
    pub fn new(pos: Pos, kind: DslErrorKind) -> Self {
        DslError { pos, kind }
    }

    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        DslError::new(pos, DslErrorKind::Syntax(msg.into()))
    }
}
