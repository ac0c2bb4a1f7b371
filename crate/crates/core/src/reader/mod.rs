//! Tokenizer and operator-precedence parser for the object language.
//!
//! The grammar is standard Prolog term syntax over a fixed operator table
//! (see [`OpTable`]). Clauses end with `.` followed by layout; `%` and
//! `/* */` comments are skipped.

mod lexer;
mod ops;
mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use lexer::{tokenize, Token, TokenKind};
pub use ops::{Assoc, Fixity, OpDef, OpTable};
pub use parser::ReadTerm;

use crate::terms::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: syntax error: {message}")]
pub struct ReadError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Where a clause came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Origin {
    pub file: Option<Arc<str>>,
    pub line: usize,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{file}:{}", self.line),
            None => write!(f, "line {}", self.line),
        }
    }
}

/// A program clause `head :- body`. Variables are numbered `0..num_vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceClause {
    pub head: Term,
    pub body: Term,
    pub num_vars: usize,
    pub origin: Origin,
}

/// A parsed query: the goal template plus the names of its variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub goal: Term,
    pub num_vars: usize,
    pub var_names: Vec<(String, usize)>,
}

fn clause_from(rt: ReadTerm, file: Option<&Arc<str>>) -> Result<SourceClause, ReadError> {
    let origin = Origin {
        file: file.cloned(),
        line: rt.line,
    };
    let err = |message: &str| ReadError {
        line: rt.line,
        col: 0,
        message: message.to_string(),
    };
    let (head, body) = match &rt.term {
        Term::Compound(c) if c.name() == ":-" && c.arity() == 2 => {
            (c.args()[0].clone(), c.args()[1].clone())
        }
        Term::Compound(c) if c.name() == ":-" && c.arity() == 1 => {
            return Err(err("directives are not supported"));
        }
        t => (t.clone(), Term::atom("true")),
    };
    if !head.is_callable() {
        return Err(err("clause head must be an atom or compound term"));
    }
    if matches!(body, Term::Int(_) | Term::Float(_)) {
        return Err(err("clause body must be callable"));
    }
    Ok(SourceClause {
        head,
        body,
        num_vars: rt.num_vars,
        origin,
    })
}

/// Parses program text into clauses, in source order.
pub fn parse_program(text: &str) -> Result<Vec<SourceClause>, ReadError> {
    parse_program_named(text, None)
}

/// Like [`parse_program`], recording `file` as the origin of each clause.
pub fn parse_program_named(text: &str, file: Option<&str>) -> Result<Vec<SourceClause>, ReadError> {
    let file: Option<Arc<str>> = file.map(Arc::from);
    parser::parse_all(text)?
        .into_iter()
        .map(|rt| clause_from(rt, file.as_ref()))
        .collect()
}

/// Parses a query. The terminating `.` is optional.
pub fn parse_query(text: &str) -> Result<Query, ReadError> {
    let rt = parser::parse_single(text)?;
    if !matches!(rt.term, Term::Var(_)) && !rt.term.is_callable() {
        return Err(ReadError {
            line: rt.line,
            col: 0,
            message: "query must be callable".into(),
        });
    }
    Ok(Query {
        goal: rt.term,
        num_vars: rt.num_vars,
        var_names: rt.var_names,
    })
}

/// Parses a single term, e.g. an answer binding printed by the toplevel.
pub fn parse_term(text: &str) -> Result<ReadTerm, ReadError> {
    parser::parse_single(text)
}
