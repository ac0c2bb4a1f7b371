//! Answer enumeration: evaluate, report the answer, then evaluate the
//! captured branch, until failure.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::engine::{Alt, Engine, EngineError, EvalResult};
use crate::reader::{parse_query, Query, ReadError};
use crate::terms::{format_term, resolve, unify, NoBindings, Term, VarId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Syntax(#[from] ReadError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("toplevel: uncaught shift/1.")]
    UncaughtShift { ball: String },
}

/// One answer: the query's named variables with their values. Unbound
/// variables are renumbered `_G0, _G1, ...` in order of first occurrence, so
/// every value is a template over `0..num_vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub bindings: Vec<(String, Term)>,
    pub num_vars: usize,
}

impl Answer {
    /// Builds an answer from resolved values, renumbering their variables.
    pub fn from_values(names: Vec<String>, values: Vec<Term>) -> Answer {
        let (values, num_vars) = canonical_vars(values);
        Answer {
            bindings: names.into_iter().zip(values).collect(),
            num_vars,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<_> = self
            .bindings
            .iter()
            .map(|(n, t)| format!("{n} = {}", format_term(t, &NoBindings)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Renames the variables of already-resolved terms to `0..n`.
fn canonical_vars(terms: Vec<Term>) -> (Vec<Term>, usize) {
    fn go(t: &Term, map: &mut HashMap<VarId, usize>) -> Term {
        match t {
            Term::Var(v) => {
                let n = map.len();
                Term::var(*map.entry(*v).or_insert(n))
            }
            Term::Compound(c) if !c.is_ground() => Term::compound_atom(
                c.name_atom().clone(),
                c.args().iter().map(|a| go(a, map)).collect(),
            ),
            other => other.clone(),
        }
    }
    let mut map = HashMap::new();
    let out = terms.iter().map(|t| go(t, &mut map)).collect();
    (out, map.len())
}

/// Lazy answer sequence for one query.
pub struct Solutions<'e> {
    engine: &'e mut Engine,
    query: Query,
    next: Option<Alt>,
}

/// The evaluation pattern of a query: its only named variable, or
/// `vars(X, Y, ...)` over all of them.
fn pattern_template(query: &Query) -> Term {
    match query.var_names.as_slice() {
        [(_, k)] => Term::var(*k),
        vars => Term::compound("vars", vars.iter().map(|(_, k)| Term::var(*k)).collect()),
    }
}

/// Enumerates the answers of `query` in order.
pub fn solve<'e>(engine: &'e mut Engine, query: &Query) -> Solutions<'e> {
    engine.reset_steps();
    let base = engine.store_mut().reserve(query.num_vars);
    Solutions {
        engine,
        query: query.clone(),
        next: Some(Alt {
            pattern: pattern_template(query).offset_vars(base),
            goal: query.goal.offset_vars(base),
        }),
    }
}

/// The first answer of `query`, if any.
pub fn solve_first(engine: &mut Engine, query: &Query) -> Result<Option<Answer>, SolveError> {
    solve(engine, query).next().transpose()
}

/// Parses `text` and collects all of its answers.
pub fn solve_all(engine: &mut Engine, text: &str) -> Result<Vec<Answer>, SolveError> {
    let query = parse_query(text)?;
    solve(engine, &query).collect()
}

impl Solutions<'_> {
    /// The engine, for draining output and trace between answers.
    pub fn engine(&mut self) -> &mut Engine {
        self.engine
    }

    fn answer(&mut self, pat_out: &Term) -> Answer {
        let store = self.engine.store_mut();
        let base = store.var_count();
        let fresh = store.instantiate(&pattern_template(&self.query), self.query.num_vars);
        let ok = unify(&fresh, pat_out, store);
        debug_assert!(ok, "answer pattern is an instance of the query");
        let values = self
            .query
            .var_names
            .iter()
            .map(|(_, k)| resolve(&Term::var(base + k), store))
            .collect();
        let names = self
            .query
            .var_names
            .iter()
            .map(|(n, _)| n.clone())
            .collect();
        Answer::from_values(names, values)
    }
}

impl Iterator for Solutions<'_> {
    type Item = Result<Answer, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        let alt = self.next.take()?;
        match self.engine.backtrack(alt) {
            Err(e) => Some(Err(e.into())),
            Ok((_, EvalResult::Failure)) => None,
            Ok((pat_out, EvalResult::Success { pattern, branch })) => {
                self.next = Some(Alt {
                    pattern,
                    goal: branch,
                });
                Some(Ok(self.answer(&pat_out)))
            }
            Ok((_, EvalResult::Shift { ball, .. })) => Some(Err(SolveError::UncaughtShift {
                ball: format_term(&ball, self.engine.store()),
            })),
        }
    }
}
