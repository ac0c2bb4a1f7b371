//! Clause storage keyed by predicate indicator.

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::is_builtin;
use crate::reader::{Origin, SourceClause};
use crate::terms::{unifiable, BindingStore, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{origin}: cannot redefine builtin {name}/{arity}")]
    Builtin {
        name: String,
        arity: usize,
        origin: Origin,
    },
}

/// Ordered clause store. Undefined predicates simply have no clauses.
#[derive(Debug, Clone, Default)]
pub struct Database {
    preds: HashMap<(String, usize), Vec<SourceClause>>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends clauses in order. Nothing is added if any head names a builtin.
    pub fn consult(
        &mut self,
        clauses: impl IntoIterator<Item = SourceClause>,
    ) -> Result<(), LoadError> {
        let clauses: Vec<_> = clauses.into_iter().collect();
        for c in &clauses {
            let (name, arity) = c.head.functor().expect("reader checks heads");
            if is_builtin(name, arity) {
                return Err(LoadError::Builtin {
                    name: name.to_string(),
                    arity,
                    origin: c.origin.clone(),
                });
            }
        }
        for c in clauses {
            let (name, arity) = c.head.functor().expect("reader checks heads");
            self.preds
                .entry((name.to_string(), arity))
                .or_default()
                .push(c);
        }
        Ok(())
    }

    pub fn clauses(&self, name: &str, arity: usize) -> &[SourceClause] {
        self.preds
            .get(&(name.to_string(), arity))
            .map_or(&[], Vec::as_slice)
    }

    pub fn is_defined(&self, name: &str, arity: usize) -> bool {
        self.preds.contains_key(&(name.to_string(), arity))
    }

    /// Predicate indicators in sorted order.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        let mut keys: Vec<_> = self.preds.keys().cloned().collect();
        keys.sort();
        keys
    }

    /// Renamed-apart `(head, body)` pairs for the clauses of `call`'s
    /// predicate, in clause order. With `filter`, clauses whose head cannot
    /// unify with `call` are skipped (and allocate no variables).
    pub fn matching_clauses(
        &self,
        call: &Term,
        store: &mut BindingStore,
        filter: bool,
    ) -> Vec<(Term, Term)> {
        let Some((name, arity)) = call.functor() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for c in self.clauses(name, arity) {
            let base = store.var_count();
            let head = c.head.offset_vars(base);
            if filter && !unifiable(call, &head, store) {
                continue;
            }
            store.reserve(c.num_vars);
            out.push((head, c.body.offset_vars(base)));
        }
        out
    }
}

/// Builds `(Call=H1,B1 ; (Call=H2,B2 ; ...))`, or `fail` for no clauses.
pub fn disjoin_clauses(call: &Term, pairs: Vec<(Term, Term)>) -> Term {
    let mut iter = pairs.into_iter().rev();
    let Some((h, b)) = iter.next() else {
        return Term::atom("fail");
    };
    let branch =
        |h: Term, b: Term| Term::compound(",", vec![Term::compound("=", vec![call.clone(), h]), b]);
    let mut acc = branch(h, b);
    for (h, b) in iter {
        acc = Term::compound(";", vec![branch(h, b), acc]);
    }
    acc
}
