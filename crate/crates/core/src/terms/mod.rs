//! Term representation and the operations every other module builds on:
//! dereferencing, unification, renaming apart, standard order, arithmetic
//! and printing.
//!
//! Terms are immutable and cheap to clone. Variables are plain ids; their
//! values live in a [`BindingStore`] (or any other [`Bindings`]
//! implementation), never inside the term itself.

mod arith;
mod format;
mod order;
mod store;

use std::fmt;
use std::sync::Arc;

pub use arith::{compare_numeric, eval_arith, ArithError};
pub use format::{format_float, format_term, TermFormatter};
pub use order::compare_standard;
pub use store::{copy_term, deref, resolve, unifiable, unify, BindingStore, Bindings, NoBindings};

/// Atom names are shared strings; equality is by content.
pub type Atom = Arc<str>;

/// Identifier of a logic variable. Unique per binding store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_G{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(VarId),
    Atom(Atom),
    Int(i64),
    Float(f64),
    Compound(Arc<Compound>),
}

/// A compound term `name(args...)` with at least one argument.
///
/// `ground` records whether the structure contains no variable at all. Such
/// subterms never change under any binding, so copying and renaming can
/// share them instead of rebuilding.
#[derive(Debug, PartialEq)]
pub struct Compound {
    name: Atom,
    args: Box<[Term]>,
    ground: bool,
}

impl Compound {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_atom(&self) -> &Atom {
        &self.name
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.ground
    }
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Arc::from(name))
    }

    /// Builds `name(args...)`; an empty argument list yields the atom `name`.
    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::compound_atom(Arc::from(name), args)
    }

    pub fn compound_atom(name: Atom, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return Term::Atom(name);
        }
        let ground = args.iter().all(Term::is_structurally_ground);
        Term::Compound(Arc::new(Compound {
            name,
            args: args.into_boxed_slice(),
            ground,
        }))
    }

    pub fn var(id: usize) -> Term {
        Term::Var(VarId(id))
    }

    pub fn nil() -> Term {
        Term::atom("[]")
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(".", vec![head, tail])
    }

    /// Builds a proper list `[items...]`.
    pub fn list(items: impl IntoIterator<Item = Term, IntoIter: DoubleEndedIterator>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail(
        items: impl IntoIterator<Item = Term, IntoIter: DoubleEndedIterator>,
        tail: Term,
    ) -> Term {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn pair(name: &str, a: Term, b: Term) -> Term {
        Term::compound(name, vec![a, b])
    }

    /// `true` when the term contains no variable, independent of bindings.
    pub fn is_structurally_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(c) => c.ground,
            _ => true,
        }
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Term::Atom(a) if &**a == name)
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_compound(&self) -> Option<&Compound> {
        match self {
            Term::Compound(c) => Some(c),
            _ => None,
        }
    }

    /// Name and arity of a callable term (atoms have arity 0).
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(c) => Some((&c.name, c.args.len())),
            _ => None,
        }
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(_))
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Term::Int(_) | Term::Float(_))
    }

    /// Replaces every `Var(i)` by `Var(base + i)`. Used to instantiate clause
    /// and query templates whose variables are numbered from zero.
    pub fn offset_vars(&self, base: usize) -> Term {
        match self {
            Term::Var(v) => Term::Var(VarId(v.0 + base)),
            Term::Compound(c) if !c.ground => Term::Compound(Arc::new(Compound {
                name: c.name.clone(),
                args: c.args.iter().map(|a| a.offset_vars(base)).collect(),
                ground: false,
            })),
            other => other.clone(),
        }
    }

    /// Collects the distinct variables of the term in first-occurrence order,
    /// looking through bindings.
    pub fn vars_in<B: Bindings + ?Sized>(&self, bindings: &B) -> Vec<VarId> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            match deref(&t, bindings) {
                Term::Var(v) => {
                    if seen.insert(v) {
                        out.push(v);
                    }
                }
                Term::Compound(c) if !c.ground => {
                    stack.extend(c.args.iter().rev().cloned());
                }
                _ => {}
            }
        }
        out
    }
}

impl From<i64> for Term {
    fn from(v: i64) -> Self {
        Term::Int(v)
    }
}

impl From<f64> for Term {
    fn from(v: f64) -> Self {
        Term::Float(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_term(self, &NoBindings))
    }
}

/// Iterates over a list term's elements, stopping at the first cell that is
/// not `'.'/2`. The final tail is available from [`ListIter::tail`].
pub struct ListIter<'b, B: Bindings + ?Sized> {
    cur: Term,
    bindings: &'b B,
}

impl<'b, B: Bindings + ?Sized> ListIter<'b, B> {
    pub fn new(list: &Term, bindings: &'b B) -> Self {
        ListIter {
            cur: deref(list, bindings),
            bindings,
        }
    }

    pub fn tail(&self) -> &Term {
        &self.cur
    }
}

impl<B: Bindings + ?Sized> Iterator for ListIter<'_, B> {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        let (head, tail) = match &self.cur {
            Term::Compound(c) if c.name() == "." && c.arity() == 2 => {
                (c.args[0].clone(), c.args[1].clone())
            }
            _ => return None,
        };
        self.cur = deref(&tail, self.bindings);
        Some(head)
    }
}
