use std::cmp::Ordering;

use super::EngineError;
use crate::terms::{
    compare_numeric, compare_standard, copy_term, deref, eval_arith, unifiable, unify,
    BindingStore, Term, TermFormatter,
};

/// Goals the evaluator handles itself rather than through `eval`'s generic
/// builtin dispatch.
const CONTROL: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    ("!", 0),
    (",", 2),
    (";", 2),
    ("->", 2),
    ("conj", 1),
    ("shift", 1),
    ("reset", 3),
    ("call", 1),
];

const SIMPLE: &[(&str, usize)] = &[
    ("=", 2),
    ("\\=", 2),
    ("==", 2),
    ("\\==", 2),
    ("is", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("@<", 2),
    ("@>", 2),
    ("@=<", 2),
    ("@>=", 2),
    ("copy_term", 2),
    ("write", 1),
    ("nl", 0),
    ("var", 1),
    ("nonvar", 1),
    ("atom", 1),
    ("number", 1),
    ("atomic", 1),
    ("compound", 1),
];

/// Whether `name/arity` is built in (and so cannot be defined by clauses).
pub fn is_builtin(name: &str, arity: usize) -> bool {
    CONTROL
        .iter()
        .chain(SIMPLE)
        .any(|&(n, a)| n == name && a == arity)
}

pub(super) fn is_simple(name: &str, arity: usize) -> bool {
    SIMPLE.iter().any(|&(n, a)| n == name && a == arity)
}

fn arith_compare(
    a: &Term,
    b: &Term,
    store: &BindingStore,
) -> Result<Option<Ordering>, EngineError> {
    let x = eval_arith(a, store)?;
    let y = eval_arith(b, store)?;
    Ok(compare_numeric(&x, &y))
}

/// Runs a builtin that neither touches the goal stack nor the disjunction.
/// Returns whether it succeeded.
pub(super) fn run_simple(
    name: &str,
    args: &[Term],
    store: &mut BindingStore,
    out: &mut String,
) -> Result<bool, EngineError> {
    use Ordering::*;
    let ok = match (name, args) {
        ("=", [a, b]) => unify(a, b, store),
        ("\\=", [a, b]) => !unifiable(a, b, store),
        ("==", [a, b]) => compare_standard(a, b, store) == Equal,
        ("\\==", [a, b]) => compare_standard(a, b, store) != Equal,
        ("is", [r, e]) => {
            let v = eval_arith(e, store)?;
            unify(r, &v, store)
        }
        ("<", [a, b]) => arith_compare(a, b, store)? == Some(Less),
        (">", [a, b]) => arith_compare(a, b, store)? == Some(Greater),
        ("=<", [a, b]) => matches!(arith_compare(a, b, store)?, Some(Less | Equal)),
        (">=", [a, b]) => matches!(arith_compare(a, b, store)?, Some(Greater | Equal)),
        ("@<", [a, b]) => compare_standard(a, b, store) == Less,
        ("@>", [a, b]) => compare_standard(a, b, store) == Greater,
        ("@=<", [a, b]) => compare_standard(a, b, store) != Greater,
        ("@>=", [a, b]) => compare_standard(a, b, store) != Less,
        ("copy_term", [a, b]) => {
            let c = copy_term(a, store);
            unify(b, &c, store)
        }
        ("write", [t]) => {
            out.push_str(&TermFormatter::new(store, false).format(t, 1200));
            true
        }
        ("nl", []) => {
            out.push('\n');
            true
        }
        ("var", [t]) => matches!(deref(t, store), Term::Var(_)),
        ("nonvar", [t]) => !matches!(deref(t, store), Term::Var(_)),
        ("atom", [t]) => matches!(deref(t, store), Term::Atom(_)),
        ("number", [t]) => deref(t, store).is_number(),
        ("atomic", [t]) => matches!(
            deref(t, store),
            Term::Atom(_) | Term::Int(_) | Term::Float(_)
        ),
        ("compound", [t]) => matches!(deref(t, store), Term::Compound(_)),
        _ => unreachable!("run_simple called with {name}/{}", args.len()),
    };
    Ok(ok)
}
