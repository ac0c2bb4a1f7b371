use std::collections::HashMap;

use super::{Compound, Term, VarId};

/// Read access to variable bindings.
pub trait Bindings {
    fn lookup(&self, var: VarId) -> Option<&Term>;
}

/// The empty substitution.
pub struct NoBindings;

impl Bindings for NoBindings {
    fn lookup(&self, _var: VarId) -> Option<&Term> {
        None
    }
}

/// Monotone variable store: bindings are added, never removed or
/// overwritten. Variable ids are allocated from a counter that only grows.
#[derive(Debug, Default, Clone)]
pub struct BindingStore {
    slots: Vec<Option<Term>>,
}

impl Bindings for BindingStore {
    fn lookup(&self, var: VarId) -> Option<&Term> {
        self.slots.get(var.0).and_then(Option::as_ref)
    }
}

impl BindingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_var(&mut self) -> Term {
        let id = self.slots.len();
        self.slots.push(None);
        Term::Var(VarId(id))
    }

    /// Reserves `n` consecutive fresh variables and returns the first id.
    pub fn reserve(&mut self, n: usize) -> usize {
        let base = self.slots.len();
        self.slots.resize(base + n, None);
        base
    }

    /// Instantiates a template whose variables are numbered `0..num_vars`.
    pub fn instantiate(&mut self, template: &Term, num_vars: usize) -> Term {
        let base = self.reserve(num_vars);
        template.offset_vars(base)
    }

    /// Number of variables ever allocated.
    pub fn var_count(&self) -> usize {
        self.slots.len()
    }

    pub fn bound_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_bound(&self, var: VarId) -> bool {
        self.lookup(var).is_some()
    }

    fn bind(&mut self, var: VarId, value: Term) {
        let slot = &mut self.slots[var.0];
        debug_assert!(slot.is_none(), "rebinding {var}");
        *slot = Some(value);
    }
}

/// Follows variable bindings at the top level only.
pub fn deref<B: Bindings + ?Sized>(t: &Term, bindings: &B) -> Term {
    let mut cur = t;
    while let Term::Var(v) = cur {
        match bindings.lookup(*v) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur.clone()
}

/// Fully applies the bindings, so the result mentions only unbound variables.
pub fn resolve<B: Bindings + ?Sized>(t: &Term, bindings: &B) -> Term {
    match deref(t, bindings) {
        Term::Compound(c) if !c.is_ground() => Term::compound_atom(
            c.name_atom().clone(),
            c.args().iter().map(|a| resolve(a, bindings)).collect(),
        ),
        other => other,
    }
}

trait BindTarget: Bindings {
    fn bind_var(&mut self, var: VarId, value: Term);
}

impl BindTarget for BindingStore {
    fn bind_var(&mut self, var: VarId, value: Term) {
        self.bind(var, value);
    }
}

/// Tentative bindings layered over a store; never writes to the store.
struct Overlay<'s> {
    base: &'s BindingStore,
    extra: HashMap<VarId, Term>,
}

impl Bindings for Overlay<'_> {
    fn lookup(&self, var: VarId) -> Option<&Term> {
        self.extra.get(&var).or_else(|| self.base.lookup(var))
    }
}

impl BindTarget for Overlay<'_> {
    fn bind_var(&mut self, var: VarId, value: Term) {
        self.extra.insert(var, value);
    }
}

fn unify_in<S: BindTarget>(a: &Term, b: &Term, store: &mut S) -> bool {
    let mut pending = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = pending.pop() {
        let x = deref(&x, store);
        let y = deref(&y, store);
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            // Bind the younger variable to the older one so chains point
            // towards long-lived variables.
            (Term::Var(v), Term::Var(w)) => {
                if v > w {
                    store.bind_var(*v, y.clone());
                } else {
                    store.bind_var(*w, x.clone());
                }
            }
            (Term::Var(v), _) => store.bind_var(*v, y.clone()),
            (_, Term::Var(w)) => store.bind_var(*w, x.clone()),
            (Term::Atom(p), Term::Atom(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::Int(p), Term::Int(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::Float(p), Term::Float(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::Compound(p), Term::Compound(q)) => {
                if std::sync::Arc::ptr_eq(p, q) && p.is_ground() {
                    continue;
                }
                if p.arity() != q.arity() || p.name() != q.name() {
                    return false;
                }
                pending.extend(p.args().iter().cloned().zip(q.args().iter().cloned()));
            }
            _ => return false,
        }
    }
    true
}

/// Unifies two terms, extending the store. No occurs check.
///
/// On failure the store may keep bindings made before the clash; callers
/// must abandon every term that mentions the variables involved.
pub fn unify(a: &Term, b: &Term, store: &mut BindingStore) -> bool {
    unify_in(a, b, store)
}

/// Checks whether two terms would unify without touching the store.
pub fn unifiable(a: &Term, b: &Term, store: &BindingStore) -> bool {
    let mut overlay = Overlay {
        base: store,
        extra: HashMap::new(),
    };
    unify_in(a, b, &mut overlay)
}

/// Renames apart: returns a variant of `t` (with bindings applied) whose
/// unbound variables are all fresh. Sharing within `t` is preserved.
pub fn copy_term(t: &Term, store: &mut BindingStore) -> Term {
    let mut map = HashMap::new();
    copy_rec(t, store, &mut map)
}

fn copy_rec(t: &Term, store: &mut BindingStore, map: &mut HashMap<VarId, Term>) -> Term {
    match deref(t, store) {
        Term::Var(v) => map.entry(v).or_insert_with(|| store.fresh_var()).clone(),
        Term::Compound(c) if !c.is_ground() => copy_compound(&c, store, map),
        other => other,
    }
}

fn copy_compound(c: &Compound, store: &mut BindingStore, map: &mut HashMap<VarId, Term>) -> Term {
    let args = c.args().iter().map(|a| copy_rec(a, store, map)).collect();
    Term::compound_atom(c.name_atom().clone(), args)
}
