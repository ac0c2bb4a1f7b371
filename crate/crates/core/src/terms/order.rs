use std::cmp::Ordering;

use super::{deref, Bindings, Term};

fn class_rank(t: &Term) -> u8 {
    match t {
        Term::Var(_) => 0,
        Term::Int(_) | Term::Float(_) => 1,
        Term::Atom(_) => 3,
        Term::Compound(_) => 4,
    }
}

fn compare_numbers(a: &Term, b: &Term) -> Ordering {
    match (a, b) {
        (Term::Int(x), Term::Int(y)) => x.cmp(y),
        (Term::Float(x), Term::Float(y)) => x.total_cmp(y),
        // Mixed: by value; on a tie the float comes first.
        (Term::Int(x), Term::Float(y)) => (*x as f64).total_cmp(y).then(Ordering::Greater),
        (Term::Float(x), Term::Int(y)) => x.total_cmp(&(*y as f64)).then(Ordering::Less),
        _ => unreachable!("compare_numbers on non-numbers"),
    }
}

/// Standard order of terms: Var < Number < Atom < Compound. Variables by
/// age, numbers by value, atoms alphabetically, compounds by arity, then
/// name, then arguments left to right.
pub fn compare_standard<B: Bindings + ?Sized>(a: &Term, b: &Term, bindings: &B) -> Ordering {
    let a = deref(a, bindings);
    let b = deref(b, bindings);
    let (ra, rb) = (class_rank(&a), class_rank(&b));
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) => x.cmp(y),
        (Term::Atom(x), Term::Atom(y)) => x.cmp(y),
        (Term::Compound(x), Term::Compound(y)) => x
            .arity()
            .cmp(&y.arity())
            .then_with(|| x.name().cmp(y.name()))
            .then_with(|| {
                x.args()
                    .iter()
                    .zip(y.args())
                    .map(|(p, q)| compare_standard(p, q, bindings))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        _ => compare_numbers(&a, &b),
    }
}
