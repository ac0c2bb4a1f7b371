use std::cmp::Ordering;

use thiserror::Error;

use super::{deref, Bindings, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArithError {
    #[error("arguments are not sufficiently instantiated")]
    Instantiation,
    #[error("unknown arithmetic function {0}")]
    UnknownFunction(String),
    #[error("type error: evaluable expected, found {0}")]
    NotEvaluable(String),
    #[error("integer overflow")]
    Overflow,
    #[error("division by zero")]
    ZeroDivision,
}

/// Evaluates a ground arithmetic expression built from numbers and
/// `+/2`, `-/2`, `*/2`, `//2` and `-/1`.
///
/// Integer operations stay integral, `/` of two integers yields an integer
/// only when the division is exact, and any float operand makes the result
/// a float. Integer overflow is an error rather than wrapping.
pub fn eval_arith<B: Bindings + ?Sized>(t: &Term, bindings: &B) -> Result<Term, ArithError> {
    let t = deref(t, bindings);
    match &t {
        Term::Int(_) | Term::Float(_) => Ok(t),
        Term::Var(_) => Err(ArithError::Instantiation),
        Term::Atom(a) => Err(ArithError::UnknownFunction(format!("{a}/0"))),
        Term::Compound(c) => match (c.name(), c.args()) {
            ("-", [x]) => negate(eval_arith(x, bindings)?),
            ("+", [x]) => eval_arith(x, bindings),
            (op @ ("+" | "-" | "*" | "/"), [x, y]) => {
                let x = eval_arith(x, bindings)?;
                let y = eval_arith(y, bindings)?;
                binary(op, x, y)
            }
            (name, args) => Err(ArithError::UnknownFunction(format!(
                "{name}/{}",
                args.len()
            ))),
        },
    }
}

/// Numeric comparison of two evaluated numbers. `None` if either is NaN.
pub fn compare_numeric(x: &Term, y: &Term) -> Option<Ordering> {
    match (x, y) {
        (Term::Int(a), Term::Int(b)) => Some(a.cmp(b)),
        _ => as_f64(x).partial_cmp(&as_f64(y)),
    }
}

fn negate(x: Term) -> Result<Term, ArithError> {
    match x {
        Term::Int(i) => i.checked_neg().map(Term::Int).ok_or(ArithError::Overflow),
        Term::Float(f) => Ok(Term::Float(-f)),
        other => Err(ArithError::NotEvaluable(other.to_string())),
    }
}

fn as_f64(t: &Term) -> f64 {
    match t {
        Term::Int(i) => *i as f64,
        Term::Float(f) => *f,
        _ => unreachable!("evaluated arithmetic is always numeric"),
    }
}

fn binary(op: &str, x: Term, y: Term) -> Result<Term, ArithError> {
    if let (Term::Int(a), Term::Int(b)) = (&x, &y) {
        let (a, b) = (*a, *b);
        let r = match op {
            "+" => a.checked_add(b),
            "-" => a.checked_sub(b),
            "*" => a.checked_mul(b),
            _ => {
                if b == 0 {
                    return Err(ArithError::ZeroDivision);
                }
                if a % b == 0 {
                    a.checked_div(b)
                } else {
                    return Ok(Term::Float(a as f64 / b as f64));
                }
            }
        };
        return r.map(Term::Int).ok_or(ArithError::Overflow);
    }
    let (a, b) = (as_f64(&x), as_f64(&y));
    let r = match op {
        "+" => a + b,
        "-" => a - b,
        "*" => a * b,
        _ => {
            if b == 0.0 {
                return Err(ArithError::ZeroDivision);
            }
            a / b
        }
    };
    Ok(Term::Float(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{BindingStore, NoBindings};

    fn op(name: &str, a: Term, b: Term) -> Term {
        Term::compound(name, vec![a, b])
    }

    #[test]
    fn mixed_subtraction() {
        let e = op("-", Term::Int(1), Term::Float(0.5));
        assert_eq!(eval_arith(&e, &NoBindings), Ok(Term::Float(0.5)));
    }

    #[test]
    fn nearest_neighbour_distance() {
        // (1-0.5)*(1-0.5)+(0.1-0.5)*(0.1-0.5)
        let dx = op("-", Term::Int(1), Term::Float(0.5));
        let dy = op("-", Term::Float(0.1), Term::Float(0.5));
        let e = op("+", op("*", dx.clone(), dx), op("*", dy.clone(), dy));
        let Ok(Term::Float(v)) = eval_arith(&e, &NoBindings) else {
            panic!("expected float");
        };
        // 0.25 + 0.16 by hand; host arithmetic gives the same rounding.
        assert!((v - 0.41).abs() < 1e-12);
        assert_eq!(v, 0.5 * 0.5 + (0.1f64 - 0.5) * (0.1 - 0.5));
    }

    #[test]
    fn unbound_is_error() {
        let mut s = BindingStore::new();
        let x = s.fresh_var();
        assert_eq!(eval_arith(&x, &s), Err(ArithError::Instantiation));
    }

    #[test]
    fn unknown_functor_is_error() {
        let e = Term::compound("foo", vec![Term::Int(1)]);
        assert!(matches!(
            eval_arith(&e, &NoBindings),
            Err(ArithError::UnknownFunction(_))
        ));
    }

    #[test]
    fn integer_division_promotes_when_inexact() {
        assert_eq!(
            eval_arith(&op("/", Term::Int(6), Term::Int(3)), &NoBindings),
            Ok(Term::Int(2))
        );
        assert_eq!(
            eval_arith(&op("/", Term::Int(1), Term::Int(4)), &NoBindings),
            Ok(Term::Float(0.25))
        );
    }

    #[test]
    fn overflow_is_error() {
        let e = op("+", Term::Int(i64::MAX), Term::Int(1));
        assert_eq!(eval_arith(&e, &NoBindings), Err(ArithError::Overflow));
    }

    #[test]
    fn zero_division() {
        let e = op("/", Term::Int(1), Term::Int(0));
        assert_eq!(eval_arith(&e, &NoBindings), Err(ArithError::ZeroDivision));
    }
}
