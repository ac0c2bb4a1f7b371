use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use super::{OracleConfig, OracleError, OracleOutcome, Stop};
use crate::database::Database;
use crate::reader::Query;
use crate::terms::{
    compare_numeric, compare_standard, deref, eval_arith, resolve, Bindings, Term, TermFormatter,
    VarId,
};
use crate::toplevel::Answer;

/// Destructive bindings with a trail, so backtracking undoes them.
#[derive(Default)]
struct TrailStore {
    slots: Vec<Option<Term>>,
    trail: Vec<usize>,
}

impl Bindings for TrailStore {
    fn lookup(&self, var: VarId) -> Option<&Term> {
        self.slots.get(var.0).and_then(Option::as_ref)
    }
}

impl TrailStore {
    fn alloc(&mut self, n: usize) -> usize {
        let base = self.slots.len();
        self.slots.resize(base + n, None);
        base
    }

    fn bind(&mut self, v: VarId, t: Term) {
        self.slots[v.0] = Some(t);
        self.trail.push(v.0);
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.slots[v] = None;
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = deref(a, self);
        let b = deref(b, self);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => {
                self.bind(*x, b);
                true
            }
            (_, Term::Var(y)) => {
                self.bind(*y, a);
                true
            }
            (Term::Compound(p), Term::Compound(q)) => {
                p.name() == q.name()
                    && p.arity() == q.arity()
                    && p.args().iter().zip(q.args()).all(|(x, y)| self.unify(x, y))
            }
            _ => a == b,
        }
    }

    fn copy(&mut self, t: &Term, map: &mut HashMap<VarId, Term>) -> Term {
        match deref(t, self) {
            Term::Var(v) => {
                if let Some(c) = map.get(&v) {
                    return c.clone();
                }
                let fresh = Term::var(self.alloc(1));
                map.insert(v, fresh.clone());
                fresh
            }
            Term::Compound(c) => {
                let args = c.args().iter().map(|a| self.copy(a, map)).collect();
                Term::compound_atom(c.name_atom().clone(), args)
            }
            other => other,
        }
    }
}

enum Goal {
    /// A goal together with the choicepoint height that `!` cuts back to.
    Call(Term, usize),
    CutTo(usize),
}

struct Node {
    goal: Goal,
    next: Goals,
}

type Goals = Option<Rc<Node>>;

fn push(goal: Goal, next: Goals) -> Goals {
    Some(Rc::new(Node { goal, next }))
}

enum Retry {
    Goals(Goals),
    Clauses {
        call: Term,
        next: usize,
        cont: Goals,
    },
}

struct Choice {
    mark: usize,
    retry: Retry,
}

struct Machine<'a> {
    db: &'a Database,
    cfg: &'a OracleConfig,
    store: TrailStore,
    choices: Vec<Choice>,
    steps: u64,
    output: String,
}

impl Machine<'_> {
    /// Resolves the call against the clauses from index `start` on.
    fn try_clauses(&mut self, call: Term, start: usize, cont: Goals) -> Option<Goals> {
        let (name, arity) = call.functor().expect("callable");
        let clauses = self.db.clauses(name, arity);
        let barrier = self.choices.len();
        for (i, clause) in clauses.iter().enumerate().skip(start) {
            let mark = self.store.mark();
            let base = self.store.alloc(clause.num_vars);
            if self.store.unify(&call, &clause.head.offset_vars(base)) {
                if i + 1 < clauses.len() {
                    // The choicepoint sits below the head bindings.
                    self.choices.push(Choice {
                        mark,
                        retry: Retry::Clauses {
                            call: call.clone(),
                            next: i + 1,
                            cont: cont.clone(),
                        },
                    });
                }
                return Some(push(
                    Goal::Call(clause.body.offset_vars(base), barrier),
                    cont,
                ));
            }
            self.store.undo(mark);
        }
        None
    }

    fn backtrack(&mut self) -> Option<Goals> {
        while let Some(choice) = self.choices.pop() {
            self.store.undo(choice.mark);
            match choice.retry {
                Retry::Goals(g) => return Some(g),
                Retry::Clauses { call, next, cont } => {
                    if let Some(g) = self.try_clauses(call, next, cont) {
                        return Some(g);
                    }
                }
            }
        }
        None
    }

    /// Runs until the goal list is empty (an answer) or no choice is left.
    fn run(&mut self, mut goals: Goals) -> Result<bool, Stop> {
        loop {
            let Some(node) = goals else { return Ok(true) };
            self.steps += 1;
            if self.steps > self.cfg.max_steps {
                return Err(Stop::StepLimit);
            }
            let rest = node.next.clone();
            let next = match &node.goal {
                Goal::CutTo(h) => {
                    self.choices.truncate(*h);
                    Some(rest)
                }
                Goal::Call(t, cb) => self.call(t, *cb, rest).map_err(Stop::Error)?,
            };
            goals = match next {
                Some(g) => g,
                None => match self.backtrack() {
                    Some(g) => g,
                    None => return Ok(false),
                },
            };
        }
    }

    fn if_then_else(
        &mut self,
        cond: &Term,
        then: &Term,
        els: Option<&Term>,
        cb: usize,
        rest: Goals,
    ) -> Goals {
        let h = self.choices.len();
        let then = push(Goal::Call(then.clone(), cb), rest.clone());
        match els {
            Some(e) => {
                self.choices.push(Choice {
                    mark: self.store.mark(),
                    retry: Retry::Goals(push(Goal::Call(e.clone(), cb), rest)),
                });
                push(Goal::Call(cond.clone(), h + 1), push(Goal::CutTo(h), then))
            }
            None => push(Goal::Call(cond.clone(), h), push(Goal::CutTo(h), then)),
        }
    }

    /// Executes one goal. `None` means it failed.
    fn call(&mut self, t: &Term, cb: usize, rest: Goals) -> Result<Option<Goals>, OracleError> {
        let t = deref(t, &self.store);
        let c = match &t {
            Term::Var(_) => return Err(OracleError::UnboundGoal),
            Term::Int(_) | Term::Float(_) => return Err(OracleError::NotCallable(t.to_string())),
            Term::Atom(a) => {
                return Ok(match &**a {
                    "true" => Some(rest),
                    "fail" | "false" => None,
                    "!" => {
                        if self.cfg.real_cut {
                            self.choices.truncate(cb);
                        }
                        Some(rest)
                    }
                    "nl" => {
                        self.output.push('\n');
                        Some(rest)
                    }
                    _ => self.try_clauses(t.clone(), 0, rest),
                });
            }
            Term::Compound(c) => c.clone(),
        };
        let ok = match (c.name(), c.args()) {
            (",", [a, b]) => {
                let rest = push(Goal::Call(b.clone(), cb), rest);
                return Ok(Some(push(Goal::Call(a.clone(), cb), rest)));
            }
            (";", [l, r]) => {
                let l = deref(l, &self.store);
                if let Some(ite) = l
                    .as_compound()
                    .filter(|i| i.name() == "->" && i.arity() == 2)
                {
                    let [cond, then] = ite.args() else {
                        unreachable!()
                    };
                    return Ok(Some(self.if_then_else(cond, then, Some(r), cb, rest)));
                }
                self.choices.push(Choice {
                    mark: self.store.mark(),
                    retry: Retry::Goals(push(Goal::Call(r.clone(), cb), rest.clone())),
                });
                return Ok(Some(push(Goal::Call(l, cb), rest)));
            }
            ("->", [cond, then]) => return Ok(Some(self.if_then_else(cond, then, None, cb, rest))),
            ("call", [g]) => {
                return Ok(Some(push(Goal::Call(g.clone(), self.choices.len()), rest)))
            }
            ("conj", [list]) => {
                let mut items = Vec::new();
                let mut cur = deref(list, &self.store);
                loop {
                    match cur.as_compound() {
                        Some(cell) if cell.name() == "." && cell.arity() == 2 => {
                            items.push(cell.args()[0].clone());
                            cur = deref(&cell.args()[1], &self.store);
                        }
                        _ if cur.is_atom("[]") => break,
                        _ => {
                            return Err(OracleError::NotAList(
                                resolve(list, &self.store).to_string(),
                            ))
                        }
                    }
                }
                let goals = items
                    .into_iter()
                    .rev()
                    .fold(rest, |acc, g| push(Goal::Call(g, cb), acc));
                return Ok(Some(goals));
            }
            ("shift", [_]) | ("reset", [_, _, _]) => {
                return Err(OracleError::Unsupported(format!(
                    "{}/{}",
                    c.name(),
                    c.arity()
                )))
            }
            ("=", [a, b]) => self.store.unify(a, b),
            ("\\=", [a, b]) => {
                let mark = self.store.mark();
                let ok = self.store.unify(a, b);
                self.store.undo(mark);
                !ok
            }
            ("==", [a, b]) => compare_standard(a, b, &self.store) == Ordering::Equal,
            ("\\==", [a, b]) => compare_standard(a, b, &self.store) != Ordering::Equal,
            ("@<", [a, b]) => compare_standard(a, b, &self.store) == Ordering::Less,
            ("@>", [a, b]) => compare_standard(a, b, &self.store) == Ordering::Greater,
            ("@=<", [a, b]) => compare_standard(a, b, &self.store) != Ordering::Greater,
            ("@>=", [a, b]) => compare_standard(a, b, &self.store) != Ordering::Less,
            ("is", [r, e]) => {
                let v = eval_arith(e, &self.store)?;
                self.store.unify(r, &v)
            }
            ("<" | ">" | "=<" | ">=", [a, b]) => {
                let x = eval_arith(a, &self.store)?;
                let y = eval_arith(b, &self.store)?;
                let ord = compare_numeric(&x, &y);
                match c.name() {
                    "<" => ord == Some(Ordering::Less),
                    ">" => ord == Some(Ordering::Greater),
                    "=<" => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
                    _ => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
                }
            }
            ("copy_term", [a, b]) => {
                let copy = self.store.copy(a, &mut HashMap::new());
                self.store.unify(b, &copy)
            }
            ("write", [a]) => {
                let text = TermFormatter::new(&self.store, false).format(a, 1200);
                self.output.push_str(&text);
                true
            }
            ("var", [a]) => matches!(deref(a, &self.store), Term::Var(_)),
            ("nonvar", [a]) => !matches!(deref(a, &self.store), Term::Var(_)),
            ("atom", [a]) => matches!(deref(a, &self.store), Term::Atom(_)),
            ("number", [a]) => deref(a, &self.store).is_number(),
            ("atomic", [a]) => !matches!(deref(a, &self.store), Term::Var(_) | Term::Compound(_)),
            ("compound", [a]) => matches!(deref(a, &self.store), Term::Compound(_)),
            _ => return Ok(self.try_clauses(t.clone(), 0, rest)),
        };
        Ok(ok.then_some(rest))
    }
}

/// Enumerates the answers of `query` by depth-first SLD resolution with
/// clauses tried in source order.
pub fn sld_solve(db: &Database, query: &Query, cfg: &OracleConfig) -> OracleOutcome {
    let mut m = Machine {
        db,
        cfg,
        store: TrailStore::default(),
        choices: Vec::new(),
        steps: 0,
        output: String::new(),
    };
    let base = m.store.alloc(query.num_vars);
    let mut goals = push(Goal::Call(query.goal.offset_vars(base), 0), None);
    let names: Vec<String> = query.var_names.iter().map(|(n, _)| n.clone()).collect();
    let mut answers = Vec::new();
    let stop = loop {
        match m.run(goals) {
            Ok(true) => {
                let values = query
                    .var_names
                    .iter()
                    .map(|(_, k)| resolve(&Term::var(base + k), &m.store))
                    .collect();
                answers.push(Answer::from_values(names.clone(), values));
                if answers.len() >= cfg.max_answers {
                    break Stop::AnswerCap;
                }
                match m.backtrack() {
                    Some(g) => goals = g,
                    None => break Stop::Exhausted,
                }
            }
            Ok(false) => break Stop::Exhausted,
            Err(stop) => break stop,
        }
    };
    OracleOutcome {
        answers,
        stop,
        steps: m.steps,
        output: m.output,
    }
}
