//! The evaluator.
//!
//! [`Engine::eval`] runs a conjunction of goals against a reified
//! disjunctive continuation ([`Alt`]) and always returns exactly one
//! [`EvalResult`]: the engine never backtracks on the host stack. A
//! disjunction `(G1;G2)` renames `G2` and the rest of the conjunction apart
//! and folds it into the current `Alt`; `fail` resumes that `Alt`. Because
//! every alternative is a fresh copy, the binding store is never undone.

mod builtins;
mod trace;

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub use builtins::is_builtin;
pub use trace::{format_trace, TraceEvent};

use crate::database::{disjoin_clauses, Database};
use crate::terms::{copy_term, deref, resolve, unify, ArithError, BindingStore, ListIter, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("step limit of {0} exceeded")]
    StepLimit(u64),
    #[error("arithmetic error: {0}")]
    Arith(#[from] ArithError),
    #[error("instantiation error: unbound goal")]
    UnboundGoal,
    #[error("type error: callable expected, found {0}")]
    NotCallable(String),
    #[error("type error: list expected in conj/1, found {0}")]
    NotAList(String),
    #[error("shift({0}) escaped an if-then-else condition")]
    ShiftInCondition(String),
}

/// A disjunctive continuation `alt(Pattern, Goal)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Alt {
    pub pattern: Term,
    pub goal: Term,
}

impl Alt {
    pub fn to_term(&self) -> Term {
        Term::compound("alt", vec![self.pattern.clone(), self.goal.clone()])
    }
}

/// Outcome of one delimited evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalResult {
    Failure,
    Success {
        pattern: Term,
        branch: Term,
    },
    Shift {
        ball: Term,
        cont: Term,
        pattern: Term,
        branch: Term,
    },
}

impl EvalResult {
    /// `failure`, `success(P,B)` or `shift(Ball,Cont,P,B)`.
    pub fn to_term(&self) -> Term {
        match self {
            EvalResult::Failure => Term::atom("failure"),
            EvalResult::Success { pattern, branch } => {
                Term::compound("success", vec![pattern.clone(), branch.clone()])
            }
            EvalResult::Shift {
                ball,
                cont,
                pattern,
                branch,
            } => Term::compound(
                "shift",
                vec![ball.clone(), cont.clone(), pattern.clone(), branch.clone()],
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Maximum number of evaluation steps before [`EngineError::StepLimit`].
    pub max_steps: u64,
    /// Record [`TraceEvent`]s.
    pub trace: bool,
    /// Skip clauses whose head cannot unify with the call.
    pub filter_clauses: bool,
    /// Assert that captured continuations share no variables with the live
    /// computation at every success or shift.
    pub check_freshness: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_steps: 10_000_000,
            trace: false,
            filter_clauses: true,
            check_freshness: cfg!(debug_assertions),
        }
    }
}

static FRESHNESS_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of freshness checks performed by all engines in this process.
pub fn freshness_checks() -> u64 {
    FRESHNESS_CHECKS.load(Ordering::Relaxed)
}

/// Called with every user-predicate goal before its clauses are looked up.
pub type CallHook = Box<dyn FnMut(&Term, &BindingStore) + Send>;

pub struct Engine {
    db: Arc<Database>,
    store: BindingStore,
    config: EngineConfig,
    steps: u64,
    depth: usize,
    output: String,
    trace: Vec<TraceEvent>,
    call_hook: Option<CallHook>,
}

fn conj_of(stack: &[Term]) -> Term {
    Term::compound("conj", vec![Term::list(stack.iter().rev().cloned())])
}

fn split_pair(t: Term) -> (Term, Term) {
    match t {
        Term::Compound(c) if c.arity() == 2 => (c.args()[0].clone(), c.args()[1].clone()),
        _ => unreachable!("copy of a pair is a pair"),
    }
}

impl Engine {
    pub fn new(db: Arc<Database>) -> Self {
        Self::with_config(db, EngineConfig::default())
    }

    pub fn with_config(db: Arc<Database>, config: EngineConfig) -> Self {
        Engine {
            db,
            store: BindingStore::new(),
            config,
            steps: 0,
            depth: 0,
            output: String::new(),
            trace: Vec::new(),
            call_hook: None,
        }
    }

    pub fn db(&self) -> &Arc<Database> {
        &self.db
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut EngineConfig {
        &mut self.config
    }

    pub fn store(&self) -> &BindingStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut BindingStore {
        &mut self.store
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn reset_steps(&mut self) {
        self.steps = 0;
    }

    /// Returns and clears everything written by `write/1` and `nl/0`.
    pub fn take_output(&mut self) -> String {
        std::mem::take(&mut self.output)
    }

    /// Returns and clears the recorded trace.
    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.trace)
    }

    pub fn set_call_hook(&mut self, hook: Option<CallHook>) {
        self.call_hook = hook;
    }

    /// `alt(_, fail)` with a fresh pattern variable.
    pub fn empty_alt(&mut self) -> Alt {
        Alt {
            pattern: self.store.fresh_var(),
            goal: Term::atom("fail"),
        }
    }

    pub fn is_empty_alt(&self, alt: &Alt) -> bool {
        deref(&alt.goal, &self.store).is_atom("fail")
    }

    /// Combines two alternatives; the empty one is an identity on both sides.
    pub fn disjoin(&mut self, a: Alt, b: Alt) -> Alt {
        if self.is_empty_alt(&a) {
            return b;
        }
        if self.is_empty_alt(&b) {
            return a;
        }
        let p3 = self.store.fresh_var();
        let eq = |p: Term, q: &Term| Term::compound("=", vec![p, q.clone()]);
        let left = Term::compound(",", vec![eq(a.pattern, &p3), a.goal]);
        let right = Term::compound(",", vec![eq(b.pattern, &p3), b.goal]);
        Alt {
            pattern: p3,
            goal: Term::compound(";", vec![left, right]),
        }
    }

    /// Evaluates `conj` (first goal first) with input pattern `pat_in`
    /// against the alternatives `disj`. Returns the output pattern and the
    /// result.
    pub fn eval(
        &mut self,
        conj: Vec<Term>,
        pat_in: Term,
        disj: Alt,
    ) -> Result<(Term, EvalResult), EngineError> {
        let mut stack = conj;
        stack.reverse();
        let saved = self.depth;
        let r = self.run(stack, pat_in, disj);
        self.depth = saved;
        r
    }

    /// Resumes the alternatives in `disj`, or fails if there are none.
    pub fn backtrack(&mut self, disj: Alt) -> Result<(Term, EvalResult), EngineError> {
        if self.is_empty_alt(&disj) {
            let out = self.store.fresh_var();
            return Ok((out, EvalResult::Failure));
        }
        let empty = self.empty_alt();
        self.eval(vec![disj.goal], disj.pattern, empty)
    }

    /// Runs `goal` in isolation on a joint copy of `pattern` and `goal`.
    /// Returns the copy's output pattern and the reified result term.
    pub fn run_reset(&mut self, pattern: &Term, goal: &Term) -> Result<(Term, Term), EngineError> {
        let copy = copy_term(
            &Term::pair("-", pattern.clone(), goal.clone()),
            &mut self.store,
        );
        let (p, g) = split_pair(copy);
        let empty = self.empty_alt();
        self.depth += 1;
        let r = self.eval(vec![g], p, empty);
        self.depth -= 1;
        let (out, res) = r?;
        Ok((out, res.to_term()))
    }

    fn record_step(&mut self, stack: &[Term], pat_in: &Term, disj: &Alt) {
        let s = &self.store;
        self.trace.push(TraceEvent::Step {
            depth: self.depth,
            pat_in: resolve(pat_in, s),
            conj: stack.iter().rev().map(|g| resolve(g, s)).collect(),
            disj: Alt {
                pattern: resolve(&disj.pattern, s),
                goal: resolve(&disj.goal, s),
            },
        });
    }

    fn finish(
        &mut self,
        pat_out: Term,
        result: EvalResult,
        live: &[&Term],
    ) -> Result<(Term, EvalResult), EngineError> {
        if self.config.check_freshness {
            self.check_freshness(&pat_out, &result, live);
        }
        if self.config.trace {
            self.trace.push(TraceEvent::Exit {
                depth: self.depth,
                pat_out: resolve(&pat_out, &self.store),
                result: resolve(&result.to_term(), &self.store),
            });
        }
        Ok((pat_out, result))
    }

    fn check_freshness(&self, pat_out: &Term, result: &EvalResult, live: &[&Term]) {
        let (captured, ball) = match result {
            EvalResult::Failure => return,
            EvalResult::Success { pattern, branch } => ([pattern, branch], None),
            EvalResult::Shift {
                ball,
                pattern,
                branch,
                ..
            } => ([pattern, branch], Some(ball)),
        };
        FRESHNESS_CHECKS.fetch_add(1, Ordering::Relaxed);
        let captured: HashSet<_> = captured
            .iter()
            .flat_map(|t| t.vars_in(&self.store))
            .collect();
        let shared = live
            .iter()
            .copied()
            .chain(std::iter::once(pat_out))
            .chain(ball)
            .flat_map(|t| t.vars_in(&self.store))
            .find(|v| captured.contains(v));
        assert!(
            shared.is_none(),
            "captured continuation shares {} with the live computation",
            shared.unwrap()
        );
    }

    fn run(
        &mut self,
        mut stack: Vec<Term>,
        mut pat_in: Term,
        mut disj: Alt,
    ) -> Result<(Term, EvalResult), EngineError> {
        if self.config.trace {
            self.trace.push(TraceEvent::Enter { depth: self.depth });
        }
        loop {
            if self.steps >= self.config.max_steps {
                return Err(EngineError::StepLimit(self.config.max_steps));
            }
            self.steps += 1;
            if self.config.trace {
                self.record_step(&stack, &pat_in, &disj);
            }
            let Some(goal) = stack.pop() else {
                let Alt { pattern, goal } = disj;
                return self.finish(
                    pat_in,
                    EvalResult::Success {
                        pattern,
                        branch: goal,
                    },
                    &[],
                );
            };
            let goal = deref(&goal, &self.store);
            let c = match &goal {
                Term::Var(_) => return Err(EngineError::UnboundGoal),
                Term::Int(_) | Term::Float(_) => {
                    return Err(EngineError::NotCallable(goal.to_string()))
                }
                Term::Atom(a) => match &**a {
                    "true" | "!" => continue,
                    "fail" | "false" => {
                        if self.config.trace {
                            self.trace.push(TraceEvent::Backtrack { depth: self.depth });
                        }
                        if self.is_empty_alt(&disj) {
                            let out = self.store.fresh_var();
                            return self.finish(out, EvalResult::Failure, &[]);
                        }
                        stack = vec![disj.goal];
                        pat_in = disj.pattern;
                        disj = self.empty_alt();
                        continue;
                    }
                    _ => None,
                },
                Term::Compound(c) => Some(c.clone()),
            };
            let (name, args) = match &c {
                Some(c) => (c.name(), c.args()),
                None => (goal.functor().map_or("", |f| f.0), &[][..]),
            };
            match (name, args) {
                (",", [a, b]) => {
                    stack.push(b.clone());
                    stack.push(a.clone());
                }
                (";", [a, b]) => {
                    if let Some(ite) = deref(a, &self.store)
                        .as_compound()
                        .filter(|c| c.name() == "->" && c.arity() == 2)
                    {
                        let (cond, then) = (ite.args()[0].clone(), ite.args()[1].clone());
                        let next = self.if_then_else(&cond, then, b.clone())?;
                        stack.push(next);
                        continue;
                    }
                    stack.push(b.clone());
                    let captured = Term::compound("alt", vec![pat_in.clone(), conj_of(&stack)]);
                    stack.pop();
                    let (p, g) = split_pair(copy_term(&captured, &mut self.store));
                    disj = self.disjoin(
                        Alt {
                            pattern: p,
                            goal: g,
                        },
                        disj,
                    );
                    stack.push(a.clone());
                }
                ("->", [cond, then]) => {
                    let next = self.if_then_else(cond, then.clone(), Term::atom("fail"))?;
                    stack.push(next);
                }
                ("conj", [list]) => {
                    let mut iter = ListIter::new(list, &self.store);
                    let goals: Vec<Term> = iter.by_ref().collect();
                    if !iter.tail().is_atom("[]") {
                        return Err(EngineError::NotAList(
                            resolve(list, &self.store).to_string(),
                        ));
                    }
                    stack.extend(goals.into_iter().rev());
                }
                ("shift", [ball]) => {
                    let cont = conj_of(&stack);
                    let Alt { pattern, goal } = disj;
                    let result = EvalResult::Shift {
                        ball: ball.clone(),
                        cont: cont.clone(),
                        pattern,
                        branch: goal,
                    };
                    return self.finish(pat_in, result, &[&cont]);
                }
                ("reset", [p, g, r]) => {
                    let (out, result) = self.run_reset(p, g)?;
                    stack.push(Term::compound("=", vec![r.clone(), result]));
                    stack.push(Term::compound("=", vec![p.clone(), out]));
                }
                ("call", [g]) => stack.push(g.clone()),
                _ if builtins::is_simple(name, args.len()) => {
                    if !builtins::run_simple(name, args, &mut self.store, &mut self.output)? {
                        stack.push(Term::atom("fail"));
                    }
                }
                _ => {
                    if let Some(hook) = self.call_hook.as_mut() {
                        hook(&goal, &self.store);
                    }
                    let filter = self.config.filter_clauses;
                    let db = Arc::clone(&self.db);
                    let pairs = db.matching_clauses(&goal, &mut self.store, filter);
                    stack.push(disjoin_clauses(&goal, pairs));
                }
            }
        }
    }

    /// Decides `(Cond -> Then ; Else)` and returns the goal to continue
    /// with. The condition runs on a copy so that a failed attempt cannot
    /// leave bindings on variables that `Else` still uses; on success the
    /// copy's bindings are transferred back.
    fn if_then_else(&mut self, cond: &Term, then: Term, els: Term) -> Result<Term, EngineError> {
        let vars = Term::list(cond.vars_in(&self.store).into_iter().map(Term::Var));
        let copy = copy_term(
            &Term::pair("-", vars.clone(), cond.clone()),
            &mut self.store,
        );
        let (vars_copy, cond_copy) = split_pair(copy);
        let empty = self.empty_alt();
        self.depth += 1;
        let r = self.eval(vec![cond_copy], vars_copy, empty);
        self.depth -= 1;
        match r? {
            (out, EvalResult::Success { .. }) => {
                let ok = unify(&vars, &out, &mut self.store);
                debug_assert!(ok, "condition answer is an instance of its variables");
                Ok(then)
            }
            (_, EvalResult::Failure) => Ok(els),
            (_, EvalResult::Shift { ball, .. }) => Err(EngineError::ShiftInCondition(
                resolve(&ball, &self.store).to_string(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::{parse_program, parse_query};
    use crate::terms::format_term;

    fn engine(src: &str) -> Engine {
        let mut db = Database::new();
        db.consult(parse_program(src).unwrap()).unwrap();
        Engine::new(Arc::new(db))
    }

    /// Evaluates `query` with pattern = the query's first variable.
    fn eval_query(e: &mut Engine, query: &str) -> (Term, EvalResult) {
        let q = parse_query(query).unwrap();
        let goal = e.store_mut().instantiate(&q.goal, q.num_vars);
        let pat = if q.num_vars == 0 {
            e.store_mut().fresh_var()
        } else {
            Term::var(e.store().var_count() - q.num_vars)
        };
        let empty = e.empty_alt();
        e.eval(vec![goal], pat, empty).unwrap()
    }

    fn show(e: &Engine, t: &Term) -> String {
        format_term(t, e.store())
    }

    /// All pattern instances produced by a branch, via repeated backtracking.
    fn branch_answers(e: &mut Engine, pattern: Term, branch: Term) -> Vec<String> {
        let mut out = Vec::new();
        let mut next = Alt {
            pattern,
            goal: branch,
        };
        loop {
            match e.backtrack(next).unwrap() {
                (p, EvalResult::Success { pattern, branch }) => {
                    out.push(show(e, &p));
                    next = Alt {
                        pattern,
                        goal: branch,
                    };
                }
                (_, EvalResult::Failure) => return out,
                (_, r) => panic!("unexpected {r:?}"),
            }
        }
    }

    #[test]
    fn reset_failure() {
        let mut e = engine("");
        let (_, r) = eval_query(&mut e, "fail");
        assert_eq!(r, EvalResult::Failure);
    }

    #[test]
    fn disjunction_success_and_branch() {
        let mut e = engine("");
        let (out, r) = eval_query(&mut e, "X = a ; X = b");
        assert_eq!(show(&e, &out), "a");
        let EvalResult::Success { pattern, branch } = r else {
            panic!("{r:?}")
        };
        assert_eq!(branch_answers(&mut e, pattern, branch), vec!["b"]);
    }

    #[test]
    fn shift_captures_both_continuations() {
        let mut e = engine("");
        let (out, r) = eval_query(&mut e, "shift(t), X = a ; X = b");
        let EvalResult::Shift {
            ball,
            cont,
            pattern,
            branch,
        } = r
        else {
            panic!("{r:?}")
        };
        assert!(matches!(deref(&out, e.store()), Term::Var(_)));
        assert_eq!(show(&e, &ball), "t");
        let cont_text = show(&e, &cont);
        assert_eq!(cont_text, format!("conj([{}=a])", show(&e, &out)));
        assert_eq!(branch_answers(&mut e, pattern, branch), vec!["b"]);
    }

    #[test]
    fn backtrack_on_empty_alt_fails() {
        let mut e = engine("");
        let empty = e.empty_alt();
        assert_eq!(e.backtrack(empty).unwrap().1, EvalResult::Failure);
    }

    #[test]
    fn backtrack_into_single_branch() {
        let mut e = engine("");
        let z = e.store_mut().fresh_var();
        let goal = Term::compound(
            ",",
            vec![
                Term::compound("=", vec![z.clone(), Term::Int(1)]),
                Term::atom("true"),
            ],
        );
        let (out, r) = e.backtrack(Alt { pattern: z, goal }).unwrap();
        assert_eq!(show(&e, &out), "1");
        let EvalResult::Success { branch, .. } = r else {
            panic!()
        };
        assert!(branch.is_atom("fail"));
    }

    #[test]
    fn disjoin_identities() {
        let mut e = engine("");
        let p = e.store_mut().fresh_var();
        let d = Alt {
            pattern: p.clone(),
            goal: Term::compound("=", vec![p, Term::atom("x")]),
        };
        let empty = e.empty_alt();
        assert_eq!(e.disjoin(empty.clone(), d.clone()), d);
        assert_eq!(e.disjoin(d.clone(), empty), d);
        let q = e.store_mut().fresh_var();
        let d2 = Alt {
            pattern: q.clone(),
            goal: Term::atom("true"),
        };
        let both = e.disjoin(d, d2);
        let text = show(&e, &both.to_term());
        let p3 = show(&e, &both.pattern);
        assert!(text.contains(&format!("{}={p3}", show(&e, &q))), "{text}");
    }

    #[test]
    fn nested_reset_is_isolated() {
        let mut e = engine("");
        let (_, r) = eval_query(
            &mut e,
            "R1 = R1, reset(P1, reset(P2, fail, R2), R1), R1 = success(_, _), R2 = failure",
        );
        assert!(matches!(r, EvalResult::Success { .. }), "{r:?}");
    }

    #[test]
    fn reset_binds_results() {
        let mut e = engine("");
        let (out, _) = eval_query(&mut e, "R = R, reset(X, (X = a ; X = b), R)");
        let text = show(&e, &out);
        assert!(text.starts_with("success("), "{text}");
    }

    #[test]
    fn user_predicates_in_source_order() {
        let mut e = engine("p(1).\np(2).\np(3).\n");
        let (out, r) = eval_query(&mut e, "p(X)");
        assert_eq!(show(&e, &out), "1");
        let EvalResult::Success { pattern, branch } = r else {
            panic!()
        };
        assert_eq!(branch_answers(&mut e, pattern, branch), vec!["2", "3"]);
    }

    #[test]
    fn if_then_else_commits() {
        let mut e = engine("q(1).\nq(2).\n");
        let (out, r) = eval_query(&mut e, "Y = Y, (q(X) -> Y = X ; Y = none)");
        assert_eq!(show(&e, &out), "1");
        let EvalResult::Success { branch, .. } = r else {
            panic!()
        };
        assert!(branch.is_atom("fail"));
        let (out, _) = eval_query(&mut e, "Y = Y, (q(3) -> Y = yes ; Y = no)");
        assert_eq!(show(&e, &out), "no");
    }

    #[test]
    fn failed_condition_leaves_no_bindings() {
        let mut e = engine("");
        let (out, _) = eval_query(&mut e, "Y = Y, ((Y = a, fail) -> true ; true)");
        assert!(matches!(deref(&out, e.store()), Term::Var(_)));
    }

    #[test]
    fn shift_in_condition_is_error() {
        let mut e = engine("");
        let q = parse_query("(shift(x) -> true ; true)").unwrap();
        let g = e.store_mut().instantiate(&q.goal, q.num_vars);
        let empty = e.empty_alt();
        let pat = e.store_mut().fresh_var();
        let err = e.eval(vec![g], pat, empty).unwrap_err();
        assert!(matches!(err, EngineError::ShiftInCondition(_)));
    }

    #[test]
    fn step_limit() {
        let mut db = Database::new();
        db.consult(parse_program("loop :- loop.").unwrap()).unwrap();
        let mut e = Engine::with_config(
            Arc::new(db),
            EngineConfig {
                max_steps: 1000,
                ..EngineConfig::default()
            },
        );
        let empty = e.empty_alt();
        let pat = e.store_mut().fresh_var();
        let err = e.eval(vec![Term::atom("loop")], pat, empty).unwrap_err();
        assert_eq!(err, EngineError::StepLimit(1000));
    }

    #[test]
    fn write_goes_to_output() {
        let mut e = engine("");
        eval_query(&mut e, "write(0.75), nl");
        assert_eq!(e.take_output(), "0.75\n");
        assert_eq!(e.take_output(), "");
    }

    #[test]
    fn conj_splices_goals() {
        let mut e = engine("");
        let (out, _) = eval_query(&mut e, "conj([X = f(Y), Y = 1])");
        assert_eq!(show(&e, &out), "f(1)");
    }

    #[test]
    fn call_hook_sees_user_calls() {
        use std::sync::Mutex;
        let mut e = engine("p(1).\nq :- p(_), p(_).");
        let seen = Arc::new(Mutex::new(Vec::new()));
        let sink = Arc::clone(&seen);
        e.set_call_hook(Some(Box::new(move |g, _| {
            sink.lock()
                .unwrap()
                .push(g.functor().unwrap().0.to_string());
        })));
        eval_query(&mut e, "q");
        assert_eq!(*seen.lock().unwrap(), vec!["q", "p", "p"]);
    }

    #[test]
    fn bound_result_mismatch_backtracks() {
        let mut e = engine("");
        let (_, r) = eval_query(&mut e, "reset(_, fail, success(_, _))");
        assert_eq!(r, EvalResult::Failure);
    }

    #[test]
    fn trace_records_steps() {
        let mut e = engine("p(1).\np(2) :- shift(2).");
        e.config_mut().trace = true;
        eval_query(&mut e, "p(X)");
        let trace = e.take_trace();
        assert!(matches!(
            trace.first(),
            Some(TraceEvent::Enter { depth: 0 })
        ));
        let TraceEvent::Step { conj, disj, .. } = &trace[1] else {
            panic!()
        };
        assert_eq!(conj.len(), 1);
        assert!(disj.goal.is_atom("fail"));
        assert!(matches!(trace.last(), Some(TraceEvent::Exit { .. })));
    }
}
