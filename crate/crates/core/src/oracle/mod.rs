//! Reference SLD interpreter and random program generators used for
//! differential testing of the engine.
//!
//! The interpreter keeps one destructive binding store with a trail and
//! backtracks by undoing bindings, which shares nothing with the engine's
//! copying evaluator apart from term utilities.

mod corpus;
mod generate;
mod sld;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::database::Database;
use crate::engine::{Engine, EngineConfig};
use crate::reader::{parse_program, parse_query, Query};
use crate::terms::{ArithError, Term, VarId};
use crate::toplevel::{solve, Answer, SolveError};

pub use corpus::{
    brute_force_nn, cut_corpus, gen_bsp, gen_cut_program, gen_prism, translate_cut, BspInstance,
    CutProgram, PrismNode, PrismProgram,
};
pub use generate::{gen_program, GenParams, Generated};
pub use sld::sld_solve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Resolution steps before the run is reported as truncated.
    pub max_steps: u64,
    pub max_answers: usize,
    /// `!/0` prunes choicepoints. When off it behaves as `true`, like the
    /// engine.
    pub real_cut: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_steps: 1_000_000,
            max_answers: 10_000,
            real_cut: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("unbound goal")]
    UnboundGoal,
    #[error("goal is not callable: {0}")]
    NotCallable(String),
    #[error("conj/1 expects a list, got {0}")]
    NotAList(String),
    #[error("{0} is not supported by the oracle")]
    Unsupported(String),
}

/// Why enumeration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Stop {
    Exhausted,
    StepLimit,
    AnswerCap,
    Error(OracleError),
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub answers: Vec<Answer>,
    pub stop: Stop,
    pub steps: u64,
    /// Text written by `write/1` and `nl/0`.
    pub output: String,
}

impl OracleOutcome {
    pub fn exhausted(&self) -> bool {
        self.stop == Stop::Exhausted
    }
}

fn variant(
    a: &Term,
    b: &Term,
    fwd: &mut HashMap<VarId, VarId>,
    back: &mut HashMap<VarId, VarId>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x
        }
        (Term::Compound(p), Term::Compound(q)) => {
            p.name() == q.name()
                && p.arity() == q.arity()
                && p.args()
                    .iter()
                    .zip(q.args())
                    .all(|(x, y)| variant(x, y, fwd, back))
        }
        _ => a == b,
    }
}

/// Two answers are variants: same names in the same order and values equal
/// up to a consistent renaming of variables.
pub fn answer_variant(a: &Answer, b: &Answer) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.bindings.len() == b.bindings.len()
        && a.bindings
            .iter()
            .zip(&b.bindings)
            .all(|((n, x), (m, y))| n == m && variant(x, y, &mut fwd, &mut back))
}

/// Equal length and pairwise variant.
pub fn answers_equiv(a: &[Answer], b: &[Answer]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| answer_variant(x, y))
}

/// Result of running one program through both the engine and the oracle.
#[derive(Debug, Clone)]
pub enum DiffOutcome {
    /// Same answers in the same order. `complete` is false when the oracle
    /// was truncated and only a prefix was compared.
    Agree {
        answers: usize,
        complete: bool,
    },
    Mismatch {
        engine: Vec<Answer>,
        oracle: Vec<Answer>,
    },
    EngineError(SolveError),
    OracleError(OracleError),
}

impl DiffOutcome {
    pub fn agrees(&self) -> bool {
        matches!(self, DiffOutcome::Agree { .. })
    }
}

/// Compares the engine's answers with the oracle's on one program/query.
pub fn compare(db: Arc<Database>, query: &Query, cfg: &OracleConfig) -> DiffOutcome {
    let oracle = sld_solve(&db, query, cfg);
    let complete = match oracle.stop {
        Stop::Error(e) => return DiffOutcome::OracleError(e),
        Stop::Exhausted => true,
        Stop::StepLimit | Stop::AnswerCap => false,
    };
    let mut engine = Engine::with_config(db, EngineConfig::default());
    let mut got = Vec::new();
    let mut solutions = solve(&mut engine, query);
    // One answer past the oracle's count shows that the engine has extras.
    let limit = if complete {
        oracle.answers.len() + 1
    } else {
        oracle.answers.len()
    };
    for answer in solutions.by_ref().take(limit) {
        match answer {
            Ok(a) => got.push(a),
            Err(e) => return DiffOutcome::EngineError(e),
        }
    }
    if answers_equiv(&got, &oracle.answers) {
        DiffOutcome::Agree {
            answers: got.len(),
            complete,
        }
    } else {
        DiffOutcome::Mismatch {
            engine: got,
            oracle: oracle.answers,
        }
    }
}

/// Generates the program for `seed` and compares engine and oracle on it.
pub fn difftest_seed(seed: u64, params: &GenParams, cfg: &OracleConfig) -> DiffOutcome {
    let generated = gen_program(seed, params);
    let mut db = Database::new();
    db.consult(parse_program(&generated.program).expect("generated programs parse"))
        .expect("generated programs define no builtins");
    let query = parse_query(&generated.query).expect("generated queries parse");
    compare(Arc::new(db), &query, cfg)
}
