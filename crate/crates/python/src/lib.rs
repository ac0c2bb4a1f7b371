//! Python bindings: `ddc.Engine` plus the oracle entry points.
//!
//! Answers are returned as `dict[str, str]` mapping each query variable to
//! the canonical text of its value.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use ddc_core::database::Database;
use ddc_core::engine::{Engine as CoreEngine, EngineConfig};
use ddc_core::oracle::{self, GenParams, OracleConfig, Stop};
use ddc_core::reader::{parse_program, parse_query};
use ddc_core::stdlib;
use ddc_core::terms::{format_term, NoBindings};
use ddc_core::toplevel::{solve, Answer, SolveError};

create_exception!(ddc, DdcError, PyException, "Base class of engine errors.");
create_exception!(
    ddc,
    PrologSyntaxError,
    DdcError,
    "A program or query failed to parse."
);
create_exception!(
    ddc,
    UncaughtShift,
    DdcError,
    "A shift/1 reached the toplevel."
);

fn answer_map(a: &Answer) -> BTreeMap<String, String> {
    a.bindings
        .iter()
        .map(|(n, t)| (n.clone(), format_term(t, &NoBindings)))
        .collect()
}

fn solve_error(e: SolveError) -> PyErr {
    match e {
        SolveError::Syntax(e) => PrologSyntaxError::new_err(e.to_string()),
        SolveError::UncaughtShift { ball } => UncaughtShift::new_err(ball),
        SolveError::Engine(e) => DdcError::new_err(e.to_string()),
    }
}

fn consult_text(db: &mut Database, text: &str) -> PyResult<()> {
    let clauses = parse_program(text).map_err(|e| PrologSyntaxError::new_err(e.to_string()))?;
    db.consult(clauses)
        .map_err(|e| DdcError::new_err(e.to_string()))
}

struct State {
    db: Arc<Database>,
    output: String,
}

/// A program database with a toplevel.
#[pyclass(module = "ddc")]
struct Engine {
    state: Mutex<State>,
    max_steps: Option<u64>,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (libs = Vec::new(), max_steps = None))]
    fn new(libs: Vec<String>, max_steps: Option<u64>) -> PyResult<Self> {
        let mut db = Database::new();
        let names: Vec<&str> = libs.iter().map(String::as_str).collect();
        stdlib::load(&mut db, &names).map_err(|e| DdcError::new_err(e.to_string()))?;
        Ok(Engine {
            state: Mutex::new(State {
                db: Arc::new(db),
                output: String::new(),
            }),
            max_steps,
        })
    }

    /// Adds the clauses of `text` to the database.
    fn consult(&self, text: &str) -> PyResult<()> {
        let mut state = self.state.lock().expect("engine lock");
        consult_text(Arc::make_mut(&mut state.db), text)
    }

    fn consult_file(&self, path: std::path::PathBuf) -> PyResult<()> {
        let text = std::fs::read_to_string(&path)?;
        self.consult(&text)
    }

    /// All answers of `query` (at most `limit`), in order.
    #[pyo3(signature = (query, limit = None))]
    fn solve(&self, query: &str, limit: Option<usize>) -> PyResult<Vec<BTreeMap<String, String>>> {
        let q = parse_query(query).map_err(|e| PrologSyntaxError::new_err(e.to_string()))?;
        let mut state = self.state.lock().expect("engine lock");
        let mut cfg = EngineConfig::default();
        if let Some(n) = self.max_steps {
            cfg.max_steps = n;
        }
        let mut engine = CoreEngine::with_config(state.db.clone(), cfg);
        let mut out = Vec::new();
        let mut result = Ok(());
        for a in solve(&mut engine, &q).take(limit.unwrap_or(usize::MAX)) {
            match a {
                Ok(a) => out.push(answer_map(&a)),
                Err(e) => {
                    result = Err(solve_error(e));
                    break;
                }
            }
        }
        state.output.push_str(&engine.take_output());
        result.map(|()| out)
    }

    /// The first answer, or `None`.
    fn solve_first(&self, query: &str) -> PyResult<Option<BTreeMap<String, String>>> {
        Ok(self.solve(query, Some(1))?.into_iter().next())
    }

    /// Text written by `write/1` and `nl/0` since the last call.
    fn take_output(&self) -> String {
        std::mem::take(&mut self.state.lock().expect("engine lock").output)
    }

    /// Defined predicates as `name/arity` strings.
    fn predicates(&self) -> Vec<String> {
        let state = self.state.lock().expect("engine lock");
        state
            .db
            .predicates()
            .into_iter()
            .map(|(n, a)| format!("{n}/{a}"))
            .collect()
    }
}

/// Answers of `query` over `program` by plain SLD resolution.
#[pyfunction]
#[pyo3(signature = (program, query, real_cut = false))]
fn oracle_solve(
    program: &str,
    query: &str,
    real_cut: bool,
) -> PyResult<Vec<BTreeMap<String, String>>> {
    let mut db = Database::new();
    consult_text(&mut db, program)?;
    let q = parse_query(query).map_err(|e| PrologSyntaxError::new_err(e.to_string()))?;
    let cfg = OracleConfig {
        real_cut,
        ..OracleConfig::default()
    };
    let outcome = oracle::sld_solve(&db, &q, &cfg);
    match outcome.stop {
        Stop::Error(e) => Err(DdcError::new_err(e.to_string())),
        Stop::StepLimit => Err(DdcError::new_err("oracle step limit reached")),
        Stop::Exhausted | Stop::AnswerCap => Ok(outcome.answers.iter().map(answer_map).collect()),
    }
}

/// Runs the engine/oracle comparison on `count` generated programs and
/// returns the seeds that disagreed.
#[pyfunction]
#[pyo3(signature = (count, start = 0))]
fn difftest(count: u64, start: u64) -> Vec<u64> {
    let params = GenParams::default();
    let cfg = OracleConfig::default();
    (start..start + count)
        .filter(|&s| !oracle::difftest_seed(s, &params, &cfg).agrees())
        .collect()
}

/// Names of the bundled libraries.
#[pyfunction]
fn libraries() -> Vec<&'static str> {
    stdlib::LIBRARIES.iter().map(|l| l.name).collect()
}

#[pymodule]
fn ddc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    m.add_function(wrap_pyfunction!(difftest, m)?)?;
    m.add_function(wrap_pyfunction!(libraries, m)?)?;
    m.add("DdcError", m.py().get_type::<DdcError>())?;
    m.add("PrologSyntaxError", m.py().get_type::<PrologSyntaxError>())?;
    m.add("UncaughtShift", m.py().get_type::<UncaughtShift>())?;
    Ok(())
}
