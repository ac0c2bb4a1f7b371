#![allow(dead_code)]

use std::sync::Arc;

use ddc_core::database::Database;
use ddc_core::engine::Engine;
use ddc_core::reader::parse_program;
use ddc_core::stdlib;
use ddc_core::toplevel::{solve_all, Answer, SolveError};

pub fn database(libs: &[&str], program: &str) -> Database {
    let mut db = Database::new();
    stdlib::load(&mut db, libs).unwrap();
    db.consult(parse_program(program).unwrap()).unwrap();
    db
}

pub fn engine(libs: &[&str], program: &str) -> Engine {
    Engine::new(Arc::new(database(libs, program)))
}

pub fn program_file(name: &str) -> String {
    let path = format!("{}/programs/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Answers rendered as text, plus everything written to the output.
pub fn run(libs: &[&str], program: &str, query: &str) -> Result<(Vec<String>, String), SolveError> {
    let mut e = engine(libs, program);
    let answers = solve_all(&mut e, query)?;
    Ok((
        answers.iter().map(ToString::to_string).collect(),
        e.take_output(),
    ))
}

pub fn answers(libs: &[&str], program: &str, query: &str) -> Vec<String> {
    run(libs, program, query)
        .unwrap_or_else(|e| panic!("{query}: {e}"))
        .0
}

pub fn solve_answers(e: &mut Engine, query: &str) -> Vec<Answer> {
    solve_all(e, query).unwrap_or_else(|err| panic!("{query}: {err}"))
}

/// Runs `f` on a thread with a large stack; deep continuations recurse.
pub fn big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(f)
        .unwrap()
        .join()
        .unwrap()
}
