//! The `ddc` command line: `run`, `repl` and `difftest`.
//!
//! Exit codes: 0 when the goal has at least one answer, 1 when it has
//! none, 2 on a syntax, load or runtime error, 3 on an uncaught `shift/1`.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::database::Database;
use crate::engine::{format_trace, Engine, EngineConfig};
use crate::oracle::{self, sld_solve, DiffOutcome, GenParams, OracleConfig, Stop};
use crate::reader::{parse_program_named, parse_query, Query};
use crate::stdlib;
use crate::toplevel::{solve, SolveError};

pub const EXIT_ANSWERS: i32 = 0;
pub const EXIT_NO_ANSWERS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNCAUGHT_SHIFT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ddc",
    version,
    about = "Prolog with disjunctive delimited control"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Consult files and print every answer of a goal.
    Run {
        #[command(flatten)]
        load: LoadArgs,
        #[arg(short = 'g', long)]
        goal: String,
    },
    /// Interactive toplevel. `;` asks for the next answer, `halt.` quits.
    Repl {
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Compare the engine with the SLD oracle on generated programs.
    Difftest {
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        start: u64,
        /// Also generate if-then-else.
        #[arg(long)]
        ite: bool,
        #[arg(long)]
        steps: Option<u64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct LoadArgs {
    /// Program files, consulted in order after the libraries.
    pub files: Vec<PathBuf>,
    /// Library to load (repeatable, comma-separated, or `all`).
    #[arg(long = "lib", value_delimiter = ',')]
    pub libs: Vec<String>,
    /// Print the evaluation trace to standard error.
    #[arg(long)]
    pub trace: bool,
    /// Answer with the SLD oracle instead of the engine.
    #[arg(long)]
    pub oracle: bool,
    /// Step limit per query.
    #[arg(long)]
    pub steps: Option<u64>,
}

/// Standard streams, abstracted for tests.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_ANSWERS
            };
            let text = e.render().to_string();
            let sink = if e.use_stderr() {
                &mut *io.err
            } else {
                &mut *io.out
            };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    run(cli, io)
}

pub fn run(cli: Cli, io: &mut Io<'_>) -> i32 {
    let result = match cli.command {
        Command::Run { load, goal } => {
            load_db(&load).and_then(|db| run_goal(&load, Arc::new(db), &goal, io))
        }
        Command::Repl { load } => load_db(&load).and_then(|db| repl(&load, Arc::new(db), io)),
        Command::Difftest {
            seeds,
            start,
            ite,
            steps,
        } => difftest(start, seeds, ite, steps, io),
    };
    let code = result.unwrap_or_else(|msg| {
        let _ = writeln!(io.err, "ddc: {msg}");
        EXIT_ERROR
    });
    let _ = io.out.flush();
    code
}

fn load_db(load: &LoadArgs) -> Result<Database, String> {
    let mut db = Database::new();
    let libs: Vec<&str> = load.libs.iter().map(String::as_str).collect();
    stdlib::load(&mut db, &libs).map_err(|e| e.to_string())?;
    for path in &load.files {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| format!("{name}: {e}"))?;
        let clauses = parse_program_named(&text, Some(&name)).map_err(|e| format!("{name}:{e}"))?;
        db.consult(clauses).map_err(|e| e.to_string())?;
    }
    Ok(db)
}

fn engine_for(load: &LoadArgs, db: Arc<Database>) -> Engine {
    let mut cfg = EngineConfig {
        trace: load.trace,
        ..EngineConfig::default()
    };
    if let Some(n) = load.steps {
        cfg.max_steps = n;
    }
    Engine::with_config(db, cfg)
}

fn error_code(e: &SolveError) -> i32 {
    match e {
        SolveError::UncaughtShift { .. } => EXIT_UNCAUGHT_SHIFT,
        _ => EXIT_ERROR,
    }
}

/// Writes pending object-level output and trace records.
fn flush_engine(engine: &mut Engine, io: &mut Io<'_>) -> std::io::Result<()> {
    io.out.write_all(engine.take_output().as_bytes())?;
    io.err
        .write_all(format_trace(&engine.take_trace()).as_bytes())?;
    io.out.flush()
}

fn run_goal(
    load: &LoadArgs,
    db: Arc<Database>,
    goal: &str,
    io: &mut Io<'_>,
) -> Result<i32, String> {
    let query = parse_query(goal).map_err(|e| format!("goal:{e}"))?;
    if load.oracle {
        return run_oracle(load, &db, &query, io);
    }
    let mut engine = engine_for(load, db);
    let mut sols = solve(&mut engine, &query);
    let mut answers = 0;
    loop {
        let next = sols.next();
        flush_engine(sols.engine(), io).map_err(|e| e.to_string())?;
        match next {
            None => break,
            Some(Ok(a)) => {
                answers += 1;
                writeln!(io.out, "{a}.").map_err(|e| e.to_string())?;
            }
            Some(Err(e)) => {
                let _ = writeln!(io.err, "{e}");
                return Ok(error_code(&e));
            }
        }
    }
    Ok(finish(answers, io))
}

fn finish(answers: usize, io: &mut Io<'_>) -> i32 {
    if answers == 0 {
        let _ = writeln!(io.out, "false.");
        EXIT_NO_ANSWERS
    } else {
        EXIT_ANSWERS
    }
}

fn run_oracle(
    load: &LoadArgs,
    db: &Database,
    query: &Query,
    io: &mut Io<'_>,
) -> Result<i32, String> {
    let mut cfg = OracleConfig {
        max_answers: usize::MAX,
        ..OracleConfig::default()
    };
    if let Some(n) = load.steps {
        cfg.max_steps = n;
    }
    let outcome = sld_solve(db, query, &cfg);
    io.out
        .write_all(outcome.output.as_bytes())
        .map_err(|e| e.to_string())?;
    for a in &outcome.answers {
        writeln!(io.out, "{a}.").map_err(|e| e.to_string())?;
    }
    match outcome.stop {
        Stop::Exhausted | Stop::AnswerCap => Ok(finish(outcome.answers.len(), io)),
        Stop::StepLimit => {
            let _ = writeln!(io.err, "oracle: step limit of {} reached", cfg.max_steps);
            Ok(EXIT_ERROR)
        }
        Stop::Error(e) => {
            let _ = writeln!(io.err, "oracle: {e}");
            Ok(EXIT_ERROR)
        }
    }
}

/// Reads one query, possibly spanning lines, up to a line ending in `.`.
fn read_query(input: &mut dyn BufRead) -> std::io::Result<Option<String>> {
    let mut text = String::new();
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            let rest = text.trim();
            return Ok((!rest.is_empty()).then(|| rest.to_string()));
        }
        text.push_str(&line);
        if text.trim_end().ends_with('.') {
            return Ok(Some(text.trim().to_string()));
        }
    }
}

fn repl(load: &LoadArgs, db: Arc<Database>, io: &mut Io<'_>) -> Result<i32, String> {
    let io_err = |e: std::io::Error| e.to_string();
    let mut engine = engine_for(load, db.clone());
    loop {
        write!(io.out, "?- ").map_err(io_err)?;
        io.out.flush().map_err(io_err)?;
        let Some(text) = read_query(io.input).map_err(io_err)? else {
            writeln!(io.out).map_err(io_err)?;
            return Ok(EXIT_ANSWERS);
        };
        if text == "halt." {
            return Ok(EXIT_ANSWERS);
        }
        let query = match parse_query(&text) {
            Ok(q) => q,
            Err(e) => {
                writeln!(io.err, "{e}").map_err(io_err)?;
                continue;
            }
        };
        if load.oracle {
            run_oracle(load, &db, &query, io)?;
            continue;
        }
        let mut sols = solve(&mut engine, &query);
        let mut first = true;
        loop {
            let next = sols.next();
            flush_engine(sols.engine(), io).map_err(io_err)?;
            match next {
                None => {
                    writeln!(io.out, "false.").map_err(io_err)?;
                    break;
                }
                Some(Err(e)) => {
                    writeln!(io.err, "{e}").map_err(io_err)?;
                    break;
                }
                Some(Ok(a)) => {
                    if !first {
                        writeln!(io.out).map_err(io_err)?;
                    }
                    first = false;
                    write!(io.out, "{a} ").map_err(io_err)?;
                    io.out.flush().map_err(io_err)?;
                    let mut reply = String::new();
                    io.input.read_line(&mut reply).map_err(io_err)?;
                    if reply.trim() != ";" {
                        writeln!(io.out, ".").map_err(io_err)?;
                        break;
                    }
                    write!(io.out, ";").map_err(io_err)?;
                }
            }
        }
    }
}

fn difftest(
    start: u64,
    seeds: u64,
    ite: bool,
    steps: Option<u64>,
    io: &mut Io<'_>,
) -> Result<i32, String> {
    let params = GenParams {
        if_then_else: ite,
        ..GenParams::default()
    };
    let mut cfg = OracleConfig::default();
    if let Some(n) = steps {
        cfg.max_steps = n;
    }
    let io_err = |e: std::io::Error| e.to_string();
    let (mut agree, mut complete, mut answers) = (0u64, 0u64, 0usize);
    for seed in start..start + seeds {
        match oracle::difftest_seed(seed, &params, &cfg) {
            DiffOutcome::Agree {
                answers: n,
                complete: c,
            } => {
                agree += 1;
                complete += u64::from(c);
                answers += n;
            }
            other => {
                let g = oracle::gen_program(seed, &params);
                writeln!(
                    io.out,
                    "seed {seed}: {other:?}\n{}?- {}.",
                    g.program, g.query
                )
                .map_err(io_err)?;
            }
        }
    }
    writeln!(
        io.out,
        "difftest: {seeds} programs, {agree} agree ({complete} exhaustive), {answers} answers compared"
    )
    .map_err(io_err)?;
    Ok(if agree == seeds {
        EXIT_ANSWERS
    } else {
        EXIT_NO_ANSWERS
    })
}
