use std::fmt;

use super::Alt;
use crate::terms::{format_term, NoBindings, Term};

/// One record of an evaluation trace. Terms are snapshots with bindings
/// already applied.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    /// A new evaluation starts (top level, nested reset or condition).
    Enter { depth: usize },
    /// State before executing the next goal.
    Step {
        depth: usize,
        pat_in: Term,
        conj: Vec<Term>,
        disj: Alt,
    },
    /// The current goal failed; control moves to the disjunction.
    Backtrack { depth: usize },
    /// The evaluation finished with `pat_out` and the reified result.
    Exit {
        depth: usize,
        pat_out: Term,
        result: Term,
    },
}

impl TraceEvent {
    pub fn depth(&self) -> usize {
        match self {
            TraceEvent::Enter { depth }
            | TraceEvent::Step { depth, .. }
            | TraceEvent::Backtrack { depth }
            | TraceEvent::Exit { depth, .. } => *depth,
        }
    }
}

fn show(t: &Term) -> String {
    format_term(t, &NoBindings)
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let indent = "  ".repeat(self.depth());
        match self {
            TraceEvent::Enter { .. } => write!(f, "{indent}---- PatIn | Conj | Disj"),
            TraceEvent::Step {
                pat_in, conj, disj, ..
            } => {
                let goals: Vec<_> = conj.iter().map(show).collect();
                write!(
                    f,
                    "{indent}{} | [{}] | alt({},{})",
                    show(pat_in),
                    goals.join(","),
                    show(&disj.pattern),
                    show(&disj.goal)
                )
            }
            TraceEvent::Backtrack { .. } => write!(f, "{indent}backtracking"),
            TraceEvent::Exit {
                pat_out, result, ..
            } => write!(
                f,
                "{indent}PatOut={}, Result={}",
                show(pat_out),
                show(result)
            ),
        }
    }
}

/// Renders a trace as text, one record per line.
pub fn format_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
