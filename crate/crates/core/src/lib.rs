//! A logic-programming engine for a Prolog subset with disjunctive
//! delimited control.
//!
//! `reset(Pattern, Goal, Result)` runs `Goal` in isolation and reports one
//! of three outcomes: `failure`, `success(PatternCopy, DisjCont)` or
//! `shift(Ball, ConjCont, PatternCopy, DisjCont)`. The disjunctive
//! continuation `DisjCont` bundles every untried alternative of `Goal` as an
//! ordinary goal, renamed apart from the answer just produced. The engine
//! manages its own backtracking through these reified continuations, so each
//! evaluation is deterministic and no trail is needed.

pub mod cli;
pub mod database;
pub mod engine;
pub mod oracle;
pub mod reader;
pub mod stdlib;
pub mod terms;
pub mod toplevel;
