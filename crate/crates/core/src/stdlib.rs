//! Object-language libraries shipped with the engine.
//!
//! | name | provides |
//! |------|----------|
//! | `prelude` | `member/2`, `append/3`, `length/2`, `toplevel/1`, `solutions/1` |
//! | `findall` | `findall/3` |
//! | `cut` | `cut/0`, `scope/1` |
//! | `bb` | `bound/1`, `bb/4` |
//! | `nn` | `nn/3`, `run_nn/3` |
//! | `prism` | `msw/2`, `prob/1`, `prob/2` |
//! | `problog` | `fact/1`, `problog/1`, `problog/2` |
//! | `not` | `not/1` |
//! | `engines` | `engines/1`, `new_engine/3`, `get/2`, `return/1` |
//! | `nd_reset` | `nd_reset/3` |

use thiserror::Error;

use crate::database::{Database, LoadError};
use crate::reader::{parse_program_named, ReadError};

#[derive(Debug, Clone, Copy)]
pub struct Library {
    pub name: &'static str,
    pub source: &'static str,
    /// Libraries that must be loaded first.
    pub requires: &'static [&'static str],
    /// Predicate indicators defined by this library.
    pub provides: &'static [&'static str],
}

pub const LIBRARIES: &[Library] = &[
    Library {
        name: "prelude",
        source: include_str!("../lib/prelude.pl"),
        requires: &[],
        provides: &[
            "member/2",
            "append/3",
            "length/2",
            "toplevel/1",
            "solutions/1",
        ],
    },
    Library {
        name: "findall",
        source: include_str!("../lib/findall.pl"),
        requires: &[],
        provides: &["findall/3"],
    },
    Library {
        name: "cut",
        source: include_str!("../lib/cut.pl"),
        requires: &[],
        provides: &["cut/0", "scope/1"],
    },
    Library {
        name: "bb",
        source: include_str!("../lib/bb.pl"),
        requires: &[],
        provides: &["bound/1", "bb/4"],
    },
    Library {
        name: "nn",
        source: include_str!("../lib/nn.pl"),
        requires: &["prelude", "bb"],
        provides: &["nn/3", "branch/6", "run_nn/3"],
    },
    Library {
        name: "prism",
        source: include_str!("../lib/prism.pl"),
        requires: &[],
        provides: &["msw/2", "prob/1", "prob/2"],
    },
    Library {
        name: "problog",
        source: include_str!("../lib/problog.pl"),
        requires: &["prelude", "not", "prism"],
        provides: &["fact/1", "problog/1", "problog/2"],
    },
    Library {
        name: "not",
        source: include_str!("../lib/not.pl"),
        requires: &[],
        provides: &["not/1"],
    },
    Library {
        name: "engines",
        source: include_str!("../lib/engines.pl"),
        requires: &["prelude"],
        provides: &["engines/1", "new_engine/3", "get/2", "return/1"],
    },
    Library {
        name: "nd_reset",
        source: include_str!("../lib/nd_reset.pl"),
        requires: &[],
        provides: &["nd_reset/3"],
    },
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StdlibError {
    #[error("unknown library `{0}`")]
    Unknown(String),
    #[error("library {lib}: {err}")]
    Read { lib: &'static str, err: ReadError },
    #[error(transparent)]
    Load(#[from] LoadError),
}

pub fn library(name: &str) -> Option<&'static Library> {
    LIBRARIES.iter().find(|l| l.name == name)
}

/// Expands `names` (and `all`) into a load order with dependencies first
/// and no duplicates.
pub fn resolve(names: &[&str]) -> Result<Vec<&'static Library>, StdlibError> {
    fn visit(lib: &'static Library, out: &mut Vec<&'static Library>) {
        if out.iter().any(|l| l.name == lib.name) {
            return;
        }
        for dep in lib.requires {
            visit(library(dep).expect("dependencies are registered"), out);
        }
        out.push(lib);
    }
    let mut out = Vec::new();
    for &name in names {
        if name == "all" {
            LIBRARIES.iter().for_each(|l| visit(l, &mut out));
            continue;
        }
        let lib = library(name).ok_or_else(|| StdlibError::Unknown(name.to_string()))?;
        visit(lib, &mut out);
    }
    Ok(out)
}

/// Loads the named libraries and their dependencies into `db`.
pub fn load(db: &mut Database, names: &[&str]) -> Result<(), StdlibError> {
    for lib in resolve(names)? {
        let file = format!("lib/{}.pl", lib.name);
        let clauses = parse_program_named(lib.source, Some(&file))
            .map_err(|err| StdlibError::Read { lib: lib.name, err })?;
        db.consult(clauses)?;
    }
    Ok(())
}
