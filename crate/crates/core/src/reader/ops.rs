use std::collections::HashMap;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fixity {
    Prefix,
    Infix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u16,
    pub assoc: Assoc,
}

impl OpDef {
    /// Maximum priorities of the (left, right) operands.
    pub fn arg_priorities(&self) -> (u16, u16) {
        let p = self.priority;
        match self.assoc {
            Assoc::Xfx => (p - 1, p - 1),
            Assoc::Xfy => (p - 1, p),
            Assoc::Yfx => (p, p - 1),
            Assoc::Fy => (0, p),
            Assoc::Fx => (0, p - 1),
        }
    }
}

/// Fixed operator table of the object language.
#[derive(Debug)]
pub struct OpTable {
    ops: HashMap<(String, Fixity), OpDef>,
}

const DEFAULT_OPS: &[(&str, Fixity, u16, Assoc)] = &[
    (":-", Fixity::Infix, 1200, Assoc::Xfx),
    (":-", Fixity::Prefix, 1200, Assoc::Fx),
    (";", Fixity::Infix, 1100, Assoc::Xfy),
    ("->", Fixity::Infix, 1050, Assoc::Xfy),
    (",", Fixity::Infix, 1000, Assoc::Xfy),
    ("=", Fixity::Infix, 700, Assoc::Xfx),
    ("\\=", Fixity::Infix, 700, Assoc::Xfx),
    ("==", Fixity::Infix, 700, Assoc::Xfx),
    ("\\==", Fixity::Infix, 700, Assoc::Xfx),
    ("is", Fixity::Infix, 700, Assoc::Xfx),
    ("<", Fixity::Infix, 700, Assoc::Xfx),
    (">", Fixity::Infix, 700, Assoc::Xfx),
    ("=<", Fixity::Infix, 700, Assoc::Xfx),
    (">=", Fixity::Infix, 700, Assoc::Xfx),
    ("@<", Fixity::Infix, 700, Assoc::Xfx),
    ("@>", Fixity::Infix, 700, Assoc::Xfx),
    ("@=<", Fixity::Infix, 700, Assoc::Xfx),
    ("@>=", Fixity::Infix, 700, Assoc::Xfx),
    ("+", Fixity::Infix, 500, Assoc::Yfx),
    ("-", Fixity::Infix, 500, Assoc::Yfx),
    ("*", Fixity::Infix, 400, Assoc::Yfx),
    ("/", Fixity::Infix, 400, Assoc::Yfx),
    ("-", Fixity::Prefix, 200, Assoc::Fy),
];

impl OpTable {
    pub fn standard() -> &'static OpTable {
        static TABLE: OnceLock<OpTable> = OnceLock::new();
        TABLE.get_or_init(|| OpTable {
            ops: DEFAULT_OPS
                .iter()
                .map(|&(name, fixity, priority, assoc)| {
                    ((name.to_string(), fixity), OpDef { priority, assoc })
                })
                .collect(),
        })
    }

    pub fn lookup(&self, name: &str, fixity: Fixity) -> Option<OpDef> {
        self.ops.get(&(name.to_string(), fixity)).copied()
    }

    pub fn infix(&self, name: &str) -> Option<OpDef> {
        self.lookup(name, Fixity::Infix)
    }

    pub fn prefix(&self, name: &str) -> Option<OpDef> {
        self.lookup(name, Fixity::Prefix)
    }

    pub fn is_op(&self, name: &str) -> bool {
        self.infix(name).is_some() || self.prefix(name).is_some()
    }

    /// Highest priority of any operator definition for `name`.
    pub fn max_priority(&self, name: &str) -> u16 {
        [self.infix(name), self.prefix(name)]
            .into_iter()
            .flatten()
            .map(|d| d.priority)
            .max()
            .unwrap_or(0)
    }
}
