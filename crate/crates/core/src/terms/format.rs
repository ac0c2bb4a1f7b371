use super::{deref, Bindings, NoBindings, Term};
use crate::reader::OpTable;

/// Prints terms in operator notation with minimal parentheses.
///
/// `quoted` selects `writeq`-style output that reads back as the same
/// term; without it atoms are printed verbatim, as `write/1` does.
pub struct TermFormatter<'a, B: Bindings + ?Sized> {
    bindings: &'a B,
    ops: &'static OpTable,
    quoted: bool,
}

/// Canonical quoted text of `t`, printed as an argument would be (operator
/// terms above priority 999 are parenthesized).
pub fn format_term<B: Bindings + ?Sized>(t: &Term, bindings: &B) -> String {
    TermFormatter::new(bindings, true).format(t, 999)
}

/// Shortest text that reads back as the same float, always with a fraction
/// or exponent so it is not mistaken for an integer.
pub fn format_float(f: f64) -> String {
    if f.is_nan() {
        return "nan".into();
    }
    if f.is_infinite() {
        return if f > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let abs = f.abs();
    let s = if abs != 0.0 && !(1e-4..1e15).contains(&abs) {
        format!("{f:e}")
    } else {
        format!("{f}")
    };
    if s.contains('.') {
        return s;
    }
    match s.find('e') {
        Some(i) => format!("{}.0{}", &s[..i], &s[i..]),
        None => format!("{s}.0"),
    }
}

fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn atom_needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if first.is_lowercase() {
        return !name.chars().all(is_alnum);
    }
    if matches!(name, "[]" | "!" | ";" | "{}") {
        return false;
    }
    if name.chars().all(is_symbol_char) {
        // A lone "." would read as an end token.
        return name == ".";
    }
    true
}

fn quote_atom(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('\'');
    for c in name.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('\'');
    out
}

impl<'a, B: Bindings + ?Sized> TermFormatter<'a, B> {
    pub fn new(bindings: &'a B, quoted: bool) -> Self {
        TermFormatter {
            bindings,
            ops: OpTable::standard(),
            quoted,
        }
    }

    fn atom_text(&self, name: &str) -> String {
        if self.quoted && atom_needs_quotes(name) {
            quote_atom(name)
        } else {
            name.to_string()
        }
    }

    /// Formats `t` in a context accepting operators up to `max_priority`.
    pub fn format(&self, t: &Term, max_priority: u16) -> String {
        let mut out = String::new();
        self.write(t, max_priority, &mut out);
        out
    }

    /// Operator atoms are bracketed as operands so `-(-, X)` and `-(-(X))`
    /// print differently.
    fn format_operand(&self, t: &Term, max_priority: u16) -> String {
        match deref(t, self.bindings) {
            Term::Atom(a) if &*a != "," && self.ops.is_op(&a) => {
                format!("({})", self.atom_text(&a))
            }
            t => self.format(&t, max_priority),
        }
    }

    fn write(&self, t: &Term, max_priority: u16, out: &mut String) {
        let t = deref(t, self.bindings);
        match &t {
            Term::Var(v) => out.push_str(&v.to_string()),
            Term::Int(i) => out.push_str(&i.to_string()),
            Term::Float(f) => out.push_str(&format_float(*f)),
            Term::Atom(a) => {
                let text = self.atom_text(a);
                if &**a != "," && self.ops.is_op(a) && self.ops.max_priority(a) > max_priority {
                    out.push('(');
                    out.push_str(&text);
                    out.push(')');
                } else {
                    out.push_str(&text);
                }
            }
            Term::Compound(c) => {
                let name = c.name();
                let args = c.args();
                if name == "." && args.len() == 2 {
                    self.write_list(&t, out);
                    return;
                }
                if args.len() == 2 {
                    if let Some(def) = self.ops.infix(name) {
                        let (lp, rp) = def.arg_priorities();
                        let left = self.format_operand(&args[0], lp);
                        let right = self.format_operand(&args[1], rp);
                        let open = def.priority > max_priority;
                        if open {
                            out.push('(');
                        }
                        self.join_infix(name, &left, &right, out);
                        if open {
                            out.push(')');
                        }
                        return;
                    }
                }
                if args.len() == 1 {
                    if let Some(def) = self.ops.prefix(name) {
                        let arg = deref(&args[0], self.bindings);
                        // `-(1)` must not read back as the literal -1.
                        if !arg.is_number() {
                            let (_, ap) = def.arg_priorities();
                            let inner = self.format_operand(&arg, ap);
                            let open = def.priority > max_priority;
                            if open {
                                out.push('(');
                            }
                            out.push_str(&self.atom_text(name));
                            let glue = inner.starts_with(is_symbol_char)
                                || inner.starts_with('(')
                                || name.chars().all(is_alnum);
                            if glue {
                                out.push(' ');
                            }
                            out.push_str(&inner);
                            if open {
                                out.push(')');
                            }
                            return;
                        }
                    }
                }
                out.push_str(&self.atom_text(name));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write(a, 999, out);
                }
                out.push(')');
            }
        }
    }

    fn join_infix(&self, name: &str, left: &str, right: &str, out: &mut String) {
        out.push_str(left);
        if name == "," {
            out.push(',');
            out.push_str(right);
            return;
        }
        let alpha = name.chars().all(is_alnum);
        let space_before = alpha || left.ends_with(is_symbol_char);
        let space_after = alpha || right.starts_with(is_symbol_char);
        if space_before {
            out.push(' ');
        }
        out.push_str(&self.atom_text(name));
        if space_after {
            out.push(' ');
        }
        out.push_str(right);
    }

    fn write_list(&self, t: &Term, out: &mut String) {
        out.push('[');
        let mut cur = t.clone();
        let mut first = true;
        loop {
            match deref(&cur, self.bindings) {
                Term::Compound(c) if c.name() == "." && c.arity() == 2 => {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    self.write(&c.args()[0], 999, out);
                    cur = c.args()[1].clone();
                }
                Term::Atom(a) if &*a == "[]" => break,
                tail => {
                    out.push('|');
                    self.write(&tail, 999, out);
                    break;
                }
            }
        }
        out.push(']');
    }
}

impl TermFormatter<'static, NoBindings> {
    pub fn plain() -> Self {
        TermFormatter::new(&NoBindings, true)
    }
}
