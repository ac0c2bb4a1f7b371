use std::collections::HashMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::ops::OpTable;
use super::ReadError;
use crate::terms::Term;

/// A term read from text. Variables are numbered `0..num_vars` in order of
/// first occurrence; instantiate with [`crate::terms::BindingStore::instantiate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReadTerm {
    pub term: Term,
    pub num_vars: usize,
    /// Named variables (not `_`-prefixed) in first-occurrence order.
    pub var_names: Vec<(String, usize)>,
    pub line: usize,
}

pub(super) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    ops: &'static OpTable,
    vars: HashMap<String, usize>,
    names: Vec<(String, usize)>,
    num_vars: usize,
    eof_line: usize,
}

fn starts_term(t: &Token) -> bool {
    match &t.kind {
        TokenKind::Punct(c) => matches!(c, '(' | '[' | '{'),
        TokenKind::End => false,
        _ => true,
    }
}

impl<'a> Parser<'a> {
    pub(super) fn new(toks: &'a [Token]) -> Self {
        let eof_line = toks.last().map_or(1, |t| t.line);
        Parser {
            toks,
            pos: 0,
            ops: OpTable::standard(),
            vars: HashMap::new(),
            names: Vec::new(),
            num_vars: 0,
            eof_line,
        }
    }

    pub(super) fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn err_at(&self, tok: Option<&Token>, msg: impl Into<String>) -> ReadError {
        let (line, col) = tok.map_or((self.eof_line, 0), |t| (t.line, t.col));
        ReadError {
            line,
            col,
            message: msg.into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ReadError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Punct(p),
                ..
            }) if *p == c => Ok(()),
            other => Err(self.err_at(other, format!("expected `{c}`"))),
        }
    }

    /// Reads one clause or query up to its end token (or end of input when
    /// `allow_eof_end` is set).
    pub(super) fn read_term(&mut self, allow_eof_end: bool) -> Result<ReadTerm, ReadError> {
        self.vars.clear();
        self.names.clear();
        self.num_vars = 0;
        let line = self.peek().map_or(self.eof_line, |t| t.line);
        let term = self.parse(1200)?.0;
        match self.next() {
            Some(Token {
                kind: TokenKind::End,
                ..
            }) => {}
            None if allow_eof_end => {}
            other => return Err(self.err_at(other, "operator expected")),
        }
        Ok(ReadTerm {
            term,
            num_vars: self.num_vars,
            var_names: self.names.clone(),
            line,
        })
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            let id = self.num_vars;
            self.num_vars += 1;
            return Term::var(id);
        }
        if let Some(&id) = self.vars.get(name) {
            return Term::var(id);
        }
        let id = self.num_vars;
        self.num_vars += 1;
        self.vars.insert(name.to_string(), id);
        if !name.starts_with('_') {
            self.names.push((name.to_string(), id));
        }
        Term::var(id)
    }

    fn parse(&mut self, max: u16) -> Result<(Term, u16), ReadError> {
        let (mut left, mut left_pri) = self.parse_primary(max)?;
        while let Some(tok) = self.peek() {
            let name = match &tok.kind {
                TokenKind::Atom(a) => a.as_str(),
                TokenKind::Punct(',') => ",",
                TokenKind::Punct('|') => ";",
                _ => break,
            };
            let Some(def) = self.ops.infix(name) else {
                break;
            };
            let (lp, rp) = def.arg_priorities();
            if def.priority > max || left_pri > lp {
                break;
            }
            self.next();
            let (right, _) = self.parse(rp)?;
            left = Term::compound(name, vec![left, right]);
            left_pri = def.priority;
        }
        Ok((left, left_pri))
    }

    fn parse_arglist(&mut self) -> Result<Vec<Term>, ReadError> {
        let mut args = vec![self.parse(999)?.0];
        loop {
            match self.next() {
                Some(Token {
                    kind: TokenKind::Punct(','),
                    ..
                }) => args.push(self.parse(999)?.0),
                Some(Token {
                    kind: TokenKind::Punct(')'),
                    ..
                }) => return Ok(args),
                other => return Err(self.err_at(other, "expected `,` or `)` in arguments")),
            }
        }
    }

    fn parse_list(&mut self) -> Result<Term, ReadError> {
        let mut items = vec![self.parse(999)?.0];
        loop {
            match self.next() {
                Some(Token {
                    kind: TokenKind::Punct(','),
                    ..
                }) => items.push(self.parse(999)?.0),
                Some(Token {
                    kind: TokenKind::Punct('|'),
                    ..
                }) => {
                    let tail = self.parse(999)?.0;
                    self.expect_punct(']')?;
                    return Ok(Term::list_with_tail(items, tail));
                }
                Some(Token {
                    kind: TokenKind::Punct(']'),
                    ..
                }) => return Ok(Term::list(items)),
                other => return Err(self.err_at(other, "expected `,`, `|` or `]` in list")),
            }
        }
    }

    fn functional_follows(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::Punct('('),
                layout_before: false,
                ..
            })
        )
    }

    fn parse_primary(&mut self, max: u16) -> Result<(Term, u16), ReadError> {
        let tok = self.next();
        let Some(tok) = tok else {
            return Err(self.err_at(None, "unexpected end of input"));
        };
        match &tok.kind {
            TokenKind::Int(i) => Ok((Term::Int(*i), 0)),
            TokenKind::Float(f) => Ok((Term::Float(*f), 0)),
            TokenKind::Var(name) => Ok((self.variable(name), 0)),
            TokenKind::Punct('(') => {
                let (t, _) = self.parse(1200)?;
                self.expect_punct(')')?;
                Ok((t, 0))
            }
            TokenKind::Punct('[') => {
                if let Some(Token {
                    kind: TokenKind::Punct(']'),
                    ..
                }) = self.peek()
                {
                    self.next();
                    return self.atom_or_compound("[]".to_string(), false, max);
                }
                Ok((self.parse_list()?, 0))
            }
            TokenKind::Punct('{') => {
                self.expect_punct('}')?;
                self.atom_or_compound("{}".to_string(), false, max)
            }
            TokenKind::QuotedAtom(name) => self.atom_or_compound(name.clone(), false, max),
            TokenKind::Atom(name) => self.atom_or_compound(name.clone(), true, max),
            TokenKind::Punct(c) => Err(self.err_at(Some(tok), format!("unexpected `{c}`"))),
            TokenKind::End => Err(self.err_at(Some(tok), "unexpected end of clause")),
        }
    }

    fn atom_or_compound(
        &mut self,
        name: String,
        may_be_op: bool,
        max: u16,
    ) -> Result<(Term, u16), ReadError> {
        if self.functional_follows() {
            self.next();
            let args = self.parse_arglist()?;
            return Ok((Term::compound(&name, args), 0));
        }
        if !may_be_op {
            return Ok((Term::atom(&name), 0));
        }
        if name == "-" {
            if let Some(Token {
                kind: kind @ (TokenKind::Int(_) | TokenKind::Float(_)),
                layout_before: false,
                ..
            }) = self.peek()
            {
                self.next();
                let lit = match kind {
                    TokenKind::Int(i) => Term::Int(-i),
                    TokenKind::Float(f) => Term::Float(-f),
                    _ => unreachable!(),
                };
                return Ok((lit, 0));
            }
        }
        if let Some(def) = self.ops.prefix(&name) {
            // An infix-only atom ends the prefix operator unless it is
            // written in functional notation, as in `- +(A, B)`, or nothing
            // that could be its right operand follows, as in `f(:- +)`.
            let after = self.toks.get(self.pos + 1);
            let functional = match after {
                Some(
                    t @ Token {
                        kind: TokenKind::Punct('('),
                        ..
                    },
                ) => !t.layout_before,
                Some(t) => !starts_term(t),
                None => true,
            };
            let operand_follows = self.peek().is_some_and(|t| {
                starts_term(t)
                    && (functional
                        || !matches!(&t.kind, TokenKind::Atom(a)
                            if self.ops.infix(a).is_some() && self.ops.prefix(a).is_none()))
            });
            if operand_follows {
                let pri = def.priority.min(max);
                let (_, ap) = def.arg_priorities();
                let (arg, _) = self.parse(ap.min(pri))?;
                return Ok((Term::compound(&name, vec![arg]), pri));
            }
        }
        Ok((Term::atom(&name), 0))
    }
}

/// Parses a complete text into terms, one per end token.
pub(super) fn parse_all(src: &str) -> Result<Vec<ReadTerm>, ReadError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks);
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.read_term(false)?);
    }
    Ok(out)
}

/// Parses a single term; the final end token is optional.
pub(super) fn parse_single(src: &str) -> Result<ReadTerm, ReadError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks);
    let t = p.read_term(true)?;
    if !p.at_eof() {
        return Err(p.err_at(p.peek(), "unexpected text after term"));
    }
    Ok(t)
}
