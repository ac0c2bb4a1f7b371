use super::ReadError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    /// Unquoted name, symbol-char sequence or solo char (`!`, `;`).
    Atom(String),
    /// Quoted atom; never treated as an operator by the parser.
    QuotedAtom(String),
    Var(String),
    Int(i64),
    Float(f64),
    Punct(char),
    /// `.` followed by layout or end of input.
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
    /// Whether whitespace or a comment precedes the token.
    pub layout_before: bool,
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, msg: impl Into<String>) -> ReadError {
        ReadError {
            line,
            col,
            message: msg.into(),
        }
    }

    /// Skips whitespace and comments; reports whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, ReadError> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    skipped = true;
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    skipped = true;
                }
                Some('/') if self.peek2() == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    let mut prev = ' ';
                    loop {
                        match self.bump() {
                            Some('/') if prev == '*' => break,
                            Some(c) => prev = c,
                            None => {
                                return Err(self.error(line, col, "unterminated block comment"))
                            }
                        }
                    }
                    skipped = true;
                }
                _ => return Ok(skipped),
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn number(&mut self, line: usize, col: usize) -> Result<TokenKind, ReadError> {
        let mut text = self.take_while(|c| c.is_ascii_digit());
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push('.');
            self.bump();
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let mut look = self.chars.clone();
            look.next();
            let mut sign = None;
            let mut next = look.next().map(|(_, c)| c);
            if matches!(next, Some('+' | '-')) {
                sign = next;
                next = look.next().map(|(_, c)| c);
            }
            if next.is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                self.bump();
                text.push('e');
                if let Some(s) = sign {
                    self.bump();
                    text.push(s);
                }
                text.push_str(&self.take_while(|c| c.is_ascii_digit()));
            }
        }
        if is_float {
            text.parse::<f64>()
                .map(TokenKind::Float)
                .map_err(|e| self.error(line, col, format!("bad float {text}: {e}")))
        } else {
            text.parse::<i64>()
                .map(TokenKind::Int)
                .map_err(|_| self.error(line, col, format!("integer {text} out of range")))
        }
    }

    fn quoted(&mut self, line: usize, col: usize) -> Result<String, ReadError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, col, "unterminated quoted atom")),
                Some('\'') => {
                    if self.peek() == Some('\'') {
                        self.bump();
                        s.push('\'');
                    } else {
                        return Ok(s);
                    }
                }
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('\\') => s.push('\\'),
                    Some('\'') => s.push('\''),
                    Some('"') => s.push('"'),
                    Some('\n') => {}
                    Some(c) => {
                        return Err(self.error(
                            self.line,
                            self.col,
                            format!("unknown escape \\{c}"),
                        ))
                    }
                    None => return Err(self.error(line, col, "unterminated quoted atom")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ReadError> {
        let layout_before = self.skip_layout()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let kind = if c.is_ascii_digit() {
            self.number(line, col)?
        } else if c == '_' || c.is_uppercase() {
            TokenKind::Var(self.take_while(is_alnum))
        } else if c.is_alphabetic() {
            TokenKind::Atom(self.take_while(is_alnum))
        } else if c == '\'' {
            TokenKind::QuotedAtom(self.quoted(line, col)?)
        } else if c == '"' {
            return Err(self.error(line, col, "double-quoted strings are not supported"));
        } else if c == '.' && self.peek2().is_none_or(|n| n.is_whitespace() || n == '%') {
            self.bump();
            TokenKind::End
        } else if is_symbol_char(c) {
            TokenKind::Atom(self.take_while(is_symbol_char))
        } else if c == '!' || c == ';' {
            self.bump();
            TokenKind::Atom(c.to_string())
        } else if "()[]{},|".contains(c) {
            self.bump();
            TokenKind::Punct(c)
        } else {
            return Err(self.error(line, col, format!("unexpected character {c:?}")));
        };
        Ok(Some(Token {
            kind,
            line,
            col,
            layout_before,
        }))
    }
}

/// Splits text into tokens.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ReadError> {
    let mut lx = Lexer {
        chars: src.char_indices().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    Ok(out)
}
