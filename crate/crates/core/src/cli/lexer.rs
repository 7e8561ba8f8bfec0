use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Int(s) => write!(f, "`{}`", s),
            Tok::Sym(c) => write!(f, "`{}`", c),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// No whitespace separates this token from the previous one.
    pub glued: bool,
}

/// A syntax or validation error at a 1-based position.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, message: message.into(), expected: Vec::new() }
    }

    pub fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

const SYMBOLS: &str = "+-*/^()[]{},=;:";

/// Tokenizes one line. `col0` is the 1-based column of `src`'s first char.
pub fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut glued = false;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            glued = false;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(chars[start..i].iter().collect())
        } else if SYMBOLS.contains(c) {
            i += 1;
            Tok::Sym(c)
        } else if c == '−' {
            i += 1;
            Tok::Sym('-')
        } else {
            return Err(Diagnostic::new(line, col, format!("unexpected character `{}`", c)));
        };
        out.push(Token { tok, line, col, glued: glued && !out.is_empty() });
        glued = true;
    }
    out.push(Token { tok: Tok::End, line, col: col0 + chars.len(), glued: false });
    Ok(out)
}
