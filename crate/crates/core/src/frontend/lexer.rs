use std::fmt;

use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Number,
    Keyword,
    Operator,
    Punctuation,
    Tilde,
    Comment,
    Newline,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Identifier => "identifier",
            TokenKind::Number => "number",
            TokenKind::Keyword => "keyword",
            TokenKind::Operator => "operator",
            TokenKind::Punctuation => "punctuation",
            TokenKind::Tilde => "tilde",
            TokenKind::Comment => "comment",
            TokenKind::Newline => "newline",
        };
        f.write_str(s)
    }
}

/// A lexeme with its 1-based source coordinates and byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

pub const KEYWORDS: &[&str] = &["function", "if", "elseif", "else", "end", "for", "while"];

const TWO_CHAR_OPS: &[&str] = &["./", ".*", ">=", "<=", "=="];

/// Splits M-subset source into tokens. Whitespace other than newlines is
/// dropped; it can be recovered from the byte offsets.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
        out: Vec::new(),
    };
    lexer.run()?;
    Ok(lexer.out)
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    out: Vec<Token>,
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> char {
        let c = self.peek().expect("bump past end of input");
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: usize, col: usize) {
        self.out.push(Token {
            kind,
            lexeme: self.src[start..self.pos].to_string(),
            line,
            col,
            offset: start,
        });
    }

    fn run(&mut self) -> Result<(), FrontendError> {
        while let Some(c) = self.peek() {
            let (start, line, col) = (self.pos, self.line, self.col);
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    self.push(TokenKind::Newline, start, line, col);
                }
                '%' => {
                    while matches!(self.peek(), Some(c) if c != '\n') {
                        self.bump();
                    }
                    self.push(TokenKind::Comment, start, line, col);
                }
                '~' => {
                    self.bump();
                    self.push(TokenKind::Tilde, start, line, col);
                }
                c if c.is_ascii_digit() => self.number(start, line, col),
                '.' if matches!(self.peek_at(1), Some(d) if d.is_ascii_digit()) => {
                    self.number(start, line, col)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let word = &self.src[start..self.pos];
                    let kind = if KEYWORDS.contains(&word) {
                        TokenKind::Keyword
                    } else {
                        TokenKind::Identifier
                    };
                    self.push(kind, start, line, col);
                }
                '(' | ')' | '[' | ']' | ',' | ';' => {
                    self.bump();
                    self.push(TokenKind::Punctuation, start, line, col);
                }
                _ => {
                    let rest = &self.src[self.pos..];
                    if let Some(op) = TWO_CHAR_OPS.iter().find(|op| rest.starts_with(**op)) {
                        for _ in 0..op.len() {
                            self.bump();
                        }
                        self.push(TokenKind::Operator, start, line, col);
                    } else if "+-*/<>=:".contains(c) {
                        self.bump();
                        self.push(TokenKind::Operator, start, line, col);
                    } else {
                        return Err(FrontendError::Lex {
                            line,
                            col,
                            found: c,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    // digits[.digits] | digits. | .digits
    // A trailing `.` that begins `./` or `.*` belongs to the operator.
    fn number(&mut self, start: usize, line: usize, col: usize) {
        let mut seen_point = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.bump();
            } else if c == '.' && !seen_point {
                if matches!(self.peek_at(1), Some('/') | Some('*')) {
                    break;
                }
                seen_point = true;
                self.bump();
            } else {
                break;
            }
        }
        self.push(TokenKind::Number, start, line, col);
    }
}
