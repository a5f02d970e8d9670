use std::fmt;

use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Feature,
    Model,
    End,
    Fm,
    Attributes,
    Relations,
    Decomposition,
    Constraints,
    Included,
    In,
    And,
    Xor,
    Or,
    Select,
    Default,
    Variation,
    Imply,
    Exclude,
    Reject,
}

impl Keyword {
    const ALL: [Keyword; 19] = [
        Keyword::Feature,
        Keyword::Model,
        Keyword::End,
        Keyword::Fm,
        Keyword::Attributes,
        Keyword::Relations,
        Keyword::Decomposition,
        Keyword::Constraints,
        Keyword::Included,
        Keyword::In,
        Keyword::And,
        Keyword::Xor,
        Keyword::Or,
        Keyword::Select,
        Keyword::Default,
        Keyword::Variation,
        Keyword::Imply,
        Keyword::Exclude,
        Keyword::Reject,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Feature => "feature",
            Keyword::Model => "model",
            Keyword::End => "end",
            Keyword::Fm => "fm",
            Keyword::Attributes => "attributes",
            Keyword::Relations => "relations",
            Keyword::Decomposition => "decomposition",
            Keyword::Constraints => "constraints",
            Keyword::Included => "included",
            Keyword::In => "in",
            Keyword::And => "and",
            Keyword::Xor => "xor",
            Keyword::Or => "or",
            Keyword::Select => "select",
            Keyword::Default => "default",
            Keyword::Variation => "variation",
            Keyword::Imply => "imply",
            Keyword::Exclude => "exclude",
            Keyword::Reject => "reject",
        }
    }

    /// Case-insensitive keyword lookup.
    pub fn lookup(word: &str) -> Option<Keyword> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Str(String),
    Semi,
    Comma,
    Colon,
    LParen,
    RParen,
    Eq,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(name) => write!(f, "identifier `{name}`"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Semi => f.write_str("`;`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Eq => f.write_str("`=`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
    /// Source spelling, as written.
    pub text: String,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_'
}

/// Whether `s` lexes as one word: an identifier or a keyword.
pub(crate) fn is_word(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue)
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        self.text[self.offset..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan::new(self.line, self.column, 0, self.offset)
    }
}

/// Splits `.fm` text into tokens. Stops at the first lexical error.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        text,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek_second() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let start = cur.here();
        let kind = match c {
            ';' | ',' | ':' | '(' | ')' | '=' => {
                cur.bump();
                match c {
                    ';' => TokenKind::Semi,
                    ',' => TokenKind::Comma,
                    ':' => TokenKind::Colon,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    _ => TokenKind::Eq,
                }
            }
            '"' => TokenKind::Str(lex_string(&mut cur, start)?),
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &text[start.offset..cur.offset];
                match Keyword::lookup(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                }
            }
            other => {
                return Err(ParseError {
                    span: SourceSpan { length: 1, ..start },
                    expected: vec!["keyword, identifier, string or punctuation".to_string()],
                    found: format!("{other:?}"),
                    kind: ParseErrorKind::InvalidCharacter,
                });
            }
        };
        let lexeme = &text[start.offset..cur.offset];
        tokens.push(Token {
            kind,
            span: SourceSpan {
                length: lexeme.chars().count(),
                ..start
            },
            text: lexeme.to_string(),
        });
    }
    Ok(tokens)
}

fn lex_string(cur: &mut Cursor<'_>, start: SourceSpan) -> Result<String, ParseError> {
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') | Some('\r') => {
                return Err(ParseError {
                    span: SourceSpan { length: 1, ..start },
                    expected: vec!["closing `\"`".to_string()],
                    found: "end of line".to_string(),
                    kind: ParseErrorKind::UnterminatedString,
                });
            }
            Some('"') => {
                cur.bump();
                return Ok(value);
            }
            Some('\\') => {
                let at = cur.here();
                cur.bump();
                let escaped = match cur.peek() {
                    Some('"') => '"',
                    Some('\\') => '\\',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('t') => '\t',
                    other => {
                        return Err(ParseError {
                            span: SourceSpan { length: 1, ..at },
                            expected: vec!["one of \\\" \\\\ \\n \\r \\t".to_string()],
                            found: match other {
                                Some(c) => format!("\\{c}"),
                                None => "end of input".to_string(),
                            },
                            kind: ParseErrorKind::InvalidEscape,
                        });
                    }
                };
                cur.bump();
                value.push(escaped);
            }
            Some(c) => {
                cur.bump();
                value.push(c);
            }
        }
    }
}
