//! The `.fm` text format: lexer, recursive-descent parser, and canonical printer.
//!
//! ```text
//! model   := "feature" "model" IDENT ";" feature* "end" "fm" IDENT ";"
//! feature := "feature" IDENT ";" ["attributes" attr ("," attr)* ";"]
//!            ["relations" clause+] "end" "feature" ";"
//! attr    := WORD ":" value ("," value)*
//! value   := WORD | STRING
//! clause  := decomp ";" | constr ";" | incl ";"
//! decomp  := "decomposition" ( ("and"|"xor"|"or") "(" IDENT ("," IDENT)* ")"
//!          | IDENT (("and"|"xor"|"or") IDENT)+
//!          | "select" IDENT "(" "variation" "=" IDENT ("," "variation" "=" IDENT)* ")"
//!          | "default" IDENT )
//! constr  := "constraints" ("imply"|"exclude"|"reject") "(" IDENT ")"
//! incl    := "included" "in" IDENT ("," IDENT)*
//! ```
//!
//! `WORD` is an identifier or a keyword taken verbatim, so attribute keys
//! such as `variation` need no quoting. Keywords are case-insensitive;
//! identifiers are case-sensitive. `//` starts a comment that runs to the end
//! of the line.

#![allow(clippy::result_large_err)]

mod lexer;
mod parser;
mod printer;

use std::fmt;

pub(crate) use lexer::is_word;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse, parse_constraint, parse_decomposition};
pub use printer::{is_plain_identifier, print_canonical, render_constraint, render_decomposition};

/// A location in source text. Lines and columns are 1-based; columns count characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize, offset: usize) -> Self {
        SourceSpan {
            line,
            column,
            length,
            offset,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// The token at `span` is not one of `expected`.
    Unexpected,
    /// A character that starts no token.
    InvalidCharacter,
    UnterminatedString,
    InvalidEscape,
    /// `end fm N;` does not repeat the header name.
    EndNameMismatch {
        header: String,
        footer: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn unexpected(
        span: SourceSpan,
        expected: &[&str],
        found: impl Into<String>,
    ) -> Self {
        ParseError {
            span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
            kind: ParseErrorKind::Unexpected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::EndNameMismatch { header, footer } => {
                write!(f, "end name {footer} does not match {header}")
            }
            ParseErrorKind::InvalidCharacter => {
                write!(f, "unexpected character {}", self.found)?;
                if self
                    .found
                    .chars()
                    .nth(1)
                    .is_some_and(|c| c.is_ascii_digit())
                {
                    f.write_str("; identifiers must start with a letter")?;
                }
                Ok(())
            }
            ParseErrorKind::UnterminatedString => f.write_str("unterminated string literal"),
            ParseErrorKind::InvalidEscape => write!(f, "invalid escape sequence {}", self.found),
            ParseErrorKind::Unexpected => {
                f.write_str("expected ")?;
                match self.expected.as_slice() {
                    [] => f.write_str("nothing")?,
                    [one] => f.write_str(one)?,
                    [init @ .., last] => write!(f, "{} or {}", init.join(", "), last)?,
                }
                write!(f, ", found {}", self.found)
            }
        }
    }
}

impl std::error::Error for ParseError {}
