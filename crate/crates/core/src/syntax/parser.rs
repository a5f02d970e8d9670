use std::collections::HashMap;

use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::{ParseError, ParseErrorKind, SourceSpan};
use crate::model::{
    Attribute, Constraint, ConstraintKind, Decomposition, Feature, FeatureModel, GroupKind,
};

/// Parses a complete `.fm` model.
///
/// Syntax errors inside a feature are recovered at the next `;`, so one call
/// reports every independent error it can find.
pub fn parse(text: &str) -> Result<FeatureModel, Vec<ParseError>> {
    let tokens = tokenize(text).map_err(|e| vec![e])?;
    let mut p = Parser::new(tokens, text);
    let model = p.model();
    if p.errors.is_empty() {
        Ok(model)
    } else {
        Err(p.errors)
    }
}

/// Parses a decomposition clause body as rendered by
/// [`render_decomposition`](super::render_decomposition), e.g. `and(a, b)`.
pub fn parse_decomposition(text: &str) -> Result<Decomposition, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(tokens, text);
    let d = p.decomposition()?;
    p.expect_eof()?;
    Ok(d)
}

/// Parses a constraint clause body, e.g. `exclude(b)`.
pub fn parse_constraint(text: &str) -> Result<Constraint, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(tokens, text);
    let c = p.constraint()?;
    p.expect_eof()?;
    Ok(c)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
    errors: Vec<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

fn group_kind(kind: &TokenKind) -> Option<GroupKind> {
    match kind {
        TokenKind::Keyword(Keyword::And) => Some(GroupKind::And),
        TokenKind::Keyword(Keyword::Xor) => Some(GroupKind::Xor),
        TokenKind::Keyword(Keyword::Or) => Some(GroupKind::Or),
        _ => None,
    }
}

impl Parser {
    fn new(tokens: Vec<Token>, text: &str) -> Self {
        let line = text.matches('\n').count() + 1;
        let last_line = text.rsplit('\n').next().unwrap_or("");
        let column = last_line.chars().count() + 1;
        Parser {
            tokens,
            pos: 0,
            eof: SourceSpan::new(line, column, 0, text.len()),
            errors: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn span(&self) -> SourceSpan {
        self.tokens.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), |k| k.to_string());
        ParseError::unexpected(self.span(), expected, found)
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<SourceSpan> {
        if self.at_kw(kw) {
            Ok(self.bump().expect("peeked").span)
        } else {
            Err(self.error(&[&format!("`{}`", kw.as_str())]))
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<()> {
        if self.peek() == Some(&kind) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&kind.to_string()]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let t = self.bump().expect("peeked");
                match t.kind {
                    TokenKind::Ident(name) => Ok((name, t.span)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error(&["end of input"])),
        }
    }

    /// Skips past the next `;`, stopping early before `end`, `feature`, or end of input.
    fn sync(&mut self) {
        while let Some(kind) = self.peek() {
            match kind {
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::Keyword(Keyword::End) | TokenKind::Keyword(Keyword::Feature) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Like [`sync`](Self::sync) but always consumes the current token first.
    fn sync_forced(&mut self) {
        if self.peek() == Some(&TokenKind::Semi) {
            self.bump();
            return;
        }
        self.bump();
        self.sync();
    }

    fn recover<T>(&mut self, result: PResult<T>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(e);
                self.sync();
                None
            }
        }
    }

    fn model(&mut self) -> FeatureModel {
        let header = self.header();
        let header_name = self.recover(header);

        let mut features = Vec::new();
        let mut spans = HashMap::new();
        loop {
            match self.peek() {
                Some(TokenKind::Keyword(Keyword::Feature)) => {
                    if let Some((feature, span)) = self.feature() {
                        spans.entry(feature.name.clone()).or_insert(span);
                        features.push(feature);
                    }
                }
                Some(TokenKind::Keyword(Keyword::End)) => break,
                None => {
                    self.errors.push(self.error(&["`feature`", "`end`"]));
                    return FeatureModel::new(header_name.unwrap_or_default(), features);
                }
                Some(_) => {
                    self.errors.push(self.error(&["`feature`", "`end`"]));
                    self.sync_forced();
                }
            }
        }

        let footer = self.footer();
        if let Some((footer_name, span)) = self.recover(footer) {
            if let Some(header) = &header_name {
                if *header != footer_name {
                    self.errors.push(ParseError {
                        span,
                        expected: vec![header.clone()],
                        found: footer_name.clone(),
                        kind: ParseErrorKind::EndNameMismatch {
                            header: header.clone(),
                            footer: footer_name,
                        },
                    });
                }
            }
        }
        if let Err(e) = self.expect_eof() {
            self.errors.push(e);
        }
        FeatureModel::new(header_name.unwrap_or_default(), features).with_spans(spans)
    }

    fn header(&mut self) -> PResult<String> {
        self.expect_kw(Keyword::Feature)?;
        self.expect_kw(Keyword::Model)?;
        let (name, _) = self.ident("model name")?;
        self.expect(TokenKind::Semi)?;
        Ok(name)
    }

    fn footer(&mut self) -> PResult<(String, SourceSpan)> {
        self.expect_kw(Keyword::End)?;
        self.expect_kw(Keyword::Fm)?;
        let name = self.ident("model name")?;
        self.expect(TokenKind::Semi)?;
        Ok(name)
    }

    fn feature(&mut self) -> Option<(Feature, SourceSpan)> {
        self.bump();
        let head = self.ident("feature name").and_then(|name| {
            self.expect(TokenKind::Semi)?;
            Ok(name)
        });
        let head = self.recover(head);
        let mut feature = Feature::new(head.as_ref().map_or("", |(n, _)| n.as_str()));

        let mut seen_attributes = false;
        let mut seen_relations = false;
        let mut clauses_since_relations = 0usize;
        loop {
            match self.peek() {
                Some(TokenKind::Keyword(Keyword::Attributes)) => {
                    if seen_attributes || seen_relations {
                        let expected: &[&str] = if seen_relations {
                            &["`decomposition`", "`constraints`", "`included`", "`end`"]
                        } else {
                            &["`relations`", "`end`"]
                        };
                        self.errors.push(self.error(expected));
                    }
                    seen_attributes = true;
                    self.bump();
                    let attrs = self.attributes();
                    if let Some(attrs) = self.recover(attrs) {
                        feature.attributes.extend(attrs);
                    }
                }
                Some(TokenKind::Keyword(Keyword::Relations)) => {
                    if seen_relations {
                        self.errors.push(self.error(&[
                            "`decomposition`",
                            "`constraints`",
                            "`included`",
                            "`end`",
                        ]));
                    }
                    self.bump();
                    seen_relations = true;
                    clauses_since_relations = 0;
                }
                Some(TokenKind::Keyword(
                    kw @ (Keyword::Decomposition | Keyword::Constraints | Keyword::Included),
                )) => {
                    let kw = *kw;
                    if !seen_relations {
                        self.errors.push(self.error(&["`relations`"]));
                        seen_relations = true;
                    }
                    clauses_since_relations += 1;
                    let clause = self.clause(kw, &mut feature);
                    self.recover(clause);
                }
                Some(TokenKind::Keyword(Keyword::End)) => {
                    if seen_relations && clauses_since_relations == 0 {
                        self.errors.push(self.error(&[
                            "`decomposition`",
                            "`constraints`",
                            "`included`",
                        ]));
                    }
                    if self.peek_at(1) == Some(&TokenKind::Keyword(Keyword::Fm)) {
                        self.errors.push(ParseError::unexpected(
                            self.span(),
                            &["`end feature`"],
                            "`end fm`",
                        ));
                        break;
                    }
                    self.bump();
                    let tail = self
                        .expect_kw(Keyword::Feature)
                        .and_then(|_| self.expect(TokenKind::Semi));
                    self.recover(tail);
                    break;
                }
                Some(TokenKind::Keyword(Keyword::Feature)) | None => {
                    self.errors.push(self.error(&["`end`"]));
                    break;
                }
                Some(_) => {
                    self.errors.push(self.error(&[
                        "`attributes`",
                        "`relations`",
                        "`decomposition`",
                        "`constraints`",
                        "`included`",
                        "`end`",
                    ]));
                    self.sync_forced();
                }
            }
        }
        head.map(|(_, span)| (feature, span))
    }

    fn attributes(&mut self) -> PResult<Vec<Attribute>> {
        let mut attrs = Vec::new();
        'attrs: loop {
            let key = self.word("attribute name")?;
            self.expect(TokenKind::Colon)?;
            let mut values = vec![self.value()?];
            while self.peek() == Some(&TokenKind::Comma) {
                let starts_attr = matches!(
                    self.peek_at(1),
                    Some(TokenKind::Ident(_) | TokenKind::Keyword(_))
                ) && self.peek_at(2) == Some(&TokenKind::Colon);
                self.bump();
                if starts_attr {
                    attrs.push(Attribute { key, values });
                    continue 'attrs;
                }
                values.push(self.value()?);
            }
            attrs.push(Attribute { key, values });
            break;
        }
        self.expect(TokenKind::Semi)?;
        Ok(attrs)
    }

    /// An identifier or a keyword, in its source spelling.
    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(_) | TokenKind::Keyword(_)) => {
                Ok(self.bump().expect("peeked").text)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn value(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Str(_)) => match self.bump().expect("peeked").kind {
                TokenKind::Str(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.word("attribute value"),
        }
    }

    fn clause(&mut self, kw: Keyword, feature: &mut Feature) -> PResult<()> {
        self.bump();
        match kw {
            Keyword::Decomposition => {
                let d = self.decomposition()?;
                feature.decompositions.push(d);
            }
            Keyword::Constraints => {
                let c = self.constraint()?;
                feature.constraints.push(c);
            }
            _ => {
                self.expect_kw(Keyword::In)?;
                let names = self.ident_list("container feature name")?;
                feature.included_in.extend(names);
            }
        }
        self.expect(TokenKind::Semi)
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<String>> {
        let mut names = vec![self.ident(what)?.0];
        while self.peek() == Some(&TokenKind::Comma) {
            self.bump();
            names.push(self.ident(what)?.0);
        }
        Ok(names)
    }

    fn decomposition(&mut self) -> PResult<Decomposition> {
        let Some(kind) = self.peek().cloned() else {
            return Err(self.error(&[
                "`and`",
                "`xor`",
                "`or`",
                "`select`",
                "`default`",
                "feature name",
            ]));
        };
        if let Some(group) = group_kind(&kind) {
            self.bump();
            self.expect(TokenKind::LParen)?;
            let children = self.ident_list("child feature name")?;
            self.expect(TokenKind::RParen)?;
            return Ok(Decomposition::Group {
                kind: group,
                children,
            });
        }
        match kind {
            TokenKind::Keyword(Keyword::Select) => {
                self.bump();
                let (base, _) = self.ident("selected feature name")?;
                self.expect(TokenKind::LParen)?;
                let mut variations = vec![self.variation()?];
                while self.peek() == Some(&TokenKind::Comma) {
                    self.bump();
                    variations.push(self.variation()?);
                }
                self.expect(TokenKind::RParen)?;
                Ok(Decomposition::Select { base, variations })
            }
            TokenKind::Keyword(Keyword::Default) => {
                self.bump();
                let (target, _) = self.ident("default feature name")?;
                Ok(Decomposition::Default { target })
            }
            TokenKind::Ident(_) => self.infix_group(),
            _ => Err(self.error(&[
                "`and`",
                "`xor`",
                "`or`",
                "`select`",
                "`default`",
                "feature name",
            ])),
        }
    }

    /// `a and b and c`, normalized to the prefix form. Operators may not be mixed.
    fn infix_group(&mut self) -> PResult<Decomposition> {
        let (first, _) = self.ident("feature name")?;
        let Some(op) = self.peek().and_then(group_kind) else {
            return Err(self.error(&["`and`", "`xor`", "`or`"]));
        };
        let mut children = vec![first];
        while let Some(next) = self.peek().and_then(group_kind) {
            if next != op {
                return Err(self.error(&[&format!("`{}`", op.keyword())]));
            }
            self.bump();
            children.push(self.ident("feature name")?.0);
        }
        Ok(Decomposition::Group { kind: op, children })
    }

    fn variation(&mut self) -> PResult<String> {
        self.expect_kw(Keyword::Variation)?;
        self.expect(TokenKind::Eq)?;
        Ok(self.ident("variation feature name")?.0)
    }

    /// `imply(x)`; the parentheses are optional.
    fn constraint(&mut self) -> PResult<Constraint> {
        let kind = match self.peek() {
            Some(TokenKind::Keyword(Keyword::Imply)) => ConstraintKind::Imply,
            Some(TokenKind::Keyword(Keyword::Exclude)) => ConstraintKind::Exclude,
            Some(TokenKind::Keyword(Keyword::Reject)) => ConstraintKind::Reject,
            _ => return Err(self.error(&["`imply`", "`exclude`", "`reject`"])),
        };
        self.bump();
        let parenthesized = self.peek() == Some(&TokenKind::LParen);
        if parenthesized {
            self.bump();
        }
        let (target, _) = self.ident("constraint target")?;
        if parenthesized {
            self.expect(TokenKind::RParen)?;
        }
        Ok(Constraint { kind, target })
    }
}
