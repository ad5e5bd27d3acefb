//! A small Turtle reader and writer for event knowledge bases.
//!
//! The dialect is the subset these knowledge bases actually use:
//! `@prefix` directives, IRIs in angle brackets, prefixed names, the
//! `a` shorthand, `;` predicate lists, `,` object lists, plain and
//! `^^`-typed string literals, and `.` terminators. Blank nodes,
//! collections, language tags, numeric shorthand, and multi-line
//! strings are out of scope and reported as unsupported rather than
//! silently misread.
//!
//! Design notes:
//! - `a` is canonicalized to the full rdf:type IRI at parse time (as is
//!   any prefixed name expanding to it) and rendered back as `a`, so
//!   the in-memory form has one spelling for the type predicate.
//! - The writer produces one canonical layout: prefixes sorted by name,
//!   subjects in first-appearance order, predicates grouped in
//!   first-appearance order with `,` object lists. Serializing a parse
//!   of its own output reproduces the bytes, which keeps stored graphs
//!   diffable.
//! - `parse_turtle` stops at the first error; `parse_turtle_recovering`
//!   skips to the next `.` and carries on, returning every error with
//!   its line number so callers can count defects instead of dying on
//!   the first bad statement.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

/// Full IRI that the `a` keyword abbreviates.
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
/// XSD double datatype IRI; lexical forms are validated on parse.
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
/// XSD namespace, for rendering typed literals.
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

// ===== Data model =====

/// An IRI, either written out or abbreviated through a declared prefix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Name {
    Iri(String),
    Prefixed { prefix: String, local: String },
}

impl Name {
    pub fn prefixed(prefix: &str, local: &str) -> Self {
        Name::Prefixed {
            prefix: prefix.to_string(),
            local: local.to_string(),
        }
    }

    pub fn rdf_type() -> Self {
        Name::Iri(RDF_TYPE.to_string())
    }

    /// The local part of a prefixed name, or the text after the last
    /// `#` or `/` of a full IRI. Used for property matching and ids.
    pub fn local_text(&self) -> &str {
        match self {
            Name::Prefixed { local, .. } => local,
            Name::Iri(iri) => iri
                .rsplit_once(['#', '/'])
                .map(|(_, tail)| tail)
                .unwrap_or(iri),
        }
    }

    /// Expand against a prefix table. Full IRIs pass through; prefixed
    /// names with an undeclared prefix return `None`.
    pub fn resolve(&self, prefixes: &BTreeMap<String, String>) -> Option<String> {
        match self {
            Name::Iri(iri) => Some(iri.clone()),
            Name::Prefixed { prefix, local } => {
                prefixes.get(prefix).map(|ns| format!("{}{}", ns, local))
            }
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Iri(iri) => write!(f, "<{}>", iri),
            Name::Prefixed { prefix, local } => {
                write!(f, "{}:{}", prefix, escape_local(local))
            }
        }
    }
}

/// A literal value: lexical form plus optional datatype.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Name>,
}

impl Literal {
    pub fn plain(lexical: &str) -> Self {
        Literal {
            lexical: lexical.to_string(),
            datatype: None,
        }
    }

    pub fn typed(lexical: &str, datatype: Name) -> Self {
        Literal {
            lexical: lexical.to_string(),
            datatype: Some(datatype),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_string(&self.lexical))?;
        if let Some(dt) = &self.datatype {
            write!(f, "^^{}", dt)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Object {
    Name(Name),
    Literal(Literal),
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Name(n) => write!(f, "{}", n),
            Object::Literal(l) => write!(f, "{}", l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Name,
    pub predicate: Name,
    pub object: Object,
}

/// A parsed Turtle document: declared prefixes and triples in
/// statement order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub prefixes: BTreeMap<String, String>,
    pub triples: Vec<Triple>,
}

impl Document {
    pub fn new() -> Self {
        Document::default()
    }

    /// Expand a name against this document's prefixes.
    pub fn resolve(&self, name: &Name) -> Option<String> {
        name.resolve(&self.prefixes)
    }
}

// ===== Errors =====

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ErrorKind {
    #[error("statement not terminated by '.'")]
    UnterminatedStatement,
    #[error("malformed IRI: {0}")]
    BadIri(String),
    #[error("malformed literal: {0}")]
    BadLiteral(String),
    #[error("undeclared prefix '{0}:'")]
    UnknownPrefix(String),
    #[error("unsupported syntax: {0}")]
    UnsupportedSyntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ErrorKind,
}

impl ParseError {
    fn new(line: usize, kind: ErrorKind) -> Self {
        ParseError { line, kind }
    }
}

// ===== Lexer =====

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixKw,
    Iri(String),
    Pname { prefix: String, local: String },
    A,
    Str(String),
    HatHat,
    Dot,
    Semi,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1 }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, kind: ErrorKind) -> ParseError {
        ParseError::new(self.line, kind)
    }

    /// Raw resynchronization: consume characters up to and including
    /// the next `.`. Used after a lexical error, where token structure
    /// can no longer be trusted.
    fn skip_past_dot_raw(&mut self) {
        while let Some(c) = self.bump() {
            if c == '.' {
                return;
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_trivia();
        let line = self.line;
        let Some(c) = self.peek_char() else {
            return Ok((Tok::Eof, line));
        };
        match c {
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphabetic());
                match word.as_str() {
                    "prefix" => Ok((Tok::PrefixKw, line)),
                    "base" => Err(self.err(ErrorKind::UnsupportedSyntax(
                        "@base directives".to_string(),
                    ))),
                    _ => Err(self.err(ErrorKind::UnsupportedSyntax(format!(
                        "language tag or directive '@{}'",
                        word
                    )))),
                }
            }
            '<' => {
                self.bump();
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c == '\n' => {
                            return Err(ParseError::new(
                                line,
                                ErrorKind::BadIri("newline before closing '>'".to_string()),
                            ))
                        }
                        Some(c) if c == ' ' || c == '<' || c == '"' => {
                            return Err(ParseError::new(
                                line,
                                ErrorKind::BadIri(format!("'{}' inside IRI", c)),
                            ))
                        }
                        Some(c) => iri.push(c),
                        None => {
                            return Err(ParseError::new(
                                line,
                                ErrorKind::BadIri("end of input before closing '>'".to_string()),
                            ))
                        }
                    }
                }
                Ok((Tok::Iri(iri), line))
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some(other) => {
                                return Err(ParseError::new(
                                    line,
                                    ErrorKind::BadLiteral(format!(
                                        "unknown string escape '\\{}'",
                                        other
                                    )),
                                ))
                            }
                            None => {
                                return Err(ParseError::new(
                                    line,
                                    ErrorKind::BadLiteral(
                                        "end of input inside string".to_string(),
                                    ),
                                ))
                            }
                        },
                        Some('\n') => {
                            return Err(ParseError::new(
                                line,
                                ErrorKind::BadLiteral(
                                    "newline inside single-quoted string".to_string(),
                                ),
                            ))
                        }
                        Some(c) => s.push(c),
                        None => {
                            return Err(ParseError::new(
                                line,
                                ErrorKind::BadLiteral("end of input inside string".to_string()),
                            ))
                        }
                    }
                }
                Ok((Tok::Str(s), line))
            }
            '^' => {
                self.bump();
                if self.peek_char() == Some('^') {
                    self.bump();
                    Ok((Tok::HatHat, line))
                } else {
                    Err(self.err(ErrorKind::UnsupportedSyntax("lone '^'".to_string())))
                }
            }
            '.' => {
                self.bump();
                Ok((Tok::Dot, line))
            }
            ';' => {
                self.bump();
                Ok((Tok::Semi, line))
            }
            ',' => {
                self.bump();
                Ok((Tok::Comma, line))
            }
            '_' if self.src[self.pos..].starts_with("_:") => {
                Err(self.err(ErrorKind::UnsupportedSyntax("blank nodes".to_string())))
            }
            '[' | ']' | '(' | ')' | '{' | '}' => {
                Err(self.err(ErrorKind::UnsupportedSyntax(format!("'{}'", c))))
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => Err(self.err(
                ErrorKind::UnsupportedSyntax("numeric literal shorthand".to_string()),
            )),
            c if c.is_alphanumeric() || c == '_' || c == ':' => {
                let prefix = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
                if self.peek_char() == Some(':') {
                    self.bump();
                    let local = self.take_local()?;
                    Ok((Tok::Pname { prefix, local }, line))
                } else if prefix == "a" {
                    Ok((Tok::A, line))
                } else {
                    Err(self.err(ErrorKind::UnsupportedSyntax(format!(
                        "bare word '{}'",
                        prefix
                    ))))
                }
            }
            other => Err(self.err(ErrorKind::UnsupportedSyntax(format!(
                "character '{}'",
                other
            )))),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_char() {
            if pred(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    /// Local part of a prefixed name. Accepts word characters plus `-`,
    /// interior `.` (a trailing dot belongs to the statement), and
    /// backslash escapes for punctuation such as `\#`.
    fn take_local(&mut self) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.peek_char() {
                Some(c) if c.is_alphanumeric() || c == '_' || c == '-' => {
                    s.push(c);
                    self.bump();
                }
                Some('\\') => {
                    self.bump();
                    match self.bump() {
                        Some(esc) => s.push(esc),
                        None => {
                            return Err(self.err(ErrorKind::UnsupportedSyntax(
                                "end of input after '\\'".to_string(),
                            )))
                        }
                    }
                }
                Some('.') => {
                    // Only part of the name if another name character
                    // follows; otherwise it terminates the statement.
                    let mut ahead = self.src[self.pos..].chars();
                    ahead.next();
                    match ahead.next() {
                        Some(c2)
                            if c2.is_alphanumeric()
                                || c2 == '_'
                                || c2 == '-'
                                || c2 == '\\'
                                || c2 == '.' =>
                        {
                            s.push('.');
                            self.bump();
                        }
                        _ => break,
                    }
                }
                _ => break,
            }
        }
        Ok(s)
    }
}

// ===== Parser =====

/// Parse strictly: the first error aborts.
pub fn parse_turtle(input: &str) -> Result<Document, ParseError> {
    let mut parser = Parser::new(input, false);
    parser.run();
    match parser.errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(parser.doc),
    }
}

/// Parse with recovery: each bad statement is recorded and skipped
/// (resynchronizing on the next `.`), and the well-formed rest of the
/// document is still returned.
pub fn parse_turtle_recovering(input: &str) -> (Document, Vec<ParseError>) {
    let mut parser = Parser::new(input, true);
    parser.run();
    (parser.doc, parser.errors)
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, usize)>,
    doc: Document,
    errors: Vec<ParseError>,
    recovering: bool,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str, recovering: bool) -> Self {
        Parser {
            lexer: Lexer::new(input),
            peeked: None,
            doc: Document::new(),
            errors: Vec::new(),
            recovering,
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn peek_tok(&mut self) -> Result<&(Tok, usize), ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn run(&mut self) {
        loop {
            match self.peek_tok() {
                Ok((Tok::Eof, _)) => return,
                Ok(_) => {}
                Err(e) => {
                    let e = e.clone();
                    self.peeked = None;
                    if !self.record(e) {
                        return;
                    }
                    continue;
                }
            }
            if let Err(e) = self.statement() {
                if !self.record(e) {
                    return;
                }
            }
        }
    }

    /// Record an error; returns false when strict mode should abort.
    fn record(&mut self, e: ParseError) -> bool {
        self.errors.push(e);
        if !self.recovering {
            return false;
        }
        self.resync();
        true
    }

    /// Skip to the next `.` at token level; if the input no longer
    /// lexes, fall back to a raw character skip.
    fn resync(&mut self) {
        self.peeked = None;
        loop {
            match self.lexer.next_token() {
                Ok((Tok::Dot, _)) | Ok((Tok::Eof, _)) => return,
                Ok(_) => continue,
                Err(_) => {
                    self.lexer.skip_past_dot_raw();
                    return;
                }
            }
        }
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (tok, line) = self.next_tok()?;
        match tok {
            Tok::PrefixKw => self.prefix_directive(line),
            Tok::Dot => Err(ParseError::new(
                line,
                ErrorKind::UnsupportedSyntax("empty statement".to_string()),
            )),
            other => {
                let subject = self.name_from(other, line)?;
                self.predicate_object_list(subject)
            }
        }
    }

    fn prefix_directive(&mut self, line: usize) -> Result<(), ParseError> {
        let (tok, l) = self.next_tok()?;
        let prefix = match tok {
            Tok::Pname { prefix, local } if local.is_empty() => prefix,
            Tok::Eof => return Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
            _ => {
                return Err(ParseError::new(
                    l,
                    ErrorKind::UnsupportedSyntax("expected 'name:' after @prefix".to_string()),
                ))
            }
        };
        let (tok, l) = self.next_tok()?;
        let iri = match tok {
            Tok::Iri(iri) => iri,
            Tok::Eof => return Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
            _ => {
                return Err(ParseError::new(
                    l,
                    ErrorKind::BadIri("expected '<iri>' in @prefix".to_string()),
                ))
            }
        };
        match self.next_tok()? {
            (Tok::Dot, _) => {
                self.doc.prefixes.insert(prefix, iri);
                Ok(())
            }
            (Tok::Eof, _) => Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
            (_, l) => Err(ParseError::new(
                l,
                ErrorKind::UnsupportedSyntax("expected '.' after @prefix".to_string()),
            )),
        }
    }

    /// Build a name from a token, checking prefix declarations and
    /// canonicalizing anything that expands to rdf:type.
    fn name_from(&mut self, tok: Tok, line: usize) -> Result<Name, ParseError> {
        let name = match tok {
            Tok::Iri(iri) => Name::Iri(iri),
            Tok::Pname { prefix, local } => {
                if !self.doc.prefixes.contains_key(&prefix) {
                    return Err(ParseError::new(line, ErrorKind::UnknownPrefix(prefix)));
                }
                Name::Prefixed { prefix, local }
            }
            Tok::A => {
                return Err(ParseError::new(
                    line,
                    ErrorKind::UnsupportedSyntax(
                        "'a' is only valid in the predicate position".to_string(),
                    ),
                ))
            }
            Tok::Eof => return Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
            _ => {
                return Err(ParseError::new(
                    line,
                    ErrorKind::UnsupportedSyntax("expected an IRI or prefixed name".to_string()),
                ))
            }
        };
        if self.doc.resolve(&name).as_deref() == Some(RDF_TYPE) {
            return Ok(Name::rdf_type());
        }
        Ok(name)
    }

    fn predicate_object_list(&mut self, subject: Name) -> Result<(), ParseError> {
        // Statements commit atomically: triples accumulate here and
        // reach the document only at the closing '.', so a statement
        // that fails halfway leaves nothing behind under recovery.
        let mut pending = Vec::new();
        loop {
            let (tok, line) = self.next_tok()?;
            let predicate = match tok {
                Tok::A => Name::rdf_type(),
                Tok::Eof => return Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
                other => self.name_from(other, line)?,
            };
            loop {
                let object = self.object()?;
                pending.push(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                match self.next_tok()? {
                    (Tok::Comma, _) => continue,
                    (Tok::Semi, _) => break,
                    (Tok::Dot, _) => {
                        self.doc.triples.extend(pending);
                        return Ok(());
                    }
                    (Tok::Eof, l) => {
                        return Err(ParseError::new(l, ErrorKind::UnterminatedStatement))
                    }
                    (_, l) => {
                        return Err(ParseError::new(
                            l,
                            ErrorKind::UnsupportedSyntax(
                                "expected ',', ';', or '.' after object".to_string(),
                            ),
                        ))
                    }
                }
            }
            // A ';' may be trailing, directly before the '.'.
            if let (Tok::Dot, _) = self.peek_tok()?.clone() {
                self.next_tok()?;
                self.doc.triples.extend(pending);
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Object, ParseError> {
        let (tok, line) = self.next_tok()?;
        match tok {
            Tok::Str(lexical) => {
                let datatype = if matches!(self.peek_tok()?.0, Tok::HatHat) {
                    self.next_tok()?;
                    let (tok, l) = self.next_tok()?;
                    Some(self.name_from(tok, l)?)
                } else {
                    None
                };
                if let Some(dt) = &datatype {
                    if self.doc.resolve(dt).as_deref() == Some(XSD_DOUBLE)
                        && !lexical.parse::<f64>().map(f64::is_finite).unwrap_or(false)
                    {
                        return Err(ParseError::new(
                            line,
                            ErrorKind::BadLiteral(format!(
                                "'{}' is not a finite xsd:double",
                                lexical
                            )),
                        ));
                    }
                }
                Ok(Object::Literal(Literal { lexical, datatype }))
            }
            Tok::Eof => Err(ParseError::new(line, ErrorKind::UnterminatedStatement)),
            other => Ok(Object::Name(self.name_from(other, line)?)),
        }
    }
}

// ===== Serializer =====

/// Escape a string literal body for double-quoted Turtle.
fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

/// Escape the local part of a prefixed name. Word characters and `-`
/// pass through; everything else (including `.`, so names can never
/// end in an ambiguous dot) is backslash-escaped.
fn escape_local(local: &str) -> String {
    let mut out = String::with_capacity(local.len());
    for c in local.chars() {
        if c.is_alphanumeric() || c == '_' || c == '-' {
            out.push(c);
        } else {
            out.push('\\');
            out.push(c);
        }
    }
    out
}

/// Render a predicate, abbreviating rdf:type as `a`.
fn render_predicate(doc: &Document, predicate: &Name) -> String {
    if predicate.resolve(&doc.prefixes).as_deref() == Some(RDF_TYPE) {
        "a".to_string()
    } else {
        predicate.to_string()
    }
}

/// Serialize to the canonical layout described in the module docs.
pub fn serialize_turtle(doc: &Document) -> String {
    let mut out = String::new();
    for (prefix, iri) in &doc.prefixes {
        let _ = writeln!(out, "@prefix {}: <{}> .", prefix, iri);
    }
    if !doc.prefixes.is_empty() && !doc.triples.is_empty() {
        out.push('\n');
    }

    // Group triples by subject (first appearance), then by predicate
    // (first appearance within the subject), preserving object order.
    let mut subjects: Vec<&Name> = Vec::new();
    let mut blocks: Vec<Vec<(&Name, Vec<&Object>)>> = Vec::new();
    for triple in &doc.triples {
        let si = match subjects.iter().position(|s| **s == triple.subject) {
            Some(i) => i,
            None => {
                subjects.push(&triple.subject);
                blocks.push(Vec::new());
                subjects.len() - 1
            }
        };
        let block = &mut blocks[si];
        match block.iter_mut().find(|(p, _)| **p == triple.predicate) {
            Some((_, objects)) => objects.push(&triple.object),
            None => block.push((&triple.predicate, vec![&triple.object])),
        }
    }

    for (si, subject) in subjects.iter().enumerate() {
        if si > 0 {
            out.push('\n');
        }
        let _ = write!(out, "{}", subject);
        for (pi, (predicate, objects)) in blocks[si].iter().enumerate() {
            if pi == 0 {
                out.push(' ');
            } else {
                out.push_str(" ;\n    ");
            }
            let _ = write!(out, "{}", render_predicate(doc, predicate));
            for (oi, object) in objects.iter().enumerate() {
                if oi > 0 {
                    out.push(',');
                }
                let _ = write!(out, " {}", object);
            }
        }
        out.push_str(" .\n");
    }
    out
}
