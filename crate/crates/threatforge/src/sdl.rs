//! System Description Language (SDL): the human-authored text format for
//! declaring a system's elements and channels.
//!
//! ```text
//! system "Paper information system"
//! element office office "Office" { location: "confidential records room"; }
//! channel corridor corridor "Corridor" connects building, office
//! element custom(datacenter) dc "DC" { env: "physical"; role: "element"; }
//! ```
//!
//! One statement per line; `#` starts a line comment. The surface tokens
//! `os` and `lan` map to the operating_system and local_network kinds.
//! Custom kinds carry `role` and `env` attributes; the parser consumes them
//! into the asset's role/environment and the serializer re-emits them.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use indexmap::IndexMap;

use crate::model::{
    build_system, is_valid_custom_name, Asset, AssetKind, Environment, Role, SystemModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, Vec<ParseError>> {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = source.chars().peekable();

    macro_rules! push {
        ($tok:expr, $col:expr) => {
            tokens.push(Token {
                tok: $tok,
                line,
                column: $col,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        match c {
            '\r' => {
                chars.next();
                column += 1;
            }
            '\n' => {
                chars.next();
                push!(Tok::Newline, column);
                line += 1;
                column = 1;
            }
            ' ' | '\t' => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '{' | '}' | '(' | ')' | ':' | ';' | ',' => {
                chars.next();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                push!(tok, column);
                column += 1;
            }
            '"' => {
                let start = column;
                chars.next();
                column += 1;
                let mut value = String::new();
                let mut closed = false;
                while let Some(&c) = chars.peek() {
                    match c {
                        '"' => {
                            chars.next();
                            column += 1;
                            closed = true;
                            break;
                        }
                        '\n' => break,
                        '\\' => {
                            chars.next();
                            column += 1;
                            match chars.next() {
                                Some('"') => value.push('"'),
                                Some('\\') => value.push('\\'),
                                Some('n') => value.push('\n'),
                                Some('t') => value.push('\t'),
                                Some(other) => {
                                    errors.push(ParseError {
                                        line,
                                        column,
                                        kind: ParseErrorKind::Lex,
                                        message: format!("unknown escape \\{other}"),
                                    });
                                }
                                None => break,
                            }
                            column += 1;
                        }
                        _ => {
                            chars.next();
                            column += 1;
                            value.push(c);
                        }
                    }
                }
                if closed {
                    push!(Tok::Str(value), start);
                } else {
                    errors.push(ParseError {
                        line,
                        column: start,
                        kind: ParseErrorKind::Lex,
                        message: "unterminated string".to_string(),
                    });
                }
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let start = column;
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' {
                        ident.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(ident), start);
            }
            _ => {
                errors.push(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Lex,
                    message: format!("unexpected character {c:?}"),
                });
                chars.next();
                column += 1;
            }
        }
    }
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_line: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.peek()
            .map(|t| (t.line, t.column))
            .unwrap_or((self.end_line, 1))
    }

    fn error(&mut self, kind: ParseErrorKind, message: String) {
        let (line, column) = self.here();
        self.errors.push(ParseError {
            line,
            column,
            kind,
            message,
        });
    }

    fn error_at(&mut self, line: usize, column: usize, kind: ParseErrorKind, message: String) {
        self.errors.push(ParseError {
            line,
            column,
            kind,
            message,
        });
    }

    /// Skip to the next statement boundary for recovery.
    fn sync(&mut self) {
        while let Some(t) = self.peek() {
            if t.tok == Tok::Newline {
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Newline)) {
            self.pos += 1;
        }
    }

    fn expect_ident(&mut self, what: &str) -> Option<(String, usize, usize)> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                column,
            }) => {
                self.pos += 1;
                Some((s, line, column))
            }
            _ => {
                self.error(ParseErrorKind::Syntax, format!("expected {what}"));
                None
            }
        }
    }

    fn expect_string(&mut self, what: &str) -> Option<String> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Str(s), ..
            }) => {
                self.pos += 1;
                Some(s)
            }
            _ => {
                self.error(ParseErrorKind::Syntax, format!("expected {what}"));
                None
            }
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> bool {
        if self.peek().map(|t| &t.tok) == Some(&tok) {
            self.pos += 1;
            true
        } else {
            self.error(ParseErrorKind::Syntax, format!("expected {what}"));
            false
        }
    }

    fn at_statement_end(&self) -> bool {
        matches!(self.peek().map(|t| &t.tok), None | Some(Tok::Newline))
    }
}

fn surface_kind(token: &str) -> Option<AssetKind> {
    match token {
        "office" => Some(AssetKind::Office),
        "building" => Some(AssetKind::Building),
        "corridor" => Some(AssetKind::Corridor),
        "territory" => Some(AssetKind::Territory),
        "software" => Some(AssetKind::Software),
        "os" => Some(AssetKind::OperatingSystem),
        "lan" => Some(AssetKind::LocalNetwork),
        _ => None,
    }
}

fn surface_token(kind: &AssetKind) -> String {
    match kind {
        AssetKind::OperatingSystem => "os".to_string(),
        AssetKind::LocalNetwork => "lan".to_string(),
        AssetKind::Custom(name) => format!("custom({name})"),
        other => other.token(),
    }
}

struct Statement {
    line: usize,
    asset: Asset,
}

fn parse_statement(p: &mut Parser) -> Option<Statement> {
    let (keyword, kw_line, kw_column) = match p.next() {
        Some(Token {
            tok: Tok::Ident(s),
            line,
            column,
        }) => (s, line, column),
        Some(t) => {
            p.error_at(
                t.line,
                t.column,
                ParseErrorKind::Syntax,
                "expected \"element\" or \"channel\"".to_string(),
            );
            return None;
        }
        None => return None,
    };
    let declared_role = match keyword.as_str() {
        "element" => Role::Element,
        "channel" => Role::Channel,
        other => {
            p.error_at(
                kw_line,
                kw_column,
                ParseErrorKind::Syntax,
                format!("expected \"element\" or \"channel\", found {other:?}"),
            );
            return None;
        }
    };

    let (kind_token, kind_line, kind_column) = p.expect_ident("asset kind")?;
    let kind = if kind_token == "custom" {
        if !p.expect_tok(Tok::LParen, "\"(\" after custom") {
            return None;
        }
        let (name, name_line, name_column) = p.expect_ident("custom kind name")?;
        if !p.expect_tok(Tok::RParen, "\")\"") {
            return None;
        }
        if !is_valid_custom_name(&name) {
            p.error_at(
                name_line,
                name_column,
                ParseErrorKind::Semantic,
                format!("invalid custom kind name {name:?}"),
            );
            return None;
        }
        AssetKind::Custom(name)
    } else {
        match surface_kind(&kind_token) {
            Some(kind) => kind,
            None => {
                p.error_at(
                    kind_line,
                    kind_column,
                    ParseErrorKind::Syntax,
                    format!("unknown asset kind {kind_token:?}"),
                );
                return None;
            }
        }
    };

    let (id, ..) = p.expect_ident("asset id")?;
    let display_name = p.expect_string("display name")?;

    let mut attributes = IndexMap::new();
    if p.peek().map(|t| &t.tok) == Some(&Tok::LBrace) {
        p.pos += 1;
        loop {
            match p.peek().map(|t| &t.tok) {
                Some(Tok::RBrace) => {
                    p.pos += 1;
                    break;
                }
                None | Some(Tok::Newline) => {
                    p.error(ParseErrorKind::Syntax, "expected \"}\"".to_string());
                    return None;
                }
                _ => {
                    let (key, key_line, key_column) = p.expect_ident("attribute key")?;
                    if !p.expect_tok(Tok::Colon, "\":\"") {
                        return None;
                    }
                    let value = p.expect_string("attribute value")?;
                    if !p.expect_tok(Tok::Semi, "\";\"") {
                        return None;
                    }
                    if attributes.insert(key.clone(), value).is_some() {
                        p.error_at(
                            key_line,
                            key_column,
                            ParseErrorKind::Semantic,
                            format!("duplicate attribute key {key:?}"),
                        );
                        return None;
                    }
                }
            }
        }
    }

    let mut endpoints = Vec::new();
    if matches!(p.peek().map(|t| &t.tok), Some(Tok::Ident(s)) if s == "connects") {
        p.pos += 1;
        let (first, ..) = p.expect_ident("endpoint id")?;
        endpoints.push(first);
        while p.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
            p.pos += 1;
            let (next, ..) = p.expect_ident("endpoint id")?;
            endpoints.push(next);
        }
    }

    if !p.at_statement_end() {
        p.error(ParseErrorKind::Syntax, "expected end of statement".to_string());
        return None;
    }

    // resolve role and environment
    let (role, environment) = match (&kind).canonical_role().zip(kind.canonical_environment()) {
        Some((canonical_role, canonical_env)) => {
            if canonical_role != declared_role {
                p.error_at(
                    kw_line,
                    kw_column,
                    ParseErrorKind::Semantic,
                    format!(
                        "kind {:?} is canonically a {}, declared as {}",
                        kind_token, canonical_role, declared_role
                    ),
                );
                return None;
            }
            (canonical_role, canonical_env)
        }
        None => {
            // custom kinds: role and env come from attributes
            let role = match attributes.shift_remove("role").as_deref() {
                Some("element") => Role::Element,
                Some("channel") => Role::Channel,
                Some(other) => {
                    p.error_at(
                        kw_line,
                        kw_column,
                        ParseErrorKind::Semantic,
                        format!("custom kind role must be \"element\" or \"channel\", found {other:?}"),
                    );
                    return None;
                }
                None => {
                    p.error_at(
                        kw_line,
                        kw_column,
                        ParseErrorKind::Semantic,
                        "custom kind requires a \"role\" attribute".to_string(),
                    );
                    return None;
                }
            };
            let environment = match attributes.shift_remove("env").as_deref() {
                Some("physical") => Environment::Physical,
                Some("cyber") => Environment::Cyber,
                Some(other) => {
                    p.error_at(
                        kw_line,
                        kw_column,
                        ParseErrorKind::Semantic,
                        format!("custom kind env must be \"physical\" or \"cyber\", found {other:?}"),
                    );
                    return None;
                }
                None => {
                    p.error_at(
                        kw_line,
                        kw_column,
                        ParseErrorKind::Semantic,
                        "custom kind requires an \"env\" attribute".to_string(),
                    );
                    return None;
                }
            };
            if role != declared_role {
                p.error_at(
                    kw_line,
                    kw_column,
                    ParseErrorKind::Semantic,
                    format!(
                        "\"role\" attribute says {}, statement declares {}",
                        role, declared_role
                    ),
                );
                return None;
            }
            (role, environment)
        }
    };

    Some(Statement {
        line: kw_line,
        asset: Asset {
            id,
            kind,
            role,
            environment,
            display_name,
            attributes,
            endpoints,
        },
    })
}

/// Parse SDL source into a validated [`SystemModel`]. All recoverable errors
/// in a malformed file are reported in one pass.
pub fn parse(source: &str) -> Result<SystemModel, Vec<ParseError>> {
    let tokens = lex(source)?;
    let end_line = tokens.last().map(|t| t.line).unwrap_or(1);
    let mut p = Parser {
        tokens,
        pos: 0,
        end_line,
        errors: Vec::new(),
    };

    p.skip_newlines();
    let name = match p.peek().cloned() {
        Some(Token {
            tok: Tok::Ident(kw),
            ..
        }) if kw == "system" => {
            p.pos += 1;
            p.expect_string("system name")
        }
        _ => {
            p.error(
                ParseErrorKind::Syntax,
                "expected \"system\" header".to_string(),
            );
            None
        }
    };
    if name.is_none() {
        p.sync();
    }
    if !p.at_statement_end() {
        p.error(ParseErrorKind::Syntax, "expected end of statement".to_string());
        p.sync();
    }

    let mut statements: Vec<Statement> = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek().is_none() {
            break;
        }
        match parse_statement(&mut p) {
            Some(statement) => statements.push(statement),
            None => p.sync(),
        }
    }

    // cross-statement semantic checks with line-precise positions
    let mut line_of: HashMap<String, usize> = HashMap::new();
    for s in &statements {
        if line_of.contains_key(&s.asset.id) {
            p.error_at(
                s.line,
                1,
                ParseErrorKind::Semantic,
                format!("duplicate asset id {:?}", s.asset.id),
            );
        } else {
            line_of.insert(s.asset.id.clone(), s.line);
        }
    }
    for s in &statements {
        for endpoint in &s.asset.endpoints {
            match statements.iter().find(|t| t.asset.id == *endpoint) {
                None => p.error_at(
                    s.line,
                    1,
                    ParseErrorKind::Semantic,
                    format!("channel {:?} references unknown asset {:?}", s.asset.id, endpoint),
                ),
                Some(target) if target.asset.role != Role::Element => p.error_at(
                    s.line,
                    1,
                    ParseErrorKind::Semantic,
                    format!(
                        "channel {:?} endpoint {:?} is not an element",
                        s.asset.id, endpoint
                    ),
                ),
                Some(_) => {}
            }
        }
        if s.asset.role == Role::Element && !s.asset.endpoints.is_empty() {
            p.error_at(
                s.line,
                1,
                ParseErrorKind::Semantic,
                format!("element {:?} declares endpoints; only channels connect", s.asset.id),
            );
        }
        if s.asset.display_name.is_empty() {
            p.error_at(
                s.line,
                1,
                ParseErrorKind::Semantic,
                format!("asset {:?} has an empty display name", s.asset.id),
            );
        }
    }

    if !p.errors.is_empty() {
        return Err(p.errors);
    }
    let name = name.expect("header errors were reported");
    if name.is_empty() {
        return Err(vec![ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Semantic,
            message: "system name is empty".to_string(),
        }]);
    }
    match build_system(name, statements.into_iter().map(|s| s.asset).collect()) {
        Ok(system) => Ok(system),
        // the checks above mirror build_system; anything left maps to line 1
        Err(e) => Err(vec![ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Semantic,
            message: e.to_string(),
        }]),
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// Canonical SDL form: one statement per line, attributes sorted by key,
/// LF line endings. `parse(serialize(s)) == s` for every valid system.
pub fn serialize(system: &SystemModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system \"{}\"", escape(&system.name));
    for asset in &system.assets {
        let _ = write!(
            out,
            "{} {} {} \"{}\"",
            asset.role,
            surface_token(&asset.kind),
            asset.id,
            escape(&asset.display_name)
        );
        let mut attrs: Vec<(&str, &str)> = asset
            .attributes
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        if matches!(asset.kind, AssetKind::Custom(_)) {
            attrs.push(("role", asset.role.as_str()));
            attrs.push(("env", asset.environment.as_str()));
        }
        attrs.sort();
        if !attrs.is_empty() {
            let _ = write!(out, " {{");
            for (key, value) in attrs {
                let _ = write!(out, " {key}: \"{}\";", escape(value));
            }
            let _ = write!(out, " }}");
        }
        if !asset.endpoints.is_empty() {
            let _ = write!(out, " connects {}", asset.endpoints.join(", "));
        }
        out.push('\n');
    }
    out
}
