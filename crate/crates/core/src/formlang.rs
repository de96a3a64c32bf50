//! Line-based text format for charts, systems, functions, points, vector
//! fields and PDE blocks, plus the versioned JSON report envelope.
//!
//! ```text
//! coords x1 x2 x3
//! system P
//!   dx1 + x3*dx2
//! function f = x1^2/(x2 + 1)
//! point origin x1=0 x2=0 x3=0
//! field V = x1*@x2 - @x3
//! pde S on n=2
//!   p1 = x2
//! ```

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::contact::ContactChart;
use crate::error::EdsError;
use crate::exterior::{is_identifier, Chart, Form, PointAssignment, VectorField};
use crate::rational::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message} (expected {})", expected.join(", "))]
    Syntax {
        line: usize,
        col: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("{line}:{col}: unknown coordinate {name}")]
    UnknownCoordinate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch {
        line: usize,
        col: usize,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: {source}")]
    Math {
        line: usize,
        col: usize,
        #[source]
        source: EdsError,
    },
}

impl ParseError {
    /// One-based line and column of the offending input.
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::UnknownCoordinate { line, col, .. }
            | ParseError::DegreeMismatch { line, col, .. }
            | ParseError::Math { line, col, .. } => (*line, *col),
        }
    }
}

fn syntax(line: usize, col: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

/// A first-order PDE block: equations `lhs = rhs` on the contact chart of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeBlock {
    pub name: String,
    pub n: usize,
    pub equations: Vec<(RationalFunction, RationalFunction)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDocument {
    pub chart: Chart,
    pub systems: Vec<(String, Vec<Form>)>,
    pub functions: Vec<(String, RationalFunction)>,
    pub points: Vec<(String, PointAssignment)>,
    pub fields: Vec<(String, VectorField)>,
    pub pdes: Vec<PdeBlock>,
}

impl SystemDocument {
    pub fn new(chart: Chart) -> Self {
        SystemDocument {
            chart,
            systems: Vec::new(),
            functions: Vec::new(),
            points: Vec::new(),
            fields: Vec::new(),
            pdes: Vec::new(),
        }
    }

    pub fn system(&self, name: &str) -> Option<&[Form]> {
        self.systems.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn function(&self, name: &str) -> Option<&RationalFunction> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn point(&self, name: &str) -> Option<&PointAssignment> {
        self.points.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn field(&self, name: &str) -> Option<&VectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn pde(&self, name: &str) -> Option<&PdeBlock> {
        self.pdes.iter().find(|p| p.name == name)
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Field(String),
    Int(BigInt),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Field(s) => format!("'@{s}'"),
        Tok::Int(n) => format!("'{n}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of line".into(),
    }
}

/// Tokenize `text`, whose first character sits at column `col0`.
fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '@' {
            let start = if c == '@' { i + 1 } else { i };
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            if c == '@' {
                if !is_identifier(&word) {
                    return Err(syntax(
                        line,
                        col + 1,
                        "expected a coordinate after '@'",
                        &["identifier"],
                    ));
                }
                out.push(Token {
                    tok: Tok::Field(word),
                    col,
                });
            } else {
                out.push(Token {
                    tok: Tok::Ident(word),
                    col,
                });
            }
            i = j;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                col,
            });
            i = j;
        } else if "+-*/^()=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(syntax(
                line,
                col,
                format!("unexpected character '{c}'"),
                &["expression"],
            ));
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: col0 + chars.len(),
    });
    Ok(out)
}

// ---------------------------------------------------------------- expressions

#[derive(Clone, Debug)]
enum Expr {
    Int(BigInt),
    Name(String, usize),
    Partial(String, usize),
    D(Box<Expr>),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>, usize),
}

/// Value of an expression: functions, forms (degree ≥ 1) and vector fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(RationalFunction),
    Form(Form),
    Field(VectorField),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "function",
            Value::Form(_) => "form",
            Value::Field(_) => "vector field",
        }
    }
}

struct ExprParser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.line,
                self.col(),
                format!("unexpected {}", describe(self.peek())),
                &[&format!("'{c}'")],
            ))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        while let Tok::Sym(c @ ('+' | '-')) = *self.peek() {
            let col = self.col();
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Sym(c @ ('*' | '/')) = *self.peek() {
            let col = self.col();
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match *self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while *self.peek() == Tok::Sym('^') {
            let col = self.col();
            self.bump();
            let rhs = if *self.peek() == Tok::Sym('-') {
                self.bump();
                Expr::Neg(Box::new(self.atom()?))
            } else {
                self.atom()?
            };
            lhs = Expr::Bin('^', Box::new(lhs), Box::new(rhs), col);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "d" && *self.peek() == Tok::Sym('(') {
                    self.bump();
                    let e = self.sum()?;
                    self.expect_sym(')')?;
                    return Ok(Expr::D(Box::new(e)));
                }
                Ok(Expr::Name(name, col))
            }
            Tok::Field(name) => {
                self.bump();
                Ok(Expr::Partial(name, col))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            t => Err(syntax(
                self.line,
                col,
                format!("unexpected {}", describe(&t)),
                &["number", "identifier", "'('", "'-'"],
            )),
        }
    }
}

/// Evaluation context: a chart plus named functions.
pub struct Scope<'a> {
    pub chart: &'a Chart,
    pub functions: &'a [(String, RationalFunction)],
}

impl<'a> Scope<'a> {
    pub fn new(chart: &'a Chart) -> Self {
        Scope { chart, functions: &[] }
    }

    fn name(&self, name: &str, line: usize, col: usize) -> Result<Value, ParseError> {
        if let Some(i) = self.chart.index_of(name) {
            return Ok(Value::Scalar(self.chart.coordinate(i)));
        }
        if let Some((_, f)) = self.functions.iter().find(|(n, _)| n == name) {
            return Ok(Value::Scalar(f.clone()));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if let Some(i) = self.chart.index_of(rest) {
                return Ok(Value::Form(Form::dx(self.chart, i)));
            }
            if is_identifier(rest) {
                return Err(ParseError::UnknownCoordinate {
                    line,
                    col: col + 1,
                    name: rest.to_string(),
                });
            }
        }
        Err(ParseError::UnknownCoordinate {
            line,
            col,
            name: name.to_string(),
        })
    }

    fn eval(&self, e: &Expr, line: usize, col0: usize) -> Result<Value, ParseError> {
        let math = |col: usize, source: EdsError| ParseError::Math { line, col, source };
        let chart = self.chart;
        match e {
            Expr::Int(n) => Ok(Value::Scalar(chart.constant(BigRational::from_integer(n.clone())))),
            Expr::Name(n, col) => self.name(n, line, *col),
            Expr::Partial(n, col) => match chart.index_of(n) {
                Some(i) => Ok(Value::Field(VectorField::partial(chart, i))),
                None => Err(ParseError::UnknownCoordinate {
                    line,
                    col: col + 1,
                    name: n.clone(),
                }),
            },
            Expr::D(inner) => match self.eval(inner, line, col0)? {
                Value::Scalar(f) => Ok(Value::Form(Form::function(chart, f).d())),
                Value::Form(f) => Ok(Value::Form(f.d())),
                Value::Field(_) => Err(syntax(line, col0, "d() of a vector field", &["function", "form"])),
            },
            Expr::Neg(inner) => Ok(match self.eval(inner, line, col0)? {
                Value::Scalar(f) => Value::Scalar(f.neg()),
                Value::Form(f) => Value::Form(f.neg()),
                Value::Field(v) => Value::Field(v.neg()),
            }),
            Expr::Bin('^', a, b, col) => {
                let lhs = self.eval(a, line, col0)?;
                if let (Value::Scalar(base), Some(k)) = (&lhs, int_literal(b)) {
                    let k = k
                        .to_i64()
                        .filter(|k| k.abs() <= 1000)
                        .ok_or_else(|| syntax(line, *col, "exponent too large", &["small integer"]))?;
                    return base.pow(k).map(Value::Scalar).map_err(|s| math(*col, s));
                }
                let rhs = self.eval(b, line, col0)?;
                match (lhs, rhs) {
                    (Value::Form(x), Value::Form(y)) => x.wedge(&y).map(Value::Form).map_err(|s| math(*col, s)),
                    (Value::Scalar(_), _) => {
                        Err(syntax(line, *col, "exponent must be an integer literal", &["integer"]))
                    }
                    (l, r) => Err(syntax(
                        line,
                        *col,
                        format!("cannot raise {} to {}", l.kind(), r.kind()),
                        &["form ^ form", "function ^ integer"],
                    )),
                }
            }
            Expr::Bin(op, a, b, col) => {
                let lhs = self.eval(a, line, col0)?;
                let rhs = self.eval(b, line, col0)?;
                self.binary(*op, lhs, rhs, line, *col)
            }
        }
    }

    fn binary(&self, op: char, lhs: Value, rhs: Value, line: usize, col: usize) -> Result<Value, ParseError> {
        use Value::*;
        let math = |source: EdsError| ParseError::Math { line, col, source };
        let mismatch = |l: &Value, r: &Value| {
            syntax(
                line,
                col,
                format!("cannot apply '{op}' to {} and {}", l.kind(), r.kind()),
                &["operands of matching kind"],
            )
        };
        match op {
            '+' | '-' => {
                let r = if op == '-' {
                    match rhs {
                        Scalar(f) => Scalar(f.neg()),
                        Form(f) => Form(f.neg()),
                        Field(v) => Field(v.neg()),
                    }
                } else {
                    rhs
                };
                match (lhs, r) {
                    (Scalar(a), Scalar(b)) => Ok(Scalar(a.add(&b))),
                    (Form(a), Form(b)) => {
                        if a.degree() != b.degree() {
                            return Err(ParseError::DegreeMismatch {
                                line,
                                col,
                                expected: a.degree(),
                                found: b.degree(),
                            });
                        }
                        a.add(&b).map(Form).map_err(math)
                    }
                    (Field(a), Field(b)) => a.add(&b).map(Field).map_err(math),
                    (Scalar(a), Form(b)) | (Form(b), Scalar(a)) if a.is_zero() => Ok(Form(b)),
                    (Scalar(a), Field(b)) | (Field(b), Scalar(a)) if a.is_zero() => Ok(Field(b)),
                    (Scalar(_), Form(b)) | (Form(b), Scalar(_)) => Err(ParseError::DegreeMismatch {
                        line,
                        col,
                        expected: b.degree(),
                        found: 0,
                    }),
                    (l, r) => Err(mismatch(&l, &r)),
                }
            }
            '*' => match (lhs, rhs) {
                (Scalar(a), Scalar(b)) => Ok(Scalar(a.mul(&b))),
                (Scalar(a), Form(b)) | (Form(b), Scalar(a)) => Ok(Form(b.scale(&a))),
                (Scalar(a), Field(b)) | (Field(b), Scalar(a)) => Ok(Field(b.scale(&a))),
                (l, r) => Err(mismatch(&l, &r)),
            },
            '/' => {
                let Scalar(den) = rhs else {
                    return Err(mismatch(&lhs, &rhs));
                };
                let inv = den.inv().map_err(math)?;
                Ok(match lhs {
                    Scalar(a) => Scalar(a.mul(&inv)),
                    Form(a) => Form(a.scale(&inv)),
                    Field(a) => Field(a.scale(&inv)),
                })
            }
            _ => unreachable!("operator {op}"),
        }
    }
}

fn int_literal(e: &Expr) -> Option<BigInt> {
    match e {
        Expr::Int(n) => Some(n.clone()),
        Expr::Neg(inner) => int_literal(inner).map(|n| -n),
        _ => None,
    }
}

fn parse_value(scope: &Scope, text: &str, line: usize, col0: usize) -> Result<Value, ParseError> {
    let toks = lex(text, line, col0)?;
    let mut p = ExprParser {
        toks: &toks,
        pos: 0,
        line,
    };
    if *p.peek() == Tok::End {
        return Err(syntax(line, p.col(), "empty expression", &["expression"]));
    }
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            line,
            p.col(),
            format!("unexpected {}", describe(p.peek())),
            &["operator", "end of line"],
        ));
    }
    scope.eval(&e, line, col0)
}

/// Parse a scalar, form or vector-field expression on `chart`.
pub fn parse_expression(chart: &Chart, text: &str) -> Result<Value, ParseError> {
    parse_value(&Scope::new(chart), text, 1, 1)
}

pub fn parse_function(chart: &Chart, text: &str) -> Result<RationalFunction, ParseError> {
    match parse_expression(chart, text)? {
        Value::Scalar(f) => Ok(f),
        Value::Form(f) => Err(ParseError::DegreeMismatch {
            line: 1,
            col: 1,
            expected: 0,
            found: f.degree(),
        }),
        Value::Field(_) => Err(syntax(1, 1, "expected a function", &["function"])),
    }
}

/// Parse a form and require the given degree.
pub fn parse_form(chart: &Chart, text: &str, degree: usize) -> Result<Form, ParseError> {
    to_form(parse_expression(chart, text)?, degree, 1, 1)
}

pub fn parse_field(chart: &Chart, text: &str) -> Result<VectorField, ParseError> {
    to_field(chart, parse_expression(chart, text)?, 1, 1)
}

fn to_form(v: Value, degree: usize, line: usize, col: usize) -> Result<Form, ParseError> {
    match v {
        Value::Form(f) if f.degree() == degree => Ok(f),
        Value::Form(f) => Err(ParseError::DegreeMismatch {
            line,
            col,
            expected: degree,
            found: f.degree(),
        }),
        Value::Scalar(_) => Err(ParseError::DegreeMismatch {
            line,
            col,
            expected: degree,
            found: 0,
        }),
        Value::Field(_) => Err(syntax(line, col, "expected a form, found a vector field", &["form"])),
    }
}

fn to_field(chart: &Chart, v: Value, line: usize, col: usize) -> Result<VectorField, ParseError> {
    match v {
        Value::Field(f) => Ok(f),
        Value::Scalar(f) if f.is_zero() => Ok(VectorField::zero(chart)),
        other => Err(syntax(
            line,
            col,
            format!("expected a vector field, found a {}", other.kind()),
            &["vector field"],
        )),
    }
}

// ---------------------------------------------------------------- documents

struct Line<'a> {
    no: usize,
    indent: usize,
    body: &'a str,
}

fn split_word(s: &str) -> (&str, &str) {
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

fn check_name(name: &str, line: usize, col: usize, what: &str) -> Result<(), ParseError> {
    if is_identifier(name) {
        Ok(())
    } else {
        Err(syntax(
            line,
            col,
            format!("invalid {what} name '{name}'"),
            &["identifier"],
        ))
    }
}

enum Block {
    None,
    System(usize),
    Pde(usize),
}

/// Parse a complete document.
pub fn parse_document(text: &str) -> Result<SystemDocument, ParseError> {
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        lines.push(Line {
            no: k + 1,
            indent: content.chars().count() - trimmed.chars().count(),
            body: trimmed.trim_end(),
        });
    }
    let mut doc: Option<SystemDocument> = None;
    let mut block = Block::None;
    for ln in &lines {
        let col = ln.indent + 1;
        if ln.indent > 0 {
            let doc = doc.as_mut().expect("block implies document");
            match block {
                Block::System(k) => {
                    let scope = Scope {
                        chart: &doc.chart,
                        functions: &doc.functions,
                    };
                    let v = parse_value(&scope, ln.body, ln.no, col)?;
                    let f = to_form(v, 1, ln.no, col)?;
                    doc.systems[k].1.push(f);
                }
                Block::Pde(k) => {
                    let Some(eq) = ln.body.find('=') else {
                        return Err(syntax(ln.no, col + ln.body.chars().count(), "missing '='", &["'='"]));
                    };
                    let scope = Scope {
                        chart: &doc.chart,
                        functions: &doc.functions,
                    };
                    let lhs = scalar(&scope, &ln.body[..eq], ln.no, col)?;
                    let rcol = col + ln.body[..=eq].chars().count();
                    let rhs = scalar(&scope, &ln.body[eq + 1..], ln.no, rcol)?;
                    doc.pdes[k].equations.push((lhs, rhs));
                }
                Block::None => {
                    return Err(syntax(ln.no, col, "indented line outside a block", &["system", "pde"]));
                }
            }
            continue;
        }
        block = Block::None;
        let (kw, rest) = split_word(ln.body);
        let rest_col = col + kw.chars().count();
        if kw == "coords" {
            if doc.is_some() {
                return Err(syntax(
                    ln.no,
                    col,
                    "coords must be the first declaration and appear once",
                    &[],
                ));
            }
            let names: Vec<&str> = rest.split_whitespace().collect();
            for n in &names {
                check_name(n, ln.no, rest_col, "coordinate")?;
            }
            let chart = Chart::new(names.iter().copied()).map_err(|source| ParseError::Math {
                line: ln.no,
                col,
                source,
            })?;
            doc = Some(SystemDocument::new(chart));
            continue;
        }
        if doc.is_none() {
            if kw == "pde" {
                let n = pde_header(rest, ln.no, rest_col)?.1;
                let cc = ContactChart::new(n, 1).map_err(|source| ParseError::Math {
                    line: ln.no,
                    col,
                    source,
                })?;
                doc = Some(SystemDocument::new(cc.chart().clone()));
            } else {
                return Err(syntax(ln.no, col, format!("unexpected '{kw}'"), &["coords", "pde"]));
            }
        }
        let d = doc.as_mut().expect("document");
        match kw {
            "system" => {
                let name = rest.trim();
                check_name(name, ln.no, rest_col + 1, "system")?;
                if d.system(name).is_some() {
                    return Err(syntax(ln.no, col, format!("duplicate system '{name}'"), &[]));
                }
                d.systems.push((name.to_string(), Vec::new()));
                block = Block::System(d.systems.len() - 1);
            }
            "function" | "field" => {
                let Some(eq) = rest.find('=') else {
                    return Err(syntax(ln.no, col + ln.body.chars().count(), "missing '='", &["'='"]));
                };
                let name = rest[..eq].trim();
                check_name(name, ln.no, rest_col + 1, kw)?;
                let ecol = rest_col + rest[..=eq].chars().count();
                let scope = Scope {
                    chart: &d.chart,
                    functions: &d.functions,
                };
                let v = parse_value(&scope, &rest[eq + 1..], ln.no, ecol)?;
                if kw == "function" {
                    if d.function(name).is_some() || d.chart.index_of(name).is_some() {
                        return Err(syntax(ln.no, col, format!("duplicate name '{name}'"), &[]));
                    }
                    let f = match v {
                        Value::Scalar(f) => f,
                        Value::Form(f) => {
                            return Err(ParseError::DegreeMismatch {
                                line: ln.no,
                                col: ecol,
                                expected: 0,
                                found: f.degree(),
                            })
                        }
                        Value::Field(_) => return Err(syntax(ln.no, ecol, "expected a function", &["function"])),
                    };
                    d.functions.push((name.to_string(), f));
                } else {
                    if d.field(name).is_some() {
                        return Err(syntax(ln.no, col, format!("duplicate field '{name}'"), &[]));
                    }
                    let f = to_field(&d.chart, v, ln.no, ecol)?;
                    d.fields.push((name.to_string(), f));
                }
            }
            "point" => {
                let (name, assigns) = split_word(rest.trim_start());
                check_name(name, ln.no, rest_col + 1, "point")?;
                if d.point(name).is_some() {
                    return Err(syntax(ln.no, col, format!("duplicate point '{name}'"), &[]));
                }
                let mut values = vec![BigRational::zero(); d.chart.dim()];
                for a in assigns.split_whitespace() {
                    let acol = col + ln.body.find(a).unwrap_or(0);
                    let Some((var, val)) = a.split_once('=') else {
                        return Err(syntax(ln.no, acol, format!("bad assignment '{a}'"), &["name=value"]));
                    };
                    let Some(i) = d.chart.index_of(var) else {
                        return Err(ParseError::UnknownCoordinate {
                            line: ln.no,
                            col: acol,
                            name: var.to_string(),
                        });
                    };
                    values[i] = parse_rational(val).ok_or_else(|| {
                        syntax(
                            ln.no,
                            acol + var.len() + 1,
                            format!("bad number '{val}'"),
                            &["integer or ratio"],
                        )
                    })?;
                }
                let p = PointAssignment::new(&d.chart, values).expect("sized");
                d.points.push((name.to_string(), p));
            }
            "pde" => {
                let (name, n) = pde_header(rest, ln.no, rest_col)?;
                let cc = ContactChart::new(n, 1).map_err(|source| ParseError::Math {
                    line: ln.no,
                    col,
                    source,
                })?;
                if cc.chart() != &d.chart {
                    return Err(syntax(
                        ln.no,
                        col,
                        format!("pde on n={n} needs coords {}", cc.chart().names().join(" ")),
                        &[],
                    ));
                }
                if d.pde(&name).is_some() {
                    return Err(syntax(ln.no, col, format!("duplicate pde '{name}'"), &[]));
                }
                d.pdes.push(PdeBlock {
                    name,
                    n,
                    equations: Vec::new(),
                });
                block = Block::Pde(d.pdes.len() - 1);
            }
            _ => {
                return Err(syntax(
                    ln.no,
                    col,
                    format!("unknown declaration '{kw}'"),
                    &["coords", "system", "function", "point", "field", "pde"],
                ))
            }
        }
    }
    doc.ok_or_else(|| syntax(1, 1, "empty document", &["coords"]))
}

fn scalar(scope: &Scope, text: &str, line: usize, col: usize) -> Result<RationalFunction, ParseError> {
    let lead = text.chars().take_while(|c| c.is_whitespace()).count();
    match parse_value(scope, text, line, col)? {
        Value::Scalar(f) => Ok(f),
        Value::Form(f) => Err(ParseError::DegreeMismatch {
            line,
            col: col + lead,
            expected: 0,
            found: f.degree(),
        }),
        Value::Field(_) => Err(syntax(line, col + lead, "expected a function", &["function"])),
    }
}

fn pde_header(rest: &str, line: usize, col: usize) -> Result<(String, usize), ParseError> {
    let words: Vec<&str> = rest.split_whitespace().collect();
    let bad = || syntax(line, col + 1, "expected 'pde NAME on n=N'", &["NAME on n=N"]);
    if words.len() != 3 || words[1] != "on" {
        return Err(bad());
    }
    check_name(words[0], line, col + 1, "pde")?;
    let n = words[2]
        .strip_prefix("n=")
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .ok_or_else(bad)?;
    Ok((words[0].to_string(), n))
}

/// Parse `3`, `-2`, `1/2`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().ok()?;
    let den: BigInt = d.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Render a document in canonical form; `parse_document` inverts it.
pub fn render_document(doc: &SystemDocument) -> String {
    let mut out = String::new();
    out.push_str("coords ");
    out.push_str(&doc.chart.names().join(" "));
    out.push('\n');
    for (name, f) in &doc.functions {
        out.push_str(&format!("function {name} = {}\n", doc.chart.render_fn(f)));
    }
    for (name, forms) in &doc.systems {
        out.push_str(&format!("system {name}\n"));
        for f in forms {
            out.push_str(&format!(" {}\n", f.render()));
        }
    }
    for (name, p) in &doc.points {
        let assigns: Vec<String> = doc
            .chart
            .names()
            .iter()
            .zip(p.values())
            .map(|(n, v)| format!("{n}={}", render_rational(v)))
            .collect();
        out.push_str(&format!("point {name} {}\n", assigns.join(" ")));
    }
    for (name, v) in &doc.fields {
        out.push_str(&format!("field {name} = {}\n", v.render()));
    }
    for p in &doc.pdes {
        out.push_str(&format!("pde {} on n={}\n", p.name, p.n));
        for (l, r) in &p.equations {
            out.push_str(&format!(" {} = {}\n", doc.chart.render_fn(l), doc.chart.render_fn(r)));
        }
    }
    out
}

impl fmt::Display for SystemDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_document(self))
    }
}

// ---------------------------------------------------------------- reports

pub const SCHEMA: &str = "cartan-eds/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub object: Option<String>,
}

/// Versioned JSON envelope shared by every command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub input_digest: String,
    pub result: serde_json::Value,
    pub diagnostics: Vec<Diagnostic>,
}

/// Hex SHA-256 of the input text.
pub fn input_digest(input: &str) -> String {
    hex::encode(Sha256::digest(input.as_bytes()))
}

impl Report {
    pub fn new(command: &str, input: &str, result: serde_json::Value) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            input_digest: input_digest(input),
            result,
            diagnostics: Vec::new(),
        }
    }

    pub fn diagnose(&mut self, severity: Severity, message: impl Into<String>, object: Option<&str>) {
        self.diagnostics.push(Diagnostic {
            severity,
            message: message.into(),
            object: object.map(str::to_string),
        });
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
