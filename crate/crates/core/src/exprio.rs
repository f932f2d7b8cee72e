//! Text grammar, parser and printers.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" INTEGER)?
//! atom   := INTEGER | IDENT | "(" expr ")"
//! ```
//!
//! Products keep their written order, so `ph*qh` normalizes to
//! `qh*ph - i*hbar`. Division is only allowed by a single-term scalar.
//! Identifiers: `i`, the parameters `hbar`, `s`, `sp`, the commutative
//! variables `q`, `p`, `xi`, `eta`, the Weyl generators `qh`, `ph`, and the
//! derivatives `dq`, `dp`, `dxi`, `deta`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::boppdiff::{diff_qp, diff_xi_eta};
use crate::coeffring::{format_rational, CoeffError, Coefficient, GaussianRational, Registry};
use crate::symcalc::{Symbol, VarPair};
use crate::weylcore::{AlgebraSignature, CanonicalElement, WeylError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("`{name}` at line {line}, column {col} is not allowed in a {target} expression")]
    WrongTarget { name: String, target: Target, line: usize, col: usize },
    #[error("negative exponent at line {line}, column {col}")]
    NegativeExponent { line: usize, col: usize },
    #[error("`{name}` at line {line}, column {col} mixes the (q, p) and (xi, eta) phase spaces")]
    MixedVariables { name: String, line: usize, col: usize },
    #[error("division by a non-scalar at line {line}, column {col}")]
    NonScalarDivisor { line: usize, col: usize },
    #[error("at line {line}, column {col}: {source}")]
    Coeff { line: usize, col: usize, source: CoeffError },
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Symbol,
    Weyl,
    DiffOp,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Symbol => "symbol",
            Target::Weyl => "weyl",
            Target::DiffOp => "diffop",
        })
    }
}

/// A parsed, normalized value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Symbol(Symbol),
    Weyl(CanonicalElement),
    DiffOp(CanonicalElement),
}

impl Value {
    pub fn into_symbol(self) -> Option<Symbol> {
        match self {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_weyl(self) -> Option<CanonicalElement> {
        match self {
            Value::Weyl(e) => Some(e),
            _ => None,
        }
    }

    pub fn into_diffop(self) -> Option<CanonicalElement> {
        match self {
            Value::DiffOp(e) => Some(e),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut k, mut line, mut col) = (0, 1, 1);
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, col);
        if c == '\n' {
            k += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            k += 1;
            col += 1;
            continue;
        }
        let start = k;
        let tok = if c.is_ascii_digit() {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            Tok::Ident(chars[start..k].iter().collect())
        } else {
            k += 1;
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(ExprError::Syntax { line: l0, col: c0, msg: format!("unexpected character {other:?}") })
                }
            }
        };
        col += k - start;
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

// ---------------------------------------------------------------------------
// AST

#[derive(Debug, Clone)]
enum Node {
    Int(BigInt),
    Ident(String),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>, (usize, usize)),
    Pow(Box<Node>, u32),
}

#[derive(Debug, Clone)]
struct Spanned {
    node: Node,
    idents: Vec<(String, usize, usize)>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    idents: Vec<(String, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        let t = self.peek();
        Err(ExprError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let t = self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?), (t.line, t.col));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        let e = match t.tok {
            Tok::Int(n) => n,
            Tok::Minus => return Err(ExprError::NegativeExponent { line: t.line, col: t.col }),
            _ => return Err(ExprError::Syntax { line: t.line, col: t.col, msg: "exponent must be an integer literal".into() }),
        };
        let e: u32 = e
            .try_into()
            .map_err(|_| ExprError::Syntax { line: t.line, col: t.col, msg: "exponent too large".into() })?;
        if self.peek().tok == Tok::Caret {
            return self.err("chained exponents need parentheses");
        }
        Ok(Node::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => Ok(Node::Int(n)),
            Tok::Ident(name) => {
                self.idents.push((name.clone(), t.line, t.col));
                Ok(Node::Ident(name))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(ExprError::Syntax { line: t.line, col: t.col, msg: "unexpected end of input".into() }),
            other => Err(ExprError::Syntax { line: t.line, col: t.col, msg: format!("unexpected {}", tok_text(&other)) }),
        }
    }
}

fn tok_text(t: &Tok) -> String {
    match t {
        Tok::Int(n) => n.to_string(),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn parse_ast(text: &str) -> Result<Spanned, ExprError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, idents: Vec::new() };
    let node = p.expr()?;
    if p.peek().tok != Tok::End {
        let msg = format!("unexpected {}", tok_text(&p.peek().tok));
        return p.err(msg);
    }
    Ok(Spanned { node, idents: p.idents })
}

// ---------------------------------------------------------------------------
// Evaluation

const PARAMS: [&str; 3] = ["hbar", "s", "sp"];

#[derive(Clone)]
enum Ctx {
    Sym(VarPair),
    Elem(Arc<AlgebraSignature>),
}

#[derive(Clone)]
enum Val {
    Sym(Symbol),
    Elem(CanonicalElement),
}

impl Ctx {
    fn scalar(&self, c: Coefficient) -> Val {
        match self {
            Ctx::Sym(v) => Val::Sym(Symbol::constant(*v, c)),
            Ctx::Elem(sig) => Val::Elem(CanonicalElement::scalar(sig, c)),
        }
    }

    fn variable(&self, name: &str) -> Option<Val> {
        match self {
            Ctx::Sym(v) => {
                let (a, b) = v.names();
                let one = Coefficient::one();
                if name == a {
                    Some(Val::Sym(Symbol::monomial(*v, 1, 0, one)))
                } else if name == b {
                    Some(Val::Sym(Symbol::monomial(*v, 0, 1, one)))
                } else {
                    None
                }
            }
            Ctx::Elem(sig) => CanonicalElement::generator(sig, name).ok().map(Val::Elem),
        }
    }
}

impl Val {
    fn add(&self, o: &Val) -> Val {
        match (self, o) {
            (Val::Sym(a), Val::Sym(b)) => Val::Sym(a + b),
            (Val::Elem(a), Val::Elem(b)) => Val::Elem(a + b),
            _ => unreachable!("one context per parse"),
        }
    }

    fn neg(&self) -> Val {
        match self {
            Val::Sym(a) => Val::Sym(-a),
            Val::Elem(a) => Val::Elem(-a),
        }
    }

    fn mul(&self, o: &Val) -> Result<Val, ExprError> {
        Ok(match (self, o) {
            (Val::Sym(a), Val::Sym(b)) => Val::Sym(a * b),
            (Val::Elem(a), Val::Elem(b)) => Val::Elem(a.multiply(b)?),
            _ => unreachable!("one context per parse"),
        })
    }

    fn pow(&self, ctx: &Ctx, e: u32) -> Result<Val, ExprError> {
        let mut acc = ctx.scalar(Coefficient::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn as_scalar(&self) -> Option<Coefficient> {
        match self {
            Val::Sym(a) => {
                if a.terms().all(|(e, _)| *e == (0, 0)) {
                    Some(a.coefficient_of(0, 0))
                } else {
                    None
                }
            }
            Val::Elem(a) => {
                let w = a.signature().width();
                if a.terms().all(|(e, _)| e.iter().all(|&k| k == 0)) {
                    Some(a.coefficient_of(&vec![0; w]))
                } else {
                    None
                }
            }
        }
    }

    fn scale(&self, c: &Coefficient) -> Val {
        match self {
            Val::Sym(a) => Val::Sym(a.scale(c)),
            Val::Elem(a) => Val::Elem(a.scale(c)),
        }
    }
}

fn eval(node: &Node, ctx: &Ctx) -> Result<Val, ExprError> {
    Ok(match node {
        Node::Int(n) => ctx.scalar(Coefficient::from_gaussian(GaussianRational::from_bigint(n.clone()))),
        Node::Ident(name) => {
            if name == "i" {
                ctx.scalar(Coefficient::i())
            } else if PARAMS.contains(&name.as_str()) {
                ctx.scalar(Coefficient::param(name).expect("standard parameter"))
            } else {
                ctx.variable(name).expect("identifiers are checked before evaluation")
            }
        }
        Node::Neg(a) => eval(a, ctx)?.neg(),
        Node::Add(a, b) => eval(a, ctx)?.add(&eval(b, ctx)?),
        Node::Sub(a, b) => eval(a, ctx)?.add(&eval(b, ctx)?.neg()),
        Node::Mul(a, b) => eval(a, ctx)?.mul(&eval(b, ctx)?)?,
        Node::Div(a, b, (line, col)) => {
            let (line, col) = (*line, *col);
            let d = eval(b, ctx)?.as_scalar().ok_or(ExprError::NonScalarDivisor { line, col })?;
            let inv = d.inverse().map_err(|source| ExprError::Coeff { line, col, source })?;
            eval(a, ctx)?.scale(&inv)
        }
        Node::Pow(a, e) => eval(a, ctx)?.pow(ctx, *e)?,
    })
}

/// Which family a variable-like identifier belongs to.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Qp,
    XiEta,
    Weyl,
}

fn classify(name: &str) -> Option<(Family, bool)> {
    Some(match name {
        "q" | "p" => (Family::Qp, false),
        "dq" | "dp" => (Family::Qp, true),
        "xi" | "eta" => (Family::XiEta, false),
        "dxi" | "deta" => (Family::XiEta, true),
        "qh" | "ph" => (Family::Weyl, false),
        _ => return None,
    })
}

fn context_for(target: Target, idents: &[(String, usize, usize)]) -> Result<Ctx, ExprError> {
    let mut family: Option<Family> = None;
    for (name, line, col) in idents {
        let (line, col) = (*line, *col);
        if name == "i" || PARAMS.contains(&name.as_str()) {
            continue;
        }
        let Some((fam, is_deriv)) = classify(name) else {
            return Err(ExprError::Syntax { line, col, msg: format!("unknown identifier `{name}`") });
        };
        let allowed = match target {
            Target::Symbol => fam != Family::Weyl && !is_deriv,
            Target::Weyl => fam == Family::Weyl,
            Target::DiffOp => fam != Family::Weyl,
        };
        if !allowed {
            return Err(ExprError::WrongTarget { name: name.clone(), target, line, col });
        }
        match family {
            None => family = Some(fam),
            Some(f) if f != fam => return Err(ExprError::MixedVariables { name: name.clone(), line, col }),
            _ => {}
        }
    }
    Ok(match target {
        Target::Symbol => Ctx::Sym(if family == Some(Family::XiEta) { VarPair::XiEta } else { VarPair::Qp }),
        Target::Weyl => Ctx::Elem(AlgebraSignature::weyl()),
        Target::DiffOp => Ctx::Elem(if family == Some(Family::XiEta) { diff_xi_eta() } else { diff_qp() }),
    })
}

/// Parses and normalizes `text` into the requested kind of value.
pub fn parse(text: &str, target: Target) -> Result<Value, ExprError> {
    let ast = parse_ast(text)?;
    let ctx = context_for(target, &ast.idents)?;
    let v = eval(&ast.node, &ctx)?;
    Ok(match (target, v) {
        (Target::Symbol, Val::Sym(s)) => Value::Symbol(s),
        (Target::Weyl, Val::Elem(e)) => Value::Weyl(e),
        (Target::DiffOp, Val::Elem(e)) => Value::DiffOp(e),
        _ => unreachable!("context matches target"),
    })
}

pub fn parse_symbol(text: &str) -> Result<Symbol, ExprError> {
    Ok(parse(text, Target::Symbol)?.into_symbol().expect("symbol target"))
}

pub fn parse_weyl(text: &str) -> Result<CanonicalElement, ExprError> {
    Ok(parse(text, Target::Weyl)?.into_weyl().expect("weyl target"))
}

pub fn parse_diffop(text: &str) -> Result<CanonicalElement, ExprError> {
    Ok(parse(text, Target::DiffOp)?.into_diffop().expect("diffop target"))
}

/// Parses a scalar coefficient such as `(1/2)*i*hbar - s`.
pub fn parse_coefficient(text: &str) -> Result<Coefficient, ExprError> {
    let ast = parse_ast(text)?;
    if let Some((name, line, col)) = ast.idents.iter().find(|(n, _, _)| n != "i" && !PARAMS.contains(&n.as_str())) {
        return Err(ExprError::Syntax { line: *line, col: *col, msg: format!("`{name}` is not a scalar") });
    }
    let v = eval(&ast.node, &Ctx::Sym(VarPair::Qp))?;
    Ok(v.as_scalar().expect("no variables"))
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text, latex or json)")),
        }
    }
}

/// One printed term: `sign · |r| · (i)? · params · vars`.
struct Atom<'a> {
    negative: bool,
    magnitude: BigRational,
    imaginary: bool,
    params: Vec<(&'a str, i32)>,
    vars: Vec<(&'a str, u32)>,
}

fn atoms<'a>(reg: &'a Registry, vars: Vec<(&'a str, u32)>, c: &'a Coefficient, out: &mut Vec<Atom<'a>>) {
    let mut terms: Vec<_> = c.terms().collect();
    terms.sort_by(|a, b| b.0.cmp(a.0));
    for (exps, g) in terms {
        let params: Vec<(&str, i32)> =
            reg.names().iter().zip(exps.iter()).filter(|(_, &e)| e != 0).map(|(n, &e)| (n.as_str(), e)).collect();
        for (part, imaginary) in [(g.re(), false), (g.im(), true)] {
            if part.is_zero() {
                continue;
            }
            out.push(Atom {
                negative: part.is_negative(),
                magnitude: part.abs(),
                imaginary,
                params: params.clone(),
                vars: vars.clone(),
            });
        }
    }
}

fn text_atom(a: &Atom) -> String {
    let mut f: Vec<String> = Vec::new();
    let has_other = a.imaginary || a.params.iter().any(|(_, e)| *e > 0) || !a.vars.is_empty();
    if !a.magnitude.is_one() || !has_other {
        let r = format_rational(&a.magnitude);
        f.push(if a.magnitude.is_integer() { r } else { format!("({r})") });
    }
    if a.imaginary {
        f.push("i".into());
    }
    for (n, e) in &a.params {
        match *e {
            1 => f.push((*n).into()),
            e if e > 1 => f.push(format!("{n}^{e}")),
            _ => {}
        }
    }
    for (n, e) in &a.vars {
        f.push(if *e == 1 { (*n).into() } else { format!("{n}^{e}") });
    }
    let mut s = f.join("*");
    for (n, e) in &a.params {
        match *e {
            -1 => s.push_str(&format!("/{n}")),
            e if e < -1 => s.push_str(&format!("/{n}^{}", -e)),
            _ => {}
        }
    }
    s
}

fn latex_name(n: &str) -> String {
    match n {
        "hbar" => r"\hbar".into(),
        "sp" => "s'".into(),
        "xi" => r"\xi".into(),
        "eta" => r"\eta".into(),
        "qh" => r"\hat{q}".into(),
        "ph" => r"\hat{p}".into(),
        "dq" => r"\partial_{q}".into(),
        "dp" => r"\partial_{p}".into(),
        "dxi" => r"\partial_{\xi}".into(),
        "deta" => r"\partial_{\eta}".into(),
        other => other.into(),
    }
}

fn latex_power(n: &str, e: i64) -> String {
    let base = latex_name(n);
    if e == 1 {
        base
    } else if n == "sp" {
        format!("(s')^{{{e}}}")
    } else {
        format!("{base}^{{{e}}}")
    }
}

fn latex_atom(a: &Atom) -> String {
    let mut f: Vec<String> = Vec::new();
    let has_other = a.imaginary || !a.params.is_empty() || !a.vars.is_empty();
    if !a.magnitude.is_one() || !has_other {
        f.push(if a.magnitude.is_integer() {
            a.magnitude.numer().to_string()
        } else {
            format!(r"\frac{{{}}}{{{}}}", a.magnitude.numer(), a.magnitude.denom())
        });
    }
    if a.imaginary {
        f.push("i".into());
    }
    f.extend(a.params.iter().map(|(n, e)| latex_power(n, *e as i64)));
    f.extend(a.vars.iter().map(|(n, e)| latex_power(n, *e as i64)));
    f.join(" ")
}

fn join_atoms(atoms: &[Atom], render: fn(&Atom) -> String) -> String {
    if atoms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, a) in atoms.iter().enumerate() {
        let body = render(a);
        match (k, a.negative) {
            (0, false) => {}
            (0, true) => s.push('-'),
            (_, false) => s.push_str(" + "),
            (_, true) => s.push_str(" - "),
        }
        s.push_str(&body);
    }
    s
}

fn coefficient_atoms(c: &Coefficient) -> Vec<Atom<'_>> {
    let mut out = Vec::new();
    atoms(c.registry(), Vec::new(), c, &mut out);
    out
}

fn symbol_atoms(f: &Symbol) -> Vec<Atom<'_>> {
    let (a, b) = f.vars().names();
    let mut terms: Vec<_> = f.terms().collect();
    terms.sort_by(|x, y| y.0.cmp(x.0));
    let mut out = Vec::new();
    for (&(n, m), c) in terms {
        let vars: Vec<(&str, u32)> = [(a, n), (b, m)].into_iter().filter(|(_, e)| *e > 0).collect();
        atoms(c.registry(), vars, c, &mut out);
    }
    out
}

fn element_atoms(x: &CanonicalElement) -> Vec<Atom<'_>> {
    let sig = x.signature();
    let w = sig.width();
    // Coordinates first, then their partners; cross pairs commute so this is the normal form.
    let slots: Vec<usize> = (0..w).step_by(2).chain((1..w).step_by(2)).collect();
    let mut terms: Vec<_> = x.terms().collect();
    terms.sort_by(|a, b| b.0.cmp(a.0));
    let mut out = Vec::new();
    for (exps, c) in terms {
        let vars: Vec<(&str, u32)> =
            slots.iter().filter(|&&k| exps[k] > 0).map(|&k| (sig.generator_name(k), exps[k])).collect();
        atoms(c.registry(), vars, c, &mut out);
    }
    out
}

pub fn format_coefficient(c: &Coefficient) -> String {
    join_atoms(&coefficient_atoms(c), text_atom)
}

pub fn format_symbol(f: &Symbol) -> String {
    join_atoms(&symbol_atoms(f), text_atom)
}

pub fn format_element(x: &CanonicalElement) -> String {
    join_atoms(&element_atoms(x), text_atom)
}

pub fn latex_coefficient(c: &Coefficient) -> String {
    join_atoms(&coefficient_atoms(c), latex_atom)
}

pub fn latex_symbol(f: &Symbol) -> String {
    join_atoms(&symbol_atoms(f), latex_atom)
}

pub fn latex_element(x: &CanonicalElement) -> String {
    join_atoms(&element_atoms(x), latex_atom)
}

/// Renders a value in the requested format.
pub fn render(v: &Value, format: Format) -> String {
    match (format, v) {
        (Format::Text, Value::Symbol(s)) => format_symbol(s),
        (Format::Text, Value::Weyl(e) | Value::DiffOp(e)) => format_element(e),
        (Format::Latex, Value::Symbol(s)) => latex_symbol(s),
        (Format::Latex, Value::Weyl(e) | Value::DiffOp(e)) => latex_element(e),
        (Format::Json, v) => serde_json::to_string(v).expect("values serialize"),
    }
}

pub fn render_coefficient(c: &Coefficient, format: Format) -> String {
    match format {
        Format::Text => format_coefficient(c),
        Format::Latex => latex_coefficient(c),
        Format::Json => serde_json::to_string(c).expect("coefficients serialize"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{ordered_product, OrderParameter};
    use proptest::prelude::*;

    #[test]
    fn parses_symbol() {
        let f = parse_symbol("q^2*p - (3/2)*i*hbar").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.coefficient_of(2, 1), Coefficient::one());
        assert_eq!(f.coefficient_of(0, 0), Coefficient::i_hbar().scale(&GaussianRational::ratio(-3, 2)));
    }

    #[test]
    fn parses_weyl_in_written_order() {
        assert_eq!(format_element(&parse_weyl("ph*qh").unwrap()), "qh*ph - i*hbar");
    }

    #[test]
    fn parses_diffop() {
        let d = parse_diffop("q - i*(hbar/2)*(1-s)*dp").unwrap();
        assert_eq!(format_element(&d), "q + (1/2)*i*hbar*s*dp - (1/2)*i*hbar*dp");
    }

    #[test]
    fn printer_examples() {
        assert_eq!(format_symbol(&Symbol::qp(1, 1)), "q*p");
        let t = ordered_product(1, 1, &OrderParameter::int(0)).unwrap();
        assert_eq!(format_element(&t.value), "qh*ph - (1/2)*i*hbar");
        assert_eq!(format_symbol(&Symbol::zero(VarPair::Qp)), "0");
        assert_eq!(format_coefficient(&Coefficient::zero()), "0");
        assert_eq!(format_coefficient(&-Coefficient::i_hbar()), "-i*hbar");
        assert_eq!(format_coefficient(&Coefficient::ratio(3, 4)), "(3/4)");
        assert_eq!(format_coefficient(&Coefficient::from_int(-1)), "-1");
    }

    #[test]
    fn negative_parameter_powers_print_as_division() {
        let c = parse_coefficient("1/(4*hbar)").unwrap();
        assert_eq!(format_coefficient(&c), "(1/4)/hbar");
        let x = parse_weyl("(qh^2 + ph^2)/(4*hbar)").unwrap();
        assert_eq!(format_element(&x), "(1/4)*qh^2/hbar + (1/4)*ph^2/hbar");
        assert_eq!(parse_weyl(&format_element(&x)).unwrap(), x);
    }

    #[test]
    fn latex_output() {
        assert_eq!(latex_symbol(&parse_symbol("q^2*p - (3/2)*i*hbar").unwrap()), r"q^{2} p - \frac{3}{2} i \hbar");
        assert_eq!(latex_element(&parse_weyl("qh*ph").unwrap()), r"\hat{q} \hat{p}");
        assert_eq!(latex_coefficient(&Coefficient::s_prime().pow(2)), "(s')^{2}");
    }

    #[test]
    fn json_output() {
        let v = parse("q*p", Target::Symbol).unwrap();
        let js = render(&v, Format::Json);
        let back: Symbol = serde_json::from_str(&js).unwrap();
        assert_eq!(Value::Symbol(back), v);
    }

    #[test]
    fn xi_eta_variables() {
        let f = parse_symbol("xi*eta^2").unwrap();
        assert_eq!(f.vars(), VarPair::XiEta);
        assert_eq!(format_symbol(&f), "xi*eta^2");
        let d = parse_diffop("eta*dxi").unwrap();
        assert_eq!(format_element(&d), "eta*dxi");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_symbol("q +"), Err(ExprError::Syntax { line: 1, col: 4, .. })));
        assert!(matches!(parse_symbol("q\n  * )"), Err(ExprError::Syntax { line: 2, col: 5, .. })));
        assert!(matches!(parse_symbol("q^-1"), Err(ExprError::NegativeExponent { .. })));
        assert!(matches!(parse_symbol("qh*p"), Err(ExprError::WrongTarget { .. })));
        assert!(matches!(parse_weyl("q"), Err(ExprError::WrongTarget { .. })));
        assert!(matches!(parse_symbol("q*dq"), Err(ExprError::WrongTarget { .. })));
        assert!(matches!(parse_symbol("q*xi"), Err(ExprError::MixedVariables { .. })));
        assert!(matches!(parse_symbol("q/p"), Err(ExprError::NonScalarDivisor { .. })));
        assert!(matches!(parse_symbol("q/(1+hbar)"), Err(ExprError::Coeff { .. })));
        assert!(matches!(parse_symbol("q/0"), Err(ExprError::Coeff { .. })));
        assert!(matches!(parse_symbol("q 2"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_symbol("z"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_symbol("q^2^3"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_symbol("q $ p"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_symbol("-q^2").unwrap(), Symbol::qp(2, 0).scale(&Coefficient::from_int(-1)));
        assert_eq!(parse_symbol("2*q - 3*p + 1").unwrap(), parse_symbol("1 + (2*q) - (3*p)").unwrap());
        assert_eq!(parse_coefficient("1/2/3").unwrap(), Coefficient::ratio(1, 6));
        assert_eq!(parse_weyl("-qh*ph").unwrap(), -&parse_weyl("qh*ph").unwrap());
    }

    fn arb_coeff() -> impl Strategy<Value = Coefficient> {
        let reg = Registry::standard();
        prop::collection::vec(((-1i32..3, 0i32..2, 0i32..2), -5i64..6, -5i64..6, 1i64..4), 0..3).prop_map(move |ts| {
            Coefficient::from_terms(
                &reg,
                ts.into_iter().map(|((a, b, c), re, im, d)| {
                    (vec![a, b, c], &GaussianRational::ratio(re, d) + &(&GaussianRational::ratio(im, d) * &GaussianRational::i()))
                }),
            )
        })
    }

    proptest! {
        #[test]
        fn symbol_round_trip(ts in prop::collection::vec(((0u32..4, 0u32..4), arb_coeff()), 0..5)) {
            let f = Symbol::from_terms(VarPair::Qp, ts);
            prop_assert_eq!(parse_symbol(&format_symbol(&f)).unwrap(), f);
        }

        #[test]
        fn weyl_round_trip(ts in prop::collection::vec(((0u32..4, 0u32..4), arb_coeff()), 0..5)) {
            let sig = AlgebraSignature::weyl();
            let x = CanonicalElement::from_terms(&sig, ts.into_iter().map(|((a, b), c)| (vec![a, b], c)));
            prop_assert_eq!(parse_weyl(&format_element(&x)).unwrap(), x);
        }

        #[test]
        fn diffop_round_trip(ts in prop::collection::vec(((0u32..3, 0u32..3, 0u32..2, 0u32..2), arb_coeff()), 0..5)) {
            let sig = diff_qp();
            let x = CanonicalElement::from_terms(&sig, ts.into_iter().map(|((a, b, c, d), k)| (vec![a, b, c, d], k)));
            prop_assert_eq!(parse_diffop(&format_element(&x)).unwrap(), x);
        }

        #[test]
        fn coefficient_round_trip(c in arb_coeff()) {
            prop_assert_eq!(parse_coefficient(&format_coefficient(&c)).unwrap(), c);
        }
    }
}
