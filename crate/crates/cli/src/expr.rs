//! Expression language over catalog keys.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | chain
//! chain  := atom ('.' atom)*            composition, tighter than arithmetic
//! atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Names are catalog keys, `x` / `id` (identity) and the constants `pi`, `e`.
//! Calls are `inv(e)`, `d(e)`, `int(e, lo, hi)` and `iter(e, n)`.

use std::f64::consts::{E, PI};
use std::fmt;

use fnalg::{
    add, antiderivative_with, catalog, compose, constant, definite_integral, div, identity, iterate, mul, neg, sub,
    Error, Function, QuadratureConfig,
};
use thiserror::Error;

/// Half-open character range `[start, end)` in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("in `{text}` (chars {span}): {source}")]
    Build {
        span: Span,
        text: String,
        #[source]
        source: Error,
    },

    #[error("in `{text}` (chars {span}): {source}")]
    Eval {
        span: Span,
        text: String,
        #[source]
        source: Error,
    },
}

impl ExprError {
    pub fn span(&self) -> Option<Span> {
        match self {
            ExprError::Parse { position, .. } => Some(Span {
                start: *position,
                end: *position + 1,
            }),
            ExprError::Build { span, .. } | ExprError::Eval { span, .. } => Some(*span),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // A '.' continues the number only when a digit follows; otherwise
            // it is the composition operator.
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| ExprError::Parse {
                position: start,
                message: format!("bad number {text:?}"),
            })?;
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
                end: i,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                pos: start,
                end: i,
            });
        } else if "+-*/.(),".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                pos: i,
                end: i + 1,
            });
            i += 1;
        } else {
            return Err(ExprError::Parse {
                position: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len(),
        end: chars.len(),
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Name(String),
    Call(String, Vec<Ast>),
    Binary(char, Box<Ast>, Box<Ast>),
    Compose(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub node: Node,
    pub span: Span,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected '{c}', found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Sym(op @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Sym(op @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if *self.peek() == Tok::Sym('-') {
            let start = self.bump().pos;
            let inner = self.unary()?;
            let span = Span {
                start,
                end: inner.span.end,
            };
            return Ok(Ast {
                node: Node::Neg(Box::new(inner)),
                span,
            });
        }
        self.chain()
    }

    fn chain(&mut self) -> Result<Ast, ExprError> {
        let first = self.atom()?;
        let mut parts = vec![first];
        while *self.peek() == Tok::Sym('.') {
            self.bump();
            parts.push(self.atom()?);
        }
        // f.g.h groups as f.(g.h); the result is the same function either way.
        let mut acc = parts.pop().expect("at least one atom");
        while let Some(f) = parts.pop() {
            let span = Span {
                start: f.span.start,
                end: acc.span.end,
            };
            acc = Ast {
                node: Node::Compose(Box::new(f), Box::new(acc)),
                span,
            };
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Ast {
                node: Node::Num(v),
                span: Span {
                    start: t.pos,
                    end: t.end,
                },
            }),
            Tok::Name(name) => {
                let end = t.end;
                if *self.peek() != Tok::Sym('(') {
                    return Ok(Ast {
                        node: Node::Name(name),
                        span: Span { start: t.pos, end },
                    });
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Sym(',') {
                    self.bump();
                    args.push(self.expr()?);
                }
                let close = self.pos();
                self.expect(')')?;
                Ok(Ast {
                    node: Node::Call(name, args),
                    span: Span {
                        start: t.pos,
                        end: close + 1,
                    },
                })
            }
            Tok::Sym('(') => {
                let inner = self.expr()?;
                let close = self.pos();
                self.expect(')')?;
                Ok(Ast {
                    span: Span {
                        start: t.pos,
                        end: close + 1,
                    },
                    ..inner
                })
            }
            other => Err(ExprError::Parse {
                position: t.pos,
                message: format!("expected a function, number or '(', found {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Name(n) => format!("name '{n}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

fn binary(op: char, l: Ast, r: Ast) -> Ast {
    let span = Span {
        start: l.span.start,
        end: r.span.end,
    };
    Ast {
        node: Node::Binary(op, Box::new(l), Box::new(r)),
        span,
    }
}

pub fn parse(src: &str) -> Result<Ast, ExprError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(format!("unexpected {}", describe(p.peek())));
    }
    Ok(ast)
}

/// A built expression: the function object for every node, kept so that
/// evaluation failures can be traced back to a subexpression.
pub struct Built {
    pub function: Function,
    span: Span,
    kind: BuiltKind,
}

enum BuiltKind {
    Leaf,
    Compose(Box<Built>, Box<Built>),
    Binary(Box<Built>, Box<Built>),
    Neg(Box<Built>),
    /// Calls whose inner structure is not visible from outside (inv, d, int, iter).
    Opaque(Vec<Built>),
}

#[derive(Debug)]
pub struct Builder<'a> {
    pub src: &'a str,
    pub quadrature: QuadratureConfig,
}

impl Builder<'_> {
    fn text(&self, span: Span) -> String {
        self.src.chars().skip(span.start).take(span.end - span.start).collect()
    }

    fn err(&self, span: Span, source: Error) -> ExprError {
        ExprError::Build {
            span,
            text: self.text(span),
            source,
        }
    }

    pub fn build(&self, ast: &Ast) -> Result<Built, ExprError> {
        let span = ast.span;
        let leaf = |function| Built {
            function,
            span,
            kind: BuiltKind::Leaf,
        };
        Ok(match &ast.node {
            Node::Num(v) => leaf(constant(*v)),
            Node::Name(n) => leaf(self.name(n, span)?),
            Node::Neg(inner) => {
                let b = self.build(inner)?;
                Built {
                    function: neg(&b.function),
                    span,
                    kind: BuiltKind::Neg(Box::new(b)),
                }
            }
            Node::Compose(f, g) => {
                let (f, g) = (self.build(f)?, self.build(g)?);
                Built {
                    function: compose(&f.function, &g.function),
                    span,
                    kind: BuiltKind::Compose(Box::new(f), Box::new(g)),
                }
            }
            Node::Binary(op, l, r) => {
                let (l, r) = (self.build(l)?, self.build(r)?);
                let function = match op {
                    '+' => add(&l.function, &r.function),
                    '-' => sub(&l.function, &r.function),
                    '*' => mul(&l.function, &r.function),
                    _ => div(&l.function, &r.function),
                };
                Built {
                    function,
                    span,
                    kind: BuiltKind::Binary(Box::new(l), Box::new(r)),
                }
            }
            Node::Call(name, args) => self.call(name, args, span)?,
        })
    }

    fn name(&self, n: &str, span: Span) -> Result<Function, ExprError> {
        Ok(match n {
            "x" | "id" => identity(),
            "pi" => constant(PI),
            "e" => constant(E),
            key => match catalog().lookup(key) {
                Ok(entry) => entry.function().cloned().ok_or_else(|| {
                    self.err(
                        span,
                        Error::InvalidArgument(format!("'{key}' is not a real-to-real function")),
                    )
                })?,
                Err(e) => return Err(self.err(span, e)),
            },
        })
    }

    fn arity(&self, name: &str, args: &[Ast], n: usize, span: Span) -> Result<(), ExprError> {
        if args.len() != n {
            return Err(self.err(
                span,
                Error::InvalidArgument(format!("{name} takes {n} argument(s), got {}", args.len())),
            ));
        }
        Ok(())
    }

    fn call(&self, name: &str, args: &[Ast], span: Span) -> Result<Built, ExprError> {
        let opaque = |function, parts| Built {
            function,
            span,
            kind: BuiltKind::Opaque(parts),
        };
        match name {
            "inv" => {
                self.arity(name, args, 1, span)?;
                let inner = self.build(&args[0])?;
                let f = inner.function.inverse().map_err(|e| self.err(args[0].span, e))?;
                Ok(opaque(f, vec![inner]))
            }
            "d" => {
                self.arity(name, args, 1, span)?;
                let inner = self.build(&args[0])?;
                let f = inner.function.derivative().map_err(|e| self.err(args[0].span, e))?;
                Ok(opaque(f, vec![inner]))
            }
            "iter" => {
                self.arity(name, args, 2, span)?;
                let inner = self.build(&args[0])?;
                let n = match args[1].node {
                    Node::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e6 => v as usize,
                    _ => {
                        return Err(self.err(
                            args[1].span,
                            Error::InvalidArgument("iteration count must be a non-negative integer literal".into()),
                        ))
                    }
                };
                Ok(opaque(iterate(&inner.function, n), vec![inner]))
            }
            "int" => {
                self.arity(name, args, 3, span)?;
                let integrand = self.build(&args[0])?;
                let lo = self.build(&args[1])?;
                let hi = self.build(&args[2])?;
                let cfg = self.quadrature;
                let f = match (constant_value(&args[1]), is_identity(&args[2])) {
                    // int(f, a, x) is the antiderivative object from base a.
                    (Some(a), true) => antiderivative_with(&integrand.function, a, cfg),
                    _ => {
                        let (g, l, h) = (integrand.function.clone(), lo.function.clone(), hi.function.clone());
                        Function::builder(move |x| definite_integral(&g, l.apply(x)?, h.apply(x)?, &cfg))
                            .name(format!("int({},{},{})", integrand.function, lo.function, hi.function))
                            .build()
                    }
                };
                Ok(opaque(f, vec![integrand, lo, hi]))
            }
            other => Err(self.err(
                span,
                Error::InvalidArgument(format!("unknown operator '{other}'; expected inv, d, int or iter")),
            )),
        }
    }

    /// Evaluates, attributing a failure to the innermost subexpression that
    /// fails on the values it actually receives.
    pub fn eval(&self, built: &Built, x: f64) -> Result<f64, ExprError> {
        built.function.apply(x).map_err(|e| {
            let span = locate(built, x).unwrap_or(built.span);
            ExprError::Eval {
                span,
                text: self.text(span),
                source: e,
            }
        })
    }
}

fn constant_value(a: &Ast) -> Option<f64> {
    match &a.node {
        Node::Num(v) => Some(*v),
        Node::Name(n) if n == "pi" => Some(PI),
        Node::Name(n) if n == "e" => Some(E),
        Node::Neg(inner) => constant_value(inner).map(|v| -v),
        _ => None,
    }
}

fn is_identity(a: &Ast) -> bool {
    matches!(&a.node, Node::Name(n) if n == "x" || n == "id" || n == "identity")
}

fn locate(b: &Built, x: f64) -> Option<Span> {
    b.function.apply(x).err()?;
    Some(match &b.kind {
        BuiltKind::Leaf => b.span,
        BuiltKind::Neg(inner) => locate(inner, x).unwrap_or(b.span),
        BuiltKind::Compose(f, g) => match g.function.apply(x) {
            Err(_) => locate(g, x).unwrap_or(g.span),
            Ok(y) => locate(f, y).unwrap_or(b.span),
        },
        BuiltKind::Binary(l, r) => locate(l, x).or_else(|| locate(r, x)).unwrap_or(b.span),
        BuiltKind::Opaque(parts) => parts.iter().skip(1).find_map(|p| locate(p, x)).unwrap_or(b.span),
    })
}

/// Parses and builds `src` with the given quadrature settings.
pub fn compile(src: &str, quadrature: QuadratureConfig) -> Result<(Builder<'_>, Built), ExprError> {
    let ast = parse(src)?;
    let builder = Builder { src, quadrature };
    let built = builder.build(&ast)?;
    Ok((builder, built))
}

/// Evaluates a closed expression (no free `x` is expected; it is set to 0).
pub fn constant_expr(src: &str, quadrature: QuadratureConfig) -> Result<f64, ExprError> {
    let (b, built) = compile(src, quadrature)?;
    b.eval(&built, 0.0)
}

impl fmt::Debug for Built {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Built")
            .field("function", &self.function)
            .field("span", &self.span)
            .finish()
    }
}
