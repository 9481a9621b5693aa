//! A small expression language for the sides of registered identities.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | '(' expr ')' | func '(' expr ')' | 'rel(' id ')' | name
//! ```
//!
//! Functions: `tr`, `rc` (`r M c`), `det`, `rank`. Matrix names: `I`, `cr`
//! and words over `A, B` (traceless parts), `X, Y` (the pair) and
//! `C = [A, B]`, e.g. `AABAB`. Scalar names: `n`, `v`, `w`, `a1`..`a9`.
//! `rel(id)` is the residual of a named relation (`id1z.3`, `rel.new`, ...).

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::invariants::{invariant_tuple, traceless_pair, InvariantTuple};
use crate::matrix::{commutator, det, outer, rank, sandwich, Matrix, Vector};
use crate::relations::all_residuals;
use crate::scalar::{Scalar, TolerancePolicy};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Scalar(ScalarName),
    Identity,
    RankOne,
    Word(Vec<WordLetter>),
    Call(Func, Box<Expr>),
    Rel(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarName {
    N,
    V,
    W,
    A(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordLetter {
    A,
    B,
    X,
    Y,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Tr,
    Rc,
    Det,
    Rank,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Name(String),
    RelId(String),
    Sym(char),
}

fn err(src: &str, message: impl Into<String>) -> Error {
    Error::Expression {
        expr: src.to_string(),
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Int(s.parse().expect("digits")));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if name == "rel" {
                let open = chars[i..]
                    .iter()
                    .position(|c| !c.is_whitespace())
                    .map(|k| i + k);
                let Some(open) = open.filter(|&k| chars[k] == '(') else {
                    return Err(err(src, "rel must be followed by (id)"));
                };
                let close = chars[open..]
                    .iter()
                    .position(|&c| c == ')')
                    .map(|k| open + k)
                    .ok_or_else(|| err(src, "unterminated rel("))?;
                let id: String = chars[open + 1..close].iter().collect();
                out.push(Token::RelId(id.trim().to_string()));
                i = close + 1;
            } else {
                out.push(Token::Name(name));
            }
        } else if "+-*/^()".contains(ch) {
            out.push(Token::Sym(ch));
            i += 1;
        } else {
            return Err(err(src, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

struct Parser<'s> {
    src: &'s str,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(
                self.src,
                format!("expected {c:?} at token {}", self.pos),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Int(k)) => {
                    self.pos += 1;
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| err(self.src, "exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => Err(err(self.src, "exponent must be a non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| err(self.src, "unexpected end"))?;
        self.pos += 1;
        match tok {
            Token::Int(k) => Ok(Expr::Int(k)),
            Token::RelId(id) => Ok(Expr::Rel(id)),
            Token::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Sym(c) => Err(err(self.src, format!("unexpected {c:?}"))),
            Token::Name(name) => {
                let func = match name.as_str() {
                    "tr" => Some(Func::Tr),
                    "rc" => Some(Func::Rc),
                    "det" => Some(Func::Det),
                    "rank" => Some(Func::Rank),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(f, Box::new(e)));
                }
                name_atom(self.src, &name)
            }
        }
    }
}

fn name_atom(src: &str, name: &str) -> Result<Expr> {
    match name {
        "n" => return Ok(Expr::Scalar(ScalarName::N)),
        "v" => return Ok(Expr::Scalar(ScalarName::V)),
        "w" => return Ok(Expr::Scalar(ScalarName::W)),
        "I" => return Ok(Expr::Identity),
        "cr" => return Ok(Expr::RankOne),
        _ => {}
    }
    if let Some(k) = name.strip_prefix('a').and_then(|d| d.parse::<usize>().ok()) {
        if (1..=9).contains(&k) {
            return Ok(Expr::Scalar(ScalarName::A(k)));
        }
    }
    name.chars()
        .map(|c| match c {
            'A' => Ok(WordLetter::A),
            'B' => Ok(WordLetter::B),
            'X' => Ok(WordLetter::X),
            'Y' => Ok(WordLetter::Y),
            'C' => Ok(WordLetter::C),
            _ => Err(err(src, format!("unknown name {name:?}"))),
        })
        .collect::<Result<Vec<_>>>()
        .map(Expr::Word)
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src,
        tokens: tokenize(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(err(src, format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value<T> {
    Scalar(T),
    Matrix(Matrix<T>),
}

/// Everything an expression may refer to for one witness.
pub struct Env<T> {
    pub x: Matrix<T>,
    pub y: Matrix<T>,
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub col: Option<Vector<T>>,
    pub row: Option<Vector<T>>,
    pub inv: InvariantTuple<T>,
}

impl<T: Scalar> Env<T> {
    pub fn new(
        x: Matrix<T>,
        y: Matrix<T>,
        col: Option<Vector<T>>,
        row: Option<Vector<T>>,
    ) -> Result<Self> {
        let (a, b) = traceless_pair(&x, &y)?;
        let c = commutator(&a, &b)?;
        let inv = invariant_tuple(&x, &y)?;
        Ok(Env {
            x,
            y,
            a,
            b,
            c,
            col,
            row,
            inv,
        })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    fn factors(&self, src: &str) -> Result<(&Vector<T>, &Vector<T>)> {
        match (&self.col, &self.row) {
            (Some(c), Some(r)) => Ok((c, r)),
            _ => Err(err(src, "witness has no rank-one factors c, r")),
        }
    }

    pub fn eval(&self, e: &Expr, src: &str) -> Result<Value<T>> {
        use Value::{Matrix as M, Scalar as S};
        let n = self.n();
        Ok(match e {
            Expr::Int(k) => S(T::from_rational(&crate::scalar::Rational::from_integer(
                k.clone(),
            ))),
            Expr::Scalar(ScalarName::N) => S(T::from_i64(n as i64)),
            Expr::Scalar(ScalarName::V) => S(self.inv.v.clone()),
            Expr::Scalar(ScalarName::W) => S(self.inv.w.clone()),
            Expr::Scalar(ScalarName::A(k)) => S(self.inv.a[k - 1].clone()),
            Expr::Identity => M(Matrix::identity(n)),
            Expr::RankOne => {
                let (c, r) = self.factors(src)?;
                M(outer(c, r)?)
            }
            Expr::Word(letters) => {
                let mut acc = Matrix::identity(n);
                for l in letters {
                    let m = match l {
                        WordLetter::A => &self.a,
                        WordLetter::B => &self.b,
                        WordLetter::X => &self.x,
                        WordLetter::Y => &self.y,
                        WordLetter::C => &self.c,
                    };
                    acc = &acc * m;
                }
                M(acc)
            }
            Expr::Rel(id) => {
                if n != 3 {
                    return Err(err(src, "relations are defined for 3x3 pairs only"));
                }
                let res = all_residuals(&self.inv.reduced(), &self.inv.v, &self.inv.w);
                S(res
                    .get(id)
                    .cloned()
                    .ok_or_else(|| err(src, format!("unknown relation {id:?}")))?)
            }
            Expr::Call(f, inner) => {
                let m = match self.eval(inner, src)? {
                    M(m) => m,
                    S(_) => return Err(err(src, "function argument must be a matrix")),
                };
                match f {
                    Func::Tr => S(m.trace()),
                    Func::Det => S(det(&m)),
                    Func::Rank => S(T::from_i64(rank(&m, &TolerancePolicy::default()) as i64)),
                    Func::Rc => {
                        let (c, r) = self.factors(src)?;
                        S(sandwich(r, &m, c)?)
                    }
                }
            }
            Expr::Neg(inner) => match self.eval(inner, src)? {
                S(s) => S(-s),
                M(m) => M(-&m),
            },
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                let sub = matches!(e, Expr::Sub(..));
                match (self.eval(l, src)?, self.eval(r, src)?) {
                    (S(x), S(y)) => S(if sub { x - y } else { x + y }),
                    (M(x), M(y)) => M(if sub { &x - &y } else { &x + &y }),
                    _ => return Err(err(src, "cannot add a scalar and a matrix")),
                }
            }
            Expr::Mul(l, r) => match (self.eval(l, src)?, self.eval(r, src)?) {
                (S(x), S(y)) => S(x * y),
                (S(s), M(m)) | (M(m), S(s)) => M(m.scale(&s)),
                (M(x), M(y)) => M(&x * &y),
            },
            Expr::Div(l, r) => {
                let d = match self.eval(r, src)? {
                    S(d) if !d.is_zero() => d,
                    S(_) => return Err(err(src, "division by zero")),
                    M(_) => return Err(err(src, "cannot divide by a matrix")),
                };
                match self.eval(l, src)? {
                    S(x) => S(x / d),
                    M(m) => M(m.scale(&(T::one() / d))),
                }
            }
            Expr::Pow(base, k) => match self.eval(base, src)? {
                S(s) => S((0..*k).fold(T::one(), |acc, _| acc * s.clone())),
                M(m) => M(m.pow(*k)),
            },
        })
    }
}
