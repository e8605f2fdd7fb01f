//! A small expression language for warp functions and immersion components.
//!
//! Expressions are built from real literals, declared variables, the constant
//! `pi`, the operators `+ - * /`, unary minus, `^` with a constant rational
//! exponent, and the functions `sin cos sinh cosh tanh exp log sqrt arcsin
//! arctan`. Precedence from tightest: `^` (right associative), unary minus,
//! `* /`, `+ -` (left associative).
//!
//! ```
//! use warpsimons::exprlang::{parse, JetEnv};
//! use warpsimons::jets::JetShape;
//!
//! let e = parse("cosh(sqrt(k)*t)/sqrt(k)", &["t", "k"]).unwrap();
//! let shape = JetShape::new(1, 2).unwrap();
//! let env = JetEnv::new(shape).with_const("k", 4.0).with_seed("t", 0, 0.0).unwrap();
//! let a = e.eval_jet(&env).unwrap();
//! assert!((a.value() - 0.5).abs() < 1e-15);
//! ```

mod diff;
mod display;
mod eval;
mod parser;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::jets::JetError;

pub use eval::JetEnv;
pub use parser::parse;

/// Exponent of a power node, reduced, with denominator 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const MAX_DEN: i64 = 3;

    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den <= 0 || den > Self::MAX_DEN {
            return None;
        }
        let g = gcd(num.abs(), den);
        Some(Self { num: num / g, den: den / g })
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    /// Closest representable rational, if `value` is one to 1e-9.
    pub fn from_f64(value: f64) -> Option<Self> {
        (1..=Self::MAX_DEN).find_map(|den| {
            let scaled = value * den as f64;
            let n = scaled.round();
            ((scaled - n).abs() < 1e-9 && n.abs() < 1e12).then(|| Self::new(n as i64, den)).flatten()
        })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    fn minus_one(self) -> Self {
        Self { num: self.num - self.den, den: self.den }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Arcsin,
    Arctan,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Arcsin,
        Func::Arctan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Arcsin => "arcsin",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}; declared variables: [{}]", declared.join(", "))]
    UnknownIdentifier { name: String, offset: usize, declared: Vec<String> },
    #[error("bad exponent at byte {offset}: {message}")]
    Exponent { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Exponent { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{func} outside its domain at {value}")]
    Domain { func: &'static str, value: f64 },
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    /// Variables referenced by the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Num(_) | Expr::Pi => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self {
            Expr::Var(v) => v == var,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Replaces every occurrence of variable `name` by `replacement`.
    pub fn substitute(&self, name: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(v) if v == name => replacement.clone(),
            Expr::Var(_) | Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(name, replacement))),
            Expr::Pow(a, r) => Expr::Pow(Box::new(a.substitute(name, replacement)), *r),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(name, replacement))),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.substitute(name, replacement)), Box::new(b.substitute(name, replacement)))
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Num(_) | Expr::Pi => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}
