use std::fmt;

use super::{BinOp, Expr};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => ADD,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Pow(..) => 4,
        Expr::Num(v) if v.is_sign_negative() => NEG,
        _ => ATOM,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed for `parse` to rebuild the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, NEG)
            }
            Expr::Binary(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => (" + ", ADD),
                    BinOp::Sub => (" - ", ADD),
                    BinOp::Mul => (" * ", MUL),
                    BinOp::Div => (" / ", MUL),
                };
                child(f, a, prec)?;
                f.write_str(sym)?;
                child(f, b, prec + 1)
            }
            Expr::Pow(a, r) => {
                child(f, a, ATOM)?;
                match (r.num(), r.den()) {
                    (n, 1) if n >= 0 => write!(f, "^{n}"),
                    (n, 1) => write!(f, "^({n})"),
                    (n, d) => write!(f, "^({n}/{d})"),
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
