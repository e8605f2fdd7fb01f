use super::{BinOp, Expr, Func, Rational};

fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(v)
    }
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(a) => as_num(a).map(|v| -v),
        _ => None,
    }
}

fn neg(a: Expr) -> Expr {
    match as_num(&a) {
        Some(v) => num(-v),
        None => match a {
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        },
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x - y),
        (Some(0.0), _) => neg(b),
        (_, Some(0.0)) => a,
        _ => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(-1.0), _) => neg(b),
        (_, Some(-1.0)) => neg(a),
        _ => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(0.0), _) => Expr::Num(0.0),
        (_, Some(1.0)) => a,
        _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, r: Rational) -> Expr {
    match (r.num(), r.den()) {
        (0, _) => Expr::Num(1.0),
        (1, 1) => a,
        _ => Expr::Pow(Box::new(a), r),
    }
}

fn call(f: Func, a: &Expr) -> Expr {
    Expr::Call(f, Box::new(a.clone()))
}

impl Expr {
    /// Symbolic partial derivative with respect to `var`, lightly simplified
    /// (constant folding and removal of zero and unit factors).
    pub fn diff(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::Num(0.0);
        }
        match self {
            Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
            Expr::Var(_) => Expr::Num(1.0),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.diff(var), b.diff(var));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b), mul(a, db)),
                    BinOp::Div => {
                        if !b.depends_on(var) {
                            div(da, b)
                        } else {
                            div(sub(mul(da, b.clone()), mul(a, db)), pow(b, Rational::integer(2)))
                        }
                    }
                }
            }
            Expr::Pow(a, r) => {
                let outer = mul(num(r.to_f64()), pow((**a).clone(), r.minus_one()));
                mul(outer, a.diff(var))
            }
            Expr::Call(f, a) => {
                let inner = a.diff(var);
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Sinh => call(Func::Cosh, a),
                    Func::Cosh => call(Func::Sinh, a),
                    Func::Tanh => pow(call(Func::Cosh, a), Rational::integer(-2)),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(Expr::Num(1.0), (**a).clone()),
                    Func::Sqrt => div(Expr::Num(0.5), call(Func::Sqrt, a)),
                    Func::Arcsin => pow(
                        sub(Expr::Num(1.0), pow((**a).clone(), Rational::integer(2))),
                        Rational::new(-1, 2).expect("valid exponent"),
                    ),
                    Func::Arctan => div(Expr::Num(1.0), add(Expr::Num(1.0), pow((**a).clone(), Rational::integer(2)))),
                };
                mul(outer, inner)
            }
        }
    }
}
