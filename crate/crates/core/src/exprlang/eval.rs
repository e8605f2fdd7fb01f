use std::collections::{BTreeMap, HashMap};

use super::{BinOp, EvalError, Expr, Func};
use crate::jets::{Elementary, Jet, JetError, JetShape};

/// Variable bindings for jet evaluation. Every bound jet has the same shape.
#[derive(Debug, Clone)]
pub struct JetEnv {
    shape: JetShape,
    bindings: BTreeMap<String, Jet>,
}

impl JetEnv {
    pub fn new(shape: JetShape) -> Self {
        Self { shape, bindings: BTreeMap::new() }
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    /// Binds `name` to a constant jet.
    pub fn with_const(mut self, name: &str, value: f64) -> Self {
        self.bindings.insert(name.to_string(), self.shape.constant(value));
        self
    }

    /// Binds `name` to the coordinate jet of variable `var` at `value`.
    pub fn with_seed(mut self, name: &str, var: usize, value: f64) -> Result<Self, JetError> {
        let jet = self.shape.seed(var, value)?;
        self.bindings.insert(name.to_string(), jet);
        Ok(self)
    }

    pub fn bind(&mut self, name: &str, jet: Jet) -> Result<(), JetError> {
        if jet.shape() != self.shape {
            return Err(JetError::ShapeMismatch { left: self.shape, right: jet.shape() });
        }
        self.bindings.insert(name.to_string(), jet);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Jet> {
        self.bindings.get(name)
    }
}

fn elementary(f: Func) -> Elementary {
    match f {
        Func::Sin => Elementary::Sin,
        Func::Cos => Elementary::Cos,
        Func::Sinh => Elementary::Sinh,
        Func::Cosh => Elementary::Cosh,
        Func::Tanh => Elementary::Tanh,
        Func::Exp => Elementary::Exp,
        Func::Log => Elementary::Log,
        Func::Sqrt => Elementary::Sqrt,
        Func::Arcsin => Elementary::Arcsin,
        Func::Arctan => Elementary::Arctan,
    }
}

impl Expr {
    /// Evaluates the expression as a truncated Taylor expansion.
    pub fn eval_jet(&self, env: &JetEnv) -> Result<Jet, EvalError> {
        Ok(match self {
            Expr::Num(v) => env.shape.constant(*v),
            Expr::Pi => env.shape.constant(std::f64::consts::PI),
            Expr::Var(name) => env.get(name).cloned().ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Expr::Neg(a) => -a.eval_jet(env)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_jet(env)?, b.eval_jet(env)?);
                match op {
                    BinOp::Add => a.try_add(&b)?,
                    BinOp::Sub => a.try_sub(&b)?,
                    BinOp::Mul => a.try_mul(&b)?,
                    BinOp::Div => a.try_div(&b)?,
                }
            }
            Expr::Pow(a, r) => a.eval_jet(env)?.pow_rational(r.num(), r.den())?,
            Expr::Call(f, a) => a.eval_jet(env)?.apply(elementary(*f))?,
        })
    }

    /// Plain floating-point evaluation with the same domain rules as
    /// [`Expr::eval_jet`].
    pub fn eval_f64(&self, env: &HashMap<String, f64>) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(name) => *env.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Expr::Neg(a) => -a.eval_f64(env)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_f64(env)?, b.eval_f64(env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::Domain { func: "div", value: b });
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(a, r) => {
                let x = a.eval_f64(env)?;
                if r.is_integer() {
                    if x == 0.0 && r.num() < 0 {
                        return Err(EvalError::Domain { func: "pow", value: x });
                    }
                    x.powi(r.num() as i32)
                } else if x > 0.0 {
                    x.powf(r.to_f64())
                } else if x < 0.0 && r.den() % 2 != 0 {
                    let y = (-x).powf(r.to_f64());
                    if r.num() % 2 != 0 {
                        -y
                    } else {
                        y
                    }
                } else {
                    return Err(EvalError::Domain { func: "pow", value: x });
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_f64(env)?;
                let bad = match f {
                    Func::Log | Func::Sqrt => x <= 0.0,
                    Func::Arcsin => x.abs() >= 1.0,
                    _ => false,
                };
                if bad {
                    return Err(EvalError::Domain { func: f.name(), value: x });
                }
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Arcsin => x.asin(),
                    Func::Arctan => x.atan(),
                }
            }
        })
    }
}
