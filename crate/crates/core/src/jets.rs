//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor polynomial of a scalar quantity around a base
//! point, truncated at total order `degree` (at most 4) in up to six
//! variables. Coefficients are plain monomial coefficients: the coefficient
//! stored for `u0^k0 * u1^k1 * ...` is the mixed partial divided by
//! `k0! k1! ...`, so multiplication is an ordinary truncated convolution.
//!
//! Storage is dense. Monomials are ranked in graded order (all order-0
//! monomials, then order 1, ...), and every convolution sums its products in
//! ascending rank of the left factor. Because the ranking of low-order
//! monomials does not depend on the degree, evaluating an expression at
//! degree 4 and discarding the order-4 part reproduces the degree-3 result
//! bit for bit.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported number of jet variables.
pub const MAX_VARS: usize = 6;
/// Largest supported truncation degree.
pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: JetShape, right: JetShape },
    #[error("unsupported jet shape: {num_vars} variables at degree {degree} (limits {MAX_VARS} and {MAX_DEGREE})")]
    UnsupportedShape { num_vars: usize, degree: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    VarIndex { index: usize, num_vars: usize },
    #[error("singularity in {op}: constant term {value}")]
    Singularity { op: &'static str, value: f64 },
}

/// Number of variables and truncation degree of a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JetShape {
    num_vars: usize,
    degree: usize,
}

impl fmt::Display for JetShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} vars, degree {})", self.num_vars, self.degree)
    }
}

impl JetShape {
    pub fn new(num_vars: usize, degree: usize) -> Result<Self, JetError> {
        if num_vars == 0 || num_vars > MAX_VARS || degree > MAX_DEGREE {
            return Err(JetError::UnsupportedShape { num_vars, degree });
        }
        Ok(Self { num_vars, degree })
    }

    pub fn num_vars(self) -> usize {
        self.num_vars
    }

    pub fn degree(self) -> usize {
        self.degree
    }

    /// Number of stored coefficients, `C(num_vars + degree, degree)`.
    pub fn len(self) -> usize {
        table(self).monomials.len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn constant(self, value: f64) -> Jet {
        let table = table(self);
        let mut coeffs = vec![0.0; table.monomials.len()];
        coeffs[0] = value;
        Jet { table, coeffs }
    }

    pub fn zero(self) -> Jet {
        self.constant(0.0)
    }

    /// The coordinate function `u_var` expanded at `value`.
    pub fn seed(self, var: usize, value: f64) -> Result<Jet, JetError> {
        if var >= self.num_vars {
            return Err(JetError::VarIndex { index: var, num_vars: self.num_vars });
        }
        let mut jet = self.constant(value);
        if self.degree > 0 {
            let idx = jet.table.linear[var];
            jet.coeffs[idx] = 1.0;
        }
        Ok(jet)
    }

    /// Monomial exponents in storage order.
    pub fn monomials(self) -> &'static [[u8; MAX_VARS]] {
        &table(self).monomials
    }
}

/// Jet representing the coordinate `u_var` expanded at `value`.
pub fn jet_seed(var: usize, value: f64, num_vars: usize, degree: usize) -> Result<Jet, JetError> {
    JetShape::new(num_vars, degree)?.seed(var, value)
}

struct Table {
    shape: JetShape,
    monomials: Vec<[u8; MAX_VARS]>,
    orders: Vec<u8>,
    // Convolution products grouped by output rank: entries
    // `prod_offsets[r]..prod_offsets[r + 1]` of `prod_lhs`/`prod_rhs` are the
    // factor pairs whose product is monomial `r`, ascending in the left rank.
    prod_lhs: Vec<u16>,
    prod_rhs: Vec<u16>,
    prod_offsets: Vec<usize>,
    // `lowered[v][r]`: rank of monomial r with exponent of v reduced by one.
    lowered: Vec<Vec<Option<u16>>>,
    linear: [usize; MAX_VARS],
}

impl Table {
    fn build(shape: JetShape) -> Self {
        let nv = shape.num_vars;
        let mut monomials = Vec::new();
        let mut orders = Vec::new();
        for order in 0..=shape.degree {
            let mut current = [0u8; MAX_VARS];
            push_with_order(nv, 0, order as u8, &mut current, &mut monomials);
            orders.resize(monomials.len(), order as u8);
        }
        let rank: HashMap<[u8; MAX_VARS], usize> = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();

        let mut prod_lhs = Vec::new();
        let mut prod_rhs = Vec::new();
        let mut prod_offsets = vec![0];
        for out in &monomials {
            for (i, lhs) in monomials.iter().enumerate() {
                if (0..nv).all(|v| lhs[v] <= out[v]) {
                    let mut rhs = *out;
                    for v in 0..nv {
                        rhs[v] -= lhs[v];
                    }
                    prod_lhs.push(i as u16);
                    prod_rhs.push(rank[&rhs] as u16);
                }
            }
            prod_offsets.push(prod_lhs.len());
        }

        let lowered = (0..nv)
            .map(|v| {
                monomials
                    .iter()
                    .map(|m| {
                        (m[v] > 0).then(|| {
                            let mut l = *m;
                            l[v] -= 1;
                            rank[&l] as u16
                        })
                    })
                    .collect()
            })
            .collect();

        let mut linear = [0usize; MAX_VARS];
        if shape.degree > 0 {
            for (v, slot) in linear.iter_mut().enumerate().take(nv) {
                let mut e = [0u8; MAX_VARS];
                e[v] = 1;
                *slot = rank[&e];
            }
        }

        Self { shape, monomials, orders, prod_lhs, prod_rhs, prod_offsets, lowered, linear }
    }

    fn products(&self, out: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let range = self.prod_offsets[out]..self.prod_offsets[out + 1];
        self.prod_lhs[range.clone()].iter().zip(&self.prod_rhs[range]).map(|(&l, &r)| (l as usize, r as usize))
    }
}

// Lexicographic (first variable largest first) enumeration of exponent
// vectors with a fixed total order.
fn push_with_order(nv: usize, var: usize, remaining: u8, current: &mut [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
    if var == nv - 1 {
        current[var] = remaining;
        out.push(*current);
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k;
        push_with_order(nv, var + 1, remaining - k, current, out);
    }
    current[var] = 0;
}

fn table(shape: JetShape) -> &'static Table {
    static TABLES: [[OnceLock<Table>; MAX_DEGREE + 1]; MAX_VARS + 1] =
        [const { [const { OnceLock::new() }; MAX_DEGREE + 1] }; MAX_VARS + 1];
    TABLES[shape.num_vars][shape.degree].get_or_init(|| Table::build(shape))
}

/// Truncated Taylor polynomial of a scalar quantity.
#[derive(Clone)]
pub struct Jet {
    table: &'static Table,
    coeffs: Vec<f64>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("shape", &self.shape()).field("coeffs", &self.coeffs).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
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
    PowConst(f64),
}

/// Checked binary arithmetic on jets of equal shape.
pub fn jet_arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet, JetError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

/// Composition of an elementary function with a jet.
pub fn jet_elementary(f: Elementary, a: &Jet) -> Result<Jet, JetError> {
    a.apply(f)
}

impl Jet {
    pub fn shape(&self) -> JetShape {
        self.table.shape
    }

    pub fn num_vars(&self) -> usize {
        self.table.shape.num_vars
    }

    pub fn degree(&self) -> usize {
        self.table.shape.degree
    }

    /// Constant term.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Builds a jet from coefficients in storage order.
    pub fn from_coeffs(shape: JetShape, coeffs: Vec<f64>) -> Result<Self, JetError> {
        let table = table(shape);
        if coeffs.len() != table.monomials.len() {
            return Err(JetError::UnsupportedShape { num_vars: shape.num_vars, degree: shape.degree });
        }
        Ok(Self { table, coeffs })
    }

    fn rank_of(&self, exps: &[u8]) -> Option<usize> {
        if exps.len() != self.num_vars() {
            return None;
        }
        let mut key = [0u8; MAX_VARS];
        key[..exps.len()].copy_from_slice(exps);
        self.table.monomials.iter().position(|m| *m == key)
    }

    /// Monomial coefficient for the given exponents, zero beyond the degree.
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        self.rank_of(exps).map_or(0.0, |r| self.coeffs[r])
    }

    /// Mixed partial derivative at the base point.
    pub fn derivative(&self, exps: &[u8]) -> f64 {
        let factorials: f64 = exps.iter().map(|&k| factorial(k as usize)).product();
        self.coeff(exps) * factorials
    }

    /// First partial derivative at the base point.
    pub fn partial_value(&self, var: usize) -> f64 {
        if self.degree() == 0 {
            return 0.0;
        }
        self.coeffs[self.table.linear[var]]
    }

    /// Second partial derivative at the base point.
    pub fn second_partial_value(&self, i: usize, j: usize) -> f64 {
        let mut exps = [0u8; MAX_VARS];
        exps[i] += 1;
        exps[j] += 1;
        self.derivative(&exps[..self.num_vars()])
    }

    /// Partial derivative with respect to `var`, kept at the same shape. The
    /// result is exact through order `degree - 1`; its top-order part is zero.
    pub fn partial(&self, var: usize) -> Jet {
        let lowered = &self.table.lowered[var];
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (r, target) in lowered.iter().enumerate() {
            if let Some(t) = target {
                coeffs[*t as usize] += self.coeffs[r] * self.table.monomials[r][var] as f64;
            }
        }
        Jet { table: self.table, coeffs }
    }

    /// Drops every term above `degree`.
    pub fn truncate(&self, degree: usize) -> Result<Jet, JetError> {
        let shape = JetShape::new(self.num_vars(), degree)?;
        if degree > self.degree() {
            return Err(JetError::UnsupportedShape { num_vars: self.num_vars(), degree });
        }
        let target = table(shape);
        let coeffs = self.coeffs[..target.monomials.len()].to_vec();
        Ok(Jet { table: target, coeffs })
    }

    /// Largest coefficient magnitude among terms of exactly `order`.
    pub fn order_norm(&self, order: usize) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.table.orders)
            .filter(|(_, &o)| o as usize == order)
            .fold(0.0, |acc, (c, _)| acc.max(c.abs()))
    }

    fn check_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.shape() != other.shape() {
            return Err(JetError::ShapeMismatch { left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Jet { table: self.table, coeffs })
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Jet { table: self.table, coeffs })
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        let t = self.table;
        let coeffs = (0..self.coeffs.len())
            .map(|r| t.products(r).fold(0.0, |acc, (i, j)| acc + self.coeffs[i] * other.coeffs[j]))
            .collect();
        Ok(Jet { table: t, coeffs })
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(JetError::Singularity { op: "div", value: b0 });
        }
        let t = self.table;
        let mut q = vec![0.0; self.coeffs.len()];
        for r in 0..q.len() {
            let mut acc = self.coeffs[r];
            for (i, j) in t.products(r) {
                if j != 0 {
                    acc -= q[i] * other.coeffs[j];
                }
            }
            q[r] = acc / b0;
        }
        Ok(Jet { table: t, coeffs: q })
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        self.shape().constant(1.0).try_div(self)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { table: self.table, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `self += s * other`, used for accumulating linear combinations.
    pub fn add_scaled(&mut self, other: &Jet, s: f64) {
        assert_eq!(self.shape(), other.shape(), "jet shape mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Integer power by repeated squaring; negative exponents divide.
    pub fn powi(&self, exponent: i32) -> Result<Jet, JetError> {
        if exponent < 0 {
            return self.recip()?.powi(-exponent);
        }
        let mut result = self.shape().constant(1.0);
        let mut base = self.clone();
        let mut e = exponent as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Rational power `num/den`. Non-integer exponents need a positive
    /// constant term, except odd denominators, which use the real root.
    pub fn pow_rational(&self, num: i64, den: i64) -> Result<Jet, JetError> {
        if den == 1 {
            return self.powi(num as i32);
        }
        let x0 = self.value();
        let p = num as f64 / den as f64;
        if x0 > 0.0 {
            self.apply(Elementary::PowConst(p))
        } else if x0 < 0.0 && den % 2 != 0 {
            let r = (-self).apply(Elementary::PowConst(p))?;
            Ok(if num % 2 != 0 { -&r } else { r })
        } else {
            Err(JetError::Singularity { op: "pow", value: x0 })
        }
    }

    pub fn apply(&self, f: Elementary) -> Result<Jet, JetError> {
        match f {
            Elementary::Tanh => return self.apply(Elementary::Sinh)?.try_div(&self.apply(Elementary::Cosh)?),
            Elementary::Sqrt => return self.apply(Elementary::PowConst(0.5)),
            _ => {}
        }
        let a0 = self.value();
        let c = series_coefficients(f, a0, self.degree())?;
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut result = self.shape().constant(c[0]);
        let mut power = self.shape().constant(1.0);
        for ck in c.iter().take(self.degree() + 1).skip(1) {
            power = &power * &delta;
            result.add_scaled(&power, *ck);
        }
        Ok(result)
    }

    pub fn sin(&self) -> Jet {
        self.apply(Elementary::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Jet {
        self.apply(Elementary::Cos).expect("cos is entire")
    }

    pub fn exp(&self) -> Jet {
        self.apply(Elementary::Exp).expect("exp is entire")
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Sqrt)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

// Univariate Taylor coefficients f^(k)(a0)/k!, k = 0..=degree.
fn series_coefficients(f: Elementary, a0: f64, degree: usize) -> Result<[f64; MAX_DEGREE + 1], JetError> {
    let mut c = [0.0; MAX_DEGREE + 1];
    match f {
        Elementary::Sin | Elementary::Cos => {
            let (s, co) = a0.sin_cos();
            // derivatives cycle sin, cos, -sin, -cos
            let cycle = if f == Elementary::Sin { [s, co, -s, -co] } else { [co, -s, -co, s] };
            for (k, ck) in c.iter_mut().enumerate() {
                *ck = cycle[k % 4] / factorial(k);
            }
        }
        Elementary::Sinh | Elementary::Cosh => {
            let (sh, ch) = (a0.sinh(), a0.cosh());
            let cycle = if f == Elementary::Sinh { [sh, ch] } else { [ch, sh] };
            for (k, ck) in c.iter_mut().enumerate() {
                *ck = cycle[k % 2] / factorial(k);
            }
        }
        Elementary::Exp => {
            let e = a0.exp();
            for (k, ck) in c.iter_mut().enumerate() {
                *ck = e / factorial(k);
            }
        }
        Elementary::Log => {
            if a0 <= 0.0 || !a0.is_finite() {
                return Err(JetError::Singularity { op: "log", value: a0 });
            }
            c[0] = a0.ln();
            for (k, ck) in c.iter_mut().enumerate().skip(1) {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                *ck = sign / (k as f64 * a0.powi(k as i32));
            }
        }
        Elementary::PowConst(p) => {
            let integral = p.fract() == 0.0;
            let bad_negative = a0 < 0.0 && !integral;
            let bad_zero = a0 == 0.0 && !(integral && p >= 0.0);
            if !a0.is_finite() || bad_negative || bad_zero {
                return Err(JetError::Singularity { op: "pow", value: a0 });
            }
            if a0 == 0.0 {
                let k = p as usize;
                if k <= MAX_DEGREE {
                    c[k] = 1.0;
                }
                return Ok(c);
            }
            let mut binom = 1.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if k > 0 {
                    binom *= (p - (k - 1) as f64) / k as f64;
                }
                *ck = a0.powf(p - k as f64) * binom;
            }
        }
        Elementary::Arcsin | Elementary::Arctan => {
            if f == Elementary::Arcsin && !(a0.abs() < 1.0) {
                return Err(JetError::Singularity { op: "arcsin", value: a0 });
            }
            c[0] = if f == Elementary::Arcsin { a0.asin() } else { a0.atan() };
            if degree > 0 {
                // integrate the series of the derivative
                let x = jet_seed(0, a0, 1, degree - 1)?;
                let one = x.shape().constant(1.0);
                let deriv = if f == Elementary::Arcsin {
                    (&one - &(&x * &x)).apply(Elementary::PowConst(-0.5))?
                } else {
                    (&one + &(&x * &x)).recip()?
                };
                for k in 1..=degree {
                    c[k] = deriv.coeffs[k - 1] / k as f64;
                }
            }
        }
        Elementary::Tanh | Elementary::Sqrt => unreachable!("handled by composition"),
    }
    Ok(c)
}

impl Add for &Jet {
    type Output = Jet;

    /// Panics on shape mismatch; use [`Jet::try_add`] for a checked version.
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).expect("jet shape mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).expect("jet shape mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).expect("jet shape mismatch")
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;

    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
