//! Symbolic expressions over `M` input channels.
//!
//! Expressions are binary trees of `add`/`sub`/`mul` with unary operators
//! inserted on edges and constants introduced through affine wrappers
//! `(b add (a mul z))`.

mod eval;
mod sample;
mod text;

pub use eval::{evaluate, evaluate_raw};
pub use sample::{sample_expr, sample_expr_set, ExprSamplerParams};
pub use text::{parse, parse_body, serialize, serialize_body};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 3] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }

    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Inv,
    Abs,
    Pow2,
    Pow3,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Arctan,
    Log,
    Exp,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 11] = [
        UnaryOp::Inv,
        UnaryOp::Abs,
        UnaryOp::Pow2,
        UnaryOp::Pow3,
        UnaryOp::Sqrt,
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Arctan,
        UnaryOp::Log,
        UnaryOp::Exp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Inv => "inv",
            UnaryOp::Abs => "abs",
            UnaryOp::Pow2 => "pow2",
            UnaryOp::Pow3 => "pow3",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Arctan => "arctan",
            UnaryOp::Log => "log",
            UnaryOp::Exp => "exp",
        }
    }

    /// Operators written in function syntax `name(arg)`. Powers are written
    /// `(arg)**k` and are not looked up by name.
    pub fn from_function_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .filter(|op| !matches!(op, UnaryOp::Pow2 | UnaryOp::Pow3))
            .find(|op| op.name() == name)
    }

    /// Applies the operator; returns NaN outside the operator's domain.
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            UnaryOp::Inv => {
                if z == 0.0 {
                    f64::NAN
                } else {
                    1.0 / z
                }
            }
            UnaryOp::Abs => z.abs(),
            UnaryOp::Pow2 => z * z,
            UnaryOp::Pow3 => z * z * z,
            UnaryOp::Sqrt => {
                if z < 0.0 {
                    f64::NAN
                } else {
                    z.sqrt()
                }
            }
            UnaryOp::Sin => z.sin(),
            UnaryOp::Cos => z.cos(),
            UnaryOp::Tan => z.tan(),
            UnaryOp::Arctan => z.atan(),
            UnaryOp::Log => {
                if z <= 0.0 {
                    f64::NAN
                } else {
                    z.ln()
                }
            }
            UnaryOp::Exp => z.exp(),
        }
    }
}

/// Expression tree node. Variable indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(index: usize) -> Self {
        Expr::Var(index)
    }

    pub fn constant(value: f64) -> Self {
        Expr::Const(value)
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    /// `(b add (a mul z))`
    pub fn affine(scale: f64, offset: f64, inner: Expr) -> Self {
        Expr::binary(
            BinaryOp::Add,
            Expr::Const(offset),
            Expr::binary(BinaryOp::Mul, Expr::Const(scale), inner),
        )
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Const(_) => 1,
            Expr::Unary(_, c) => 1 + c.node_count(),
            Expr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Const(_) => 1,
            Expr::Unary(_, c) => c.leaf_count(),
            Expr::Binary(_, l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn binary_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Const(_) => 0,
            Expr::Unary(_, c) => c.binary_count(),
            Expr::Binary(_, l, r) => 1 + l.binary_count() + r.binary_count(),
        }
    }

    pub fn unary_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Const(_) => 0,
            Expr::Unary(_, c) => 1 + c.unary_count(),
            Expr::Binary(_, l, r) => l.unary_count() + r.unary_count(),
        }
    }

    /// Largest variable index referenced, 0 if the expression is constant.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Var(i) => *i,
            Expr::Const(_) => 0,
            Expr::Unary(_, c) => c.max_var(),
            Expr::Binary(_, l, r) => l.max_var().max(r.max_var()),
        }
    }

    /// Visits nodes in pre-order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::Const(_) => {}
            Expr::Unary(_, c) => c.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_body(self))
    }
}

/// `N` expressions over a shared `M`-dimensional input.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprSet {
    input_dim: usize,
    exprs: Vec<Expr>,
}

impl ExprSet {
    pub fn new(input_dim: usize, exprs: Vec<Expr>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::arg("expression set needs at least one input"));
        }
        if exprs.is_empty() {
            return Err(Error::arg("expression set needs at least one output"));
        }
        for (k, e) in exprs.iter().enumerate() {
            let mut bad = None;
            e.visit(&mut |node| match node {
                Expr::Var(i) if *i == 0 || *i > input_dim => bad = Some(*i),
                Expr::Const(v) if !v.is_finite() => bad = Some(0),
                _ => {}
            });
            if let Some(i) = bad {
                return Err(Error::arg(format!(
                    "output y{} references invalid variable x{i} or a non-finite constant (M = {input_dim})",
                    k + 1
                )));
            }
        }
        Ok(Self { input_dim, exprs })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.exprs.len()
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    /// One `y<k> = ...` line per output channel.
    pub fn texts(&self) -> Vec<String> {
        self.exprs
            .iter()
            .enumerate()
            .map(|(k, e)| serialize(e, k + 1))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_names_round_trip() {
        for op in BinaryOp::ALL {
            assert_eq!(BinaryOp::from_name(op.name()), Some(op));
        }
        for op in UnaryOp::ALL {
            match op {
                UnaryOp::Pow2 | UnaryOp::Pow3 => assert_eq!(UnaryOp::from_function_name(op.name()), None),
                _ => assert_eq!(UnaryOp::from_function_name(op.name()), Some(op)),
            }
        }
    }

    #[test]
    fn domain_violations_are_nan() {
        assert!(UnaryOp::Inv.apply(0.0).is_nan());
        assert!(UnaryOp::Sqrt.apply(-1.0).is_nan());
        assert!(UnaryOp::Log.apply(0.0).is_nan());
        assert!(UnaryOp::Log.apply(-3.0).is_nan());
        assert_eq!(UnaryOp::Sqrt.apply(0.0), 0.0);
        assert_eq!(UnaryOp::Pow3.apply(-2.0), -8.0);
    }

    #[test]
    fn expr_set_rejects_out_of_range_variables() {
        let e = Expr::binary(BinaryOp::Add, Expr::var(1), Expr::var(3));
        assert!(ExprSet::new(2, vec![e.clone()]).is_err());
        assert!(ExprSet::new(3, vec![e]).is_ok());
        assert!(ExprSet::new(1, vec![Expr::var(0)]).is_err());
        assert!(ExprSet::new(1, vec![]).is_err());
    }

    #[test]
    fn counts() {
        let e = Expr::binary(
            BinaryOp::Mul,
            Expr::unary(UnaryOp::Sin, Expr::var(1)),
            Expr::binary(BinaryOp::Sub, Expr::var(2), Expr::var(1)),
        );
        assert_eq!(e.binary_count(), 2);
        assert_eq!(e.leaf_count(), 3);
        assert_eq!(e.unary_count(), 1);
        assert_eq!(e.node_count(), 6);
        assert_eq!(e.max_var(), 2);
    }
}
