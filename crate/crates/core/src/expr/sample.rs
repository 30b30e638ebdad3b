use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BinaryOp, Expr, ExprSet, UnaryOp};
use crate::error::{Error, Result};

/// Knobs for random expression sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExprSamplerParams {
    pub b_min: usize,
    /// Upper bound on binary operators; `None` means `input_dim + 5`.
    pub b_max: Option<usize>,
    pub u_min: usize,
    pub u_max: usize,
    pub affine_prob_leaf: f64,
    pub affine_prob_unary: f64,
    /// Constant magnitudes are `10^U(lo, hi)`.
    pub const_log_mag_range: (f64, f64),
    pub const_sig_digits: usize,
}

impl Default for ExprSamplerParams {
    fn default() -> Self {
        Self {
            b_min: 1,
            b_max: None,
            u_min: 0,
            u_max: 5,
            affine_prob_leaf: 1.0,
            affine_prob_unary: 0.5,
            const_log_mag_range: (-2.0, 2.0),
            const_sig_digits: 3,
        }
    }
}

impl ExprSamplerParams {
    pub fn binary_bounds(&self, input_dim: usize) -> (usize, usize) {
        (self.b_min, self.b_max.unwrap_or(input_dim + 5))
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.b_min < 1 {
            errs.push("b_min must be at least 1".to_string());
        }
        if let Some(b_max) = self.b_max {
            if b_max < self.b_min {
                errs.push(format!("b_max ({b_max}) is below b_min ({})", self.b_min));
            }
        }
        if self.u_max < self.u_min {
            errs.push(format!("u_max ({}) is below u_min ({})", self.u_max, self.u_min));
        }
        for (name, p) in [
            ("affine_prob_leaf", self.affine_prob_leaf),
            ("affine_prob_unary", self.affine_prob_unary),
        ] {
            if !(0.0..=1.0).contains(&p) {
                errs.push(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let (lo, hi) = self.const_log_mag_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= -4.0 && hi <= 4.0) {
            errs.push(format!(
                "const_log_mag_range must satisfy -4 <= lo <= hi <= 4, got ({lo}, {hi})"
            ));
        }
        if !(1..=17).contains(&self.const_sig_digits) {
            errs.push(format!("const_sig_digits must be in 1..=17, got {}", self.const_sig_digits));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Samples `n` independent expressions over `m` variables.
pub fn sample_expr_set<R: Rng + ?Sized>(m: usize, n: usize, params: &ExprSamplerParams, rng: &mut R) -> Result<ExprSet> {
    if m == 0 || n == 0 {
        return Err(Error::arg(format!("expression set dimensions must be positive, got M={m}, N={n}")));
    }
    params.validate()?;
    let exprs = (0..n).map(|_| sample_expr(m, params, rng)).collect();
    ExprSet::new(m, exprs)
}

/// Samples one expression: binary skeleton, variable leaves, unary
/// insertion, then affine wrapping of leaves and unary nodes.
pub fn sample_expr<R: Rng + ?Sized>(m: usize, params: &ExprSamplerParams, rng: &mut R) -> Expr {
    let (b_lo, b_hi) = params.binary_bounds(m);
    let b = rng.random_range(b_lo..=b_hi.max(b_lo));
    let u = rng.random_range(params.u_min..=params.u_max.max(params.u_min));

    // Skeleton: grow by splitting a uniformly chosen leaf. Placeholder
    // leaves are Var(0) until variables are assigned.
    let mut tree = Expr::Var(0);
    for _ in 0..b {
        let leaves = tree.leaf_count();
        let target = rng.random_range(0..leaves);
        let op = BinaryOp::ALL[rng.random_range(0..3)];
        split_leaf(&mut tree, target, op);
    }

    assign_variables(&mut tree, m, rng);

    for _ in 0..u {
        // Every node owns one incoming edge (the root owns the root slot).
        let slot = rng.random_range(0..tree.node_count());
        let op = UnaryOp::ALL[rng.random_range(0..UnaryOp::ALL.len())];
        wrap_node(&mut tree, slot, op);
    }

    apply_affine(tree, params, rng)
}

fn split_leaf(e: &mut Expr, mut target: usize, op: BinaryOp) {
    fn go(e: &mut Expr, target: &mut usize, op: BinaryOp) -> bool {
        match e {
            Expr::Var(_) | Expr::Const(_) => {
                if *target == 0 {
                    *e = Expr::binary(op, Expr::Var(0), Expr::Var(0));
                    true
                } else {
                    *target -= 1;
                    false
                }
            }
            Expr::Unary(_, c) => go(c, target, op),
            Expr::Binary(_, l, r) => go(l, target, op) || go(r, target, op),
        }
    }
    go(e, &mut target, op);
}

fn assign_variables<R: Rng + ?Sized>(e: &mut Expr, m: usize, rng: &mut R) {
    match e {
        Expr::Var(i) => *i = rng.random_range(1..=m),
        Expr::Const(_) => {}
        Expr::Unary(_, c) => assign_variables(c, m, rng),
        Expr::Binary(_, l, r) => {
            assign_variables(l, m, rng);
            assign_variables(r, m, rng);
        }
    }
}

fn wrap_node(e: &mut Expr, mut slot: usize, op: UnaryOp) {
    fn go(e: &mut Expr, slot: &mut usize, op: UnaryOp) -> bool {
        if *slot == 0 {
            let inner = std::mem::replace(e, Expr::Const(0.0));
            *e = Expr::unary(op, inner);
            return true;
        }
        *slot -= 1;
        match e {
            Expr::Var(_) | Expr::Const(_) => false,
            Expr::Unary(_, c) => go(c, slot, op),
            Expr::Binary(_, l, r) => go(l, slot, op) || go(r, slot, op),
        }
    }
    go(e, &mut slot, op);
}

fn apply_affine<R: Rng + ?Sized>(e: Expr, params: &ExprSamplerParams, rng: &mut R) -> Expr {
    match e {
        leaf @ Expr::Var(_) => {
            if rng.random_bool(params.affine_prob_leaf) {
                wrap_affine(leaf, params, rng)
            } else {
                leaf
            }
        }
        c @ Expr::Const(_) => c,
        Expr::Unary(op, child) => {
            let node = Expr::unary(op, apply_affine(*child, params, rng));
            if rng.random_bool(params.affine_prob_unary) {
                wrap_affine(node, params, rng)
            } else {
                node
            }
        }
        Expr::Binary(op, l, r) => {
            let l = apply_affine(*l, params, rng);
            let r = apply_affine(*r, params, rng);
            Expr::binary(op, l, r)
        }
    }
}

fn wrap_affine<R: Rng + ?Sized>(inner: Expr, params: &ExprSamplerParams, rng: &mut R) -> Expr {
    let scale = random_constant(params, rng);
    let offset = random_constant(params, rng);
    Expr::affine(scale, offset, inner)
}

/// Uniform sign, log-uniform magnitude, rounded to the configured number of
/// significant digits.
pub(crate) fn random_constant<R: Rng + ?Sized>(params: &ExprSamplerParams, rng: &mut R) -> f64 {
    let (lo, hi) = params.const_log_mag_range;
    let exponent = if hi > lo { rng.random_range(lo..hi) } else { lo };
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    round_sig(sign * 10f64.powf(exponent), params.const_sig_digits)
}

pub(crate) fn round_sig(v: f64, digits: usize) -> f64 {
    format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .expect("formatted float re-parses")
}
