use super::Expr;
use crate::error::{Error, Result};

/// Pointwise evaluation over the columns of `x` (one row per input channel).
///
/// Time indices where the expression leaves its domain (inv(0), sqrt of a
/// negative, log of a non-positive, or any non-finite intermediate) map to
/// `None`.
pub fn evaluate(e: &Expr, x: &[Vec<f64>]) -> Result<Vec<Option<f64>>> {
    Ok(evaluate_raw(e, x)?
        .into_iter()
        .map(|v| if v.is_nan() { None } else { Some(v) })
        .collect())
}

/// Like [`evaluate`] but marks invalid points with NaN. Every non-NaN value
/// in the output is finite.
pub fn evaluate_raw(e: &Expr, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    let len = check_shape(e, x)?;
    Ok(eval_node(e, x, len))
}

fn check_shape(e: &Expr, x: &[Vec<f64>]) -> Result<usize> {
    let len = x
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::arg("evaluation needs at least one input channel"))?;
    if x.iter().any(|row| row.len() != len) {
        return Err(Error::arg("input channels have different lengths"));
    }
    let need = e.max_var();
    if need > x.len() {
        return Err(Error::arg(format!(
            "expression references x{need} but only {} input channels were given",
            x.len()
        )));
    }
    let mut zero_index = false;
    e.visit(&mut |n| zero_index |= matches!(n, Expr::Var(0)));
    if zero_index {
        return Err(Error::arg("variable indices are 1-based"));
    }
    Ok(len)
}

#[inline]
fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

fn eval_node(e: &Expr, x: &[Vec<f64>], len: usize) -> Vec<f64> {
    match e {
        Expr::Var(i) => x[i - 1].iter().map(|&v| sanitize(v)).collect(),
        Expr::Const(c) => vec![sanitize(*c); len],
        Expr::Unary(op, child) => {
            let mut v = eval_node(child, x, len);
            for z in &mut v {
                *z = sanitize(op.apply(*z));
            }
            v
        }
        Expr::Binary(op, l, r) => {
            let mut a = eval_node(l, x, len);
            let b = eval_node(r, x, len);
            for (z, w) in a.iter_mut().zip(b) {
                *z = sanitize(op.apply(*z, w));
            }
            a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, BinaryOp, UnaryOp};

    #[test]
    fn affine_line_at_zero() {
        let (_, e) = parse("y1 = (-7.17 add (0.537 mul x1))").unwrap();
        let y = evaluate(&e, &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(y[0], Some(-7.17));
        assert_eq!(y[1], Some(-7.17 + 0.537));
    }

    #[test]
    fn square_of_shifted_variable() {
        let (_, e) = parse("y1 = ((2 add x1))**2").unwrap();
        assert_eq!(evaluate(&e, &[vec![1.0]]).unwrap(), vec![Some(9.0)]);
    }

    #[test]
    fn sqrt_of_negative_is_invalid_only_there() {
        let e = Expr::unary(UnaryOp::Sqrt, Expr::var(1));
        let y = evaluate(&e, &[vec![-1.0, 4.0]]).unwrap();
        assert_eq!(y, vec![None, Some(2.0)]);
    }

    #[test]
    fn overflow_is_invalid() {
        let e = Expr::unary(UnaryOp::Exp, Expr::binary(BinaryOp::Mul, Expr::Const(1000.0), Expr::var(1)));
        let y = evaluate(&e, &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(y, vec![None, Some(1.0)]);
        // inf * 0 must not sneak back in as a valid value.
        let e = Expr::binary(BinaryOp::Mul, Expr::Const(0.0), e);
        assert_eq!(evaluate(&e, &[vec![1.0]]).unwrap(), vec![None]);
    }

    #[test]
    fn shape_errors() {
        let e = Expr::var(2);
        assert!(evaluate(&e, &[vec![1.0]]).is_err());
        assert!(evaluate(&e, &[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(evaluate(&Expr::var(1), &[]).is_err());
    }

    #[test]
    fn bitwise_deterministic() {
        let (_, e) = parse("y1 = (0.3 add (1.7 mul sin(exp(x1))))").unwrap();
        let x = vec![(0..64).map(|i| i as f64 * 0.1 - 3.0).collect::<Vec<_>>()];
        let a = evaluate_raw(&e, &x).unwrap();
        let b = evaluate_raw(&e, &x).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
