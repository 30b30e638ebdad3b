//! Line format for expressions: `y<k> = <body>`.
//!
//! ```text
//! body  := '(' body op body ')'        op ∈ {add, sub, mul}
//!        | '(' body ')' '**' ('2'|'3')
//!        | name '(' body ')'           name ∈ {inv, abs, sqrt, sin, cos, tan, arctan, log, exp}
//!        | 'x' index                   index ≥ 1
//!        | number
//! ```
//!
//! Constants are written in the shortest form that parses back to the same
//! double, so `parse(serialize(e)) == e` holds bit-for-bit.

use std::fmt::Write;

use super::{BinaryOp, Expr, UnaryOp};
use crate::error::{Error, Result};

pub fn serialize(e: &Expr, out_index: usize) -> String {
    format!("y{out_index} = {}", serialize_body(e))
}

pub fn serialize_body(e: &Expr) -> String {
    let mut out = String::with_capacity(4 * e.node_count());
    write_node(e, &mut out);
    out
}

fn write_node(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(i) => {
            let _ = write!(out, "x{i}");
        }
        Expr::Const(c) => {
            let _ = write!(out, "{c:?}");
        }
        Expr::Unary(op @ (UnaryOp::Pow2 | UnaryOp::Pow3), child) => {
            out.push('(');
            write_node(child, out);
            out.push_str(if *op == UnaryOp::Pow2 { ")**2" } else { ")**3" });
        }
        Expr::Unary(op, child) => {
            out.push_str(op.name());
            out.push('(');
            write_node(child, out);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            out.push('(');
            write_node(l, out);
            out.push(' ');
            out.push_str(op.name());
            out.push(' ');
            write_node(r, out);
            out.push(')');
        }
    }
}

/// Parses one `y<k> = <body>` line, returning `(k, body)`.
pub fn parse(text: &str) -> Result<(usize, Expr)> {
    let mut p = Parser::new(text);
    p.skip_ws();
    p.expect_byte(b'y')?;
    let start = p.pos;
    let k = p.integer()?;
    if k == 0 {
        return Err(p.error_at(start, "output index must be at least 1"));
    }
    p.skip_ws();
    p.expect_byte(b'=')?;
    let e = p.body()?;
    p.finish()?;
    Ok((k, e))
}

/// Parses an expression body without the `y<k> =` prefix.
pub fn parse_body(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text);
    let e = p.body()?;
    p.finish()?;
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect_byte(&mut self, want: u8) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(b) if b == want => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error_at(
                self.pos,
                format!("expected `{}`, found `{}`", want as char, b as char),
            )),
            None => Err(self.error_at(self.pos, format!("expected `{}`, found end of input", want as char))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error_at(self.pos, "trailing characters after expression")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(start, "expected an integer"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error_at(start, "integer out of range"))
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphabetic() || b == b'_') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            self.pos += 1;
        }
        let lit = &self.src[start..self.pos];
        match lit.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
            Ok(_) => Err(self.error_at(start, format!("constant `{lit}` is not finite"))),
            Err(_) => Err(self.error_at(start, format!("malformed number `{lit}`"))),
        }
    }

    fn body(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let left = self.body()?;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    return self.power_suffix(left);
                }
                let op_start = self.pos;
                let name = self.ident();
                let op = match BinaryOp::from_name(name) {
                    Some(op) => op,
                    None if name.is_empty() => {
                        return Err(self.error_at(op_start, "expected a binary operator or `)`"));
                    }
                    None => {
                        return Err(Error::UnknownOperator {
                            name: name.to_string(),
                            offset: op_start,
                        })
                    }
                };
                let right = self.body()?;
                self.expect_byte(b')')?;
                Ok(Expr::binary(op, left, right))
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let name = self.ident();
                if name == "x" && matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    let idx_start = self.pos;
                    let idx = self.integer()?;
                    if idx == 0 {
                        return Err(self.error_at(idx_start, "variable indices start at 1"));
                    }
                    return Ok(Expr::Var(idx));
                }
                if name == "pow" && matches!(self.peek(), Some(b'2' | b'3')) {
                    let k = self.src[self.pos..].chars().next().unwrap_or('2');
                    return Err(self.error_at(start, format!("`pow{k}` must be written as `(arg)**{k}`")));
                }
                let op = match UnaryOp::from_function_name(name) {
                    Some(op) => op,
                    None => {
                        return Err(Error::UnknownOperator {
                            name: name.to_string(),
                            offset: start,
                        })
                    }
                };
                self.expect_byte(b'(')?;
                let child = self.body()?;
                self.expect_byte(b')')?;
                Ok(Expr::unary(op, child))
            }
            Some(b) if b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.') => self.number(),
            Some(b) => Err(self.error_at(start, format!("unexpected character `{}`", b as char))),
            None => Err(self.error_at(start, "unexpected end of input")),
        }
    }

    fn power_suffix(&mut self, base: Expr) -> Result<Expr> {
        self.skip_ws();
        let at = self.pos;
        if !self.src[self.pos..].starts_with("**") {
            return Err(self.error_at(at, "parenthesized term must be followed by `**2` or `**3`"));
        }
        self.pos += 2;
        self.skip_ws();
        let exp_start = self.pos;
        let k = self.integer().map_err(|_| self.error_at(exp_start, "malformed exponent"))?;
        match k {
            2 => Ok(Expr::unary(UnaryOp::Pow2, base)),
            3 => Ok(Expr::unary(UnaryOp::Pow3, base)),
            _ => Err(self.error_at(exp_start, format!("unsupported exponent **{k}, only 2 and 3 are allowed"))),
        }
    }
}
