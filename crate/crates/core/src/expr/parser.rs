//! Recursive-descent parser.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "-" ] integer [ "^" exponent ] ;
//! atom     = number | "i" | "pi" | "e" | variable
//!          | func "(" expr ")" | "(" expr ")" ;
//! number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] [ "i" ] ;
//! variable = "z" | "z" digits ;
//! func     = "exp" | "sin" | "cos" | "log" ;
//! ```
//!
//! Whitespace between tokens is ignored. `^` binds tighter than unary minus,
//! so `-z^2` is `-(z^2)`.

use super::{BinOp, Constant, Expr, Func};
use crate::error::{Error, ParseError, Result};
use crate::numeric::C64;

pub(super) fn parse_expr(src: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        dim,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.fail("expression").into());
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.fail("operator or end of input").into());
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn fail(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("integer exponent").into());
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let mut k: i32 = digits.parse().map_err(|_| ParseError {
            offset: start,
            expected: "exponent within i32 range".into(),
        })?;
        if self.peek() == Some(b'.') {
            return Err(self.fail("integer exponent").into());
        }
        if self.eat(b'^') {
            let at = self.pos;
            let inner = self.exponent()?;
            k = u32::try_from(inner)
                .ok()
                .and_then(|e| k.checked_pow(e))
                .ok_or(ParseError {
                    offset: at,
                    expected: "nonnegative exponent with i32 result".into(),
                })?;
        }
        Ok(if neg { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.fail("')'").into());
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.fail("number, variable, function or '('").into()),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - b
        };
        let mut p = self.pos;
        let mut n = digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            n += digits(&mut p);
        }
        if n == 0 {
            return Err(self.fail("number").into());
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) > 0 {
                p = q;
            }
        }
        let text = std::str::from_utf8(&s[start..p]).expect("ascii number");
        let value: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: "number".into(),
        })?;
        if !value.is_finite() {
            return Err(ParseError {
                offset: start,
                expected: "finite number".into(),
            }
            .into());
        }
        self.pos = p;
        // imaginary suffix: `2i`, but not the start of a longer identifier
        if p < s.len() && s[p] == b'i' && !s.get(p + 1).is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
            return Ok(Expr::Num(C64::new(0.0, value)));
        }
        Ok(Expr::Num(C64::new(value, 0.0)))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        let func = match name {
            "i" => return Ok(Expr::Num(C64::new(0.0, 1.0))),
            "pi" => return Ok(Expr::Const(Constant::Pi)),
            "e" => return Ok(Expr::Const(Constant::E)),
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "log" => Some(Func::Log),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat(b'(') {
                return Err(self.fail("'(' after function name").into());
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.fail("')'").into());
            }
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        self.variable(name, start)
    }

    fn variable(&self, name: &str, start: usize) -> Result<Expr> {
        let Some(rest) = name.strip_prefix('z') else {
            return Err(ParseError {
                offset: start,
                expected: "known identifier".into(),
            }
            .into());
        };
        if rest.is_empty() {
            return if self.dim == 1 {
                Ok(Expr::Var(0))
            } else {
                Err(Error::arg(format!(
                    "variable `z` is ambiguous in dimension {}; use z1..z{}",
                    self.dim, self.dim
                )))
            };
        }
        if !rest.bytes().all(|c| c.is_ascii_digit()) || rest.starts_with('0') {
            return Err(ParseError {
                offset: start,
                expected: "variable z or z1..zn".into(),
            }
            .into());
        }
        match rest.parse::<usize>() {
            Ok(k) if k >= 1 && k <= self.dim => Ok(Expr::Var(k - 1)),
            _ => Err(Error::arg(format!(
                "variable `{name}` out of range for dimension {}",
                self.dim
            ))),
        }
    }
}
