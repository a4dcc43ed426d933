//! Recursive-descent parser for the textual expression format.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' ['-'] int)?
//! atom   := number | 'i' | 'w' | func '(' expr ')' | '(' expr ')'
//! func   := exp | sin | cos | sinh | cosh
//! ```
//!
//! Unary minus and negative integer exponents are accepted on top of the core
//! grammar. Whitespace may appear between tokens.

use num_complex::Complex64;

use super::expr::{Func, HolomorphicExpr};
use crate::error::{Error, Result};

pub fn parse_expr(text: &str) -> Result<HolomorphicExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
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

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<HolomorphicExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<HolomorphicExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<HolomorphicExpr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<HolomorphicExpr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let magnitude: i32 = digits.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "exponent out of range".into(),
        })?;
        Ok(base.powi(if negative { -magnitude } else { magnitude }))
    }

    fn atom(&mut self) -> Result<HolomorphicExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<HolomorphicExpr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(Error::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        // Exponent only when a digit follows `e`, `e+` or `e-`.
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mut look = self.pos + 1;
            if look < self.src.len() && matches!(self.src[look], b'+' | b'-') {
                look += 1;
            }
            if look < self.src.len() && self.src[look].is_ascii_digit() {
                self.pos = look;
                digits(self);
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "malformed number".into(),
        })?;
        Ok(HolomorphicExpr::constant(Complex64::new(value, 0.0)))
    }

    fn identifier(&mut self) -> Result<HolomorphicExpr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "i" => return Ok(HolomorphicExpr::constant(Complex64::new(0.0, 1.0))),
            "w" => return Ok(HolomorphicExpr::var()),
            _ => {}
        }
        if self.peek() != Some(b'(') {
            return Err(Error::Syntax {
                offset: start,
                message: format!("unknown identifier `{name}`"),
            });
        }
        let func = Func::from_name(name).ok_or_else(|| Error::UnknownFunction {
            name: name.to_string(),
            offset: start,
        })?;
        self.pos += 1;
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(HolomorphicExpr::call(func, arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_w() {
        let e = parse_expr("exp(w)").unwrap();
        assert_eq!(e, HolomorphicExpr::call(Func::Exp, HolomorphicExpr::var()));
    }

    #[test]
    fn rotated_reciprocal_of_exp() {
        let e = parse_expr("2*exp(i*0.5)/exp(w)").unwrap();
        let w = c(0.4, -0.7);
        let expected = 2.0 * c(0.0, 0.5).exp() * (-w).exp();
        assert!((e.eval(w).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn dangling_caret_reports_offset() {
        match parse_expr("w^") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_function() {
        match parse_expr("1 + log(w)") {
            Err(Error::UnknownFunction { name, offset }) => {
                assert_eq!(name, "log");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse_expr("-w^2 + 3*w - 1/2").unwrap();
        let w = c(1.5, 0.25);
        let expected = -(w * w) + 3.0 * w - 0.5;
        assert!((e.eval(w).unwrap() - expected).norm() < 1e-14);
        let n = parse_expr("w^-1").unwrap();
        assert!((n.eval(w).unwrap() - 1.0 / w).norm() < 1e-14);
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("2.5e-1 * w + 1E2").unwrap();
        assert!((e.eval(c(4.0, 0.0)).unwrap() - c(101.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_expr("").is_err());
        assert!(parse_expr("(w").is_err());
        assert!(parse_expr("w w").is_err());
        assert!(parse_expr("exp w").is_err());
        assert!(parse_expr("z+1").is_err());
        assert!(parse_expr("3 $ 4").is_err());
    }
}
