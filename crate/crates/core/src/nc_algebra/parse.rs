//! Text form of polynomials.
//!
//! ```text
//! atom  := x(j) | x(g,j) | xl(i,j,t) | u(i,t) | u*(i,t) | ut(i,t) | ut*(i,t)
//!        | v(i,t) | v*(i,t) | y(i,t) | yinv(i,t)
//! term  := [complex "*"] atom ("*" atom)*  |  complex
//! poly  := term (("+" | "-") term)*
//! complex := a+bi | a-bi | a | bi
//! ```

use num_complex::Complex64 as C64;

use super::poly::NCPoly;
use super::shift::{y_coord, y_inv};
use super::time::Time;
use super::word::Letter;
use crate::error::{LabError, Result};

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(LabError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    /// Unsigned decimal number with optional exponent.
    fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        let s = self.s;
        while end < s.len() && (s[end].is_ascii_digit() || s[end] == b'.') {
            end += 1;
        }
        if end == start {
            return None;
        }
        if end < s.len() && (s[end] == b'e' || s[end] == b'E') {
            let mut k = end + 1;
            if k < s.len() && (s[k] == b'+' || s[k] == b'-') {
                k += 1;
            }
            let digits = k;
            while k < s.len() && s[k].is_ascii_digit() {
                k += 1;
            }
            if k > digits {
                end = k;
            }
        }
        let v = std::str::from_utf8(&s[start..end]).ok()?.parse().ok()?;
        self.pos = end;
        Some(v)
    }

    fn uint(&mut self) -> Result<u32> {
        match self.number() {
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as u32),
            _ => self.err("expected a nonnegative integer"),
        }
    }

    fn time(&mut self) -> Result<Time> {
        match self.number() {
            Some(v) => Ok(Time::from_secs(v)),
            None => self.err("expected a nonnegative time"),
        }
    }

    /// Complex literal without leading sign; `None` when the input does not
    /// start with a number.
    fn complex(&mut self) -> Option<C64> {
        let re = self.number()?;
        if self.s.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            return Some(C64::new(0.0, re));
        }
        let save = self.pos;
        let sign = match self.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return Some(C64::new(re, 0.0)),
        };
        self.pos += 1;
        if let Some(im) = self.number() {
            if self.s.get(self.pos) == Some(&b'i') {
                self.pos += 1;
                return Some(C64::new(re, sign * im));
            }
        }
        self.pos = save;
        Some(C64::new(re, 0.0))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphabetic() || self.s[self.pos] == b'*') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<NCPoly> {
        let start = self.pos;
        let name = self.ident();
        self.expect(b'(')?;
        let p = match name.as_str() {
            "x" => {
                let a = self.uint()?;
                if self.eat(b',') {
                    let j = self.uint()?;
                    NCPoly::letter(Letter::x_family(a, j))
                } else {
                    NCPoly::letter(Letter::x(a))
                }
            }
            "xl" => {
                let i = self.uint()?;
                self.expect(b',')?;
                let j = self.uint()?;
                self.expect(b',')?;
                let t = self.time()?;
                NCPoly::letter(Letter::xl(i, j, t))
            }
            "u" | "u*" | "ut" | "ut*" | "v" | "v*" | "y" | "yinv" => {
                let i = self.uint()?;
                self.expect(b',')?;
                let t = self.time()?;
                match name.as_str() {
                    "u" => NCPoly::letter(Letter::u(i, t)),
                    "u*" => NCPoly::letter(Letter::u_star(i, t)),
                    "ut" => NCPoly::letter(Letter::ut(i, t)),
                    "ut*" => NCPoly::letter(Letter::ut_star(i, t)),
                    "v" => NCPoly::letter(Letter::v(i, t)),
                    "v*" => NCPoly::letter(Letter::v_star(i, t)),
                    "y" => y_coord(i, t),
                    _ => y_inv(i, t),
                }
            }
            _ => {
                self.pos = start;
                return self.err(format!("unknown atom '{name}'"));
            }
        };
        self.expect(b')')?;
        Ok(p)
    }

    fn term(&mut self) -> Result<NCPoly> {
        if self.eat(b'-') {
            return Ok(-self.term()?);
        }
        let mut acc = match self.complex() {
            Some(c) => {
                if !self.eat(b'*') {
                    return Ok(NCPoly::scalar(c));
                }
                NCPoly::scalar(c)
            }
            None => NCPoly::one(),
        };
        acc = acc.multiply(&self.atom()?);
        while self.eat(b'*') {
            acc = acc.multiply(&self.atom()?);
        }
        Ok(acc)
    }

    fn poly(&mut self) -> Result<NCPoly> {
        let mut sign = 1.0;
        let mut out = NCPoly::zero();
        loop {
            out = out + self.term()?.scale(C64::new(sign, 0.0));
            match self.peek() {
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                None => return Ok(out),
                Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            }
            self.pos += 1;
        }
    }
}

/// Parses a polynomial expression.
pub fn parse_poly(src: &str) -> Result<NCPoly> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    p.poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nc_algebra::Word;

    #[test]
    fn parses_grammar_terms() {
        let p = parse_poly("0.1+0i*x(1)*u(1,0.5) + 0.1+0i*u*(1,0.5)*x(1)").unwrap();
        let mut e = NCPoly::zero();
        e.add_term(Word::new([Letter::x(1), Letter::u(1, 0.5)]), C64::new(0.1, 0.0));
        e.add_term(Word::new([Letter::u_star(1, 0.5), Letter::x(1)]), C64::new(0.1, 0.0));
        assert_eq!(p, e);
        assert!(p.is_self_adjoint(1e-15));
    }

    #[test]
    fn parses_signs_and_bare_terms() {
        let p = parse_poly("-x(1) + 2-3i*ut*(2,0.25) - 1.5").unwrap();
        assert_eq!(p.coeff(&Word::letter(Letter::x(1))), C64::new(-1.0, 0.0));
        assert_eq!(p.coeff(&Word::letter(Letter::ut_star(2, 0.25))), C64::new(2.0, -3.0));
        assert_eq!(p.coeff(&Word::empty()), C64::new(-1.5, 0.0));
    }

    #[test]
    fn y_atoms_carry_exponential_weights() {
        let p = parse_poly("y(1,2)*yinv(1,2)").unwrap();
        assert!(p.approx_eq(&NCPoly::one(), 1e-14));
    }

    #[test]
    fn liberation_and_family_atoms() {
        let p = parse_poly("1+0i*xl(1,2,0.3)*x(3,1)*v*(1,0.2)").unwrap();
        let w = Word::new([Letter::xl(1, 2, 0.3), Letter::x_family(3, 1), Letter::v_star(1, 0.2)]);
        assert_eq!(p, NCPoly::from(w));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("1*q(1)").is_err());
        assert!(parse_poly("x(1").is_err());
        assert!(parse_poly("x(1) x(2)").is_err());
    }

    #[test]
    fn display_round_trips() {
        let p = parse_poly("0.5-0.25i*x(1)*u(2,0.75)*ut*(1,0.5) + 3*xl(1,1,0.1)").unwrap();
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }
}
