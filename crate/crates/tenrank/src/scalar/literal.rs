//! Parser for the scalar literal grammar shared by tensor files and the
//! CLI:
//!
//! ```text
//! expr    := [ '+' | '-' ] product { ( '+' | '-' ) product }
//! product := atom { '*' atom }
//! atom    := RATIONAL | 'z' INT [ '^' SINT ] | 'e' [ '^' SINT ]
//! RATIONAL:= INT [ '/' INT ]
//! ```
//!
//! Examples: `-3/4`, `2*z12^5-1/3`, `e^-2`, `1/2*z4^1*e^3`.

use num_bigint::BigInt;

use super::{Cyclotomic, EpsLaurent, Rational};
use crate::{Error, Result};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, src }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.peek().map_or(false, |c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<BigInt>().map_err(|e| self.err(&e.to_string()))
    }

    fn parse_signed_int(&mut self) -> Result<BigInt> {
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            false
        };
        let v = self.parse_uint()?;
        Ok(if neg { -v } else { v })
    }

    fn parse_atom(&mut self) -> Result<EpsLaurent> {
        self.skip_ws();
        match self.peek() {
            Some('z') => {
                self.bump();
                let m = self.parse_uint()?;
                let m: usize = m
                    .try_into()
                    .map_err(|_| self.err("root order out of range"))?;
                if m == 0 {
                    return Err(self.err("root order must be positive"));
                }
                let k = if self.peek() == Some('^') {
                    self.bump();
                    self.parse_signed_int()?
                } else {
                    BigInt::from(1)
                };
                let k_mod: i64 = (k % BigInt::from(m as i64) + BigInt::from(m as i64))
                    .try_into()
                    .map_err(|_| self.err("exponent out of range"))?;
                Ok(EpsLaurent::from_cyc(Cyclotomic::root(m, k_mod)))
            }
            Some('e') => {
                self.bump();
                let k = if self.peek() == Some('^') {
                    self.bump();
                    self.parse_signed_int()?
                } else {
                    BigInt::from(1)
                };
                let k: i64 = k.try_into().map_err(|_| self.err("exponent out of range"))?;
                Ok(EpsLaurent::eps(k))
            }
            Some(c) if c.is_ascii_digit() => {
                let numer = self.parse_uint()?;
                let denom = if self.peek() == Some('/') {
                    self.bump();
                    let d = self.parse_uint()?;
                    if d == BigInt::from(0) {
                        return Err(self.err("zero denominator"));
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                Ok(EpsLaurent::from_rational(Rational::new(numer, denom)))
            }
            _ => Err(self.err("expected a rational, z<m>^<k>, or e^<k>")),
        }
    }

    fn parse_product(&mut self) -> Result<EpsLaurent> {
        let mut acc = self.parse_atom()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                let next = self.parse_atom()?;
                acc = acc.mul(&next);
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_expr(&mut self) -> Result<EpsLaurent> {
        self.skip_ws();
        let mut negate = false;
        if self.peek() == Some('-') {
            self.bump();
            negate = true;
        } else if self.peek() == Some('+') {
            self.bump();
        }
        let mut acc = self.parse_product()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    let t = self.parse_product()?;
                    acc = acc.add(&t);
                }
                Some('-') => {
                    self.bump();
                    let t = self.parse_product()?;
                    acc = acc.sub(&t);
                }
                None => return Ok(acc),
                Some(_) => return Err(self.err("unexpected character")),
            }
        }
    }
}

/// Parse a scalar literal into the most general scalar kind.
pub fn parse_scalar(src: &str) -> Result<EpsLaurent> {
    Parser::new(src).parse_expr()
}

/// Parse a literal that must not mention epsilon.
pub fn parse_cyclotomic(src: &str) -> Result<Cyclotomic> {
    parse_scalar(src)?
        .as_cyclotomic()
        .ok_or_else(|| Error::Parse(format!("epsilon not allowed in {src:?}")))
}

/// Parse a literal that must be a plain rational.
pub fn parse_rational(src: &str) -> Result<Rational> {
    parse_cyclotomic(src)?
        .as_rational()
        .ok_or_else(|| Error::Parse(format!("roots of unity not allowed in {src:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_frac, zeta};

    #[test]
    fn rational_forms() {
        assert_eq!(parse_rational("-3/4").unwrap(), rat_frac(-3, 4));
        assert_eq!(parse_rational("17").unwrap(), rat(17));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn cyclotomic_combinations() {
        let v = parse_cyclotomic("2*z12^5-1/3").unwrap();
        let expect = zeta(12).pow(5).scale(&rat(2)).add(&Cyclotomic::from_rational(rat_frac(-1, 3)));
        assert_eq!(v, expect);
        assert_eq!(parse_cyclotomic("z4").unwrap(), zeta(4));
        assert_eq!(parse_cyclotomic("z4^-1").unwrap(), zeta(4).pow(3));
    }

    #[test]
    fn epsilon_monomials() {
        let v = parse_scalar("e^-2").unwrap();
        assert_eq!(v, EpsLaurent::eps(-2));
        let w = parse_scalar("1/2*z4*e^3+e").unwrap();
        let expect = EpsLaurent::single(3, zeta(4).scale(&rat_frac(1, 2))).add(&EpsLaurent::eps(1));
        assert_eq!(w, expect);
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(parse_scalar("2 + ").is_err());
        assert!(parse_scalar("q").is_err());
    }
}
