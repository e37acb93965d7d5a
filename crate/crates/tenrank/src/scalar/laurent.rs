//! Laurent polynomials in a formal parameter epsilon with cyclotomic
//! coefficients. Negative exponents are allowed; degeneration
//! verification later normalizes by a single global epsilon power to
//! recover the polynomial form.
//!
//! The same type doubles as the univariate polynomial ring used by the
//! symbolic multiqubit persistence decision (the variable is then the
//! chart parameter rather than an approximation scale).

use std::collections::BTreeMap;
use std::fmt;

use super::{Cyclotomic, Rational, Ring};
use crate::{Error, Result};

/// Sum of terms coeff * eps^k, keyed by exponent. No zero coefficients
/// are stored; the empty map is 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsLaurent {
    terms: BTreeMap<i64, Cyclotomic>,
}

impl EpsLaurent {
    pub fn zero() -> Self {
        EpsLaurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_cyc(Cyclotomic::one())
    }

    pub fn from_cyc(c: Cyclotomic) -> Self {
        Self::single(0, c)
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_cyc(Cyclotomic::from_rational(q))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_cyc(Cyclotomic::from_int(v))
    }

    pub fn single(exp: i64, coeff: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        EpsLaurent { terms }
    }

    /// eps^k
    pub fn eps(exp: i64) -> Self {
        Self::single(exp, Cyclotomic::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Cyclotomic)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, exp: i64) -> Cyclotomic {
        self.terms.get(&exp).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    /// Minimal stored exponent and its coefficient.
    pub fn lowest(&self) -> Result<(i64, Cyclotomic)> {
        let (k, c) = self.terms.iter().next().ok_or(Error::ZeroPolynomial)?;
        Ok((*k, c.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let entry = terms.entry(*k).or_insert_with(Cyclotomic::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                terms.remove(k);
            }
        }
        EpsLaurent { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        EpsLaurent {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<i64, Cyclotomic> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let p = a.mul(b);
                if p.is_zero() {
                    continue;
                }
                let entry = acc.entry(i + j).or_insert_with(Cyclotomic::zero);
                *entry = entry.add(&p);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        EpsLaurent { terms: acc }
    }

    /// Multiply by eps^k.
    pub fn scale_by_power(&self, k: i64) -> Self {
        EpsLaurent {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale_cyc(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let p = v.mul(c);
            if !p.is_zero() {
                terms.insert(*k, p);
            }
        }
        EpsLaurent { terms }
    }

    /// Some(c) when no epsilon actually occurs (a single exponent-0 term
    /// or zero).
    pub fn as_cyclotomic(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(Cyclotomic::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                if *k == 0 {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.min_exp().map_or(true, |k| k >= 0)
    }

    /// True for a nonzero constant (exponent-0 monomial).
    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.contains_key(&0)
    }

    /// Polynomial division with remainder; both operands must be honest
    /// polynomials (no negative exponents) and the divisor nonzero.
    pub fn poly_div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert!(self.is_polynomial() && divisor.is_polynomial());
        let d_deg = divisor.max_exp().unwrap();
        let d_lead = divisor.coeff(d_deg);
        let d_lead_inv = d_lead.inv()?;
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while !rem.is_zero() && rem.max_exp().unwrap() >= d_deg {
            let r_deg = rem.max_exp().unwrap();
            let c = rem.coeff(r_deg).mul(&d_lead_inv);
            let mono = Self::single(r_deg - d_deg, c);
            quo = quo.add(&mono);
            rem = rem.sub(&mono.mul(divisor));
        }
        Ok((quo, rem))
    }
}

/// Monic gcd of a list of polynomials in K[t] (nonnegative exponents).
/// Returns 0 when every input is 0. A gcd that is a nonzero constant
/// certifies that the inputs share no common root, including t = 0.
pub fn poly_gcd_monic(items: &[EpsLaurent]) -> Result<EpsLaurent> {
    let mut g = EpsLaurent::zero();
    for item in items {
        let mut a = g;
        let mut b = item.clone();
        while !b.is_zero() {
            let (_, r) = a.poly_div_rem(&b)?;
            a = b;
            b = r;
        }
        g = a;
        if g.is_nonzero_constant() {
            break;
        }
    }
    if g.is_zero() {
        return Ok(g);
    }
    let lead = g.coeff(g.max_exp().unwrap());
    Ok(g.scale_cyc(&lead.inv()?))
}

impl fmt::Display for EpsLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (e, c) in &self.terms {
            // flatten the cyclotomic coefficient into monomials so the
            // literal stays parenthesis-free
            let base = format!("{c}");
            for piece in split_monomials(&base) {
                let with_eps = if *e == 0 {
                    piece.clone()
                } else {
                    match piece.as_str() {
                        "1" => format!("e^{e}"),
                        "-1" => format!("-e^{e}"),
                        _ => format!("{piece}*e^{e}"),
                    }
                };
                if out.is_empty() || with_eps.starts_with('-') {
                    out.push_str(&with_eps);
                } else {
                    out.push('+');
                    out.push_str(&with_eps);
                }
            }
        }
        write!(f, "{out}")
    }
}

/// Split a flat sum literal like `2*z12^5-1/3` into signed monomials.
fn split_monomials(s: &str) -> Vec<String> {
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() && !cur.ends_with('^') {
            pieces.push(std::mem::take(&mut cur));
            if ch == '-' {
                cur.push('-');
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        pieces.push(cur);
    }
    pieces
}

impl Ring for EpsLaurent {
    fn zero() -> Self {
        EpsLaurent::zero()
    }
    fn one() -> Self {
        EpsLaurent::one()
    }
    fn from_int(v: i64) -> Self {
        EpsLaurent::from_int(v)
    }
    fn is_zero(&self) -> bool {
        EpsLaurent::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        EpsLaurent::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        EpsLaurent::mul(self, other)
    }
    fn neg(&self) -> Self {
        EpsLaurent::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, zeta};

    #[test]
    fn exponent_cancellation() {
        let prod = EpsLaurent::eps(-1).mul(&EpsLaurent::eps(1));
        assert_eq!(prod, EpsLaurent::one());
    }

    #[test]
    fn additive_cancellation_drops_terms() {
        let a = EpsLaurent::single(2, Cyclotomic::from_int(2));
        let s = a.add(&a.neg());
        assert!(s.is_zero());
        assert_eq!(s.terms.len(), 0);
    }

    #[test]
    fn power_scaling_shifts() {
        let v = EpsLaurent::one().add(&EpsLaurent::eps(1));
        let shifted = v.scale_by_power(-1);
        assert_eq!(shifted.lowest().unwrap().0, -1);
        assert_eq!(shifted.coeff(0), Cyclotomic::one());
    }

    #[test]
    fn lowest_examples() {
        let v = EpsLaurent::eps(-2).add(&EpsLaurent::single(1, Cyclotomic::from_int(3)));
        let (k, c) = v.lowest().unwrap();
        assert_eq!((k, c), (-2, Cyclotomic::one()));
        let (k, c) = EpsLaurent::from_int(5).lowest().unwrap();
        assert_eq!((k, c), (0, Cyclotomic::from_int(5)));
        let single = EpsLaurent::single(3, Cyclotomic::from_int(2).sub(&zeta(4)));
        let (k, c) = single.lowest().unwrap();
        assert_eq!(k, 3);
        assert_eq!(c, Cyclotomic::from_int(2).sub(&zeta(4)));
        assert!(matches!(EpsLaurent::zero().lowest(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn polynomial_gcd_detects_common_roots() {
        // (t - 1)(t + 2) and (t - 1)(t - 3) share t = 1
        let t = EpsLaurent::eps(1);
        let a = t.sub(&EpsLaurent::one()).mul(&t.add(&EpsLaurent::from_int(2)));
        let b = t.sub(&EpsLaurent::one()).mul(&t.sub(&EpsLaurent::from_int(3)));
        let g = poly_gcd_monic(&[a.clone(), b]).unwrap();
        assert_eq!(g, t.sub(&EpsLaurent::one()));
        // against a coprime polynomial the gcd is constant
        let c = t.add(&EpsLaurent::from_int(5));
        let g2 = poly_gcd_monic(&[a, c]).unwrap();
        assert!(g2.is_nonzero_constant());
    }

    #[test]
    fn common_eps_factor_is_not_a_constant_gcd() {
        let a = EpsLaurent::eps(1);
        let b = EpsLaurent::eps(2).scale_cyc(&Cyclotomic::from_int(7));
        let g = poly_gcd_monic(&[a, b]).unwrap();
        assert!(!g.is_nonzero_constant());
        assert_eq!(g, EpsLaurent::eps(1));
    }

    #[test]
    fn display_round_trip() {
        let v = EpsLaurent::single(-2, zeta(4))
            .add(&EpsLaurent::single(3, Cyclotomic::from_rational(rat(2))))
            .add(&EpsLaurent::one());
        let s = format!("{v}");
        let parsed = crate::scalar::parse_scalar(&s).unwrap();
        assert_eq!(parsed, v);
    }
}
