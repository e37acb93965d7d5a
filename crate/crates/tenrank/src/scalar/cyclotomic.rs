//! Elements of the cyclotomic fields Q(zeta_m), represented by their
//! coordinates in the power basis 1, zeta, ..., zeta^(phi(m)-1) of
//! Q[x]/(Phi_m), where Phi_m is the m-th cyclotomic polynomial.
//!
//! Reduction modulo Phi_m gives a canonical form, so equality of two
//! elements of the same order is coefficient-wise equality. Elements of
//! different orders are compared after lifting both into Q(zeta_lcm).
//! Phi_m itself is obtained by dividing x^m - 1 by Phi_k over the proper
//! divisors k of m; no factorization machinery is involved.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::{rat, rational_literal, Field, Rational, Ring};
use crate::{Error, Result};

// ---------------------------------------------------------------------
// dense polynomials over Q, little-endian coefficient vectors
// ---------------------------------------------------------------------

fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_deg(p: &[Rational]) -> usize {
    debug_assert!(!p.is_empty());
    p.len() - 1
}

/// Quotient and remainder of a by b; b must be nonzero.
fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = poly_trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem = poly_trim(a.to_vec());
    if rem.is_empty() || rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quo = vec![Rational::zero(); rem.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while !rem.is_empty() && rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let coeff = rem.last().unwrap() / &lead;
        quo[shift] = coeff.clone();
        for (i, bc) in b.iter().enumerate() {
            let v = &rem[shift + i] - &(bc * &coeff);
            rem[shift + i] = v;
        }
        rem = poly_trim(rem);
    }
    (poly_trim(quo), rem)
}

fn poly_sub_scaled(a: &mut Vec<Rational>, b: &[Rational], q: &[Rational]) {
    // a -= b * q
    if b.is_empty() || q.is_empty() {
        return;
    }
    let need = b.len() + q.len() - 1;
    if a.len() < need {
        a.resize(need, Rational::zero());
    }
    for (i, bc) in b.iter().enumerate() {
        if bc.is_zero() {
            continue;
        }
        for (j, qc) in q.iter().enumerate() {
            if qc.is_zero() {
                continue;
            }
            let v = &a[i + j] - &(bc * qc);
            a[i + j] = v;
        }
    }
    let trimmed = poly_trim(std::mem::take(a));
    *a = trimmed;
}

// ---------------------------------------------------------------------
// cached per-order data: Phi_m and the reduction rows x^k mod Phi_m
// ---------------------------------------------------------------------

struct CycTable {
    degree: usize,
    /// x^k mod Phi_m for 0 <= k <= max(2*degree - 2, m - 1), each row of
    /// length `degree`.
    rows: Vec<Vec<Rational>>,
}

fn euler_phi(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn tables() -> &'static Mutex<HashMap<usize, Arc<CycTable>>> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<CycTable>>>> = OnceLock::new();
    TABLES.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyclotomic_poly(m: usize) -> Vec<Rational> {
    if m == 1 {
        return vec![rat(-1), rat(1)];
    }
    // (x^m - 1) / prod_{k | m, k < m} Phi_k
    let mut num = vec![Rational::zero(); m + 1];
    num[0] = rat(-1);
    num[m] = rat(1);
    let mut result = num;
    for k in 1..m {
        if m % k == 0 {
            let phi_k = phi_coeffs(k);
            let (q, r) = poly_divmod(&result, &phi_k);
            assert!(r.is_empty(), "cyclotomic polynomial division must be exact");
            result = q;
        }
    }
    result
}

fn phi_coeffs(m: usize) -> Vec<Rational> {
    let t = table(m);
    // reconstruct Phi from the degree-th reduction row: x^deg = -Phi_lower
    let mut phi = vec![Rational::zero(); t.degree + 1];
    phi[t.degree] = rat(1);
    for (i, c) in t.rows[t.degree].iter().enumerate() {
        phi[i] = -c.clone();
    }
    phi
}

fn table(m: usize) -> Arc<CycTable> {
    if let Some(t) = tables().lock().unwrap().get(&m) {
        return Arc::clone(t);
    }
    let phi = cyclotomic_poly(m);
    let degree = poly_deg(&phi);
    debug_assert_eq!(degree, euler_phi(m));
    let rows_needed = (2 * degree).max(m).max(1);
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(rows_needed);
    for k in 0..degree {
        let mut row = vec![Rational::zero(); degree];
        row[k] = rat(1);
        rows.push(row);
    }
    for k in degree..rows_needed {
        // x * rows[k-1], then reduce the overflow coefficient via
        // x^degree = -(Phi - x^degree)
        let prev = &rows[k - 1];
        let mut row = vec![Rational::zero(); degree];
        for i in 0..degree - 1 {
            row[i + 1] = prev[i].clone();
        }
        let carry = prev[degree - 1].clone();
        if !carry.is_zero() {
            for i in 0..degree {
                let v = &row[i] - &(&carry * &phi[i]);
                row[i] = v;
            }
        }
        rows.push(row);
    }
    let t = Arc::new(CycTable { degree, rows });
    tables().lock().unwrap().insert(m, Arc::clone(&t));
    t
}

// ---------------------------------------------------------------------
// the field element
// ---------------------------------------------------------------------

/// An element of Q(zeta_m), reduced modulo Phi_m. Elements that are in
/// fact rational are normalized down to order 1.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: usize,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    fn raw(order: usize, coeffs: Vec<Rational>) -> Self {
        Cyclotomic { order, coeffs }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.order > 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            let c = self.coeffs.swap_remove(0);
            self.order = 1;
            self.coeffs = vec![c];
        }
        self
    }

    pub fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        Cyclotomic { order: 1, coeffs: vec![rat(1)] }
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q] }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rat(v))
    }

    /// zeta_m^k, reduced mod Phi_m. Exponents are taken modulo m, so
    /// zeta_m^m = 1 and negative exponents are allowed.
    pub fn root(m: usize, k: i64) -> Self {
        assert!(m >= 1, "root order must be positive");
        let k = k.rem_euclid(m as i64) as usize;
        let t = table(m);
        Cyclotomic::raw(m, t.rows[k].clone())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// Some(q) when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.order == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.order == 1
    }

    /// Embed into Q(zeta_target); `order` must divide `target`. The
    /// result intentionally keeps the target order (no collapse back to
    /// a smaller field) so that both sides of a promoted pair have
    /// coefficient vectors of the same length.
    pub fn lift(&self, target: usize) -> Self {
        assert!(target % self.order == 0, "lift target must be a multiple of the order");
        if target == self.order {
            return self.clone();
        }
        let s = target / self.order;
        let t = table(target);
        let mut acc = vec![Rational::zero(); t.degree];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, r) in t.rows[j * s].iter().enumerate() {
                if !r.is_zero() {
                    let v = &acc[i] + &(c * r);
                    acc[i] = v;
                }
            }
        }
        Cyclotomic { order: target, coeffs: acc }
    }

    fn promote(&self, other: &Self) -> (Self, Self, usize) {
        let l = self.order.lcm(&other.order);
        (self.lift(l), other.lift(l), l)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, l) = self.promote(other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        Cyclotomic::raw(l, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b, l) = self.promote(other);
        let t = table(l);
        let deg = t.degree;
        let mut acc = vec![Rational::zero(); deg];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let p = x * y;
                let k = i + j;
                if k < deg {
                    let v = &acc[k] + &p;
                    acc[k] = v;
                } else {
                    for (c, r) in acc.iter_mut().zip(t.rows[k].iter()) {
                        if !r.is_zero() {
                            let v = &*c + &(&p * r);
                            *c = v;
                        }
                    }
                }
            }
        }
        Cyclotomic::raw(l, acc)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
        .normalized()
    }

    /// Exact inverse via the extended Euclidean algorithm modulo Phi_m.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Cyclotomic::from_rational(q.recip()));
        }
        let phi = phi_coeffs(self.order);
        let a = poly_trim(self.coeffs.clone());
        // extended gcd of a and Phi, tracking the cofactor of a
        let mut r0 = a;
        let mut r1 = phi;
        let mut s0 = vec![rat(1)];
        let mut s1: Vec<Rational> = Vec::new();
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let mut s_next = s0.clone();
            poly_sub_scaled(&mut s_next, &s1, &q);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s_next;
        }
        // Phi_m is irreducible over Q, so the gcd is a nonzero constant.
        assert_eq!(r0.len(), 1, "cyclotomic polynomial must be coprime to a reduced element");
        let g = r0[0].clone();
        let t = table(self.order);
        let mut coeffs = vec![Rational::zero(); t.degree];
        for (i, c) in s0.iter().enumerate() {
            coeffs[i] = c / &g;
        }
        Ok(Cyclotomic::raw(self.order, coeffs))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = self.promote(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let piece = if k == 0 {
                rational_literal(c)
            } else if c.is_one() {
                format!("z{}^{}", self.order, k)
            } else if (-c).is_one() {
                format!("-z{}^{}", self.order, k)
            } else {
                format!("{}*z{}^{}", rational_literal(c), self.order, k)
            };
            if out.is_empty() || piece.starts_with('-') {
                out.push_str(&piece);
            } else {
                out.push('+');
                out.push_str(&piece);
            }
        }
        write!(f, "{out}")
    }
}

impl Ring for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn from_int(v: i64) -> Self {
        Cyclotomic::from_int(v)
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Cyclotomic::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Cyclotomic::mul(self, other)
    }
    fn neg(&self) -> Self {
        Cyclotomic::neg(self)
    }
}

impl Field for Cyclotomic {
    fn inv(&self) -> Result<Self> {
        Cyclotomic::inv(self)
    }
}

/// zeta_m, the canonical primitive m-th root of unity.
pub fn zeta(m: usize) -> Cyclotomic {
    Cyclotomic::root(m, 1)
}

/// The root-of-unity filter sum_{p=0}^{r-1} zeta_r^{pq}, which is r when
/// r divides q and 0 otherwise. The result is always rational.
pub fn root_filter_sum(r: usize, q: i64) -> Rational {
    assert!(r >= 1);
    let mut acc = Cyclotomic::zero();
    for p in 0..r as i64 {
        acc = acc.add(&Cyclotomic::root(r, p * q));
    }
    acc.as_rational()
        .expect("a full root-of-unity filter sum is rational")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_frac;

    #[test]
    fn roots_of_small_order() {
        assert_eq!(Cyclotomic::root(1, 0), Cyclotomic::one());
        assert_eq!(Cyclotomic::root(4, 2), Cyclotomic::from_int(-1));
        // zeta_3 + zeta_3^2 = -1 after reduction mod Phi_3 = x^2 + x + 1
        let s = Cyclotomic::root(3, 1).add(&Cyclotomic::root(3, 2));
        assert_eq!(s, Cyclotomic::from_int(-1));
    }

    #[test]
    fn exponents_wrap_modulo_order() {
        let a = Cyclotomic::root(5, 2).mul(&Cyclotomic::root(5, 3));
        assert_eq!(a, Cyclotomic::one());
        assert_eq!(Cyclotomic::root(7, -1), Cyclotomic::root(7, 6));
    }

    #[test]
    fn inverse_of_one_plus_zeta3() {
        // (1 + zeta_3)(-zeta_3) = -zeta_3 - zeta_3^2 = 1
        let a = Cyclotomic::one().add(&zeta(3));
        let inv = a.inv().unwrap();
        assert_eq!(inv, zeta(3).neg());
        assert_eq!(a.mul(&inv), Cyclotomic::one());
    }

    #[test]
    fn mixed_order_addition_lands_in_lcm_field() {
        let s = zeta(4).add(&zeta(3));
        assert_eq!(s.order(), 12);
        // subtracting the order-3 part recovers zeta_4 exactly
        assert_eq!(s.sub(&zeta(3)), zeta(4));
        assert_eq!(s.sub(&zeta(4)), zeta(3));
    }

    #[test]
    fn filter_sum_matches_divisibility() {
        assert_eq!(root_filter_sum(5, 10), rat(5));
        assert_eq!(root_filter_sum(5, 3), rat(0));
        assert_eq!(root_filter_sum(1, 7), rat(1));
        for r in 1..=12usize {
            for q in -30..=30i64 {
                let expect = if q.rem_euclid(r as i64) == 0 { rat(r as i64) } else { rat(0) };
                assert_eq!(root_filter_sum(r, q), expect, "r={r} q={q}");
            }
        }
    }

    #[test]
    fn rational_elements_collapse() {
        // zeta_8^4 = -1 should normalize to the rational -1
        let v = Cyclotomic::root(8, 4);
        assert!(v.is_rational());
        assert_eq!(v.as_rational().unwrap(), rat(-1));
    }

    #[test]
    fn display_round_trip_examples() {
        let v = zeta(12).scale(&rat(2)).pow(5).add(&Cyclotomic::from_rational(rat_frac(-1, 3)));
        let s = format!("{v}");
        let parsed = crate::scalar::parse_cyclotomic(&s).unwrap();
        assert_eq!(parsed, v);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(Cyclotomic::zero().inv(), Err(Error::DivisionByZero)));
    }
}
