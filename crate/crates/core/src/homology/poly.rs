//! Laurent polynomials with integer coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Finite map exponent -> nonzero coefficient. What the exponent counts
/// (powers of q, or half-powers of t) is up to the caller.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.terms.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in other.terms() {
            r.add_term(e, c);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * k)))
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e + k, c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }

    /// Substitute `x -> x^k` for integer `k`.
    pub fn stretch(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e * k, c)))
    }

    /// Division by `x + x^{-1}`; `None` when inexact.
    pub fn div_x_plus_inv(&self) -> Option<Self> {
        // x*p = (x^2 + 1) * r, and min exp of r equals min exp of x*p
        let mut rem = self.shift(1);
        let lo = match rem.min_exp() {
            Some(lo) => lo,
            None => return Some(Self::zero()),
        };
        let mut quot = Self::zero();
        while let Some(top) = rem.max_exp() {
            let c = rem.coeff(top);
            let e = top - 2;
            if e < lo {
                return None;
            }
            quot.add_term(e, c);
            rem.add_term(top, -c);
            rem.add_term(e, -c);
        }
        Some(quot)
    }

    /// Renders with variable `var`, treating exponents as multiples of
    /// `1/den`.
    pub fn render(&self, var: &str, den: i64) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().rev().map(|(&e, &c)| (e, c)).enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            let a = c.abs();
            let exp = if e % den == 0 { alloc::format!("{}", e / den) } else { alloc::format!("{}/{}", e, den) };
            if e == 0 {
                let _ = write!(s, "{a}");
            } else {
                if a != 1 {
                    let _ = write!(s, "{a}");
                }
                if exp == "1" {
                    let _ = write!(s, "{var}");
                } else {
                    let _ = write!(s, "{var}^{exp}");
                }
            }
        }
        s
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x", 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = LaurentPolynomial::from_terms([(1, 1), (-1, 1)]);
        let b = LaurentPolynomial::from_terms([(2, 3), (0, -1)]);
        let p = a.mul(&b);
        assert_eq!(p.div_x_plus_inv(), Some(b.clone()));
        assert_eq!(LaurentPolynomial::monomial(0, 1).div_x_plus_inv(), None);
        assert_eq!(p.sub(&p), LaurentPolynomial::zero());
        assert_eq!(a.shift(2).stretch(2), LaurentPolynomial::from_terms([(6, 1), (2, 1)]));
    }

    #[test]
    fn rendering() {
        let v = LaurentPolynomial::from_terms([(-8, -1), (-6, 1), (-2, 1)]);
        assert_eq!(v.render("t", 2), "t^-1 + t^-3 - t^-4");
        let w = LaurentPolynomial::from_terms([(1, -1), (-1, -1)]);
        assert_eq!(w.render("t", 2), "-t^1/2 - t^-1/2");
        assert_eq!(LaurentPolynomial::monomial(0, 1).render("t", 2), "1");
    }
}
