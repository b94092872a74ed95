//! Dense univariate polynomials over the exact rationals.
//!
//! Small-degree plumbing for the ideal constructions `I(f)`, kernel-ideal
//! generators and annihilator polynomials: arithmetic, division, gcd/lcm,
//! evaluation and rational root extraction.

use num::{BigInt, One, Signed, Zero};
use std::fmt;

use crate::rational::{q_pow, Q};

/// Polynomial with exact rational coefficients, lowest degree first.
/// The zero polynomial stores an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Q::one()],
        }
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// `t - a`.
    pub fn linear_root(a: &Q) -> Self {
        Poly::new(vec![-a.clone(), Q::one()])
    }

    /// `prod (t - a_i)`.
    pub fn from_roots(roots: &[Q]) -> Self {
        let mut p = Poly::one();
        for a in roots {
            p = p.mul(&Poly::linear_root(a));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Poly::new(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - other.coeff(k));
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    /// Panics if `div` is zero.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        let dlead = div.leading();
        while !rem.is_zero() && rem.degree() >= div.degree() {
            let shift = rem.degree() - div.degree();
            let factor = rem.leading() / dlead.clone();
            quot[shift] = factor.clone();
            rem = rem.sub(&div.scale(&factor).shift(shift));
        }
        (Poly::new(quot), rem)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm; zero if either argument is zero.
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        self.mul(other).div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluation of `t^k * self` at `x`, allowing negative `k` for `x != 0`.
    pub fn eval_with_power(&self, x: &Q, k: i64) -> Result<Q, crate::error::FormatError> {
        Ok(self.eval(x) * q_pow(x, k)?)
    }

    /// All rational roots with multiplicity, in ascending numeric order.
    /// Returns the remaining (root-free) factor alongside.
    pub fn rational_roots(&self) -> (Vec<(Q, usize)>, Poly) {
        if self.is_zero() {
            return (Vec::new(), Poly::zero());
        }
        let mut rest = self.monic();
        let mut roots: Vec<(Q, usize)> = Vec::new();
        loop {
            if rest.degree() == 0 {
                break;
            }
            match first_rational_root(&rest) {
                Some(r) => {
                    let mut mult = 0;
                    let lin = Poly::linear_root(&r);
                    loop {
                        let (q, rm) = rest.div_rem(&lin);
                        if rm.is_zero() {
                            rest = q;
                            mult += 1;
                        } else {
                            break;
                        }
                    }
                    roots.push((r, mult));
                }
                None => break,
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, rest)
    }
}

/// One rational root of a nonzero polynomial, if any, via the rational root
/// theorem on the integer-cleared form.
fn first_rational_root(p: &Poly) -> Option<Q> {
    if p.coeff(0).is_zero() {
        return Some(Q::zero());
    }
    // Clear denominators to get integer coefficients.
    let mut denom_lcm = BigInt::one();
    for c in p.coeffs() {
        let d = c.denom();
        denom_lcm = num::integer::lcm(denom_lcm, d.clone());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let a0 = ints.first()?.abs();
    let an = ints.last()?.abs();
    let p_divs = divisors(&a0);
    let q_divs = divisors(&an);
    for num_d in &p_divs {
        for den_d in &q_divs {
            for sign in [1i64, -1] {
                let cand = Q::new(num_d * BigInt::from(sign), den_d.clone());
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Positive divisors of a positive integer; desk-scale trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 if c.is_one() => write!(f, "t")?,
                1 => write!(f, "{}*t", c)?,
                _ if c.is_one() => write!(f, "t^{}", k)?,
                _ => write!(f, "{}*t^{}", c, k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    #[test]
    fn arithmetic_and_division() {
        let f = Poly::from_roots(&[qi(1), qi(2)]); // t^2 - 3t + 2
        assert_eq!(f.coeff(0), qi(2));
        assert_eq!(f.coeff(1), qi(-3));
        assert_eq!(f.coeff(2), qi(1));
        let (q, r) = f.div_rem(&Poly::linear_root(&qi(1)));
        assert!(r.is_zero());
        assert_eq!(q, Poly::linear_root(&qi(2)));
        assert_eq!(f.eval(&qi(3)), qi(2));
        assert_eq!(f.eval(&qi(2)), qi(0));
    }

    #[test]
    fn division_identity_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let a = Poly::new(
                (0..rng.gen_range(1..6))
                    .map(|_| qr(rng.gen_range(-3..4), rng.gen_range(1..3)))
                    .collect(),
            );
            let b = Poly::new(
                (0..rng.gen_range(1..4))
                    .map(|_| qr(rng.gen_range(-3..4), rng.gen_range(1..3)))
                    .collect(),
            );
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.div_rem(&b);
            assert_eq!(q.mul(&b).add(&r), a);
            assert!(r.is_zero() || r.degree() < b.degree());
        }
    }

    #[test]
    fn gcd_lcm() {
        let a = Poly::from_roots(&[qi(0), qi(2)]);
        let b = Poly::from_roots(&[qi(2), qi(5)]);
        let g = a.gcd(&b);
        assert_eq!(g, Poly::linear_root(&qi(2)));
        let l = a.lcm(&b);
        assert_eq!(l, Poly::from_roots(&[qi(0), qi(2), qi(5)]));
        assert!(a.divides(&l));
        assert!(b.divides(&l));
    }

    #[test]
    fn rational_root_extraction() {
        let f = Poly::from_roots(&[qi(0), qi(0), qi(2), qr(1, 3)]).scale(&qi(6));
        let (roots, rest) = f.rational_roots();
        assert_eq!(rest.degree(), 0);
        assert_eq!(
            roots,
            vec![(qi(0), 2usize), (qr(1, 3), 1), (qi(2), 1)]
        );

        // t^2 + 1 has no rational roots.
        let g = Poly::new(vec![qi(1), qi(0), qi(1)]);
        let (roots, rest) = g.rational_roots();
        assert!(roots.is_empty());
        assert_eq!(rest.degree(), 2);
    }

    #[test]
    fn eval_with_negative_power() {
        let f = Poly::one();
        assert_eq!(f.eval_with_power(&qi(2), -2).unwrap(), qr(1, 4));
        assert!(f.eval_with_power(&qi(0), -1).is_err());
    }
}
