//! Exact rational scalars and their canonical `"p/q"` string form.
//!
//! Every scalar in this crate is an arbitrary-precision rational; nothing is
//! ever rounded. All serialized rationals use the canonical form `p/q` with
//! `q > 0` and `gcd(p, q) = 1`, which `num`'s `Ratio` maintains internally.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::FormatError;

/// The scalar type of the whole crate.
pub type Q = BigRational;

/// Shorthand for an integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical `"p/q"` rendering; the denominator is always printed.
pub fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn q_from_str(s: &str) -> Result<Q, FormatError> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| FormatError::BadRational(s.to_string()))?;
    let denom: BigInt = den_str
        .parse()
        .map_err(|_| FormatError::BadRational(s.to_string()))?;
    if denom.is_zero() {
        return Err(FormatError::BadRational(s.to_string()));
    }
    Ok(Q::new(numer, denom))
}

/// `base^exp` for a possibly negative exponent; errors on `0^negative`.
pub fn q_pow(base: &Q, exp: i64) -> Result<Q, FormatError> {
    if base.is_zero() && exp < 0 {
        return Err(FormatError::ZeroToNegativePower);
    }
    if base.is_zero() {
        return Ok(if exp == 0 { Q::one() } else { Q::zero() });
    }
    let magnitude = base.pow(i32::try_from(exp.unsigned_abs()).expect("exponent fits in i32"));
    Ok(if exp < 0 {
        magnitude.recip()
    } else {
        magnitude
    })
}

/// Exact binomial coefficient as a rational.
pub fn q_binomial(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    let mut acc = Q::one();
    for j in 0..k {
        acc *= Q::new(BigInt::from(n - j), BigInt::from(j + 1));
    }
    acc
}

/// True if `x` is a nonnegative integer.
pub fn is_nonneg_integer(x: &Q) -> bool {
    x.is_integer() && !x.is_negative()
}
