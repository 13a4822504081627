//! Exact rationals and the small amount of integer arithmetic built on them.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Rational {
    Rational::new(numer.into(), denom.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Always renders as `p/q`, including integers (`3/1`).
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn bits(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Exact `floor(log2(r))` for `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "floor_log2 of a non-positive rational");
    let p = r.numer().magnitude();
    let q = r.denom().magnitude();
    let t = p.bits() as i64 - q.bits() as i64;
    // r lies in (2^(t-1), 2^(t+1)); decide which half.
    if t >= 0 {
        if p >= &(q << t as u64) {
            t
        } else {
            t - 1
        }
    } else if (p << (-t) as u64) >= *q {
        t
    } else {
        t - 1
    }
}

/// Exact `ceil(log2(r))` for `r > 0`.
pub fn ceil_log2(r: &Rational) -> i64 {
    let f = floor_log2(r);
    let p = r.numer().magnitude();
    let q = r.denom().magnitude();
    let exact = if f >= 0 {
        *p == (q << f as u64)
    } else {
        (p << (-f) as u64) == *q
    };
    if exact {
        f
    } else {
        f + 1
    }
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    // Powers of coprime integers stay coprime.
    Rational::new_raw(r.numer().pow(e), r.denom().pow(e))
}

/// `⌈(q/p)²⌉` for `r = p/q > 0`, without reducing the square.
pub fn ceil_inverse_square(r: &Rational) -> BigUint {
    let p = r.numer().magnitude().pow(2u32);
    let q = r.denom().magnitude().pow(2u32);
    num_integer::Integer::div_ceil(&q, &p)
}

pub fn floor_to_biguint(r: &Rational) -> BigUint {
    let f = r.floor().to_integer();
    match f.sign() {
        Sign::Minus => BigUint::zero(),
        _ => f.magnitude().clone(),
    }
}

pub fn ceil_to_biguint(r: &Rational) -> BigUint {
    let c = r.ceil().to_integer();
    match c.sign() {
        Sign::Minus => BigUint::zero(),
        _ => c.magnitude().clone(),
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `Σ_{j ≤ upto} C(n, j)`.
pub fn binomial_prefix_sum(n: u64, upto: u64) -> BigUint {
    (0..=upto.min(n)).map(|j| binomial(n, j)).sum()
}

pub fn to_usize(r: &BigUint) -> Option<usize> {
    r.to_usize()
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/10").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational(" 4/8 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn fraction_strings_keep_the_denominator() {
        assert_eq!(fraction_string(&int(3)), "3/1");
        assert_eq!(fraction_string(&ratio(27, 64000)), "27/64000");
    }

    #[test]
    fn log2_rounding_is_exact() {
        assert_eq!(floor_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(ceil_log2(&int(9)), 4);
        assert_eq!(floor_log2(&int(9)), 3);
        assert_eq!(floor_log2(&ratio(1, 8)), -3);
        assert_eq!(ceil_log2(&ratio(1, 8)), -3);
        assert_eq!(floor_log2(&ratio(3, 10)), -2);
        assert_eq!(ceil_log2(&ratio(3, 10)), -1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 8), BigUint::from(12870u32));
        assert_eq!(binomial(5, 7), BigUint::zero());
        assert_eq!(binomial_prefix_sum(4, 1), BigUint::from(5u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
    }
}
