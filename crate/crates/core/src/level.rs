//! Thresholds in `(0, 1]` that are exact while small enough to hold, and
//! certified dyadic enclosures afterwards.
//!
//! Iterating the σ-chain squares-and-more the bit length of a rational at
//! every step, so past the first one or two candidates the exact numbers stop
//! fitting in memory. Every comparison the pipelines make is against a value
//! of the form `j / N` with small `N`, and for those a bound `2^-hi ≤ v ≤ 2^-lo`
//! settles the question just as well.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{bits, ceil_log2, floor_log2, fraction_string, Rational};

/// Exact rationals above this many bits (numerator plus denominator) are
/// replaced by their dyadic enclosure.
pub const EXACT_BIT_BUDGET: u64 = 1 << 16;

/// Exponents with more bits than this are not tracked; the value is then
/// [`Level::Vanishing`]. Every exact level is at least `2^-EXACT_BIT_BUDGET`,
/// far above `2^-2^64`, so vanishing levels still compare with all of them.
pub const EXPONENT_BIT_BUDGET: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Exact(Rational),
    /// `2^-hi ≤ value ≤ 2^-lo`; `hi = None` when no positive lower bound is tracked.
    Dyadic { lo: BigUint, hi: Option<BigUint> },
    /// Positive and below `2^-(2^EXPONENT_BIT_BUDGET)`.
    Vanishing,
}

/// `(lo, hi)` with `2^-hi ≤ r ≤ 2^-lo`, for `0 < r ≤ 1`.
fn exponent_bounds(r: &Rational) -> (BigUint, BigUint) {
    debug_assert!(r.is_positive() && *r <= Rational::one());
    let lo = -ceil_log2(r);
    let hi = -floor_log2(r);
    (BigUint::from(lo.max(0) as u64), BigUint::from(hi.max(0) as u64))
}

fn dyadic(lo: BigUint, hi: Option<BigUint>) -> Level {
    if lo.bits() > EXPONENT_BIT_BUDGET {
        return Level::Vanishing;
    }
    let hi = hi.filter(|h| h.bits() <= EXPONENT_BIT_BUDGET);
    Level::Dyadic { lo, hi }
}

impl Level {
    pub fn exact(r: Rational) -> Level {
        assert!(r.is_positive(), "levels are positive");
        if bits(&r) > EXACT_BIT_BUDGET && r <= Rational::one() {
            let (lo, hi) = exponent_bounds(&r);
            return dyadic(lo, Some(hi));
        }
        Level::Exact(r)
    }

    /// Exactly `2^-e`.
    pub fn pow2_neg(e: BigUint) -> Level {
        if e.bits() > EXPONENT_BIT_BUDGET {
            return Level::Vanishing;
        }
        match e.to_u64() {
            Some(small) if small < EXACT_BIT_BUDGET => {
                Level::Exact(Rational::new(BigInt::one(), BigInt::one() << small))
            }
            _ => Level::Dyadic { lo: e.clone(), hi: Some(e) },
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Level::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_vanishing(&self) -> bool {
        matches!(self, Level::Vanishing)
    }

    /// Exponent enclosure `(lo, hi)`; `None` once vanishing.
    fn bounds(&self) -> Option<(BigUint, Option<BigUint>)> {
        match self {
            Level::Exact(r) => {
                if *r > Rational::one() {
                    // Only thresholds ≤ 1 are ever demoted, so this branch is
                    // reached by callers scaling an exact value above 1.
                    return Some((BigUint::zero(), None));
                }
                let (lo, hi) = exponent_bounds(r);
                Some((lo, Some(hi)))
            }
            Level::Dyadic { lo, hi } => Some((lo.clone(), hi.clone())),
            Level::Vanishing => None,
        }
    }

    pub fn half(&self) -> Level {
        self.scale(&Rational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Multiplies by a constant `0 < s ≤ 1`.
    pub fn scale(&self, s: &Rational) -> Level {
        assert!(s.is_positive() && *s <= Rational::one(), "scale factor must lie in (0, 1]");
        match self {
            Level::Exact(r) if bits(r) + bits(s) <= 2 * EXACT_BIT_BUDGET => Level::exact(r * s),
            Level::Vanishing => Level::Vanishing,
            _ => {
                let (lo, hi) = self.bounds().expect("not vanishing");
                let (slo, shi) = exponent_bounds(s);
                dyadic(lo + slo, hi.map(|h| h + shi))
            }
        }
    }

    pub fn mul(&self, other: &Level) -> Level {
        match (self, other) {
            (Level::Vanishing, _) | (_, Level::Vanishing) => Level::Vanishing,
            (Level::Exact(a), Level::Exact(b)) if bits(a) + bits(b) <= 2 * EXACT_BIT_BUDGET => {
                Level::exact(a * b)
            }
            _ => {
                let (alo, ahi) = self.bounds().expect("not vanishing");
                let (blo, bhi) = other.bounds().expect("not vanishing");
                let hi = match (ahi, bhi) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
                dyadic(alo + blo, hi)
            }
        }
    }

    pub fn powi(&self, e: u32) -> Level {
        if e == 0 {
            return Level::Exact(Rational::one());
        }
        match self {
            Level::Vanishing => Level::Vanishing,
            // Powers of coprime parts stay coprime, so the result has about
            // `e` times the bits and would be demoted anyway.
            Level::Exact(r) if bits(r).saturating_mul(e as u64) <= EXACT_BIT_BUDGET || *r > Rational::one() => {
                Level::exact(crate::rational::pow(r, e))
            }
            _ => {
                let (lo, hi) = self.bounds().expect("not vanishing");
                dyadic(lo * e, hi.map(|h| h * e))
            }
        }
    }

    /// Compares against a nonnegative rational, or `None` when the tracked
    /// enclosure straddles it.
    pub fn cmp_rational(&self, v: &Rational) -> Option<Ordering> {
        if !v.is_positive() {
            return Some(Ordering::Greater);
        }
        if let Level::Exact(r) = self {
            return Some(r.cmp(v));
        }
        if *v > Rational::one() {
            return Some(Ordering::Less);
        }
        let (vlo, vhi) = exponent_bounds(v);
        match self.bounds() {
            None => {
                if vhi.bits() < EXPONENT_BIT_BUDGET {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
            Some((lo, hi)) => {
                if lo > vhi {
                    return Some(Ordering::Less);
                }
                if let Some(h) = &hi {
                    if *h < vlo {
                        return Some(Ordering::Greater);
                    }
                    if *h == lo {
                        if let Some(e) = lo.to_u64().filter(|e| *e <= 4 * EXACT_BIT_BUDGET) {
                            let exact = Rational::new(BigInt::one(), BigInt::one() << e);
                            return Some(exact.cmp(v));
                        }
                    }
                }
                None
            }
        }
    }

    pub fn cmp_level(&self, other: &Level) -> Option<Ordering> {
        match (self, other) {
            (Level::Exact(a), _) => other.cmp_rational(a).map(Ordering::reverse),
            (_, Level::Exact(b)) => self.cmp_rational(b),
            (Level::Vanishing, Level::Vanishing) => None,
            _ => {
                // a ≤ 2^-a.lo < 2^-b.hi ≤ b
                let less = |a: &Level, b: &Level| -> bool {
                    match (a.bounds(), b.bounds()) {
                        (None, Some((_, Some(bhi)))) => bhi.bits() < EXPONENT_BIT_BUDGET,
                        (Some((alo, _)), Some((_, Some(bhi)))) => alo > bhi,
                        _ => false,
                    }
                };
                if less(self, other) {
                    Some(Ordering::Less)
                } else if less(other, self) {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    /// `self ≥ v`, failing when undecidable.
    pub fn ge(&self, v: &Rational) -> Result<bool> {
        self.cmp_rational(v)
            .map(|o| o != Ordering::Less)
            .ok_or_else(|| Error::Precision(format!("{self} vs {}", fraction_string(v))))
    }

    /// `self < v`, failing when undecidable.
    pub fn lt(&self, v: &Rational) -> Result<bool> {
        self.ge(v).map(|b| !b)
    }

    /// Compact textual form: `p/q`, `2^-e`, `[2^-hi, 2^-lo]`, or `(0, 2^-2^64)`.
    pub fn render(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Exact(r) => write!(f, "{}", fraction_string(r)),
            Level::Dyadic { lo, hi: Some(hi) } if lo == hi => write!(f, "2^-{lo}"),
            Level::Dyadic { lo, hi: Some(hi) } => write!(f, "[2^-{hi}, 2^-{lo}]"),
            Level::Dyadic { lo, hi: None } => write!(f, "(0, 2^-{lo}]"),
            Level::Vanishing => write!(f, "(0, 2^-2^{EXPONENT_BIT_BUDGET})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn exact_levels_compare_exactly() {
        let l = Level::exact(ratio(3, 10));
        assert_eq!(l.cmp_rational(&ratio(1, 5)), Some(Ordering::Greater));
        assert_eq!(l.cmp_rational(&ratio(3, 10)), Some(Ordering::Equal));
        assert_eq!(l.cmp_rational(&Rational::zero()), Some(Ordering::Greater));
        assert!(l.ge(&ratio(3, 10)).unwrap());
    }

    #[test]
    fn huge_powers_become_dyadic_and_still_compare_to_grid_values() {
        let l = Level::exact(ratio(1, 3)).powi(200_000);
        assert!(matches!(l, Level::Dyadic { .. }));
        assert_eq!(l.cmp_rational(&ratio(1, 5040)), Some(Ordering::Less));
        assert_eq!(l.cmp_rational(&Rational::zero()), Some(Ordering::Greater));
    }

    #[test]
    fn pow2_neg_switches_representation_at_the_budget() {
        assert_eq!(Level::pow2_neg(BigUint::from(4u32)), Level::exact(ratio(1, 16)));
        let big = Level::pow2_neg(BigUint::from(EXACT_BIT_BUDGET * 2));
        assert!(matches!(big, Level::Dyadic { .. }));
        assert_eq!(big.cmp_rational(&ratio(1, 1 << 20)), Some(Ordering::Less));
        assert!(Level::pow2_neg(BigUint::one() << (EXPONENT_BIT_BUDGET as usize + 1)).is_vanishing());
    }

    #[test]
    fn vanishing_is_below_every_reasonable_value() {
        let v = Level::Vanishing;
        assert_eq!(v.cmp_rational(&ratio(1, 1_000_000)), Some(Ordering::Less));
        assert_eq!(v.cmp_rational(&Rational::zero()), Some(Ordering::Greater));
        assert_eq!(v.cmp_level(&Level::exact(ratio(1, 7))), Some(Ordering::Less));
        assert_eq!(v.cmp_level(&Level::Vanishing), None);
    }

    #[test]
    fn enclosures_are_sound() {
        let r = ratio(3, 10);
        let (lo, hi) = exponent_bounds(&r);
        assert_eq!((lo, hi), (BigUint::from(1u32), BigUint::from(2u32)));
        let d = Level::Dyadic { lo: BigUint::from(1u32), hi: Some(BigUint::from(2u32)) };
        // [1/4, 1/2] straddles 3/10.
        assert_eq!(d.cmp_rational(&r), None);
        assert!(d.ge(&r).is_err());
    }

    #[test]
    fn mul_and_scale_track_bounds() {
        let a = Level::pow2_neg(BigUint::from(EXACT_BIT_BUDGET + 10));
        let b = a.mul(&a).half();
        match b {
            Level::Dyadic { lo, hi: Some(hi) } => {
                assert_eq!(lo, BigUint::from(2 * (EXACT_BIT_BUDGET + 10) + 1));
                assert_eq!(hi, lo);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
