use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Gaussian rational `re + i·im`, used for complex actions before
/// realification.
pub type ComplexRational = Complex<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses the canonical `"p/q"` or `"p"` text form. Surrounding whitespace
/// is ignored; a zero denominator is an error.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{text:?}: zero denominator")));
        }
        Ok(Rational::new(p, q))
    } else {
        let p = BigInt::from_str(text).map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        Ok(Rational::from_integer(p))
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite float (every finite `f64` is dyadic).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued fraction expansion.
pub fn approximate_f64(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let fractional = rest - a;
        if fractional < 1e-15 {
            break;
        }
        rest = 1.0 / fractional;
    }
    if q1 == 0 {
        return None;
    }
    let value = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -value } else { value })
}

fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// The rational with the smallest denominator (then smallest absolute
/// numerator) strictly inside the open interval `(lo, hi)`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Option<Rational> {
    if lo >= hi {
        return None;
    }
    if lo.is_negative() && hi.is_positive() {
        return Some(Rational::zero());
    }
    if !hi.is_positive() {
        // both ≤ 0
        return simplest_between(&-hi, &-lo).map(|r| -r);
    }
    Some(simplest_positive(lo, Some(hi)))
}

// 0 ≤ lo < hi (hi = None means +∞); returns the simplest rational in (lo, hi).
fn simplest_positive(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let fl = floor(lo);
    let next = Rational::from_integer(&fl + BigInt::one());
    match hi {
        None => next,
        Some(hi) if &next < hi => next,
        Some(hi) => {
            // lo and hi lie in [fl, fl + 1]
            let base = Rational::from_integer(fl);
            let lo_frac = lo - &base;
            let hi_frac = hi - &base;
            let inner_lo = hi_frac.recip();
            let inner = if lo_frac.is_zero() {
                simplest_positive(&inner_lo, None)
            } else {
                let inner_hi = lo_frac.recip();
                simplest_positive(&inner_lo, Some(&inner_hi))
            };
            base + inner.recip()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rational("6/4").unwrap(), frac(3, 2));
        assert_eq!(format_rational(&frac(3, 2)), "3/2");
        assert_eq!(format_rational(&frac(-4, 2)), "-2");
        assert_eq!(format_rational(&frac(1, -3)), "-1/3");
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn continued_fraction_approximation() {
        assert_eq!(approximate_f64(0.333333333333, 100).unwrap(), frac(1, 3));
        assert_eq!(approximate_f64(-2.5, 10).unwrap(), frac(-5, 2));
        assert_eq!(
            approximate_f64(std::f64::consts::PI, 1000).unwrap(),
            frac(355, 113)
        );
    }

    #[test]
    fn simplest_rational_in_interval() {
        assert_eq!(
            simplest_between(&frac(1, 3), &frac(1, 2)).unwrap(),
            frac(2, 5)
        );
        assert_eq!(simplest_between(&frac(-1, 2), &frac(1, 2)).unwrap(), int(0));
        assert_eq!(simplest_between(&int(2), &int(4)).unwrap(), int(3));
        assert_eq!(simplest_between(&int(2), &frac(5, 2)).unwrap(), frac(7, 3));
        assert_eq!(
            simplest_between(&frac(-5, 2), &int(-2)).unwrap(),
            frac(-7, 3)
        );
        assert!(simplest_between(&int(1), &int(1)).is_none());
        // brute force over small denominators
        let lo = frac(13, 37);
        let hi = frac(14, 37);
        let got = simplest_between(&lo, &hi).unwrap();
        let mut best = None;
        'outer: for q in 1..=40i64 {
            for p in 0..=q {
                let r = frac(p, q);
                if r > lo && r < hi {
                    best = Some(r);
                    break 'outer;
                }
            }
        }
        assert_eq!(Some(got), best);
    }
}
