//! Exact rational helpers shared by every module.
//!
//! All exact quantities are [`Q`] (arbitrary-precision rationals). Decimal
//! inputs such as `"0.5"` are converted exactly, never through `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"3"`, `"-2"`, `"1/3"`, `"0.25"`, `".5"`, `"1e-3"` and `"2.5E2"` exactly.
pub fn parse_rational(input: &str) -> Result<Q> {
    let err = || Error::Parse {
        what: "rational",
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{whole}{fraction}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| err())?
    };
    let scale = exponent - fraction.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    let mut value = Q::from_integer(numer) * ten.pow(scale);
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Canonical `"p/q"` rendering used in every exact output (denominator always present).
pub fn to_pq(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Q, exp: usize) -> Q {
    let mut acc = Q::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Exact `floor(q * 2^64)` for `0 <= q <= 1`, together with whether the product is an integer.
pub(crate) fn scaled_floor_2_64(q: &Q) -> (u128, bool) {
    let scaled = q.numer() << 64usize;
    let (quot, rem) = num_integer::Integer::div_rem(&scaled, q.denom());
    (quot.to_u128().unwrap_or(u128::MAX), rem.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.5").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("1.5").unwrap(), frac(3, 2));
        assert_eq!(parse_rational("0.9").unwrap(), frac(9, 10));
        assert_eq!(parse_rational(".25").unwrap(), frac(1, 4));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("1/3").unwrap(), frac(1, 3));
        assert_eq!(parse_rational("1e-3").unwrap(), frac(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pq_roundtrip() {
        let q = frac(-7, 12);
        assert_eq!(to_pq(&q), "-7/12");
        assert_eq!(parse_rational(&to_pq(&q)).unwrap(), q);
        assert_eq!(to_pq(&int(3)), "3/1");
    }

    #[test]
    fn scaled_floor() {
        assert_eq!(scaled_floor_2_64(&frac(1, 2)), (1u128 << 63, true));
        let (f, exact) = scaled_floor_2_64(&frac(1, 3));
        assert!(!exact);
        assert_eq!(f, (1u128 << 64) / 3);
        assert_eq!(scaled_floor_2_64(&int(1)), (1u128 << 64, true));
    }
}
