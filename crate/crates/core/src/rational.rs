//! Helpers over [`BigRational`]: parsing, float conversion and the exact
//! integer logarithms used for length assignment.

use alloc::string::String;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Failure to read a probability written as `"num/den"`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRatioError {
    #[error("empty probability string")]
    Empty,
    #[error("`{0}` is not an exact rational; write it as \"num/den\"")]
    NotRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"3/8"`, `"1"` or `"0"` into an exact rational.
///
/// Decimal and exponent notation are rejected so that no probability ever
/// passes through a float.
pub fn parse_ratio(text: &str) -> Result<BigRational, ParseRatioError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRatioError::Empty);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let parse = |s: &str| -> Result<BigInt, ParseRatioError> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatioError::NotRational(text.into()));
        }
        s.parse::<BigInt>()
            .map_err(|_| ParseRatioError::NotRational(text.into()))
    };
    let num = parse(num)?;
    let den = parse(den)?;
    if den.is_zero() {
        return Err(ParseRatioError::ZeroDenominator(text.into()));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational as `"num/den"`, or just `"num"` for integers.
pub struct RatioDisplay<'a>(pub &'a BigRational);

impl fmt::Display for RatioDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Nearest-ish `f64` to `x`; exact to within a couple of ulps even when the
/// numerator and denominator are far beyond `f64` range.
pub fn to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let negative = x.is_negative();
    let num = x.numer().magnitude().clone();
    let den = x.denom().magnitude().clone();
    let shift = num.bits() as i64 - den.bits() as i64 - 66;
    let q = if shift > 0 {
        num / (den << shift as usize)
    } else {
        (num << (-shift) as usize) / den
    };
    let mantissa = q.to_u128().expect("quotient fits in 68 bits") as f64;
    let v = libm::ldexp(mantissa, shift as i32);
    if negative {
        -v
    } else {
        v
    }
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    if bits <= 1000 {
        libm::log(x.to_f64().expect("fits below 2^1000"))
    } else {
        let drop = bits - 64;
        let top = (x >> drop as usize).to_f64().expect("64-bit head");
        libm::log(top) + drop as f64 * core::f64::consts::LN_2
    }
}

/// `ln(p)` for a positive rational, evaluated as `ln(num) - ln(den)`.
pub fn ln_ratio(p: &BigRational) -> f64 {
    debug_assert!(p.numer().sign() == Sign::Plus);
    ln_biguint(p.numer().magnitude()) - ln_biguint(p.denom().magnitude())
}

/// `p * ln(1/p)` with the continuity convention `0 * ln(1/0) = 0`.
pub fn nats_term(p: &BigRational) -> f64 {
    if p.is_zero() || p.is_one() {
        0.0
    } else {
        -to_f64(p) * ln_ratio(p)
    }
}

/// Smallest `l >= 0` with `p * radix^l >= 1`, for `0 < p`.
///
/// This is `ceil(log_radix(1/p))` computed without any floating point.
pub fn min_length_for(p: &BigRational, radix: u32) -> u32 {
    debug_assert!(p.numer().sign() == Sign::Plus);
    let num = p.numer().magnitude();
    let den = p.denom().magnitude();
    let r = BigUint::from(radix);
    // Jump close to the answer using bit lengths, then walk.
    let gap = den.bits().saturating_sub(num.bits());
    let step_bits = 32 - (radix - 1).leading_zeros() as u64;
    let mut l = (gap.saturating_sub(1) / step_bits) as u32;
    let mut scaled = num * r.pow(l);
    while &scaled < den {
        scaled *= &r;
        l += 1;
    }
    l
}

/// Smallest `l >= 0` with `radix^l >= count`, i.e. `ceil(log_radix(count))`.
pub fn ceil_log(count: usize, radix: u32) -> u32 {
    let mut l = 0;
    let mut power: u128 = 1;
    while power < count as u128 {
        power *= radix as u128;
        l += 1;
    }
    l
}

/// Exact `radix^-len`.
pub fn radix_power_inv(radix: u32, len: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(radix).pow(len))
}

/// Returns `Some(k)` when `count == radix^k` for some `k >= 0`.
pub fn exact_log(count: usize, radix: u32) -> Option<u32> {
    let k = ceil_log(count, radix);
    ((radix as u128).pow(k) == count as u128).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_exact_forms_and_rejects_floats() {
        assert_eq!(parse_ratio("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_ratio(" 2/4 ").unwrap(), q(1, 2));
        assert_eq!(parse_ratio("1").unwrap(), q(1, 1));
        assert_eq!(parse_ratio("0").unwrap(), q(0, 1));
        assert!(matches!(
            parse_ratio("0.5"),
            Err(ParseRatioError::NotRational(_))
        ));
        assert!(matches!(
            parse_ratio("1e-3"),
            Err(ParseRatioError::NotRational(_))
        ));
        assert!(matches!(
            parse_ratio("1/0"),
            Err(ParseRatioError::ZeroDenominator(_))
        ));
        assert_eq!(parse_ratio(""), Err(ParseRatioError::Empty));
    }

    #[test]
    fn length_for_exact_powers_is_not_off_by_one() {
        assert_eq!(min_length_for(&q(1, 8), 2), 3);
        assert_eq!(min_length_for(&q(1, 9), 3), 2);
        assert_eq!(min_length_for(&q(1, 10), 2), 4);
        assert_eq!(min_length_for(&q(9, 10), 2), 1);
        assert_eq!(min_length_for(&q(1, 1), 2), 0);
        let tiny = BigRational::new(1.into(), BigInt::from(2).pow(300));
        assert_eq!(min_length_for(&tiny, 2), 300);
        assert_eq!(min_length_for(&(tiny.clone() * q(3, 2)), 2), 300);
        assert_eq!(min_length_for(&(tiny * q(2, 1)), 2), 299);
    }

    #[test]
    fn float_conversion_survives_huge_parts() {
        let big = BigInt::from(10).pow(400);
        let x = BigRational::new(big.clone() * 3, big * 4);
        assert_eq!(to_f64(&x), 0.75);
        assert_eq!(to_f64(&q(-1, 3)), -1.0 / 3.0);
        let ln = ln_ratio(&BigRational::new(1.into(), BigInt::from(2).pow(2000)));
        assert!((ln + 2000.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn integer_logs() {
        assert_eq!(ceil_log(5, 2), 3);
        assert_eq!(ceil_log(4, 2), 2);
        assert_eq!(ceil_log(9, 3), 2);
        assert_eq!(ceil_log(1, 2), 0);
        assert_eq!(exact_log(27, 3), Some(3));
        assert_eq!(exact_log(6, 2), None);
    }
}
