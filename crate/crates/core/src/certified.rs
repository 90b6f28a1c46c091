//! Certified sign of linear combinations of logarithms,
//! `sum c_i ln(x_i)` with rational `c_i` and positive rational `x_i`.
//!
//! Bound checks compare an exact average length against an entropy, which is
//! such a combination. The comparison runs in three stages:
//!
//! 1. an `f64` estimate, trusted when it is at least [`FLOAT_TOLERANCE`]
//!    away from zero;
//! 2. an exact zero test: logarithms of pairwise coprime integers greater
//!    than one are linearly independent over the rationals, so after
//!    rewriting every `x_i` over a coprime basis the sum is zero iff each
//!    basis coefficient vanishes;
//! 3. fixed-point interval evaluation starting at 128 bits, doubling until
//!    the interval excludes zero.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{ln_ratio, to_f64};
use crate::source::SourceDistribution;

/// Float margins below this escalate to exact evaluation.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

const START_PRECISION: u32 = 128;
const MAX_PRECISION: u32 = 1 << 16;
const GUARD_BITS: u32 = 64;

/// A formal sum `sum c_i ln(x_i)`.
#[derive(Debug, Clone, Default)]
pub struct LogSum {
    terms: Vec<(BigRational, BigRational)>,
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff * ln(arg)`. Terms with a zero coefficient or `arg == 1`
    /// are dropped.
    pub fn push(&mut self, coeff: BigRational, arg: BigRational) {
        assert!(arg.is_positive(), "logarithm of a non-positive number");
        if !coeff.is_zero() && !arg.is_one() {
            self.terms.push((coeff, arg));
        }
    }

    pub fn approx(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, x)| to_f64(c) * ln_ratio(x))
            .sum()
    }

    /// Exact test for `sum c_i ln(x_i) == 0`.
    pub fn is_exactly_zero(&self) -> bool {
        let mut basis = Vec::new();
        for (_, x) in &self.terms {
            insert_coprime(&mut basis, x.numer().magnitude().clone());
            insert_coprime(&mut basis, x.denom().magnitude().clone());
        }
        basis.iter().all(|b| {
            let total: BigRational = self
                .terms
                .iter()
                .map(|(c, x)| {
                    let e = valuation(x.numer().magnitude(), b) as i64
                        - valuation(x.denom().magnitude(), b) as i64;
                    c * BigRational::from_integer(e.into())
                })
                .sum();
            total.is_zero()
        })
    }

    /// Sign of the sum, certified.
    pub fn sign(&self) -> Ordering {
        let estimate = self.approx();
        if estimate.abs() >= FLOAT_TOLERANCE {
            return estimate.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        self.exact_sign()
    }

    /// Sign without the float shortcut.
    pub fn exact_sign(&self) -> Ordering {
        if self.is_exactly_zero() {
            return Ordering::Equal;
        }
        let mut precision = START_PRECISION;
        loop {
            let (mid, err) = self.interval(precision);
            if &mid - &err > BigInt::zero() {
                return Ordering::Greater;
            }
            if &mid + &err < BigInt::zero() {
                return Ordering::Less;
            }
            if precision >= MAX_PRECISION {
                // A nonzero sum this close to zero is far outside anything
                // the bound checks produce.
                return mid.sign().cmp_zero();
            }
            precision *= 2;
        }
    }

    /// Midpoint and error radius of the sum, scaled by `2^(precision + guard)`.
    fn interval(&self, precision: u32) -> (BigInt, BigInt) {
        let scale = precision + GUARD_BITS;
        let mut mid = BigInt::zero();
        let mut err = BigInt::zero();
        for (c, x) in &self.terms {
            let (ln_num, e_num) = ln_fixed(x.numer().magnitude(), scale);
            let (ln_den, e_den) = ln_fixed(x.denom().magnitude(), scale);
            let value = ln_num - ln_den;
            let value_err = e_num + e_den;
            let (u, v) = (c.numer(), c.denom());
            mid += (&value * u).div_floor(v);
            err += (&value_err * u.abs()).div_ceil(v) + 1;
        }
        (mid, err)
    }
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

/// Adds `x` to a set of pairwise coprime integers, refining so that every
/// number inserted so far stays a product of basis elements.
fn insert_coprime(basis: &mut Vec<BigUint>, x: BigUint) {
    let mut pending = vec![x];
    'next: while let Some(x) = pending.pop() {
        if x.is_one() {
            continue;
        }
        for i in 0..basis.len() {
            let g = basis[i].gcd(&x);
            if g.is_one() {
                continue;
            }
            if g == basis[i] && g == x {
                continue 'next;
            }
            let b = basis.swap_remove(i);
            pending.push(&b / &g);
            pending.push(&x / &g);
            pending.push(g);
            continue 'next;
        }
        basis.push(x);
    }
}

/// Multiplicity of `base` in `x`.
fn valuation(x: &BigUint, base: &BigUint) -> u64 {
    let mut x = x.clone();
    let mut count = 0;
    loop {
        let (q, r) = x.div_rem(base);
        if !r.is_zero() {
            return count;
        }
        x = q;
        count += 1;
    }
}

/// `ln(x)` for `x >= 1` as a fixed-point value at `2^scale`, with an error
/// radius in the same units.
fn ln_fixed(x: &BigUint, scale: u32) -> (BigInt, BigInt) {
    debug_assert!(!x.is_zero());
    let exponent = x.bits() - 1;
    let one = BigInt::one() << scale;
    // Mantissa in [1, 2), truncated.
    let m = if exponent > scale as u64 {
        BigInt::from(x >> (exponent - scale as u64) as usize)
    } else {
        BigInt::from(x << (scale as u64 - exponent) as usize)
    };
    let t = ((&m - &one) << scale as usize).div_floor(&(&m + &one));
    let (mantissa_ln, mantissa_err) = two_atanh(&t, scale);
    if exponent == 0 {
        return (mantissa_ln, mantissa_err + 4);
    }
    let (ln2, ln2_err) = two_atanh(&(&one / 3u32), scale);
    let exponent = BigInt::from(exponent);
    (
        mantissa_ln + &ln2 * &exponent,
        mantissa_err + 4 + (ln2_err + 1) * exponent,
    )
}

/// `2 atanh(t)` for fixed-point `0 <= t < 1/2` at `2^scale`.
fn two_atanh(t: &BigInt, scale: u32) -> (BigInt, BigInt) {
    let t2 = (t * t) >> scale as usize;
    let mut power = t.clone();
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / k;
        power = (&power * &t2) >> scale as usize;
        k += 2;
        terms += 1;
    }
    // Each term carries at most a few ulps of truncation, the tail is below
    // one ulp, and an input error of one ulp moves 2 atanh by < 3 ulps.
    (sum * 2, BigInt::from(8 * (terms + 4)))
}

/// Sign of `value - H_r(S)`, certified.
pub fn compare_with_entropy(
    value: &BigRational,
    source: &SourceDistribution,
    radix: u32,
) -> Ordering {
    entropy_gap(value, source, radix).sign()
}

/// `value ln r + sum p ln p`, which is `(value - H_r(S)) ln r`.
pub fn entropy_gap(value: &BigRational, source: &SourceDistribution, radix: u32) -> LogSum {
    let mut sum = LogSum::new();
    sum.push(
        value.clone(),
        BigRational::from_integer(BigInt::from(radix)),
    );
    for p in source.probs() {
        if !p.is_zero() {
            sum.push(p.clone(), p.clone());
        }
    }
    sum
}
