//! Mechanical checks of the code bounding and code compression inequalities,
//! excess analysis and convergence tables.
//!
//! Average lengths are exact rationals and every verdict is certified by
//! [`crate::certified`]; the `f64` fields are for display.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::certified::{compare_with_entropy, entropy_gap};
use crate::coding::{
    average_length, classic_shannon_lengths, extended_shannon_lengths, CodeFamily, CodingError,
    LengthProfile,
};
use crate::entropy::{entropy_radix, is_zero_entropy, EntropyError};
use crate::rational::{exact_log, min_length_for, to_f64};
use crate::source::{extension_size, SourceDistribution, SourceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("bound checks apply to classic or extended Shannon codes, not `{0}`")]
    BadFamily(CodeFamily),
    #[error("q = {q} is not a positive power of radix {radix}")]
    BadShape { q: usize, radix: u32 },
    #[error("perturbation must satisfy 0 <= epsilon < 1/q^2")]
    BadEpsilon,
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Result of checking `H_r(S) <= L <= H_r(S) + 1/n` for one source, code
/// family, radix and extension order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub family: CodeFamily,
    pub radix: u32,
    /// Extension order; 1 when the source is coded directly.
    pub n: u32,
    /// `H_r(S)` of the base source.
    pub h_r: f64,
    /// Average length of the code on `S^n`.
    pub block_avg: BigRational,
    /// `block_avg / n`.
    pub avg_len_per_symbol: BigRational,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `avg == H_r` exactly.
    pub lower_attained: bool,
    /// `avg == H_r + 1/n` exactly.
    pub upper_attained: bool,
    /// Whether the upper check was strict (`<`), as for classic Shannon codes.
    pub strict_upper: bool,
    /// `avg - H_r`.
    pub excess: f64,
    /// `H_r + 1/n - avg`.
    pub bound_gap: f64,
    /// Exact excess, available when the entropy is exactly zero.
    pub exact_excess: Option<BigRational>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }

    /// The allowance `1/n` above the entropy.
    pub fn allowance(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.n))
    }
}

fn report(
    source: &SourceDistribution,
    radix: u32,
    family: CodeFamily,
    n: u32,
    block_avg: BigRational,
) -> Result<BoundReport, BoundError> {
    let h_r = entropy_radix(source, radix)?.value;
    let allowance = BigRational::new(BigInt::one(), BigInt::from(n));
    let avg = &block_avg / BigRational::from_integer(BigInt::from(n));

    let lower = compare_with_entropy(&avg, source, radix);
    let upper = compare_with_entropy(&(&avg - &allowance), source, radix);
    let strict_upper = family == CodeFamily::ClassicShannon;
    let upper_ok = if strict_upper {
        upper == Ordering::Less
    } else {
        upper != Ordering::Greater
    };
    let avg_f = to_f64(&avg);
    Ok(BoundReport {
        family,
        radix,
        n,
        h_r,
        exact_excess: is_zero_entropy(source).then(|| avg.clone()),
        block_avg,
        lower_ok: lower != Ordering::Less,
        upper_ok,
        lower_attained: lower == Ordering::Equal,
        upper_attained: upper == Ordering::Equal,
        strict_upper,
        excess: avg_f - h_r,
        bound_gap: h_r + to_f64(&allowance) - avg_f,
        avg_len_per_symbol: avg,
    })
}

/// Checks `H_r(S) <= L <= H_r(S) + 1` for extended Shannon codes and the
/// traditional strict `L < H_r(S) + 1` for classic Shannon codes.
pub fn check_code_bounding(
    source: &SourceDistribution,
    radix: u32,
    family: CodeFamily,
) -> Result<BoundReport, BoundError> {
    let profile = match family {
        CodeFamily::ClassicShannon => classic_shannon_lengths(source, radix)?,
        CodeFamily::ExtendedShannon => extended_shannon_lengths(source, radix)?,
        other => return Err(BoundError::BadFamily(other)),
    };
    let avg = average_length(source, &profile)?;
    report(source, radix, family, 1, avg)
}

/// Codes `S^n` with an extended Shannon code and checks
/// `H_r(S) <= L(S^n)/n <= H_r(S) + 1/n`.
pub fn check_compression(
    source: &SourceDistribution,
    radix: u32,
    n: u32,
    cap: usize,
) -> Result<BoundReport, BoundError> {
    let block_avg = extension_average_length(source, radix, n, cap)?;
    report(source, radix, CodeFamily::ExtendedShannon, n, block_avg)
}

/// Exact average extended-Shannon length over the tuples of `S^n`.
///
/// Tuples with the same symbol counts share a probability, so the sum runs
/// over count vectors weighted by multinomial coefficients. The `cap` on
/// `q^n` still applies.
pub fn extension_average_length(
    source: &SourceDistribution,
    radix: u32,
    n: u32,
    cap: usize,
) -> Result<BigRational, BoundError> {
    if radix < 2 {
        return Err(CodingError::BadRadix(radix).into());
    }
    if n == 0 {
        return Err(SourceError::ZeroOrder.into());
    }
    let q = source.q();
    extension_size(q, n, cap).ok_or(SourceError::ExtensionTooLarge { q, n, cap })?;
    let powers: Vec<Vec<BigRational>> = source
        .probs()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let mut row = alloc::vec![BigRational::one()];
            for k in 0..n as usize {
                let next = &row[k] * p;
                row.push(next);
            }
            row
        })
        .collect();
    let mut total = BigRational::zero();
    type_classes(
        &powers,
        n as usize,
        BigRational::one(),
        BigInt::one(),
        &mut |prob, count| {
            let len = if prob.is_one() {
                1
            } else {
                min_length_for(prob, radix)
            };
            total += prob * BigRational::from_integer(count * BigInt::from(len));
        },
    );
    Ok(total)
}

/// Calls `visit(prob, count)` for every way of splitting `remaining` draws
/// among the symbols whose power tables are in `powers`.
fn type_classes(
    powers: &[Vec<BigRational>],
    remaining: usize,
    prob: BigRational,
    count: BigInt,
    visit: &mut dyn FnMut(&BigRational, BigInt),
) {
    match powers {
        [] => {}
        [last] => visit(&(prob * &last[remaining]), count),
        [first, rest @ ..] => {
            let mut choose = BigInt::one();
            for (k, power) in first.iter().enumerate().take(remaining + 1) {
                type_classes(rest, remaining - k, &prob * power, &count * &choose, visit);
                choose = choose * (remaining - k) / (k + 1);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: u32,
    pub avg: BigRational,
    pub h_r: f64,
    pub excess: f64,
    /// `1/n`, the allowance the excess must stay under.
    pub bound: BigRational,
    pub within_bound: bool,
    pub exact_excess: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub radix: u32,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }
}

/// One [`check_compression`] row for each `n` in `1..=n_max`.
pub fn convergence_table(
    source: &SourceDistribution,
    radix: u32,
    n_max: u32,
    cap: usize,
) -> Result<ConvergenceTable, BoundError> {
    if n_max == 0 {
        return Err(SourceError::ZeroOrder.into());
    }
    let q = source.q();
    extension_size(q, n_max, cap).ok_or(SourceError::ExtensionTooLarge { q, n: n_max, cap })?;
    let rows = (1..=n_max)
        .map(|n| {
            let r = check_compression(source, radix, n, cap)?;
            Ok(ConvergenceRow {
                n,
                bound: r.allowance(),
                within_bound: r.holds(),
                h_r: r.h_r,
                excess: r.excess,
                exact_excess: r.exact_excess,
                avg: r.avg_len_per_symbol,
            })
        })
        .collect::<Result<_, BoundError>>()?;
    Ok(ConvergenceTable { radix, rows })
}

/// One side of an excess-sensitivity experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedCase {
    pub source: SourceDistribution,
    pub lengths: Vec<u32>,
    pub avg: BigRational,
    pub h_r: f64,
    /// Classic Shannon `L - H_r`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcessSensitivity {
    pub q: usize,
    pub radix: u32,
    pub epsilon: BigRational,
    /// `q - 1` symbols at `1/q + epsilon`, one at `1/q - (q - 1) epsilon`.
    pub just_over: PerturbedCase,
    /// `q - 1` symbols at `1/q - epsilon`, one at `1/q + (q - 1) epsilon`.
    pub just_under: PerturbedCase,
}

/// Classic Shannon excess of a uniform `q = r^k` source after nudging all
/// but one probability slightly above, or slightly below, `1/q`.
pub fn excess_sensitivity(
    q: usize,
    radix: u32,
    epsilon: &BigRational,
) -> Result<ExcessSensitivity, BoundError> {
    if radix < 2 {
        return Err(CodingError::BadRadix(radix).into());
    }
    match exact_log(q, radix) {
        Some(k) if k >= 1 => {}
        _ => return Err(BoundError::BadShape { q, radix }),
    }
    let q_big = BigInt::from(q);
    let limit = BigRational::new(BigInt::one(), &q_big * &q_big);
    if epsilon < &BigRational::zero() || epsilon >= &limit {
        return Err(BoundError::BadEpsilon);
    }
    let base = BigRational::new(BigInt::one(), q_big);
    let rest = epsilon * BigRational::from_integer(BigInt::from(q - 1));
    let case = |many: BigRational, one: BigRational| -> Result<PerturbedCase, BoundError> {
        let mut probs = alloc::vec![many; q - 1];
        probs.push(one);
        let labels = (0..q).map(|i| alloc::format!("s{i}")).collect();
        let source = SourceDistribution::new(labels, probs)?;
        let profile = classic_shannon_lengths(&source, radix)?;
        let avg = average_length(&source, &profile)?;
        let h_r = entropy_radix(&source, radix)?.value;
        Ok(PerturbedCase {
            excess: to_f64(&avg) - h_r,
            lengths: profile.lengths().to_vec(),
            source,
            avg,
            h_r,
        })
    };
    Ok(ExcessSensitivity {
        q,
        radix,
        epsilon: epsilon.clone(),
        just_over: case(&base + epsilon, &base - &rest)?,
        just_under: case(&base - epsilon, &base + &rest)?,
    })
}

/// Verdicts of the good-code bounding lemma for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodCodeBound {
    pub avg: BigRational,
    pub h_r: f64,
    /// `log_r q`.
    pub k: f64,
    /// `avg <= ceil(log_r q)`.
    pub good: bool,
    /// `H_r <= avg <= H_r + log_r q`.
    pub holds_with_log_q: bool,
    /// `avg` is no worse than the extended Shannon average, so `k = 1` applies.
    pub tight_branch: bool,
    /// `H_r <= avg <= H_r + 1`, checked only on the tight branch.
    pub holds_with_one: Option<bool>,
}

/// Checks `H_r <= L <= H_r + k` with `k = log_r q`, and with `k = 1` when
/// the code is no worse than the extended Shannon code.
pub fn good_code_bound_check(
    source: &SourceDistribution,
    radix: u32,
    profile: &LengthProfile,
) -> Result<GoodCodeBound, BoundError> {
    if profile.radix() != radix {
        return Err(CodingError::RadixMismatch {
            expected: radix,
            profile: profile.radix(),
        }
        .into());
    }
    let avg = average_length(source, profile)?;
    let h_r = entropy_radix(source, radix)?.value;
    let q = source.q();
    let good = crate::coding::is_good_code(source, profile)?.good;
    let lower_ok = compare_with_entropy(&avg, source, radix) != Ordering::Less;

    // (avg - H_r - log_r q) ln r = entropy_gap(avg) - ln q
    let mut with_log_q = entropy_gap(&avg, source, radix);
    with_log_q.push(
        -BigRational::one(),
        BigRational::from_integer(BigInt::from(q)),
    );
    let holds_with_log_q = lower_ok && with_log_q.sign() != Ordering::Greater;

    let shannon = average_length(source, &extended_shannon_lengths(source, radix)?)?;
    let tight_branch = avg <= shannon;
    let holds_with_one = tight_branch.then(|| {
        lower_ok
            && compare_with_entropy(&(&avg - BigRational::one()), source, radix)
                != Ordering::Greater
    });
    Ok(GoodCodeBound {
        avg,
        h_r,
        k: libm::log(q as f64) / libm::log(radix as f64),
        good,
        holds_with_log_q,
        tight_branch,
        holds_with_one,
    })
}

/// Random rational source for property sweeps.
///
/// Draws `q` in `1..=q_max` and integer weights in `1..=1000`. One draw in
/// ten is turned into a certain event; another one in ten has a single
/// weight zeroed.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, q_max: usize) -> SourceDistribution {
    let q = rng.gen_range(1..=q_max.max(1));
    let mut weights: Vec<u64> = (0..q).map(|_| rng.gen_range(1..=1000)).collect();
    let roll: f64 = rng.gen();
    if roll < 0.1 {
        let keep = rng.gen_range(0..q);
        for (i, w) in weights.iter_mut().enumerate() {
            if i != keep {
                *w = 0;
            }
        }
    } else if roll < 0.2 && q > 1 {
        let drop = rng.gen_range(0..q);
        weights[drop] = 0;
    }
    SourceDistribution::from_weights(&weights).expect("at least one positive weight")
}
