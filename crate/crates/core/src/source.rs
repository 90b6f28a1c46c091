//! Finite discrete sources with exact rational probabilities, their nth
//! extensions, and sequence models for block entropy estimation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::RatioDisplay;

/// Separator placed between component labels of an extension tuple.
pub const TUPLE_SEPARATOR: &str = "·";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SourceError {
    #[error("a source needs at least one symbol")]
    Empty,
    #[error("{labels} labels but {probs} probabilities")]
    LengthMismatch { labels: usize, probs: usize },
    #[error("probabilities sum to {0}, not 1")]
    SumNotOne(String),
    #[error("probability {value} of `{label}` is negative")]
    NegativeProbability { label: String, value: String },
    #[error("probability {value} of `{label}` exceeds 1")]
    ProbabilityAboveOne { label: String, value: String },
    #[error("duplicate symbol label `{0}`")]
    DuplicateLabel(String),
    #[error("extension of order {n} over {q} symbols exceeds the cap of {cap} tuples")]
    ExtensionTooLarge { q: usize, n: u32, cap: usize },
    #[error("extension order must be at least 1")]
    ZeroOrder,
    #[error("empty input")]
    EmptyInput,
    #[error("transition matrix is not {0}x{0}")]
    BadTransitionShape(usize),
    #[error("transition row {0} does not sum to 1")]
    RowNotStochastic(usize),
    #[error("transition matrix has no unique stationary distribution")]
    NoStationary,
}

/// A finite source: unique labels with exact probabilities summing to one.
///
/// Zero probabilities are kept; several code families treat them explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDistribution {
    labels: Vec<String>,
    probs: Vec<BigRational>,
}

impl SourceDistribution {
    /// Validates and builds a distribution. Label order is preserved.
    pub fn new(labels: Vec<String>, probs: Vec<BigRational>) -> Result<Self, SourceError> {
        if labels.len() != probs.len() {
            return Err(SourceError::LengthMismatch {
                labels: labels.len(),
                probs: probs.len(),
            });
        }
        if labels.is_empty() {
            return Err(SourceError::Empty);
        }
        let mut seen = BTreeSet::new();
        for (label, p) in labels.iter().zip(&probs) {
            if !seen.insert(label.as_str()) {
                return Err(SourceError::DuplicateLabel(label.clone()));
            }
            if p.is_negative() {
                return Err(SourceError::NegativeProbability {
                    label: label.clone(),
                    value: format!("{}", RatioDisplay(p)),
                });
            }
            if p > &BigRational::one() {
                return Err(SourceError::ProbabilityAboveOne {
                    label: label.clone(),
                    value: format!("{}", RatioDisplay(p)),
                });
            }
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(SourceError::SumNotOne(format!("{}", RatioDisplay(&total))));
        }
        Ok(Self { labels, probs })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(labels: &[&str], ratios: &[(i64, i64)]) -> Result<Self, SourceError> {
        Self::new(
            labels.iter().map(|s| String::from(*s)).collect(),
            ratios
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    /// A source over labels `s0, s1, ...` with the given weights normalized.
    ///
    /// At least one weight must be positive.
    pub fn from_weights(weights: &[u64]) -> Result<Self, SourceError> {
        let total: u128 = weights.iter().map(|&w| w as u128).sum();
        if total == 0 {
            return Err(SourceError::SumNotOne("0".into()));
        }
        let total = BigInt::from(total);
        Self::new(
            (0..weights.len()).map(|i| format!("s{i}")).collect(),
            weights
                .iter()
                .map(|&w| BigRational::new(w.into(), total.clone()))
                .collect(),
        )
    }

    /// Uniform source over `q` symbols labelled `s0..`.
    pub fn uniform(q: usize) -> Result<Self, SourceError> {
        Self::from_weights(&alloc::vec![1; q])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    /// Number of symbols, zero-probability ones included.
    pub fn q(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// True when some symbol has probability exactly one.
    pub fn is_certain(&self) -> bool {
        self.probs.iter().any(One::is_one)
    }

    /// Number of symbols with nonzero probability.
    pub fn support(&self) -> usize {
        self.probs.iter().filter(|p| !p.is_zero()).count()
    }
}

/// One compound symbol of an extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub indices: Vec<usize>,
    pub prob: BigRational,
}

/// The nth extension `S^n`: every n-tuple of base symbols with its product
/// probability, in lexicographic order of component indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedSource {
    base: SourceDistribution,
    n: u32,
    tuples: Vec<Tuple>,
}

impl ExtendedSource {
    pub fn base(&self) -> &SourceDistribution {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn probs(&self) -> impl Iterator<Item = &BigRational> {
        self.tuples.iter().map(|t| &t.prob)
    }

    /// Flattens the extension into an ordinary source whose labels are the
    /// component labels joined by [`TUPLE_SEPARATOR`].
    ///
    /// Fails only if joined labels collide, which requires base labels that
    /// themselves contain the separator.
    pub fn as_distribution(&self) -> Result<SourceDistribution, SourceError> {
        let labels = self
            .tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t
                    .indices
                    .iter()
                    .map(|&i| self.base.labels[i].as_str())
                    .collect();
                parts.join(TUPLE_SEPARATOR)
            })
            .collect::<Vec<_>>();
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(SourceError::DuplicateLabel(label.clone()));
            }
        }
        Ok(SourceDistribution {
            labels,
            probs: self.tuples.iter().map(|t| t.prob.clone()).collect(),
        })
    }
}

/// `q^n`, or `None` when it exceeds `cap` (or overflows).
pub fn extension_size(q: usize, n: u32, cap: usize) -> Option<usize> {
    q.checked_pow(n).filter(|&size| size <= cap)
}

/// Enumerates all `q^n` tuples with exact product probabilities.
pub fn nth_extension(
    source: &SourceDistribution,
    n: u32,
    cap: usize,
) -> Result<ExtendedSource, SourceError> {
    if n == 0 {
        return Err(SourceError::ZeroOrder);
    }
    let q = source.q();
    let size = extension_size(q, n, cap).ok_or(SourceError::ExtensionTooLarge { q, n, cap })?;
    let mut tuples = Vec::with_capacity(size);
    let n = n as usize;
    let mut indices = alloc::vec![0usize; n];
    // prefix[k] is the product of the first k component probabilities.
    let mut prefix = alloc::vec![BigRational::one(); n + 1];
    let mut dirty = 0;
    loop {
        for k in dirty..n {
            prefix[k + 1] = &prefix[k] * &source.probs[indices[k]];
        }
        tuples.push(Tuple {
            indices: indices.clone(),
            prob: prefix[n].clone(),
        });
        // Odometer increment, last position fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(ExtendedSource {
                    base: source.clone(),
                    n: n as u32,
                    tuples,
                });
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < q {
                dirty = pos;
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Printable label for a byte: the character itself for visible ASCII,
/// `0xNN` otherwise.
pub fn byte_label(byte: u8) -> String {
    if byte.is_ascii_graphic() {
        String::from(byte as char)
    } else {
        format!("0x{byte:02x}")
    }
}

/// Inverse of [`byte_label`].
pub fn label_byte(label: &str) -> Option<u8> {
    let bytes = label.as_bytes();
    match bytes {
        [b] if b.is_ascii_graphic() => Some(*b),
        [b'0', b'x', ..] if bytes.len() == 4 => {
            let byte = u8::from_str_radix(&label[2..], 16).ok()?;
            (!byte.is_ascii_graphic()).then_some(byte)
        }
        _ => None,
    }
}

/// Empirical distribution of the bytes in `data`, in ascending byte order,
/// with probabilities `count / data.len()`.
pub fn empirical_distribution(data: &[u8]) -> Result<SourceDistribution, SourceError> {
    if data.is_empty() {
        return Err(SourceError::EmptyInput);
    }
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let total = BigInt::from(data.len());
    let (labels, probs) = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(b, &c)| {
            (
                byte_label(b as u8),
                BigRational::new(c.into(), total.clone()),
            )
        })
        .unzip();
    SourceDistribution::new(labels, probs)
}

/// Probability model over symbol sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceModel {
    Iid(SourceDistribution),
    Markov {
        initial: Vec<BigRational>,
        transitions: Vec<Vec<BigRational>>,
    },
}

impl SequenceModel {
    /// First-order Markov chain; rows of `transitions` are indexed by the
    /// current state.
    pub fn markov(
        initial: Vec<BigRational>,
        transitions: Vec<Vec<BigRational>>,
    ) -> Result<Self, SourceError> {
        let k = initial.len();
        if k == 0 {
            return Err(SourceError::Empty);
        }
        if transitions.len() != k || transitions.iter().any(|row| row.len() != k) {
            return Err(SourceError::BadTransitionShape(k));
        }
        let labels = (0..k).map(|i| format!("s{i}")).collect();
        SourceDistribution::new(labels, initial.clone())?;
        for (i, row) in transitions.iter().enumerate() {
            if row.iter().any(Signed::is_negative) || !row.iter().sum::<BigRational>().is_one() {
                return Err(SourceError::RowNotStochastic(i));
            }
        }
        Ok(Self::Markov {
            initial,
            transitions,
        })
    }

    /// Markov chain started from its stationary distribution, which makes
    /// the process stationary.
    pub fn stationary_markov(transitions: Vec<Vec<BigRational>>) -> Result<Self, SourceError> {
        let initial = stationary_distribution(&transitions)?;
        Self::markov(initial, transitions)
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            Self::Iid(s) => s.q(),
            Self::Markov { initial, .. } => initial.len(),
        }
    }

    /// Exact probability of a sequence of symbol indices.
    pub fn sequence_probability(&self, seq: &[usize]) -> BigRational {
        match self {
            Self::Iid(s) => seq
                .iter()
                .fold(BigRational::one(), |acc, &i| acc * &s.probs()[i]),
            Self::Markov {
                initial,
                transitions,
            } => {
                let Some((&first, rest)) = seq.split_first() else {
                    return BigRational::one();
                };
                let mut p = initial[first].clone();
                let mut prev = first;
                for &next in rest {
                    if p.is_zero() {
                        break;
                    }
                    p *= &transitions[prev][next];
                    prev = next;
                }
                p
            }
        }
    }
}

/// Solves `pi P = pi`, `sum(pi) = 1` exactly by Gaussian elimination.
pub fn stationary_distribution(
    transitions: &[Vec<BigRational>],
) -> Result<Vec<BigRational>, SourceError> {
    let k = transitions.len();
    if k == 0 {
        return Err(SourceError::Empty);
    }
    if transitions.iter().any(|row| row.len() != k) {
        return Err(SourceError::BadTransitionShape(k));
    }
    // Rows: equations (P^T - I) pi = 0, with the last replaced by sum(pi) = 1.
    let mut m: Vec<Vec<BigRational>> = (0..k)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..k)
                .map(|i| {
                    let mut v = transitions[i][j].clone();
                    if i == j {
                        v -= BigRational::one();
                    }
                    v
                })
                .collect();
            row.push(BigRational::zero());
            row
        })
        .collect();
    m[k - 1] = alloc::vec![BigRational::one(); k + 1];
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(SourceError::NoStationary)?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *v -= &factor * p;
                }
            }
        }
    }
    let pi: Vec<BigRational> = m.into_iter().map(|row| row[k].clone()).collect();
    if pi.iter().any(Signed::is_negative) {
        return Err(SourceError::NoStationary);
    }
    Ok(pi)
}
