//! Codeword length assignment (classic and extended Shannon, block, r-ary
//! Huffman), Kraft accounting, canonical codeword construction and average
//! lengths.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{ceil_log, min_length_for, radix_power_inv, RatioDisplay};
use crate::source::SourceDistribution;

/// Largest radix for which codewords can be rendered as `0-9a-z` digits.
pub const MAX_CODEBOOK_RADIX: u32 = 36;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("radix must be at least 2, got {0}")]
    BadRadix(u32),
    #[error("codebooks support radix 2..=36, got {0}")]
    UnsupportedRadix(u32),
    #[error("profile has {got} lengths but the source has {expected} symbols")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("profile radix {profile} does not match radix {expected}")]
    RadixMismatch { expected: u32, profile: u32 },
    #[error("family `{0}` has no length rule")]
    NoLengthRule(CodeFamily),
    #[error("every probability is zero")]
    AllZero,
    #[error("Kraft sum {0} exceeds 1; no prefix code has these lengths")]
    KraftViolation(String),
    #[error("codeword for `{0}` is a prefix of another codeword")]
    NotPrefixFree(String),
    #[error("codeword for `{label}` has digit {digit} outside radix {radix}")]
    InvalidDigit {
        label: String,
        digit: u8,
        radix: u32,
    },
    #[error("codeword for `{0}` is empty")]
    EmptyCodeword(String),
    #[error("duplicate label `{0}` in codebook")]
    DuplicateLabel(String),
}

/// How a [`LengthProfile`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeFamily {
    ClassicShannon,
    ExtendedShannon,
    Block,
    Huffman,
    Custom,
}

impl CodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::ClassicShannon => "classic",
            Self::ExtendedShannon => "extended",
            Self::Block => "block",
            Self::Huffman => "huffman",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-symbol codeword lengths. A length of 0 means "no codeword".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthProfile {
    lengths: Vec<u32>,
    family: CodeFamily,
    radix: u32,
}

impl LengthProfile {
    pub fn new(lengths: Vec<u32>, family: CodeFamily, radix: u32) -> Result<Self, CodingError> {
        check_radix(radix)?;
        Ok(Self {
            lengths,
            family,
            radix,
        })
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }
}

fn check_radix(radix: u32) -> Result<(), CodingError> {
    if radix < 2 {
        Err(CodingError::BadRadix(radix))
    } else {
        Ok(())
    }
}

/// `l_i = ceil(log_r(1/p_i))` by exact comparison; `p = 1` and `p = 0` both
/// get length 0.
pub fn classic_shannon_lengths(
    source: &SourceDistribution,
    radix: u32,
) -> Result<LengthProfile, CodingError> {
    check_radix(radix)?;
    let lengths = source
        .probs()
        .iter()
        .map(|p| {
            if p.is_zero() {
                0
            } else {
                min_length_for(p, radix)
            }
        })
        .collect();
    LengthProfile::new(lengths, CodeFamily::ClassicShannon, radix)
}

/// Classic Shannon lengths, except the certain event gets length 1.
pub fn extended_shannon_lengths(
    source: &SourceDistribution,
    radix: u32,
) -> Result<LengthProfile, CodingError> {
    let classic = classic_shannon_lengths(source, radix)?;
    let lengths = source
        .probs()
        .iter()
        .zip(classic.lengths)
        .map(|(p, l)| if p.is_one() { 1 } else { l })
        .collect();
    LengthProfile::new(lengths, CodeFamily::ExtendedShannon, radix)
}

/// Fixed length `ceil(log_r q)` for every symbol.
pub fn block_lengths(
    source: &SourceDistribution,
    radix: u32,
) -> Result<LengthProfile, CodingError> {
    check_radix(radix)?;
    let len = ceil_log(source.q(), radix);
    LengthProfile::new(vec![len; source.q()], CodeFamily::Block, radix)
}

/// Lengths for any of the non-custom families.
pub fn lengths_for(
    source: &SourceDistribution,
    radix: u32,
    family: CodeFamily,
) -> Result<LengthProfile, CodingError> {
    match family {
        CodeFamily::ClassicShannon => classic_shannon_lengths(source, radix),
        CodeFamily::ExtendedShannon => extended_shannon_lengths(source, radix),
        CodeFamily::Block => block_lengths(source, radix),
        CodeFamily::Huffman => huffman_lengths(source, radix),
        CodeFamily::Custom => Err(CodingError::NoLengthRule(family)),
    }
}

/// Optimal r-ary prefix code lengths over the symbols with `p > 0`.
///
/// Each step merges the `r` lightest nodes. Ties go to the node holding the
/// smallest original symbol index, then to the older node. Zero-weight dummy
/// nodes pad the alphabet so that every merge is full. A lone symbol gets
/// length 1.
pub fn huffman_lengths(
    source: &SourceDistribution,
    radix: u32,
) -> Result<LengthProfile, CodingError> {
    check_radix(radix)?;
    let live: Vec<usize> = (0..source.q())
        .filter(|&i| !source.probs()[i].is_zero())
        .collect();
    let mut lengths = vec![0u32; source.q()];
    match live.len() {
        0 => return Err(CodingError::AllZero),
        1 => {
            lengths[live[0]] = 1;
            return LengthProfile::new(lengths, CodeFamily::Huffman, radix);
        }
        _ => {}
    }

    struct Node {
        children: Vec<usize>,
        symbol: Option<usize>,
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut heap = BinaryHeap::new();
    let r = radix as usize;
    let dummies = (r - 1 - (live.len() - 1) % (r - 1)) % (r - 1);
    for _ in 0..dummies {
        let id = nodes.len();
        nodes.push(Node {
            children: Vec::new(),
            symbol: None,
        });
        heap.push(Reverse((BigRational::zero(), usize::MAX, id)));
    }
    for &i in &live {
        let id = nodes.len();
        nodes.push(Node {
            children: Vec::new(),
            symbol: Some(i),
        });
        heap.push(Reverse((source.probs()[i].clone(), i, id)));
    }
    while heap.len() > 1 {
        let mut weight = BigRational::zero();
        let mut min_index = usize::MAX;
        let mut children = Vec::with_capacity(r);
        for _ in 0..r {
            let Some(Reverse((w, idx, id))) = heap.pop() else {
                break;
            };
            weight += w;
            min_index = min_index.min(idx);
            children.push(id);
        }
        let id = nodes.len();
        nodes.push(Node {
            children,
            symbol: None,
        });
        heap.push(Reverse((weight, min_index, id)));
    }
    let Reverse((_, _, root)) = heap.pop().expect("nonempty heap");
    let mut stack = vec![(root, 0u32)];
    while let Some((id, depth)) = stack.pop() {
        if let Some(sym) = nodes[id].symbol {
            lengths[sym] = depth;
        }
        stack.extend(nodes[id].children.iter().map(|&c| (c, depth + 1)));
    }
    LengthProfile::new(lengths, CodeFamily::Huffman, radix)
}

/// Huffman lengths realized as a canonical codebook.
pub fn huffman_code(
    source: &SourceDistribution,
    radix: u32,
) -> Result<(Codebook, LengthProfile), CodingError> {
    let profile = huffman_lengths(source, radix)?;
    let book = canonical_codewords(&profile, source.labels())?;
    Ok((book, profile))
}

/// Exact `sum r^-l_i` over symbols with `l_i >= 1`.
pub fn kraft_sum(profile: &LengthProfile) -> BigRational {
    profile
        .lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| radix_power_inv(profile.radix, l))
        .sum()
}

/// Exact `sum p_i l_i`.
pub fn average_length(
    source: &SourceDistribution,
    profile: &LengthProfile,
) -> Result<BigRational, CodingError> {
    check_shape(source, profile)?;
    Ok(source
        .probs()
        .iter()
        .zip(&profile.lengths)
        .filter(|(_, &l)| l > 0)
        .map(|(p, &l)| p * BigRational::from_integer(l.into()))
        .sum())
}

fn check_shape(source: &SourceDistribution, profile: &LengthProfile) -> Result<(), CodingError> {
    if source.q() != profile.len() {
        return Err(CodingError::ShapeMismatch {
            expected: source.q(),
            got: profile.len(),
        });
    }
    Ok(())
}

/// Outcome of comparing a code against the block code of the same radix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodCode {
    pub good: bool,
    /// Block average minus this code's average.
    pub margin: BigRational,
}

/// A code is good when its average length is at most `ceil(log_r q)`.
pub fn is_good_code(
    source: &SourceDistribution,
    profile: &LengthProfile,
) -> Result<GoodCode, CodingError> {
    let avg = average_length(source, profile)?;
    let block = BigRational::from_integer(ceil_log(source.q(), profile.radix).into());
    let margin = block - avg;
    Ok(GoodCode {
        good: margin >= BigRational::zero(),
        margin,
    })
}

/// A prefix code: each symbol either has a digit string or no codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    radix: u32,
    labels: Vec<String>,
    codes: Vec<Option<Vec<u8>>>,
}

impl Codebook {
    /// Builds a codebook from explicit `(label, digits)` pairs, checking
    /// digits, label uniqueness and the prefix property.
    pub fn from_entries(radix: u32, entries: Vec<(String, Vec<u8>)>) -> Result<Self, CodingError> {
        check_codebook_radix(radix)?;
        let mut seen = BTreeMap::new();
        for (label, digits) in &entries {
            if seen.insert(label.as_str(), ()).is_some() {
                return Err(CodingError::DuplicateLabel(label.clone()));
            }
            if digits.is_empty() {
                return Err(CodingError::EmptyCodeword(label.clone()));
            }
            if let Some(&digit) = digits.iter().find(|&&d| d as u32 >= radix) {
                return Err(CodingError::InvalidDigit {
                    label: label.clone(),
                    digit,
                    radix,
                });
            }
        }
        let (labels, codes) = entries.into_iter().map(|(l, d)| (l, Some(d))).unzip();
        let book = Self {
            radix,
            labels,
            codes,
        };
        book.check_prefix_free()?;
        Ok(book)
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    /// All symbol labels, including those without a codeword.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn codeword(&self, index: usize) -> Option<&[u8]> {
        self.codes.get(index)?.as_deref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&[u8]> {
        self.codeword(self.index_of(label)?)
    }

    /// `(label, codeword)` for every symbol that has one, in symbol order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[u8])> {
        self.labels
            .iter()
            .zip(&self.codes)
            .filter_map(|(l, c)| Some((l.as_str(), c.as_deref()?)))
    }

    /// Codeword lengths, 0 for symbols without one.
    pub fn profile(&self) -> LengthProfile {
        LengthProfile {
            lengths: self
                .codes
                .iter()
                .map(|c| c.as_ref().map_or(0, |d| d.len() as u32))
                .collect(),
            family: CodeFamily::Custom,
            radix: self.radix,
        }
    }

    /// Codeword rendered with `0-9a-z` digits.
    pub fn render(&self, index: usize) -> Option<String> {
        self.codeword(index).map(render_digits)
    }

    /// Pairwise prefix check.
    pub fn check_prefix_free(&self) -> Result<(), CodingError> {
        let words: Vec<(&str, &[u8])> = self.entries().collect();
        for (i, (label, a)) in words.iter().enumerate() {
            for (j, (_, b)) in words.iter().enumerate() {
                if i != j && b.starts_with(a) {
                    return Err(CodingError::NotPrefixFree(String::from(*label)));
                }
            }
        }
        Ok(())
    }
}

fn check_codebook_radix(radix: u32) -> Result<(), CodingError> {
    check_radix(radix)?;
    if radix > MAX_CODEBOOK_RADIX {
        return Err(CodingError::UnsupportedRadix(radix));
    }
    Ok(())
}

/// Digits as `0-9a-z` characters.
pub fn render_digits(digits: &[u8]) -> String {
    digits
        .iter()
        .map(|&d| char::from_digit(d as u32, MAX_CODEBOOK_RADIX).expect("digit below 36"))
        .collect()
}

/// Inverse of [`render_digits`]; `None` on a character outside `0-9a-z`.
pub fn parse_digits(text: &str) -> Option<Vec<u8>> {
    text.chars()
        .map(|c| {
            if c.is_ascii_uppercase() {
                return None;
            }
            c.to_digit(MAX_CODEBOOK_RADIX).map(|d| d as u8)
        })
        .collect()
}

/// Canonical prefix code with exactly the lengths in `profile`.
///
/// Symbols are ordered by `(length, index)`; the first codeword is all
/// zeros and each next one is the previous plus one in base `r`, padded with
/// zeros on the right when the length grows.
pub fn canonical_codewords(
    profile: &LengthProfile,
    labels: &[String],
) -> Result<Codebook, CodingError> {
    check_codebook_radix(profile.radix)?;
    if labels.len() != profile.len() {
        return Err(CodingError::ShapeMismatch {
            expected: labels.len(),
            got: profile.len(),
        });
    }
    let kraft = kraft_sum(profile);
    if kraft > BigRational::one() {
        return Err(CodingError::KraftViolation(format!(
            "{}",
            RatioDisplay(&kraft)
        )));
    }
    let mut order: Vec<usize> = (0..profile.len())
        .filter(|&i| profile.lengths[i] > 0)
        .collect();
    order.sort_by_key(|&i| (profile.lengths[i], i));

    let mut codes = vec![None; profile.len()];
    let mut current: Vec<u8> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let len = profile.lengths[i] as usize;
        if k > 0 {
            increment(&mut current, profile.radix as u8);
        }
        current.resize(len, 0);
        codes[i] = Some(current.clone());
    }
    Ok(Codebook {
        radix: profile.radix,
        labels: labels.to_vec(),
        codes,
    })
}

fn increment(digits: &mut [u8], radix: u8) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
    unreachable!("Kraft sum <= 1 leaves room for every codeword");
}
