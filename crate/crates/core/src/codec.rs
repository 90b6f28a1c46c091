//! Encoding symbol sequences into radix-r digit streams through a
//! [`Codebook`], and decoding them back with a digit trie.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coding::{average_length, Codebook, CodingError};
use crate::source::SourceDistribution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("symbol `{0}` has no codeword")]
    UnknownSymbol(String),
    #[error("stream ends in the middle of a codeword after {consumed} digits")]
    TrailingGarbage { consumed: usize },
    #[error("digits up to position {position} match no codeword")]
    UnknownPrefix { position: usize },
    #[error("digit {digit} at position {position} is outside radix {radix}")]
    InvalidDigit {
        position: usize,
        digit: u8,
        radix: u32,
    },
    #[error("stream radix {stream} does not match codebook radix {book}")]
    RadixMismatch { stream: u32, book: u32 },
    #[error("packed payload needs {expected} bytes, got {got}")]
    PayloadSize { expected: usize, got: usize },
    #[error("nonzero padding bits after the last digit")]
    BadPadding,
    #[error("radix {0} cannot be packed")]
    UnsupportedRadix(u32),
    #[error("codebook symbols differ from the source symbols")]
    LabelMismatch,
    #[error("empty sample")]
    EmptySample,
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// A sequence of radix-r digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    radix: u32,
    digits: Vec<u8>,
}

impl DigitStream {
    pub fn new(radix: u32, digits: Vec<u8>) -> Result<Self, CodecError> {
        if !(2..=256).contains(&radix) {
            return Err(CodecError::UnsupportedRadix(radix));
        }
        if let Some(position) = digits.iter().position(|&d| d as u32 >= radix) {
            return Err(CodecError::InvalidDigit {
                position,
                digit: digits[position],
                radix,
            });
        }
        Ok(Self { radix, digits })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Bits used per digit when packed: `ceil(lg r)`.
    pub fn bits_per_digit(radix: u32) -> u32 {
        32 - (radix - 1).leading_zeros()
    }

    /// Packs digits MSB-first at [`Self::bits_per_digit`] bits each; the last
    /// byte is padded with zero bits.
    pub fn pack(&self) -> Vec<u8> {
        let width = Self::bits_per_digit(self.radix);
        let total_bits = self.digits.len() * width as usize;
        let mut out = vec![0u8; total_bits.div_ceil(8)];
        let mut bit = 0usize;
        for &d in &self.digits {
            for k in (0..width).rev() {
                if (d >> k) & 1 == 1 {
                    out[bit / 8] |= 0x80 >> (bit % 8);
                }
                bit += 1;
            }
        }
        out
    }

    /// Inverse of [`Self::pack`]. The payload length must match `count`
    /// exactly and padding bits must be zero.
    pub fn unpack(radix: u32, bytes: &[u8], count: usize) -> Result<Self, CodecError> {
        if !(2..=256).contains(&radix) {
            return Err(CodecError::UnsupportedRadix(radix));
        }
        let width = Self::bits_per_digit(radix) as usize;
        let total_bits = count.checked_mul(width).ok_or(CodecError::PayloadSize {
            expected: usize::MAX,
            got: bytes.len(),
        })?;
        let expected = total_bits.div_ceil(8);
        if bytes.len() != expected {
            return Err(CodecError::PayloadSize {
                expected,
                got: bytes.len(),
            });
        }
        let bit_at = |i: usize| (bytes[i / 8] >> (7 - i % 8)) & 1;
        if (total_bits..expected * 8).any(|i| bit_at(i) == 1) {
            return Err(CodecError::BadPadding);
        }
        let digits = (0..count)
            .map(|j| {
                (0..width).fold(0u16, |acc, k| (acc << 1) | bit_at(j * width + k) as u16) as u8
            })
            .collect::<Vec<_>>();
        // 256 packs into 8 bits, so a digit can only be out of range for
        // radixes that are not powers of two.
        Self::new(radix, digits)
    }
}

/// Concatenates the codewords of `message` in order.
pub fn encode<S: AsRef<str>>(message: &[S], book: &Codebook) -> Result<DigitStream, CodecError> {
    let mut digits = Vec::new();
    for symbol in message {
        let symbol = symbol.as_ref();
        let word = book
            .get(symbol)
            .ok_or_else(|| CodecError::UnknownSymbol(symbol.into()))?;
        digits.extend_from_slice(word);
    }
    DigitStream::new(book.radix(), digits)
}

/// Like [`encode`] but over symbol indices into the codebook.
pub fn encode_indices(message: &[usize], book: &Codebook) -> Result<DigitStream, CodecError> {
    let mut digits = Vec::new();
    for &i in message {
        let word = book.codeword(i).ok_or_else(|| {
            CodecError::UnknownSymbol(book.labels().get(i).cloned().unwrap_or_default())
        })?;
        digits.extend_from_slice(word);
    }
    DigitStream::new(book.radix(), digits)
}

const NO_NODE: u32 = u32::MAX;

/// Digit trie over a codebook. Built once, reused for every decode.
#[derive(Debug, Clone)]
pub struct Decoder {
    radix: u32,
    /// `children[node * radix + digit]`
    children: Vec<u32>,
    /// Symbol index for leaves, `NO_NODE` for internal nodes.
    leaf: Vec<u32>,
    labels: Vec<String>,
}

impl Decoder {
    pub fn new(book: &Codebook) -> Result<Self, CodecError> {
        let r = book.radix() as usize;
        let mut children = vec![NO_NODE; r];
        let mut leaf = vec![NO_NODE];
        for (symbol, label) in book.labels().iter().enumerate() {
            let Some(word) = book.codeword(symbol) else {
                continue;
            };
            let label = label.as_str();
            let symbol = symbol as u32;
            let mut node = 0usize;
            for &d in word {
                if leaf[node] != NO_NODE {
                    return Err(CodingError::NotPrefixFree(label.into()).into());
                }
                let slot = node * r + d as usize;
                if children[slot] == NO_NODE {
                    children[slot] = leaf.len() as u32;
                    leaf.push(NO_NODE);
                    children.extend(core::iter::repeat_n(NO_NODE, r));
                }
                node = children[slot] as usize;
            }
            let has_children = children[node * r..(node + 1) * r]
                .iter()
                .any(|&c| c != NO_NODE);
            if leaf[node] != NO_NODE || has_children || word.is_empty() {
                return Err(CodingError::NotPrefixFree(label.into()).into());
            }
            leaf[node] = symbol;
        }
        Ok(Self {
            radix: book.radix(),
            children,
            leaf,
            labels: book.labels().to_vec(),
        })
    }

    /// Decodes to symbol indices, visiting each digit once.
    pub fn decode_indices(&self, stream: &DigitStream) -> Result<Vec<usize>, CodecError> {
        if stream.radix() != self.radix {
            return Err(CodecError::RadixMismatch {
                stream: stream.radix(),
                book: self.radix,
            });
        }
        let r = self.radix as usize;
        let mut out = Vec::new();
        let mut node = 0usize;
        let mut start = 0usize;
        for (position, &d) in stream.digits().iter().enumerate() {
            let next = self.children[node * r + d as usize];
            if next == NO_NODE {
                return Err(CodecError::UnknownPrefix { position });
            }
            node = next as usize;
            if self.leaf[node] != NO_NODE {
                out.push(self.leaf[node] as usize);
                node = 0;
                start = position + 1;
            }
        }
        if node != 0 {
            return Err(CodecError::TrailingGarbage { consumed: start });
        }
        Ok(out)
    }

    pub fn decode(&self, stream: &DigitStream) -> Result<Vec<String>, CodecError> {
        Ok(self
            .decode_indices(stream)?
            .into_iter()
            .map(|i| self.labels[i].clone())
            .collect())
    }
}

/// One-shot decode; builds the trie and discards it.
pub fn decode(stream: &DigitStream, book: &Codebook) -> Result<Vec<String>, CodecError> {
    Decoder::new(book)?.decode(stream)
}

/// Expected digits per symbol (`sum p_i l_i`) next to the digits per symbol
/// actually spent on `sample`.
pub fn expected_vs_actual<S: AsRef<str>>(
    source: &SourceDistribution,
    book: &Codebook,
    sample: &[S],
) -> Result<(BigRational, BigRational), CodecError> {
    if book.labels() != source.labels() {
        return Err(CodecError::LabelMismatch);
    }
    if sample.is_empty() {
        return Err(CodecError::EmptySample);
    }
    let expected = average_length(source, &book.profile())?;
    let stream = encode(sample, book)?;
    let actual = BigRational::new(BigInt::from(stream.len()), BigInt::from(sample.len()));
    Ok((expected, actual))
}
