//! JSON file formats: distributions with exact `"num/den"` probabilities and
//! serialized codebooks.

use std::collections::BTreeMap;
use std::fmt;

use codebound_core::coding::{parse_digits, render_digits, Codebook, CodingError};
use codebound_core::rational::{parse_ratio, RatioDisplay};
use codebound_core::source::{SourceDistribution, SourceError};
use num_rational::BigRational;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("codeword `{0}` uses characters outside 0-9a-z")]
    BadCodeword(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message.
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

/// Probability serialized as a `"num/den"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProb(pub BigRational);

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&RatioDisplay(&self.0))
    }
}

impl<'de> Deserialize<'de> for ExactProb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ProbVisitor;

        impl Visitor<'_> for ProbVisitor {
            type Value = ExactProb;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a probability string such as \"1/2\" (JSON numbers are rejected)")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExactProb, E> {
                parse_ratio(v).map(ExactProb).map_err(E::custom)
            }
        }

        deserializer.deserialize_str(ProbVisitor)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolEntry {
    label: String,
    p: ExactProb,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistFile {
    symbols: Vec<SymbolEntry>,
}

/// Parses `{"symbols":[{"label":"a","p":"1/2"}, ...]}`.
pub fn parse_distribution(text: &str) -> Result<SourceDistribution, FormatError> {
    let file: DistFile = serde_json::from_str(text)?;
    let (labels, probs) = file.symbols.into_iter().map(|s| (s.label, s.p.0)).unzip();
    Ok(SourceDistribution::new(labels, probs)?)
}

/// Pretty-printed distribution file.
pub fn distribution_to_json(source: &SourceDistribution) -> String {
    let file = DistFile {
        symbols: source
            .labels()
            .iter()
            .zip(source.probs())
            .map(|(label, p)| SymbolEntry {
                label: label.clone(),
                p: ExactProb(p.clone()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("distribution serializes")
}

/// `{"radix":r,"codes":{"a":"0","b":"10"}}`; labels in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookFile {
    pub radix: u32,
    pub codes: BTreeMap<String, String>,
}

impl CodebookFile {
    pub fn from_codebook(book: &Codebook) -> Self {
        Self {
            radix: book.radix(),
            codes: book
                .entries()
                .map(|(label, digits)| (label.to_string(), render_digits(digits)))
                .collect(),
        }
    }

    pub fn into_codebook(self) -> Result<Codebook, FormatError> {
        let entries = self
            .codes
            .into_iter()
            .map(|(label, word)| match parse_digits(&word) {
                Some(digits) => Ok((label, digits)),
                None => Err(FormatError::BadCodeword(word)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Codebook::from_entries(self.radix, entries)?)
    }
}

pub fn codebook_to_json(book: &Codebook) -> String {
    serde_json::to_string(&CodebookFile::from_codebook(book)).expect("codebook serializes")
}

pub fn codebook_from_json(text: &str) -> Result<Codebook, FormatError> {
    let file: CodebookFile = serde_json::from_str(text)?;
    file.into_codebook()
}
