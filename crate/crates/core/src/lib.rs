//! Exact source coding for finite discrete sources.
//!
//! Probabilities are arbitrary-precision rationals throughout. Code lengths,
//! Kraft sums and average lengths are computed exactly; entropies are
//! evaluated in `f64`, and every bound verdict that compares an exact average
//! length against an entropy is certified (see [`certified`]), so boundary
//! cases such as `p = 1`, `p = 0` or `p = r^-k` never flip on rounding.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use codebound_core::{bounds, coding::CodeFamily, source::SourceDistribution};
//! use num_rational::BigRational;
//!
//! let certain = SourceDistribution::from_ratios(&["a", "b"], &[(1, 1), (0, 1)]).unwrap();
//! let report = bounds::check_code_bounding(&certain, 2, CodeFamily::ExtendedShannon).unwrap();
//! assert!(report.holds());
//! assert_eq!(report.avg_len_per_symbol, BigRational::from_integer(1.into()));
//! assert!(report.upper_attained);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certified;
pub mod codec;
pub mod coding;
pub mod entropy;
pub mod rational;
pub mod source;

pub use bounds::{BoundError, BoundReport, ConvergenceRow, ConvergenceTable};
pub use codec::{CodecError, Decoder, DigitStream};
pub use coding::{CodeFamily, Codebook, CodingError, LengthProfile};
pub use entropy::{EntropyError, EntropyUnit, EntropyValue, PhysicalEntropy, BOLTZMANN};
pub use source::{ExtendedSource, SequenceModel, SourceDistribution, SourceError};

/// Default upper limit on the number of tuples an extension may enumerate.
pub const DEFAULT_EXTENSION_CAP: usize = 1_000_000;
