//! Information entropy in bits and radix-r units, the block estimator G_N,
//! and the Gibbs/Boltzmann physical entropies.

use alloc::vec;

use num_traits::Zero;

use crate::rational::{ln_biguint, nats_term};
use crate::source::{extension_size, SequenceModel, SourceDistribution};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_650_4e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EntropyError {
    #[error("radix must be at least 2, got {0}")]
    BadRadix(u32),
    #[error("{alphabet}^{n} sequences exceed the cap of {cap}")]
    TooManySequences { alphabet: usize, n: u32, cap: usize },
    #[error("sequence length must be at least 1")]
    ZeroLength,
    #[error("microstate count must be at least 1")]
    BadOmega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyUnit {
    Bits,
    /// Logarithms taken base `r`.
    Radix(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub unit: EntropyUnit,
}

impl EntropyValue {
    pub fn bits(value: f64) -> Self {
        Self {
            value,
            unit: EntropyUnit::Bits,
        }
    }
}

/// Entropy in joules per kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalEntropy {
    pub joules_per_kelvin: f64,
}

impl PhysicalEntropy {
    pub const BOLTZMANN: f64 = BOLTZMANN;
}

/// Entropy in nats, `sum p ln(1/p)`.
pub fn entropy_nats(source: &SourceDistribution) -> f64 {
    source.probs().iter().map(nats_term).sum()
}

/// `H(S)` in bits.
pub fn entropy_bits(source: &SourceDistribution) -> EntropyValue {
    EntropyValue::bits(entropy_nats(source) / core::f64::consts::LN_2)
}

/// `H_r(S) = H(S) / lg r`.
pub fn entropy_radix(
    source: &SourceDistribution,
    radix: u32,
) -> Result<EntropyValue, EntropyError> {
    check_radix(radix)?;
    Ok(EntropyValue {
        value: entropy_nats(source) / libm::log(radix as f64),
        unit: EntropyUnit::Radix(radix),
    })
}

/// True exactly when every probability is 0 or 1, i.e. the entropy is zero
/// with no rounding involved.
pub fn is_zero_entropy(source: &SourceDistribution) -> bool {
    source.is_certain()
}

pub(crate) fn check_radix(radix: u32) -> Result<(), EntropyError> {
    if radix < 2 {
        Err(EntropyError::BadRadix(radix))
    } else {
        Ok(())
    }
}

/// Shannon's block estimator: `G_N = (1/N) sum p(seq) lg(1/p(seq))` over all
/// sequences of `len` symbols, in bits per symbol.
pub fn g_n(model: &SequenceModel, len: u32, cap: usize) -> Result<EntropyValue, EntropyError> {
    if len == 0 {
        return Err(EntropyError::ZeroLength);
    }
    let alphabet = model.alphabet_size();
    extension_size(alphabet, len, cap).ok_or(EntropyError::TooManySequences {
        alphabet,
        n: len,
        cap,
    })?;
    let mut seq = vec![0usize; len as usize];
    let mut nats = 0.0;
    loop {
        nats += nats_term(&model.sequence_probability(&seq));
        let mut pos = seq.len();
        loop {
            if pos == 0 {
                return Ok(EntropyValue::bits(
                    nats / core::f64::consts::LN_2 / len as f64,
                ));
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < alphabet {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// `k_B sum p ln(1/p)`.
pub fn gibbs_entropy(source: &SourceDistribution) -> PhysicalEntropy {
    PhysicalEntropy {
        joules_per_kelvin: BOLTZMANN * entropy_nats(source),
    }
}

/// `k_B ln(omega)` for `omega` equally likely microstates.
pub fn boltzmann_entropy(omega: u64) -> Result<PhysicalEntropy, EntropyError> {
    if omega.is_zero() {
        return Err(EntropyError::BadOmega);
    }
    Ok(PhysicalEntropy {
        joules_per_kelvin: BOLTZMANN * ln_biguint(&omega.into()),
    })
}

/// `H = S / (k_B ln 2)`.
pub fn physical_to_bits(entropy: PhysicalEntropy) -> EntropyValue {
    EntropyValue::bits(entropy.joules_per_kelvin / (BOLTZMANN * core::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::SequenceModel;
    use num_rational::BigRational;

    fn dist(ratios: &[(i64, i64)]) -> SourceDistribution {
        let labels = (0..ratios.len()).map(|i| alloc::format!("s{i}")).collect();
        let probs = ratios.iter().map(|&(n, d)| q(n, d)).collect();
        SourceDistribution::new(labels, probs).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bits_examples() {
        assert_eq!(entropy_bits(&dist(&[(1, 2), (1, 2)])).value, 1.0);
        assert_eq!(entropy_bits(&dist(&[(1, 1), (0, 1), (0, 1)])).value, 0.0);
        assert!((entropy_bits(&dist(&[(1, 2), (1, 4), (1, 4)])).value - 1.5).abs() < 1e-15);
    }

    #[test]
    fn radix_examples() {
        let third = dist(&[(1, 3), (1, 3), (1, 3)]);
        assert!((entropy_radix(&third, 3).unwrap().value - 1.0).abs() < 1e-15);
        assert!((entropy_radix(&dist(&[(1, 2), (1, 2)]), 2).unwrap().value - 1.0).abs() < 1e-15);
        let v = entropy_radix(&dist(&[(1, 2), (1, 4), (1, 4)]), 4).unwrap();
        assert!((v.value - 0.75).abs() < 1e-15);
        assert_eq!(v.unit, EntropyUnit::Radix(4));
        assert_eq!(entropy_radix(&third, 1), Err(EntropyError::BadRadix(1)));
    }

    #[test]
    fn g_n_examples() {
        let iid = SequenceModel::Iid(dist(&[(1, 2), (1, 2)]));
        assert!((g_n(&iid, 3, 1000).unwrap().value - 1.0).abs() < 1e-12);
        let certain = SequenceModel::Iid(dist(&[(1, 1), (0, 1)]));
        assert_eq!(g_n(&certain, 5, 1000).unwrap().value, 0.0);
        let flat = SequenceModel::markov(
            alloc::vec![q(1, 2), q(1, 2)],
            alloc::vec![alloc::vec![q(1, 2), q(1, 2)], alloc::vec![q(1, 2), q(1, 2)]],
        )
        .unwrap();
        assert!((g_n(&flat, 2, 1000).unwrap().value - 1.0).abs() < 1e-12);
        assert!(matches!(
            g_n(&iid, 11, 1000),
            Err(EntropyError::TooManySequences { .. })
        ));
        assert_eq!(g_n(&iid, 0, 1000), Err(EntropyError::ZeroLength));
    }

    #[test]
    fn physical_examples() {
        let pair = gibbs_entropy(&dist(&[(1, 2), (1, 2)]));
        assert!((pair.joules_per_kelvin - 9.5699e-24).abs() < 1e-28);
        assert_eq!(gibbs_entropy(&dist(&[(1, 1)])).joules_per_kelvin, 0.0);
        let eight = gibbs_entropy(&SourceDistribution::uniform(8).unwrap());
        let expected = BOLTZMANN * 3.0 * core::f64::consts::LN_2;
        assert!((eight.joules_per_kelvin - expected).abs() <= 1e-12 * expected);

        assert_eq!(boltzmann_entropy(1).unwrap().joules_per_kelvin, 0.0);
        assert_eq!(boltzmann_entropy(0), Err(EntropyError::BadOmega));
        assert!((physical_to_bits(boltzmann_entropy(2).unwrap()).value - 1.0).abs() < 1e-12);
        assert!((physical_to_bits(boltzmann_entropy(8).unwrap()).value - 3.0).abs() < 1e-12);
        assert_eq!(
            physical_to_bits(PhysicalEntropy {
                joules_per_kelvin: 0.0
            })
            .value,
            0.0
        );
        let mixed = gibbs_entropy(&dist(&[(1, 2), (1, 4), (1, 4)]));
        assert!((physical_to_bits(mixed).value - 1.5).abs() < 1e-12);
    }
}
