//! Fixed-point integer encoding of feature rows and skip-sequence reduction
//! of the resulting chunk stream.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RepresentationError {
    #[error("scale digits must be in 0..=9, got {0}")]
    InvalidScale(u32),
    #[error("feature {index} ({value}) is not finite")]
    NonFinite { index: usize, value: f64 },
    #[error("feature {index} ({value}) overflows a 64-bit unit at scale {digits}")]
    Overflow {
        index: usize,
        value: f64,
        digits: u32,
    },
    #[error("cannot encode an empty feature vector")]
    Empty,
    #[error("skip step must be >= 1, got {0}")]
    InvalidSkip(usize),
}

/// An ordered vector of symbolic integer units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerChunk(Vec<i64>);

impl IntegerChunk {
    /// Returns `None` for an empty unit vector.
    pub fn new(units: Vec<i64>) -> Option<Self> {
        (!units.is_empty()).then_some(Self(units))
    }

    pub fn units(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Unit at `i`, with positions past the end reading as zero.
    pub fn unit_or_zero(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn into_units(self) -> Vec<i64> {
        self.0
    }
}

impl fmt::Display for IntegerChunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderConfig {
    scale_digits: u32,
}

impl EncoderConfig {
    pub const MAX_DIGITS: u32 = 9;

    pub fn new(scale_digits: u32) -> Result<Self, RepresentationError> {
        if scale_digits > Self::MAX_DIGITS {
            return Err(RepresentationError::InvalidScale(scale_digits));
        }
        Ok(Self { scale_digits })
    }

    pub fn scale_digits(&self) -> u32 {
        self.scale_digits
    }

    fn divisor(&self) -> f64 {
        10f64.powi(self.scale_digits as i32)
    }
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self { scale_digits: 2 }
    }
}

/// Encodes each feature as `round_half_away_from_zero(x * 10^d)`.
///
/// Rounding is done on the shortest decimal representation of `x`, so a
/// value written as `1.005` encodes to `101` at `d = 2` even though the
/// nearest double lies slightly below the tie.
pub fn encode(features: &[f64], cfg: EncoderConfig) -> Result<IntegerChunk, RepresentationError> {
    if features.is_empty() {
        return Err(RepresentationError::Empty);
    }
    let units = features
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !value.is_finite() {
                return Err(RepresentationError::NonFinite { index, value });
            }
            scale_round(value, cfg.scale_digits).ok_or(RepresentationError::Overflow {
                index,
                value,
                digits: cfg.scale_digits,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntegerChunk(units))
}

/// `unit_i / 10^d` for every unit.
pub fn decode(chunk: &IntegerChunk, cfg: EncoderConfig) -> Vec<f64> {
    let div = cfg.divisor();
    chunk.units().iter().map(|&u| u as f64 / div).collect()
}

/// Decimal half-away-from-zero rounding of `value * 10^digits`.
fn scale_round(value: f64, digits: u32) -> Option<i64> {
    if value == 0.0 {
        return Some(0);
    }
    // `{:e}` yields the shortest round-tripping digits, e.g. "1.005e0".
    let repr = format!("{:e}", value.abs());
    let (mantissa, exp) = repr.split_once('e')?;
    let exp: i64 = exp.parse().ok()?;
    let digit_str: String = mantissa.chars().filter(|c| *c != '.').collect();
    let n_digits = digit_str.len() as i64;
    let mantissa_int: u128 = digit_str.parse().ok()?;

    // value = mantissa_int * 10^(exp - (n_digits - 1))
    let shift = exp - (n_digits - 1) + i64::from(digits);
    let magnitude: u128 = if shift >= 0 {
        let factor = 10u128.checked_pow(u32::try_from(shift).ok()?)?;
        mantissa_int.checked_mul(factor)?
    } else {
        let drop = -shift;
        if drop > n_digits {
            0
        } else {
            let div = 10u128.pow(drop as u32);
            let (q, r) = (mantissa_int / div, mantissa_int % div);
            if 2 * r >= div {
                q + 1
            } else {
                q
            }
        }
    };

    let magnitude = i64::try_from(magnitude).ok()?;
    Some(if value < 0.0 { -magnitude } else { magnitude })
}

/// Skip-sequence step: keep one of every `sks` chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SksPolicy {
    sks: usize,
}

impl SksPolicy {
    pub fn new(sks: usize) -> Result<Self, RepresentationError> {
        if sks < 1 {
            return Err(RepresentationError::InvalidSkip(sks));
        }
        Ok(Self { sks })
    }

    pub fn step(&self) -> usize {
        self.sks
    }
}

impl Default for SksPolicy {
    fn default() -> Self {
        Self { sks: 1 }
    }
}

/// Retains the chunks at 1-based positions `i` with `(i - 1) % sks == 0`.
pub fn apply_sks<T: Clone>(sequences: &[T], policy: SksPolicy) -> Vec<T> {
    sequences.iter().step_by(policy.sks).cloned().collect()
}
