//! Deviant-learning sequence memory.
//!
//! Chunks are captured into a bounded [`MemoryStore`]. For each incoming
//! chunk the store proposes every memorized chunk with the least truncated
//! L1 mismatch (pre-prediction), then picks one of them by permanence and
//! recency (post-prediction), reinforcing the winner. Numeric extrapolation
//! uses the backward additive deviant:
//!
//! ```text
//! K_avg = sum_{j=1..n} |K_n - K_j| / n      (the j = n term is zero)
//! K_p   = round(K_avg) + K_n
//! ```
//!
//! where `K_n` is the most recent chunk and `n` the store size.

use std::collections::VecDeque;

use thiserror::Error;

use crate::representation::IntegerChunk;

#[derive(Debug, Error, PartialEq)]
pub enum DlaError {
    #[error("memory store is empty")]
    NoMemory,
    #[error("no candidates to select from")]
    NoCandidates,
    #[error("candidate slot {0} is not in the store")]
    StaleCandidate(usize),
    #[error("learning extent must be >= 1")]
    InvalidExtent,
    #[error("empty input stream")]
    EmptyStream,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlaConfig {
    /// Number of leading integer units compared when scoring mismatch.
    pub learning_extent: usize,
    /// Steps per learning episode; the extrapolation is refreshed at each
    /// episode boundary.
    pub time_limit: usize,
    /// Maximum number of memorized chunks.
    pub store_threshold: usize,
    pub initial_permanence: f64,
    /// Tolerance in feature-space units, used when scoring predictions.
    pub tolerance: f64,
}

impl Default for DlaConfig {
    fn default() -> Self {
        Self {
            learning_extent: 121,
            time_limit: 10,
            store_threshold: 120,
            initial_permanence: 0.0,
            tolerance: 0.05,
        }
    }
}

impl DlaConfig {
    pub fn validate(&self) -> Result<(), DlaError> {
        let bad = |m: &str| Err(DlaError::InvalidConfig(m.to_string()));
        if self.learning_extent < 1 {
            return bad("learning_extent must be >= 1");
        }
        if self.time_limit < 1 {
            return bad("time_limit must be >= 1");
        }
        if self.store_threshold < 1 {
            return bad("store_threshold must be >= 1");
        }
        if !(self.initial_permanence.is_finite() && self.initial_permanence >= 0.0) {
            return bad("initial_permanence must be finite and >= 0");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be finite and > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemorizedChunk {
    pub chunk: IntegerChunk,
    pub permanence: f64,
    pub birth_step: u64,
}

/// Minimal-mismatch chunks proposed by [`MemoryStore::pre_predict`].
///
/// Slots index the store at the time of the query; they are invalidated by
/// any later insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidates {
    pub score: u64,
    pub slots: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Every minimal-mismatch chunk, in store order.
    pub candidates: Vec<IntegerChunk>,
    pub selected: IntegerChunk,
    /// Backward additive deviant extrapolation `K_p`.
    pub extrapolated: IntegerChunk,
    pub mismatch_score: u64,
}

/// Truncated L1 distance over the first `l_ext` unit positions.
///
/// Positions beyond a chunk's end count as zero. The sum saturates at
/// `u64::MAX`.
pub fn mismatch(a: &IntegerChunk, b: &IntegerChunk, l_ext: usize) -> Result<u64, DlaError> {
    if l_ext < 1 {
        return Err(DlaError::InvalidExtent);
    }
    Ok(mismatch_unchecked(a, b, l_ext))
}

fn mismatch_unchecked(a: &IntegerChunk, b: &IntegerChunk, l_ext: usize) -> u64 {
    let span = l_ext.min(a.len().max(b.len()));
    (0..span).fold(0u64, |acc, i| {
        acc.saturating_add(a.unit_or_zero(i).abs_diff(b.unit_or_zero(i)))
    })
}

/// Round half away from zero, saturating into `i64`.
fn round_to_unit(x: f64) -> i64 {
    // `as` saturates for out-of-range floats
    x.round() as i64
}

#[derive(Debug, Clone)]
pub struct MemoryStore {
    chunks: VecDeque<MemorizedChunk>,
    config: DlaConfig,
    clock: u64,
}

impl MemoryStore {
    pub fn new(config: DlaConfig) -> Result<Self, DlaError> {
        config.validate()?;
        Ok(Self {
            chunks: VecDeque::with_capacity(config.store_threshold),
            config,
            clock: 0,
        })
    }

    pub fn config(&self) -> &DlaConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn chunks(&self) -> impl ExactSizeIterator<Item = &MemorizedChunk> {
        self.chunks.iter()
    }

    pub fn get(&self, slot: usize) -> Option<&MemorizedChunk> {
        self.chunks.get(slot)
    }

    /// Most recent chunk, `K_n`.
    pub fn latest(&self) -> Option<&IntegerChunk> {
        self.chunks.back().map(|m| &m.chunk)
    }

    /// Appends `chunk`, evicting the oldest entry first when full.
    pub fn store_chunk(&mut self, chunk: IntegerChunk) {
        if self.chunks.len() >= self.config.store_threshold {
            self.chunks.pop_front();
        }
        self.chunks.push_back(MemorizedChunk {
            chunk,
            permanence: self.config.initial_permanence,
            birth_step: self.clock,
        });
        self.clock += 1;
    }

    /// All stored chunks achieving the least mismatch against `input`.
    pub fn pre_predict(&self, input: &IntegerChunk) -> Result<Candidates, DlaError> {
        let l_ext = self.config.learning_extent;
        let mut best = u64::MAX;
        let mut slots = Vec::new();
        for (slot, m) in self.chunks.iter().enumerate() {
            let score = mismatch_unchecked(input, &m.chunk, l_ext);
            if score < best {
                best = score;
                slots.clear();
                slots.push(slot);
            } else if score == best {
                slots.push(slot);
            }
        }
        if slots.is_empty() {
            return Err(DlaError::NoMemory);
        }
        Ok(Candidates { score: best, slots })
    }

    /// Picks the candidate with the highest permanence (latest birth on
    /// ties), reinforces it, and attaches the current extrapolation.
    pub fn post_predict(&mut self, candidates: &Candidates) -> Result<Prediction, DlaError> {
        let extrapolated = self.extrapolate()?;
        self.select(candidates, extrapolated)
    }

    fn select(
        &mut self,
        candidates: &Candidates,
        extrapolated: IntegerChunk,
    ) -> Result<Prediction, DlaError> {
        if candidates.slots.is_empty() {
            return Err(DlaError::NoCandidates);
        }
        let mut chosen: Option<usize> = None;
        for &slot in &candidates.slots {
            let cand = self
                .chunks
                .get(slot)
                .ok_or(DlaError::StaleCandidate(slot))?;
            let better = match chosen {
                None => true,
                Some(c) => {
                    let cur = &self.chunks[c];
                    cand.permanence > cur.permanence
                        || (cand.permanence == cur.permanence && cand.birth_step > cur.birth_step)
                }
            };
            if better {
                chosen = Some(slot);
            }
        }
        let chosen = chosen.expect("nonempty candidates");
        self.chunks[chosen].permanence += 1.0;

        Ok(Prediction {
            candidates: candidates
                .slots
                .iter()
                .map(|&s| self.chunks[s].chunk.clone())
                .collect(),
            selected: self.chunks[chosen].chunk.clone(),
            extrapolated,
            mismatch_score: candidates.score,
        })
    }

    /// Mean absolute deviation of the latest chunk from the whole store,
    /// elementwise, before rounding. Has the latest chunk's length; shorter
    /// history chunks read as zero past their end.
    pub fn deviant_average(&self) -> Result<Vec<f64>, DlaError> {
        let latest = self.latest().ok_or(DlaError::NoMemory)?;
        let n = self.chunks.len() as f64;
        Ok((0..latest.len())
            .map(|i| {
                let k_n = i128::from(latest.units()[i]);
                let total: i128 = self
                    .chunks
                    .iter()
                    .map(|m| (k_n - i128::from(m.chunk.unit_or_zero(i))).abs())
                    .sum();
                total as f64 / n
            })
            .collect())
    }

    /// `K_p = round(K_avg) + K_n`, elementwise with saturation.
    pub fn extrapolate(&self) -> Result<IntegerChunk, DlaError> {
        let avg = self.deviant_average()?;
        let latest = self.latest().ok_or(DlaError::NoMemory)?;
        let units = latest
            .units()
            .iter()
            .zip(&avg)
            .map(|(&k, &a)| round_to_unit(a).saturating_add(k))
            .collect();
        Ok(IntegerChunk::new(units).expect("latest chunk is nonempty"))
    }

    /// Runs the stream through the memory: predict against the store, then
    /// memorize. Emits one prediction per chunk after the first. The
    /// extrapolation is recomputed every `time_limit` predictions and reused
    /// in between.
    pub fn run_episode(&mut self, stream: &[IntegerChunk]) -> Result<Vec<Prediction>, DlaError> {
        if stream.is_empty() {
            return Err(DlaError::EmptyStream);
        }
        let mut predictions = Vec::with_capacity(stream.len().saturating_sub(1));
        let mut cached: Option<IntegerChunk> = None;
        for chunk in stream {
            if !self.is_empty() {
                if predictions.len() % self.config.time_limit == 0 || cached.is_none() {
                    cached = Some(self.extrapolate()?);
                }
                let candidates = self.pre_predict(chunk)?;
                let extrapolated = cached.clone().expect("refreshed above");
                predictions.push(self.select(&candidates, extrapolated)?);
            }
            self.store_chunk(chunk.clone());
        }
        Ok(predictions)
    }
}
