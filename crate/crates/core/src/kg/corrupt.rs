//! Negative sampling by corrupting one slot of a true triple.
//!
//! The default corrupts the head or the tail (fair coin), replacing it with
//! a uniformly random entity different from the original, and does not
//! filter against known true triples. Filtered sampling rejects candidates
//! present in a membership index, falling back to the last unfiltered draw
//! after 100 attempts. Relation corruption exists behind a config flag but
//! is off by default.

use std::collections::HashSet;

use super::{KgError, Triple, TripleStore};
use crate::rng::SplitMix64;

/// Which slot of the original triple was replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptedSlot {
    Head,
    Tail,
    Relation,
}

/// A positive triple paired with one corruption of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorruptionSample {
    pub original: Triple,
    pub corrupted: Triple,
    pub corrupted_slot: CorruptedSlot,
}

#[derive(Debug, Clone, Copy)]
pub struct CorruptionConfig {
    /// Reject corruptions present in the membership index.
    pub filtered: bool,
    /// Corrupt the relation slot with probability 1/3 (head/tail get 1/3
    /// each). Off by default; the standard protocol corrupts entities only.
    pub corrupt_relations: bool,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig { filtered: false, corrupt_relations: false }
    }
}

const FILTER_ATTEMPTS: usize = 100;

/// Reusable corruption sampler.
///
/// Holds vocabulary sizes and (for filtered mode) a borrowed membership
/// index, plus a counter of filtered draws that fell back to unfiltered.
#[derive(Debug)]
pub struct Corruptor<'a> {
    n_entities: usize,
    n_relations: usize,
    membership: Option<&'a HashSet<Triple>>,
    config: CorruptionConfig,
    fallback_warnings: u64,
}

impl<'a> Corruptor<'a> {
    pub fn new(n_entities: usize, n_relations: usize) -> Result<Self, KgError> {
        Self::with_config(n_entities, n_relations, None, CorruptionConfig::default())
    }

    pub fn with_config(
        n_entities: usize,
        n_relations: usize,
        membership: Option<&'a HashSet<Triple>>,
        config: CorruptionConfig,
    ) -> Result<Self, KgError> {
        if n_entities < 2 {
            return Err(KgError::TooFewEntities { len: n_entities });
        }
        if config.corrupt_relations && n_relations < 2 {
            return Err(KgError::TooFewRelations { len: n_relations });
        }
        if config.filtered && membership.is_none() {
            return Err(KgError::BadManifest {
                path: String::new(),
                reason: "filtered corruption requires a membership index".into(),
            });
        }
        Ok(Corruptor { n_entities, n_relations, membership, config, fallback_warnings: 0 })
    }

    /// For a [`TripleStore`], borrowing its membership index.
    pub fn for_store(store: &'a TripleStore, config: CorruptionConfig) -> Result<Self, KgError> {
        Self::with_config(
            store.n_entities(),
            store.n_relations(),
            Some(store.membership_index()),
            config,
        )
    }

    /// Number of filtered draws that exhausted their attempts and fell back
    /// to an unfiltered candidate.
    pub fn fallback_warnings(&self) -> u64 {
        self.fallback_warnings
    }

    /// Draw one corruption of `original`.
    pub fn sample(&mut self, original: Triple, rng: &mut SplitMix64) -> CorruptionSample {
        if !self.config.filtered {
            return self.draw(original, rng);
        }
        let index = self.membership.expect("checked in constructor");
        let mut last = self.draw(original, rng);
        for _ in 1..FILTER_ATTEMPTS {
            if !index.contains(&last.corrupted) {
                return last;
            }
            last = self.draw(original, rng);
        }
        if index.contains(&last.corrupted) {
            self.fallback_warnings += 1;
        }
        last
    }

    fn draw(&self, original: Triple, rng: &mut SplitMix64) -> CorruptionSample {
        let slot = if self.config.corrupt_relations {
            match rng.next_below(3) {
                0 => CorruptedSlot::Head,
                1 => CorruptedSlot::Tail,
                _ => CorruptedSlot::Relation,
            }
        } else if rng.next_bool() {
            CorruptedSlot::Head
        } else {
            CorruptedSlot::Tail
        };
        let corrupted = match slot {
            CorruptedSlot::Head => Triple {
                head: replace_id(original.head, self.n_entities, rng),
                ..original
            },
            CorruptedSlot::Tail => Triple {
                tail: replace_id(original.tail, self.n_entities, rng),
                ..original
            },
            CorruptedSlot::Relation => Triple {
                relation: replace_id(original.relation, self.n_relations, rng),
                ..original
            },
        };
        CorruptionSample { original, corrupted, corrupted_slot: slot }
    }
}

/// Uniform id in `[0, n)` excluding `original`: draw from `n - 1` and shift.
fn replace_id(original: u32, n: usize, rng: &mut SplitMix64) -> u32 {
    let draw = rng.next_below(n as u64 - 1) as u32;
    if draw >= original {
        draw + 1
    } else {
        draw
    }
}

/// One-shot unfiltered corruption of `triple` against `store`'s vocabulary.
pub fn sample_corruption(
    store: &TripleStore,
    triple: Triple,
    rng: &mut SplitMix64,
) -> Result<CorruptionSample, KgError> {
    let mut corruptor = Corruptor::new(store.n_entities(), store.n_relations())?;
    Ok(corruptor.sample(triple, rng))
}
