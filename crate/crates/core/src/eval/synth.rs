//! Synthetic KG generator, so experiments and tests need no downloads.
//!
//! Heads and tails are drawn from a power-law distribution over entities
//! (weight of entity `i` proportional to `(i+1)^-exponent`), relations
//! uniformly; duplicate triples are re-drawn until the requested count of
//! distinct triples exists.

use super::EvalError;
use crate::kg::TripleStore;
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_entities: usize,
    pub n_relations: usize,
    pub n_triples: usize,
    pub seed: u64,
    /// Power-law exponent of the entity degree distribution; 0 is uniform.
    pub degree_exponent: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_entities: 1000,
            n_relations: 10,
            n_triples: 20_000,
            seed: 42,
            degree_exponent: 0.8,
        }
    }
}

pub fn synth_kg(config: &SynthConfig) -> Result<TripleStore, EvalError> {
    if config.n_entities < 2 {
        return Err(EvalError::BadSynthConfig("need at least 2 entities".into()));
    }
    if config.n_relations == 0 {
        return Err(EvalError::BadSynthConfig("need at least 1 relation".into()));
    }
    if config.n_triples == 0 {
        return Err(EvalError::BadSynthConfig("need at least 1 triple".into()));
    }
    if !config.degree_exponent.is_finite() || config.degree_exponent < 0.0 {
        return Err(EvalError::BadSynthConfig("degree exponent must be finite and >= 0".into()));
    }
    let capacity = config.n_entities * config.n_entities * config.n_relations;
    if config.n_triples > capacity / 2 {
        return Err(EvalError::BadSynthConfig(format!(
            "{} triples exceeds half the {} possible distinct triples",
            config.n_triples, capacity
        )));
    }

    // Cumulative weights for inverse-CDF sampling.
    let mut cdf = Vec::with_capacity(config.n_entities);
    let mut acc = 0.0f64;
    for i in 0..config.n_entities {
        acc += 1.0 / ((i + 1) as f64).powf(config.degree_exponent);
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = SplitMix64::new(config.seed);
    let mut draw_entity = |rng: &mut SplitMix64| -> u32 {
        let u = rng.next_f64() * total;
        cdf.partition_point(|&c| c < u) as u32
    };

    let mut seen = std::collections::HashSet::with_capacity(config.n_triples);
    let mut rows: Vec<(String, String, String)> = Vec::with_capacity(config.n_triples);
    let mut attempts = 0usize;
    let max_attempts = config.n_triples.saturating_mul(50).max(1000);
    while rows.len() < config.n_triples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(EvalError::BadSynthConfig(format!(
                "gave up after {attempts} draws with {} of {} triples; lower the triple count \
                 or the degree exponent",
                rows.len(),
                config.n_triples
            )));
        }
        let h = draw_entity(&mut rng);
        let t = draw_entity(&mut rng);
        let r = rng.next_below(config.n_relations as u64) as u32;
        if seen.insert((h, r, t)) {
            rows.push((format!("e{h}"), format!("r{r}"), format!("e{t}")));
        }
    }

    Ok(TripleStore::from_string_triples(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generates_requested_counts() {
        let store = synth_kg(&SynthConfig {
            n_entities: 200,
            n_relations: 5,
            n_triples: 3000,
            seed: 1,
            degree_exponent: 0.8,
        })
        .unwrap();
        assert_eq!(store.len(), 3000);
        assert!(store.n_entities() <= 200);
        assert!(store.n_relations() <= 5);
        assert_eq!(store.duplicates_dropped(), 0);
    }

    #[test]
    fn is_seed_deterministic() {
        let cfg = SynthConfig { n_triples: 500, ..SynthConfig::default() };
        let a = synth_kg(&cfg).unwrap();
        let b = synth_kg(&cfg).unwrap();
        assert_eq!(a.triples(), b.triples());
    }

    #[test]
    fn power_law_skews_degree() {
        // With a positive exponent, the most frequent entity collects far
        // more endpoints than the median one.
        let store = synth_kg(&SynthConfig {
            n_entities: 500,
            n_relations: 4,
            n_triples: 10_000,
            seed: 3,
            degree_exponent: 1.0,
        })
        .unwrap();
        let mut degree = vec![0usize; store.n_entities()];
        for t in store.triples() {
            degree[t.head as usize] += 1;
            degree[t.tail as usize] += 1;
        }
        degree.sort_unstable_by(|a, b| b.cmp(a));
        let median = degree[degree.len() / 2].max(1);
        assert!(
            degree[0] > 10 * median,
            "top degree {} vs median {median}",
            degree[0]
        );
    }

    #[test]
    fn rejects_degenerate_configs() {
        let bad = SynthConfig { n_entities: 1, ..SynthConfig::default() };
        assert!(synth_kg(&bad).is_err());
        let over = SynthConfig {
            n_entities: 10,
            n_relations: 1,
            n_triples: 90,
            ..SynthConfig::default()
        };
        assert!(synth_kg(&over).is_err());
    }
}
