//! Triple datasets: loading, vocabularies, splits, and corruption sampling.
//!
//! The on-disk format is 3-column TSV, `head<TAB>relation<TAB>tail`, one
//! triple per line, UTF-8. Vocabularies index strings in first-appearance
//! order, so reloading the same file always yields the same integer ids.

mod corrupt;
mod split;

pub use corrupt::{CorruptedSlot, CorruptionConfig, CorruptionSample, Corruptor, sample_corruption};
pub use split::{check_split_invariants, load_split, make_split, save_split, sha256_file,
    SplitManifest, SplitPlan};

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected 3 tab-separated fields, found {found}")]
    MalformedLine {
        path: String,
        line: usize,
        found: usize,
    },
    #[error("{path}: no triples found")]
    EmptyDataset { path: String },
    #[error("store has {len} triples but a split needs at least 4")]
    StoreTooSmall { len: usize },
    #[error("need at least 2 entities to corrupt, store has {len}")]
    TooFewEntities { len: usize },
    #[error("need at least 2 relations for relation corruption, store has {len}")]
    TooFewRelations { len: usize },
    #[error("unknown {kind} string {name:?} (not in the reference vocabulary)")]
    UnknownVocab { kind: &'static str, name: String },
    #[error("split manifest {path} is invalid: {reason}")]
    BadManifest { path: String, reason: String },
}

/// One `(head, relation, tail)` fact, addressed by vocabulary ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: u32,
    pub relation: u32,
    pub tail: u32,
}

impl Triple {
    pub fn new(head: u32, relation: u32, tail: u32) -> Self {
        Triple { head, relation, tail }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

/// An immutable, deduplicated triple dataset with string vocabularies.
///
/// Safe to share across threads once loaded; all sampling takes an explicit
/// rng, there is no interior mutability.
#[derive(Debug, Clone)]
pub struct TripleStore {
    entity_vocab: Vec<String>,
    relation_vocab: Vec<String>,
    triples: Vec<Triple>,
    membership: HashSet<Triple>,
    duplicates_dropped: usize,
}

impl TripleStore {
    /// Build a store from string triples, indexing vocabularies in
    /// first-appearance order and dropping duplicate triples.
    pub fn from_string_triples<S: AsRef<str>>(rows: &[(S, S, S)]) -> Self {
        let mut entity_ids: HashMap<String, u32> = HashMap::new();
        let mut relation_ids: HashMap<String, u32> = HashMap::new();
        let mut entity_vocab = Vec::new();
        let mut relation_vocab = Vec::new();
        let mut triples = Vec::with_capacity(rows.len());
        let mut membership = HashSet::with_capacity(rows.len());
        let mut duplicates = 0usize;

        let intern = |name: &str,
                          ids: &mut HashMap<String, u32>,
                          vocab: &mut Vec<String>|
         -> u32 {
            if let Some(&id) = ids.get(name) {
                return id;
            }
            let id = vocab.len() as u32;
            vocab.push(name.to_owned());
            ids.insert(name.to_owned(), id);
            id
        };

        for (h, r, t) in rows {
            let head = intern(h.as_ref(), &mut entity_ids, &mut entity_vocab);
            let relation = intern(r.as_ref(), &mut relation_ids, &mut relation_vocab);
            let tail = intern(t.as_ref(), &mut entity_ids, &mut entity_vocab);
            let triple = Triple { head, relation, tail };
            if membership.insert(triple) {
                triples.push(triple);
            } else {
                duplicates += 1;
            }
        }

        TripleStore {
            entity_vocab,
            relation_vocab,
            triples,
            membership,
            duplicates_dropped: duplicates,
        }
    }

    pub fn n_entities(&self) -> usize {
        self.entity_vocab.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relation_vocab.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Number of duplicate input lines dropped at load time.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn contains(&self, triple: Triple) -> bool {
        self.membership.contains(&triple)
    }

    pub fn membership_index(&self) -> &HashSet<Triple> {
        &self.membership
    }

    pub fn entity_name(&self, id: u32) -> &str {
        &self.entity_vocab[id as usize]
    }

    pub fn relation_name(&self, id: u32) -> &str {
        &self.relation_vocab[id as usize]
    }

    pub fn entity_id(&self, name: &str) -> Option<u32> {
        self.entity_vocab.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn relation_id(&self, name: &str) -> Option<u32> {
        self.relation_vocab.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Map string triples onto this store's vocabulary.
    ///
    /// Fails on any entity or relation string not present here; used when a
    /// persisted split is reloaded against its source dataset.
    pub fn resolve_rows(&self, rows: &[(String, String, String)]) -> Result<Vec<Triple>, KgError> {
        let entity_ids: HashMap<&str, u32> = self
            .entity_vocab
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let relation_ids: HashMap<&str, u32> = self
            .relation_vocab
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        rows.iter()
            .map(|(h, r, t)| {
                let head = *entity_ids.get(h.as_str()).ok_or_else(|| KgError::UnknownVocab {
                    kind: "entity",
                    name: h.clone(),
                })?;
                let relation =
                    *relation_ids.get(r.as_str()).ok_or_else(|| KgError::UnknownVocab {
                        kind: "relation",
                        name: r.clone(),
                    })?;
                let tail = *entity_ids.get(t.as_str()).ok_or_else(|| KgError::UnknownVocab {
                    kind: "entity",
                    name: t.clone(),
                })?;
                Ok(Triple { head, relation, tail })
            })
            .collect()
    }

    /// Write triples as TSV using this store's vocabulary.
    pub fn write_tsv(&self, path: &Path) -> Result<(), KgError> {
        self.write_triples_tsv(path, &self.triples)
    }

    /// Write an arbitrary triple list (ids from this store) as TSV.
    pub fn write_triples_tsv(&self, path: &Path, triples: &[Triple]) -> Result<(), KgError> {
        let io_err = |source| KgError::Io { path: path.display().to_string(), source };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        for t in triples {
            writeln!(
                w,
                "{}\t{}\t{}",
                self.entity_name(t.head),
                self.relation_name(t.relation),
                self.entity_name(t.tail)
            )
            .map_err(|source| KgError::Io { path: path.display().to_string(), source })?;
        }
        w.flush()
            .map_err(|source| KgError::Io { path: path.display().to_string(), source })
    }
}

/// Read raw string rows from a 3-column TSV file. Empty lines are skipped;
/// a line with any other field count is an error naming the line number.
pub fn read_tsv_rows(path: &Path) -> Result<Vec<(String, String, String)>, KgError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path)
        .map_err(|source| KgError::Io { path: display.clone(), source })?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| KgError::Io { path: display.clone(), source })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(KgError::MalformedLine {
                path: display,
                line: idx + 1,
                found: fields.len(),
            });
        }
        rows.push((fields[0].to_owned(), fields[1].to_owned(), fields[2].to_owned()));
    }
    Ok(rows)
}

/// Load a TSV triple file into a [`TripleStore`].
pub fn load_tsv(path: &Path) -> Result<TripleStore, KgError> {
    let rows = read_tsv_rows(path)?;
    if rows.is_empty() {
        return Err(KgError::EmptyDataset { path: path.display().to_string() });
    }
    Ok(TripleStore::from_string_triples(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn store_from(text: &str) -> Result<TripleStore, KgError> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        load_tsv(f.path())
    }

    #[test]
    fn minimal_file_loads() {
        let store = store_from("a\tr\tb\n").unwrap();
        assert_eq!(store.n_entities(), 2);
        assert_eq!(store.n_relations(), 1);
        assert_eq!(store.len(), 1);
        assert_eq!(store.triples()[0], Triple::new(0, 0, 1));
    }

    #[test]
    fn duplicate_lines_dropped_and_counted() {
        let store = store_from("a\tr\tb\na\tr\tb\n").unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.duplicates_dropped(), 1);
    }

    #[test]
    fn vocab_order_is_first_appearance() {
        let store = store_from("z\tr1\ta\na\tr0\tz\n").unwrap();
        assert_eq!(store.entity_name(0), "z");
        assert_eq!(store.entity_name(1), "a");
        assert_eq!(store.relation_name(0), "r1");
        assert_eq!(store.relation_name(1), "r0");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = store_from("a\tr\tb\na\tb\n").unwrap_err();
        match err {
            KgError::MalformedLine { line, found, .. } => {
                assert_eq!(line, 2);
                assert_eq!(found, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn too_many_fields_is_malformed() {
        let err = store_from("a\tr\tb\tc\n").unwrap_err();
        assert!(matches!(err, KgError::MalformedLine { line: 1, found: 4, .. }));
    }

    #[test]
    fn empty_file_errors() {
        assert!(matches!(store_from(""), Err(KgError::EmptyDataset { .. })));
        assert!(matches!(store_from("\n\n"), Err(KgError::EmptyDataset { .. })));
    }

    #[test]
    fn blank_lines_and_crlf_tolerated() {
        let store = store_from("a\tr\tb\r\n\nb\tr\tc\n").unwrap();
        assert_eq!(store.len(), 2);
    }

    #[test]
    fn tsv_round_trip_preserves_integer_triples() {
        let store = store_from("a\tr\tb\nb\ts\tc\nc\tr\ta\n").unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        store.write_tsv(f.path()).unwrap();
        let reloaded = load_tsv(f.path()).unwrap();
        assert_eq!(store.triples(), reloaded.triples());
        assert_eq!(store.n_entities(), reloaded.n_entities());
        assert_eq!(store.n_relations(), reloaded.n_relations());
    }

    #[test]
    fn membership_index_matches_triple_list() {
        let store = store_from("a\tr\tb\nb\tr\tc\n").unwrap();
        for t in store.triples() {
            assert!(store.contains(*t));
        }
        assert!(!store.contains(Triple::new(0, 0, 0)));
        assert_eq!(store.membership_index().len(), store.len());
    }
}
