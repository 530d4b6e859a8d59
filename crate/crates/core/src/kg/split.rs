//! Deterministic target/shadow experimental splits.
//!
//! A split shuffles the store's triples under a seed, gives the first
//! (rounded-up) half to the target side and the rest to the shadow side,
//! then halves each side the same way into train and test. Every part size
//! is therefore fixed by the triple count alone; the seed only decides the
//! assignment.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{KgError, Triple, TripleStore};
use crate::rng::{shuffle, SplitMix64};

/// The four disjoint parts of a dataset split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub seed: u64,
    pub target_train: Vec<Triple>,
    pub target_test: Vec<Triple>,
    pub shadow_train: Vec<Triple>,
    pub shadow_test: Vec<Triple>,
}

impl SplitPlan {
    pub fn parts(&self) -> [(&'static str, &[Triple]); 4] {
        [
            ("target_train", &self.target_train),
            ("target_test", &self.target_test),
            ("shadow_train", &self.shadow_train),
            ("shadow_test", &self.shadow_test),
        ]
    }

    pub fn total_len(&self) -> usize {
        self.parts().iter().map(|(_, p)| p.len()).sum()
    }
}

/// Split `store` into target/shadow train/test quarters under `seed`.
///
/// Needs at least 4 triples so every part is non-empty.
pub fn make_split(store: &TripleStore, seed: u64) -> Result<SplitPlan, KgError> {
    if store.len() < 4 {
        return Err(KgError::StoreTooSmall { len: store.len() });
    }
    let mut order: Vec<Triple> = store.triples().to_vec();
    let mut rng = SplitMix64::new(seed);
    shuffle(&mut order, &mut rng);

    let half = order.len().div_ceil(2);
    let (target, shadow) = order.split_at(half);
    let t_half = target.len().div_ceil(2);
    let s_half = shadow.len().div_ceil(2);
    let (tt, te) = target.split_at(t_half);
    let (st, se) = shadow.split_at(s_half);

    Ok(SplitPlan {
        seed,
        target_train: tt.to_vec(),
        target_test: te.to_vec(),
        shadow_train: st.to_vec(),
        shadow_test: se.to_vec(),
    })
}

/// Sidecar metadata persisted next to the four part files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub sizes: Vec<(String, usize)>,
    /// SHA-256 (hex) of the source TSV this split was derived from, when known.
    pub source_checksum: Option<String>,
}

pub fn sha256_file(path: &Path) -> Result<String, KgError> {
    let bytes = std::fs::read(path)
        .map_err(|source| KgError::Io { path: path.display().to_string(), source })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Persist a split as four TSV part files plus `manifest.json`.
pub fn save_split(
    plan: &SplitPlan,
    store: &TripleStore,
    dir: &Path,
    source_checksum: Option<String>,
) -> Result<(), KgError> {
    std::fs::create_dir_all(dir)
        .map_err(|source| KgError::Io { path: dir.display().to_string(), source })?;
    for (name, part) in plan.parts() {
        store.write_triples_tsv(&dir.join(format!("{name}.tsv")), part)?;
    }
    let manifest = SplitManifest {
        seed: plan.seed,
        sizes: plan.parts().iter().map(|(n, p)| (n.to_string(), p.len())).collect(),
        source_checksum,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, json)
        .map_err(|source| KgError::Io { path: path.display().to_string(), source })
}

/// Reload a persisted split against its source store.
///
/// The part files hold entity/relation strings; they are resolved through
/// `store`'s vocabulary so ids line up with models trained on that store.
/// `manifest.json` is optional (user-supplied pre-split directories may not
/// have one); when present its sizes must match the part files.
pub fn load_split(dir: &Path, store: &TripleStore) -> Result<SplitPlan, KgError> {
    let mut parts = Vec::with_capacity(4);
    for name in ["target_train", "target_test", "shadow_train", "shadow_test"] {
        let rows = super::read_tsv_rows(&dir.join(format!("{name}.tsv")))?;
        parts.push(store.resolve_rows(&rows)?);
    }
    let manifest_path = dir.join("manifest.json");
    let mut seed = 0u64;
    if manifest_path.exists() {
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|source| KgError::Io { path: manifest_path.display().to_string(), source })?;
        let manifest: SplitManifest =
            serde_json::from_str(&text).map_err(|e| KgError::BadManifest {
                path: manifest_path.display().to_string(),
                reason: e.to_string(),
            })?;
        seed = manifest.seed;
        for (name, size) in &manifest.sizes {
            let actual = match name.as_str() {
                "target_train" => parts[0].len(),
                "target_test" => parts[1].len(),
                "shadow_train" => parts[2].len(),
                "shadow_test" => parts[3].len(),
                other => {
                    return Err(KgError::BadManifest {
                        path: manifest_path.display().to_string(),
                        reason: format!("unknown part {other:?}"),
                    })
                }
            };
            if actual != *size {
                return Err(KgError::BadManifest {
                    path: manifest_path.display().to_string(),
                    reason: format!("part {name} has {actual} triples, manifest says {size}"),
                });
            }
        }
    }
    let mut it = parts.into_iter();
    Ok(SplitPlan {
        seed,
        target_train: it.next().unwrap(),
        target_test: it.next().unwrap(),
        shadow_train: it.next().unwrap(),
        shadow_test: it.next().unwrap(),
    })
}

/// Check the [`SplitPlan`] structural invariants against its source store:
/// pairwise disjoint parts whose union is exactly the store's triple set,
/// with the documented ±1 size balance.
pub fn check_split_invariants(plan: &SplitPlan, store: &TripleStore) -> Result<(), String> {
    let mut seen: HashSet<Triple> = HashSet::with_capacity(store.len());
    for (name, part) in plan.parts() {
        for t in part {
            if !seen.insert(*t) {
                return Err(format!("triple {t} appears in more than one part (last: {name})"));
            }
            if !store.contains(*t) {
                return Err(format!("part {name} contains {t} not present in the store"));
            }
        }
    }
    if seen.len() != store.len() {
        return Err(format!("parts cover {} of {} triples", seen.len(), store.len()));
    }
    let dt = plan.target_train.len() + plan.target_test.len();
    let ds = plan.shadow_train.len() + plan.shadow_test.len();
    if dt.abs_diff(ds) > 1 {
        return Err(format!("|D_T|={dt} and |D_S|={ds} differ by more than 1"));
    }
    if plan.target_train.len().abs_diff(plan.target_test.len()) > 1 {
        return Err("target train/test differ by more than 1".into());
    }
    if plan.shadow_train.len().abs_diff(plan.shadow_test.len()) > 1 {
        return Err("shadow train/test differ by more than 1".into());
    }
    Ok(())
}
