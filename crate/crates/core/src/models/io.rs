//! Binary model file format.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "KGEM"
//! 4       2     format version (currently 1)
//! 6       1     kind tag    (0 TransE, 1 TransH, 2 DistMult, 3 ComplEx)
//! 7       1     norm tag    (0 L1, 1 L2)
//! 8       4     dim
//! 12      4     entity count
//! 16      4     relation count
//! 20      ...   f32 blocks, row-major:
//!               entity_re, relation_re,
//!               relation_normal   (TransH only),
//!               entity_im, relation_im   (ComplEx only)
//! end-4   4     CRC32 (IEEE) of every preceding byte
//! ```

use std::path::Path;

use super::{KgeModel, ModelError, ModelKind, NormKind};

pub const MAGIC: [u8; 4] = *b"KGEM";
pub const FORMAT_VERSION: u16 = 1;

const HEADER_LEN: usize = 20;

fn kind_tag(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::TransE => 0,
        ModelKind::TransH => 1,
        ModelKind::DistMult => 2,
        ModelKind::ComplEx => 3,
    }
}

fn kind_from_tag(tag: u8) -> Option<ModelKind> {
    match tag {
        0 => Some(ModelKind::TransE),
        1 => Some(ModelKind::TransH),
        2 => Some(ModelKind::DistMult),
        3 => Some(ModelKind::ComplEx),
        _ => None,
    }
}

fn norm_tag(norm: NormKind) -> u8 {
    match norm {
        NormKind::L1 => 0,
        NormKind::L2 => 1,
    }
}

fn norm_from_tag(tag: u8) -> Option<NormKind> {
    match tag {
        0 => Some(NormKind::L1),
        1 => Some(NormKind::L2),
        _ => None,
    }
}

/// Ordered (name, row-count multiplier) block layout for a kind.
fn blocks(kind: ModelKind, n_entities: usize, n_relations: usize) -> Vec<(&'static str, usize)> {
    let mut out = vec![("entity", n_entities), ("relation", n_relations)];
    if kind.has_relation_normal() {
        out.push(("relation_normal", n_relations));
    }
    if kind.has_imaginary() {
        out.push(("entity_imaginary", n_entities));
        out.push(("relation_imaginary", n_relations));
    }
    out
}

pub fn save_model(model: &KgeModel, path: &Path) -> Result<(), ModelError> {
    let mut bytes = Vec::with_capacity(HEADER_LEN);
    bytes.extend_from_slice(&MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.push(kind_tag(model.kind()));
    bytes.push(norm_tag(model.norm()));
    bytes.extend_from_slice(&(model.dim() as u32).to_le_bytes());
    bytes.extend_from_slice(&(model.n_entities() as u32).to_le_bytes());
    bytes.extend_from_slice(&(model.n_relations() as u32).to_le_bytes());

    let mut write_table = |table: &[f64]| {
        for &v in table {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
    };
    write_table(&model.entity_re);
    write_table(&model.relation_re);
    if model.kind().has_relation_normal() {
        write_table(&model.relation_normal);
    }
    if model.kind().has_imaginary() {
        write_table(&model.entity_im);
        write_table(&model.relation_im);
    }

    let crc = crc32fast::hash(&bytes);
    bytes.extend_from_slice(&crc.to_le_bytes());
    std::fs::write(path, &bytes)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })
}

pub fn load_model(path: &Path) -> Result<KgeModel, ModelError> {
    let display = path.display().to_string();
    let bad = |reason: String| ModelError::BadModelFile { path: display.clone(), reason };
    let bytes = std::fs::read(path)
        .map_err(|source| ModelError::Io { path: display.clone(), source })?;

    if bytes.len() < HEADER_LEN + 4 {
        return Err(bad(format!("truncated: {} bytes is shorter than the fixed header", bytes.len())));
    }
    if bytes[0..4] != MAGIC {
        return Err(bad("bad magic bytes (not a model file)".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}, expected {FORMAT_VERSION}")));
    }
    let kind = kind_from_tag(bytes[6]).ok_or_else(|| bad(format!("unknown kind tag {}", bytes[6])))?;
    let norm = norm_from_tag(bytes[7]).ok_or_else(|| bad(format!("unknown norm tag {}", bytes[7])))?;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n_entities = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let n_relations = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as usize;
    if dim == 0 || n_entities == 0 || n_relations == 0 {
        return Err(bad(format!(
            "degenerate shape: dim={dim}, entities={n_entities}, relations={n_relations}"
        )));
    }

    let payload_len = bytes.len() - HEADER_LEN - 4;
    let mut offset = 0usize;
    let layout = blocks(kind, n_entities, n_relations);
    for (name, rows) in &layout {
        let len = rows * dim * 4;
        if offset + len > payload_len {
            return Err(bad(format!(
                "truncated: {name} block needs bytes {}..{} of a {payload_len}-byte payload",
                offset,
                offset + len
            )));
        }
        offset += len;
    }
    if offset != payload_len {
        return Err(bad(format!(
            "trailing data: payload has {payload_len} bytes, layout expects {offset}"
        )));
    }

    let stored_crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    let actual_crc = crc32fast::hash(&bytes[..bytes.len() - 4]);
    if stored_crc != actual_crc {
        return Err(bad(format!(
            "checksum mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}"
        )));
    }

    let mut cursor = HEADER_LEN;
    let mut read_table = |rows: usize| -> Vec<f64> {
        let len = rows * dim;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let v = f32::from_le_bytes(bytes[cursor..cursor + 4].try_into().unwrap());
            out.push(v as f64);
            cursor += 4;
        }
        out
    };
    let entity_re = read_table(n_entities);
    let relation_re = read_table(n_relations);
    let relation_normal =
        if kind.has_relation_normal() { read_table(n_relations) } else { Vec::new() };
    let entity_im = if kind.has_imaginary() { read_table(n_entities) } else { Vec::new() };
    let relation_im = if kind.has_imaginary() { read_table(n_relations) } else { Vec::new() };

    KgeModel::from_parts(
        kind,
        norm,
        dim,
        n_entities,
        n_relations,
        entity_re,
        entity_im,
        relation_re,
        relation_im,
        relation_normal,
    )
    .map_err(|e| bad(format!("inconsistent tables: {e}")))
}
