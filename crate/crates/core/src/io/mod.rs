//! Record files, embedding matrices and core-set output.

mod coreset;
mod embeddings;
mod records;

pub use coreset::{coreset_to_jsonl, read_coreset, write_coreset};
pub use embeddings::{
    decode_embeddings, encode_native, encode_npy, load_embeddings, write_embeddings, write_npy,
    NATIVE_MAGIC, NATIVE_VERSION,
};
pub use records::{load_records, parse_records, Record, RecordSet, SelectionRecord};

use crate::{EmbeddingMatrix, Error, Result};

/// Records paired 1:1 with embedding rows.
#[derive(Debug, Clone)]
pub struct AlignedDataset {
    pub records: RecordSet,
    pub embeddings: EmbeddingMatrix,
}

pub fn validate_alignment(
    records: RecordSet,
    embeddings: EmbeddingMatrix,
) -> Result<AlignedDataset> {
    if records.len() != embeddings.rows() {
        return Err(Error::CountMismatch {
            records: records.len(),
            rows: embeddings.rows(),
        });
    }
    Ok(AlignedDataset {
        records,
        embeddings,
    })
}

/// Writes `bytes` to `path` through a temporary sibling file so readers never
/// observe a partially written output.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
