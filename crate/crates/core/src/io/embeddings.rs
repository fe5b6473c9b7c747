//! Binary embedding formats.
//!
//! Native layout (`UCSEMB01`), little-endian, no padding:
//!
//! | bytes  | field                    |
//! |--------|--------------------------|
//! | 0..8   | ASCII magic `UCSEMB01`   |
//! | 8..12  | u32 version, always 1    |
//! | 12..16 | u32 dimension `d`        |
//! | 16..24 | u64 row count `n`        |
//! | 24..   | `n * d` f32, row-major   |
//!
//! NPY version 1.0 (and 2.0 on read) with dtype `<f4`, C order, shape `(n, d)`
//! is accepted as well.

use std::path::Path;

use crate::{EmbeddingMatrix, Error, Matrix, Result};

pub const NATIVE_MAGIC: &[u8; 8] = b"UCSEMB01";
pub const NATIVE_VERSION: u32 = 1;
const NATIVE_HEADER: usize = 24;
const NPY_MAGIC: &[u8; 6] = b"\x93NUMPY";

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_embeddings(&bytes)
}

/// Decodes either format, dispatching on the magic bytes.
pub fn decode_embeddings(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    if bytes.starts_with(NATIVE_MAGIC) {
        decode_native(bytes)
    } else if bytes.starts_with(NPY_MAGIC) {
        decode_npy(bytes)
    } else {
        let shown = &bytes[..bytes.len().min(8)];
        Err(Error::Format(format!(
            "bad magic {shown:?}: expected \"UCSEMB01\" or an NPY header"
        )))
    }
}

pub fn write_embeddings(path: impl AsRef<Path>, m: &EmbeddingMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_native(m)).map_err(|e| Error::io(path, e))
}

pub fn write_npy(path: impl AsRef<Path>, m: &EmbeddingMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_npy(m)).map_err(|e| Error::io(path, e))
}

pub fn encode_native(m: &EmbeddingMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(NATIVE_HEADER + m.as_slice().len() * 4);
    out.extend_from_slice(NATIVE_MAGIC);
    out.extend_from_slice(&NATIVE_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    push_f32s(&mut out, m.as_slice());
    out
}

pub fn encode_npy(m: &EmbeddingMatrix) -> Vec<u8> {
    let mut header = format!(
        "{{'descr': '<f4', 'fortran_order': False, 'shape': ({}, {}), }}",
        m.rows(),
        m.cols()
    );
    // magic(6) + version(2) + len(2) + header, padded to a multiple of 64 with '\n' last
    let unpadded = 10 + header.len() + 1;
    header.push_str(&" ".repeat((64 - unpadded % 64) % 64));
    header.push('\n');

    let mut out = Vec::with_capacity(10 + header.len() + m.as_slice().len() * 4);
    out.extend_from_slice(NPY_MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    push_f32s(&mut out, m.as_slice());
    out
}

fn push_f32s(out: &mut Vec<u8>, values: &[f32]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn decode_native(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    if bytes.len() < NATIVE_HEADER {
        return Err(Error::Format(format!(
            "header needs {NATIVE_HEADER} bytes, file has {}",
            bytes.len()
        )));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != NATIVE_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as u64;
    let n = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    decode_payload(n, d, &bytes[NATIVE_HEADER..])
}

fn decode_payload(n: u64, d: u64, payload: &[u8]) -> Result<EmbeddingMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::Format(format!("empty shape n={n}, d={d}")));
    }
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Format(format!("shape n={n}, d={d} overflows")))?;
    if payload.len() as u64 != expected {
        return Err(Error::Truncated {
            expected,
            actual: payload.len() as u64,
        });
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::from_vec(n as usize, d as usize, data)
}

fn decode_npy(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    if bytes.len() < 10 {
        return Err(Error::Format("NPY header truncated".into()));
    }
    let major = bytes[6];
    let (header_len, start) = match major {
        1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
        2 | 3 if bytes.len() >= 12 => (
            u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize,
            12,
        ),
        _ => return Err(Error::Format(format!("unsupported NPY version {major}"))),
    };
    let header = bytes
        .get(start..start + header_len)
        .ok_or_else(|| Error::Format("NPY header truncated".into()))?;
    let header = std::str::from_utf8(header)
        .map_err(|_| Error::Format("NPY header is not valid text".into()))?;

    let descr = dict_value(header, "descr")?;
    if descr.trim_matches(|c| c == '\'' || c == '"') != "<f4" {
        return Err(Error::Format(format!(
            "NPY dtype {descr} unsupported, expected '<f4'"
        )));
    }
    if dict_value(header, "fortran_order")? != "False" {
        return Err(Error::Format(
            "NPY fortran_order arrays are not supported".into(),
        ));
    }
    let shape = dict_value(header, "shape")?;
    let dims: Vec<u64> = shape
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Format(format!("bad NPY shape {shape}")))
        })
        .collect::<Result<_>>()?;
    let [n, d] = dims[..] else {
        return Err(Error::Format(format!("NPY shape {shape} is not 2-D")));
    };
    decode_payload(n, d, &bytes[start + header_len..])
}

/// Raw text of a value in the NPY header's Python dict literal.
fn dict_value<'h>(header: &'h str, key: &str) -> Result<&'h str> {
    let missing = || Error::Format(format!("NPY header lacks {key:?}"));
    let at = header
        .find(&format!("'{key}'"))
        .or_else(|| header.find(&format!("\"{key}\"")))
        .ok_or_else(missing)?;
    let rest = header[at + key.len() + 2..].trim_start();
    let rest = rest.strip_prefix(':').ok_or_else(missing)?.trim_start();
    let end = if rest.starts_with('(') {
        rest.find(')').map(|i| i + 1)
    } else {
        rest.find([',', '}'])
    }
    .ok_or_else(missing)?;
    Ok(rest[..end].trim())
}
