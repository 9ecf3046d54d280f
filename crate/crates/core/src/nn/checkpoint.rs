//! Binary checkpoint layout (all integers little-endian):
//!
//! ```text
//! magic       8 bytes   "EMOFNDCK"
//! version     u32       currently 1
//! header_len  u32
//! header      header_len bytes of UTF-8 JSON (model metadata)
//! count       u32       number of parameters
//! count times:
//!   name_len  u32
//!   name      name_len bytes UTF-8
//!   rows      u32
//!   cols      u32
//!   data      rows * cols f64, row-major
//! ```
//!
//! Gradients and optimizer state are not stored.

use std::io::{Read, Write};

use super::{ParamSet, Tensor2};
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"EMOFNDCK";
pub const CHECKPOINT_VERSION: u32 = 1;

fn put_u32<W: Write>(out: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{v} does not fit in u32")))?;
    out.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(input: &mut R) -> Result<usize> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf) as usize)
}

fn get_bytes<R: Read>(input: &mut R, len: usize) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    input.take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(Error::Checkpoint("truncated file".into()));
    }
    Ok(buf)
}

pub fn write_checkpoint<W: Write>(mut out: W, header: &str, params: &ParamSet) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC)?;
    put_u32(&mut out, CHECKPOINT_VERSION as usize)?;
    put_u32(&mut out, header.len())?;
    out.write_all(header.as_bytes())?;
    put_u32(&mut out, params.len())?;
    for (name, value, _) in params.iter() {
        put_u32(&mut out, name.len())?;
        out.write_all(name.as_bytes())?;
        put_u32(&mut out, value.rows())?;
        put_u32(&mut out, value.cols())?;
        for v in value.data() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Returns the JSON header text and the parameters (with zeroed gradients).
pub fn read_checkpoint<R: Read>(mut input: R) -> Result<(String, ParamSet)> {
    let magic = get_bytes(&mut input, 8).map_err(|_| Error::Checkpoint("missing magic".into()))?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic; not a checkpoint file".into()));
    }
    let version = get_u32(&mut input)?;
    if version != CHECKPOINT_VERSION as usize {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let header_len = get_u32(&mut input)?;
    let header = String::from_utf8(get_bytes(&mut input, header_len)?)
        .map_err(|_| Error::Checkpoint("header is not UTF-8".into()))?;
    let count = get_u32(&mut input)?;
    let mut params = ParamSet::new();
    for _ in 0..count {
        let name_len = get_u32(&mut input)?;
        let name = String::from_utf8(get_bytes(&mut input, name_len)?)
            .map_err(|_| Error::Checkpoint("parameter name is not UTF-8".into()))?;
        let rows = get_u32(&mut input)?;
        let cols = get_u32(&mut input)?;
        let raw = get_bytes(&mut input, rows * cols * 8)?;
        let data = raw
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
            .collect();
        params.add(name, Tensor2::from_vec(rows, cols, data)?)?;
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Checkpoint("trailing bytes after parameters".into()));
    }
    Ok((header, params))
}
