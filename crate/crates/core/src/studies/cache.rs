//! Optional on-disk cache of per-cell algebra matrices.
//!
//! Enabled by setting `EXSEQ_CACHE_DIR`. Files carry a magic tag, a format
//! version and the full cell key; any mismatch is treated as a miss and the
//! entry is rebuilt.

use crate::polyspace::algebra::{algebra_from_parts, Algebra};
use crate::polyspace::n_poly;
use crate::refsimplex::ReferenceCell;
use nalgebra::DMatrix;
use std::io::{Read, Write};
use std::path::PathBuf;

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"EXSQ";

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("EXSEQ_CACHE_DIR").filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn path_for(cell: &ReferenceCell, degree: usize) -> Option<PathBuf> {
    cache_dir().map(|d| d.join(format!("algebra-{:016x}-{degree}.bin", fnv1a(cell.key()))))
}

fn write_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Serialize an algebra with its header.
pub fn encode(cell: &ReferenceCell, a: &Algebra) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    write_u32(&mut out, CACHE_VERSION);
    write_u32(&mut out, a.dim as u32);
    write_u32(&mut out, a.degree as u32);
    let key = cell.key().as_bytes();
    write_u32(&mut out, key.len() as u32);
    out.extend_from_slice(key);
    for m in a.deriv.iter().chain(a.mult.iter()) {
        for v in m.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Inverse of `encode`; None on any header mismatch or truncation.
pub fn decode(cell: &ReferenceCell, bytes: &[u8]) -> Option<Algebra> {
    let mut pos = 0usize;
    let mut take = |n: usize| -> Option<&[u8]> {
        let s = bytes.get(pos..pos + n)?;
        pos += n;
        Some(s)
    };
    if take(4)? != MAGIC {
        return None;
    }
    let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().unwrap());
    if u32_at(take(4)?) != CACHE_VERSION {
        return None;
    }
    let dim = u32_at(take(4)?) as usize;
    let degree = u32_at(take(4)?) as usize;
    let klen = u32_at(take(4)?) as usize;
    if dim != cell.dim || take(klen)? != cell.key().as_bytes() {
        return None;
    }
    let n = n_poly(dim, degree);
    let mut mats = Vec::with_capacity(2 * dim);
    for _ in 0..2 * dim {
        let raw = take(8 * n * n)?;
        let vals: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        mats.push(DMatrix::from_vec(n, n, vals));
    }
    if pos != bytes.len() {
        return None;
    }
    let mult = mats.split_off(dim);
    Some(algebra_from_parts(dim, degree, mats, mult))
}

pub(crate) fn load_algebra(cell: &ReferenceCell, degree: usize) -> Option<Algebra> {
    let path = path_for(cell, degree)?;
    let mut bytes = Vec::new();
    std::fs::File::open(path).ok()?.read_to_end(&mut bytes).ok()?;
    decode(cell, &bytes)
}

pub(crate) fn store_algebra(cell: &ReferenceCell, a: &Algebra) {
    let Some(path) = path_for(cell, a.degree) else { return };
    if let Some(dir) = path.parent() {
        let _ = std::fs::create_dir_all(dir);
    }
    // Write to a temporary name first so concurrent readers never see a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let ok = std::fs::File::create(&tmp).and_then(|mut f| f.write_all(&encode(cell, a))).is_ok();
    if ok {
        let _ = std::fs::rename(&tmp, &path);
    } else {
        let _ = std::fs::remove_file(&tmp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::algebra;
    use crate::refsimplex::tri;

    #[test]
    fn roundtrip_and_version_guard() {
        let cell = tri();
        let a = algebra(&cell, 4);
        let mut bytes = encode(&cell, &a);
        let back = decode(&cell, &bytes).unwrap();
        assert_eq!(back.deriv[1], a.deriv[1]);
        bytes[4] = 99;
        assert!(decode(&cell, &bytes).is_none());
    }
}
