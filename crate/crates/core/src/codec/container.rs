//! The `NVQ1` container.
//!
//! All fields are little-endian:
//!
//! ```text
//! magic "NVQ1" | version u16 | d u32 | n u64 | m u16 | beta u8 | family u8
//! | partition_seed u64 | mean d × f32 | permutation d × u32
//! then n records of
//!   m × (x_min f32 | x_max f32 | p1 f32 | p2 f32 | flags u8) | packed codes
//! ```
//!
//! Flag bit 0 marks a subvector that fell back to the uniform quantizer and
//! bit 1 a constant subvector. Both store zero parameters.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{check_layout, is_permutation, DatasetMeta, EncodedVector, SubvectorHeader};
use crate::error::{NvqError, Result};
use crate::nonlinearity::{Interval, Nonlinearity, NonlinearityFamily, NonlinearityParams};
use crate::quantizer::{Bits, CodeBlock};

pub const MAGIC: [u8; 4] = *b"NVQ1";
pub const FORMAT_VERSION: u16 = 1;

const FIXED_HEADER: usize = 4 + 2 + 4 + 8 + 2 + 1 + 1 + 8;
const SUBVECTOR_HEADER: usize = 4 * 4 + 1;
const FLAG_FELL_BACK: u8 = 1;
const FLAG_CONSTANT: u8 = 2;

pub fn header_size(d: usize) -> usize {
    FIXED_HEADER + 8 * d
}

pub fn record_size(d: usize, m: usize, beta: Bits) -> usize {
    m * SUBVECTOR_HEADER + beta.packed_len(d)
}

/// Exact size in bytes of a container holding `n` vectors.
pub fn nvq_file_size(d: usize, n: usize, m: usize, beta: Bits) -> u64 {
    header_size(d) as u64 + n as u64 * record_size(d, m, beta) as u64
}

pub fn write_nvq<W: Write>(mut w: W, meta: &DatasetMeta, vectors: &[EncodedVector]) -> Result<()> {
    meta.validate()?;
    if meta.n != vectors.len() {
        return Err(NvqError::Config(format!(
            "header says {} vectors, got {}",
            meta.n,
            vectors.len()
        )));
    }
    let d = u32::try_from(meta.d).map_err(|_| NvqError::Config("dimension too large".into()))?;
    let mut head = Vec::with_capacity(header_size(meta.d));
    head.extend_from_slice(&MAGIC);
    head.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    head.extend_from_slice(&d.to_le_bytes());
    head.extend_from_slice(&(meta.n as u64).to_le_bytes());
    head.extend_from_slice(&(meta.m as u16).to_le_bytes());
    head.push(meta.beta.get());
    head.push(meta.family.tag());
    head.extend_from_slice(&meta.partition_seed.to_le_bytes());
    for v in &meta.mean {
        head.extend_from_slice(&v.to_le_bytes());
    }
    for p in &meta.permutation {
        head.extend_from_slice(&p.to_le_bytes());
    }
    w.write_all(&head)?;

    let mut rec = Vec::with_capacity(record_size(meta.d, meta.m, meta.beta));
    for ev in vectors {
        super::check_encoded(ev, meta)?;
        rec.clear();
        for h in &ev.subvectors {
            let mut flags = 0;
            if h.fell_back {
                flags |= FLAG_FELL_BACK;
            }
            if h.is_constant() {
                flags |= FLAG_CONSTANT;
            }
            let (p1, p2) = if flags != 0 {
                (0.0, 0.0)
            } else {
                (h.params.p1 as f32, h.params.p2 as f32)
            };
            for v in [h.interval.x_min as f32, h.interval.x_max as f32, p1, p2] {
                rec.extend_from_slice(&v.to_le_bytes());
            }
            rec.push(flags);
        }
        rec.extend_from_slice(ev.codes.as_bytes());
        w.write_all(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Tracks the read position for error offsets.
struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn bytes(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(NvqError::format(
                        self.offset + filled as u64,
                        format!("truncated {what}"),
                    ))
                }
                Ok(k) => filled += k,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.bytes(&mut b, what)?;
        Ok(b)
    }

    fn at_end(&mut self) -> Result<bool> {
        let mut b = [0u8; 1];
        loop {
            match self.inner.read(&mut b) {
                Ok(0) => return Ok(true),
                Ok(_) => return Ok(false),
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
}

fn read_header<R: Read>(c: &mut Cursor<R>) -> Result<DatasetMeta> {
    if c.array::<4>("magic")? != MAGIC {
        return Err(NvqError::format(0, "bad magic, not an NVQ1 file"));
    }
    let version = u16::from_le_bytes(c.array("version")?);
    if version != FORMAT_VERSION {
        return Err(NvqError::format(
            4,
            format!("unsupported version {version}"),
        ));
    }
    let d = u32::from_le_bytes(c.array("dimension")?) as usize;
    let n = u64::from_le_bytes(c.array("vector count")?);
    let n = usize::try_from(n).map_err(|_| NvqError::format(10, "vector count too large"))?;
    let m = u16::from_le_bytes(c.array("subvector count")?) as usize;
    let [beta] = c.array::<1>("bit width")?;
    let beta =
        Bits::new(beta).map_err(|_| NvqError::format(20, format!("bad bit width {beta}")))?;
    let [tag] = c.array::<1>("family")?;
    let family = NonlinearityFamily::from_tag(tag)
        .ok_or_else(|| NvqError::format(21, format!("unknown family tag {tag}")))?;
    let partition_seed = u64::from_le_bytes(c.array("partition seed")?);
    if d == 0 {
        return Err(NvqError::format(6, "zero dimension"));
    }
    check_layout(d, m).map_err(|e| NvqError::format(18, e.to_string()))?;

    let mut raw = vec![0u8; 4 * d];
    c.bytes(&mut raw, "mean")?;
    let mean: Vec<f32> = raw
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    if let Some(k) = mean.iter().position(|v| !v.is_finite()) {
        return Err(NvqError::format(
            FIXED_HEADER as u64 + 4 * k as u64,
            "non-finite mean entry",
        ));
    }
    let perm_at = c.offset;
    c.bytes(&mut raw, "permutation")?;
    let permutation: Vec<u32> = raw
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    if !is_permutation(&permutation, d) {
        return Err(NvqError::format(perm_at, "partition is not a permutation"));
    }
    Ok(DatasetMeta {
        d,
        n,
        m,
        beta,
        family,
        mean,
        permutation,
        partition_seed,
    })
}

fn read_record<R: Read>(c: &mut Cursor<R>, meta: &DatasetMeta) -> Result<EncodedVector> {
    let mut subvectors = Vec::with_capacity(meta.m);
    for _ in 0..meta.m {
        let at = c.offset;
        let b: [u8; SUBVECTOR_HEADER] = c.array("subvector header")?;
        let f = |k: usize| f32::from_le_bytes([b[4 * k], b[4 * k + 1], b[4 * k + 2], b[4 * k + 3]]);
        let flags = b[16];
        if flags & !(FLAG_FELL_BACK | FLAG_CONSTANT) != 0 {
            return Err(NvqError::format(
                at + 16,
                format!("unknown flags {flags:#04x}"),
            ));
        }
        let interval = Interval::new(f(0) as f64, f(1) as f64)
            .map_err(|e| NvqError::format(at, e.to_string()))?;
        if (flags & FLAG_CONSTANT != 0) != interval.is_degenerate() {
            return Err(NvqError::format(
                at + 16,
                "constant flag disagrees with interval",
            ));
        }
        let params = if flags != 0 || meta.family == NonlinearityFamily::Uniform {
            NonlinearityParams::uniform()
        } else {
            let p = NonlinearityParams::from_point(meta.family, &[f(2) as f64, f(3) as f64]);
            Nonlinearity::new(p, interval).map_err(|e| NvqError::format(at + 8, e.to_string()))?;
            p
        };
        subvectors.push(SubvectorHeader {
            interval,
            params,
            fell_back: flags & FLAG_FELL_BACK != 0,
        });
    }
    let at = c.offset;
    let mut bytes = vec![0u8; meta.beta.packed_len(meta.d)];
    c.bytes(&mut bytes, "codes")?;
    let codes = CodeBlock::from_bytes(meta.beta, meta.d, bytes)
        .map_err(|e| NvqError::format(at, e.to_string()))?;
    Ok(EncodedVector { subvectors, codes })
}

pub fn read_nvq<R: Read>(reader: R) -> Result<(DatasetMeta, Vec<EncodedVector>)> {
    let mut c = Cursor {
        inner: reader,
        offset: 0,
    };
    let meta = read_header(&mut c)?;
    let mut vectors = Vec::with_capacity(meta.n.min(1 << 20));
    for _ in 0..meta.n {
        vectors.push(read_record(&mut c, &meta)?);
    }
    if !c.at_end()? {
        return Err(NvqError::format(
            c.offset,
            "trailing bytes after last record",
        ));
    }
    Ok((meta, vectors))
}

pub fn write_nvq_file(
    path: impl AsRef<Path>,
    meta: &DatasetMeta,
    vectors: &[EncodedVector],
) -> Result<()> {
    write_nvq(BufWriter::new(File::create(path)?), meta, vectors)
}

pub fn read_nvq_file(path: impl AsRef<Path>) -> Result<(DatasetMeta, Vec<EncodedVector>)> {
    read_nvq(BufReader::new(File::open(path)?))
}
