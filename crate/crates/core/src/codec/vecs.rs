//! `fvecs` / `ivecs` files.
//!
//! Each record is a 4-byte little-endian signed dimension `d` followed by `d`
//! little-endian 4-byte values (IEEE-754 singles for `fvecs`, signed integers
//! for `ivecs`). Every record in a file shares the same `d`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{NvqError, Result};

/// A 4-byte little-endian record element.
pub trait VecElement: Copy + Default + Send + Sync + 'static {
    fn from_le(bytes: [u8; 4]) -> Self;
    fn to_le(self) -> [u8; 4];
}

impl VecElement for f32 {
    fn from_le(bytes: [u8; 4]) -> Self {
        f32::from_le_bytes(bytes)
    }
    fn to_le(self) -> [u8; 4] {
        self.to_le_bytes()
    }
}

impl VecElement for i32 {
    fn from_le(bytes: [u8; 4]) -> Self {
        i32::from_le_bytes(bytes)
    }
    fn to_le(self) -> [u8; 4] {
        self.to_le_bytes()
    }
}

/// Row-major set of equal-length vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct VecSet<T> {
    dim: usize,
    data: Vec<T>,
}

/// Database or query vectors.
pub type Dataset = VecSet<f32>;
/// Ground-truth neighbor ids, one row per query.
pub type NeighborLists = VecSet<i32>;

impl<T: VecElement> VecSet<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 && !data.is_empty() {
            return Err(NvqError::Config(
                "vectors must have at least one dimension".into(),
            ));
        }
        if dim > 0 && !data.len().is_multiple_of(dim) {
            return Err(NvqError::Config(format!(
                "{} values do not split into rows of {dim}",
                data.len()
            )));
        }
        Ok(VecSet { dim, data })
    }

    pub fn empty() -> Self {
        VecSet {
            dim: 0,
            data: Vec::new(),
        }
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Ok(Self::empty());
        };
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(NvqError::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        let dim = self.dim.max(1);
        self.data.chunks_exact(dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// The first `n` rows.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        VecSet {
            dim: self.dim,
            data: self.data[..n * self.dim].to_vec(),
        }
    }
}

fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Parses a whole `*vecs` stream.
pub fn read_vecs<T: VecElement, R: Read>(mut reader: R) -> Result<VecSet<T>> {
    let mut offset = 0u64;
    let mut dim: Option<usize> = None;
    let mut data = Vec::new();
    let mut head = [0u8; 4];
    let mut payload = Vec::new();
    loop {
        let got = read_exact_or_eof(&mut reader, &mut head)?;
        if got == 0 {
            break;
        }
        if got < 4 {
            return Err(NvqError::format(offset, "truncated dimension prefix"));
        }
        let d = i32::from_le_bytes(head);
        if d <= 0 {
            return Err(NvqError::format(
                offset,
                format!("non-positive dimension {d}"),
            ));
        }
        let d = d as usize;
        match dim {
            None => dim = Some(d),
            Some(expected) if expected != d => {
                return Err(NvqError::format(
                    offset,
                    format!("dimension {d} differs from {expected} of earlier records"),
                ))
            }
            _ => {}
        }
        offset += 4;
        payload.resize(4 * d, 0);
        let got = read_exact_or_eof(&mut reader, &mut payload)?;
        if got < payload.len() {
            return Err(NvqError::format(
                offset + got as u64,
                format!("truncated record: {got} of {} payload bytes", payload.len()),
            ));
        }
        data.extend(
            payload
                .chunks_exact(4)
                .map(|c| T::from_le([c[0], c[1], c[2], c[3]])),
        );
        offset += payload.len() as u64;
    }
    VecSet::new(dim.unwrap_or(0), data)
}

pub fn write_vecs<T: VecElement, W: Write>(mut writer: W, set: &VecSet<T>) -> Result<()> {
    let prefix = i32::try_from(set.dim())
        .map_err(|_| NvqError::Config(format!("dimension {} too large", set.dim())))?
        .to_le_bytes();
    let mut buf = Vec::with_capacity(4 + 4 * set.dim());
    for row in set.rows().filter(|_| set.dim() > 0) {
        buf.clear();
        buf.extend_from_slice(&prefix);
        for &v in row {
            buf.extend_from_slice(&v.to_le());
        }
        writer.write_all(&buf)?;
    }
    writer.flush()?;
    Ok(())
}

/// Supported vector file layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VecFormat {
    Fvecs,
    Ivecs,
}

impl VecFormat {
    /// Guesses the layout from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "fvecs" => Some(VecFormat::Fvecs),
            "ivecs" => Some(VecFormat::Ivecs),
            _ => None,
        }
    }
}

pub fn read_fvecs(path: impl AsRef<Path>) -> Result<Dataset> {
    read_vecs(BufReader::new(File::open(path)?))
}

pub fn write_fvecs(path: impl AsRef<Path>, set: &Dataset) -> Result<()> {
    write_vecs(BufWriter::new(File::create(path)?), set)
}

pub fn read_ivecs(path: impl AsRef<Path>) -> Result<NeighborLists> {
    read_vecs(BufReader::new(File::open(path)?))
}

pub fn write_ivecs(path: impl AsRef<Path>, set: &NeighborLists) -> Result<()> {
    write_vecs(BufWriter::new(File::create(path)?), set)
}

/// Size in bytes of `n` records of dimension `d`.
pub fn vecs_file_size(d: usize, n: usize) -> u64 {
    (n as u64) * (4 + 4 * d as u64)
}
