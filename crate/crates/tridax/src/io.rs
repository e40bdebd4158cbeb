//! Binary mesh files.
//!
//! A file is a 32-byte header followed by raw little-endian scalars in mesh
//! storage order (x fastest, then y, z, batch):
//!
//! | bytes  | field                        |
//! |--------|------------------------------|
//! | 0..8   | magic `TRIDAX01`             |
//! | 8..12  | precision code, 32 or 64     |
//! | 12..16 | batch                        |
//! | 16..28 | x, y, z                      |
//! | 28..32 | reserved, zero               |
//!
//! All header integers are little-endian `u32`. Batches of systems reuse the
//! format with `x = n`, `y = 4` (rows a, b, c, d) and `z = 1`; solutions use
//! `y = 1`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;
use tridax_core::{Dims, Layout, Mesh, MeshError, Precision, Real, SolveError, TridiagonalBatch};

pub const MAGIC: &[u8; 8] = b"TRIDAX01";
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a mesh file (bad magic)")]
    BadMagic,
    #[error("unknown precision code {0}")]
    UnknownPrecision(u32),
    #[error("file holds {found} data, expected {expected}")]
    PrecisionMismatch { expected: Precision, found: Precision },
    #[error("file is truncated or has trailing bytes")]
    Length,
    #[error("reserved header field is not zero")]
    Reserved,
    #[error("header size overflows")]
    Overflow,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid batch: {0}")]
    Batch(#[from] SolveError),
    #[error("batch file must have y = 4 and z = 1, found y = {y}, z = {z}")]
    NotABatch { y: u32, z: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub precision: Precision,
    pub batch: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Header {
    pub fn dims(&self) -> Dims {
        Dims::new(self.x as usize, self.y as usize, self.z as usize)
    }

    pub fn scalars(&self) -> Option<usize> {
        (self.batch as usize)
            .checked_mul(self.x as usize)?
            .checked_mul(self.y as usize)?
            .checked_mul(self.z as usize)
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..8].copy_from_slice(MAGIC);
        let fields = [self.precision.code(), self.batch, self.x, self.y, self.z, 0];
        for (k, f) in fields.iter().enumerate() {
            out[8 + 4 * k..12 + 4 * k].copy_from_slice(&f.to_le_bytes());
        }
        out
    }

    pub fn parse(bytes: &[u8; HEADER_LEN]) -> Result<Self, FormatError> {
        if &bytes[..8] != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let field = |k: usize| u32::from_le_bytes(bytes[8 + 4 * k..12 + 4 * k].try_into().unwrap());
        let code = field(0);
        let precision = Precision::from_code(code).ok_or(FormatError::UnknownPrecision(code))?;
        if field(5) != 0 {
            return Err(FormatError::Reserved);
        }
        Ok(Self {
            precision,
            batch: field(1),
            x: field(2),
            y: field(3),
            z: field(4),
        })
    }
}

/// A mesh of either precision, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMesh {
    F32(Mesh<f32>),
    F64(Mesh<f64>),
}

impl AnyMesh {
    pub fn precision(&self) -> Precision {
        match self {
            AnyMesh::F32(_) => Precision::Fp32,
            AnyMesh::F64(_) => Precision::Fp64,
        }
    }
}

fn to_u32(v: usize) -> Result<u32, FormatError> {
    u32::try_from(v).map_err(|_| FormatError::Overflow)
}

fn header_of<T: Real>(dims: Dims, batch: usize) -> Result<Header, FormatError> {
    Ok(Header {
        precision: T::PRECISION,
        batch: to_u32(batch)?,
        x: to_u32(dims.x)?,
        y: to_u32(dims.y)?,
        z: to_u32(dims.z)?,
    })
}

fn encode<T: Real>(header: &Header, data: &[T]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() * T::PRECISION.word_bytes());
    out.extend_from_slice(&header.to_bytes());
    for v in data {
        v.write_le(&mut out);
    }
    out
}

pub fn encode_mesh<T: Real>(mesh: &Mesh<T>) -> Result<Vec<u8>, FormatError> {
    let header = header_of::<T>(mesh.dims(), mesh.batch())?;
    Ok(encode(&header, mesh.data()))
}

pub fn write_mesh<T: Real, W: Write>(mut w: W, mesh: &Mesh<T>) -> Result<(), FormatError> {
    w.write_all(&encode_mesh(mesh)?)?;
    Ok(())
}

fn decode_body<T: Real>(header: &Header, body: &[u8]) -> Result<Mesh<T>, FormatError> {
    let count = header.scalars().ok_or(FormatError::Overflow)?;
    let word = T::PRECISION.word_bytes();
    if body.len() != count * word {
        return Err(FormatError::Length);
    }
    let data = body.chunks_exact(word).map(T::read_le).collect();
    Ok(Mesh::from_vec(header.dims(), header.batch as usize, data)?)
}

fn split_header(bytes: &[u8]) -> Result<(Header, &[u8]), FormatError> {
    if bytes.len() < HEADER_LEN {
        return Err(if bytes.len() >= 8 && &bytes[..8] != MAGIC {
            FormatError::BadMagic
        } else {
            FormatError::Length
        });
    }
    let header = Header::parse(bytes[..HEADER_LEN].try_into().unwrap())?;
    Ok((header, &bytes[HEADER_LEN..]))
}

pub fn decode_mesh(bytes: &[u8]) -> Result<AnyMesh, FormatError> {
    let (header, body) = split_header(bytes)?;
    Ok(match header.precision {
        Precision::Fp32 => AnyMesh::F32(decode_body(&header, body)?),
        Precision::Fp64 => AnyMesh::F64(decode_body(&header, body)?),
    })
}

/// Decodes a mesh stored in precision `T`.
pub fn decode_mesh_as<T: Real>(bytes: &[u8]) -> Result<Mesh<T>, FormatError> {
    let (header, body) = split_header(bytes)?;
    if header.precision != T::PRECISION {
        return Err(FormatError::PrecisionMismatch {
            expected: T::PRECISION,
            found: header.precision,
        });
    }
    decode_body(&header, body)
}

pub fn read_mesh<R: Read>(mut r: R) -> Result<AnyMesh, FormatError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_mesh(&bytes)
}

/// Encodes a batch as `B` meshes of `n × 4` (rows a, b, c, d).
pub fn encode_batch<T: Real>(batch: &TridiagonalBatch<T>) -> Result<Vec<u8>, FormatError> {
    let n = batch.system_len();
    let header = header_of::<T>(Dims::new(n, 4, 1), batch.count())?;
    let mut data = Vec::with_capacity(4 * n * batch.count());
    for s in 0..batch.count() {
        let sys = batch.system(s);
        for row in [sys.a(), sys.b(), sys.c(), sys.d()] {
            data.extend_from_slice(row);
        }
    }
    Ok(encode(&header, &data))
}

/// Decodes a batch file into a system-major batch.
pub fn decode_batch<T: Real>(bytes: &[u8]) -> Result<TridiagonalBatch<T>, FormatError> {
    let mesh = decode_mesh_as::<T>(bytes)?;
    let dims = mesh.dims();
    if dims.y != 4 || dims.z != 1 {
        return Err(FormatError::NotABatch {
            y: dims.y as u32,
            z: dims.z as u32,
        });
    }
    let (n, count) = (dims.x, mesh.batch());
    let mut rows: [Vec<T>; 4] = Default::default();
    for sys in mesh.data().chunks_exact(4 * n) {
        for (r, row) in rows.iter_mut().zip(sys.chunks_exact(n)) {
            r.extend_from_slice(row);
        }
    }
    let [a, b, c, d] = rows;
    Ok(TridiagonalBatch::from_raw(count, n, Layout::SystemMajor, a, b, c, d)?)
}

/// Encodes `B` solutions of length `n` as `n × 1` meshes.
pub fn encode_solutions<T: Real>(solutions: &[Vec<T>]) -> Result<Vec<u8>, FormatError> {
    let n = solutions.first().map_or(0, Vec::len);
    if n == 0 || solutions.iter().any(|s| s.len() != n) {
        return Err(FormatError::Mesh(MeshError::ShapeMismatch));
    }
    let header = header_of::<T>(Dims::new(n, 1, 1), solutions.len())?;
    let data: Vec<T> = solutions.concat();
    Ok(encode(&header, &data))
}

/// Writes `bytes` to `path` through a temporary sibling so a failed write
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = Path::new(&tmp);
    let result = fs::write(tmp, bytes).and_then(|_| fs::rename(tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(tmp);
    }
    result
}
