//! Binary file formats.
//!
//! `.t3` tensor file:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `T3R1` |
//! | 1 | version, `1` |
//! | 24 | `n1, n2, n3` as little-endian `u64` |
//! | 8 n | entries as little-endian `f64`, storage order |
//!
//! `.om` mask file: magic `OMG1`, `n1, n2, n3` as little-endian `u64`, `p`
//! as little-endian `f64`, seed as little-endian `u64`, then the observation
//! flags in storage order packed eight per byte, least significant bit
//! first. Unused bits of the last byte are zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sensing::SampleMask;
use crate::tensor::{Dims, Tensor3};

const T3_MAGIC: &[u8; 4] = b"T3R1";
const T3_VERSION: u8 = 1;
const OM_MAGIC: &[u8; 4] = b"OMG1";

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_dims(r: &mut impl Read) -> Result<Dims> {
    let mut next = || -> Result<usize> {
        usize::try_from(read_u64(r)?).map_err(|_| Error::Format("dimension exceeds usize".into()))
    };
    let (n1, n2, n3) = (next()?, next()?, next()?);
    Dims::new(n1, n2, n3)
}

fn write_dims(w: &mut impl Write, dims: Dims) -> Result<()> {
    for n in [dims.n1, dims.n2, dims.n3] {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    Ok(())
}

fn expect_magic(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let mut got = [0u8; 4];
    r.read_exact(&mut got)?;
    if &got != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&got),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Ok(())
}

pub fn write_t3(w: &mut impl Write, t: &Tensor3) -> Result<()> {
    w.write_all(T3_MAGIC)?;
    w.write_all(&[T3_VERSION])?;
    write_dims(w, t.dims())?;
    for v in t.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_t3(r: &mut impl Read) -> Result<Tensor3> {
    expect_magic(r, T3_MAGIC)?;
    let mut version = [0u8; 1];
    r.read_exact(&mut version)?;
    if version[0] != T3_VERSION {
        return Err(Error::Format(format!("unsupported .t3 version {}", version[0])));
    }
    let dims = read_dims(r)?;
    let mut data = vec![0.0; dims.len()];
    let mut b = [0u8; 8];
    for v in &mut data {
        r.read_exact(&mut b)?;
        *v = f64::from_le_bytes(b);
    }
    expect_eof(r)?;
    Tensor3::from_vec(dims, data)
}

pub fn save_t3(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_t3(&mut w, t)?;
    w.flush()?;
    Ok(())
}

pub fn load_t3(path: impl AsRef<Path>) -> Result<Tensor3> {
    read_t3(&mut BufReader::new(File::open(path)?))
}

pub fn write_mask(w: &mut impl Write, mask: &SampleMask) -> Result<()> {
    w.write_all(OM_MAGIC)?;
    write_dims(w, mask.dims())?;
    w.write_all(&mask.p().to_le_bytes())?;
    w.write_all(&mask.seed().to_le_bytes())?;
    let mut packed = vec![0u8; mask.flags().len().div_ceil(8)];
    for (t, _) in mask.flags().iter().enumerate().filter(|(_, &o)| o) {
        packed[t / 8] |= 1 << (t % 8);
    }
    w.write_all(&packed)?;
    Ok(())
}

pub fn read_mask(r: &mut impl Read) -> Result<SampleMask> {
    expect_magic(r, OM_MAGIC)?;
    let dims = read_dims(r)?;
    let p = f64::from_le_bytes(read_u64(r)?.to_le_bytes());
    let seed = read_u64(r)?;
    let mut packed = vec![0u8; dims.len().div_ceil(8)];
    r.read_exact(&mut packed)?;
    expect_eof(r)?;
    let len = dims.len();
    if len % 8 != 0 && packed[len / 8] >> (len % 8) != 0 {
        return Err(Error::Format("padding bits of mask are not zero".into()));
    }
    let flags = (0..len).map(|t| packed[t / 8] >> (t % 8) & 1 == 1).collect();
    SampleMask::from_flags(dims, p, seed, flags)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &SampleMask) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mask(&mut w, mask)?;
    w.flush()?;
    Ok(())
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<SampleMask> {
    read_mask(&mut BufReader::new(File::open(path)?))
}
