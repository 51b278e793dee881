//! Binary Netpbm I/O: PGM (P5) for gray images and PBM (P4) for binary images.
//!
//! PBM stores a set bit for "black"; foreground pixels are written as set bits so
//! a round trip reproduces the raster exactly.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

pub fn write_pgm<W: Write>(img: &GrayImage, mut w: W) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.data())?;
    w.flush()?;
    Ok(())
}

pub fn write_pbm<W: Write>(img: &BinaryImage, mut w: W) -> Result<()> {
    write!(w, "P4\n{} {}\n", img.width(), img.height())?;
    let row_bytes = img.width().div_ceil(8);
    let mut row = vec![0u8; row_bytes];
    for y in 0..img.height() {
        row.fill(0);
        for x in 0..img.width() {
            if img.get(x, y) {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pgm<R: Read>(r: R) -> Result<GrayImage> {
    let mut r = BufReader::new(r);
    expect_magic(&mut r, b"P5")?;
    let width = read_header_uint(&mut r)?;
    let height = read_header_uint(&mut r)?;
    let maxval = read_header_uint(&mut r)?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    let mut data = vec![0u8; width * height];
    r.read_exact(&mut data)
        .map_err(|e| Error::Format(format!("truncated PGM raster: {e}")))?;
    if data.iter().any(|&v| v as usize > maxval) {
        return Err(Error::Format("PGM sample exceeds maxval".into()));
    }
    GrayImage::from_vec(width, height, data)
}

pub fn read_pbm<R: Read>(r: R) -> Result<BinaryImage> {
    let mut r = BufReader::new(r);
    expect_magic(&mut r, b"P4")?;
    let width = read_header_uint(&mut r)?;
    let height = read_header_uint(&mut r)?;
    let row_bytes = width.div_ceil(8);
    let mut raw = vec![0u8; row_bytes * height];
    r.read_exact(&mut raw)
        .map_err(|e| Error::Format(format!("truncated PBM raster: {e}")))?;
    let mut data = vec![0u8; width * height];
    for y in 0..height {
        for x in 0..width {
            let byte = raw[y * row_bytes + x / 8];
            data[y * width + x] = (byte >> (7 - (x % 8))) & 1;
        }
    }
    BinaryImage::from_vec(width, height, data)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_pgm(img, std::io::BufWriter::new(f))
}

pub fn save_pbm(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_pbm(img, std::io::BufWriter::new(f))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    read_pgm(std::fs::File::open(path)?)
}

pub fn load_pbm(path: impl AsRef<Path>) -> Result<BinaryImage> {
    read_pbm(std::fs::File::open(path)?)
}

fn expect_magic<R: BufRead>(r: &mut R, magic: &[u8; 2]) -> Result<()> {
    let mut m = [0u8; 2];
    r.read_exact(&mut m)
        .map_err(|_| Error::Format("missing magic number".into()))?;
    if &m != magic {
        return Err(Error::Format(format!(
            "expected magic {}, found {}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&m)
        )));
    }
    Ok(())
}

/// Reads one whitespace-delimited header integer, skipping `#` comments. Consumes
/// exactly one whitespace byte after the number, as the format requires before the raster.
fn read_header_uint<R: BufRead>(r: &mut R) -> Result<usize> {
    let mut byte = [0u8; 1];
    // skip whitespace and comments
    loop {
        r.read_exact(&mut byte)
            .map_err(|_| Error::Format("truncated header".into()))?;
        match byte[0] {
            b'#' => {
                let mut line = Vec::new();
                r.read_until(b'\n', &mut line)?;
            }
            b if b.is_ascii_whitespace() => {}
            _ => break,
        }
    }
    let mut value: usize = 0;
    loop {
        if !byte[0].is_ascii_digit() {
            return Err(Error::Format(format!("unexpected byte {:#04x} in header", byte[0])));
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((byte[0] - b'0') as usize))
            .ok_or_else(|| Error::Format("header value overflow".into()))?;
        r.read_exact(&mut byte)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if byte[0].is_ascii_whitespace() {
            return Ok(value);
        }
    }
}
