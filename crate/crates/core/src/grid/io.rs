//! Signal file formats.
//!
//! `SGRID` files start with one ASCII header line
//! `SGRID d origin... side_lengths... samples...` followed by the samples as
//! little-endian `f64` pairs `(re, im)` in row-major order. Grayscale binary
//! PGM (`P5`, maxval up to 255) images are read onto the unit plate with pixel
//! values scaled to `[0,1]`; rows map to axis 0.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Plate, SignalGrid};
use crate::error::{Error, Result};

pub fn write_sgrid<W: Write>(signal: &SignalGrid, mut out: W) -> std::io::Result<()> {
    let plate = signal.plate();
    let mut header = format!("SGRID {}", plate.dim());
    for v in plate.origin().iter().chain(plate.side_lengths()) {
        header.push_str(&format!(" {v:?}"));
    }
    for n in plate.samples() {
        header.push_str(&format!(" {n}"));
    }
    header.push('\n');
    out.write_all(header.as_bytes())?;
    for v in signal.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sgrid<R: BufRead>(mut input: R) -> Result<SignalGrid> {
    let bad = |message: String| Error::Format {
        format: "SGRID",
        message,
    };
    let mut header = String::new();
    input.read_line(&mut header).map_err(|e| bad(e.to_string()))?;
    let mut tokens = header.split_ascii_whitespace();
    if tokens.next() != Some("SGRID") {
        return Err(bad("missing SGRID magic".into()));
    }
    let d: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("missing dimension".into()))?;
    if !(1..=2).contains(&d) {
        return Err(bad(format!("unsupported dimension {d}")));
    }
    let mut reals = |count: usize, what: &str| -> Result<Vec<f64>> {
        (0..count)
            .map(|_| {
                tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad(format!("bad {what} field")))
            })
            .collect()
    };
    let origin = reals(d, "origin")?;
    let sides = reals(d, "side length")?;
    let samples: Vec<usize> = reals(d, "sample count")?.into_iter().map(|v| v as usize).collect();
    let plate = Plate::new(origin, sides, samples)?;

    let n = plate.sample_count();
    let mut bytes = vec![0u8; n * 16];
    input.read_exact(&mut bytes).map_err(|e| bad(format!("payload: {e}")))?;
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    SignalGrid::new(plate, values)
}

pub fn save_sgrid(signal: &SignalGrid, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_sgrid(signal, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_sgrid(path: &Path) -> Result<SignalGrid> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sgrid(BufReader::new(file))
}

/// Parse a binary PGM image onto `[0,1]^2`.
pub fn read_pgm<R: Read>(mut input: R) -> Result<SignalGrid> {
    let bad = |message: &str| Error::Format {
        format: "PGM",
        message: message.to_string(),
    };
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| bad(&e.to_string()))?;

    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments
        while pos < bytes.len() {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(bad("only binary P5 images are supported"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("non-numeric header field"));
    let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if !(1..=255).contains(&maxval) {
        return Err(bad("maxval must be between 1 and 255"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes
        .get(pos..pos + width * height)
        .ok_or_else(|| bad("truncated raster"))?;
    let scale = maxval as f64;
    let values: Vec<f64> = raster.iter().map(|&b| b as f64 / scale).collect();
    SignalGrid::from_real(Plate::unit(&[height, width])?, &values)
}

pub fn load_pgm(path: &Path) -> Result<SignalGrid> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_pgm(BufReader::new(file))
}

/// Load a PGM or SGRID file, choosing by magic bytes.
pub fn load_signal(path: &Path) -> Result<SignalGrid> {
    let mut head = [0u8; 2];
    File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .map_err(|e| Error::io(path, e))?;
    if &head == b"P5" {
        load_pgm(path)
    } else {
        load_sgrid(path)
    }
}
