//! 8-bit PGM images (both the ASCII `P2` and binary `P5` flavors), mapped
//! to and from `f64` intensities in `[0, 1]`.
//!
//! Reading divides each sample by the file's maxval; writing clamps to
//! `[0, 1]`, quantizes to 255 levels, and emits binary `P5` with
//! `maxval = 255`.  Reading a written file therefore reproduces the
//! quantized values exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    /// Returns the next whitespace-delimited header token, skipping `#`
    /// comments.
    fn next(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }
}

/// Parses a PGM file into intensities in `[0, 1]` (rows x cols).
///
/// Supports `P2` and `P5` with a maxval of at most 255; comments (`#` to
/// end of line) are allowed anywhere in the header.
pub fn read_pgm(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut tokens = Tokens { bytes: &bytes, pos: 0 };

    let token_str = |t: Option<&[u8]>, what: &str| -> Result<String> {
        let t = t.ok_or_else(|| Error::format(path, format!("missing {what} in PGM header")))?;
        std::str::from_utf8(t)
            .map(|s| s.to_owned())
            .map_err(|_| Error::format(path, format!("{what} is not ASCII")))
    };

    let magic = token_str(tokens.next(), "magic number")?;
    let binary = match magic.as_str() {
        "P2" => false,
        "P5" => true,
        other => return Err(Error::format(path, format!("unsupported magic {other:?}"))),
    };

    let parse_dim = |t: String, what: &str| -> Result<usize> {
        t.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::format(path, format!("bad {what}: {t:?}")))
    };
    let width = parse_dim(token_str(tokens.next(), "width")?, "width")?;
    let height = parse_dim(token_str(tokens.next(), "height")?, "height")?;
    let maxval = parse_dim(token_str(tokens.next(), "maxval")?, "maxval")?;
    if maxval > 255 {
        return Err(Error::format(
            path,
            format!("maxval {maxval} exceeds 255; only 8-bit PGM is supported"),
        ));
    }

    let count = width * height;
    let mut samples: Vec<u16> = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the maxval from the raster.
        let start = tokens.pos + 1;
        if bytes.len() < start + count {
            return Err(Error::format(path, "P5 raster is shorter than width*height"));
        }
        samples.extend(bytes[start..start + count].iter().map(|&b| u16::from(b)));
    } else {
        for _ in 0..count {
            let t = token_str(tokens.next(), "pixel")?;
            let v = t
                .parse::<u16>()
                .map_err(|_| Error::format(path, format!("bad pixel value {t:?}")))?;
            samples.push(v);
        }
    }
    for &v in &samples {
        if v as usize > maxval {
            return Err(Error::format(path, format!("pixel value {v} exceeds maxval {maxval}")));
        }
    }

    let scale = 1.0 / maxval as f64;
    Ok(DMatrix::from_row_iterator(
        height,
        width,
        samples.into_iter().map(|v| v as f64 * scale),
    ))
}

/// Quantizes `image` to 8 bits (clamping to `[0, 1]` first) and writes
/// binary `P5` with `maxval = 255`.
pub fn write_pgm(path: &Path, image: &DMatrix<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", image.ncols(), image.nrows())?;
        for i in 0..image.nrows() {
            for j in 0..image.ncols() {
                w.write_all(&[quantize(image[(i, j)])])?;
            }
        }
        w.flush()
    };
    run().map_err(|e| Error::io(path, e))
}

/// Maps an intensity to its 8-bit level: clamp to `[0, 1]`, scale by 255,
/// round to nearest.
pub fn quantize(v: f64) -> u8 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn tmp() -> tempfile::TempDir {
        tempfile::Builder::new().prefix("pgm").tempdir().unwrap()
    }

    #[test]
    fn write_then_read_reproduces_quantized_values() {
        let dir = tmp();
        let path = dir.path().join("a.pgm");
        let img = dmatrix![0.0, 0.5, 1.0; 1.5, -0.25, 0.2];
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(back.nrows(), 2);
        assert_eq!(back.ncols(), 3);
        for (orig, got) in img.iter().zip(back.iter()) {
            let expected = quantize(*orig) as f64 / 255.0;
            assert_eq!(*got, expected);
        }
        // Out-of-range inputs clamp rather than wrap.
        assert_eq!(back[(1, 0)], 1.0);
        assert_eq!(back[(1, 1)], 0.0);
    }

    #[test]
    fn reads_ascii_p2_with_comments() {
        let dir = tmp();
        let path = dir.path().join("a.pgm");
        std::fs::write(&path, "P2 # comment\n# another\n2 2\n255\n0 128\n255 64\n").unwrap();
        let img = read_pgm(&path).unwrap();
        assert_eq!(img[(0, 0)], 0.0);
        assert_eq!(img[(0, 1)], 128.0 / 255.0);
        assert_eq!(img[(1, 0)], 1.0);
        assert_eq!(img[(1, 1)], 64.0 / 255.0);
    }

    #[test]
    fn respects_small_maxval() {
        let dir = tmp();
        let path = dir.path().join("a.pgm");
        std::fs::write(&path, "P2\n1 2\n4\n0 3\n").unwrap();
        let img = read_pgm(&path).unwrap();
        assert_eq!(img[(0, 0)], 0.0);
        assert_eq!(img[(1, 0)], 0.75);
    }

    #[test]
    fn rejects_malformed_headers() {
        let dir = tmp();
        let p = dir.path().join("bad.pgm");
        for content in ["P7\n2 2\n255\n", "P2\n0 2\n255\n", "P2\n2 2\n70000\n", "P2\n2 2\n255\n1 2 3\n"] {
            std::fs::write(&p, content).unwrap();
            assert!(read_pgm(&p).is_err(), "accepted {content:?}");
        }
    }

    #[test]
    fn rejects_short_p5_raster() {
        let dir = tmp();
        let p = dir.path().join("short.pgm");
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        std::fs::write(&p, &bytes).unwrap();
        assert!(read_pgm(&p).is_err());
    }
}
