//! PFM (grayscale `Pf`) and binary PGM (`P5`, 8 or 16 bit) rasters.
//!
//! PFM stores rows bottom to top; a negative scale means little-endian
//! samples. PGM samples wider than 8 bits are big-endian. Images read from
//! PGM are scaled to `[0, 1]` by the header's maxval.

use std::fs;
use std::path::Path;

use evw::ImageGrid;

use crate::error::{CliError, Result};

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Splits whitespace-separated header tokens off the front of a netpbm-style
/// file. `#` comments run to end of line. Exactly one whitespace byte
/// separates the last token from the payload.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Header { bytes, pos: 0 }
    }

    fn token(&mut self) -> Option<&'a str> {
        loop {
            match self.bytes.get(self.pos)? {
                b'#' => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str, path: &Path) -> Result<T> {
        self.token()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CliError::invalid(format!("{}: bad or missing {what}", path.display())))
    }

    fn payload(mut self) -> &'a [u8] {
        self.pos += 1;
        self.bytes.get(self.pos..).unwrap_or(&[])
    }
}

fn check_size(path: &Path, payload: &[u8], needed: usize) -> Result<()> {
    if payload.len() < needed {
        return Err(CliError::invalid(format!(
            "{}: truncated, {} of {needed} payload bytes",
            path.display(),
            payload.len()
        )));
    }
    Ok(())
}

pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<ImageGrid> {
    let mut h = Header::new(bytes);
    match h.token() {
        Some("Pf") => {}
        Some("PF") => {
            return Err(CliError::invalid(format!(
                "{}: color PFM is not supported",
                path.display()
            )))
        }
        _ => {
            return Err(CliError::invalid(format!(
                "{}: not a PFM file",
                path.display()
            )))
        }
    }
    let width: usize = h.number("width", path)?;
    let height: usize = h.number("height", path)?;
    let scale: f64 = h.number("scale", path)?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(CliError::invalid(format!(
            "{}: bad scale {scale}",
            path.display()
        )));
    }
    let payload = h.payload();
    check_size(path, payload, width * height * 4)?;
    let mut data = vec![0.0; width * height];
    for (i, chunk) in payload.chunks_exact(4).take(width * height).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if scale < 0.0 {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (file_row, col) = (i / width, i % width);
        data[(height - 1 - file_row) * width + col] = v as f64;
    }
    ImageGrid::new(height, width, data)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn encode_pfm(img: &ImageGrid) -> Vec<u8> {
    let (h, w) = (img.height(), img.width());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(h * w * 4);
    for row in (0..h).rev() {
        for col in 0..w {
            out.extend_from_slice(&(img.get(row, col) as f32).to_le_bytes());
        }
    }
    out
}

/// Raw samples and maxval of a P5 file, row-major top to bottom.
pub fn decode_pgm_raw(bytes: &[u8], path: &Path) -> Result<(usize, usize, u16, Vec<u16>)> {
    let mut h = Header::new(bytes);
    if h.token() != Some("P5") {
        return Err(CliError::invalid(format!(
            "{}: not a binary PGM file",
            path.display()
        )));
    }
    let width: usize = h.number("width", path)?;
    let height: usize = h.number("height", path)?;
    let maxval: u16 = h.number("maxval", path)?;
    if maxval == 0 {
        return Err(CliError::invalid(format!(
            "{}: maxval must be positive",
            path.display()
        )));
    }
    let payload = h.payload();
    let n = width * height;
    let samples = if maxval < 256 {
        check_size(path, payload, n)?;
        payload[..n].iter().map(|&b| b as u16).collect()
    } else {
        check_size(path, payload, 2 * n)?;
        payload[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    Ok((height, width, maxval, samples))
}

pub fn encode_pgm(height: usize, width: usize, maxval: u16, samples: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n{maxval}\n").into_bytes();
    if maxval < 256 {
        out.extend(samples.iter().map(|&s| s as u8));
    } else {
        out.extend(samples.iter().flat_map(|s| s.to_be_bytes()));
    }
    out
}

/// Reads a PFM or PGM image, chosen by magic number.
pub fn read_image(path: &Path) -> Result<ImageGrid> {
    let bytes = read_file(path)?;
    match bytes.get(..2) {
        Some(b"Pf") | Some(b"PF") => decode_pfm(&bytes, path),
        Some(b"P5") => {
            let (h, w, maxval, samples) = decode_pgm_raw(&bytes, path)?;
            let scale = maxval as f64;
            ImageGrid::new(h, w, samples.iter().map(|&s| s as f64 / scale).collect())
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
        }
        _ => Err(CliError::invalid(format!(
            "{}: unrecognized image format (expected PFM or binary PGM)",
            path.display()
        ))),
    }
}

/// Writes PFM, or a 16-bit PGM of the values clamped to `[0, 1]` when the
/// path ends in `.pgm`.
pub fn write_image(path: &Path, img: &ImageGrid) -> Result<()> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let samples: Vec<u16> = img
            .data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
            .collect();
        write_file(
            path,
            &encode_pgm(img.height(), img.width(), 65535, &samples),
        )
    } else {
        write_file(path, &encode_pfm(img))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfm_roundtrip_and_orientation() {
        let img = ImageGrid::from_fn(3, 4, |r, c| (r * 10 + c) as f64 + 0.5);
        let bytes = encode_pfm(&img);
        assert!(bytes.starts_with(b"Pf\n4 3\n-1.0\n"));
        // First stored row is the bottom one.
        let first = f32::from_le_bytes(bytes[12..16].try_into().unwrap());
        assert_eq!(first, 20.5);
        assert_eq!(decode_pfm(&bytes, Path::new("x")).unwrap(), img);
    }

    #[test]
    fn pfm_big_endian_and_comments() {
        let mut bytes = b"Pf\n# note\n2 1\n1.0\n".to_vec();
        bytes.extend(1.5f32.to_be_bytes());
        bytes.extend((-2.0f32).to_be_bytes());
        let img = decode_pfm(&bytes, Path::new("x")).unwrap();
        assert_eq!(img.data(), &[1.5, -2.0]);
    }

    #[test]
    fn pfm_rejects_truncated_and_color() {
        let mut bytes = encode_pfm(&ImageGrid::zeros(2, 2));
        bytes.pop();
        assert!(decode_pfm(&bytes, Path::new("x")).is_err());
        assert!(decode_pfm(b"PF\n1 1\n-1.0\n\0\0\0\0\0\0\0\0\0\0\0\0", Path::new("x")).is_err());
    }

    #[test]
    fn pgm_8_and_16_bit() {
        let bytes = encode_pgm(1, 3, 255, &[0, 128, 255]);
        assert_eq!(&bytes[..11], b"P5\n3 1\n255\n");
        assert_eq!(
            decode_pgm_raw(&bytes, Path::new("x")).unwrap().3,
            vec![0, 128, 255]
        );
        let bytes = encode_pgm(1, 2, 65535, &[258, 65535]);
        assert_eq!(&bytes[bytes.len() - 4..], &[1, 2, 255, 255]);
        assert_eq!(
            decode_pgm_raw(&bytes, Path::new("x")).unwrap().3,
            vec![258, 65535]
        );
    }
}
