//! Binary PGM (P5) reader. ASCII P2 and 16-bit images are out of scope;
//! convert externally.

use std::fs;
use std::path::Path;

use crate::error::{Result, ScnnError};
use crate::tensor::Matrix;

/// Loads a binary P5 image with maxval ≤ 255 as a rows×cols matrix scaled
/// to [0, 1]. Comment lines (`#` to end of line) in the header are skipped.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<Matrix> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.len() < 2 {
        return Err(ScnnError::Truncated {
            offset: 0,
            what: "PGM magic".into(),
        });
    }
    if &bytes[..2] != b"P5" {
        let found = String::from_utf8_lossy(&bytes[..2]).into_owned();
        return Err(ScnnError::UnsupportedFormat(format!(
            "expected binary PGM magic P5, found {found:?}"
        )));
    }
    let mut offset = 2;
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        *slot = read_header_number(&bytes, &mut offset)?;
    }
    let [width, height, maxval] = header;
    if maxval == 0 || maxval > 255 {
        return Err(ScnnError::UnsupportedFormat(format!(
            "PGM maxval {maxval} unsupported (need 1..=255)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(ScnnError::EmptyInput(format!(
            "PGM declares {width}x{height} pixels"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if offset >= bytes.len() || !bytes[offset].is_ascii_whitespace() {
        return Err(ScnnError::MalformedData(
            "PGM header not terminated by whitespace".into(),
        ));
    }
    offset += 1;
    let count = width * height;
    if offset + count > bytes.len() {
        return Err(ScnnError::Truncated {
            offset: bytes.len(),
            what: format!(
                "PGM raster needs {count} bytes starting at {offset}, file has {}",
                bytes.len()
            ),
        });
    }
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = bytes[offset..offset + count]
        .iter()
        .map(|&b| b as f64 * scale)
        .collect();
    Matrix::from_vec(height, width, data)
}

fn read_header_number(bytes: &[u8], offset: &mut usize) -> Result<usize> {
    // skip whitespace and comments
    loop {
        while *offset < bytes.len() && bytes[*offset].is_ascii_whitespace() {
            *offset += 1;
        }
        if *offset < bytes.len() && bytes[*offset] == b'#' {
            while *offset < bytes.len() && bytes[*offset] != b'\n' {
                *offset += 1;
            }
        } else {
            break;
        }
    }
    let start = *offset;
    while *offset < bytes.len() && bytes[*offset].is_ascii_digit() {
        *offset += 1;
    }
    if start == *offset {
        return Err(ScnnError::Truncated {
            offset: start,
            what: "PGM header number".into(),
        });
    }
    let text = std::str::from_utf8(&bytes[start..*offset]).expect("digits");
    text.parse::<usize>()
        .map_err(|_| ScnnError::MalformedData(format!("PGM header number {text} out of range")))
}
