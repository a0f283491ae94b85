//! IDX file format: big-endian, image magic 0x00000803, label magic
//! 0x00000801. Pixel bytes are kept as raw 0-255 values; range remapping is
//! a separate, explicit pipeline step.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::LabeledDataset;
use crate::error::{Result, ScnnError};
use crate::tensor::Matrix;

pub(crate) const IMAGE_MAGIC: u32 = 0x0000_0803;
pub(crate) const LABEL_MAGIC: u32 = 0x0000_0801;

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, offset: 0 }
    }

    fn read_u32(&mut self, what: &str) -> Result<u32> {
        if self.offset + 4 > self.bytes.len() {
            return Err(ScnnError::Truncated {
                offset: self.offset,
                what: format!("expected 4 bytes for {what}"),
            });
        }
        let v = u32::from_be_bytes(
            self.bytes[self.offset..self.offset + 4]
                .try_into()
                .expect("4 bytes"),
        );
        self.offset += 4;
        Ok(v)
    }

    fn read_bytes(&mut self, count: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + count > self.bytes.len() {
            return Err(ScnnError::Truncated {
                offset: self.offset,
                what: format!("expected {count} bytes for {what}"),
            });
        }
        let s = &self.bytes[self.offset..self.offset + count];
        self.offset += count;
        Ok(s)
    }
}

/// Parses an IDX image file into an N×(rows·cols) matrix of raw 0-255
/// values, one flattened image per row.
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Matrix> {
    let bytes = fs::read(path.as_ref())?;
    let mut cur = Cursor::new(&bytes);
    let magic = cur.read_u32("image magic")?;
    if magic != IMAGE_MAGIC {
        return Err(ScnnError::BadMagic {
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let n = cur.read_u32("image count")? as usize;
    let rows = cur.read_u32("image rows")? as usize;
    let cols = cur.read_u32("image cols")? as usize;
    if n == 0 || rows == 0 || cols == 0 {
        return Err(ScnnError::EmptyInput(format!(
            "IDX image file declares {n} images of {rows}x{cols}"
        )));
    }
    let pixels = cur.read_bytes(n * rows * cols, "pixel data")?;
    let data: Vec<f64> = pixels.iter().map(|&b| b as f64).collect();
    Matrix::from_vec(n, rows * cols, data)
}

/// Parses an IDX label file.
pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let bytes = fs::read(path.as_ref())?;
    let mut cur = Cursor::new(&bytes);
    let magic = cur.read_u32("label magic")?;
    if magic != LABEL_MAGIC {
        return Err(ScnnError::BadMagic {
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let n = cur.read_u32("label count")? as usize;
    let labels = cur.read_bytes(n, "label data")?.to_vec();
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(ScnnError::MalformedData(format!(
            "label {bad} outside the digit range 0..=9"
        )));
    }
    Ok(labels)
}

/// Loads a matching image/label file pair.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<LabeledDataset> {
    let x = load_idx_images(images_path)?;
    let labels = load_idx_labels(labels_path)?;
    if x.rows() != labels.len() {
        return Err(ScnnError::CountMismatch {
            images: x.rows(),
            labels: labels.len(),
        });
    }
    Ok(LabeledDataset { x, labels })
}

/// Writes an IDX image file; matrix values are rounded and clamped to
/// 0-255. Each row must hold one `rows`×`cols` image.
pub fn save_idx_images(path: impl AsRef<Path>, x: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if x.cols() != rows * cols {
        return Err(ScnnError::InvalidParam(format!(
            "matrix has {} columns, expected {rows}x{cols}={}",
            x.cols(),
            rows * cols
        )));
    }
    let mut out = Vec::with_capacity(16 + x.rows() * x.cols());
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(x.rows() as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    for &v in x.data() {
        out.push(v.round().clamp(0.0, 255.0) as u8);
    }
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}

/// Writes an IDX label file.
pub fn save_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}
