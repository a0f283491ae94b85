//! Binary model and matrix containers. Model layout (all little-endian):
//! magic "SCNN", version u32, p u32, m u32, lambda f64, reconstruction
//! dictionary (p·m f64, row-major), projection dictionary (m·p f64,
//! row-major). Matrix files use magic "SCNM", version, rows, cols, data.
//! Save followed by load is a bitwise identity.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Result, ScnnError};
use crate::model::ScnnModel;
use crate::tensor::Matrix;

const MODEL_MAGIC: &[u8; 4] = b"SCNN";
const MATRIX_MAGIC: &[u8; 4] = b"SCNM";
const VERSION: u32 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, count: usize, what: &str) -> Result<&'a [u8]> {
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

    fn read_u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    fn read_f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }

    fn read_f64_vec(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let raw = self.take(count * 8, what)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn check_magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let found: [u8; 4] = self.take(4, "magic")?.try_into().expect("4 bytes");
        if &found != expected {
            return Err(ScnnError::BadMagic {
                expected: u32::from_le_bytes(*expected),
                found: u32::from_le_bytes(found),
            });
        }
        Ok(())
    }

    fn check_version(&mut self) -> Result<()> {
        let found = self.read_u32("version")?;
        if found != VERSION {
            return Err(ScnnError::UnsupportedVersion {
                expected: VERSION,
                found,
            });
        }
        Ok(())
    }
}

fn push_matrix(out: &mut Vec<u8>, m: &Matrix) {
    for &v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &ScnnModel) -> Result<()> {
    let p = model.signal_dim();
    let m = model.atom_count();
    let mut out = Vec::with_capacity(24 + 16 * p * m);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(p as u32).to_le_bytes());
    out.extend_from_slice(&(m as u32).to_le_bytes());
    out.extend_from_slice(&model.lambda().to_le_bytes());
    push_matrix(&mut out, model.reconstruction());
    push_matrix(&mut out, model.projection());
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ScnnModel> {
    let bytes = fs::read(path.as_ref())?;
    let mut r = Reader {
        bytes: &bytes,
        offset: 0,
    };
    r.check_magic(MODEL_MAGIC)?;
    r.check_version()?;
    let p = r.read_u32("signal dim")? as usize;
    let m = r.read_u32("atom count")? as usize;
    let lambda = r.read_f64("lambda")?;
    let reconstruction = Matrix::from_vec(p, m, r.read_f64_vec(p * m, "reconstruction")?)?;
    let projection = Matrix::from_vec(m, p, r.read_f64_vec(m * p, "projection")?)?;
    ScnnModel::new(reconstruction, projection, lambda)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let mut out = Vec::with_capacity(16 + 8 * m.data().len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    push_matrix(&mut out, m);
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let bytes = fs::read(path.as_ref())?;
    let mut r = Reader {
        bytes: &bytes,
        offset: 0,
    };
    r.check_magic(MATRIX_MAGIC)?;
    r.check_version()?;
    let rows = r.read_u32("rows")? as usize;
    let cols = r.read_u32("cols")? as usize;
    Matrix::from_vec(rows, cols, r.read_f64_vec(rows * cols, "matrix data")?)
}
