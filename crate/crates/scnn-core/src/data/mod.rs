//! Dataset ingestion, preprocessing, corruption operators, synthetic data
//! generation, and binary serialization of models and matrices.

mod idx;
mod patches;
mod pgm;
mod preprocess;
mod serialize;
mod synth;

pub use idx::{load_idx, load_idx_images, load_idx_labels, save_idx_images, save_idx_labels};
pub use patches::{extract_patches, merge_patch_sets, PatchSet};
pub use pgm::load_pgm;
pub use preprocess::{
    add_gaussian_noise, center_rows, corrupt_missing, downsample_rows, remap_pixels,
    CorruptionMask, RemapReport,
};
pub use serialize::{load_matrix, load_model, save_matrix, save_model};
pub use synth::{gen_digit_dataset, gen_images, render_digit};

use crate::tensor::Matrix;

/// Signals with class labels in 0..=9.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub x: Matrix,
    pub labels: Vec<u8>,
}

impl LabeledDataset {
    /// Rows `range` of the dataset as a new dataset.
    pub fn slice(&self, start: usize, len: usize) -> LabeledDataset {
        assert!(start + len <= self.x.rows(), "slice out of range");
        let cols = self.x.cols();
        let mut data = Vec::with_capacity(len * cols);
        for r in start..start + len {
            data.extend_from_slice(self.x.row(r));
        }
        LabeledDataset {
            x: Matrix::from_vec(len, cols, data).expect("finite slice"),
            labels: self.labels[start..start + len].to_vec(),
        }
    }
}
