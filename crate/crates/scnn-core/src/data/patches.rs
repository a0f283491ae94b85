//! Square patch extraction from grayscale images.

use rand::Rng;

use crate::error::{Result, ScnnError};
use crate::tensor::{Matrix, SeededRng};

/// Flattened square patches, one per row (p = side²), with the index of the
/// source image each patch came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSet {
    pub x: Matrix,
    pub side: usize,
    pub source_ids: Vec<usize>,
}

/// Cuts `count` side×side patches at uniform-random top-left positions.
/// Deterministic per seed; source ids are all 0 (see [`merge_patch_sets`]).
pub fn extract_patches(
    image: &Matrix,
    side: usize,
    count: usize,
    rng: &mut SeededRng,
) -> Result<PatchSet> {
    if side == 0 || count == 0 {
        return Err(ScnnError::InvalidParam(
            "patch side and count must be positive".into(),
        ));
    }
    if image.rows() < side || image.cols() < side {
        return Err(ScnnError::InvalidParam(format!(
            "image {}x{} smaller than patch side {side}",
            image.rows(),
            image.cols()
        )));
    }
    let mut data = Vec::with_capacity(count * side * side);
    for _ in 0..count {
        let top = rng.gen_range(0..=image.rows() - side);
        let left = rng.gen_range(0..=image.cols() - side);
        for r in top..top + side {
            data.extend_from_slice(&image.row(r)[left..left + side]);
        }
    }
    Ok(PatchSet {
        x: Matrix::from_vec(count, side * side, data)?,
        side,
        source_ids: vec![0; count],
    })
}

/// Concatenates per-image patch sets, re-labelling source ids by set index.
pub fn merge_patch_sets(sets: &[PatchSet]) -> Result<PatchSet> {
    let Some(first) = sets.first() else {
        return Err(ScnnError::EmptyInput("no patch sets to merge".into()));
    };
    let side = first.side;
    if sets.iter().any(|s| s.side != side) {
        return Err(ScnnError::InvalidParam(
            "patch sets have differing sides".into(),
        ));
    }
    let total: usize = sets.iter().map(|s| s.x.rows()).sum();
    let mut data = Vec::with_capacity(total * side * side);
    let mut source_ids = Vec::with_capacity(total);
    for (idx, set) in sets.iter().enumerate() {
        data.extend_from_slice(set.x.data());
        source_ids.extend(std::iter::repeat(idx).take(set.x.rows()));
    }
    Ok(PatchSet {
        x: Matrix::from_vec(total, side * side, data)?,
        side,
        source_ids,
    })
}
