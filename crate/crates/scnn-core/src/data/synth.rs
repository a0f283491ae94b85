//! Synthetic data generators, for fixtures and self-contained experiment
//! runs: smooth random image fields with a 1/f-style spectrum (stand-ins
//! for natural-image patch sources) and seven-segment style digit
//! renderings with jitter and noise (stand-ins for handwritten digits).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::LabeledDataset;
use crate::tensor::{Matrix, SeededRng};

/// Natural-image-like random field in [0, 1]: oriented sinusoids with a
/// 1/f amplitude falloff across the full frequency band, a few soft step
/// edges, and a little sensor noise, min-max normalized.
pub fn gen_image(size: usize, rng: &mut SeededRng) -> Matrix {
    assert!(size >= 4, "image too small");
    let waves = 48;
    let params: Vec<(f64, f64, f64, f64)> = (0..waves)
        .map(|_| {
            let freq = rng.gen_range(1.0..=size as f64 / 2.2);
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            (freq, theta.cos(), theta.sin(), phase)
        })
        .collect();
    // soft step edges: (center r, center c, cos, sin, amplitude, width)
    let edges: Vec<(f64, f64, f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let r0 = rng.gen_range(0.0..size as f64);
            let c0 = rng.gen_range(0.0..size as f64);
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let amp = rng.gen_range(0.5..=1.5) * if rng.gen_range(0..2) == 0 { 1.0 } else { -1.0 };
            let width = rng.gen_range(1.0..=3.0);
            (r0, c0, theta.cos(), theta.sin(), amp, width)
        })
        .collect();
    let mut img = Matrix::zeros(size, size);
    let scale = std::f64::consts::TAU / size as f64;
    for r in 0..size {
        for c in 0..size {
            let mut v = 0.0;
            for &(freq, ct, st, phase) in &params {
                v += (scale * freq * (ct * r as f64 + st * c as f64) + phase).sin() / freq;
            }
            for &(r0, c0, ct, st, amp, width) in &edges {
                v += amp * (((r as f64 - r0) * ct + (c as f64 - c0) * st) / width).tanh();
            }
            img.set(r, c, v);
        }
    }
    let min = img.data().iter().cloned().fold(f64::INFINITY, f64::min);
    let max = img.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max - min < 1e-12 {
        return Matrix::zeros(size, size).map(|_| 0.5);
    }
    let inv = 1.0 / (max - min);
    let img = img.map(|v| (v - min) * inv);
    // sensor noise, clamped back into range
    img.map(|v| {
        let z: f64 = rng.sample(StandardNormal);
        (v + 0.02 * z).clamp(0.0, 1.0)
    })
}

pub fn gen_images(count: usize, size: usize, rng: &mut SeededRng) -> Vec<Matrix> {
    (0..count).map(|_| gen_image(size, rng)).collect()
}

// Seven-segment endpoints on a 28x28 canvas, (row, col).
const SEGMENTS: [((f64, f64), (f64, f64)); 7] = [
    ((5.0, 9.0), (5.0, 19.0)),    // A top
    ((5.0, 19.0), (14.0, 19.0)),  // B upper right
    ((14.0, 19.0), (23.0, 19.0)), // C lower right
    ((23.0, 9.0), (23.0, 19.0)),  // D bottom
    ((14.0, 9.0), (23.0, 9.0)),   // E lower left
    ((5.0, 9.0), (14.0, 9.0)),    // F upper left
    ((14.0, 9.0), (14.0, 19.0)),  // G middle
];

const DIGIT_SEGMENTS: [&[usize]; 10] = [
    &[0, 1, 2, 3, 4, 5],    // 0
    &[1, 2],                // 1
    &[0, 1, 6, 4, 3],       // 2
    &[0, 1, 6, 2, 3],       // 3
    &[5, 6, 1, 2],          // 4
    &[0, 5, 6, 2, 3],       // 5
    &[0, 5, 6, 4, 3, 2],    // 6
    &[0, 1, 2],             // 7
    &[0, 1, 2, 3, 4, 5, 6], // 8
    &[0, 1, 2, 3, 5, 6],    // 9
];

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (px, py) = p;
    let (ax, ay) = a;
    let (bx, by) = b;
    let (dx, dy) = (bx - ax, by - ay);
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len_sq).clamp(0.0, 1.0)
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// One 28×28 digit rendering with per-image jitter, stroke-width variation,
/// and pixel noise; values in 0-255.
pub fn render_digit(digit: u8, rng: &mut SeededRng) -> Matrix {
    assert!(digit <= 9, "digit out of range");
    let shift_r = rng.gen_range(-2.0..=2.0);
    let shift_c = rng.gen_range(-2.0..=2.0);
    let radius = rng.gen_range(1.1..=1.9);
    let strokes: Vec<((f64, f64), (f64, f64))> = DIGIT_SEGMENTS[digit as usize]
        .iter()
        .map(|&s| {
            let ((ar, ac), (br, bc)) = SEGMENTS[s];
            let jitter = |rng: &mut SeededRng| rng.gen_range(-0.8..=0.8);
            (
                (ar + shift_r + jitter(rng), ac + shift_c + jitter(rng)),
                (br + shift_r + jitter(rng), bc + shift_c + jitter(rng)),
            )
        })
        .collect();
    let mut img = Matrix::zeros(28, 28);
    for r in 0..28 {
        for c in 0..28 {
            let p = (r as f64, c as f64);
            let dist = strokes
                .iter()
                .map(|&(a, b)| dist_to_segment(p, a, b))
                .fold(f64::INFINITY, f64::min);
            // soft-edged stroke
            let ink = (255.0 * (1.0 + radius - dist) / radius).clamp(0.0, 255.0);
            let noise: f64 = rng.sample(StandardNormal);
            img.set(r, c, (ink + 10.0 * noise).clamp(0.0, 255.0));
        }
    }
    img
}

/// Digit dataset with classes interleaved 0,1,…,9,0,1,… so any prefix split
/// stays balanced. Pixels are raw 0-255; rows flatten the 28×28 canvas.
pub fn gen_digit_dataset(count: usize, rng: &mut SeededRng) -> LabeledDataset {
    assert!(count > 0);
    let mut data = Vec::with_capacity(count * 784);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let digit = (i % 10) as u8;
        let img = render_digit(digit, rng);
        data.extend_from_slice(img.data());
        labels.push(digit);
    }
    LabeledDataset {
        x: Matrix::from_vec(count, 784, data).expect("finite pixels"),
        labels,
    }
}
