//! Weighted-FFT non-uniformity score.
//!
//! The distribution is resampled onto [`BINS`] equal-width time bins, scaled so
//! the bins sum to 100, and transformed with a direct DFT. The score weights the
//! magnitude of frequency `i` by `i` for `i` in `0..=100`, so the DC term never
//! contributes and a constant histogram scores exactly zero.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::distribution::FaultDistribution;

pub const BINS: usize = 200;
/// Highest frequency index in the score (the Nyquist bin).
pub const MAX_FREQUENCY: usize = BINS / 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonUniformityScore {
    pub value: f64,
    pub bins: Vec<f64>,
    /// `|fft_i|` for `i` in `0..=100`.
    pub spectrum: Vec<f64>,
}

/// Bin of cycle offset `offset` in a range of `span` cycles. Ranges shorter
/// than [`BINS`] put one cycle in each bin and leave the tail empty.
fn bin_of(offset: u64, span: u64) -> usize {
    if span < BINS as u64 {
        offset as usize
    } else {
        (offset as u128 * BINS as u128 / span as u128) as usize
    }
}

pub fn resample(d: &FaultDistribution) -> Vec<f64> {
    let mut counts = vec![0u64; BINS];
    for &(t, c) in d.entries() {
        counts[bin_of(t - d.t_start(), d.span())] += c;
    }
    let total = d.total() as f64;
    counts.iter().map(|&c| c as f64 * 100.0 / total).collect()
}

pub fn wfft(d: &FaultDistribution) -> NonUniformityScore {
    let bins = resample(d);
    // Removing the mean only changes the DC term, which has weight zero,
    // and makes a constant input transform to exact zeros.
    let mean = 100.0 / BINS as f64;
    let centered: Vec<f64> = bins.iter().map(|b| b - mean).collect();

    let spectrum: Vec<f64> = (0..=MAX_FREQUENCY)
        .map(|i| {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, &x) in centered.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let phase = TAU * ((i * n) % BINS) as f64 / BINS as f64;
                re += x * phase.cos();
                im -= x * phase.sin();
            }
            re.hypot(im)
        })
        .collect();
    let value = spectrum.iter().enumerate().map(|(i, m)| i as f64 * m).sum();
    NonUniformityScore {
        value,
        bins,
        spectrum,
    }
}
