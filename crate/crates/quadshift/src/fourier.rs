//! Thin wrappers over rustfft: unnormalized forward DFT and the matching
//! normalized inverse, as used by the spectral translation and momentum-space
//! conversions.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place forward DFT, `X_k = sum_j x_j e^{-2 pi i j k / n}` (unnormalized).
pub(crate) fn dft(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(data.len()).process(data);
}

/// In-place inverse of [`dft`], including the `1/n` factor.
pub(crate) fn idft(data: &mut [Complex64]) {
    let n = data.len();
    FftPlanner::new().plan_fft_inverse(n).process(data);
    let inv = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= inv;
    }
}
