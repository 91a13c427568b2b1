//! Thin FFT helpers on the uniform grid `x_j = 2 pi j / n`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Normalized coefficients `c_k = (1/n) sum_j f(x_j) e^{-i k x_j}` in FFT order.
pub fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Inverse of [`forward`]: grid values from FFT-ordered coefficients.
pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    buf
}

pub fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
}

/// Samples a real function and returns `hat f(k)` for `1 <= k <= bandwidth`
/// together with the mean `hat f(0)`.
pub fn real_coefficients(
    f: impl Fn(f64) -> f64,
    grid_size: usize,
    bandwidth: usize,
) -> (f64, Vec<Complex64>) {
    let samples: Vec<Complex64> = grid(grid_size).map(|x| Complex64::new(f(x), 0.0)).collect();
    let c = forward(&samples);
    (c[0].re, c[1..=bandwidth].to_vec())
}

/// Grid values of the real function with mean `mean` and coefficients
/// `coeffs[k-1] = hat u(k)`.
pub fn synthesize(mean: f64, coeffs: &[Complex64], grid_size: usize) -> Vec<f64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); grid_size];
    spec[0] = Complex64::new(mean, 0.0);
    for (i, c) in coeffs.iter().enumerate().take(grid_size / 2 - 1) {
        spec[i + 1] = *c;
        spec[grid_size - i - 1] = c.conj();
    }
    inverse(&spec).into_iter().map(|z| z.re).collect()
}

pub fn grid_size_for(bandwidth: usize, factor: usize) -> usize {
    (factor * bandwidth.max(2)).next_power_of_two()
}
