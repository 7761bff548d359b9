//! Fourier machinery on uniformly sampled periodic and quasi-periodic fields.
//!
//! A field on `n` samples with spacing `ds` is treated as the trigonometric
//! interpolant of period `L = n * ds`. Quasi-periodic fields satisfy
//! `f(s + L) = exp(i * monodromy) * f(s)` with the seam placed just before
//! `base_index`; they are differentiated by periodizing with
//! `exp(-i * monodromy * sigma / L)` and using shifted wavenumbers.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized forward DFT.
pub fn forward(values: &mut [Complex64]) {
    plan(values.len(), false).process(values);
}

/// Inverse DFT including the `1/n` normalization.
pub fn inverse(values: &mut [Complex64]) {
    let n = values.len();
    plan(n, true).process(values);
    let scale = 1.0 / n as f64;
    for v in values.iter_mut() {
        *v *= scale;
    }
}

/// Signed integer mode index of DFT bin `j`; the Nyquist bin maps to `+n/2`.
pub fn mode_index(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Multiplier of the `order`-th derivative for bin `j`, with wavenumbers
/// shifted by `shift`. The Nyquist bin is split evenly between `+n/2` and
/// `-n/2`, which zeroes it for odd periodic derivatives.
fn multiplier(j: usize, n: usize, length: f64, shift: f64, order: u32) -> Complex64 {
    let base = TAU / length;
    let pow = |k: f64| Complex64::new(0.0, k).powu(order);
    if n % 2 == 0 && j == n / 2 {
        let k = base * (n / 2) as f64;
        (pow(k + shift) + pow(-k + shift)) * 0.5
    } else {
        pow(base * mode_index(j, n) as f64 + shift)
    }
}

/// `order`-th derivative of a periodic real field sampled with spacing `ds`.
///
/// A uniform field differentiates to exact zeros.
pub fn derivative(values: &[f64], ds: f64, order: u32) -> Vec<f64> {
    let n = values.len();
    if order == 0 {
        return values.to_vec();
    }
    if values.iter().all(|&v| v == values[0]) {
        return vec![0.0; n];
    }
    let length = n as f64 * ds;
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        *c *= multiplier(j, n, length, 0.0, order);
    }
    inverse(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Arclength coordinate of sample `i` measured from `base_index`, in `[0, L)`.
pub fn seam_coordinate(i: usize, base_index: usize, n: usize, ds: f64) -> f64 {
    ((i + n - base_index) % n) as f64 * ds
}

/// `order`-th derivative of a quasi-periodic complex field with the given
/// monodromy phase. With `monodromy == 0` this is plain spectral
/// differentiation of a periodic complex field.
pub fn quasi_periodic_derivative(
    values: &[Complex64],
    ds: f64,
    monodromy: f64,
    base_index: usize,
    order: u32,
) -> Vec<Complex64> {
    let n = values.len();
    let length = n as f64 * ds;
    let shift = monodromy / length;
    let phase = |i: usize| Complex64::from_polar(1.0, shift * seam_coordinate(i, base_index, n, ds));
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * phase(i).conj())
        .collect();
    forward(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        *c *= multiplier(j, n, length, shift, order);
    }
    inverse(&mut buf);
    buf.iter_mut().enumerate().for_each(|(i, v)| *v *= phase(i));
    buf
}

/// Fourier coefficients (normalized by `1/n`) of a real periodic field.
pub fn coefficients(values: &[f64]) -> Vec<Complex64> {
    let n = values.len() as f64;
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    buf.iter_mut().for_each(|c| *c /= n);
    buf
}

/// Evaluates the trigonometric interpolant with normalized coefficients
/// `coef` at the angle `theta` (period `2*pi`).
pub fn evaluate(coef: &[Complex64], theta: f64) -> f64 {
    let n = coef.len();
    let step = Complex64::from_polar(1.0, theta);
    let mut e = step;
    let mut acc = coef[0].re;
    for c in coef.iter().take(n.div_ceil(2)).skip(1) {
        acc += 2.0 * (c * e).re;
        e *= step;
    }
    if n % 2 == 0 {
        acc += coef[n / 2].re * (n as f64 / 2.0 * theta).cos();
    }
    acc
}

/// Derivative with respect to `theta` of the interpolant at `theta`.
pub fn evaluate_derivative(coef: &[Complex64], theta: f64) -> f64 {
    let n = coef.len();
    let step = Complex64::from_polar(1.0, theta);
    let mut e = step;
    let mut acc = 0.0;
    for (j, c) in coef.iter().enumerate().take(n.div_ceil(2)).skip(1) {
        acc -= 2.0 * j as f64 * (c * e).im;
        e *= step;
    }
    if n % 2 == 0 {
        let k = n as f64 / 2.0;
        acc -= coef[n / 2].re * k * (k * theta).sin();
    }
    acc
}

/// Antiderivative `F(theta) - F(0)` of the interpolant, where the mean mode
/// integrates to `coef[0] * theta`.
pub fn evaluate_integral(coef: &[Complex64], theta: f64) -> f64 {
    let n = coef.len();
    let step = Complex64::from_polar(1.0, theta);
    let mut e = step;
    let mut acc = coef[0].re * theta;
    for (j, c) in coef.iter().enumerate().take(n.div_ceil(2)).skip(1) {
        // 2 Re(c (e^{ij theta} - 1) / (i j))
        acc += 2.0 * (c * (e - 1.0)).im / j as f64;
        e *= step;
    }
    if n % 2 == 0 {
        let k = n as f64 / 2.0;
        acc += coef[n / 2].re * (k * theta).sin() / k;
    }
    acc
}

/// Trigonometric interpolation of a real periodic field onto `m >= n`
/// equispaced samples by zero padding.
pub fn upsample(values: &[f64], m: usize) -> Vec<f64> {
    let n = values.len();
    assert!(m >= n, "upsample target must not be smaller than the input");
    let coef = coefficients(values);
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        let k = mode_index(j, n);
        if n % 2 == 0 && j == n / 2 {
            let half = coef[j] * 0.5;
            padded[n / 2] += half;
            padded[m - n / 2] += half;
        } else {
            let idx = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
            padded[idx] += coef[j];
        }
    }
    plan(m, true).process(&mut padded);
    padded.into_iter().map(|c| c.re).collect()
}
