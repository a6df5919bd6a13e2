//! PSNR and SSIM quality metrics on the 0-255 scale.
//!
//! SSIM uses the standard 11x11 Gaussian window (sigma 1.5) with stabilizing
//! constants c1 = (0.01*255)^2 and c2 = (0.03*255)^2, evaluated densely over
//! the full image with symmetric padding, then averaged. The fast path
//! filters the five moment maps separably; `tests` cross-check it against a
//! direct per-window scalar loop.

use crate::error::{Error, Result};
use crate::image::ImageGray;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 6.5025; // (0.01 * 255)^2
pub const SSIM_C2: f64 = 58.5225; // (0.03 * 255)^2

/// PSNR in dB, SSIM, and the raw MSE between a reference and a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub psnr: f64,
    pub ssim: f64,
    pub mse: f64,
}

impl MetricReport {
    pub fn compute(reference: &ImageGray, candidate: &ImageGray) -> Result<Self> {
        Ok(Self {
            psnr: psnr(reference, candidate)?,
            ssim: ssim(reference, candidate)?,
            mse: mse(reference, candidate)?,
        })
    }
}

pub fn mse(reference: &ImageGray, candidate: &ImageGray) -> Result<f64> {
    reference.check_same_dims(candidate, "mse")?;
    let n = reference.data().len() as f64;
    let sum: f64 = reference
        .data()
        .iter()
        .zip(candidate.data().iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / n)
}

/// Peak signal-to-noise ratio, `10 log10(255^2 / MSE)`. Identical images
/// (MSE = 0) return `f64::INFINITY`, reported as "inf" in tables.
pub fn psnr(reference: &ImageGray, candidate: &ImageGray) -> Result<f64> {
    let m = mse(reference, candidate)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / m).log10())
}

/// Symmetric (mirror) boundary reflection of index `i` into `[0, n)`.
#[inline]
fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut taps = [0.0; SSIM_WINDOW];
    let mut sum = 0.0;
    for (i, t) in taps.iter_mut().enumerate() {
        let x = i as f64 - half;
        *t = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *t;
    }
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable Gaussian filtering with symmetric padding, applied to a raw
/// row-major buffer.
fn gauss_filter(src: &[f64], h: usize, w: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let half = SSIM_WINDOW as isize / 2;
    let mut mid = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let idx = reflect(c as isize + k as isize - half, w);
                acc += t * src[r * w + idx];
            }
            mid[r * w + c] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let idx = reflect(r as isize + k as isize - half, h);
                acc += t * mid[idx * w + c];
            }
            out[r * w + c] = acc;
        }
    }
    out
}

/// Mean structural similarity over dense Gaussian-weighted local windows.
pub fn ssim(reference: &ImageGray, candidate: &ImageGray) -> Result<f64> {
    reference.check_same_dims(candidate, "ssim")?;
    let (h, w) = (reference.height(), reference.width());
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::InvalidParam(format!(
            "ssim needs images at least {0}x{0}, got {1}x{2}",
            SSIM_WINDOW, h, w
        )));
    }
    let taps = gaussian_taps();
    let x = reference.data();
    let y = candidate.data();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a * b).collect();

    let mu_x = gauss_filter(x, h, w, &taps);
    let mu_y = gauss_filter(y, h, w, &taps);
    let m_xx = gauss_filter(&xx, h, w, &taps);
    let m_yy = gauss_filter(&yy, h, w, &taps);
    let m_xy = gauss_filter(&xy, h, w, &taps);

    let mut total = 0.0;
    for i in 0..h * w {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = m_xx[i] - mx * mx;
        let var_y = m_yy[i] - my * my;
        let cov = m_xy[i] - mx * my;
        let num = (2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (mx * mx + my * my + SSIM_C1) * (var_x + var_y + SSIM_C2);
        total += num / den;
    }
    Ok(total / (h * w) as f64)
}
