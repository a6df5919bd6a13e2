//! Degradation operators: sub-pixel translation (warp), blur, decimation,
//! seeded Gaussian noise, and the composed low-resolution forward model with
//! its exact adjoint.
//!
//! Border policy is replicate padding for warp and blur. Each adjoint is the
//! exact transpose of the padded forward map, implemented by scattering with
//! the same clamped indices and weights the forward gathers with, so the
//! dot-product identity `<Ax, y> = <x, A^T y>` holds to rounding error
//! including border pixels.

use crate::error::{Error, Result};
use crate::image::ImageGray;
use crate::rng::Rng;

/// Translational displacement in high-resolution pixel units. Positive
/// components move image content down and to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub dy: f64,
    pub dx: f64,
}

impl Displacement {
    pub fn new(dy: f64, dx: f64) -> Self {
        Self { dy, dx }
    }

    pub fn zero() -> Self {
        Self { dy: 0.0, dx: 0.0 }
    }

    /// Integer floor part per axis.
    pub fn floor(&self) -> (i64, i64) {
        (self.dy.floor() as i64, self.dx.floor() as i64)
    }

    /// Fractional part per axis, each in [0, 1).
    pub fn subpixel(&self) -> (f64, f64) {
        (self.dy - self.dy.floor(), self.dx - self.dx.floor())
    }
}

/// Square blur kernel with odd side length and unit tap sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    size: usize,
    taps: Vec<f64>,
}

impl BlurKernel {
    /// Validates: odd size, `size*size` taps, taps summing to 1 (±1e-12).
    pub fn new(size: usize, taps: Vec<f64>) -> Result<Self> {
        if size == 0 || size % 2 == 0 {
            return Err(Error::InvalidParam(format!("kernel size must be odd, got {}", size)));
        }
        if taps.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "kernel needs {} taps, got {}",
                size * size,
                taps.len()
            )));
        }
        let sum: f64 = taps.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParam(format!("kernel taps sum to {}, expected 1", sum)));
        }
        Ok(Self { size, taps })
    }

    /// Normalize arbitrary non-negative taps to unit sum.
    pub fn normalized(size: usize, taps: Vec<f64>) -> Result<Self> {
        let sum: f64 = taps.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::InvalidParam("kernel taps must have positive finite sum".into()));
        }
        let taps = taps.into_iter().map(|t| t / sum).collect();
        Self::new(size, taps)
    }

    /// Isotropic Gaussian, sampled at tap centers and normalized.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::InvalidParam(format!("gaussian sigma must be positive, got {}", sigma)));
        }
        let half = (size / 2) as f64;
        let mut taps = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                let dy = r as f64 - half;
                let dx = c as f64 - half;
                taps.push((-(dy * dy + dx * dx) / (2.0 * sigma * sigma)).exp());
            }
        }
        Self::normalized(size, taps)
    }

    /// Identity kernel: single unit tap at the center.
    pub fn delta(size: usize) -> Result<Self> {
        let mut taps = vec![0.0; size * size];
        taps[(size / 2) * size + size / 2] = 1.0;
        Self::new(size, taps)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn tap(&self, r: usize, c: usize) -> f64 {
        self.taps[r * self.size + c]
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }
}

/// The four bilinear taps of a translation: (row offset, col offset, weight).
fn bilinear_taps(d: &Displacement) -> [(i64, i64, f64); 4] {
    let (fy, fx) = d.subpixel();
    let (iy, ix) = d.floor();
    [
        (iy, ix, (1.0 - fy) * (1.0 - fx)),
        (iy, ix + 1, (1.0 - fy) * fx),
        (iy + 1, ix, fy * (1.0 - fx)),
        (iy + 1, ix + 1, fy * fx),
    ]
}

/// Bilinear translation by `d`: `out(r, c)` samples `src` at
/// `(r - dy, c - dx)` with replicate padding.
pub fn warp(src: &ImageGray, d: &Displacement) -> ImageGray {
    let (h, w) = (src.height(), src.width());
    let taps = bilinear_taps(d);
    let mut out = ImageGray::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for &(oy, ox, wt) in &taps {
                acc += wt * src.get_clamped(r as isize - oy as isize, c as isize - ox as isize);
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Exact transpose of `warp(·, d)`: scatter with the same clamped bilinear
/// taps the forward gathers with.
pub fn warp_adjoint(src: &ImageGray, d: &Displacement) -> ImageGray {
    let (h, w) = (src.height(), src.width());
    let taps = bilinear_taps(d);
    let mut out = ImageGray::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let v = src.get(r, c);
            for &(oy, ox, wt) in &taps {
                let rr = (r as isize - oy as isize).clamp(0, h as isize - 1) as usize;
                let cc = (c as isize - ox as isize).clamp(0, w as isize - 1) as usize;
                out.set(rr, cc, out.get(rr, cc) + wt * v);
            }
        }
    }
    out
}

/// 2D convolution with replicate padding.
pub fn blur(src: &ImageGray, kernel: &BlurKernel) -> Result<ImageGray> {
    let (h, w) = (src.height(), src.width());
    let a = kernel.size();
    if a > h || a > w {
        return Err(Error::DimensionMismatch(format!(
            "kernel {0}x{0} larger than image {1}x{2}",
            a, h, w
        )));
    }
    let half = (a / 2) as isize;
    let mut out = ImageGray::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for i in 0..a {
                for j in 0..a {
                    let sr = r as isize - (i as isize - half);
                    let sc = c as isize - (j as isize - half);
                    acc += kernel.tap(i, j) * src.get_clamped(sr, sc);
                }
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Exact transpose of `blur(·, kernel)` including the replicate-padding
/// border behavior; equals correlation with the kernel on interior pixels.
pub fn blur_adjoint(src: &ImageGray, kernel: &BlurKernel) -> Result<ImageGray> {
    let (h, w) = (src.height(), src.width());
    let a = kernel.size();
    if a > h || a > w {
        return Err(Error::DimensionMismatch(format!(
            "kernel {0}x{0} larger than image {1}x{2}",
            a, h, w
        )));
    }
    let half = (a / 2) as isize;
    let mut out = ImageGray::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let v = src.get(r, c);
            for i in 0..a {
                for j in 0..a {
                    let sr = (r as isize - (i as isize - half)).clamp(0, h as isize - 1) as usize;
                    let sc = (c as isize - (j as isize - half)).clamp(0, w as isize - 1) as usize;
                    out.set(sr, sc, out.get(sr, sc) + kernel.tap(i, j) * v);
                }
            }
        }
    }
    Ok(out)
}

/// Point decimation at stride `gamma`, phase (0, 0): `out(r, c) = src(gr, gc)`.
pub fn decimate(src: &ImageGray, gamma: usize) -> Result<ImageGray> {
    if gamma == 0 {
        return Err(Error::InvalidParam("decimation factor must be >= 1".into()));
    }
    if src.height() % gamma != 0 || src.width() % gamma != 0 {
        return Err(Error::DimensionMismatch(format!(
            "image {}x{} not divisible by decimation factor {}",
            src.height(),
            src.width(),
            gamma
        )));
    }
    let (h, w) = (src.height() / gamma, src.width() / gamma);
    let mut out = ImageGray::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            out.set(r, c, src.get(r * gamma, c * gamma));
        }
    }
    Ok(out)
}

/// Transpose of `decimate`: values at stride-`gamma` phase-(0,0) positions,
/// zeros elsewhere.
pub fn zero_insert(src: &ImageGray, gamma: usize) -> Result<ImageGray> {
    if gamma == 0 {
        return Err(Error::InvalidParam("decimation factor must be >= 1".into()));
    }
    let mut out = ImageGray::zeros(src.height() * gamma, src.width() * gamma);
    for r in 0..src.height() {
        for c in 0..src.width() {
            out.set(r * gamma, c * gamma, src.get(r, c));
        }
    }
    Ok(out)
}

/// Composed low-resolution observation: decimate(blur(warp(x, d), k), gamma).
pub fn forward(
    x: &ImageGray,
    d: &Displacement,
    kernel: &BlurKernel,
    gamma: usize,
) -> Result<ImageGray> {
    decimate(&blur(&warp(x, d), kernel)?, gamma)
}

/// Exact transpose of `forward`: warp^T(blur^T(zero_insert(e, gamma), k), d).
pub fn forward_adjoint(
    e: &ImageGray,
    d: &Displacement,
    kernel: &BlurKernel,
    gamma: usize,
) -> Result<ImageGray> {
    Ok(warp_adjoint(&blur_adjoint(&zero_insert(e, gamma)?, kernel)?, d))
}

/// Add i.i.d. Gaussian noise from the deterministic seeded generator. The
/// same (seed, dimensions, sigma) always produces the same output.
pub fn add_noise(src: &ImageGray, sigma: f64, seed: u64) -> Result<ImageGray> {
    if sigma < 0.0 {
        return Err(Error::InvalidParam(format!("noise sigma must be >= 0, got {}", sigma)));
    }
    if sigma == 0.0 {
        return Ok(src.clone());
    }
    let mut rng = Rng::new(seed);
    let mut out = src.clone();
    for v in out.data_mut() {
        *v += sigma * rng.next_gaussian();
    }
    Ok(out)
}
