//! Image containers.
//!
//! Pixels are stored as `f64` on a nominal 0–255 scale for the whole
//! pipeline; quantization to 8 bits happens only at file save. The iterative
//! solver would otherwise accumulate rounding error on every step.

use crate::error::{Error, Result};

/// Single-channel image, row-major, nominal range `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGray {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ImageGray {
    /// Construct from raw row-major data. Length must equal `height * width`
    /// and all values must be finite.
    pub fn from_data(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParam("image dimensions must be positive".into()));
        }
        if data.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "data length {} != {}x{}",
                data.len(),
                height,
                width
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("image contains non-finite values".into()));
        }
        Ok(Self { height, width, data })
    }

    /// All-zero image.
    pub fn zeros(height: usize, width: usize) -> Self {
        Self { height, width, data: vec![0.0; height * width] }
    }

    /// Image filled with a constant value.
    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        Self { height, width, data: vec![value; height * width] }
    }

    /// Build from a per-pixel closure `(row, col) -> value`.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self { height, width, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.height && c < self.width);
        self.data[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.height && c < self.width);
        self.data[r * self.width + c] = v;
    }

    /// Sample with indices clamped to the image bounds (replicate padding).
    #[inline]
    pub fn get_clamped(&self, r: isize, c: isize) -> f64 {
        let r = r.clamp(0, self.height as isize - 1) as usize;
        let c = c.clamp(0, self.width as isize - 1) as usize;
        self.data[r * self.width + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_dims(&self, other: &ImageGray) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// Error unless `self` and `other` share dimensions.
    pub fn check_same_dims(&self, other: &ImageGray, context: &str) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}: {}x{} vs {}x{}",
                context, self.height, self.width, other.height, other.width
            )))
        }
    }

    /// Elementwise subtraction.
    pub fn sub(&self, other: &ImageGray) -> Result<ImageGray> {
        self.check_same_dims(other, "sub")?;
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(ImageGray { height: self.height, width: self.width, data })
    }

    /// In-place `self += scale * other`.
    pub fn add_scaled(&mut self, other: &ImageGray, scale: f64) -> Result<()> {
        self.check_same_dims(other, "add_scaled")?;
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += scale * b;
        }
        Ok(())
    }

    /// Sum of squared values.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Inner product with another image of the same dimensions.
    pub fn dot(&self, other: &ImageGray) -> Result<f64> {
        self.check_same_dims(other, "dot")?;
        Ok(self.data.iter().zip(other.data.iter()).map(|(a, b)| a * b).sum())
    }

    /// Clamp all values into `[lo, hi]` (used before metrics and file save).
    pub fn clamped(&self, lo: f64, hi: f64) -> ImageGray {
        let data = self.data.iter().map(|v| v.clamp(lo, hi)).collect();
        ImageGray { height: self.height, width: self.width, data }
    }

    /// True if every pixel is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Center crop to exactly `height x width`.
    pub fn center_crop(&self, height: usize, width: usize) -> Result<ImageGray> {
        if height == 0 || width == 0 || height > self.height || width > self.width {
            return Err(Error::InvalidParam(format!(
                "cannot crop {}x{} out of {}x{}",
                height, width, self.height, self.width
            )));
        }
        let r0 = (self.height - height) / 2;
        let c0 = (self.width - width) / 2;
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            let row = (r0 + r) * self.width + c0;
            data.extend_from_slice(&self.data[row..row + width]);
        }
        Ok(ImageGray { height, width, data })
    }
}

/// Planar Y/U/V image; all planes share dimensions.
#[derive(Debug, Clone)]
pub struct ImageYuv {
    pub y: ImageGray,
    pub u: ImageGray,
    pub v: ImageGray,
}

impl ImageYuv {
    pub fn new(y: ImageGray, u: ImageGray, v: ImageGray) -> Result<Self> {
        y.check_same_dims(&u, "yuv planes")?;
        y.check_same_dims(&v, "yuv planes")?;
        Ok(Self { y, u, v })
    }
}

/// Planar R/G/B image; all planes share dimensions.
#[derive(Debug, Clone)]
pub struct ImageRgb {
    pub r: ImageGray,
    pub g: ImageGray,
    pub b: ImageGray,
}

impl ImageRgb {
    pub fn new(r: ImageGray, g: ImageGray, b: ImageGray) -> Result<Self> {
        r.check_same_dims(&g, "rgb planes")?;
        r.check_same_dims(&b, "rgb planes")?;
        Ok(Self { r, g, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_data_validates_length() {
        assert!(ImageGray::from_data(2, 3, vec![0.0; 6]).is_ok());
        assert!(ImageGray::from_data(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    fn from_data_rejects_non_finite() {
        assert!(ImageGray::from_data(1, 2, vec![0.0, f64::NAN]).is_err());
        assert!(ImageGray::from_data(1, 2, vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn clamped_get_replicates_borders() {
        let img = ImageGray::from_data(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(img.get_clamped(-1, -1), 1.0);
        assert_eq!(img.get_clamped(-1, 5), 2.0);
        assert_eq!(img.get_clamped(5, 0), 3.0);
        assert_eq!(img.get_clamped(5, 5), 4.0);
    }

    #[test]
    fn center_crop_takes_middle() {
        let img = ImageGray::from_fn(4, 4, |r, c| (r * 4 + c) as f64);
        let crop = img.center_crop(2, 2).unwrap();
        assert_eq!(crop.data(), &[5.0, 6.0, 9.0, 10.0]);
    }

    #[test]
    fn yuv_requires_matching_planes() {
        let a = ImageGray::zeros(2, 2);
        let b = ImageGray::zeros(2, 3);
        assert!(ImageYuv::new(a.clone(), a.clone(), a.clone()).is_ok());
        assert!(ImageYuv::new(a.clone(), b, a).is_err());
    }
}
