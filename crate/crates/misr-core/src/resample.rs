//! Separable bicubic resampling.
//!
//! Catmull-Rom style cubic kernel (a = -0.5) with replicate padding at the
//! borders. Sample positions use center alignment, so a factor of 1 is the
//! exact identity and constants are reproduced everywhere.

use crate::error::{Error, Result};
use crate::image::ImageGray;

/// Cubic convolution kernel with a = -0.5. Weights for any phase sum to 1,
/// and linear ramps are reproduced exactly on unclamped windows.
fn cubic_weight(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Per-output-index tap plan for one axis.
struct TapPlan {
    // base source index of the 4-tap window (may be clamped per tap)
    base: Vec<isize>,
    weights: Vec<[f64; 4]>,
}

fn plan_axis(src_len: usize, dst_len: usize) -> TapPlan {
    let ratio = src_len as f64 / dst_len as f64;
    let mut base = Vec::with_capacity(dst_len);
    let mut weights = Vec::with_capacity(dst_len);
    for d in 0..dst_len {
        let s = (d as f64 + 0.5) * ratio - 0.5;
        let b = s.floor();
        let t = s - b;
        base.push(b as isize - 1);
        weights.push([
            cubic_weight(t + 1.0),
            cubic_weight(t),
            cubic_weight(1.0 - t),
            cubic_weight(2.0 - t),
        ]);
    }
    TapPlan { base, weights }
}

/// Resize `src` by `factor`; output dimensions are `round(dims * factor)`
/// with exact halves rounding up.
pub fn bicubic_resize(src: &ImageGray, factor: f64) -> Result<ImageGray> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(Error::InvalidParam(format!("resize factor must be positive, got {}", factor)));
    }
    let out_h = (src.height() as f64 * factor).round() as usize;
    let out_w = (src.width() as f64 * factor).round() as usize;
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidParam("resize factor collapses the image to zero size".into()));
    }

    // Horizontal pass: src.height x out_w
    let col_plan = plan_axis(src.width(), out_w);
    let mut mid = vec![0.0f64; src.height() * out_w];
    let w_max = src.width() as isize - 1;
    for r in 0..src.height() {
        let row = &src.data()[r * src.width()..(r + 1) * src.width()];
        for c in 0..out_w {
            let b = col_plan.base[c];
            let wts = &col_plan.weights[c];
            let mut acc = 0.0;
            for (k, &wt) in wts.iter().enumerate() {
                let idx = (b + k as isize).clamp(0, w_max) as usize;
                acc += wt * row[idx];
            }
            mid[r * out_w + c] = acc;
        }
    }

    // Vertical pass: out_h x out_w
    let row_plan = plan_axis(src.height(), out_h);
    let mut out = vec![0.0f64; out_h * out_w];
    let h_max = src.height() as isize - 1;
    for r in 0..out_h {
        let b = row_plan.base[r];
        let wts = &row_plan.weights[r];
        for c in 0..out_w {
            let mut acc = 0.0;
            for (k, &wt) in wts.iter().enumerate() {
                let idx = (b + k as isize).clamp(0, h_max) as usize;
                acc += wt * mid[idx * out_w + c];
            }
            out[r * out_w + c] = acc;
        }
    }

    ImageGray::from_data(out_h, out_w, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_one_is_identity() {
        let img = ImageGray::from_fn(5, 7, |r, c| (r * 7 + c) as f64 * 3.5);
        let out = bicubic_resize(&img, 1.0).unwrap();
        assert!(img.same_dims(&out));
        for (a, b) in img.data().iter().zip(out.data().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageGray::constant(4, 6, 87.5);
        let out = bicubic_resize(&img, 3.0).unwrap();
        assert_eq!(out.height(), 12);
        assert_eq!(out.width(), 18);
        for &v in out.data() {
            assert!((v - 87.5).abs() < 1e-12);
        }
    }

    // Bicubic reproduces degree-<=1 polynomials, so a linear ramp upscaled by
    // 2 must equal the closed-form ramp at every unclamped sample position.
    #[test]
    fn linear_ramp_preserved_on_interior() {
        let (h, w) = (8, 10);
        let ramp = |r: f64, c: f64| 3.0 + 2.0 * r + 5.0 * c;
        let img = ImageGray::from_fn(h, w, |r, c| ramp(r as f64, c as f64));
        let out = bicubic_resize(&img, 2.0).unwrap();
        let ratio_r = h as f64 / out.height() as f64;
        let ratio_c = w as f64 / out.width() as f64;
        for r in 0..out.height() {
            for c in 0..out.width() {
                let sr = (r as f64 + 0.5) * ratio_r - 0.5;
                let sc = (c as f64 + 0.5) * ratio_c - 0.5;
                // interior: full 4-tap window inside on both axes
                if sr.floor() < 1.0
                    || sr.floor() + 2.0 > (h - 1) as f64
                    || sc.floor() < 1.0
                    || sc.floor() + 2.0 > (w - 1) as f64
                {
                    continue;
                }
                let expect = ramp(sr, sc);
                assert!(
                    (out.get(r, c) - expect).abs() < 1e-9,
                    "({}, {}): {} vs {}",
                    r,
                    c,
                    out.get(r, c),
                    expect
                );
            }
        }
    }

    #[test]
    fn rejects_bad_factors() {
        let img = ImageGray::zeros(4, 4);
        assert!(bicubic_resize(&img, 0.0).is_err());
        assert!(bicubic_resize(&img, -2.0).is_err());
        assert!(bicubic_resize(&img, f64::NAN).is_err());
    }

    #[test]
    fn downscale_dimensions_round_half_up() {
        let img = ImageGray::zeros(5, 5);
        let out = bicubic_resize(&img, 0.5).unwrap();
        // 5 * 0.5 = 2.5 rounds up to 3
        assert_eq!(out.height(), 3);
        assert_eq!(out.width(), 3);
    }
}
