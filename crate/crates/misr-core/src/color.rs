//! BT.601 full-range RGB <-> YUV conversion.
//!
//! Reconstruction runs on the luminance plane only; chroma planes are kept
//! so color inputs can be round-tripped. U and V carry a +128 offset so the
//! neutral (achromatic) value sits mid-range.

use crate::error::Result;
use crate::image::{ImageGray, ImageRgb, ImageYuv};

const UV_OFFSET: f64 = 128.0;

pub fn rgb_to_yuv(rgb: &ImageRgb) -> Result<ImageYuv> {
    let (h, w) = (rgb.r.height(), rgb.r.width());
    let mut y = ImageGray::zeros(h, w);
    let mut u = ImageGray::zeros(h, w);
    let mut v = ImageGray::zeros(h, w);
    for i in 0..h * w {
        let r = rgb.r.data()[i];
        let g = rgb.g.data()[i];
        let b = rgb.b.data()[i];
        y.data_mut()[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        u.data_mut()[i] = -0.168736 * r - 0.331264 * g + 0.5 * b + UV_OFFSET;
        v.data_mut()[i] = 0.5 * r - 0.418688 * g - 0.081312 * b + UV_OFFSET;
    }
    ImageYuv::new(y, u, v)
}

pub fn yuv_to_rgb(yuv: &ImageYuv) -> Result<ImageRgb> {
    let (h, w) = (yuv.y.height(), yuv.y.width());
    let mut r = ImageGray::zeros(h, w);
    let mut g = ImageGray::zeros(h, w);
    let mut b = ImageGray::zeros(h, w);
    for i in 0..h * w {
        let y = yuv.y.data()[i];
        let u = yuv.u.data()[i] - UV_OFFSET;
        let v = yuv.v.data()[i] - UV_OFFSET;
        r.data_mut()[i] = y + 1.402 * v;
        g.data_mut()[i] = y - 0.344136 * u - 0.714136 * v;
        b.data_mut()[i] = y + 1.772 * u;
    }
    ImageRgb::new(r, g, b)
}
