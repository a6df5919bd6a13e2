//! Synthetic ground-truth fixtures shipped with the repository for CI and
//! offline benchmarking: a diagonal ramp, an 8-pixel checkerboard, and a
//! Gaussian blob. All three are 96x96 so every tested scale factor (2, 3, 4)
//! divides them evenly.

use misr_core::image::ImageGray;

pub const FIXTURE_SIZE: usize = 96;

pub const FIXTURE_NAMES: [&str; 3] = ["ramp", "checkerboard", "blob"];

/// Diagonal linear ramp from 0 to 255.
pub fn ramp(h: usize, w: usize) -> ImageGray {
    ImageGray::from_fn(h, w, |r, c| 255.0 * (r + c) as f64 / (h + w - 2) as f64)
}

/// Checkerboard with 8-pixel cells at 70 / 190 gray.
pub fn checkerboard(h: usize, w: usize) -> ImageGray {
    ImageGray::from_fn(h, w, |r, c| if ((r / 8) + (c / 8)) % 2 == 0 { 70.0 } else { 190.0 })
}

/// Centered Gaussian blob (sigma 14, amplitude 200) on a dark background.
pub fn gaussian_blob(h: usize, w: usize) -> ImageGray {
    ImageGray::from_fn(h, w, |r, c| {
        let dy = r as f64 - h as f64 * 0.5;
        let dx = c as f64 - w as f64 * 0.5;
        30.0 + 200.0 * (-(dy * dy + dx * dx) / (2.0 * 14.0 * 14.0)).exp()
    })
}

pub fn by_name(name: &str, h: usize, w: usize) -> Option<ImageGray> {
    match name {
        "ramp" => Some(ramp(h, w)),
        "checkerboard" => Some(checkerboard(h, w)),
        "blob" => Some(gaussian_blob(h, w)),
        _ => None,
    }
}

/// The three default fixtures at the shipped size, quantized to 8 bits the
/// same way the PGM writer quantizes them.
pub fn default_fixtures() -> Vec<(&'static str, ImageGray)> {
    FIXTURE_NAMES
        .iter()
        .map(|&name| {
            let img = by_name(name, FIXTURE_SIZE, FIXTURE_SIZE).unwrap();
            let quantized = ImageGray::from_fn(img.height(), img.width(), |r, c| {
                img.get(r, c).clamp(0.0, 255.0).round()
            });
            (name, quantized)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_shipping_dimensions() {
        for (name, img) in default_fixtures() {
            assert_eq!(img.height(), FIXTURE_SIZE, "{}", name);
            assert_eq!(img.width(), FIXTURE_SIZE, "{}", name);
            for scale in [2usize, 3, 4] {
                assert_eq!(img.height() % scale, 0);
            }
        }
    }

    #[test]
    fn fixture_values_are_8_bit_exact() {
        for (name, img) in default_fixtures() {
            for &v in img.data() {
                assert!((0.0..=255.0).contains(&v), "{}", name);
                assert_eq!(v, v.round(), "{}", name);
            }
        }
    }

    #[test]
    fn by_name_rejects_unknown() {
        assert!(by_name("nope", 8, 8).is_none());
    }
}
