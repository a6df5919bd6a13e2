//! Error-map upscaling from low-resolution to high-resolution space.
//!
//! Two routes are provided:
//!
//! * `upscale_ete`, the fast end-to-end route. For each of the `gamma^2`
//!   periodic sub-locations of the high-resolution grid, the composed
//!   warp-blur-decimate operator assigns one contribution pattern (a column
//!   of the operator viewed in LR coordinates). Dividing each pattern by its
//!   squared norm yields a small filter per sub-location; correlating the LR
//!   error map with every filter and shuffling the results into their phase
//!   positions produces the HR error map in a single pass over LR space.
//!   This equals the adjoint step normalized by diag(A^T A), a diagonal
//!   Newton step, on every pixel whose filter support avoids the borders.
//!
//! * `upscale_interp`, the conventional baseline: bicubic interpolation to
//!   HR space followed by the blur and warp adjoints, all in HR space.

use crate::error::{Error, Result};
use crate::image::ImageGray;
use crate::operators::{blur_adjoint, warp_adjoint, BlurKernel, Displacement};
use crate::resample::bicubic_resize;

/// Phase class of a high-resolution pixel relative to the decimation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubLocation {
    pub sr: usize,
    pub sc: usize,
}

impl SubLocation {
    /// Flat index in row-major sub-location order.
    pub fn index(&self, gamma: usize) -> usize {
        self.sr * gamma + self.sc
    }
}

/// Per-frame bank of normalized contribution filters, one per sub-location.
///
/// All filters share a common `t x t` window anchored at LR offset
/// `(anchor_u, anchor_v)` relative to the output block; entries outside a
/// sub-location's true support are zero. `raw_norms[s]` holds the squared
/// norm of the unnormalized contribution pattern, so multiplying a filter
/// back by its raw norm recovers the pattern exactly.
#[derive(Debug, Clone)]
pub struct FilterBank {
    gamma: usize,
    support: usize,
    anchor_u: isize,
    anchor_v: isize,
    filters: Vec<Vec<f64>>,
    raw_norms: Vec<f64>,
    displacement: Displacement,
}

impl FilterBank {
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Filter side length `t = ceil((a + 1) / gamma) + 1`.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn anchor(&self) -> (isize, isize) {
        (self.anchor_u, self.anchor_v)
    }

    pub fn filter(&self, s: SubLocation) -> &[f64] {
        &self.filters[s.index(self.gamma)]
    }

    pub fn raw_norm(&self, s: SubLocation) -> f64 {
        self.raw_norms[s.index(self.gamma)]
    }

    pub fn displacement(&self) -> Displacement {
        self.displacement
    }

    /// Plain-text dump: one block per sub-location with its raw norm and the
    /// `t x t` normalized taps, row per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let t = self.support;
        for sr in 0..self.gamma {
            for sc in 0..self.gamma {
                let s = SubLocation { sr, sc };
                out.push_str(&format!(
                    "sublocation {} {} raw_norm {:.17e} anchor {} {}\n",
                    sr, sc, self.raw_norm(s), self.anchor_u, self.anchor_v
                ));
                let f = self.filter(s);
                for row in 0..t {
                    let line: Vec<String> =
                        (0..t).map(|col| format!("{:.17e}", f[row * t + col])).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
        }
        out
    }
}

#[inline]
fn div_floor(a: isize, b: isize) -> isize {
    a.div_euclid(b)
}

#[inline]
fn div_ceil(a: isize, b: isize) -> isize {
    -((-a).div_euclid(b))
}

/// Build the per-sub-location contribution filters for one frame.
///
/// The combined HR-space kernel (blur taps spread over the bilinear warp
/// taps, shifted by the integer displacement) is sampled on the stride-gamma
/// decimation grid at each phase; each sampled pattern, divided by its
/// squared norm, is one filter. Phases the composed operator never touches
/// (possible for delta-like kernels) get an all-zero filter.
pub fn build_filter_bank(
    kernel: &BlurKernel,
    gamma: usize,
    d: &Displacement,
) -> Result<FilterBank> {
    if gamma == 0 {
        return Err(Error::InvalidParam("upscaling factor must be >= 1".into()));
    }
    let a = kernel.size();
    let half = (a / 2) as isize;
    let (iy, ix) = d.floor();
    let (fy, fx) = d.subpixel();

    // Combined kernel on an (a+1) x (a+1) grid anchored at
    // (iy - half, ix - half) in HR offset coordinates.
    let side = a + 1;
    let m_lo = iy as isize - half;
    let n_lo = ix as isize - half;
    let mut combined = vec![0.0f64; side * side];
    let warp_taps = [
        (0isize, 0isize, (1.0 - fy) * (1.0 - fx)),
        (0, 1, (1.0 - fy) * fx),
        (1, 0, fy * (1.0 - fx)),
        (1, 1, fy * fx),
    ];
    for i in 0..a {
        for j in 0..a {
            let tap = kernel.tap(i, j);
            if tap == 0.0 {
                continue;
            }
            for &(wy, wx, ww) in &warp_taps {
                let m = i as isize - half + iy as isize + wy - m_lo;
                let n = j as isize - half + ix as isize + wx - n_lo;
                combined[m as usize * side + n as usize] += tap * ww;
            }
        }
    }

    let g = gamma as isize;
    let support = (a + 1).div_ceil(gamma) + 1;
    let m_hi = m_lo + side as isize - 1;
    let n_hi = n_lo + side as isize - 1;
    let anchor_u = div_ceil(m_lo, g);
    let anchor_v = div_ceil(n_lo, g);
    debug_assert!(div_floor(m_hi + g - 1, g) - anchor_u < support as isize);
    debug_assert!(div_floor(n_hi + g - 1, g) - anchor_v < support as isize);

    let mut filters = Vec::with_capacity(gamma * gamma);
    let mut raw_norms = Vec::with_capacity(gamma * gamma);
    for sr in 0..gamma as isize {
        for sc in 0..gamma as isize {
            let mut raw = vec![0.0f64; support * support];
            for du in 0..support as isize {
                for dv in 0..support as isize {
                    let m = g * (anchor_u + du) - sr;
                    let n = g * (anchor_v + dv) - sc;
                    if m >= m_lo && m <= m_hi && n >= n_lo && n <= n_hi {
                        raw[(du as usize) * support + dv as usize] =
                            combined[(m - m_lo) as usize * side + (n - n_lo) as usize];
                    }
                }
            }
            let norm_sq: f64 = raw.iter().map(|v| v * v).sum();
            if norm_sq > 0.0 {
                for v in &mut raw {
                    *v /= norm_sq;
                }
            } else {
                raw.fill(0.0);
            }
            filters.push(raw);
            raw_norms.push(norm_sq);
        }
    }

    Ok(FilterBank {
        gamma,
        support,
        anchor_u,
        anchor_v,
        filters,
        raw_norms,
        displacement: *d,
    })
}

/// Scatter `gamma^2` sub-location maps into one HR image:
/// `HR(gamma*q + s) = maps[s](q)`.
pub fn shuffle_to_hr(maps: &[ImageGray], gamma: usize) -> Result<ImageGray> {
    if maps.len() != gamma * gamma {
        return Err(Error::DimensionMismatch(format!(
            "shuffle needs {} maps, got {}",
            gamma * gamma,
            maps.len()
        )));
    }
    let (h, w) = (maps[0].height(), maps[0].width());
    for m in maps {
        maps[0].check_same_dims(m, "shuffle maps")?;
    }
    let mut out = ImageGray::zeros(h * gamma, w * gamma);
    for sr in 0..gamma {
        for sc in 0..gamma {
            let map = &maps[sr * gamma + sc];
            for r in 0..h {
                for c in 0..w {
                    out.set(r * gamma + sr, c * gamma + sc, map.get(r, c));
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of `shuffle_to_hr`: gather the `gamma^2` phase maps back out.
pub fn unshuffle_from_hr(hr: &ImageGray, gamma: usize) -> Result<Vec<ImageGray>> {
    if gamma == 0 || hr.height() % gamma != 0 || hr.width() % gamma != 0 {
        return Err(Error::DimensionMismatch(format!(
            "image {}x{} not divisible by {}",
            hr.height(),
            hr.width(),
            gamma
        )));
    }
    let (h, w) = (hr.height() / gamma, hr.width() / gamma);
    let mut maps = Vec::with_capacity(gamma * gamma);
    for sr in 0..gamma {
        for sc in 0..gamma {
            maps.push(ImageGray::from_fn(h, w, |r, c| {
                hr.get(r * gamma + sr, c * gamma + sc)
            }));
        }
    }
    Ok(maps)
}

/// End-to-end upscaling: correlate the LR error map with each sub-location
/// filter (replicate padding) and shuffle the results into the HR grid.
pub fn upscale_ete(e: &ImageGray, bank: &FilterBank) -> Result<ImageGray> {
    let gamma = bank.gamma;
    let t = bank.support;
    let (h, w) = (e.height(), e.width());
    let mut maps = Vec::with_capacity(gamma * gamma);
    for s_idx in 0..gamma * gamma {
        if bank.raw_norms[s_idx] == 0.0 {
            maps.push(ImageGray::zeros(h, w));
            continue;
        }
        let filt = &bank.filters[s_idx];
        let mut map = ImageGray::zeros(h, w);
        for r in 0..h {
            for c in 0..w {
                let mut acc = 0.0;
                for du in 0..t {
                    let rr = r as isize + bank.anchor_u + du as isize;
                    for dv in 0..t {
                        let tap = filt[du * t + dv];
                        if tap == 0.0 {
                            continue;
                        }
                        let cc = c as isize + bank.anchor_v + dv as isize;
                        acc += tap * e.get_clamped(rr, cc);
                    }
                }
                map.set(r, c, acc);
            }
        }
        maps.push(map);
    }
    shuffle_to_hr(&maps, gamma)
}

/// Conventional interpolation-based upscaling: bicubic to HR space, then the
/// blur and warp adjoints.
pub fn upscale_interp(
    e: &ImageGray,
    kernel: &BlurKernel,
    d: &Displacement,
    gamma: usize,
) -> Result<ImageGray> {
    if gamma == 0 {
        return Err(Error::InvalidParam("upscaling factor must be >= 1".into()));
    }
    let up = bicubic_resize(e, gamma as f64)?;
    let deblurred = blur_adjoint(&up, kernel)?;
    Ok(warp_adjoint(&deblurred, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::zero_insert;
    use crate::rng::Rng;
    use crate::sparse::build_sparse_operator;

    fn random_image(h: usize, w: usize, rng: &mut Rng) -> ImageGray {
        ImageGray::from_fn(h, w, |_, _| rng.next_range(-20.0, 20.0))
    }

    fn random_kernel(size: usize, rng: &mut Rng) -> BlurKernel {
        let taps: Vec<f64> = (0..size * size).map(|_| rng.next_range(0.01, 1.0)).collect();
        BlurKernel::normalized(size, taps).unwrap()
    }

    #[test]
    fn delta_kernel_bank_is_phase_selector() {
        let bank =
            build_filter_bank(&BlurKernel::delta(3).unwrap(), 2, &Displacement::zero()).unwrap();
        // phase (0,0): a single unit tap; all other phases dead (zero-guard)
        let s00 = SubLocation { sr: 0, sc: 0 };
        assert!((bank.raw_norm(s00) - 1.0).abs() < 1e-15);
        let f = bank.filter(s00);
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(f.iter().filter(|&&v| v != 0.0).count(), 1);
        for (sr, sc) in [(0, 1), (1, 0), (1, 1)] {
            let s = SubLocation { sr, sc };
            assert_eq!(bank.raw_norm(s), 0.0);
            assert!(bank.filter(s).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn support_matches_formula() {
        for (a, gamma, expect) in [(3usize, 2usize, 3usize), (5, 3, 3), (5, 2, 4), (7, 4, 3)] {
            let bank = build_filter_bank(
                &BlurKernel::gaussian(a, 1.0).unwrap(),
                gamma,
                &Displacement::new(0.25, -0.75),
            )
            .unwrap();
            assert_eq!(bank.support(), expect, "a={} gamma={}", a, gamma);
        }
    }

    #[test]
    fn trivial_bank_upscale_is_zero_insert() {
        let mut rng = Rng::new(50);
        let bank =
            build_filter_bank(&BlurKernel::delta(3).unwrap(), 2, &Displacement::zero()).unwrap();
        let e = random_image(4, 5, &mut rng);
        let up = upscale_ete(&e, &bank).unwrap();
        let zi = zero_insert(&e, 2).unwrap();
        for (a, b) in up.data().iter().zip(zi.data().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn filters_match_sparse_operator_columns() {
        let mut rng = Rng::new(51);
        let gamma = 3usize;
        let (hh, hw) = (15usize, 15usize);
        let k = random_kernel(5, &mut rng);
        let d = Displacement::new(rng.next_range(0.0, 1.0), rng.next_range(0.0, 1.0));
        let bank = build_filter_bank(&k, gamma, &d).unwrap();
        let op = build_sparse_operator((hh, hw), &d, &k, gamma).unwrap();
        let diag = op.diag_ata();
        let lw = hw / gamma;
        let t = bank.support();
        let (u0, v0) = bank.anchor();
        // interior block, clear of every border effect
        let (qr, qc) = (2usize, 2usize);
        for sr in 0..gamma {
            for sc in 0..gamma {
                let s = SubLocation { sr, sc };
                let col_idx = (qr * gamma + sr) * hw + (qc * gamma + sc);
                assert!(
                    (bank.raw_norm(s) - diag[col_idx]).abs() < 1e-10,
                    "raw norm vs diag at ({}, {})",
                    sr,
                    sc
                );
                // every atom entry appears at its predicted window slot
                let mut from_bank = vec![0.0f64; t * t];
                for du in 0..t {
                    for dv in 0..t {
                        from_bank[du * t + dv] =
                            bank.filter(s)[du * t + dv] * bank.raw_norm(s);
                    }
                }
                let mut from_op = vec![0.0f64; t * t];
                for (row, wgt) in op.column(col_idx) {
                    let (lr_r, lr_c) = (row / lw, row % lw);
                    let du = lr_r as isize - qr as isize - u0;
                    let dv = lr_c as isize - qc as isize - v0;
                    assert!(
                        (0..t as isize).contains(&du) && (0..t as isize).contains(&dv),
                        "atom entry outside filter window"
                    );
                    from_op[du as usize * t + dv as usize] = wgt;
                }
                for (a, b) in from_bank.iter().zip(from_op.iter()) {
                    assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
                }
            }
        }
    }

    #[test]
    fn upscale_ete_is_linear() {
        let mut rng = Rng::new(52);
        let k = random_kernel(5, &mut rng);
        let d = Displacement::new(1.7, -2.2);
        let bank = build_filter_bank(&k, 3, &d).unwrap();
        let e1 = random_image(6, 6, &mut rng);
        let e2 = random_image(6, 6, &mut rng);
        let (alpha, beta) = (2.5, -1.25);
        let mut combo = e1.clone();
        for (v, w) in combo.data_mut().iter_mut().zip(e2.data().iter()) {
            *v = alpha * *v + beta * w;
        }
        let lhs = upscale_ete(&combo, &bank).unwrap();
        let u1 = upscale_ete(&e1, &bank).unwrap();
        let u2 = upscale_ete(&e2, &bank).unwrap();
        for i in 0..lhs.data().len() {
            let rhs = alpha * u1.data()[i] + beta * u2.data()[i];
            assert!((lhs.data()[i] - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn shuffle_round_trips_both_ways() {
        let mut rng = Rng::new(53);
        let gamma = 3usize;
        let maps: Vec<ImageGray> =
            (0..gamma * gamma).map(|_| random_image(4, 5, &mut rng)).collect();
        let hr = shuffle_to_hr(&maps, gamma).unwrap();
        let back = unshuffle_from_hr(&hr, gamma).unwrap();
        for (m, b) in maps.iter().zip(back.iter()) {
            assert_eq!(m.data(), b.data());
        }
        let hr2 = shuffle_to_hr(&back, gamma).unwrap();
        assert_eq!(hr.data(), hr2.data());
    }

    #[test]
    fn constant_maps_shuffle_to_periodic_pattern() {
        let gamma = 2usize;
        let maps: Vec<ImageGray> =
            (0..4).map(|s| ImageGray::constant(3, 3, s as f64)).collect();
        let hr = shuffle_to_hr(&maps, gamma).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(hr.get(r, c), ((r % 2) * 2 + c % 2) as f64);
            }
        }
    }

    #[test]
    fn dump_lists_every_sublocation_with_norms() {
        let mut rng = Rng::new(55);
        let bank = build_filter_bank(&random_kernel(3, &mut rng), 2, &Displacement::new(0.3, 0.7))
            .unwrap();
        let text = bank.dump();
        let headers: Vec<&str> =
            text.lines().filter(|l| l.starts_with("sublocation")).collect();
        assert_eq!(headers.len(), 4);
        // each block: header + t tap rows, all parseable
        let t = bank.support();
        assert_eq!(text.lines().count(), 4 * (1 + t));
        for line in text.lines().filter(|l| !l.starts_with("sublocation")) {
            for field in line.split_whitespace() {
                field.parse::<f64>().unwrap();
            }
        }
    }

    #[test]
    fn upscale_interp_identity_case() {
        let mut rng = Rng::new(54);
        let e = random_image(5, 5, &mut rng);
        let out =
            upscale_interp(&e, &BlurKernel::delta(1).unwrap(), &Displacement::zero(), 1).unwrap();
        for (a, b) in e.data().iter().zip(out.data().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn upscale_interp_preserves_constants_on_interior() {
        let e = ImageGray::constant(8, 8, 13.5);
        let k = BlurKernel::gaussian(5, 1.2).unwrap();
        let out = upscale_interp(&e, &k, &Displacement::new(0.3, 0.4), 3).unwrap();
        // adjoint scatter piles weight up at borders; interior is exact
        for r in 6..18 {
            for c in 6..18 {
                assert!((out.get(r, c) - 13.5).abs() < 1e-9, "({}, {}) = {}", r, c, out.get(r, c));
            }
        }
    }
}
