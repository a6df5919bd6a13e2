//! Regularization terms and their (sub)gradients.
//!
//! Three priors are available:
//!
//! * Tikhonov: squared norm of the 5-point discrete Laplacian (replicate
//!   padding); the gradient is the exact transpose chain `2 L^T L x`.
//! * TV: smoothed isotropic total variation on forward differences,
//!   `sum sqrt(dx^2 + dy^2 + eps^2)`; the gradient is its exact derivative.
//! * BTV: bilateral total variation, L1 norms of shifted differences over a
//!   `(2P+1)^2` window, weighted by `alpha^(|l|+|m|)`, with the customary
//!   inverse-shift subgradient and `sign(0) = 0`.

use crate::error::{Error, Result};
use crate::image::ImageGray;

/// Which prior to apply, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerSpec {
    Tikhonov,
    /// `epsilon` smooths the norm at zero so the gradient is defined.
    Tv { epsilon: f64 },
    /// `window` is P (offsets -P..=P per axis), `decay` is alpha in (0, 1].
    Btv { window: usize, decay: f64 },
}

impl RegularizerSpec {
    pub const DEFAULT_TV_EPSILON: f64 = 1e-3;
    pub const DEFAULT_BTV_WINDOW: usize = 2;
    pub const DEFAULT_BTV_DECAY: f64 = 0.7;

    pub fn tv_default() -> Self {
        RegularizerSpec::Tv { epsilon: Self::DEFAULT_TV_EPSILON }
    }

    pub fn btv_default() -> Self {
        RegularizerSpec::Btv {
            window: Self::DEFAULT_BTV_WINDOW,
            decay: Self::DEFAULT_BTV_DECAY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RegularizerSpec::Tikhonov => Ok(()),
            RegularizerSpec::Tv { epsilon } => {
                if epsilon > 0.0 && epsilon.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParam(format!("tv epsilon must be > 0, got {}", epsilon)))
                }
            }
            RegularizerSpec::Btv { window, decay } => {
                if window == 0 {
                    return Err(Error::InvalidParam("btv window P must be >= 1".into()));
                }
                if !(decay > 0.0 && decay <= 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "btv decay alpha must be in (0, 1], got {}",
                        decay
                    )));
                }
                Ok(())
            }
        }
    }
}

/// 5-point Laplacian with replicate padding (gather form).
fn laplacian(x: &ImageGray) -> ImageGray {
    let (h, w) = (x.height(), x.width());
    ImageGray::from_fn(h, w, |r, c| {
        let (r, c) = (r as isize, c as isize);
        4.0 * x.get_clamped(r, c)
            - x.get_clamped(r - 1, c)
            - x.get_clamped(r + 1, c)
            - x.get_clamped(r, c - 1)
            - x.get_clamped(r, c + 1)
    })
}

/// Exact transpose of `laplacian` (scatter with the same clamped indices).
fn laplacian_adjoint(x: &ImageGray) -> ImageGray {
    let (h, w) = (x.height(), x.width());
    let mut out = ImageGray::zeros(h, w);
    let clamp = |r: isize, c: isize| {
        (
            r.clamp(0, h as isize - 1) as usize,
            c.clamp(0, w as isize - 1) as usize,
        )
    };
    for r in 0..h as isize {
        for c in 0..w as isize {
            let v = x.get(r as usize, c as usize);
            for (rr, cc, wgt) in [
                (r, c, 4.0),
                (r - 1, c, -1.0),
                (r + 1, c, -1.0),
                (r, c - 1, -1.0),
                (r, c + 1, -1.0),
            ] {
                let (pr, pc) = clamp(rr, cc);
                out.set(pr, pc, out.get(pr, pc) + wgt * v);
            }
        }
    }
    out
}

/// Shift by (l, m) with replicate padding: `out(r, c) = x(r - l, c - m)`.
fn shift(x: &ImageGray, l: isize, m: isize) -> ImageGray {
    ImageGray::from_fn(x.height(), x.width(), |r, c| {
        x.get_clamped(r as isize - l, c as isize - m)
    })
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Regularization value R(x) >= 0.
pub fn reg_value(x: &ImageGray, spec: &RegularizerSpec) -> Result<f64> {
    spec.validate()?;
    match *spec {
        RegularizerSpec::Tikhonov => Ok(laplacian(x).norm_sq()),
        RegularizerSpec::Tv { epsilon } => {
            let (h, w) = (x.height(), x.width());
            let mut total = 0.0;
            for r in 0..h {
                for c in 0..w {
                    let dy = if r + 1 < h { x.get(r + 1, c) - x.get(r, c) } else { 0.0 };
                    let dx = if c + 1 < w { x.get(r, c + 1) - x.get(r, c) } else { 0.0 };
                    total += (dy * dy + dx * dx + epsilon * epsilon).sqrt();
                }
            }
            Ok(total)
        }
        RegularizerSpec::Btv { window, decay } => {
            let p = window as isize;
            let mut total = 0.0;
            for l in -p..=p {
                for m in -p..=p {
                    if l == 0 && m == 0 {
                        continue;
                    }
                    let weight = decay.powi((l.abs() + m.abs()) as i32);
                    let shifted = shift(x, l, m);
                    let l1: f64 = x
                        .data()
                        .iter()
                        .zip(shifted.data().iter())
                        .map(|(a, b)| (a - b).abs())
                        .sum();
                    total += weight * l1;
                }
            }
            Ok(total)
        }
    }
}

/// (Sub)gradient of R at x.
pub fn reg_grad(x: &ImageGray, spec: &RegularizerSpec) -> Result<ImageGray> {
    spec.validate()?;
    match *spec {
        RegularizerSpec::Tikhonov => {
            let mut g = laplacian_adjoint(&laplacian(x));
            for v in g.data_mut() {
                *v *= 2.0;
            }
            Ok(g)
        }
        RegularizerSpec::Tv { epsilon } => {
            let (h, w) = (x.height(), x.width());
            // phi(r, c) = sqrt(dy^2 + dx^2 + eps^2) with forward differences
            let mut dyv = vec![0.0; h * w];
            let mut dxv = vec![0.0; h * w];
            let mut phi = vec![0.0; h * w];
            for r in 0..h {
                for c in 0..w {
                    let dy = if r + 1 < h { x.get(r + 1, c) - x.get(r, c) } else { 0.0 };
                    let dx = if c + 1 < w { x.get(r, c + 1) - x.get(r, c) } else { 0.0 };
                    dyv[r * w + c] = dy;
                    dxv[r * w + c] = dx;
                    phi[r * w + c] = (dy * dy + dx * dx + epsilon * epsilon).sqrt();
                }
            }
            let mut g = ImageGray::zeros(h, w);
            for r in 0..h {
                for c in 0..w {
                    let i = r * w + c;
                    let mut acc = -(dyv[i] + dxv[i]) / phi[i];
                    if r > 0 {
                        let j = (r - 1) * w + c;
                        acc += dyv[j] / phi[j];
                    }
                    if c > 0 {
                        let j = r * w + (c - 1);
                        acc += dxv[j] / phi[j];
                    }
                    g.set(r, c, acc);
                }
            }
            Ok(g)
        }
        RegularizerSpec::Btv { window, decay } => {
            let p = window as isize;
            let (h, w) = (x.height(), x.width());
            let mut g = ImageGray::zeros(h, w);
            for l in -p..=p {
                for m in -p..=p {
                    if l == 0 && m == 0 {
                        continue;
                    }
                    let weight = decay.powi((l.abs() + m.abs()) as i32);
                    let shifted = shift(x, l, m);
                    let signs = ImageGray::from_fn(h, w, |r, c| {
                        sign(x.get(r, c) - shifted.get(r, c))
                    });
                    let back = shift(&signs, -l, -m);
                    for i in 0..h * w {
                        g.data_mut()[i] += weight * (signs.data()[i] - back.data()[i]);
                    }
                }
            }
            Ok(g)
        }
    }
}
