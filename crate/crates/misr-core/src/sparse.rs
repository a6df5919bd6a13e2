//! Explicit sparse realization of the composed degradation operator for
//! small images. Built column by column by pushing one-hot basis images
//! through the matrix-free forward path, so it is exact by construction and
//! serves as the brute-force oracle for everything else.

use crate::error::{Error, Result};
use crate::image::ImageGray;
use crate::operators::{forward, BlurKernel, Displacement};

/// Largest high-resolution pixel count the brute-force enumeration accepts.
pub const MAX_HR_PIXELS: usize = 65_536;

/// Row-major sparse matrix of the composed warp-blur-decimate operator.
/// Rows index low-resolution pixels, columns high-resolution pixels.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    hr_dims: (usize, usize),
    lr_dims: (usize, usize),
    /// (row, col, weight) triples sorted by column then row.
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOperator {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn hr_dims(&self) -> (usize, usize) {
        self.hr_dims
    }

    pub fn lr_dims(&self) -> (usize, usize) {
        self.lr_dims
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// y = A x with x a vectorized high-resolution image.
    pub fn apply(&self, x: &ImageGray) -> Result<ImageGray> {
        if (x.height(), x.width()) != self.hr_dims {
            return Err(Error::DimensionMismatch(format!(
                "apply: image {}x{} vs operator HR {}x{}",
                x.height(),
                x.width(),
                self.hr_dims.0,
                self.hr_dims.1
            )));
        }
        let mut out = vec![0.0; self.rows];
        for &(r, c, w) in &self.entries {
            out[r] += w * x.data()[c];
        }
        ImageGray::from_data(self.lr_dims.0, self.lr_dims.1, out)
    }

    /// x = A^T e with e a vectorized low-resolution image.
    pub fn apply_transpose(&self, e: &ImageGray) -> Result<ImageGray> {
        if (e.height(), e.width()) != self.lr_dims {
            return Err(Error::DimensionMismatch(format!(
                "apply_transpose: image {}x{} vs operator LR {}x{}",
                e.height(),
                e.width(),
                self.lr_dims.0,
                self.lr_dims.1
            )));
        }
        let mut out = vec![0.0; self.cols];
        for &(r, c, w) in &self.entries {
            out[c] += w * e.data()[r];
        }
        ImageGray::from_data(self.hr_dims.0, self.hr_dims.1, out)
    }

    /// One column (the atom of a single HR pixel) as (lr_row, weight) pairs.
    pub fn column(&self, col: usize) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .filter(|&&(_, c, _)| c == col)
            .map(|&(r, _, w)| (r, w))
            .collect()
    }

    /// Per-column squared norms: the diagonal of A^T A.
    pub fn diag_ata(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.cols];
        for &(_, c, w) in &self.entries {
            diag[c] += w * w;
        }
        diag
    }

    /// Per-column sums (total contribution of each HR pixel to LR space).
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for &(_, c, w) in &self.entries {
            sums[c] += w;
        }
        sums
    }

    /// Plain-text triple dump, one `row col weight` line per entry.
    pub fn to_triples_text(&self) -> String {
        let mut s = String::new();
        for &(r, c, w) in &self.entries {
            s.push_str(&format!("{} {} {:.17e}\n", r, c, w));
        }
        s
    }
}

/// Enumerate the operator columns by applying `forward` to every one-hot
/// high-resolution basis image.
pub fn build_sparse_operator(
    hr_dims: (usize, usize),
    d: &Displacement,
    kernel: &BlurKernel,
    gamma: usize,
) -> Result<SparseOperator> {
    let (hh, hw) = hr_dims;
    let n_hr = hh * hw;
    if n_hr > MAX_HR_PIXELS {
        return Err(Error::SizeGuard(format!(
            "{} HR pixels exceeds brute-force limit {}",
            n_hr, MAX_HR_PIXELS
        )));
    }
    if gamma == 0 || hh % gamma != 0 || hw % gamma != 0 {
        return Err(Error::DimensionMismatch(format!(
            "HR dims {}x{} not divisible by {}",
            hh, hw, gamma
        )));
    }
    let (lh, lw) = (hh / gamma, hw / gamma);
    let n_lr = lh * lw;
    let mut entries = Vec::new();
    let mut basis = ImageGray::zeros(hh, hw);
    for col in 0..n_hr {
        basis.data_mut()[col] = 1.0;
        let y = forward(&basis, d, kernel, gamma)?;
        for (row, &w) in y.data().iter().enumerate() {
            if w != 0.0 {
                entries.push((row, col, w));
            }
        }
        basis.data_mut()[col] = 0.0;
    }
    Ok(SparseOperator {
        rows: n_lr,
        cols: n_hr,
        hr_dims: (hh, hw),
        lr_dims: (lh, lw),
        entries,
    })
}
