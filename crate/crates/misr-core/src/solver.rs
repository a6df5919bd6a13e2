//! Iterative multi-frame reconstruction.
//!
//! Starting from a bicubic upscale of the target frame, each iteration
//! computes per-frame error maps in LR space, projects them back to HR space
//! with the selected upscaler (end-to-end filters or the interpolation
//! chain), adds the weighted regularizer gradient, and takes a fixed-step
//! descent update. Iteration stops when the relative change drops below the
//! tolerance or the iteration cap is reached.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::image::ImageGray;
use crate::operators::{forward, BlurKernel, Displacement};
use crate::regularizers::{reg_grad, reg_value, RegularizerSpec};
use crate::resample::bicubic_resize;
use crate::upscaler::{build_filter_bank, upscale_ete, upscale_interp, FilterBank};

/// How LR error maps are projected back to HR space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpscalerMode {
    /// Per-sub-location filters + shuffle (diagonal-Newton style).
    Ete,
    /// Bicubic interpolation followed by blur and warp adjoints.
    Interp,
}

impl UpscalerMode {
    pub fn name(&self) -> &'static str {
        match self {
            UpscalerMode::Ete => "ete",
            UpscalerMode::Interp => "interp",
        }
    }
}

/// Solver parameters. Defaults: step 0.1, weight 0.1, tolerance 1e-5,
/// at most 30 iterations.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub eta: f64,
    pub lambda: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub regularizer: RegularizerSpec,
    pub mode: UpscalerMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            lambda: 0.1,
            eps: 1e-5,
            max_iter: 30,
            regularizer: RegularizerSpec::btv_default(),
            mode: UpscalerMode::Ete,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParam(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParam(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParam(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParam("max_iter must be >= 1".into()));
        }
        self.regularizer.validate()
    }
}

/// One burst of registered LR observations plus the degradation metadata.
#[derive(Debug, Clone)]
pub struct FrameSet {
    frames: Vec<ImageGray>,
    displacements: Vec<Displacement>,
    kernel: BlurKernel,
    gamma: usize,
}

impl FrameSet {
    /// Validates: at least one frame, matching dimensions, one displacement
    /// per frame, and a zero displacement on the target (first) frame.
    pub fn new(
        frames: Vec<ImageGray>,
        displacements: Vec<Displacement>,
        kernel: BlurKernel,
        gamma: usize,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidParam("frame set needs at least one frame".into()));
        }
        if frames.len() != displacements.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} frames vs {} displacements",
                frames.len(),
                displacements.len()
            )));
        }
        if gamma == 0 {
            return Err(Error::InvalidParam("upscaling factor must be >= 1".into()));
        }
        for f in &frames[1..] {
            frames[0].check_same_dims(f, "frames")?;
        }
        let d0 = displacements[0];
        if d0.dy != 0.0 || d0.dx != 0.0 {
            return Err(Error::InvalidParam(format!(
                "target frame displacement must be (0, 0), got ({}, {})",
                d0.dy, d0.dx
            )));
        }
        Ok(Self { frames, displacements, kernel, gamma })
    }

    pub fn frames(&self) -> &[ImageGray] {
        &self.frames
    }

    pub fn displacements(&self) -> &[Displacement] {
        &self.displacements
    }

    pub fn kernel(&self) -> &BlurKernel {
        &self.kernel
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn lr_dims(&self) -> (usize, usize) {
        (self.frames[0].height(), self.frames[0].width())
    }

    pub fn hr_dims(&self) -> (usize, usize) {
        (self.frames[0].height() * self.gamma, self.frames[0].width() * self.gamma)
    }
}

/// One per-iteration record of the reconstruction loop. `fidelity` and
/// `reg_value` are evaluated at the iterate the step started from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub rel_change: f64,
    pub fidelity: f64,
    pub reg_value: f64,
    pub ms: f64,
}

/// Per-iteration history of one reconstruction.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTrace {
    records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Iterations until the relative change first drops below `eps`, or
    /// `None` if it never does.
    pub fn iterations_to_tolerance(&self, eps: f64) -> Option<usize> {
        self.records.iter().find(|r| r.rel_change < eps).map(|r| r.iter)
    }

    /// CSV with header `iter,rel_change,fidelity,reg_value,ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,rel_change,fidelity,reg_value,ms\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.3}\n",
                r.iter, r.rel_change, r.fidelity, r.reg_value, r.ms
            ));
        }
        out
    }
}

/// Per-frame LR error maps `forward(x, d_k) - Y_k`.
pub fn compute_error_maps(x: &ImageGray, fs: &FrameSet) -> Result<Vec<ImageGray>> {
    let (hh, hw) = fs.hr_dims();
    if (x.height(), x.width()) != (hh, hw) {
        return Err(Error::DimensionMismatch(format!(
            "estimate {}x{} vs expected HR {}x{}",
            x.height(),
            x.width(),
            hh,
            hw
        )));
    }
    let mut maps = Vec::with_capacity(fs.frames.len());
    for (frame, d) in fs.frames.iter().zip(fs.displacements.iter()) {
        let predicted = forward(x, d, &fs.kernel, fs.gamma)?;
        maps.push(predicted.sub(frame)?);
    }
    Ok(maps)
}

/// Sum of squared error-map norms at `x` (the data-fidelity term).
pub fn data_fidelity(x: &ImageGray, fs: &FrameSet) -> Result<f64> {
    Ok(compute_error_maps(x, fs)?.iter().map(|e| e.norm_sq()).sum())
}

/// Reusable solver state: the per-frame filter banks are built once, not per
/// iteration.
pub struct Reconstructor<'a> {
    fs: &'a FrameSet,
    cfg: &'a SolverConfig,
    banks: Vec<FilterBank>,
}

impl<'a> Reconstructor<'a> {
    pub fn new(fs: &'a FrameSet, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let banks = match cfg.mode {
            UpscalerMode::Ete => fs
                .displacements
                .iter()
                .map(|d| build_filter_bank(&fs.kernel, fs.gamma, d))
                .collect::<Result<Vec<_>>>()?,
            UpscalerMode::Interp => Vec::new(),
        };
        Ok(Self { fs, cfg, banks })
    }

    /// One descent step from `x`.
    pub fn step(&self, x: &ImageGray) -> Result<ImageGray> {
        let maps = compute_error_maps(x, self.fs)?;
        let (hh, hw) = self.fs.hr_dims();
        let mut update = ImageGray::zeros(hh, hw);
        for (k, e) in maps.iter().enumerate() {
            let projected = match self.cfg.mode {
                UpscalerMode::Ete => upscale_ete(e, &self.banks[k])?,
                UpscalerMode::Interp => {
                    upscale_interp(e, &self.fs.kernel, &self.fs.displacements[k], self.fs.gamma)?
                }
            };
            update.add_scaled(&projected, 1.0)?;
        }
        if self.cfg.lambda > 0.0 {
            let g = reg_grad(x, &self.cfg.regularizer)?;
            update.add_scaled(&g, self.cfg.lambda)?;
        }
        let mut next = x.clone();
        next.add_scaled(&update, -self.cfg.eta)?;
        Ok(next)
    }
}

/// One descent step with a throwaway solver state. The reconstruction loop
/// uses `Reconstructor` so filter banks are cached across iterations.
pub fn update_step(x: &ImageGray, fs: &FrameSet, cfg: &SolverConfig) -> Result<ImageGray> {
    Reconstructor::new(fs, cfg)?.step(x)
}

/// Relative change guard: beyond this the fixed-step iteration is deemed to
/// have blown up.
const DIVERGENCE_REL_CHANGE: f64 = 1e3;

/// Full reconstruction: bicubic initialization from the target frame, then
/// fixed-step iterations until the relative change falls below `cfg.eps` or
/// `cfg.max_iter` is hit. The returned estimate is not clamped; clamping to
/// [0, 255] happens at metric and save time.
pub fn reconstruct(fs: &FrameSet, cfg: &SolverConfig) -> Result<(ImageGray, ConvergenceTrace)> {
    let solver = Reconstructor::new(fs, cfg)?;
    let mut x = bicubic_resize(&fs.frames[0], fs.gamma as f64)?;
    let mut trace = ConvergenceTrace::default();
    for iter in 1..=cfg.max_iter {
        let started = Instant::now();
        let fidelity = data_fidelity(&x, fs)?;
        let reg = reg_value(&x, &cfg.regularizer)?;
        let next = solver.step(&x)?;
        if !next.is_finite() {
            return Err(Error::Divergence {
                iteration: iter,
                detail: "non-finite values in iterate".into(),
            });
        }
        let prev_norm = x.norm_sq().sqrt();
        let diff_norm = next.sub(&x)?.norm_sq().sqrt();
        let rel_change = if prev_norm > 0.0 { diff_norm / prev_norm } else { diff_norm };
        if !rel_change.is_finite() || rel_change > DIVERGENCE_REL_CHANGE {
            return Err(Error::Divergence {
                iteration: iter,
                detail: format!("relative change {:.3e}", rel_change),
            });
        }
        x = next;
        trace.records.push(TraceRecord {
            iter,
            rel_change,
            fidelity,
            reg_value: reg,
            ms: started.elapsed().as_secs_f64() * 1e3,
        });
        if rel_change < cfg.eps {
            break;
        }
    }
    Ok((x, trace))
}
