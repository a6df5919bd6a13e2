//! On-disk burst format: one PGM per frame plus a plain-text manifest.
//!
//! The manifest has one line per frame, `frame_index dy dx seed`, preceded by
//! `# key value` comment lines carrying the degradation parameters so a
//! burst directory is self-contained:
//!
//! ```text
//! # scale 3
//! # blur-size 5
//! # blur-sigma 1.2
//! # noise-sigma 1
//! # shift-range 5
//! 1 0 0 17495564265569860436
//! 2 -3.0239621698436784 4.4958286665646 12665276900663906472
//! ```
//!
//! Frame files are named `frame_<index>.pgm` with a zero-padded 3-digit
//! index. Displacements print in Rust's shortest round-trip form, so reading
//! a manifest back reproduces the exact f64 values.

use std::path::Path;

use misr_core::error::{Error, Result};
use misr_core::io::{load_pgm, save_pgm};
use misr_core::operators::{BlurKernel, Displacement};
use misr_core::sim::{DegradationParams, DegradedBurst};
use misr_core::solver::FrameSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub index: usize,
    pub dy: f64,
    pub dx: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BurstManifest {
    pub scale: usize,
    pub blur_size: usize,
    pub blur_sigma: f64,
    pub noise_sigma: f64,
    pub shift_range: f64,
    pub entries: Vec<ManifestEntry>,
}

impl BurstManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# scale {}\n", self.scale));
        out.push_str(&format!("# blur-size {}\n", self.blur_size));
        out.push_str(&format!("# blur-sigma {}\n", self.blur_sigma));
        out.push_str(&format!("# noise-sigma {}\n", self.noise_sigma));
        out.push_str(&format!("# shift-range {}\n", self.shift_range));
        for e in &self.entries {
            out.push_str(&format!("{} {} {} {}\n", e.index, e.dy, e.dx, e.seed));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut scale = None;
        let mut blur_size = None;
        let mut blur_sigma = None;
        let mut noise_sigma = 0.0;
        let mut shift_range = 0.0;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some("scale"), Some(v)) => scale = Some(parse_num(v, lineno)?),
                    (Some("blur-size"), Some(v)) => blur_size = Some(parse_num(v, lineno)?),
                    (Some("blur-sigma"), Some(v)) => blur_sigma = Some(parse_f64(v, lineno)?),
                    (Some("noise-sigma"), Some(v)) => noise_sigma = parse_f64(v, lineno)?,
                    (Some("shift-range"), Some(v)) => shift_range = parse_f64(v, lineno)?,
                    _ => {} // unknown comments are ignored
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::MalformedFile(format!(
                    "manifest line {}: expected 'frame_index dy dx seed', got '{}'",
                    lineno + 1,
                    line
                )));
            }
            entries.push(ManifestEntry {
                index: parse_num(fields[0], lineno)?,
                dy: parse_f64(fields[1], lineno)?,
                dx: parse_f64(fields[2], lineno)?,
                seed: fields[3].parse::<u64>().map_err(|_| {
                    Error::MalformedFile(format!("manifest line {}: bad seed", lineno + 1))
                })?,
            });
        }
        if entries.is_empty() {
            return Err(Error::MalformedFile("manifest has no frame lines".into()));
        }
        Ok(Self {
            scale: scale
                .ok_or_else(|| Error::MalformedFile("manifest missing '# scale' line".into()))?,
            blur_size: blur_size
                .ok_or_else(|| Error::MalformedFile("manifest missing '# blur-size' line".into()))?,
            blur_sigma: blur_sigma.ok_or_else(|| {
                Error::MalformedFile("manifest missing '# blur-sigma' line".into())
            })?,
            noise_sigma,
            shift_range,
            entries,
        })
    }
}

fn parse_num(s: &str, lineno: usize) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::MalformedFile(format!("manifest line {}: bad integer '{}'", lineno + 1, s)))
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::MalformedFile(format!("manifest line {}: bad number '{}'", lineno + 1, s)))
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{:03}.pgm", index)
}

/// Write a degraded burst as PGM frames plus `manifest.txt`. The blur sigma
/// is passed explicitly because `BlurKernel` stores only taps.
pub fn write_burst(
    dir: &Path,
    burst: &DegradedBurst,
    params: &DegradationParams,
    blur_sigma: f64,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {}", dir.display(), e)))?;
    let fs = &burst.frame_set;
    let mut entries = Vec::new();
    for (i, frame) in fs.frames().iter().enumerate() {
        let index = i + 1;
        save_pgm(&dir.join(frame_file_name(index)), frame)?;
        let d = fs.displacements()[i];
        entries.push(ManifestEntry { index, dy: d.dy, dx: d.dx, seed: burst.noise_seeds[i] });
    }
    let manifest = BurstManifest {
        scale: params.scale,
        blur_size: params.kernel.size(),
        blur_sigma,
        noise_sigma: params.noise_sigma,
        shift_range: params.shift_range,
        entries,
    };
    std::fs::write(dir.join("manifest.txt"), manifest.to_text())
        .map_err(|e| Error::Io(format!("{}: {}", dir.display(), e)))?;
    Ok(())
}

/// Read a burst directory back into a frame set. The blur kernel is rebuilt
/// as a Gaussian from the manifest parameters (the only kernel the degrade
/// command writes).
pub fn read_burst(dir: &Path) -> Result<(FrameSet, BurstManifest)> {
    let text = std::fs::read_to_string(dir.join("manifest.txt"))
        .map_err(|e| Error::Io(format!("{}: {}", dir.join("manifest.txt").display(), e)))?;
    let manifest = BurstManifest::parse(&text)?;
    let mut frames = Vec::with_capacity(manifest.entries.len());
    let mut displacements = Vec::with_capacity(manifest.entries.len());
    for e in &manifest.entries {
        frames.push(load_pgm(&dir.join(frame_file_name(e.index)))?);
        displacements.push(Displacement::new(e.dy, e.dx));
    }
    let kernel = build_manifest_kernel(manifest.blur_size, manifest.blur_sigma)?;
    let fs = FrameSet::new(frames, displacements, kernel, manifest.scale)?;
    Ok((fs, manifest))
}

/// Gaussian kernel for the manifest parameters; sigma 0 means a delta.
pub fn build_manifest_kernel(size: usize, sigma: f64) -> Result<BlurKernel> {
    if sigma == 0.0 {
        BlurKernel::delta(size)
    } else {
        BlurKernel::gaussian(size, sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_text_round_trips() {
        let m = BurstManifest {
            scale: 3,
            blur_size: 5,
            blur_sigma: 1.2,
            noise_sigma: 1.0,
            shift_range: 5.0,
            entries: vec![
                ManifestEntry { index: 1, dy: 0.0, dx: 0.0, seed: 42 },
                ManifestEntry { index: 2, dy: -3.0239621698436784, dx: 4.4958286665646, seed: 7 },
            ],
        };
        let parsed = BurstManifest::parse(&m.to_text()).unwrap();
        assert_eq!(parsed.scale, 3);
        assert_eq!(parsed.blur_size, 5);
        assert_eq!(parsed.blur_sigma, 1.2);
        assert_eq!(parsed.entries, m.entries);
    }

    #[test]
    fn manifest_rejects_garbage() {
        assert!(BurstManifest::parse("").is_err());
        assert!(BurstManifest::parse("# scale 3\n1 2 3\n").is_err());
        assert!(BurstManifest::parse("1 0 0 5\n").is_err()); // missing params
    }

    #[test]
    fn frame_names_are_zero_padded() {
        assert_eq!(frame_file_name(1), "frame_001.pgm");
        assert_eq!(frame_file_name(12), "frame_012.pgm");
    }
}
